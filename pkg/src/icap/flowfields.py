"""Divergence-free velocity fields from stream functions.

Face-mean normal velocities are endpoint differences of the stream
function divided by the face length, so the discrete divergence of every
cell telescopes to zero exactly, independent of grid resolution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import Grid2D


def _one(t: float) -> float:
    return 1.0


@dataclass(frozen=True)
class FlowField:
    """Separable incompressible flow u = sigma(t) * (d psi/dy, -d psi/dx).

    ``psi(x, y)`` is the spatial stream function; ``time_factor(t)`` is a
    scalar modulation (identity for steady flows). ``velocity`` is
    optional and only used by quadrature cross-checks and reporting.
    """

    psi: Callable
    time_factor: Callable = _one
    velocity: Callable | None = None
    name: str = ""

    @property
    def steady(self) -> bool:
        return self.time_factor is _one


def uniform(a: float, b: float, name: str = "uniform") -> FlowField:
    """Constant velocity (a, b)."""
    def psi(x, y):
        return a * y - b * x

    def vel(x, y):
        return (a + np.zeros_like(x), b + np.zeros_like(y))

    return FlowField(psi, velocity=vel, name=name)


def rotation(cx: float = 0.0, cy: float = 0.0, name: str = "rotation") -> FlowField:
    """Rigid-body rotation with angular velocity 1 about (cx, cy)."""
    def psi(x, y):
        return -((x - cx) ** 2 + (y - cy) ** 2) / 2.0

    def vel(x, y):
        return (-(y - cy), x - cx)

    return FlowField(psi, velocity=vel, name=name)


def zalesak_rotation(name: str = "zalesak") -> FlowField:
    """Rotation about (1/2, 1/2): u = (1/2 - y, x - 1/2)."""
    def psi(x, y):
        return (y - y * y + x - x * x) / 2.0

    def vel(x, y):
        return (0.5 - y, x - 0.5)

    return FlowField(psi, velocity=vel, name=name)


def kothe_rider_field(period: float = 12.0, name: str = "kothe_rider") -> FlowField:
    """Single-vortex deformation flow that reverses at t = period/2.

    psi = (1/pi) sin^2(pi x) sin^2(pi y), modulated by cos(pi t / period),
    so the exact solution at t = period is the initial condition. Normal
    velocity vanishes on the boundary of the unit square.
    """
    if not period > 0:
        raise ValueError("period must be positive")
    def psi(x, y):
        return np.sin(np.pi * x) ** 2 * np.sin(np.pi * y) ** 2 / np.pi

    def sigma(t):
        return float(np.cos(np.pi * t / period))

    def vel(x, y):
        u = np.sin(np.pi * x) ** 2 * np.sin(2 * np.pi * y)
        v = -np.sin(2 * np.pi * x) * np.sin(np.pi * y) ** 2
        return (u, v)

    return FlowField(psi, time_factor=sigma, velocity=vel, name=name)


@dataclass
class FaceVelocity:
    """Face-mean normal velocities on all faces of a grid at one time.

    vx[I, j]: mean u over the vertical face between cells (I-1, j), (I, j);
    vy[i, J]: mean v over the horizontal face between (i, J-1) and (i, J).
    hx / hy carry the same means over the lower/upper (left/right) face
    halves, used by reconstructions that integrate on half faces.
    """

    vx: np.ndarray  # (nx+1, ny)
    vy: np.ndarray  # (nx, ny+1)
    hx: np.ndarray  # (nx+1, ny, 2), [..., 0] lower half, [..., 1] upper
    hy: np.ndarray  # (nx, ny+1, 2), [..., 0] left half, [..., 1] right
    t: float = 0.0

    @property
    def max_speed(self) -> float:
        return max(float(np.abs(self.vx).max()), float(np.abs(self.vy).max()))

    def scaled(self, factor: float) -> "FaceVelocity":
        return FaceVelocity(self.vx * factor, self.vy * factor,
                            self.hx * factor, self.hy * factor, self.t)


def face_means(flow: FlowField, grid: Grid2D, t: float = 0.0) -> FaceVelocity:
    """Evaluate face means of flow at time t via stream-function differences."""
    h = grid.h
    xe = grid.x_edges()
    ye = grid.y_edges()
    ym = 0.5 * (ye[:-1] + ye[1:])
    xm = 0.5 * (xe[:-1] + xe[1:])

    # psi at all edge-line intersections and half-face midpoints
    psi_corner = flow.psi(xe[:, None], ye[None, :])          # (nx+1, ny+1)
    psi_xmid = flow.psi(xe[:, None], ym[None, :])            # (nx+1, ny)
    psi_ymid = flow.psi(xm[:, None], ye[None, :])            # (nx, ny+1)

    vx = (psi_corner[:, 1:] - psi_corner[:, :-1]) / h
    vy = -(psi_corner[1:, :] - psi_corner[:-1, :]) / h
    hx = np.stack([(psi_xmid - psi_corner[:, :-1]) / (h / 2),
                   (psi_corner[:, 1:] - psi_xmid) / (h / 2)], axis=-1)
    hy = np.stack([-(psi_ymid - psi_corner[:-1, :]) / (h / 2),
                   -(psi_corner[1:, :] - psi_ymid) / (h / 2)], axis=-1)

    s = flow.time_factor(t)
    fv = FaceVelocity(vx, vy, hx, hy, t)
    return fv if s == 1.0 else fv.scaled(s)


def divergence(v: FaceVelocity, h: float) -> np.ndarray:
    """Per-cell discrete divergence (1/h) * (dvx + dvy); zero to round-off."""
    return ((v.vx[1:, :] - v.vx[:-1, :]) + (v.vy[:, 1:] - v.vy[:, :-1])) / h
