"""Uniform 2D Cartesian mesh, ghost-cell management and boundary conditions.

Cell (i, j) covers [x0 + i*h, x0 + (i+1)*h] x [y0 + j*h, y0 + (j+1)*h];
its center is (x0 + (i+1/2)*h, y0 + (j+1/2)*h) and its area is h^2.
Fields are stored with a ghost layer of width ``ghost`` on every side so
that stencil sweeps never branch at the domain boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

PERIODIC = "periodic"
ZERO_GRADIENT = "zero_gradient"


class ConfigError(ValueError):
    """Inconsistent grid or boundary configuration."""


@dataclass(frozen=True)
class InflowExact:
    """Hold ghost cells at an analytic reference field.

    ``field(x, y, t)`` must accept coordinate arrays and return values at
    those points (pointwise evaluation at ghost-cell centers).
    """

    field: Callable


@dataclass(frozen=True)
class Grid2D:
    """Uniform square-cell Cartesian mesh with ghost layers."""

    nx: int
    ny: int
    h: float
    x0: float = 0.0
    y0: float = 0.0
    ghost: int = 2

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ConfigError(f"need nx, ny >= 3, got {self.nx} x {self.ny}")
        if not self.h > 0:
            raise ConfigError(f"need h > 0, got {self.h}")
        # ghost=2 covers every stencil used here: one ring for the 8-point
        # gradient plus one ring for neighbor reconstructions at boundary faces.
        if self.ghost < 2:
            raise ConfigError(f"need ghost >= 2, got {self.ghost}")

    @property
    def nxg(self) -> int:
        return self.nx + 2 * self.ghost

    @property
    def nyg(self) -> int:
        return self.ny + 2 * self.ghost

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def interior(self):
        g = self.ghost
        return (slice(g, g + self.nx), slice(g, g + self.ny))

    def x_centers(self, with_ghosts: bool = False) -> np.ndarray:
        i0 = -self.ghost if with_ghosts else 0
        i1 = self.nx + self.ghost if with_ghosts else self.nx
        return self.x0 + (np.arange(i0, i1) + 0.5) * self.h

    def y_centers(self, with_ghosts: bool = False) -> np.ndarray:
        j0 = -self.ghost if with_ghosts else 0
        j1 = self.ny + self.ghost if with_ghosts else self.ny
        return self.y0 + (np.arange(j0, j1) + 0.5) * self.h

    def cell_centers(self, with_ghosts: bool = False):
        """Meshgrid (indexing='ij') of cell-center coordinates."""
        return np.meshgrid(self.x_centers(with_ghosts), self.y_centers(with_ghosts),
                           indexing="ij")

    def x_edges(self) -> np.ndarray:
        return self.x0 + np.arange(self.nx + 1) * self.h

    def y_edges(self) -> np.ndarray:
        return self.y0 + np.arange(self.ny + 1) * self.h


class CellField:
    """Cell-averaged scalar over a grid, ghost cells included.

    ``values`` has shape (nx + 2*ghost, ny + 2*ghost), indexed [i, j] with
    i along x. Interior cells live at [ghost:ghost+nx, ghost:ghost+ny].
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid2D, values: np.ndarray | None = None):
        self.grid = grid
        if values is None:
            values = np.zeros((grid.nxg, grid.nyg))
        else:
            values = np.asarray(values, dtype=float)
            if values.shape != (grid.nxg, grid.nyg):
                raise ConfigError(
                    f"values shape {values.shape} != {(grid.nxg, grid.nyg)}")
        self.values = values

    @property
    def interior(self) -> np.ndarray:
        return self.values[self.grid.interior]

    @interior.setter
    def interior(self, v):
        self.values[self.grid.interior] = v

    def copy(self) -> "CellField":
        return CellField(self.grid, self.values.copy())

    def total_mass(self) -> float:
        return float(self.interior.sum()) * self.grid.cell_area


@dataclass(frozen=True)
class BoundarySpec:
    """Boundary kind per side: PERIODIC, ZERO_GRADIENT, or InflowExact."""

    left: object = PERIODIC
    right: object = PERIODIC
    bottom: object = PERIODIC
    top: object = PERIODIC

    def __post_init__(self):
        for side in (self.left, self.right, self.bottom, self.top):
            if side not in (PERIODIC, ZERO_GRADIENT) and not isinstance(side, InflowExact):
                raise ConfigError(f"unknown boundary kind {side!r}")
        if (self.left == PERIODIC) != (self.right == PERIODIC):
            raise ConfigError("periodic boundaries must pair left/right")
        if (self.bottom == PERIODIC) != (self.top == PERIODIC):
            raise ConfigError("periodic boundaries must pair bottom/top")

    @classmethod
    def periodic(cls) -> "BoundarySpec":
        return cls()

    @classmethod
    def zero_gradient(cls) -> "BoundarySpec":
        return cls(ZERO_GRADIENT, ZERO_GRADIENT, ZERO_GRADIENT, ZERO_GRADIENT)


def _fill_side_x(f: CellField, side, t: float, left: bool):
    grid, v = f.grid, f.values
    g, nx = grid.ghost, grid.nx
    dst = slice(0, g) if left else slice(g + nx, g + nx + g)
    if side == PERIODIC:
        src = slice(nx, nx + g) if left else slice(g, 2 * g)
        v[dst, :] = v[src, :]
    elif side == ZERO_GRADIENT:
        edge = g if left else g + nx - 1
        v[dst, :] = v[edge, :][None, :]
    else:  # InflowExact
        xs = grid.x_centers(with_ghosts=True)[dst]
        ys = grid.y_centers(with_ghosts=True)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        v[dst, :] = side.field(X, Y, t)


def _fill_side_y(f: CellField, side, t: float, bottom: bool):
    grid, v = f.grid, f.values
    g, ny = grid.ghost, grid.ny
    dst = slice(0, g) if bottom else slice(g + ny, g + ny + g)
    if side == PERIODIC:
        src = slice(ny, ny + g) if bottom else slice(g, 2 * g)
        v[:, dst] = v[:, src]
    elif side == ZERO_GRADIENT:
        edge = g if bottom else g + ny - 1
        v[:, dst] = v[:, edge][:, None]
    else:
        xs = grid.x_centers(with_ghosts=True)
        ys = grid.y_centers(with_ghosts=True)[dst]
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        v[:, dst] = side.field(X, Y, t)


def fill_ghosts(f: CellField, bc: BoundarySpec, t: float = 0.0) -> CellField:
    """Populate all ghost cells of ``f`` in place; interior untouched.

    The x sides are filled first over the full y extent, then the y sides
    over the full x extent, so corner blocks end up consistent (exact
    wraparound for doubly periodic grids). Idempotent.
    """
    _fill_side_x(f, bc.left, t, left=True)
    _fill_side_x(f, bc.right, t, left=False)
    _fill_side_y(f, bc.bottom, t, bottom=True)
    _fill_side_y(f, bc.top, t, bottom=False)
    return f


def project_indicator(grid: Grid2D, region: Callable, subsamples: int = 8) -> CellField:
    """Project a point-membership predicate onto cell averages.

    Each cell value is the fraction of its area inside the region,
    approximated with subsamples^2 midpoint samples; values lie in [0, 1].
    ``region(X, Y)`` must accept coordinate arrays and return booleans.
    """
    if subsamples < 1:
        raise ConfigError("subsamples must be >= 1")
    h, n = grid.h, subsamples
    # midpoint offsets within a cell
    off = (np.arange(n) + 0.5) * (h / n)
    xs = grid.x_centers() - 0.5 * h
    ys = grid.y_centers() - 0.5 * h
    f = CellField(grid)
    acc = np.zeros((grid.nx, grid.ny))
    for a in off:
        X = (xs + a)[:, None]
        for b in off:
            Y = (ys + b)[None, :]
            acc += region(X + np.zeros_like(Y), Y + np.zeros_like(X))
    f.interior = acc / (n * n)
    return f


def _relu2(t: np.ndarray) -> np.ndarray:
    t = np.maximum(t, 0.0)
    return t * t


def halfplane_cell_fraction(xc, yc, h: float, normal, offset: float):
    """Exact area fraction of {n . x <= d} in cells centered at (xc, yc).

    Used where mixed-cell averages must be exact to round-off (e.g. an
    oblique material interface whose mixed cells carry load-bearing
    values like 1/4 and 3/4).
    """
    n1, n2 = float(normal[0]), float(normal[1])
    if n1 == 0.0 and n2 == 0.0:
        raise ConfigError("half-plane normal must be nonzero")
    xl = np.asarray(xc, dtype=float) - 0.5 * h
    yl = np.asarray(yc, dtype=float) - 0.5 * h
    xl, yl = np.broadcast_arrays(xl, yl)
    # rescale to the unit square: area of {a u + b v <= c} over [0,1]^2
    a = np.full(xl.shape, n1 * h)
    b = np.full(xl.shape, n2 * h)
    c = offset - n1 * xl - n2 * yl
    # reflect so both coefficients are nonnegative
    neg = a < 0
    c = np.where(neg, c - a, c)
    a = np.abs(a)
    neg = b < 0
    c = np.where(neg, c - b, c)
    b = np.abs(b)

    scale = abs(n1 * h) + abs(n2 * h)
    a_ok = a > 1e-14 * scale
    b_ok = b > 1e-14 * scale
    # generic case: inclusion-exclusion of clipped corner triangles
    ab = np.where(a_ok & b_ok, a * b, 1.0)
    generic = (_relu2(c) - _relu2(c - a) - _relu2(c - b) + _relu2(c - a - b)) / (2 * ab)
    frac = np.where(a_ok & b_ok, generic, 0.0)
    # degenerate: one coefficient (or both) vanishes
    frac = np.where(a_ok & ~b_ok, np.clip(c / np.where(a_ok, a, 1.0), 0.0, 1.0), frac)
    frac = np.where(~a_ok & b_ok, np.clip(c / np.where(b_ok, b, 1.0), 0.0, 1.0), frac)
    frac = np.where(~a_ok & ~b_ok, (c >= 0).astype(float), frac)
    return np.clip(frac, 0.0, 1.0)


def halfplane_fraction(grid: Grid2D, normal, offset: float) -> CellField:
    """halfplane_cell_fraction over all interior cells, as a CellField."""
    X, Y = grid.cell_centers()
    f = CellField(grid)
    f.interior = halfplane_cell_fraction(X, Y, grid.h, normal, offset)
    return f
