"""Explicit time stepping (Euler, RK2) with CFL step control.

The integrator owns the loop: ghost refill before every rate evaluation,
step clipping onto snapshot times and the final time, and a finiteness
check after every accepted step. Rate operators are plain callables
``rate(z, t) -> interior array``, so any scheme plugs in.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import CellField, BoundarySpec, ConfigError, fill_ghosts
from .flowfields import FaceVelocity

SCHEMES = ("euler", "rk2")
RK2_VARIANTS = ("heun", "midpoint")


class InstabilityError(RuntimeError):
    """State left the finite range; carries the last finite state."""

    def __init__(self, t: float, step: int, state: CellField):
        super().__init__(f"non-finite state after step {step} (t = {t:.6g})")
        self.t = t
        self.step = step
        self.state = state


@dataclass(frozen=True)
class TimeControl:
    t_end: float
    cfl: float = 0.3
    scheme: str = "rk2"
    rk2_variant: str = "heun"

    def __post_init__(self):
        if not 0 < self.cfl <= 1:
            raise ConfigError(f"cfl must lie in (0, 1], got {self.cfl}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.rk2_variant not in RK2_VARIANTS:
            raise ConfigError(f"rk2 variant must be one of {RK2_VARIANTS}")
        if not self.t_end > 0:
            raise ConfigError(f"t_end must be positive, got {self.t_end}")


def dt_from_cfl(v: FaceVelocity, grid, nu: float) -> float:
    """dt = nu * h / max face-mean speed (per-component Courant number)."""
    s = v.max_speed
    if s == 0:
        raise ValueError("all-zero velocity field, no CFL time step exists")
    return nu * grid.h / s


def advance(z: CellField, rate, tc: TimeControl, bc: BoundarySpec, dt: float,
            t0: float = 0.0, snapshot_times=(), on_snapshot=None, on_step=None):
    """March a copy of z from t0 to tc.t_end; returns (state, t, steps).

    Steps are clipped so the trajectory lands exactly on each snapshot
    time and on t_end; ``on_snapshot(state, t)`` fires at snapshot times,
    ``on_step(state, t, step)`` after every accepted step. Raises
    InstabilityError on the first non-finite state.
    """
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    z = z.copy()
    t = t0
    step = 0
    snaps = sorted(s for s in snapshot_times if t0 < s <= tc.t_end + 1e-12 * dt)
    eps = 1e-12 * dt

    while tc.t_end - t > eps:
        bound = snaps[0] if snaps else tc.t_end
        bound = min(bound, tc.t_end)
        clipped = bound - t <= dt * (1 + 1e-12)
        dts = bound - t if clipped else dt
        prev = z.values.copy()

        fill_ghosts(z, bc, t)
        k1 = rate(z, t)
        if tc.scheme == "euler":
            z.interior += dts * k1
        elif tc.rk2_variant == "heun":
            zs = z.copy()
            zs.interior += dts * k1
            fill_ghosts(zs, bc, t + dts)
            k2 = rate(zs, t + dts)
            z.interior += 0.5 * dts * (k1 + k2)
        else:  # midpoint
            zs = z.copy()
            zs.interior += 0.5 * dts * k1
            fill_ghosts(zs, bc, t + 0.5 * dts)
            k2 = rate(zs, t + 0.5 * dts)
            z.interior += dts * k2

        t = bound if clipped else t + dt
        step += 1
        if not np.isfinite(z.interior).all():
            raise InstabilityError(t, step, CellField(z.grid, prev))
        if on_step is not None:
            on_step(z, t, step)
        if snaps and t >= snaps[0] - eps:
            snaps.pop(0)
            if on_snapshot is not None:
                on_snapshot(z, t)

    return z, t, step
