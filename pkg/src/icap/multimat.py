"""Multifluid remap step: advect partial masses, momentum and energy with
a single mass flux built from pressure-compatible edge densities.

The state is N partial masses (bulk densities) plus momentum and total
energy density. Mass fractions are transported in Larrouturou form: one
mass flux per edge, times a reconstructed edge mass fraction per fluid,
so the fractions obey a discrete maximum principle and sum to one. Edge
densities come from donor-cell thermodynamics: each fluid's density is
re-evaluated at the donor cell's pressure and temperature, which keeps a
uniform-pressure contact free of pressure oscillations. Per-fluid
gradient limiting factors get a second, compatibility projection so the
reconstructed fractions still sum to one off cell centers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .grid import BoundarySpec, CellField, ConfigError, Grid2D, fill_ghosts
from .flowfields import FaceVelocity
from .mlp import MlpConfig, _limit, _predict


class InadmissibleStateError(ValueError):
    """Raised when a state has no valid primitive recovery."""

    def __init__(self, reason: str, cell=None):
        self.cell = cell
        at = f" at cell {cell}" if cell is not None else ""
        super().__init__(f"{reason}{at}")


@dataclass(frozen=True)
class PerfectGasEos:
    """Per-fluid perfect gas constants: p = (gamma-1) rho cv T."""

    gamma: tuple
    cv: tuple

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=float)
        c = np.asarray(self.cv, dtype=float)
        if g.ndim != 1 or g.shape != c.shape or g.size == 0:
            raise ConfigError("gamma and cv must be equal-length 1d sequences")
        if np.any(g <= 1.0):
            raise ConfigError("gamma must exceed 1")
        if np.any(c <= 0.0):
            raise ConfigError("cv must be positive")
        object.__setattr__(self, "gamma", tuple(g))
        object.__setattr__(self, "cv", tuple(c))

    @property
    def n_fluids(self) -> int:
        return len(self.gamma)

    def fluid_density(self, p, T, ell: int):
        """rho_ell(p, T) from the perfect gas law."""
        return p / ((self.gamma[ell] - 1.0) * self.cv[ell] * T)


@dataclass
class MultiMatState:
    """Conserved fields on a grid, ghosts included.

    ``m`` has shape (N, nxg, nyg): partial masses per volume (alpha_l
    rho_l). ``momentum`` is (2, nxg, nyg), ``energy`` (nxg, nyg) holds
    rho E.
    """

    grid: Grid2D
    m: np.ndarray
    momentum: np.ndarray
    energy: np.ndarray

    def __post_init__(self):
        shape = (self.grid.nxg, self.grid.nyg)
        if self.m.ndim != 3 or self.m.shape[1:] != shape:
            raise ConfigError(f"m must be (N, {shape[0]}, {shape[1]})")
        if self.momentum.shape != (2,) + shape or self.energy.shape != shape:
            raise ConfigError("momentum/energy shape mismatch")

    @property
    def n_fluids(self) -> int:
        return self.m.shape[0]

    def copy(self) -> "MultiMatState":
        return MultiMatState(self.grid, self.m.copy(), self.momentum.copy(),
                             self.energy.copy())

    def species_mass(self) -> np.ndarray:
        """Total mass of each fluid over the interior."""
        ii = self.grid.interior
        return self.m[(slice(None),) + ii].sum(axis=(1, 2)) * self.grid.cell_area

    def mass_fractions(self) -> np.ndarray:
        rho = self.m.sum(axis=0)
        return self.m / rho


def state_from_primitives(grid: Grid2D, eos: PerfectGasEos, alpha, p, T,
                          u=(0.0, 0.0)) -> MultiMatState:
    """Assemble a state from volume fractions and uniform-shape p, T, u.

    ``alpha`` has shape (N, nxg, nyg); p, T, u broadcast against the grid.
    """
    alpha = np.asarray(alpha, dtype=float)
    shape = (grid.nxg, grid.nyg)
    p = np.broadcast_to(np.asarray(p, dtype=float), shape)
    T = np.broadcast_to(np.asarray(T, dtype=float), shape)
    ux = np.broadcast_to(np.asarray(u[0], dtype=float), shape)
    uy = np.broadcast_to(np.asarray(u[1], dtype=float), shape)
    m = np.stack([alpha[l] * eos.fluid_density(p, T, l)
                  for l in range(eos.n_fluids)])
    rho = m.sum(axis=0)
    mom = np.stack([rho * ux, rho * uy])
    cv = np.asarray(eos.cv)
    ene = np.einsum("l,lij->ij", cv, m) * T + 0.5 * rho * (ux**2 + uy**2)
    return MultiMatState(grid, m, mom, ene)


@dataclass
class Primitives:
    """Pointwise recovered fields, same padded shape as the state."""

    rho: np.ndarray
    ux: np.ndarray
    uy: np.ndarray
    T: np.ndarray
    p: np.ndarray
    rho_fluids: np.ndarray  # (N, ...) per-fluid densities at (p, T)
    alpha: np.ndarray       # (N, ...) volume fractions


def recover_primitives(s: MultiMatState, eos: PerfectGasEos) -> Primitives:
    """Thermodynamic recovery; raises on nonpositive density or energy."""
    if s.n_fluids != eos.n_fluids:
        raise ConfigError("state/eos fluid count mismatch")
    rho = s.m.sum(axis=0)
    if np.any(rho <= 0.0) or not np.all(np.isfinite(rho)):
        raise InadmissibleStateError("nonpositive total mass",
                                     _first_bad(s.grid, rho <= 0.0))
    ux = s.momentum[0] / rho
    uy = s.momentum[1] / rho
    eint = s.energy - 0.5 * rho * (ux**2 + uy**2)
    if np.any(eint <= 0.0):
        raise InadmissibleStateError("nonpositive internal energy",
                                     _first_bad(s.grid, eint <= 0.0))
    cv = np.asarray(eos.cv)
    gm1 = np.asarray(eos.gamma) - 1.0
    T = eint / np.einsum("l,lij->ij", cv, s.m)
    p = np.einsum("l,lij->ij", gm1 * cv, s.m) * T
    rho_fluids = p / (gm1 * cv)[:, None, None] / T
    alpha = s.m / rho_fluids
    return Primitives(rho, ux, uy, T, p, rho_fluids, alpha)


def _first_bad(grid: Grid2D, mask) -> tuple | None:
    idx = np.argwhere(mask)
    if idx.size == 0:
        return None
    i, j = idx[0]
    return (int(i) - grid.ghost, int(j) - grid.ghost)


def alpha_to_z(alpha: np.ndarray, rho_fluids: np.ndarray) -> np.ndarray:
    """Volume fractions to mass fractions, z_l = a_l r_l / sum(a r)."""
    w = alpha * rho_fluids
    den = w.sum(axis=0)
    if np.any(den == 0.0):
        raise ConfigError("zero mixture density in alpha_to_z")
    return w / den


def z_to_alpha(z: np.ndarray, rho_fluids: np.ndarray) -> np.ndarray:
    """Mass fractions to volume fractions, a_l = z_l t_l / sum(z t)."""
    w = z / rho_fluids
    den = w.sum(axis=0)
    if np.any(den == 0.0):
        raise ConfigError("zero mixture volume in z_to_alpha")
    return w / den


def fill_state_ghosts(s: MultiMatState, bc: BoundarySpec, t: float = 0.0):
    """Refresh ghost cells of every conserved slab in place."""
    for arr in (*s.m, *s.momentum, s.energy):
        fill_ghosts(CellField(s.grid, arr), bc, t)
    return s


# ---------------------------------------------------------------------------
# compatibility projection of per-fluid limiting factors

def compat_project(phi_hat: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """Shrink per-fluid limiting factors so the limited gradients cancel.

    Solves, per instance: minimize 1/2 sum (phi - phi_hat)^2 subject to
    0 <= phi <= phi_hat and sum_l phi_l grads_l = 0. Accepts a single
    instance (phi_hat (N,), grads (N, 2)) or fields (phi_hat (N, m, n),
    grads (N, 2, m, n)). The constraint is always feasible: any common
    factor works because the predicted gradients sum to zero.
    """
    phi_hat = np.asarray(phi_hat, dtype=float)
    grads = np.asarray(grads, dtype=float)
    n = phi_hat.shape[0]
    if n == 1:
        return phi_hat.copy()
    if n == 2:
        g = grads[0]
        active = (g[0] != 0.0) | (g[1] != 0.0)
        lo = np.minimum(phi_hat[0], phi_hat[1])
        return np.stack([np.where(active, lo, phi_hat[0]),
                         np.where(active, lo, phi_hat[1])])
    if phi_hat.ndim == 1:
        return _project_small(phi_hat, grads)
    out = np.empty_like(phi_hat)
    for idx in np.ndindex(phi_hat.shape[1:]):
        sl = (slice(None),) + idx
        out[sl] = _project_small(phi_hat[sl], grads[(slice(None), slice(None)) + idx])
    return out


def _project_small(phi_hat: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Exact solve of one small projection by active-set enumeration.

    Every KKT-consistent split of the variables into {at 0, free, at
    phi_hat} yields an equality-constrained least squares problem; the
    convex minimum is the best feasible candidate over all splits. N is
    the number of fluids, so the 3^N enumeration is cheap.
    """
    n = phi_hat.size
    scale = max(float(np.abs(G).max()) * max(float(phi_hat.max()), 1.0), 1e-300)
    tol = 1e-12 * max(float(phi_hat.max()), 1.0)
    best, best_obj = np.zeros(n), np.inf  # all-at-zero pattern, always feasible

    def consider(phi):
        nonlocal best, best_obj
        if np.abs((phi[:, None] * G).sum(axis=0)).max() > 1e-11 * scale:
            return
        if np.any(phi < -tol) or np.any(phi > phi_hat + tol):
            return
        obj = 0.5 * float(((phi - phi_hat) ** 2).sum())
        if obj < best_obj:
            best, best_obj = np.clip(phi, 0.0, phi_hat), obj

    # common factor: feasible whenever the predicted gradients sum to zero
    consider(np.full(n, float(phi_hat.min())))
    for pattern in product((0, 1, 2), repeat=n):
        pat = np.asarray(pattern)
        phi = np.where(pat == 2, phi_hat, 0.0)
        free = pat == 1
        if np.any(free):
            b = -(phi[:, None] * G).sum(axis=0)
            A = G[free].T  # (2, F)
            # lstsq, not solve: A can be rank deficient (collinear gradients)
            lam, *_ = np.linalg.lstsq(A @ A.T, A @ phi_hat[free] - b, rcond=None)
            phi[free] = phi_hat[free] - A.T @ lam
        consider(phi)
    return best


# ---------------------------------------------------------------------------
# remap fluxes

_EDGE_KEYS = ("xl_lo", "xl_hi", "xr_lo", "xr_hi",
              "yb_lo", "yb_hi", "yt_lo", "yt_hi")


def _face_values(q, Gx, Gy, h):
    """Linear reconstruction of q at the 8 half-face midpoints, slab-wide."""
    qx, qy = 0.5 * h * Gx, 0.25 * h * Gy
    rx, ry = 0.25 * h * Gx, 0.5 * h * Gy
    return {
        "xl_lo": q + qx - qy, "xl_hi": q + qx + qy,
        "xr_lo": q - qx - qy, "xr_hi": q - qx + qy,
        "yb_lo": q + ry - rx, "yb_hi": q + ry + rx,
        "yt_lo": q - ry - rx, "yt_hi": q - ry + rx,
    }


def _limited(V, h, beta):
    gx, gy = _predict(V, h)
    phi = _limit(V, gx, gy, h, beta)
    return gx, gy, phi


@dataclass
class _EdgeState:
    """Upwinded per-half-face values; x arrays (nx+1, ny, 2), y (nx, ny+1, 2)."""

    phi_x: np.ndarray
    phi_y: np.ndarray
    z_x: np.ndarray  # (N, nx+1, ny, 2)
    z_y: np.ndarray
    ux_x: np.ndarray
    ux_y: np.ndarray
    uy_x: np.ndarray
    uy_y: np.ndarray
    E_x: np.ndarray
    E_y: np.ndarray


def _edge_state(s: MultiMatState, v: FaceVelocity, eos: PerfectGasEos,
                cfg: MlpConfig, energy: str, first_order: bool,
                thermo: str) -> _EdgeState:
    grid = s.grid
    g, nx, ny, h = grid.ghost, grid.nx, grid.ny, grid.h
    if energy not in ("compatible", "independent"):
        raise ConfigError(f"unknown energy reconstruction {energy!r}")
    if thermo not in ("donor", "muscl"):
        raise ConfigError(f"unknown thermo extrapolation {thermo!r}")
    prim = recover_primitives(s, eos)
    nfl = s.n_fluids
    sl = (slice(1, -1), slice(1, -1))
    zfull = s.m / prim.rho

    # limited gradients for each transported scalar, on the slab
    if first_order:
        zero = np.zeros((grid.nxg - 2, grid.nyg - 2))
        zrec = [(zfull[l][sl], zero, zero) for l in range(nfl)]
        urec = [(prim.ux[sl], zero, zero), (prim.uy[sl], zero, zero)]
    else:
        zhat = []
        for l in range(nfl):
            gx, gy, phi = _limited(zfull[l], h, cfg.beta)
            zhat.append((gx, gy, phi))
        phi = compat_project(np.stack([r[2] for r in zhat]),
                             np.stack([np.stack((r[0], r[1])) for r in zhat]))
        zrec = [(zfull[l][sl], phi[l] * zhat[l][0], phi[l] * zhat[l][1])
                for l in range(nfl)]
        urec = []
        for comp in (prim.ux, prim.uy):
            gx, gy, ph = _limited(comp, h, 1.0)
            urec.append((comp[sl], ph * gx, ph * gy))

    zvals = [_face_values(c, gx, gy, h) for c, gx, gy in zrec]
    uxv = _face_values(*urec[0], h)
    uyv = _face_values(*urec[1], h)

    # donor-side thermodynamics: tau_l and temperature per half-face, either
    # frozen at the donor cell value or extrapolated with beta=1 limiting
    cv = eos.cv
    gm1cv = [(eos.gamma[l] - 1.0) * cv[l] for l in range(nfl)]
    if thermo == "donor" or first_order:
        T_side = {k: prim.T[sl] for k in _EDGE_KEYS}
        p_side = {k: prim.p[sl] for k in _EDGE_KEYS}
    else:
        gx, gy, ph = _limited(prim.T, h, 1.0)
        T_side = _face_values(prim.T[sl], ph * gx, ph * gy, h)
        gx, gy, ph = _limited(prim.p, h, 1.0)
        p_side = _face_values(prim.p[sl], ph * gx, ph * gy, h)

    def side_density(key):
        den = sum(zvals[l][key] * gm1cv[l] for l in range(nfl))
        return p_side[key] / (den * T_side[key])

    rho_side = {k: side_density(k) for k in _EDGE_KEYS}
    if energy == "compatible":
        E_side = {k: sum(zvals[l][k] * cv[l] for l in range(nfl)) * T_side[k]
                  + 0.5 * (uxv[k] ** 2 + uyv[k] ** 2) for k in _EDGE_KEYS}
    else:
        Espec = s.energy / prim.rho
        if first_order:
            Erec = (Espec[sl], zero, zero)
        else:
            gx, gy, ph = _limited(Espec, h, 1.0)
            Erec = (Espec[sl], ph * gx, ph * gy)
        E_side = _face_values(*Erec, h)

    iL = slice(g - 2, g - 1 + nx)
    iR = slice(g - 1, g + nx)
    jf = slice(g - 1, g - 1 + ny)
    ic = slice(g - 1, g - 1 + nx)
    jB = slice(g - 2, g - 1 + ny)
    jT = slice(g - 1, g + ny)

    def upwind_x(field, half):
        lo = ("xl_lo", "xl_hi")[half]
        hi = ("xr_lo", "xr_hi")[half]
        return np.where(v.hx[..., half] >= 0, field[lo][iL, jf], field[hi][iR, jf])

    def upwind_y(field, half):
        lo = ("yb_lo", "yb_hi")[half]
        hi = ("yt_lo", "yt_hi")[half]
        return np.where(v.hy[..., half] >= 0, field[lo][ic, jB], field[hi][ic, jT])

    phi_x = np.stack([v.hx[..., k] * upwind_x(rho_side, k) for k in (0, 1)], axis=-1)
    phi_y = np.stack([v.hy[..., k] * upwind_y(rho_side, k) for k in (0, 1)], axis=-1)
    z_x = np.stack([np.stack([upwind_x(zvals[l], k) for k in (0, 1)], axis=-1)
                    for l in range(nfl)])
    z_y = np.stack([np.stack([upwind_y(zvals[l], k) for k in (0, 1)], axis=-1)
                    for l in range(nfl)])
    ux_x = np.stack([upwind_x(uxv, k) for k in (0, 1)], axis=-1)
    ux_y = np.stack([upwind_y(uxv, k) for k in (0, 1)], axis=-1)
    uy_x = np.stack([upwind_x(uyv, k) for k in (0, 1)], axis=-1)
    uy_y = np.stack([upwind_y(uyv, k) for k in (0, 1)], axis=-1)
    E_x = np.stack([upwind_x(E_side, k) for k in (0, 1)], axis=-1)
    E_y = np.stack([upwind_y(E_side, k) for k in (0, 1)], axis=-1)
    return _EdgeState(phi_x, phi_y, z_x, z_y, ux_x, ux_y, uy_x, uy_y, E_x, E_y)


def _div(Fx, Fy, h):
    return -((Fx[1:, :] - Fx[:-1, :]) + (Fy[:, 1:] - Fy[:, :-1])) / h


@dataclass
class RemapRate:
    """Interior semi-discrete rates for the conserved fields."""

    m: np.ndarray        # (N, nx, ny)
    momentum: np.ndarray  # (2, nx, ny)
    energy: np.ndarray   # (nx, ny)


def remap_rate(s: MultiMatState, v: FaceVelocity, eos: PerfectGasEos,
               cfg: MlpConfig = MlpConfig(), energy: str = "compatible",
               first_order: bool = False, thermo: str = "donor") -> RemapRate:
    """One remap evaluation: d/dt of (m_l, momentum, energy), interior only.

    All fields share the mass flux rho_A^upw (v . n) built from donor-side
    thermodynamics. ``energy="compatible"`` forms the edge total energy
    from the reconstructed mass fractions and the donor temperature, which
    keeps uniform p and T exactly uniform; ``"independent"`` reconstructs
    specific total energy as its own scalar. ``first_order`` drops all
    reconstruction (donor-cell edge values). ``thermo="muscl"`` extrapolates
    p and T to the faces as well instead of freezing them at cell values.
    """
    es = _edge_state(s, v, eos, cfg, energy, first_order, thermo)
    h = s.grid.h

    def face_sum(wx, wy):
        Fx = 0.5 * (es.phi_x[..., 0] * wx[..., 0] + es.phi_x[..., 1] * wx[..., 1])
        Fy = 0.5 * (es.phi_y[..., 0] * wy[..., 0] + es.phi_y[..., 1] * wy[..., 1])
        return _div(Fx, Fy, h)

    m_rate = np.stack([face_sum(es.z_x[l], es.z_y[l]) for l in range(s.n_fluids)])
    mom_rate = np.stack([face_sum(es.ux_x, es.ux_y), face_sum(es.uy_x, es.uy_y)])
    ene_rate = face_sum(es.E_x, es.E_y)
    return RemapRate(m_rate, mom_rate, ene_rate)


def remap_cfl_check(s: MultiMatState, v: FaceVelocity, dt: float,
                    eos: PerfectGasEos, cfg: MlpConfig = MlpConfig(),
                    energy: str = "compatible", thermo: str = "donor") -> bool:
    """True iff dt |A|/|K| |Phi_A|/rho_K <= 1 on every face of every cell."""
    es = _edge_state(s, v, eos, cfg, energy, first_order=False, thermo=thermo)
    rho = s.m.sum(axis=0)[s.grid.interior]
    h = s.grid.h
    phx = 0.5 * np.abs(es.phi_x[..., 0] + es.phi_x[..., 1])
    phy = 0.5 * np.abs(es.phi_y[..., 0] + es.phi_y[..., 1])
    worst_x = np.maximum(phx[:-1, :], phx[1:, :])
    worst_y = np.maximum(phy[:, :-1], phy[:, 1:])
    ratio = dt / h * np.maximum(worst_x, worst_y) / rho
    return bool(np.all(ratio <= 1.0))


def advance_remap(s: MultiMatState, v: FaceVelocity, eos: PerfectGasEos,
                  bc: BoundarySpec, dt: float, steps: int,
                  cfg: MlpConfig = MlpConfig(), energy: str = "compatible",
                  first_order: bool = False, thermo: str = "donor",
                  on_step=None) -> MultiMatState:
    """Euler remap steps; returns the advanced copy of the state."""
    out = s.copy()
    ii = out.grid.interior
    for k in range(steps):
        fill_state_ghosts(out, bc)
        r = remap_rate(out, v, eos, cfg, energy, first_order, thermo)
        for l in range(out.n_fluids):
            out.m[l][ii] += dt * r.m[l]
        out.momentum[0][ii] += dt * r.momentum[0]
        out.momentum[1][ii] += dt * r.momentum[1]
        out.energy[ii] += dt * r.energy
        if on_step is not None:
            on_step(out, (k + 1) * dt, k + 1)
    return out
