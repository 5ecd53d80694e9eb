"""Run measurements: smearing functional, error norms, convergence order.

The smearing functional integrates z(1-z); it is zero exactly when z is
a sharp indicator and grows with numerical diffusion, so its running max
tracks the worst smearing seen along a trajectory.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .grid import CellField

# plotting floor used for log-scale columns of z(1-z)
LOG_FLOOR = 1e-10


def smearing(z: CellField) -> float:
    v = z.interior
    return float((v * (1.0 - v)).sum()) * z.grid.cell_area


def smearing_1d(z: np.ndarray, h: float) -> float:
    z = np.asarray(z)
    return float((z * (1.0 - z)).sum()) * h


@dataclass(frozen=True)
class ErrorNorms:
    l1: float
    l2: float
    linf: float
    econs: float  # |cell-sum of the signed error|, the conservation error

    def as_dict(self):
        return {"l1": self.l1, "l2": self.l2, "linf": self.linf, "econs": self.econs}


def error_norms(z: CellField, ref: CellField) -> ErrorNorms:
    if z.grid != ref.grid:
        raise ValueError("error norms need both fields on the same grid")
    d = z.interior - ref.interior
    a = z.grid.cell_area
    return ErrorNorms(l1=float(np.abs(d).sum()) * a,
                      l2=float(np.sqrt((d * d).sum() * a)),
                      linf=float(np.abs(d).max()),
                      econs=abs(float(d.sum()) * a))


def fit_order(pairs) -> float:
    """Least-squares slope of log(error) vs log(h) over (h, error) pairs.

    A zero error anywhere means the scheme is exact on this data; there
    is no order to fit, so that is reported as an error to the caller.
    """
    pairs = list(pairs)
    if len(pairs) < 2:
        raise ValueError("order fit needs at least two (h, error) pairs")
    hs = np.array([p[0] for p in pairs], dtype=float)
    es = np.array([p[1] for p in pairs], dtype=float)
    if (hs <= 0).any():
        raise ValueError("grid sizes must be positive")
    if (es < 0).any():
        raise ValueError("errors must be nonnegative")
    if (es == 0).any():
        raise ValueError("exact")
    return float(np.polyfit(np.log(hs), np.log(es), 1)[0])


@dataclass
class DiagnosticSeries:
    """Time series of scalar run measurements with CSV export."""

    times: list = field(default_factory=list)
    smearing: list = field(default_factory=list)
    max_smearing: list = field(default_factory=list)
    min_z: list = field(default_factory=list)
    max_z: list = field(default_factory=list)
    mass: list = field(default_factory=list)

    def sample(self, z: CellField, t: float):
        v = z.interior
        s = smearing(z)
        prev = self.max_smearing[-1] if self.max_smearing else -np.inf
        self.times.append(t)
        self.smearing.append(s)
        self.max_smearing.append(max(prev, s))
        self.min_z.append(float(v.min()))
        self.max_z.append(float(v.max()))
        self.mass.append(z.total_mass())

    def sample_1d(self, z: np.ndarray, h: float, t: float):
        s = smearing_1d(z, h)
        prev = self.max_smearing[-1] if self.max_smearing else -np.inf
        self.times.append(t)
        self.smearing.append(s)
        self.max_smearing.append(max(prev, s))
        self.min_z.append(float(z.min()))
        self.max_z.append(float(z.max()))
        self.mass.append(float(z.sum()) * h)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("time,smearing,max_smearing,min_z,max_z,mass\n")
        for row in zip(self.times, self.smearing, self.max_smearing,
                       self.min_z, self.max_z, self.mass):
            out.write(",".join(f"{x:.12e}" for x in row) + "\n")
        return out.getvalue()
