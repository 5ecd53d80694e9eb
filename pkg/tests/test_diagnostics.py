"""Hand-checked values for the measurement helpers."""

import numpy as np
import pytest

from icap import Grid2D, CellField
from icap.diagnostics import (LOG_FLOOR, smearing, smearing_1d, ErrorNorms,
                              error_norms, fit_order, DiagnosticSeries)


def _field(values):
    values = np.asarray(values, dtype=float)
    g = Grid2D(values.shape[0], values.shape[1], 0.5)
    z = CellField(g)
    z.interior = values
    return z


def test_smearing_hand_value():
    # z(1-z) is 0 at 0 and 1 and 0.25 at one-half
    z = _field([[0.0, 1.0, 0.0], [0.5, 1.0, 1.0], [0.0, 0.0, 1.0]])
    assert smearing(z) == pytest.approx(0.25 * 0.25)
    assert smearing_1d(np.array([0.0, 0.5, 1.0]), 0.1) == pytest.approx(0.025)


def test_smearing_zero_iff_sharp():
    z = _field([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [0.0, 0.0, 1.0]])
    assert smearing(z) == 0.0


def test_error_norms_hand_values():
    z = _field([[1.0, 2.0, 0.0], [3.0, 4.0, 0.0], [0.0, 0.0, 0.0]])
    ref = _field([[1.0, 2.5, 0.0], [2.0, 4.0, 0.0], [0.0, 0.0, 0.0]])
    n = error_norms(z, ref)
    a = 0.25
    assert n.l1 == pytest.approx((0.5 + 1.0) * a)
    assert n.l2 == pytest.approx(np.sqrt((0.25 + 1.0) * a))
    assert n.linf == 1.0
    # signed errors -0.5 and +1.0 partially cancel
    assert n.econs == pytest.approx(0.5 * a)
    assert n.as_dict() == {"l1": n.l1, "l2": n.l2, "linf": n.linf,
                           "econs": n.econs}


def test_error_norms_grid_mismatch():
    z = _field(np.zeros((3, 3)))
    w = CellField(Grid2D(3, 3, 0.25))
    with pytest.raises(ValueError):
        error_norms(z, w)


def test_fit_order_recovers_exact_slopes():
    hs = [0.1, 0.05, 0.025, 0.0125]
    for p in (1.0, 2.0, 0.5):
        pairs = [(h, 3.7 * h ** p) for h in hs]
        assert fit_order(pairs) == pytest.approx(p, abs=1e-12)


def test_fit_order_rejects_degenerate_input():
    with pytest.raises(ValueError):
        fit_order([(0.1, 1.0)])
    with pytest.raises(ValueError):
        fit_order([(0.1, 1.0), (-0.05, 0.5)])
    with pytest.raises(ValueError):
        fit_order([(0.1, 1.0), (0.05, -0.5)])
    with pytest.raises(ValueError, match="exact"):
        fit_order([(0.1, 1.0), (0.05, 0.0)])


def test_series_tracks_running_max():
    s = DiagnosticSeries()
    s.sample_1d(np.array([0.5, 0.5]), 1.0, 0.0)   # smearing 0.5
    s.sample_1d(np.array([0.0, 1.0]), 1.0, 1.0)   # smearing 0
    s.sample_1d(np.array([0.5, 0.0]), 1.0, 2.0)   # smearing 0.25
    assert s.smearing == pytest.approx([0.5, 0.0, 0.25])
    assert s.max_smearing == pytest.approx([0.5, 0.5, 0.5])
    assert s.min_z == [0.5, 0.0, 0.0]
    assert s.max_z == [0.5, 1.0, 0.5]
    assert s.mass == pytest.approx([1.0, 1.0, 0.5])


def test_series_sample_2d_matches_1d_bookkeeping():
    z = _field([[0.25, 0.5, 0.0], [1.0, 0.0, 0.5], [0.0, 1.0, 0.25]])
    s = DiagnosticSeries()
    s.sample(z, 0.75)
    assert s.times == [0.75]
    assert s.smearing[0] == pytest.approx(smearing(z))
    assert s.min_z[0] == 0.0 and s.max_z[0] == 1.0
    assert s.mass[0] == pytest.approx(z.total_mass())


def test_series_csv_format():
    s = DiagnosticSeries()
    s.sample_1d(np.array([0.0, 1.0]), 0.5, 0.0)
    s.sample_1d(np.array([0.5, 1.0]), 0.5, 0.25)
    text = s.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "time,smearing,max_smearing,min_z,max_z,mass"
    assert len(lines) == 3
    for line in lines[1:]:
        cells = line.split(",")
        assert len(cells) == 6
        for c in cells:
            float(c)
            # fixed 12-digit scientific notation, parse-stable
            assert "e" in c and len(c.split("e")[0].split(".")[1]) == 12
    row = [float(c) for c in lines[2].split(",")]
    assert row == pytest.approx([0.25, 0.125, 0.125, 0.5, 1.0, 0.75])


def test_log_floor_constant():
    assert LOG_FLOOR == 1e-10
