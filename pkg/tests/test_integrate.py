"""Time loop behavior: step control, snapshot clipping, order, aborts."""

import numpy as np
import pytest

from icap import (Grid2D, CellField, BoundarySpec, ConfigError, uniform,
                  face_means)
from icap.integrate import (TimeControl, InstabilityError, dt_from_cfl,
                            advance)

BC = BoundarySpec.periodic()


def _state(n=4, value=0.0):
    g = Grid2D(n, n, 1.0 / n)
    z = CellField(g)
    z.values[:] = value
    return z


def test_time_control_validation():
    TimeControl(t_end=1.0, cfl=1.0)
    with pytest.raises(ConfigError):
        TimeControl(t_end=1.0, cfl=0.0)
    with pytest.raises(ConfigError):
        TimeControl(t_end=1.0, cfl=1.5)
    with pytest.raises(ConfigError):
        TimeControl(t_end=0.0)
    with pytest.raises(ConfigError):
        TimeControl(t_end=1.0, scheme="rk4")
    with pytest.raises(ConfigError):
        TimeControl(t_end=1.0, rk2_variant="ralston")


def test_dt_from_cfl():
    g = Grid2D(10, 10, 0.1)
    v = face_means(uniform(3.0, -4.0), g)
    assert dt_from_cfl(v, g, 0.2) == pytest.approx(0.2 * 0.1 / 4.0)
    with pytest.raises(ValueError):
        dt_from_cfl(face_means(uniform(0.0, 0.0), g), g, 0.2)


def test_advance_rejects_bad_dt():
    z = _state()
    with pytest.raises(ConfigError):
        advance(z, lambda s, t: 0.0 * s.interior,
                TimeControl(t_end=1.0, scheme="euler"), BC, dt=0.0)


def test_advance_returns_copy_and_lands_exactly():
    z = _state(value=2.0)
    before = z.values.copy()
    out, t, steps = advance(z, lambda s, t: np.ones_like(s.interior),
                            TimeControl(t_end=1.0, scheme="euler"), BC,
                            dt=0.3)
    assert np.array_equal(z.values, before)
    assert t == 1.0
    assert steps == 4  # 0.3, 0.3, 0.3, then a clipped 0.1
    assert np.allclose(out.interior, 3.0)


def test_snapshot_clipping_and_callbacks():
    z = _state()
    seen = []
    stepped = []
    out, t, steps = advance(
        z, lambda s, t: np.ones_like(s.interior),
        TimeControl(t_end=1.0, scheme="euler"), BC, dt=0.3,
        snapshot_times=(0.95, 0.5),
        on_snapshot=lambda s, tt: seen.append((tt, float(s.interior[0, 0]))),
        on_step=lambda s, tt, k: stepped.append((k, tt)))
    # trajectory must land on each snapshot exactly, in order
    assert [tt for tt, _ in seen] == [0.5, 0.95]
    # the state handed to the callback integrates 1 over [0, t]
    for tt, val in seen:
        assert val == pytest.approx(tt, abs=1e-14)
    assert t == 1.0
    assert [k for k, _ in stepped] == list(range(1, steps + 1))
    assert stepped[-1] == (steps, 1.0)


def test_snapshots_outside_window_are_ignored():
    z = _state()
    seen = []
    _, t, _ = advance(z, lambda s, t: np.zeros_like(s.interior),
                      TimeControl(t_end=1.0, scheme="euler"), BC, dt=0.25,
                      t0=0.5, snapshot_times=(0.3, 0.5, 1.0, 2.0),
                      on_snapshot=lambda s, tt: seen.append(tt))
    # only times in (t0, t_end] fire; t_end itself counts
    assert seen == [1.0]
    assert t == 1.0


def test_ghosts_are_current_at_every_rate_call():
    g = Grid2D(6, 6, 1.0 / 6)
    z = CellField(g)
    rng = np.random.default_rng(1)
    z.interior = rng.random((6, 6))

    def rate(s, t):
        # periodic wrap must hold even though the interior changed on the
        # previous step
        assert np.array_equal(s.values[0], s.values[g.nx])
        assert np.array_equal(s.values[:, 1], s.values[:, g.ny + 1])
        return np.ones_like(s.interior)

    for scheme, variant in (("euler", "heun"), ("rk2", "heun"),
                            ("rk2", "midpoint")):
        advance(z, rate, TimeControl(t_end=0.5, scheme=scheme,
                                     rk2_variant=variant), BC, dt=0.1)


@pytest.mark.parametrize("scheme,variant,order", [
    ("euler", "heun", 1),
    ("rk2", "heun", 2),
    ("rk2", "midpoint", 2),
])
def test_integration_order_on_time_dependent_rate(scheme, variant, order):
    # dz/dt = cos(t), z(0) = 0: Euler is the left endpoint rule, heun the
    # trapezoid rule, midpoint the midpoint rule
    errs = []
    for dt in (1 / 64, 1 / 128):
        z = _state()
        out, _, _ = advance(
            z, lambda s, t: np.full_like(s.interior, np.cos(t)),
            TimeControl(t_end=1.0, scheme=scheme, rk2_variant=variant),
            BC, dt=dt)
        errs.append(abs(out.interior[0, 0] - np.sin(1.0)))
    ratio = errs[0] / errs[1]
    assert 2 ** order * 0.9 < ratio < 2 ** order * 1.1


@pytest.mark.parametrize("scheme,variant,order", [
    ("euler", "heun", 1),
    ("rk2", "heun", 2),
    ("rk2", "midpoint", 2),
])
def test_integration_order_on_decay(scheme, variant, order):
    errs = []
    for dt in (1 / 64, 1 / 128):
        z = _state(value=1.0)
        out, _, _ = advance(z, lambda s, t: -s.interior,
                            TimeControl(t_end=1.0, scheme=scheme,
                                        rk2_variant=variant), BC, dt=dt)
        errs.append(abs(out.interior[0, 0] - np.exp(-1.0)))
    ratio = errs[0] / errs[1]
    assert 2 ** order * 0.9 < ratio < 2 ** order * 1.1


def test_instability_carries_last_finite_state():
    z = _state(value=1.0)
    calls = []

    def rate(s, t):
        if len(calls) == 2:
            return np.full_like(s.interior, np.nan)
        calls.append(t)
        return np.ones_like(s.interior)

    with pytest.raises(InstabilityError) as ei:
        advance(z, rate, TimeControl(t_end=10.0, scheme="euler"), BC, dt=0.5)
    err = ei.value
    assert err.step == 3
    assert err.t == pytest.approx(1.5)
    # the carried state is the one before the fatal step: two accepted
    # increments of dt * 1
    assert np.allclose(err.state.interior, 2.0)
    assert np.isfinite(err.state.values).all()
    assert "step 3" in str(err)
