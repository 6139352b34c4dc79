import math

import numpy as np
import pytest

from ternhash import (
    ActivationConfig,
    ContinuationSchedule,
    hard_ternary,
    schedule_k,
    smooth_ternary,
    smooth_ternary_grad,
)

GRID = np.arange(-200, 201) / 100.0
KS = (3, 5, 7, 9, 11)


def test_config_validation():
    ActivationConfig(0.5, 3)
    with pytest.raises(ValueError):
        ActivationConfig(0.0, 3)
    with pytest.raises(ValueError):
        ActivationConfig(-1.0, 3)
    with pytest.raises(ValueError):
        ActivationConfig(math.inf, 3)
    with pytest.raises(ValueError):
        ActivationConfig(0.5, 4)
    with pytest.raises(ValueError):
        ActivationConfig(0.5, 1)


def test_smooth_ternary_values():
    cfg = ActivationConfig(0.5, 3)
    assert smooth_ternary(0.0, cfg) == 0.0
    # high-precision references: tanh(1) and -tanh(1/8)
    assert smooth_ternary(0.5, cfg) == pytest.approx(0.7615941559557649, rel=1e-12)
    assert smooth_ternary(-0.25, cfg) == pytest.approx(-0.12435300177159621, rel=1e-12)


def test_smooth_ternary_scalar_and_array():
    cfg = ActivationConfig()
    assert isinstance(smooth_ternary(0.3, cfg), float)
    out = smooth_ternary(GRID, cfg)
    assert isinstance(out, np.ndarray) and out.shape == GRID.shape


def test_smooth_ternary_oddness_exact():
    for k in KS:
        cfg = ActivationConfig(0.5, k)
        f_pos = smooth_ternary(GRID, cfg)
        f_neg = smooth_ternary(-GRID, cfg)
        assert np.array_equal(f_neg, -f_pos)


def test_smooth_ternary_range():
    # |f| stays below 1 until float saturation of tanh; never exceeds 1
    for k in KS:
        cfg = ActivationConfig(0.5, k)
        f = smooth_ternary(GRID, cfg)
        assert np.all(np.abs(f) <= 1.0)
        inner = np.abs(GRID) <= 0.6
        assert np.all(np.abs(f[inner]) < 1.0)


def test_non_finite_rejected():
    cfg = ActivationConfig()
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(ValueError):
            smooth_ternary(bad, cfg)
        with pytest.raises(ValueError):
            smooth_ternary_grad(bad, cfg)
        with pytest.raises(ValueError):
            hard_ternary(bad, 0.5)


def test_grad_values():
    cfg = ActivationConfig(0.5, 3)
    assert smooth_ternary_grad(0.0, cfg) == 0.0
    # analytic formula at x = alpha: 6 * (1 - tanh(1)^2), high-precision reference
    assert smooth_ternary_grad(0.5, cfg) == pytest.approx(2.5198460496841566, rel=1e-12)


def test_grad_matches_finite_difference_point():
    cfg = ActivationConfig(0.5, 5)
    h = 1e-5
    fd = (smooth_ternary(0.3 + h, cfg) - smooth_ternary(0.3 - h, cfg)) / (2 * h)
    a = smooth_ternary_grad(0.3, cfg)
    assert abs(a - fd) / abs(a) < 1e-6


def test_grad_nonnegative_and_finite():
    for k in KS:
        cfg = ActivationConfig(0.5, k)
        g = smooth_ternary_grad(GRID, cfg)
        assert np.all(np.isfinite(g))
        assert np.all(g >= 0.0)


def test_monotone_convergence_to_hard():
    g = hard_ternary(GRID, 0.5).astype(np.float64)
    keep = np.abs(np.abs(GRID) - 0.5) > 1e-12
    diffs = [np.abs(smooth_ternary(GRID, ActivationConfig(0.5, k)) - g) for k in KS]
    for prev, nxt in zip(diffs, diffs[1:]):
        assert np.all(nxt[keep] <= prev[keep])
        # strict decrease wherever the gap has not already collapsed to zero
        positive = keep & (prev > 0.0)
        assert np.all(nxt[positive] < prev[positive])
        assert np.all(nxt[keep & (prev == 0.0)] == 0.0)


def test_hard_ternary_boundaries():
    assert hard_ternary(0.5, 0.5) == 1
    assert hard_ternary(-0.5, 0.5) == -1
    assert hard_ternary(0.49, 0.5) == 0
    assert hard_ternary(0.0, 0.5) == 0
    out = hard_ternary(np.array([-0.8, -0.5, -0.1, 0.0, 0.5, 2.0]), 0.5)
    assert out.dtype == np.int8
    assert out.tolist() == [-1, -1, 0, 0, 1, 1]
    with pytest.raises(ValueError):
        hard_ternary(0.3, 0.0)
    with pytest.raises(ValueError):
        hard_ternary(0.3, math.nan)


def test_schedule_defaults():
    sched = ContinuationSchedule()
    assert schedule_k(0, sched) == 3
    assert schedule_k(30, sched) == 5
    assert schedule_k(149, sched) == 11
    ks = [schedule_k(e, sched) for e in range(150)]
    assert all(a <= b for a, b in zip(ks, ks[1:]))
    assert sorted(set(ks)) == [3, 5, 7, 9, 11]


def test_schedule_clamps_at_k_end():
    sched = ContinuationSchedule(k_start=3, k_end=7, stride_epochs=10, total_epochs=100)
    assert schedule_k(99, sched) == 7
    # a run shorter than the full ladder is legal; clamping handles the rest
    short = ContinuationSchedule(k_start=3, k_end=11, stride_epochs=30, total_epochs=40)
    assert schedule_k(39, short) == 5


def test_schedule_validation():
    with pytest.raises(ValueError):
        ContinuationSchedule(k_start=4, k_end=11, stride_epochs=30, total_epochs=150)
    with pytest.raises(ValueError):
        ContinuationSchedule(k_start=11, k_end=3, stride_epochs=30, total_epochs=150)
    with pytest.raises(ValueError):
        ContinuationSchedule(stride_epochs=0)
    with pytest.raises(ValueError):
        ContinuationSchedule(total_epochs=0)
    sched = ContinuationSchedule()
    for epoch in (-1, 150, 1000):
        with pytest.raises(ValueError):
            schedule_k(epoch, sched)
