import math

import numpy as np
import pytest

from isacsim.errors import DistanceOutOfRange, UnsupportedScenario
from isacsim.geometry import SPEED_OF_LIGHT
from isacsim.large_scale import (
    FREE_SPACE,
    UMA_LOS,
    UMA_NLOS,
    LosState,
    aperture_constant_db,
    coupling_loss,
    los_probability,
    los_state_joint,
    pathloss_concatenated,
    pathloss_segment,
    sample_shadow_fading,
)


def fspl_oracle(d, f):
    return 20.0 * math.log10(4.0 * math.pi * d * f / SPEED_OF_LIGHT)


def test_los_probability_boundaries():
    assert los_probability(0.0) == 1.0
    assert los_probability(18.0) == 1.0
    assert los_probability(1e6) < 1e-3


def test_los_probability_formula_oracle():
    d = 50.0
    want = 18.0 / d + math.exp(-d / 63.0) * (1.0 - 18.0 / d)
    assert los_probability(d) == pytest.approx(want, abs=1e-15)


def test_los_probability_monotone():
    grid = np.linspace(0.0, 5000.0, 400)
    vals = [los_probability(float(d)) for d in grid]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    assert all(0.0 <= v <= 1.0 for v in vals)


def test_los_probability_models():
    assert los_probability(12345.0, "always") == 1.0
    assert los_probability(1.0, "never") == 0.0
    with pytest.raises(UnsupportedScenario):
        los_probability(10.0, "rma-custom")


def test_los_state_joint_deterministic_cases():
    assert los_state_joint(1.0, 1.0, 0.5, 0.5, False) == LosState(True, True)
    assert los_state_joint(1.0, 0.0, 0.5, 0.5, False) == LosState(True, False)
    mono = los_state_joint(1.0, 0.0, 0.5, None, True)
    assert mono.tx_target and mono.target_rx


def test_los_state_joint_product_property():
    rng = np.random.default_rng(4)
    p1, p2 = 0.7, 0.5
    hits = 0
    n = 100_000
    u = rng.random((n, 2))
    for u1, u2 in u:
        st = los_state_joint(p1, p2, u1, u2, False)
        hits += st.tx_target and st.target_rx
    assert hits / n == pytest.approx(p1 * p2, abs=0.01)


def test_los_state_categories():
    assert LosState(True, True).category == 1
    assert LosState(True, False).category == 2
    assert LosState(False, True).category == 3
    assert LosState(False, False).category == 4


def test_free_space_definition_point():
    f = SPEED_OF_LIGHT / (4.0 * math.pi)
    assert pathloss_segment(1.0, f, FREE_SPACE) == pytest.approx(0.0, abs=1e-9)


def test_free_space_reference_value():
    want = fspl_oracle(100.0, 6e9)
    assert pathloss_segment(100.0, 6e9, FREE_SPACE) == pytest.approx(want, abs=1e-12)
    assert want == pytest.approx(88.011, abs=2e-3)


def test_free_space_doubling_slope():
    a = pathloss_segment(200.0, 6e9, FREE_SPACE)
    b = pathloss_segment(100.0, 6e9, FREE_SPACE)
    assert a - b == pytest.approx(20.0 * math.log10(2.0), abs=1e-12)


def test_distance_out_of_range():
    with pytest.raises(DistanceOutOfRange):
        pathloss_segment(0.5, 6e9, FREE_SPACE)


def test_coefficient_curve_form():
    # PL = a lg d + b + c lg f_GHz
    d, fghz = 250.0, 6.0
    want = 22.0 * math.log10(d) + 28.0 + 20.0 * math.log10(fghz)
    assert pathloss_segment(d, 6e9, UMA_LOS) == pytest.approx(want, abs=1e-12)


def test_concatenated_aperture_cancellation():
    f = 6e9
    lam = SPEED_OF_LIGHT / f
    sigma = lam**2 / (4.0 * math.pi)
    got = pathloss_concatenated(100.0, 200.0, f, sigma, FREE_SPACE)
    want = pathloss_segment(100.0, f, FREE_SPACE) + pathloss_segment(200.0, f, FREE_SPACE)
    assert got == pytest.approx(want, abs=1e-9)


def test_concatenated_reference_value():
    # d1 = d2 = 100 m, 6 GHz, sigma = 1 m^2.
    f = 6e9
    lam = SPEED_OF_LIGHT / f
    want = 2.0 * fspl_oracle(100.0, f) + 10.0 * math.log10(lam**2 / (4.0 * math.pi))
    got = pathloss_concatenated(100.0, 100.0, f, 1.0, FREE_SPACE)
    assert got == pytest.approx(want, abs=1e-12)
    assert got == pytest.approx(139.0, abs=0.1)


def test_concatenated_symmetry():
    for curve in (FREE_SPACE, UMA_LOS, UMA_NLOS):
        a = pathloss_concatenated(120.0, 310.0, 6e9, 2.5, curve)
        b = pathloss_concatenated(310.0, 120.0, 6e9, 2.5, curve)
        assert a == pytest.approx(b, abs=1e-12)


def test_concatenated_d2_invariance_every_curve():
    # PL(d1, d2) - PL(d2) must not depend on d2 (slope exactly zero).
    f = 6e9
    d1 = 42.0
    for curve in (FREE_SPACE, UMA_LOS, UMA_NLOS):
        diffs = [
            pathloss_concatenated(d1, d2, f, 3.0, curve) - pathloss_segment(d2, f, curve)
            for d2 in np.linspace(10.0, 1000.0, 200)
        ]
        assert max(diffs) - min(diffs) < 1e-9


def test_coupling_loss_component_a():
    f = 6e9
    pl = pathloss_segment(100.0, f, FREE_SPACE)
    base = coupling_loss(pl, pl, f, 0.0)
    with_rcs = coupling_loss(pl, pl, f, -12.81)
    assert with_rcs - base == pytest.approx(12.81, abs=1e-12)
    want = 2.0 * pl + aperture_constant_db(f) + 12.81
    assert with_rcs == pytest.approx(want, abs=1e-12)


def test_coupling_loss_monotone_in_distance():
    f = 6e9
    losses = [
        coupling_loss(pathloss_segment(d, f, FREE_SPACE), pathloss_segment(100.0, f, FREE_SPACE), f, -12.81)
        for d in (50.0, 100.0, 200.0, 400.0)
    ]
    assert losses == sorted(losses)
    assert len(set(losses)) == len(losses)


def test_shadow_fading_moments():
    rng = np.random.default_rng(8)
    draws = np.array([sample_shadow_fading(rng, 4.0) for _ in range(20_000)])
    assert draws.mean() == pytest.approx(0.0, abs=0.1)
    assert draws.std() == pytest.approx(4.0, abs=0.1)
    assert sample_shadow_fading(rng, 0.0) == 0.0
