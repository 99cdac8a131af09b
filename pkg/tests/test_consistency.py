import math

import numpy as np
import pytest
from scipy.stats import kstest, spearmanr

from isacsim.consistency import (
    ConsistencyContext,
    CorrelatedField,
    CorrelationPolicy,
    DEFAULT_POLICY,
    LinkClass,
    applies,
    sample_field,
    scope_key,
)

D = 50.0


def spread_positions(rng, n, spacing):
    p = rng.uniform(0.0, spacing * n, size=(n, 3))
    p[:, 2] = 0.0
    return p


def test_identical_positions_identical_values():
    f = CorrelatedField("delays", "s", 77, D, dims=2)
    pos = np.array([123.4, -56.7, 0.0])
    assert sample_field(f, pos) == sample_field(f, pos)
    batch = np.tile(pos, (5, 1))
    assert np.all(sample_field(f, batch) == sample_field(f, pos))


def test_field_pure_function_of_seed():
    a = CorrelatedField("delays", "s", 77, D, dims=2)
    b = CorrelatedField("delays", "s", 77, D, dims=2)
    c = CorrelatedField("delays", "s", 78, D, dims=2)
    pos = np.array([[10.0, 20.0, 0.0], [30.0, 40.0, 0.0]])
    assert np.array_equal(a.sample(pos), b.sample(pos))
    assert not np.array_equal(a.sample(pos), c.sample(pos))


def test_autocorrelation_at_d_corr():
    f = CorrelatedField("los_state", "s", 12345, D, dims=2)
    rng = np.random.default_rng(0)
    base = spread_positions(rng, 10_000, 2 * D)
    v0 = f.sample(base)
    v1 = f.sample(base + np.array([D, 0.0, 0.0]))
    corr = np.corrcoef(v0, v1)[0, 1]
    assert corr == pytest.approx(math.exp(-1.0), abs=0.05)


def test_autocorrelation_far_positions():
    f = CorrelatedField("los_state", "s", 12345, D, dims=2)
    rng = np.random.default_rng(1)
    base = spread_positions(rng, 10_000, 2 * D)
    v0 = f.sample(base)
    v1 = f.sample(base + np.array([10 * D, 0.0, 0.0]))
    assert abs(np.corrcoef(v0, v1)[0, 1]) < 0.05


def test_marginal_standard_normal():
    f = CorrelatedField("delays", "s", 9, D, dims=2)
    rng = np.random.default_rng(2)
    pos = spread_positions(rng, 100_000, 10 * D)
    vals = f.sample(pos)
    res = kstest(vals, "norm")
    assert res.pvalue > 0.01


def test_3d_vertical_correlation_distance_matches_horizontal():
    f = CorrelatedField("delays", "s", 4, D, dims=3)
    rng = np.random.default_rng(3)
    pos = rng.uniform(0, 100 * D, size=(10_000, 3))
    horiz = np.corrcoef(f.sample(pos), f.sample(pos + np.array([D, 0, 0])))[0, 1]
    vert = np.corrcoef(f.sample(pos), f.sample(pos + np.array([0, 0, D])))[0, 1]
    assert horiz == pytest.approx(math.exp(-1.0), abs=0.05)
    assert vert == pytest.approx(math.exp(-1.0), abs=0.05)


def test_all_correlated_parameter_is_global():
    ctx = ConsistencyContext(5)
    f = ctx.field("o2i_penetration", "outdoor_los|floor0|site1")
    assert math.isinf(f.d_corr)
    a = f.sample(np.array([0.0, 0.0, 0.0]))
    b = f.sample(np.array([9e5, -3e5, 0.0]))
    assert a == b


def test_policy_table_rows():
    pol = CorrelationPolicy()
    for p in ("delays", "cluster_powers", "angle_offset", "angle_sign",
              "random_coupling", "xpr", "initial_phase", "los_state"):
        assert pol.correlation_type(p) == "link_correlated"
    for p in ("blockage_a", "o2i_penetration", "indoor_distance", "indoor_state"):
        assert pol.correlation_type(p) == "all_correlated"


def seg(site=0, link_type="outdoor_los", floor=0, trp_trp=False, mode="monostatic"):
    return LinkClass("target_segment", mode, link_type, floor, site, trp_trp, f"trp{site}")


def test_applies_monostatic_backgrounds_independent():
    a = LinkClass("background", "monostatic", node_id="trp0", rp_index=0)
    b = LinkClass("background", "monostatic", node_id="trp1", rp_index=0)
    assert not applies(DEFAULT_POLICY, a, b)
    # Even two reference points of the same node are independent.
    c = LinkClass("background", "monostatic", node_id="trp0", rp_index=1)
    assert not applies(DEFAULT_POLICY, a, c)
    assert applies(DEFAULT_POLICY, a, a)


def test_applies_same_target_spst_links():
    # Links to two scattering points of one target share the field (each
    # samples at its own position, like independent targets).
    assert applies(DEFAULT_POLICY, seg(), seg())


def test_applies_different_link_types():
    assert not applies(DEFAULT_POLICY, seg(link_type="outdoor_los"), seg(link_type="o2i"))
    assert not applies(DEFAULT_POLICY, seg(link_type="outdoor_los"), seg(link_type="outdoor_nlos"))


def test_applies_different_floors_and_sites():
    assert not applies(DEFAULT_POLICY, seg(floor=0), seg(floor=3))
    assert not applies(DEFAULT_POLICY, seg(site=0), seg(site=1))


def test_applies_trp_trp_isolated():
    tt = seg(trp_trp=True)
    assert not applies(DEFAULT_POLICY, tt, seg(trp_trp=False))
    assert applies(DEFAULT_POLICY, tt, seg(trp_trp=True))


def test_excluded_pairs_draw_independently():
    ctx = ConsistencyContext(31)
    a = LinkClass("background", "monostatic", node_id="trp0", rp_index=0)
    b = LinkClass("background", "monostatic", node_id="trp1", rp_index=0)
    fa = ctx.field_for_link("delays", a)
    fb = ctx.field_for_link("delays", b)
    rng = np.random.default_rng(4)
    pos = spread_positions(rng, 10_000, 2 * D)
    assert abs(np.corrcoef(fa.sample(pos), fb.sample(pos))[0, 1]) < 0.05
    fc = ctx.field_for_link("delays", seg(link_type="outdoor_los"))
    fd = ctx.field_for_link("delays", seg(link_type="o2i"))
    assert abs(np.corrcoef(fc.sample(pos), fd.sample(pos))[0, 1]) < 0.05


def test_in_scope_links_share_the_field():
    ctx = ConsistencyContext(32)
    fa = ctx.field_for_link("delays", seg())
    fb = ctx.field_for_link("delays", seg())
    pos = np.array([[10.0, 0.0, 0.0]])
    assert fa.sample(pos) == fb.sample(pos)


def test_los_draws_rank_correlated_for_nearby_targets():
    # Two targets d_corr/4 apart consume the same LoS field: their uniform
    # variates across drops must be positively rank-correlated.
    pos_a = np.array([100.0, 50.0, 0.0])
    pos_b = pos_a + np.array([D / 4.0, 0.0, 0.0])
    ua, ub = [], []
    for drop_seed in range(400):
        ctx = ConsistencyContext(drop_seed, three_d=False)
        ua.append(ctx.uniform("los_state", "los|trp0", pos_a))
        ub.append(ctx.uniform("los_state", "los|trp0", pos_b))
    rho = spearmanr(ua, ub).statistic
    assert rho > 0.5


def test_uniform_variates_in_unit_interval():
    ctx = ConsistencyContext(33)
    rng = np.random.default_rng(5)
    u = ctx.uniform("los_state", "los|trp0", spread_positions(rng, 1000, D))
    assert np.all((u > 0) & (u < 1))


def test_scope_key_stability():
    assert scope_key(seg()) == scope_key(seg())
    assert scope_key(seg(site=1)) != scope_key(seg(site=2))
