import numpy as np
import pytest

from isacsim.errors import ConfigError, PlacementInfeasible
from isacsim.scenario import (
    ScenarioConfig,
    SensingLink,
    candidate_links,
    generate_drop,
    select_sensing_pairs,
    site_positions,
    _in_center_cell,
)

CFG = ScenarioConfig()  # UMa-AV reference assumptions


def drops_equal(a, b):
    if len(a.trps) != len(b.trps) or len(a.uts) != len(b.uts) or len(a.targets) != len(b.targets):
        return False
    for x, y in zip(a.uts, b.uts):
        if not np.array_equal(x.pose.position, y.pose.position):
            return False
    for x, y in zip(a.targets, b.targets):
        if not (
            np.array_equal(x.pose.position, y.pose.position)
            and x.pose.heading == y.pose.heading
            and np.array_equal(x.velocity, y.velocity)
        ):
            return False
    return True


def test_layout_geometry():
    pos = site_positions(CFG.layout)
    assert pos.shape == (7, 3)
    assert np.allclose(pos[0, :2], 0.0)
    d = np.linalg.norm(pos[1:, :2], axis=1)
    assert np.allclose(d, CFG.layout.isd_m)
    assert np.allclose(pos[:, 2], CFG.layout.trp_height_m)


def test_min_distance_enforced():
    for seed in range(100):
        drop = generate_drop(CFG, seed)
        t = drop.targets[0].pose.position
        for node in drop.trps + drop.uts:
            assert np.linalg.norm(node.pose.position - t) >= CFG.min_dist_tx_target_m


def test_target_fixed_height():
    drop = generate_drop(CFG, 7)
    assert drop.targets[0].pose.position[2] == 200.0
    assert all(u.pose.position[2] == 1.5 for u in drop.uts)


def test_drop_determinism():
    a = generate_drop(CFG, 123)
    b = generate_drop(CFG, 123)
    assert drops_equal(a, b)
    c = generate_drop(CFG, 124)
    assert not drops_equal(a, c)


def test_targets_inside_cell_footprint():
    for seed in range(200):
        drop = generate_drop(CFG, seed)
        xy = drop.targets[0].pose.position[:2][None, :]
        assert _in_center_cell(xy, CFG.layout)[0]


def test_target_velocity_follows_heading():
    cfg = ScenarioConfig(target_speed_mps=5.0)
    drop = generate_drop(cfg, 11)
    t = drop.targets[0]
    h = np.radians(t.pose.heading)
    assert np.allclose(t.velocity, 5.0 * np.array([np.cos(h), np.sin(h), 0.0]), atol=1e-12)
    assert np.linalg.norm(t.velocity) == pytest.approx(5.0, rel=1e-12)


def test_target_uniformity_over_drops():
    # Mean target coordinate converges to the cell center over 1e5 drops.
    cfg = ScenarioConfig(num_uts=0)
    n = 100_000
    xs = np.empty(n)
    ys = np.empty(n)
    for i in range(n):
        t = generate_drop(cfg, i).targets[0].pose.position
        xs[i], ys[i] = t[0], t[1]
    r = cfg.layout.radius
    assert abs(xs.mean()) < 0.01 * r
    assert abs(ys.mean()) < 0.01 * r


def test_placement_infeasible():
    cfg = ScenarioConfig(min_dist_tx_target_m=5000.0, target_height_m=1.5)
    with pytest.raises(PlacementInfeasible):
        generate_drop(cfg, 1)


def test_multi_target_min_separation():
    cfg = ScenarioConfig(num_targets=3, min_dist_target_target_m=50.0)
    drop = generate_drop(cfg, 5)
    pos = [t.pose.position for t in drop.targets]
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.linalg.norm(pos[i] - pos[j]) >= 50.0


def test_config_validation():
    with pytest.raises(ConfigError):
        ScenarioConfig(min_dist_tx_target_m=0.0)
    with pytest.raises(ConfigError):
        ScenarioConfig(carrier_frequency_hz=200e9)
    with pytest.raises(ConfigError):
        ScenarioConfig(sensing_mode="TRP-RIS")
    with pytest.raises(ConfigError):
        ScenarioConfig(scenario_id="Mars")


def test_candidate_links_per_mode():
    drop = generate_drop(CFG, 1)
    assert len(candidate_links(CFG, drop)) == 7
    assert all(l.monostatic for l in candidate_links(CFG, drop))
    bi = candidate_links(ScenarioConfig(sensing_mode="TRP-TRP"), drop)
    assert len(bi) == 7 * 6
    assert all(not l.monostatic for l in bi)
    tu = candidate_links(ScenarioConfig(sensing_mode="TRP-UT"), drop)
    assert len(tu) == 7 * 30
    uu = candidate_links(ScenarioConfig(sensing_mode="UT-UT"), drop)
    assert len(uu) == 30 * 29


def test_monostatic_colocation_invariant():
    with pytest.raises(ConfigError):
        SensingLink("trp", 0, "trp", 1, 0, monostatic=True)


def test_select_fewer_candidates_than_n():
    only = SensingLink("trp", 2, "trp", 2, 0, True)
    assert select_sensing_pairs([only], 4, lambda lk: 100.0) == [only]


def test_select_tie_break_by_index():
    links = [SensingLink("trp", i, "trp", i, 0, True) for i in (3, 1, 2, 0)]
    got = select_sensing_pairs(links, 2, lambda lk: 50.0)
    assert [(l.tx_index, l.rx_index) for l in got] == [(0, 0), (1, 1)]


def test_select_sort_oracle():
    losses = {0: 90.0, 1: 70.0, 2: 110.0, 3: 60.0, 4: 100.0, 5: 80.0, 6: 120.0}
    links = [SensingLink("trp", i, "trp", i, 0, True) for i in range(7)]
    got = select_sensing_pairs(links, 4, lambda lk: losses[lk.tx_index])
    want = sorted(losses, key=losses.get)[:4]
    assert [l.tx_index for l in got] == want
