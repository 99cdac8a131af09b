import numpy as np
import pytest

from isacsim.background import (
    MrpParams,
    UMI_TRP_MRP,
    UMI_UT_MRP,
    bistatic_background,
    default_mrp,
    monostatic_background,
    sample_mrp_values,
    sample_reference_points,
    umi_uav_mrp,
)
from isacsim.geometry import SPEED_OF_LIGHT, Pose
from isacsim.small_scale import LspSet
from isacsim.streams import substream

LSP = LspSet(ds=120e-9, asd=15, asa=60, zsd=3, zsa=8, k_db=9.0, n_clusters=20, m_rays=20)
NODE = Pose(np.array([10.0, -20.0, 25.0]))


def test_gamma_mean_identities():
    # Mean = alpha / beta + c (beta is a rate); oracle from the row values.
    assert UMI_TRP_MRP.mean_distance == pytest.approx(6.1996 / 0.1558 + 15.2697, abs=1e-12)
    assert UMI_TRP_MRP.mean_distance == pytest.approx(55.06, abs=0.01)
    assert UMI_TRP_MRP.mean_height == pytest.approx(12.0487 / 2.3261 + 0.0157, abs=1e-12)
    assert UMI_TRP_MRP.mean_height == pytest.approx(5.196, abs=0.001)
    assert UMI_UT_MRP.mean_distance == pytest.approx(10.0220 / 1.2522 + 11.0040, abs=1e-12)


def test_gamma_draw_statistics():
    rng = np.random.default_rng(5)
    d, h = sample_mrp_values(UMI_TRP_MRP, rng, size=1_000_000)
    assert d.mean() == pytest.approx(UMI_TRP_MRP.mean_distance, rel=0.02)
    assert h.mean() == pytest.approx(UMI_TRP_MRP.mean_height, rel=0.02)
    assert d.var() == pytest.approx(UMI_TRP_MRP.alpha_d / UMI_TRP_MRP.beta_d**2, rel=0.02)
    assert h.var() == pytest.approx(UMI_TRP_MRP.alpha_h / UMI_TRP_MRP.beta_h**2, rel=0.02)


def test_shifted_gamma_support():
    rng = np.random.default_rng(6)
    d, h = sample_mrp_values(UMI_TRP_MRP, rng, size=100_000)
    assert d.min() >= UMI_TRP_MRP.c_d
    assert h.min() >= UMI_TRP_MRP.c_h


def test_aerial_row_expressions():
    p = umi_uav_mrp(200.0)
    assert p.alpha_d == pytest.approx(0.0156 * 200 + 5.5399, abs=1e-12)
    assert p.alpha_d == pytest.approx(8.6599, abs=1e-4)
    assert p.beta_d == pytest.approx(40.4517 / (200 + 254.6318), abs=1e-12)
    assert p.c_h == pytest.approx(0.0532 * 200 - 0.0120, abs=1e-12)


def test_default_mrp_rows():
    assert default_mrp("trp") is UMI_TRP_MRP
    assert default_mrp("ut", aerial_height_m=1.5) is UMI_UT_MRP
    aerial = default_mrp("ut", aerial_height_m=200.0)
    assert aerial.alpha_d == pytest.approx(8.6599, abs=1e-4)


def test_mrp_validation():
    with pytest.raises(ValueError):
        MrpParams(0.0, 1.0, 0.0, 1.0, 1.0, 0.0)


def test_reference_point_layout():
    rng = np.random.default_rng(7)
    rps = sample_reference_points(UMI_TRP_MRP, rng, NODE)
    assert len(rps) == 3
    d = [np.linalg.norm(rp.position[:2] - NODE.position[:2]) for rp in rps]
    assert d[0] == pytest.approx(d[1], rel=1e-12) and d[1] == pytest.approx(d[2], rel=1e-12)
    h = [rp.position[2] for rp in rps]
    assert h[0] == h[1] == h[2]
    az = sorted(
        np.degrees(np.arctan2(rp.position[1] - NODE.position[1], rp.position[0] - NODE.position[0])) % 360
        for rp in rps
    )
    assert (az[1] - az[0]) % 360 == pytest.approx(120.0, abs=1e-9)
    assert (az[2] - az[1]) % 360 == pytest.approx(120.0, abs=1e-9)


def test_monostatic_background_round_trip_delay():
    rng = substream(9, "bg")
    rng_probe = substream(9, "bg")
    rps = sample_reference_points(UMI_TRP_MRP, rng_probe, NODE)  # same stream prefix
    ps = monostatic_background(NODE, UMI_TRP_MRP, LSP, rng, link_id="n0")
    d3 = np.linalg.norm(rps[0].position - NODE.position)
    assert ps.delay.min() == pytest.approx(2.0 * d3 / SPEED_OF_LIGHT, rel=1e-12)
    assert np.all(ps.seg1_dist == pytest.approx(2.0 * d3, rel=1e-12))


def test_monostatic_background_one_way_option():
    ps_rt = monostatic_background(NODE, UMI_TRP_MRP, LSP, substream(10, "bg"), round_trip=True)
    ps_ow = monostatic_background(NODE, UMI_TRP_MRP, LSP, substream(10, "bg"), round_trip=False)
    assert ps_rt.delay.min() == pytest.approx(2.0 * ps_ow.delay.min(), rel=1e-12)


def test_monostatic_background_path_count_and_weights():
    ps = monostatic_background(NODE, UMI_TRP_MRP, LSP, substream(11, "bg"))
    assert len(ps) == 3 * LSP.n_clusters * LSP.m_rays
    # Equal sub-channel weights: total power = 3 * (1/3) = 1.
    assert ps.power.sum() == pytest.approx(1.0, rel=1e-9)
    assert ps.kind == "background"
    assert np.all(ps.spst_idx == -1)


def test_monostatic_background_independent_across_nodes():
    a = monostatic_background(NODE, UMI_TRP_MRP, LSP, substream(1, "bg", "trp0"))
    b = monostatic_background(NODE, UMI_TRP_MRP, LSP, substream(1, "bg", "trp1"))
    assert a.delay.min() != b.delay.min()


def test_bistatic_background_causality_and_los():
    tx = np.array([0.0, 0.0, 25.0])
    rx = np.array([500.0, 0.0, 25.0])
    geo = 500.0 / SPEED_OF_LIGHT
    nlos = bistatic_background(tx, rx, LSP, substream(12, "bg"), los=False)
    assert nlos.delay.min() >= geo - 1e-18
    los = bistatic_background(tx, rx, LSP, substream(13, "bg"), los=True)
    assert los.delay.min() == pytest.approx(geo, rel=1e-15)
    k = LSP.k_linear
    assert los.power.max() == pytest.approx(k / (k + 1.0), rel=1e-9)


def test_bistatic_background_delay_spread_moment():
    tx = np.array([0.0, 0.0, 25.0])
    rx = np.array([500.0, 0.0, 25.0])
    spreads = []
    for i in range(1000):
        ps = bistatic_background(tx, rx, LSP, substream(20, "bg", i), los=False)
        w = ps.power / ps.power.sum()
        mean = np.sum(w * ps.delay)
        spreads.append(np.sqrt(np.sum(w * ps.delay**2) - mean**2))
    assert np.mean(spreads) == pytest.approx(LSP.ds, rel=0.10)
