import math

import pytest

from isacsim.config import loads
from isacsim.errors import ConfigError


def test_minimal_config_defaults():
    cfg = loads("schema = 1")
    assert cfg.scenario.scenario_id == "UMa-AV"
    assert cfg.scenario.carrier_frequency_hz == 6e9
    assert cfg.scenario.num_uts == 30
    assert cfg.scenario.min_dist_tx_target_m == 10.0
    assert cfg.rcs_model.target_type == "uav_small"
    assert cfg.rcs_model.component_a_db == -12.81
    assert cfg.concat.drop_threshold_db == 25.0
    assert cfg.consistency_three_d  # -AV scenario
    assert cfg.synthesis.o_isac == 1.0


def test_schema_key_required_and_versioned():
    with pytest.raises(ConfigError):
        loads("")
    with pytest.raises(ConfigError):
        loads("schema = 2")


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="unknown key"):
        loads("schema = 1\n[scenario]\nbogus = 3\n")
    with pytest.raises(ConfigError, match="unknown key"):
        loads("schema = 1\n[nonexistent]\nx = 1\n")


def test_type_errors_rejected():
    with pytest.raises(ConfigError):
        loads('schema = 1\n[scenario]\nnum_uts = "thirty"\n')
    with pytest.raises(ConfigError):
        loads("schema = 1\n[background]\nenabled = 1\n")


def test_toml_parse_error_is_config_error():
    with pytest.raises(ConfigError):
        loads("schema = = 1")


def test_scenario_bounds_checked():
    with pytest.raises(ConfigError):
        loads("schema = 1\n[scenario]\ncarrier_frequency_hz = 2.0e11\n")
    with pytest.raises(ConfigError):
        loads("schema = 1\n[scenario]\ntarget_type = 'boat'\n")


def test_lsp_and_curve_overrides():
    cfg = loads(
        """
schema = 1
[lsp.los]
ds_s = 5e-8
n_clusters = 8
[pathloss]
los_curve = "inh_custom"
[pathloss.curves.inh_custom]
a = 17.3
b = 32.4
c = 20.0
"""
    )
    assert cfg.lsp_los.ds == 5e-8
    assert cfg.lsp_los.n_clusters == 8
    assert cfg.lsp_nlos.ds == 300e-9  # untouched
    assert cfg.curve_for(True).a == 17.3
    assert cfg.curve_for(False).name == "uma_nlos"


def test_undefined_curve_rejected():
    with pytest.raises(ConfigError):
        loads('schema = 1\n[pathloss]\nlos_curve = "nope"\n')


def test_rcs_face_table_override():
    cfg = loads(
        """
schema = 1
[scenario]
target_type = "vehicle"
rcs_mode = "multi_spst"
[rcs]
sigma_s_std_db = 2.0
[[rcs.faces]]
face_id = "everything"
theta_center = 90.0
theta_3db = 20.0
g_max_dbsm = 5.0
sigma_max_db = 10.0
theta_range = [0.0, 180.0]
phi_range = [0.0, 360.0]
phi_center = 0.0
phi_3db = 30.0
"""
    )
    assert cfg.rcs_model.mode == "multi_spst"
    assert cfg.rcs_model.sigma_s_std_db == 2.0
    assert len(cfg.rcs_model.faces) == 1
    assert cfg.rcs_model.faces[0].g_max_dbsm == 5.0
    assert cfg.rcs_model.k1 == 6.0  # vehicle coefficients retained
    assert cfg.rcs_model.sigma_fs_db == -math.inf  # forward scattering off


def test_rcs_forward_scatter_hook():
    cfg = loads("schema = 1\n[rcs]\nsigma_fs_db = -40.0\n")
    assert cfg.rcs_model.sigma_fs_db == -40.0
    from isacsim.geometry import SphericalAngle
    from isacsim.rcs import sigma_md_bistatic_db

    # The floor now caps how far the bistatic value can fall.
    got = sigma_md_bistatic_db(cfg.rcs_model, SphericalAngle(90, 0), SphericalAngle(90, 179))
    assert got >= -40.0


def test_eo_and_doppler_sections():
    cfg = loads(
        """
schema = 1
[doppler]
p = 0.2
v_scatt_mps = 3.0
[[doppler.micro]]
part = "rotor"
amplitude_m = 0.05
frequency_hz = 40.0
[[eo]]
kind = "type2"
point = [0.0, 0.0, 0.0]
normal = [0.0, 0.0, 1.0]
width_m = 100.0
height_m = 100.0
"""
    )
    assert cfg.doppler_p == 0.2
    assert cfg.v_scatt_mps == 3.0
    assert cfg.micro_motions[0].part == "rotor"
    assert len(cfg.eos) == 1
    assert cfg.eos[0].reflection_loss_db == 3.0


def test_campaign_section_and_metric_validation():
    cfg = loads(
        """
schema = 1
[campaign]
drops = 25
seed = 9
metrics = ["coupling_loss", "ds"]
workers = 2
"""
    )
    assert (cfg.drops, cfg.seed, cfg.workers) == (25, 9, 2)
    assert cfg.metrics == ("coupling_loss", "ds")
    with pytest.raises(ConfigError):
        loads('schema = 1\n[campaign]\nmetrics = ["rssi"]\n')


def test_mrp_override_and_synthesis():
    cfg = loads(
        """
schema = 1
[mrp]
alpha_d = 2.0
beta_d = 0.5
c_d = 10.0
alpha_h = 3.0
beta_h = 1.5
c_h = 0.1
[synthesis]
o_isac_mode = "power_ratio"
rho = 0.25
k_eo = 0.1
"""
    )
    assert cfg.mrp_override.mean_distance == pytest.approx(14.0)
    assert cfg.o_isac_mode == "power_ratio"
    assert cfg.o_isac_rho == 0.25
    assert cfg.synthesis.k_eo == 0.1


def test_human_defaults_micro_motion_only_when_moving():
    still = loads('schema = 1\n[scenario]\ntarget_type = "human_m1"\ntarget_height_m = 1.5\n')
    assert still.micro_motions == ()
    walking = loads(
        'schema = 1\n[scenario]\ntarget_type = "human_m1"\ntarget_height_m = 1.5\ntarget_speed_mps = 1.2\n'
    )
    parts = {m.part for m in walking.micro_motions}
    assert parts == {"arm", "leg"}
