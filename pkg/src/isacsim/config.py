"""Scenario configuration: TOML loading, strict validation, and defaults.

Config files are TOML ("schema = 1" required at the top): sections of
typed key/value pairs, arrays, and tables.  Unknown keys are rejected.
The full grammar is documented in the README; everything has a default,
so the empty config (just the schema key) runs the reference urban-macro
aerial setup.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .background import MrpParams
from .doppler import MicroMotion
from .eo import EoDescriptor
from .errors import ConfigError
from .large_scale import BUILTIN_CURVES, PathlossCurve
from .rcs import FaceParams, RcsModel, TARGET_TYPES, default_rcs_model
from .scenario import LayoutConfig, ScenarioConfig
from .small_scale import LspSet
from .synthesis import SynthesisConfig
from .target_channel import ConcatConfig

_NUM = (int, float)

# Schema: nested dicts mirror TOML sections; [X] marks an array of tables;
# tuples of types are accepted scalar types; list marks a TOML array.
_SCHEMA = {
    "schema": _NUM,
    "scenario": {
        "id": str, "carrier_frequency_hz": _NUM, "bandwidth_hz": _NUM,
        "sensing_mode": str, "tx_power_dbm": _NUM, "noise_figure_db": _NUM,
        "num_uts": _NUM, "num_targets": _NUM, "target_type": str,
        "target_height_m": _NUM, "target_speed_mps": _NUM, "target_size_m": list,
        "rcs_mode": str, "ut_height_m": _NUM, "min_dist_tx_target_m": _NUM,
        "min_dist_target_target_m": _NUM,
    },
    "layout": {"isd_m": _NUM, "num_sites": _NUM, "trp_height_m": _NUM, "cell_radius_m": _NUM},
    "pathloss": {
        "los_curve": str, "nlos_curve": str,
        "curves": {"*": {"a": _NUM, "b": _NUM, "c": _NUM}},
    },
    "los": {"model": str, "aerial_los_height_m": _NUM},
    "lsp": {
        "*": {
            "ds_s": _NUM, "asd_deg": _NUM, "asa_deg": _NUM, "zsd_deg": _NUM, "zsa_deg": _NUM,
            "k_db": _NUM, "sf_std_db": _NUM, "n_clusters": _NUM, "m_rays": _NUM,
            "r_tau": _NUM, "zeta_db": _NUM, "c_asd_deg": _NUM, "c_asa_deg": _NUM,
            "c_zsd_deg": _NUM, "c_zsa_deg": _NUM, "xpr_mu_db": _NUM, "xpr_sigma_db": _NUM,
        }
    },
    "rcs": {
        "angle_dependent": bool, "sigma_m_db": _NUM, "sigma_s_std_db": _NUM,
        "k1": _NUM, "k2": _NUM, "xpr_mu_db": _NUM, "xpr_sigma_db": _NUM,
        "component_a_db": _NUM, "sigma_fs_db": _NUM,
        "faces": [{
            "face_id": str, "theta_center": _NUM, "theta_3db": _NUM,
            "g_max_dbsm": _NUM, "sigma_max_db": _NUM,
            "theta_range": list, "phi_range": list,
            "phi_center": _NUM, "phi_3db": _NUM,
        }],
    },
    "concat": {
        "mode": str, "drop_threshold_db": _NUM, "normalization": str, "angle_pair_filter": bool,
    },
    "background": {"enabled": bool, "round_trip": bool, "n_rp": _NUM},
    "mrp": {"alpha_d": _NUM, "beta_d": _NUM, "c_d": _NUM, "alpha_h": _NUM, "beta_h": _NUM, "c_h": _NUM},
    "consistency": {"three_d": bool, "d_corr": {"*": _NUM}},
    "doppler": {
        "p": _NUM, "p_prime": _NUM, "v_scatt_mps": _NUM,
        "micro": [{
            "part": str, "amplitude_m": _NUM, "frequency_hz": _NUM,
            "phase_rad": _NUM, "axis": list,
        }],
    },
    "synthesis": {
        "o_isac": _NUM, "o_isac_mode": str, "rho": _NUM, "k_eo": _NUM, "n_shared": _NUM,
        "t_start": _NUM, "t_step": _NUM, "t_count": _NUM,
    },
    "eo": [{
        "kind": str, "point": list, "normal": list, "width_m": _NUM, "height_m": _NUM,
        "reflection_loss_db": _NUM,
    }],
    "campaign": {
        "drops": _NUM, "seed": _NUM, "metrics": list, "workers": _NUM,
        "out_dir": str, "channel": str, "export_cir": bool,
    },
}


def _validate(data, schema, path=""):
    if isinstance(schema, list):
        if not isinstance(data, list):
            raise ConfigError(f"{path}: expected an array of tables")
        for i, item in enumerate(data):
            _validate(item, schema[0], f"{path}[{i}]")
        return
    if isinstance(schema, dict):
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a table")
        wild = schema.get("*")
        for key, value in data.items():
            sub = schema.get(key, wild)
            if sub is None:
                raise ConfigError(f"unknown key {path + '.' if path else ''}{key}")
            _validate(value, sub, f"{path}.{key}" if path else key)
        return
    if schema is list:
        if not isinstance(data, list):
            raise ConfigError(f"{path}: expected an array")
        return
    if schema is bool:
        if not isinstance(data, bool):
            raise ConfigError(f"{path}: expected a boolean")
        return
    if not isinstance(data, schema) or isinstance(data, bool):
        raise ConfigError(f"{path}: expected a value of type {schema}")


@dataclass
class SimulationConfig:
    """Everything a campaign needs, assembled from defaults plus one TOML file."""

    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    lsp_los: LspSet = field(default_factory=lambda: _DEFAULT_LSP_LOS)
    lsp_nlos: LspSet = field(default_factory=lambda: _DEFAULT_LSP_NLOS)
    rcs_model: RcsModel = field(default_factory=lambda: default_rcs_model("uav_small"))
    concat: ConcatConfig = field(default_factory=ConcatConfig)
    curves: dict = field(default_factory=lambda: dict(BUILTIN_CURVES))
    los_curve: str = "uma_los"
    nlos_curve: str = "uma_nlos"
    los_model: str = "uma"
    aerial_los_height_m: float = 100.0
    background_enabled: bool = True
    mrp_round_trip: bool = True
    mrp_n_rp: int = 3
    mrp_override: MrpParams | None = None
    consistency_three_d: bool = True
    d_corr: dict = field(default_factory=dict)
    doppler_p: float = 0.0
    doppler_p_prime: float = 0.0
    v_scatt_mps: float = 0.0
    micro_motions: tuple[MicroMotion, ...] = ()
    synthesis: SynthesisConfig = field(default_factory=SynthesisConfig)
    o_isac_mode: str = "none"
    o_isac_rho: float = 1.0
    eos: list = field(default_factory=list)
    # Campaign defaults (flags may override).
    drops: int = 10
    seed: int = 1
    metrics: tuple[str, ...] = ("coupling_loss",)
    workers: int = 0  # 0 = logical cores
    out_dir: str = "out"
    channel: str = "target"  # which channel the spread metrics use
    export_cir: bool = False

    def curve_for(self, los: bool) -> PathlossCurve:
        name = self.los_curve if los else self.nlos_curve
        try:
            return self.curves[name]
        except KeyError:
            raise ConfigError(f"pathloss curve {name!r} is not defined") from None

    def lsp_for(self, los: bool) -> LspSet:
        return self.lsp_los if los else self.lsp_nlos

    def segment_los_model(self, endpoint_height_m: float) -> str:
        """Aerial endpoints well above the clutter are forced LoS."""
        if endpoint_height_m >= self.aerial_los_height_m:
            return "always"
        return self.los_model


# Reference LSPs (self-consistency defaults, not a published table).
_DEFAULT_LSP_LOS = LspSet(
    ds=100e-9, asd=12.0, asa=60.0, zsd=3.0, zsa=8.0, k_db=9.0, sf_std_db=4.0,
    n_clusters=12, m_rays=20, r_tau=2.5, zeta_db=3.0,
)
_DEFAULT_LSP_NLOS = LspSet(
    ds=300e-9, asd=20.0, asa=75.0, zsd=4.0, zsa=12.0, k_db=-math.inf, sf_std_db=6.0,
    n_clusters=20, m_rays=20, r_tau=2.3, zeta_db=3.0,
)

_DEFAULT_HUMAN_MICRO = (
    MicroMotion("arm", 0.3, 1.0),
    MicroMotion("leg", 0.4, 1.0),
)


def _lsp_from(table: dict, base: LspSet) -> LspSet:
    mapping = {
        "ds_s": "ds", "asd_deg": "asd", "asa_deg": "asa", "zsd_deg": "zsd", "zsa_deg": "zsa",
        "k_db": "k_db", "sf_std_db": "sf_std_db", "n_clusters": "n_clusters", "m_rays": "m_rays",
        "r_tau": "r_tau", "zeta_db": "zeta_db", "c_asd_deg": "c_asd", "c_asa_deg": "c_asa",
        "c_zsd_deg": "c_zsd", "c_zsa_deg": "c_zsa", "xpr_mu_db": "xpr_mu_db", "xpr_sigma_db": "xpr_sigma_db",
    }
    kwargs = {mapping[k]: (int(v) if mapping[k] in ("n_clusters", "m_rays") else float(v)) for k, v in table.items()}
    return replace(base, **kwargs)


def _faces_from(entries: list[dict]) -> tuple[FaceParams, ...]:
    faces = []
    for e in entries:
        faces.append(
            FaceParams(
                face_id=e["face_id"],
                theta_center=float(e["theta_center"]),
                theta_3db=float(e["theta_3db"]),
                g_max_dbsm=float(e["g_max_dbsm"]),
                sigma_max_db=float(e["sigma_max_db"]),
                theta_range=tuple(float(v) for v in e["theta_range"]),
                phi_range=tuple(float(v) for v in e["phi_range"]),
                phi_center=float(e["phi_center"]) if "phi_center" in e else None,
                phi_3db=float(e["phi_3db"]) if "phi_3db" in e else None,
            )
        )
    return tuple(faces)


def from_dict(raw: dict) -> SimulationConfig:
    """Build a SimulationConfig from a parsed TOML mapping (strictly validated)."""
    if "schema" not in raw:
        raise ConfigError("config must declare 'schema = 1' at the top")
    if raw["schema"] != 1:
        raise ConfigError(f"unsupported config schema {raw['schema']!r}")
    _validate(raw, _SCHEMA)

    sc_raw = dict(raw.get("scenario", {}))
    lay_raw = dict(raw.get("layout", {}))
    layout = LayoutConfig(
        isd_m=float(lay_raw.get("isd_m", 500.0)),
        num_sites=int(lay_raw.get("num_sites", 7)),
        trp_height_m=float(lay_raw.get("trp_height_m", 25.0)),
        cell_radius_m=float(lay_raw["cell_radius_m"]) if "cell_radius_m" in lay_raw else None,
    )
    scenario = ScenarioConfig(
        scenario_id=sc_raw.get("id", "UMa-AV"),
        carrier_frequency_hz=float(sc_raw.get("carrier_frequency_hz", 6e9)),
        bandwidth_hz=float(sc_raw.get("bandwidth_hz", 100e6)),
        sensing_mode=sc_raw.get("sensing_mode", "TRP-monostatic"),
        tx_power_dbm=float(sc_raw.get("tx_power_dbm", 56.0)),
        noise_figure_db=float(sc_raw.get("noise_figure_db", 5.0)),
        num_uts=int(sc_raw.get("num_uts", 30)),
        num_targets=int(sc_raw.get("num_targets", 1)),
        target_type=sc_raw.get("target_type", "uav_small"),
        target_height_m=float(sc_raw.get("target_height_m", 200.0)),
        target_speed_mps=float(sc_raw.get("target_speed_mps", 0.0)),
        target_size_m=tuple(float(v) for v in sc_raw.get("target_size_m", (0.0, 0.0, 0.0))),
        rcs_mode=sc_raw.get("rcs_mode", "single_spst"),
        ut_height_m=float(sc_raw.get("ut_height_m", 1.5)),
        min_dist_tx_target_m=float(sc_raw.get("min_dist_tx_target_m", 10.0)),
        min_dist_target_target_m=(
            float(sc_raw["min_dist_target_target_m"]) if "min_dist_target_target_m" in sc_raw else None
        ),
        layout=layout,
    )
    if scenario.target_type not in TARGET_TYPES:
        raise ConfigError(f"unknown target type {scenario.target_type!r}")

    cfg = SimulationConfig(scenario=scenario)
    cfg.consistency_three_d = scenario.scenario_id.endswith("-AV")

    lsp_raw = raw.get("lsp", {})
    for state in lsp_raw:
        if state not in ("los", "nlos"):
            raise ConfigError(f"lsp section must be 'los' or 'nlos', got {state!r}")
    if "los" in lsp_raw:
        cfg.lsp_los = _lsp_from(lsp_raw["los"], cfg.lsp_los)
    if "nlos" in lsp_raw:
        cfg.lsp_nlos = _lsp_from(lsp_raw["nlos"], cfg.lsp_nlos)

    rcs_raw = raw.get("rcs", {})
    try:
        model = default_rcs_model(scenario.target_type, scenario.rcs_mode)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    overrides = {}
    for key in ("sigma_m_db", "sigma_s_std_db", "k1", "k2", "xpr_mu_db", "xpr_sigma_db",
                "component_a_db", "sigma_fs_db"):
        if key in rcs_raw:
            overrides[key] = float(rcs_raw[key])
    if "angle_dependent" in rcs_raw:
        overrides["angle_dependent"] = bool(rcs_raw["angle_dependent"])
    if "faces" in rcs_raw:
        overrides["faces"] = _faces_from(rcs_raw["faces"])
        overrides.setdefault("angle_dependent", True)
    if overrides.get("angle_dependent") is False:
        overrides["faces"] = ()
    cfg.rcs_model = replace(model, **overrides)

    pl_raw = raw.get("pathloss", {})
    for name, coeffs in pl_raw.get("curves", {}).items():
        cfg.curves[name] = PathlossCurve(
            name, a=float(coeffs.get("a", 0.0)), b=float(coeffs.get("b", 0.0)), c=float(coeffs.get("c", 0.0))
        )
    cfg.los_curve = pl_raw.get("los_curve", cfg.los_curve)
    cfg.nlos_curve = pl_raw.get("nlos_curve", cfg.nlos_curve)
    for name in (cfg.los_curve, cfg.nlos_curve):
        if name not in cfg.curves:
            raise ConfigError(f"pathloss curve {name!r} is not defined")

    los_raw = raw.get("los", {})
    cfg.los_model = los_raw.get("model", cfg.los_model)
    if cfg.los_model not in ("uma", "always", "never"):
        raise ConfigError(f"unknown LoS model {cfg.los_model!r}")
    cfg.aerial_los_height_m = float(los_raw.get("aerial_los_height_m", cfg.aerial_los_height_m))

    c_raw = raw.get("concat", {})
    cfg.concat = ConcatConfig(
        mode=c_raw.get("mode", "full_product"),
        drop_threshold_db=float(c_raw.get("drop_threshold_db", 25.0)),
        normalization=c_raw.get("normalization", "cluster_count"),
        angle_pair_filter=bool(c_raw.get("angle_pair_filter", False)),
    )

    bg_raw = raw.get("background", {})
    cfg.background_enabled = bool(bg_raw.get("enabled", True))
    cfg.mrp_round_trip = bool(bg_raw.get("round_trip", True))
    cfg.mrp_n_rp = int(bg_raw.get("n_rp", 3))
    if "mrp" in raw:
        m = raw["mrp"]
        cfg.mrp_override = MrpParams(
            float(m["alpha_d"]), float(m["beta_d"]), float(m["c_d"]),
            float(m["alpha_h"]), float(m["beta_h"]), float(m["c_h"]),
        )

    cons_raw = raw.get("consistency", {})
    if "three_d" in cons_raw:
        cfg.consistency_three_d = bool(cons_raw["three_d"])
    cfg.d_corr = {k: float(v) for k, v in cons_raw.get("d_corr", {}).items()}

    dop_raw = raw.get("doppler", {})
    cfg.doppler_p = float(dop_raw.get("p", 0.0))
    cfg.doppler_p_prime = float(dop_raw.get("p_prime", 0.0))
    cfg.v_scatt_mps = float(dop_raw.get("v_scatt_mps", 0.0))
    if "micro" in dop_raw:
        cfg.micro_motions = tuple(
            MicroMotion(
                part=m["part"], amplitude_m=float(m["amplitude_m"]),
                frequency_hz=float(m["frequency_hz"]), phase_rad=float(m.get("phase_rad", 0.0)),
                axis=tuple(float(v) for v in m.get("axis", (1.0, 0.0, 0.0))),
            )
            for m in dop_raw["micro"]
        )
    elif scenario.target_type.startswith("human"):
        cfg.micro_motions = _DEFAULT_HUMAN_MICRO if scenario.target_speed_mps > 0 else ()

    syn_raw = raw.get("synthesis", {})
    cfg.synthesis = SynthesisConfig(
        o_isac=float(syn_raw.get("o_isac", 1.0)),
        k_eo=float(syn_raw.get("k_eo", 0.0)),
        n_shared=int(syn_raw.get("n_shared", 0)),
        t_start=float(syn_raw.get("t_start", 0.0)),
        t_step=float(syn_raw.get("t_step", 1e-3)),
        t_count=int(syn_raw.get("t_count", 1)),
    )
    cfg.o_isac_mode = syn_raw.get("o_isac_mode", "none")
    cfg.o_isac_rho = float(syn_raw.get("rho", 1.0))

    for e in raw.get("eo", []):
        kind = e.get("kind", "type2")
        if kind != "type2":
            raise ConfigError("only type2 environment objects are configurable by plane geometry")
        cfg.eos.append(
            EoDescriptor(
                kind="type2",
                point=[float(v) for v in e["point"]],
                normal=[float(v) for v in e["normal"]],
                width_m=float(e["width_m"]),
                height_m=float(e["height_m"]),
                reflection_loss_db=float(e.get("reflection_loss_db", 3.0)),
            )
        )

    cam_raw = raw.get("campaign", {})
    cfg.drops = int(cam_raw.get("drops", cfg.drops))
    cfg.seed = int(cam_raw.get("seed", cfg.seed))
    if "metrics" in cam_raw:
        cfg.metrics = tuple(cam_raw["metrics"])
    for m in cfg.metrics:
        if m not in ("coupling_loss", "ds", "asa", "asd", "zsa", "zsd"):
            raise ConfigError(f"unknown metric {m!r}")
    cfg.workers = int(cam_raw.get("workers", cfg.workers))
    cfg.out_dir = cam_raw.get("out_dir", cfg.out_dir)
    cfg.channel = cam_raw.get("channel", cfg.channel)
    if cfg.channel not in ("target", "background", "combined"):
        raise ConfigError(f"unknown channel selector {cfg.channel!r}")
    cfg.export_cir = bool(cam_raw.get("export_cir", cfg.export_cir))
    return cfg


def loads(text: str) -> SimulationConfig:
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    return from_dict(raw)


def load(path) -> SimulationConfig:
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return from_dict(raw)
