"""Drop campaigns: the per-drop stage pipeline, metrics, and CDF aggregation.

Each drop executes the fixed stage order

    los_assignment -> path_loss -> large_scale -> small_scale ->
    concatenation -> background -> micro_doppler -> coefficients ->
    large_scale_application -> combination

for the best-N selected sensing pairs, then contributes one sample per
(link, metric).  Samples are aggregated across drops into sorted CDFs;
drops run independently (optionally on a worker pool) and the aggregation
is order-independent, so results are deterministic for a given seed.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .background import default_mrp, bistatic_background, monostatic_background
from .config import SimulationConfig
from .consistency import ConsistencyContext
from .doppler import assign_scatterer_motion
from .errors import EmptyPathSet, PlacementInfeasible
from .large_scale import (
    LosState,
    coupling_loss,
    los_probability,
    los_state_joint,
    pathloss_segment,
    sample_shadow_fading,
    aperture_constant_db,
)
from .paths import PathSet, empty_path_set
from .rcs import spst_layout
from .scenario import Drop, SensingLink, candidate_links, generate_drop, select_sensing_pairs
from .streams import substream
from .synthesis import AntennaPattern, Cir, assemble_cir, normalize_background
from .target_channel import build_target_channel
from .eo import build_eo_channel

logger = logging.getLogger("isacsim")

STAGES = (
    "los_assignment",
    "path_loss",
    "large_scale",
    "small_scale",
    "concatenation",
    "background",
    "micro_doppler",
    "coefficients",
    "large_scale_application",
    "combination",
)

METRICS = ("coupling_loss", "ds", "asa", "asd", "zsa", "zsd")


@dataclass
class CampaignSpec:
    """One campaign: a config, a drop count/seed, metrics, and output location."""

    config: SimulationConfig
    n_drops: int = 10
    seed: int = 1
    metrics: tuple[str, ...] = ("coupling_loss",)
    out_dir: str | None = None
    workers: int = 0  # 0 = logical cores, 1 = in-process
    mode: str | None = None  # overrides config.scenario.sensing_mode
    best_pairs: int = 4
    export_cir: bool = False

    def __post_init__(self):
        if self.n_drops < 1:
            raise ValueError("n_drops must be >= 1")
        for m in self.metrics:
            if m not in METRICS:
                raise ValueError(f"unknown metric {m!r}")


@dataclass
class CdfResult:
    """Sorted metric samples plus the 1..99 percentile table."""

    metric: str
    samples: np.ndarray
    n_infeasible: int = 0

    def __post_init__(self):
        self.samples = np.sort(np.asarray(self.samples, dtype=float))

    @property
    def percentiles(self) -> np.ndarray:
        return np.percentile(self.samples, np.arange(1, 100))

    def cdf(self) -> tuple[np.ndarray, np.ndarray]:
        n = len(self.samples)
        return self.samples, np.arange(1, n + 1) / n


def drop_seed_for(base_seed: int, index: int) -> int:
    """64-bit per-drop seed; disjoint base seeds give disjoint streams."""
    state = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(index),)).generate_state(2)
    return int(state[0]) << 32 | int(state[1])


@dataclass
class LinkChannel:
    """Everything the pipeline produced for one selected link."""

    link: SensingLink
    los: LosState
    pl1_db: float
    pl2_db: float
    sf1_db: float
    sf2_db: float
    coupling_loss_db: float
    target: PathSet | None = None
    background: PathSet | None = None
    combined: PathSet | None = None
    cir: Cir | None = None


def _horizontal(a, b) -> float:
    d = np.asarray(a, float)[:2] - np.asarray(b, float)[:2]
    return float(np.hypot(d[0], d[1]))


def _node_velocity(drop: Drop, kind: str, index: int) -> np.ndarray:
    return drop.node(kind, index).velocity


def _segment_los_probability(cfg: SimulationConfig, d2d: float, target_height: float) -> float:
    return los_probability(d2d, cfg.segment_los_model(target_height))


def simulate_drop(
    cfg: SimulationConfig,
    drop_seed: int,
    mode: str | None = None,
    best_pairs: int = 4,
    trace: list | None = None,
    keep_paths: bool = False,
    build_cir: bool = False,
) -> tuple[list[LinkChannel], Drop]:
    """Run the full stage pipeline for one drop and return the per-link channels.

    keep_paths retains the PathSets on the results (metrics need them);
    build_cir additionally assembles the time-grid CIR of every link.
    """
    scenario = cfg.scenario if mode is None else replace(cfg.scenario, sensing_mode=mode)
    drop = generate_drop(scenario, drop_seed, eos=cfg.eos)
    ctx = ConsistencyContext(drop_seed, cfg.d_corr, three_d=cfg.consistency_three_d)
    monostatic = scenario.sensing_mode.endswith("monostatic")
    f_hz = scenario.carrier_frequency_hz

    def stage(name: str, detail: str = ""):
        # The trace records the drop-level stage order once per stage; the
        # debug log keeps every per-link occurrence.
        if trace is not None and name not in trace:
            trace.append(name)
        logger.debug("stage %-24s %s", name, detail)

    results: list[LinkChannel] = []
    for t_idx, target in enumerate(drop.targets):
        candidates = candidate_links(scenario, drop, t_idx)
        if not candidates:
            continue
        t_pos = target.pose.position

        # Stage 1: LoS assignment per candidate link (spatially consistent draws).
        stage("los_assignment", f"target {t_idx}, {len(candidates)} candidates")
        los_by_link: dict[SensingLink, LosState] = {}
        for link in candidates:
            tx = drop.node(link.tx_kind, link.tx_index).pose.position
            rx = drop.node(link.rx_kind, link.rx_index).pose.position
            p1 = _segment_los_probability(cfg, _horizontal(tx, t_pos), t_pos[2])
            u1 = float(ctx.uniform("los_state", f"los|{link.tx_kind}{link.tx_index}", t_pos))
            if link.monostatic:
                los_by_link[link] = los_state_joint(p1, p1, u1, None, True)
            else:
                p2 = _segment_los_probability(cfg, _horizontal(rx, t_pos), t_pos[2])
                u2 = float(ctx.uniform("los_state", f"los|{link.rx_kind}{link.rx_index}", t_pos))
                los_by_link[link] = los_state_joint(p1, p2, u1, u2, False)

        # Stage 2: segment path losses.
        stage("path_loss")
        pls: dict[SensingLink, tuple[float, float]] = {}
        for link in candidates:
            tx = drop.node(link.tx_kind, link.tx_index).pose.position
            rx = drop.node(link.rx_kind, link.rx_index).pose.position
            los = los_by_link[link]
            d1 = float(np.linalg.norm(t_pos - tx))
            d2 = float(np.linalg.norm(rx - t_pos))
            pls[link] = (
                pathloss_segment(d1, f_hz, cfg.curve_for(los.tx_target)),
                pathloss_segment(d2, f_hz, cfg.curve_for(los.target_rx)),
            )

        # Stage 3: shadow fading and the coupling-loss power scaling factor.
        stage("large_scale")
        couplings: dict[SensingLink, tuple[float, float, float]] = {}
        for link in candidates:
            los = los_by_link[link]
            rng_sf = substream(drop_seed, "sf", link.link_id)
            sf1 = sample_shadow_fading(rng_sf, cfg.lsp_for(los.tx_target).sf_std_db)
            sf2 = sample_shadow_fading(rng_sf, cfg.lsp_for(los.target_rx).sf_std_db)
            cl = coupling_loss(*pls[link], f_hz, cfg.rcs_model.component_a_db, sf1, sf2)
            couplings[link] = (sf1, sf2, cl)

        selected = select_sensing_pairs(candidates, best_pairs, lambda lk: couplings[lk][2])

        # Stages 4-5: small-scale generation and concatenation per selected link.
        spsts = spst_layout(cfg.rcs_model, scenario.target_size_m)
        for link in selected:
            stage("small_scale", link.link_id)
            stage("concatenation", link.link_id)
            tx = drop.node(link.tx_kind, link.tx_index).pose.position
            rx = drop.node(link.rx_kind, link.rx_index).pose.position
            los = los_by_link[link]

            def rng_factory(spst_idx, name, _link=link):
                return substream(drop_seed, "tch", _link.link_id, spst_idx, name)

            target_paths = build_target_channel(
                link.link_id, tx, rx, target.pose, target.velocity, cfg.rcs_model,
                spsts, [los] * len(spsts), cfg.lsp_los, cfg.lsp_nlos, cfg.concat,
                f_hz, rng_factory, micro_motions=cfg.micro_motions,
            )
            sf1, sf2, cl = couplings[link]
            results.append(
                LinkChannel(
                    link=link, los=los, pl1_db=pls[link][0], pl2_db=pls[link][1],
                    sf1_db=sf1, sf2_db=sf2, coupling_loss_db=cl, target=target_paths,
                )
            )

    # Stage 6: background channels (per monostatic node, or per bistatic pair).
    stage("background")
    for res in results:
        link = res.link
        if not cfg.background_enabled:
            res.background = empty_path_set(link.link_id, "background")
            continue
        if link.monostatic:
            node = drop.node(link.tx_kind, link.tx_index)
            mrp = cfg.mrp_override or default_mrp(link.tx_kind, node.pose.position[2])
            rng = substream(drop_seed, "bg", f"{link.tx_kind}{link.tx_index}")
            bg = monostatic_background(
                node.pose, mrp, cfg.lsp_nlos, rng, n_rp=cfg.mrp_n_rp,
                round_trip=cfg.mrp_round_trip, link_id=link.link_id,
            )
        else:
            tx = drop.node(link.tx_kind, link.tx_index)
            rx = drop.node(link.rx_kind, link.rx_index)
            rng = substream(drop_seed, "bg", f"{link.tx_kind}{link.tx_index}-{link.rx_kind}{link.rx_index}")
            d2d = _horizontal(tx.pose.position, rx.pose.position)
            p_los = los_probability(d2d, cfg.los_model)
            bg_los = bool(rng.random() < p_los)
            bg = bistatic_background(
                tx.pose.position, rx.pose.position, cfg.lsp_for(bg_los), rng, bg_los,
                link_id=link.link_id,
            )
            bg.kind = "background"
        res.background = bg

    # Stage 7: micro-Doppler and random scatterer motion.
    stage("micro_doppler")
    for res in results:
        assign_scatterer_motion(
            res.target, substream(drop_seed, "scatt", res.link.link_id, "t"),
            cfg.doppler_p, cfg.doppler_p_prime, cfg.v_scatt_mps,
        )
        assign_scatterer_motion(
            res.background, substream(drop_seed, "scatt", res.link.link_id, "b"),
            cfg.doppler_p, cfg.doppler_p_prime, cfg.v_scatt_mps,
        )

    # Stage 8: coefficients are final per-path complex weights; materialized
    # tap-by-tap by the combiner below.
    stage("coefficients")

    # Stage 9: large-scale application (segment losses + aperture; the RCS
    # rides per-path inside the small-scale amplitudes).
    stage("large_scale_application")
    ap_db = aperture_constant_db(f_hz)
    for res in results:
        los = res.los
        if len(res.target):
            pl1 = pathloss_segment(res.target.seg1_dist, f_hz, cfg.curve_for(los.tx_target))
            pl2 = pathloss_segment(res.target.seg2_dist, f_hz, cfg.curve_for(los.target_rx))
            gain_db = -(pl1 + pl2 + ap_db + res.sf1_db + res.sf2_db)
            res.target = res.target.scaled(10.0 ** (gain_db / 20.0))
        if len(res.background):
            rng_bg_sf = substream(drop_seed, "bgsf", res.link.link_id)
            sf_bg = sample_shadow_fading(rng_bg_sf, cfg.lsp_nlos.sf_std_db)
            pl_bg = pathloss_segment(res.background.seg1_dist, f_hz, cfg.curve_for(False))
            res.background = res.background.scaled(10.0 ** (-(pl_bg + sf_bg) / 20.0))

    # Stage 10: combination (plus reflector paths when configured).
    stage("combination")
    for res in results:
        link = res.link
        tx_node = drop.node(link.tx_kind, link.tx_index)
        rx_node = drop.node(link.rx_kind, link.rx_index)
        eo_paths = build_eo_channel(
            tx_node.pose.position, rx_node.pose.position, drop.eos,
            cfg.synthesis.k_eo, f_hz, link_id=link.link_id,
        )
        o_isac = cfg.synthesis.o_isac
        if cfg.o_isac_mode == "power_ratio" and len(res.target) and len(res.background):
            o_isac = normalize_background(res.target, res.background, "power_ratio", cfg.o_isac_rho)
        stoch = math.sqrt(1.0 - cfg.synthesis.k_eo)
        res.combined = PathSet.concatenate(
            [res.target.scaled(stoch), res.background.scaled(o_isac * stoch), eo_paths],
            link_id=link.link_id, kind="target",
        ).sorted_by_delay()
        if build_cir:
            iso = AntennaPattern.isotropic_dual_pol()
            res.cir = assemble_cir(
                res.target, res.background, eo_paths,
                replace(cfg.synthesis, o_isac=o_isac),
                iso, iso, f_hz,
                v_tx=tx_node.velocity, v_rx=rx_node.velocity,
                drop_seed=drop_seed, link_index=_link_index(res.link),
                mode=scenario.sensing_mode,
            )
        if not keep_paths:
            res.target = res.background = res.combined = None

    return results, drop


def _link_index(link: SensingLink) -> int:
    kind_off = 0 if link.tx_kind == "trp" else 1000
    return kind_off + link.tx_index * 100 + link.rx_index


def compute_spreads(paths) -> dict[str, float]:
    """Power-weighted RMS delay spread and circular angle spreads of a path set.

    Accepts a PathSet (preferred) or a Cir; a Cir yields only the delay
    spread (angles are not retained on synthesized taps).
    """
    if isinstance(paths, Cir):
        if paths.n_taps == 0:
            raise EmptyPathSet("empty CIR")
        w = np.mean(np.abs(paths.amps[:, :, 0, :]) ** 2, axis=(0, 1))
        return {"ds": _rms_spread(paths.delays, w), "asa": math.nan, "asd": math.nan,
                "zsa": math.nan, "zsd": math.nan}
    if len(paths) == 0:
        raise EmptyPathSet("empty path set")
    w = paths.power
    return {
        "ds": _rms_spread(paths.delay, w),
        "asa": _circular_spread(paths.aoa, w),
        "asd": _circular_spread(paths.aod, w),
        "zsa": _rms_spread(paths.zoa, w),
        "zsd": _rms_spread(paths.zod, w),
    }


def _rms_spread(x, w) -> float:
    w = w / np.sum(w)
    mean = float(np.sum(w * x))
    return float(math.sqrt(max(float(np.sum(w * x**2)) - mean**2, 0.0)))


def _circular_spread(angles_deg, w) -> float:
    """Minimum power-weighted RMS azimuth spread over wrap shifts [deg]."""
    w = w / np.sum(w)
    shifts = np.arange(0.0, 360.0, 1.0)
    a = (np.asarray(angles_deg, float)[None, :] - shifts[:, None] + 180.0) % 360.0 - 180.0
    mean = np.sum(w[None, :] * a, axis=1, keepdims=True)
    var = np.sum(w[None, :] * (a - mean) ** 2, axis=1)
    return float(math.sqrt(max(float(np.min(var)), 0.0)))


def _metrics_for_drop(cfg: SimulationConfig, spec: CampaignSpec, drop_seed: int) -> dict[str, list[float]]:
    want_spreads = any(m != "coupling_loss" for m in spec.metrics)
    out: dict[str, list[float]] = {m: [] for m in spec.metrics}
    links, _ = simulate_drop(
        cfg, drop_seed, mode=spec.mode, best_pairs=spec.best_pairs,
        keep_paths=want_spreads, build_cir=False,
    )
    for res in links:
        if "coupling_loss" in out:
            out["coupling_loss"].append(res.coupling_loss_db)
        if want_spreads:
            source = {"target": res.target, "background": res.background, "combined": res.combined}[
                cfg.channel
            ]
            if source is None or len(source) == 0:
                continue
            sp = compute_spreads(source)
            for m in spec.metrics:
                if m != "coupling_loss":
                    out[m].append(sp[m])
    return out


def _worker(args) -> tuple[dict[str, list[float]], bool]:
    cfg, spec, seed = args
    try:
        return _metrics_for_drop(cfg, spec, seed), False
    except PlacementInfeasible:
        return {m: [] for m in spec.metrics}, True


def run_campaign(spec: CampaignSpec) -> list[CdfResult]:
    """Execute all drops and aggregate per-metric CDFs.

    Sample order is normalized by sorting, so the results are independent
    of worker scheduling; infeasible drops are counted and skipped.
    """
    cfg = spec.config
    seeds = [drop_seed_for(spec.seed, i) for i in range(spec.n_drops)]
    jobs = [(cfg, spec, s) for s in seeds]
    collected: dict[str, list[float]] = {m: [] for m in spec.metrics}
    infeasible = 0

    workers = spec.workers
    if workers == 0:
        import os

        workers = os.cpu_count() or 1
    if workers > 1 and spec.n_drops > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for samples, bad in pool.map(_worker, jobs, chunksize=max(1, spec.n_drops // (4 * workers))):
                infeasible += bad
                for m, vals in samples.items():
                    collected[m].extend(vals)
    else:
        for job in jobs:
            samples, bad = _worker(job)
            infeasible += bad
            for m, vals in samples.items():
                collected[m].extend(vals)

    if infeasible:
        logger.warning("%d of %d drops were placement-infeasible and skipped", infeasible, spec.n_drops)
    return [CdfResult(m, np.array(collected[m]), n_infeasible=infeasible) for m in spec.metrics]
