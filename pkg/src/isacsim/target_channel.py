"""Tx-SPST-Rx concatenated path construction.

Rays of the Tx-target segment are paired with rays of the target-Rx
segment (full cross product, or rank-matched 1-by-1), each pair weighted
by sqrt(P1 * P2 / norm), the target's RCS at the pair's local
incident/scattered angles, and the polarization chain
seg2 x CPM x seg1.  Weak paths are dropped against a threshold below the
strongest path.  Segment LoS rays (carrying the K-factor share) ride
through the same pairing, so the LoS x LoS pair is exactly the direct
path and the four LoS/NLoS combinations emerge naturally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .doppler import MicroMotion
from .errors import EmptyPathSet
from .geometry import SPEED_OF_LIGHT, Pose, unit_vector_from_angles, wrap_azimuth
from .large_scale import LosState
from .paths import PathSet, empty_path_set
from .rcs import RcsModel, Spst, cpm_matrix, sample_sigma_s, sigma_md_bistatic_db_arrays
from .small_scale import LspSet, SegmentRays, direct_path, flatten_segment, generate_clusters


@dataclass(frozen=True)
class ConcatConfig:
    """Concatenation policy knobs."""

    mode: str = "full_product"  # full_product | one_by_one
    drop_threshold_db: float = 25.0
    normalization: str = "cluster_count"  # cluster_count | cluster_index | none
    angle_pair_filter: bool = False

    def __post_init__(self):
        if self.drop_threshold_db <= 0:
            raise ValueError("drop threshold must be positive")
        if self.mode not in ("full_product", "one_by_one"):
            raise ValueError(f"unknown concatenation mode {self.mode!r}")
        if self.normalization not in ("cluster_count", "cluster_index", "none"):
            raise ValueError(f"unknown normalization {self.normalization!r}")


def _mask_segment(seg: SegmentRays, mask) -> SegmentRays:
    return SegmentRays(
        delay=seg.delay[mask], power=seg.power[mask],
        dep_theta=seg.dep_theta[mask], dep_phi=seg.dep_phi[mask],
        arr_theta=seg.arr_theta[mask], arr_phi=seg.arr_phi[mask],
        pol=seg.pol[mask], is_los=seg.is_los[mask],
        cluster_idx=seg.cluster_idx[mask], n_clusters=seg.n_clusters,
    )


def _pair_indices(seg1: SegmentRays, seg2: SegmentRays, mode: str):
    r1, r2 = len(seg1.delay), len(seg2.delay)
    if mode == "full_product":
        i1, i2 = np.meshgrid(np.arange(r1), np.arange(r2), indexing="ij")
        return i1.ravel(), i2.ravel()
    # 1-by-1: pair rays by descending-power rank.
    o1 = np.argsort(-seg1.power, kind="stable")
    o2 = np.argsort(-seg2.power, kind="stable")
    k = min(r1, r2)
    return o1[:k], o2[:k]


def _norm_factor(seg1: SegmentRays, seg2: SegmentRays, i1, i2, strategy: str):
    if strategy == "none":
        return 1.0
    if strategy == "cluster_count":
        return float(seg1.n_clusters * seg2.n_clusters)
    # cluster_index: 1-based indices; segment LoS rays (index 0) count as 1.
    n1 = np.maximum(seg1.cluster_idx[i1], 1)
    n2 = np.maximum(seg2.cluster_idx[i2], 1)
    return (n1 * n2).astype(float)


def concatenate(
    seg1: SegmentRays,
    seg2: SegmentRays,
    model: RcsModel,
    target_pose: Pose,
    cfg: ConcatConfig,
    f_hz: float,
    rng: np.random.Generator,
    sigma_s_linear: float = 1.0,
    spst_idx: int = 0,
    d1: float = 0.0,
    d2: float = 0.0,
    target_velocity=(0.0, 0.0, 0.0),
    link_id: str = "",
    prune_threshold_db: float | None = None,
) -> PathSet:
    """Pair two segments' rays through one scattering point into a PathSet.

    Amplitudes are the small-scale weights sqrt(P1 * P2 / norm) *
    sqrt(sigma(out, in)); segment path losses and the aperture constant
    are applied later, at the large-scale application stage.  sigma_s is
    the link/SPST/drop-frozen fluctuation draw.

    prune_threshold_db discards pairs below the strongest pair early,
    before the polarization chain is built; pruning against the local
    maximum never removes a path the global weak-path drop would keep.
    """
    i1, i2 = _pair_indices(seg1, seg2, cfg.mode)

    # Target-local incident (toward Tx side) and scattered (toward Rx side)
    # directions at the SPST.
    inc_theta = seg1.arr_theta[i1]
    inc_phi = wrap_azimuth(seg1.arr_phi[i1] - target_pose.heading)
    sca_theta = seg2.dep_theta[i2]
    sca_phi = wrap_azimuth(seg2.dep_phi[i2] - target_pose.heading)

    if cfg.angle_pair_filter and model.angle_dependent:
        from .geometry import angles_from_unit_vector
        from .rcs import _face_index

        mid = unit_vector_from_angles(inc_theta, inc_phi) + unit_vector_from_angles(sca_theta, sca_phi)
        nrm = np.linalg.norm(mid, axis=-1, keepdims=True)
        mid = np.where(nrm > 1e-9, mid / np.where(nrm > 0, nrm, 1.0), np.array([1.0, 0.0, 0.0]))
        bt, bp = angles_from_unit_vector(mid)
        f_b = _face_index(model, bt, bp)
        keep = (_face_index(model, inc_theta, inc_phi) == f_b) | (_face_index(model, sca_theta, sca_phi) == f_b)
        i1, i2 = i1[keep], i2[keep]
        inc_theta, inc_phi = inc_theta[keep], inc_phi[keep]
        sca_theta, sca_phi = sca_theta[keep], sca_phi[keep]

    sigma_md_db = sigma_md_bistatic_db_arrays(model, inc_theta, inc_phi, sca_theta, sca_phi)
    sigma_lin = 10.0 ** (sigma_md_db / 10.0) * sigma_s_linear

    norm = _norm_factor(seg1, seg2, i1, i2, cfg.normalization)
    power = seg1.power[i1] * seg2.power[i2] / norm * sigma_lin
    if prune_threshold_db is not None and len(power):
        keep = power >= power.max() * 10.0 ** (-prune_threshold_db / 10.0)
        i1, i2, power = i1[keep], i2[keep], power[keep]
        inc_theta, inc_phi = inc_theta[keep], inc_phi[keep]
        sca_theta, sca_phi = sca_theta[keep], sca_phi[keep]

    n_paths = len(i1)
    amp = np.sqrt(power)
    delay = seg1.delay[i1] + seg2.delay[i2]

    kappa = 10.0 ** (rng.normal(model.xpr_mu_db, model.xpr_sigma_db, size=n_paths) / 10.0)
    cpm_phases = np.pi - 2.0 * np.pi * rng.random(size=(n_paths, 4))
    cpm = cpm_matrix(kappa, cpm_phases)
    pol = seg2.pol[i2] @ cpm @ seg1.pol[i1]

    both_los = seg1.is_los[i1] & seg2.is_los[i2]
    phase = np.where(both_los, (-(2.0 * math.pi * f_hz) * delay) % (2.0 * math.pi), 0.0)

    v = np.broadcast_to(np.asarray(target_velocity, dtype=float), (n_paths, 3)).copy()
    return PathSet(
        delay=delay,
        amp=amp,
        phase=phase,
        pol=pol,
        aod=seg1.dep_phi[i1].copy(),
        zod=seg1.dep_theta[i1].copy(),
        aoa=seg2.arr_phi[i2].copy(),
        zoa=seg2.arr_theta[i2].copy(),
        inc_theta=inc_theta,
        inc_phi=inc_phi,
        sca_theta=sca_theta,
        sca_phi=sca_phi,
        seg1_dist=np.full(n_paths, float(d1)),
        seg2_dist=np.full(n_paths, float(d2)),
        spst_idx=np.full(n_paths, spst_idx, dtype=int),
        ray1_idx=np.asarray(i1, dtype=int),
        ray2_idx=np.asarray(i2, dtype=int),
        r_tx=unit_vector_from_angles(seg1.dep_theta[i1], seg1.dep_phi[i1]),
        r_rx=unit_vector_from_angles(seg2.arr_theta[i2], seg2.arr_phi[i2]),
        r_sp_tx=unit_vector_from_angles(seg1.arr_theta[i1], seg1.arr_phi[i1]),
        r_sp_rx=unit_vector_from_angles(seg2.dep_theta[i2], seg2.dep_phi[i2]),
        v_anchor=v,
        alpha_tx=np.zeros(n_paths),
        alpha_rx=np.zeros(n_paths),
        d_tx=np.zeros(n_paths),
        d_rx=np.zeros(n_paths),
        micro_group=np.full(n_paths, -1, dtype=int),
        micro_groups=[],
        link_id=link_id,
        kind="target",
    )


def drop_weak_paths(ps: PathSet, threshold_db: float) -> PathSet:
    """Remove paths more than threshold_db below the strongest one."""
    if len(ps) == 0:
        raise EmptyPathSet("cannot threshold an empty path set")
    keep = ps.power >= ps.power.max() * 10.0 ** (-threshold_db / 10.0)
    return ps.select(keep)


def build_target_channel(
    link_id: str,
    tx_pos: np.ndarray,
    rx_pos: np.ndarray,
    target_pose: Pose,
    target_velocity,
    model: RcsModel,
    spsts: list[Spst],
    los_states: list[LosState],
    lsp_los: LspSet,
    lsp_nlos: LspSet,
    cfg: ConcatConfig,
    f_hz: float,
    rng_factory,
    micro_motions: tuple[MicroMotion, ...] = (),
    suppress_clusters: bool = False,
) -> PathSet:
    """Assemble the full target channel of a link: union over the target's SPSTs.

    rng_factory(spst_idx, name) must return independent generators for
    "seg1", "seg2", "cpm", and "sigma_s"; the sigma_s draw is held fixed
    for the (link, SPST) over the drop.  Each segment contributes its
    cluster rays (per its own LoS-state LSPs) plus, under LoS, the
    deterministic direct ray with the K-factor power share; the direct
    Tx-target-Rx path therefore exists iff both segments are LoS.
    suppress_clusters keeps only the geometric rays (for direct-path
    studies).
    """
    parts: list[PathSet] = []
    for k, (spst, los) in enumerate(zip(spsts, los_states)):
        anchor = spst.global_position(target_pose)
        dp = direct_path(tx_pos, anchor, rx_pos, f_hz)

        def segment(which: str, seg_los: bool, dep_center, arr_center):
            lsp = lsp_los if seg_los else lsp_nlos
            cs = generate_clusters(lsp, rng_factory(k, which), dep_center, arr_center)
            geo = (dp.d1 if which == "seg1" else dp.d2) / SPEED_OF_LIGHT
            seg = flatten_segment(cs, geo, seg_los, lsp.k_linear,
                                  los_delay=geo, los_dep=dep_center, los_arr=arr_center)
            if suppress_clusters:
                seg = _mask_segment(seg, seg.is_los)
            return seg

        seg1 = segment("seg1", los.tx_target, dp.aod, dp.anchor_from_tx)
        seg2 = segment("seg2", los.target_rx, dp.anchor_to_rx, dp.aoa)
        sigma_s = sample_sigma_s(rng_factory(k, "sigma_s"), model.sigma_s_std_db)
        ps = concatenate(
            seg1, seg2, model, target_pose, cfg, f_hz, rng_factory(k, "cpm"),
            sigma_s_linear=float(sigma_s), spst_idx=k, d1=dp.d1, d2=dp.d2,
            target_velocity=target_velocity, link_id=link_id,
            prune_threshold_db=cfg.drop_threshold_db,
        )
        parts.append(ps)

    out = PathSet.concatenate(parts, link_id=link_id, kind="target")
    if micro_motions:
        out.micro_groups = [tuple(micro_motions)]
        out.micro_group = np.zeros(len(out), dtype=int)
    if len(out) == 0:
        return out
    return drop_weak_paths(out, cfg.drop_threshold_db)


def multi_target_superpose(per_target: list[PathSet], link_id: str | None = None) -> PathSet:
    """Union of independently built per-target path sets.

    No inter-target hops or blockage: the channels superpose with powers
    unchanged.
    """
    if not per_target:
        return empty_path_set(link_id=link_id or "", kind="target")
    return PathSet.concatenate(per_target, link_id=link_id)
