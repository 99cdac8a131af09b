"""Target-unrelated channel components.

Bistatic background links reuse the plain cluster engine between Tx and Rx
with absolute delays.  Monostatic background channels are synthesized as
the superposition of sub-channels from the sensor to 3 reference points
whose shared horizontal distance and height follow shifted Gamma
distributions, with evenly spaced azimuths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SPEED_OF_LIGHT, Pose, direction_between, unit_vector_from_angles
from .paths import PathSet
from .small_scale import LspSet, SegmentRays, flatten_segment, generate_clusters


@dataclass(frozen=True)
class MrpParams:
    """Shifted-Gamma placement parameters of the monostatic reference points.

    beta_* are RATE parameters: the mean distance is alpha_d / beta_d + c_d.
    """

    alpha_d: float
    beta_d: float
    c_d: float
    alpha_h: float
    beta_h: float
    c_h: float

    def __post_init__(self):
        if min(self.alpha_d, self.beta_d, self.alpha_h, self.beta_h) <= 0:
            raise ValueError("Gamma shape/rate parameters must be positive")

    @property
    def mean_distance(self) -> float:
        return self.alpha_d / self.beta_d + self.c_d

    @property
    def mean_height(self) -> float:
        return self.alpha_h / self.beta_h + self.c_h


# Published urban-micro rows; other scenarios fall back to these until a
# deployment supplies its own (config section [mrp]).
UMI_TRP_MRP = MrpParams(6.1996, 0.1558, 15.2697, 12.0487, 2.3261, 0.0157)
UMI_UT_MRP = MrpParams(10.0220, 1.2522, 11.0040, 3.0487, 1.9128, 0.1785)


def umi_uav_mrp(aerial_height_m: float) -> MrpParams:
    """Aerial-node row: parameters are functions of the node height h [m]."""
    h = float(aerial_height_m)
    return MrpParams(
        alpha_d=0.0156 * h + 5.5399,
        beta_d=40.4517 / (h + 254.6318),
        c_d=0.0140 * h + 15.1184,
        alpha_h=0.0123 * h + 11.9569,
        beta_h=17.8047 / (h - 0.2202),
        c_h=0.0532 * h - 0.0120,
    )


def default_mrp(node_kind: str, aerial_height_m: float | None = None) -> MrpParams:
    """Built-in row for a sensing node: TRP, ground UT, or aerial UT (>10 m)."""
    if node_kind == "trp":
        return UMI_TRP_MRP
    if aerial_height_m is not None and aerial_height_m > 10.0:
        return umi_uav_mrp(aerial_height_m)
    return UMI_UT_MRP


@dataclass(frozen=True)
class ReferencePoint:
    """A virtual receiver anchoring one monostatic background sub-channel."""

    position: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))


def sample_mrp_values(params: MrpParams, rng: np.random.Generator, size=None):
    """Raw shifted-Gamma draws (distance, height); vectorized for statistics checks."""
    d = rng.gamma(params.alpha_d, 1.0 / params.beta_d, size=size) + params.c_d
    h = rng.gamma(params.alpha_h, 1.0 / params.beta_h, size=size) + params.c_h
    return d, h


def sample_reference_points(
    params: MrpParams, rng: np.random.Generator, node: Pose, n: int = 3
) -> list[ReferencePoint]:
    """Place n reference points around a monostatic node.

    One distance draw and one height draw are shared by all points (equal
    distances); azimuths are evenly spaced from a random start.
    """
    d, h = sample_mrp_values(params, rng)
    theta0 = rng.uniform(0.0, 360.0)
    out = []
    for k in range(n):
        az = math.radians(theta0 + 360.0 * k / n)
        pos = np.array(
            [node.position[0] + d * math.cos(az), node.position[1] + d * math.sin(az), h]
        )
        out.append(ReferencePoint(pos))
    return out


def _segment_to_pathset(
    seg: SegmentRays, effective_dist: float, link_id: str, weight: float = 1.0
) -> PathSet:
    n = len(seg.delay)
    z3 = np.zeros((n, 3))
    return PathSet(
        delay=seg.delay.copy(),
        amp=weight * np.sqrt(seg.power),
        phase=np.zeros(n),
        pol=seg.pol.copy(),
        aod=seg.dep_phi.copy(),
        zod=seg.dep_theta.copy(),
        aoa=seg.arr_phi.copy(),
        zoa=seg.arr_theta.copy(),
        inc_theta=np.full(n, np.nan),
        inc_phi=np.full(n, np.nan),
        sca_theta=np.full(n, np.nan),
        sca_phi=np.full(n, np.nan),
        seg1_dist=np.full(n, float(effective_dist)),
        seg2_dist=np.zeros(n),
        spst_idx=np.full(n, -1, dtype=int),
        ray1_idx=np.arange(n),
        ray2_idx=np.full(n, -1, dtype=int),
        r_tx=unit_vector_from_angles(seg.dep_theta, seg.dep_phi),
        r_rx=unit_vector_from_angles(seg.arr_theta, seg.arr_phi),
        r_sp_tx=z3,
        r_sp_rx=z3.copy(),
        v_anchor=z3.copy(),
        alpha_tx=np.zeros(n),
        alpha_rx=np.zeros(n),
        d_tx=np.zeros(n),
        d_rx=np.zeros(n),
        micro_group=np.full(n, -1, dtype=int),
        micro_groups=[],
        link_id=link_id,
        kind="background",
    )


def monostatic_background(
    node: Pose,
    params: MrpParams,
    lsp: LspSet,
    rng: np.random.Generator,
    n_rp: int = 3,
    round_trip: bool = True,
    link_id: str = "",
) -> PathSet:
    """Echo clutter of a co-located sensor as 3 superposed RP sub-channels.

    Each sub-channel is a cluster realization anchored on the node-to-RP
    direction; delays and the stored large-scale distance use the two-way
    distance by default (the echo traverses node - clutter region - node),
    switchable to one-way.  Sub-channels get equal 1/sqrt(n) amplitude
    weights.  Different nodes (and different RPs of one node) are
    deliberately independent: no spatial consistency applies here.
    """
    rps = sample_reference_points(params, rng, node, n=n_rp)
    parts = []
    w = 1.0 / math.sqrt(n_rp)
    for rp in rps:
        d3 = float(np.linalg.norm(rp.position - node.position))
        d_eff = 2.0 * d3 if round_trip else d3
        toward = direction_between(node.position, rp.position)
        cs = generate_clusters(lsp, rng, dep_center=toward, arr_center=toward)
        seg = flatten_segment(cs, d_eff / SPEED_OF_LIGHT, los=False, k_linear=lsp.k_linear)
        parts.append(_segment_to_pathset(seg, d_eff, link_id, weight=w))
    return PathSet.concatenate(parts, link_id=link_id, kind="background")


def bistatic_background(
    tx_pos: np.ndarray,
    rx_pos: np.ndarray,
    lsp: LspSet,
    rng: np.random.Generator,
    los: bool,
    link_id: str = "",
) -> PathSet:
    """Plain Tx-Rx cluster channel with absolute delays.

    The relative cluster delays are offset by the geometric LoS delay so
    first arrivals are causal; under LoS the deterministic direct ray sits
    at exactly |tx - rx| / c with the K-factor power share.
    """
    tx_pos = np.asarray(tx_pos, dtype=float)
    rx_pos = np.asarray(rx_pos, dtype=float)
    d = float(np.linalg.norm(rx_pos - tx_pos))
    dep = direction_between(tx_pos, rx_pos)
    arr = direction_between(rx_pos, tx_pos)
    cs = generate_clusters(lsp, rng, dep_center=dep, arr_center=arr, tx_pos=tx_pos, rx_pos=rx_pos)
    seg = flatten_segment(
        cs, d / SPEED_OF_LIGHT, los=los, k_linear=lsp.k_linear,
        los_delay=d / SPEED_OF_LIGHT, los_dep=dep, los_arr=arr,
    )
    return _segment_to_pathset(seg, d, link_id)
