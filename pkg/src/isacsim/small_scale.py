"""Cluster/ray generation for one link segment, plus deterministic direct-path
parameters.

This is the reusable engine behind both the target channel segments and the
background channels: exponential random delays, exponentially decaying
powers with per-cluster shadowing, inverse-mapped cluster angles around the
segment's geometric direction, a fixed 20-ray intra-cluster offset basis,
random ray coupling, per-ray cross-polarization and initial phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry
from .geometry import (
    SPEED_OF_LIGHT,
    SphericalAngle,
    direction_between,
    wrap_azimuth,
)

# Intra-cluster ray offset basis (scaled by the per-cluster angle spread).
RAY_OFFSETS = np.array(
    [0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715, -0.3715,
     0.5129, -0.5129, 0.6797, -0.6797, 0.8844, -0.8844, 1.1481, -1.1481,
     1.5195, -1.5195, 2.1551, -2.1551]
)

# Azimuth / zenith normalization constants of the inverse-Gaussian angle
# mapping, keyed by cluster count.
C_PHI = {4: 0.779, 5: 0.860, 8: 1.018, 10: 1.090, 11: 1.123, 12: 1.146,
         14: 1.190, 15: 1.211, 16: 1.226, 19: 1.273, 20: 1.289, 25: 1.358}
C_THETA = {8: 0.889, 10: 0.957, 11: 1.031, 12: 1.104, 15: 1.1088,
           19: 1.184, 20: 1.178, 25: 1.282}


def _nearest(table: dict[int, float], n: int) -> float:
    key = min(table, key=lambda k: abs(k - n))
    return table[key]


@dataclass(frozen=True)
class LspSet:
    """Large-scale parameters driving one segment's small-scale generation."""

    ds: float  # delay spread [s]
    asd: float  # azimuth spread of departure [deg]
    asa: float
    zsd: float
    zsa: float
    k_db: float = -math.inf  # Ricean K-factor; only applied under LoS
    sf_std_db: float = 4.0
    n_clusters: int = 12
    m_rays: int = 20
    r_tau: float = 2.5
    zeta_db: float = 3.0  # per-cluster shadowing std
    c_asd: float = 5.0  # intra-cluster spreads [deg]
    c_asa: float = 11.0
    c_zsd: float = 3.0
    c_zsa: float = 7.0
    xpr_mu_db: float = 8.0
    xpr_sigma_db: float = 4.0

    def __post_init__(self):
        if self.ds <= 0 or min(self.asd, self.asa, self.zsd, self.zsa) <= 0:
            raise ValueError("delay and angle spreads must be positive")
        if self.n_clusters < 1 or not (1 <= self.m_rays <= len(RAY_OFFSETS)):
            raise ValueError(f"need n_clusters >= 1 and 1 <= m_rays <= {len(RAY_OFFSETS)}")

    @property
    def k_linear(self) -> float:
        return 10.0 ** (self.k_db / 10.0)


@dataclass
class ClusterSet:
    """Delays, powers, angles, polarization draws of one segment realization.

    Shapes: tau/power are (N,), cluster center angles (N,), per-ray arrays
    (N, M), phases (N, M, 4) ordered [tt, tp, pt, pp].  Delays are relative
    (sorted, tau[0] = 0); powers are normalized to sum 1.
    """

    tau: np.ndarray
    power: np.ndarray
    caod: np.ndarray
    czod: np.ndarray
    caoa: np.ndarray
    czoa: np.ndarray
    aod: np.ndarray
    zod: np.ndarray
    aoa: np.ndarray
    zoa: np.ndarray
    kappa: np.ndarray
    phases: np.ndarray
    tx_pos: np.ndarray | None = None
    rx_pos: np.ndarray | None = None

    @property
    def n_clusters(self) -> int:
        return self.tau.shape[0]

    @property
    def m_rays(self) -> int:
        return self.aod.shape[1]

    def delay_spread(self) -> float:
        """Power-weighted RMS delay spread of the realization [s]."""
        w = self.power / self.power.sum()
        mean = float(np.sum(w * self.tau))
        return float(math.sqrt(max(np.sum(w * self.tau**2) - mean**2, 0.0)))


@dataclass(frozen=True)
class DirectPath:
    """Deterministic parameters of the two-segment direct path."""

    delay: float
    aod: SphericalAngle  # departure at Tx, toward the anchor
    zod: float
    aoa: SphericalAngle  # arrival at Rx, pointing toward the anchor
    zoa: float
    anchor_from_tx: SphericalAngle  # at the anchor, pointing back toward Tx
    anchor_to_rx: SphericalAngle  # at the anchor, pointing toward Rx
    d1: float
    d2: float
    phase: float = 0.0


def direct_path(tx: np.ndarray, anchor: np.ndarray, rx: np.ndarray, f_hz: float | None = None) -> DirectPath:
    """Geometry of the Tx-anchor-Rx direct path (delay = (d1 + d2)/c).

    The optional carrier frequency fixes the deterministic phase
    -2*pi*f*tau (wrapped); otherwise phase is 0.
    """
    tx = np.asarray(tx, dtype=float)
    anchor = np.asarray(anchor, dtype=float)
    rx = np.asarray(rx, dtype=float)
    d1 = float(np.linalg.norm(anchor - tx))
    d2 = float(np.linalg.norm(rx - anchor))
    if d1 == 0.0 or d2 == 0.0:
        raise DegenerateGeometry("direct path needs distinct tx/anchor/rx positions")
    delay = (d1 + d2) / SPEED_OF_LIGHT
    dep = direction_between(tx, anchor)
    arr = direction_between(rx, anchor)
    phase = 0.0
    if f_hz is not None:
        phase = float(-(2.0 * math.pi * f_hz * delay) % (2.0 * math.pi))
    return DirectPath(
        delay=delay,
        aod=dep,
        zod=dep.theta,
        aoa=arr,
        zoa=arr.theta,
        anchor_from_tx=direction_between(anchor, tx),
        anchor_to_rx=direction_between(anchor, rx),
        d1=d1,
        d2=d2,
        phase=phase,
    )


def mobility_phase(d1_m: float, d2_m: float, dtheta1_rad: float, dtheta2_rad: float, lam_m: float) -> float:
    """Phase shift [rad] of the direct path caused by node/target displacement."""
    if lam_m <= 0:
        raise ValueError("wavelength must be positive")
    return (2.0 * math.pi / lam_m) * (d1_m * math.cos(dtheta1_rad) + d2_m * math.cos(dtheta2_rad))


def _cluster_azimuths(rng, power, spread_deg, n, center_deg, c_norm):
    ratio = np.sqrt(-np.log(power / power.max()))
    prime = 2.0 * (spread_deg / 1.4) * ratio / c_norm
    signs = rng.integers(0, 2, size=n) * 2 - 1
    jitter = rng.normal(0.0, spread_deg / 7.0, size=n)
    return signs * prime + jitter + center_deg


def _cluster_zeniths(rng, power, spread_deg, n, center_deg, c_norm):
    prime = -spread_deg * np.log(power / power.max()) / c_norm
    signs = rng.integers(0, 2, size=n) * 2 - 1
    jitter = rng.normal(0.0, spread_deg / 7.0, size=n)
    return signs * prime + jitter + center_deg


def _fold_zenith(theta):
    t = np.asarray(theta, dtype=float) % 360.0
    return np.where(t > 180.0, 360.0 - t, t)


def generate_clusters(
    lsp: LspSet,
    rng: np.random.Generator,
    dep_center: SphericalAngle = SphericalAngle(90.0, 0.0),
    arr_center: SphericalAngle = SphericalAngle(90.0, 0.0),
    tx_pos: np.ndarray | None = None,
    rx_pos: np.ndarray | None = None,
) -> ClusterSet:
    """Draw one segment realization around the given geometric directions."""
    n, m = lsp.n_clusters, lsp.m_rays
    u = rng.random(n)
    tau = -lsp.r_tau * lsp.ds * np.log1p(-u)
    tau = np.sort(tau) - tau.min()
    zeta = rng.normal(0.0, lsp.zeta_db, size=n)
    power = np.exp(-tau * (lsp.r_tau - 1.0) / (lsp.r_tau * lsp.ds)) * 10.0 ** (-zeta / 10.0)
    power = power / power.sum()

    c_phi = _nearest(C_PHI, n)
    c_theta = _nearest(C_THETA, n)
    caod = _cluster_azimuths(rng, power, lsp.asd, n, dep_center.phi, c_phi)
    caoa = _cluster_azimuths(rng, power, lsp.asa, n, arr_center.phi, c_phi)
    czod = _cluster_zeniths(rng, power, lsp.zsd, n, dep_center.theta, c_theta)
    czoa = _cluster_zeniths(rng, power, lsp.zsa, n, arr_center.theta, c_theta)

    offs = RAY_OFFSETS[:m]
    aod = caod[:, None] + lsp.c_asd * offs[None, :]
    aoa = caoa[:, None] + lsp.c_asa * offs[None, :]
    zod = czod[:, None] + lsp.c_zsd * offs[None, :]
    zoa = czoa[:, None] + lsp.c_zsa * offs[None, :]
    # Random coupling: permute the arrival / departure-zenith ray orderings
    # independently within each cluster.
    for row in range(n):
        aoa[row] = aoa[row, rng.permutation(m)]
        zoa[row] = zoa[row, rng.permutation(m)]
        zod[row] = zod[row, rng.permutation(m)]

    aod = wrap_azimuth(aod)
    aoa = wrap_azimuth(aoa)
    zod = _fold_zenith(zod)
    zoa = _fold_zenith(zoa)

    kappa = 10.0 ** (rng.normal(lsp.xpr_mu_db, lsp.xpr_sigma_db, size=(n, m)) / 10.0)
    phases = np.pi - 2.0 * np.pi * rng.random(size=(n, m, 4))

    return ClusterSet(
        tau=tau,
        power=power,
        caod=wrap_azimuth(caod),
        czod=_fold_zenith(czod),
        caoa=wrap_azimuth(caoa),
        czoa=_fold_zenith(czoa),
        aod=aod,
        zod=zod,
        aoa=aoa,
        zoa=zoa,
        kappa=kappa,
        phases=phases,
        tx_pos=None if tx_pos is None else np.asarray(tx_pos, dtype=float),
        rx_pos=None if rx_pos is None else np.asarray(rx_pos, dtype=float),
    )


@dataclass
class SegmentRays:
    """A segment's rays flattened for concatenation, possibly with a LoS ray.

    Powers are absolute within the segment: under LoS the direct ray takes
    K/(K+1) of the segment total and the clusters share 1/(K+1); delays are
    geometric-plus-relative.  pol holds per-ray 2x2 polarization matrices
    (cross-polarization magnitudes and initial phases; the LoS ray gets
    diag(1, -1)).
    """

    delay: np.ndarray  # (R,)
    power: np.ndarray
    dep_theta: np.ndarray
    dep_phi: np.ndarray
    arr_theta: np.ndarray
    arr_phi: np.ndarray
    pol: np.ndarray  # (R, 2, 2) complex
    is_los: np.ndarray  # (R,) bool
    cluster_idx: np.ndarray  # (R,) 1-based cluster index, 0 for the LoS ray
    n_clusters: int


def flatten_segment(
    cs: ClusterSet,
    geometric_delay: float,
    los: bool,
    k_linear: float,
    los_delay: float | None = None,
    los_dep: SphericalAngle | None = None,
    los_arr: SphericalAngle | None = None,
) -> SegmentRays:
    """Flatten a ClusterSet into rays, applying the K-factor power split under LoS."""
    from .rcs import cpm_matrix  # per-ray matrices share the CPM entry structure

    n, m = cs.n_clusters, cs.m_rays
    ray_power = np.repeat(cs.power / m, m)
    delay = geometric_delay + np.repeat(cs.tau, m)
    dep_t, dep_p = cs.zod.ravel(), cs.aod.ravel()
    arr_t, arr_p = cs.zoa.ravel(), cs.aoa.ravel()
    pol = cpm_matrix(cs.kappa.ravel(), cs.phases.reshape(-1, 4))
    cluster_idx = np.repeat(np.arange(1, n + 1), m)
    is_los = np.zeros(n * m, dtype=bool)

    if los:
        if math.isinf(k_linear):  # all power in the direct ray
            scale, los_power = 0.0, 1.0
        else:
            scale = 1.0 / (k_linear + 1.0)
            los_power = k_linear * scale
        ray_power = ray_power * scale
        los_pol = np.array([[1.0 + 0j, 0.0], [0.0, -1.0 + 0j]])
        delay = np.concatenate([[geometric_delay if los_delay is None else los_delay], delay])
        ray_power = np.concatenate([[los_power], ray_power])
        dep_t = np.concatenate([[90.0 if los_dep is None else los_dep.theta], dep_t])
        dep_p = np.concatenate([[0.0 if los_dep is None else los_dep.phi], dep_p])
        arr_t = np.concatenate([[90.0 if los_arr is None else los_arr.theta], arr_t])
        arr_p = np.concatenate([[0.0 if los_arr is None else los_arr.phi], arr_p])
        pol = np.concatenate([los_pol[None], pol])
        cluster_idx = np.concatenate([[0], cluster_idx])
        is_los = np.concatenate([[True], is_los])

    return SegmentRays(
        delay=delay,
        power=ray_power,
        dep_theta=dep_t,
        dep_phi=dep_p,
        arr_theta=arr_t,
        arr_phi=arr_p,
        pol=pol,
        is_los=is_los,
        cluster_idx=cluster_idx,
        n_clusters=n,
    )
