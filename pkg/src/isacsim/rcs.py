"""Scattering-point layout, RCS evaluation, and polarization of sensing targets.

A target's RCS factors into a deterministic mean component, an angular
pattern, and a log-normal fluctuation (sigma = sigma_M * sigma_D * sigma_S).
Small targets (small UAV, human model 1) are angle-independent; large ones
(large UAV, human model 2, vehicle, AGV) use per-face antenna-like patterns.
Bistatic geometry applies a separation-angle correction on top of the
monostatic pattern evaluated at the bisector of the incident and scattered
rays.

All pattern angles are target-local: callers rotate global rays into the
target frame (geometry.gcs_to_lcs) before lookup.  Both the incident and
scattered directions point *away from* the scattering point, so the
monostatic case is incident == scattered and forward scattering is
beta = 180.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoFaceCovers
from .geometry import Pose, SphericalAngle, wrap_azimuth

LN10 = math.log(10.0)

TARGET_TYPES = ("uav_small", "uav_large", "human_m1", "human_m2", "vehicle", "agv")

# Bistatic pattern-correction coefficients per target type (Rel-19 agreed values).
K1_K2 = {
    "uav_large": (6.05, 1.33),
    "human_m2": (0.5714, 0.1),
    "vehicle": (6.0, 1.65),
    "agv": (12.0, 1.45),
}

# Cross-polarization ratio statistics (mu_dB, sigma_dB) per target family.
XPR_STATS = {
    "uav_small": (13.75, 7.07),
    "uav_large": (13.75, 7.07),
    "human_m1": (19.81, 4.25),
    "human_m2": (19.81, 4.25),
    "vehicle": (21.12, 6.88),
    "agv": (9.6, 6.85),
}


@dataclass(frozen=True)
class FaceParams:
    """One face of an angle-dependent scattering pattern.

    Azimuth ranges are stored in [0, 360) and may wrap (the front face
    covers [315, 360) + [0, 45)).  phi_center is None for the roof and
    bottom faces, which have no azimuth dependence.
    """

    face_id: str
    theta_center: float
    theta_3db: float
    g_max_dbsm: float
    sigma_max_db: float
    theta_range: tuple[float, float]  # [lo, hi); hi = 180 is inclusive
    phi_range: tuple[float, float]  # [lo, hi) in [0, 360); lo > hi wraps
    phi_center: float | None = None
    phi_3db: float | None = None

    def contains(self, theta_deg, phi_deg) -> np.ndarray:
        t = np.asarray(theta_deg, dtype=float)
        p = np.asarray(phi_deg, dtype=float) % 360.0
        tlo, thi = self.theta_range
        in_t = (t >= tlo) & ((t < thi) | ((thi >= 180.0) & (t <= 180.0)))
        plo, phi_hi = self.phi_range
        if plo <= phi_hi:
            in_p = (p >= plo) & ((p < phi_hi) | (phi_hi >= 360.0))
        else:  # wrapped interval
            in_p = (p >= plo) | (p < phi_hi)
        return in_t & in_p


# Face table of the large-UAV reference pattern (dBsm / degrees).
UAV_LARGE_FACES = (
    FaceParams("left", 90.0, 8.68, 7.43, 14.30, (45.0, 135.0), (45.0, 135.0), 90.0, 7.13),
    FaceParams("back", 90.0, 11.43, 3.99, 10.86, (45.0, 135.0), (135.0, 225.0), 180.0, 10.09),
    FaceParams("right", 90.0, 8.68, 7.43, 14.30, (45.0, 135.0), (225.0, 315.0), 270.0, 7.13),
    FaceParams("front", 90.0, 16.53, 1.02, 7.89, (45.0, 135.0), (315.0, 45.0), 0.0, 14.19),
    FaceParams("bottom", 180.0, 4.93, 13.55, 20.42, (135.0, 180.0), (0.0, 360.0)),
    FaceParams("roof", 0.0, 4.93, 13.55, 20.42, (0.0, 45.0), (0.0, 360.0)),
)


@dataclass(frozen=True)
class RcsModel:
    """Per-target-type scattering description."""

    target_type: str
    mode: str = "single_spst"  # single_spst | multi_spst
    sigma_m_db: float = 0.0  # mean RCS [dBsm]; the pattern tables absorb it when angle-dependent
    sigma_s_std_db: float = 0.0
    angle_dependent: bool = False
    faces: tuple[FaceParams, ...] = ()
    k1: float = 0.0
    k2: float = 0.0
    xpr_mu_db: float = 0.0
    xpr_sigma_db: float = 0.0
    component_a_db: float = 0.0  # large-scale RCS term of the coupling-loss metric
    sigma_fs_db: float = -math.inf  # forward-scattering floor; -inf disables it

    def __post_init__(self):
        if self.mode == "multi_spst" and self.target_type not in ("vehicle", "agv"):
            raise ValueError(f"multi_spst layout is only defined for vehicle/agv, got {self.target_type}")
        if not self.angle_dependent and self.faces:
            raise ValueError("angle-independent models must not carry face tables")


def default_rcs_model(target_type: str, mode: str = "single_spst") -> RcsModel:
    """Built-in model for a target type.

    Angle-independent values and the large-UAV face table carry the
    published Rel-19 numbers.  Face tables for vehicle/AGV/human model 2
    were not published, so those types reuse the large-UAV pattern as a
    stand-in reference; override per deployment via the scenario config.
    The fluctuation std is likewise published only for the two
    angle-independent types and defaults to 0 elsewhere.
    """
    if target_type not in TARGET_TYPES:
        raise ValueError(f"unknown target type {target_type!r}")
    if mode == "multi_spst" and target_type not in ("vehicle", "agv"):
        raise ValueError(f"multi_spst layout is only defined for vehicle/agv, got {target_type}")
    xpr = XPR_STATS[target_type]
    if target_type == "uav_small":
        return RcsModel("uav_small", "single_spst", sigma_m_db=-12.81, sigma_s_std_db=3.74,
                        xpr_mu_db=xpr[0], xpr_sigma_db=xpr[1], component_a_db=-12.81)
    if target_type == "human_m1":
        return RcsModel("human_m1", "single_spst", sigma_m_db=-1.37, sigma_s_std_db=3.94,
                        xpr_mu_db=xpr[0], xpr_sigma_db=xpr[1], component_a_db=-1.37)
    k1, k2 = K1_K2[target_type]
    front_g = next(f.g_max_dbsm for f in UAV_LARGE_FACES if f.face_id == "front")
    return RcsModel(target_type, mode, angle_dependent=True, faces=UAV_LARGE_FACES,
                    k1=k1, k2=k2, xpr_mu_db=xpr[0], xpr_sigma_db=xpr[1],
                    component_a_db=front_g)


@dataclass(frozen=True)
class Spst:
    """A scattering point of a target, at `offset` in the target local frame."""

    offset: np.ndarray
    face_id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "offset", np.asarray(self.offset, dtype=float))

    def global_position(self, pose: Pose) -> np.ndarray:
        h = math.radians(pose.heading)
        c, s = math.cos(h), math.sin(h)
        off = self.offset
        rotated = np.array([c * off[0] - s * off[1], s * off[0] + c * off[1], off[2]])
        return pose.position + rotated


def spst_layout(model: RcsModel, target_size=(0.0, 0.0, 0.0)) -> list[Spst]:
    """Scattering points of a target: the centroid, or 5 bounding-box face centers.

    target_size is (length, width, height) of the local-frame bounding box,
    centered on the target position; the front face is +x, left is +y.
    """
    if model.mode != "multi_spst":
        return [Spst(np.zeros(3))]
    length, width, height = (float(v) for v in target_size)
    return [
        Spst(np.array([length / 2.0, 0.0, 0.0]), "front"),
        Spst(np.array([0.0, width / 2.0, 0.0]), "left"),
        Spst(np.array([-length / 2.0, 0.0, 0.0]), "back"),
        Spst(np.array([0.0, -width / 2.0, 0.0]), "right"),
        Spst(np.array([0.0, 0.0, height / 2.0]), "roof"),
    ]


def _face_index(model: RcsModel, theta, phi) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    masks = [f.contains(theta, phi) for f in model.faces]
    idx = np.full(theta.shape, -1, dtype=int)
    for i, m in enumerate(masks):
        idx = np.where((idx < 0) & m, i, idx)
    if np.any(idx < 0):
        bad = np.argwhere(idx < 0)
        raise NoFaceCovers(
            f"{model.target_type}: no face covers theta/phi at index {bad[0]} "
            "(face ranges must partition the sphere)"
        )
    return idx


def _pattern_db(model: RcsModel, theta, phi):
    """Face pattern value and per-angle floor (g_max - sigma_max), both dBsm."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    idx = _face_index(model, theta, phi)
    tc = np.array([f.theta_center for f in model.faces])[idx]
    t3 = np.array([f.theta_3db for f in model.faces])[idx]
    gmax = np.array([f.g_max_dbsm for f in model.faces])[idx]
    smax = np.array([f.sigma_max_db for f in model.faces])[idx]
    att_v = np.minimum(12.0 * ((theta - tc) / t3) ** 2, smax)
    pc = np.array([math.nan if f.phi_center is None else f.phi_center for f in model.faces])[idx]
    p3 = np.array([math.nan if f.phi_3db is None else f.phi_3db for f in model.faces])[idx]
    dphi = wrap_azimuth(phi - np.where(np.isnan(pc), 0.0, pc))
    att_h = np.where(np.isnan(pc), 0.0, np.minimum(12.0 * (dphi / np.where(np.isnan(p3), 1.0, p3)) ** 2, smax))
    return gmax - np.minimum(att_v + att_h, smax), gmax - smax


def sigma_md_mono_db(model: RcsModel, local_angle: SphericalAngle) -> float:
    """Monostatic mean-plus-pattern RCS [dBsm] at a target-local angle."""
    if not model.angle_dependent:
        return model.sigma_m_db
    val, _ = _pattern_db(model, local_angle.theta, local_angle.phi)
    return float(val)


def sigma_md_mono_db_arrays(model: RcsModel, theta, phi) -> np.ndarray:
    """Vectorized monostatic pattern over degree-angle arrays."""
    theta = np.asarray(theta, dtype=float)
    if not model.angle_dependent:
        return np.full(theta.shape, model.sigma_m_db)
    val, _ = _pattern_db(model, theta, phi)
    return val


def sigma_md_bistatic_db_arrays(model: RcsModel, ti, pi, ts, ps) -> np.ndarray:
    """Vectorized bistatic RCS [dBsm] for target-local incident/scattered angles.

    Angle-independent: 10lg(sigma_M) - 3 sin(beta/2), floored by the
    forward-scattering term.  Angle-dependent: the monostatic pattern at
    the bisector with the k1/k2 separation correction, floored by
    g_max - sigma_max of the active face and by forward scattering.
    """
    from .geometry import angles_from_unit_vector, unit_vector_from_angles

    ti = np.asarray(ti, dtype=float)
    u = unit_vector_from_angles(ti, pi)
    v = unit_vector_from_angles(ts, ps)
    cos_b = np.clip(np.einsum("...i,...i->...", u, v), -1.0, 1.0)
    beta = np.degrees(np.arccos(cos_b))
    # Exact monostatic reduction: coincident rays get beta = 0 bitwise, not
    # the ~1e-8 arccos round-off.
    same = (ti == np.asarray(ts)) & (np.asarray(pi) == np.asarray(ps))
    if np.any(same):
        beta = np.where(same, 0.0, beta)
    half = np.radians(beta / 2.0)
    if not model.angle_dependent:
        val = model.sigma_m_db - 3.0 * np.sin(half)
        return np.maximum(val, model.sigma_fs_db)
    s = u + v
    nrm = np.linalg.norm(s, axis=-1, keepdims=True)
    b = np.where(nrm > 1e-9, s / np.where(nrm > 0, nrm, 1.0), np.array([-1.0, 0.0, 0.0]))
    theta_b, phi_b = angles_from_unit_vector(b)
    if np.any(same):
        theta_b = np.where(same, ti, theta_b)
        phi_b = np.where(same, pi, phi_b)
    pattern, floor = _pattern_db(model, theta_b, phi_b)
    cos_half = np.cos(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        taper = np.where(cos_half > 0.0, 5.0 * np.log10(np.where(cos_half > 0.0, cos_half, 1.0)), -np.inf)
    main = pattern - model.k1 * np.sin(np.radians(model.k2 * beta / 2.0)) + taper
    return np.maximum(np.maximum(main, floor), model.sigma_fs_db)


def sigma_md_bistatic_db(model: RcsModel, incident: SphericalAngle, scattered: SphericalAngle) -> float:
    """Bistatic RCS [dBsm]; reduces exactly to the monostatic value at beta = 0."""
    if incident == scattered:
        return sigma_md_mono_db(model, incident)
    return float(
        sigma_md_bistatic_db_arrays(model, incident.theta, incident.phi, scattered.theta, scattered.phi)
    )


def sigma_s_mu_db(std_db: float) -> float:
    """Mean [dB] of the fluctuation term that makes E[sigma_S linear] = 1."""
    return -(LN10 / 20.0) * std_db**2


def sample_sigma_s(rng: np.random.Generator, std_db: float, size=None):
    """Log-normal fluctuation sample(s), linear power scale, unit mean."""
    if std_db < 0:
        raise ValueError("std_db must be >= 0")
    if std_db == 0.0:
        return 1.0 if size is None else np.ones(size)
    db = rng.normal(sigma_s_mu_db(std_db), std_db, size=size)
    return 10.0 ** (db / 10.0)


def sample_xpr(rng: np.random.Generator, model: RcsModel, size=None):
    """Cross-polarization ratio kappa (linear) drawn from the target's statistics."""
    db = rng.normal(model.xpr_mu_db, model.xpr_sigma_db, size=size)
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class Cpm:
    """2x2 cross-polarization matrix of a scattering point."""

    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))


def sample_cpm(rng: np.random.Generator, kappa: float) -> Cpm:
    """Polarization matrix with unit co-pol entries, kappa^-1/2 cross-pol, random phases."""
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    phases = sample_cpm_phases(rng, size=())
    return Cpm(cpm_matrix(np.asarray(kappa, dtype=float), phases))


def sample_cpm_phases(rng: np.random.Generator, size) -> np.ndarray:
    """Four initial phases per entry, i.i.d. uniform on (-pi, pi]; shape size + (4,)."""
    shape = (size + (4,)) if isinstance(size, tuple) else ((size, 4) if size is not None else (4,))
    u = rng.uniform(0.0, 1.0, size=shape)
    return np.pi - 2.0 * np.pi * u  # maps (0,1] draws onto (-pi, pi]


def cpm_matrix(kappa, phases) -> np.ndarray:
    """Build CPM matrices from kappa (…,) and phases (…, 4) [tt, tp, pt, pp]."""
    kappa = np.asarray(kappa, dtype=float)
    phases = np.asarray(phases, dtype=float)
    cross = np.sqrt(1.0 / kappa)
    m = np.empty(kappa.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = np.exp(1j * phases[..., 0])
    m[..., 0, 1] = cross * np.exp(1j * phases[..., 1])
    m[..., 1, 0] = cross * np.exp(1j * phases[..., 2])
    m[..., 1, 1] = np.exp(1j * phases[..., 3])
    return m


def rcs_linear(
    model: RcsModel,
    rng: np.random.Generator,
    incident: SphericalAngle,
    scattered: SphericalAngle,
) -> float:
    """One RCS realization [m^2]: pattern (mono or bistatic) times a fluctuation draw."""
    md_db = sigma_md_bistatic_db(model, incident, scattered)
    return float(10.0 ** (md_db / 10.0) * sample_sigma_s(rng, model.sigma_s_std_db))
