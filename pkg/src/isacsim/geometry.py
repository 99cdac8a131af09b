"""Coordinate conventions, spherical angles, and bisector geometry.

All angles are stored in degrees (matching the published parameter
tables); radians appear only inside trig calls.  Positions, velocities,
and direction vectors are plain numpy arrays of shape (3,) in a flat
local Cartesian world (x east, y north, z up).

Conventions:
  * zenith theta in [0, 180], 0 = straight up (+z), 90 = horizon;
  * azimuth phi in [-180, 180), 0 = +x, 90 = +y;
  * a pose heading is the azimuth its local +x axis ("front") points to.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s


def wrap_azimuth(phi_deg):
    """Wrap azimuth(s) into [-180, 180)."""
    return (np.asarray(phi_deg, dtype=float) + 180.0) % 360.0 - 180.0


def clamp_zenith(theta_deg):
    """Clamp zenith angle(s) into [0, 180]."""
    return np.clip(np.asarray(theta_deg, dtype=float), 0.0, 180.0)


@dataclass(frozen=True)
class SphericalAngle:
    """A (zenith, azimuth) direction in degrees, canonicalized on construction."""

    theta: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(clamp_zenith(self.theta)))
        object.__setattr__(self, "phi", float(wrap_azimuth(self.phi)))


@dataclass(frozen=True)
class Pose:
    """Position plus azimuth heading of the object's front, heading wrapped to [-180, 180)."""

    position: np.ndarray
    heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "heading", float(wrap_azimuth(self.heading)))


def unit_vector_from_angles(theta_deg, phi_deg) -> np.ndarray:
    """Unit vector(s) (sin t cos p, sin t sin p, cos t); broadcasts, last axis = 3."""
    t = np.radians(np.asarray(theta_deg, dtype=float))
    p = np.radians(np.asarray(phi_deg, dtype=float))
    t, p = np.broadcast_arrays(t, p)
    st = np.sin(t)
    out = np.empty(t.shape + (3,))
    out[..., 0] = st * np.cos(p)
    out[..., 1] = st * np.sin(p)
    out[..., 2] = np.cos(t)
    return out


def angles_from_unit_vector(v) -> tuple[np.ndarray, np.ndarray]:
    """(theta_deg, phi_deg) of direction vector(s); inverse of unit_vector_from_angles."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1)
    with np.errstate(invalid="ignore"):
        ct = np.where(n > 0, v[..., 2] / np.where(n > 0, n, 1.0), 1.0)
    theta = np.degrees(np.arccos(np.clip(ct, -1.0, 1.0)))
    phi = wrap_azimuth(np.degrees(np.arctan2(v[..., 1], v[..., 0])))
    return theta, phi


def spherical_unit_vector(a: SphericalAngle) -> np.ndarray:
    """Unit direction vector of a spherical angle."""
    return unit_vector_from_angles(a.theta, a.phi)


def direction_between(src: np.ndarray, dst: np.ndarray) -> SphericalAngle:
    """Spherical angle of the ray pointing from src toward dst."""
    d = np.asarray(dst, dtype=float) - np.asarray(src, dtype=float)
    if not np.any(d):
        from .errors import DegenerateGeometry

        raise DegenerateGeometry("direction between coincident points is undefined")
    theta, phi = angles_from_unit_vector(d)
    return SphericalAngle(float(theta), float(phi))


def gcs_to_lcs(a: SphericalAngle, pose: Pose) -> SphericalAngle:
    """Express a global-frame ray in the pose's local frame.

    The local frame is the global frame yawed by the pose heading, so the
    zenith is unchanged and the azimuth shifts by -heading.
    """
    return SphericalAngle(a.theta, a.phi - pose.heading)


def lcs_to_gcs(a: SphericalAngle, pose: Pose) -> SphericalAngle:
    """Inverse of gcs_to_lcs."""
    return SphericalAngle(a.theta, a.phi + pose.heading)


def _antipodal_bisector(u: np.ndarray) -> np.ndarray:
    # Tie-break for beta = 180: among directions perpendicular to u, pick the
    # one with smallest wrapped azimuth (then smallest zenith).  Candidates are
    # where the perpendicular great circle crosses the y = 0 plane.
    z = np.array([0.0, 0.0, 1.0])
    if abs(abs(u[1]) - 1.0) < 1e-12:  # u = +/- y: the circle lies in the xz plane
        return np.array([-1.0, 0.0, 0.0])
    e1 = np.cross(z, u)
    n1 = np.linalg.norm(e1)
    if n1 < 1e-12:  # u = +/- z: the circle is the equator
        return np.array([-1.0, 0.0, 0.0])
    e1 /= n1
    e2 = np.cross(u, e1)
    # Solve cos(a) e1_y + sin(a) e2_y = 0 for the two crossings.
    alpha = np.arctan2(-e1[1], e2[1])
    best = None
    for a in (alpha, alpha + np.pi):
        cand = np.cos(a) * e1 + np.sin(a) * e2
        theta, phi = angles_from_unit_vector(cand)
        key = (round(float(phi), 9), round(float(theta), 9))
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def bisector_and_beta(
    incident: SphericalAngle, scattered: SphericalAngle
) -> tuple[SphericalAngle, float, bool]:
    """Bisector direction and separation angle of two rays.

    Returns (bisector, beta_deg, degenerate).  beta is the angle between
    the two unit vectors, in [0, 180].  The bisector is the normalized
    half-sum; for antipodal rays (beta = 180) any bisector direction is
    ill-defined, so a deterministic perpendicular is returned and the
    degenerate flag is set.
    """
    if incident == scattered:
        return incident, 0.0, False
    u = spherical_unit_vector(incident)
    v = spherical_unit_vector(scattered)
    c = float(np.clip(np.dot(u, v), -1.0, 1.0))
    beta = float(np.degrees(np.arccos(c)))
    s = u + v
    norm = np.linalg.norm(s)
    if norm < 1e-9:
        b = _antipodal_bisector(u)
        theta, phi = angles_from_unit_vector(b)
        return SphericalAngle(float(theta), float(phi)), 180.0, True
    theta, phi = angles_from_unit_vector(s / norm)
    return SphericalAngle(float(theta), float(phi)), beta, False


def bisector_and_beta_arrays(
    ti, pi, ts, ps
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized bisector: (theta_b, phi_b, beta_deg) for degree-angle arrays.

    Antipodal pairs get an arbitrary finite bisector; callers treat beta
    close to 180 as forward scattering (killed by the scattering floor),
    so only beta needs to be right there.
    """
    u = unit_vector_from_angles(ti, pi)
    v = unit_vector_from_angles(ts, ps)
    c = np.clip(np.sum(u * v, axis=-1), -1.0, 1.0)
    beta = np.degrees(np.arccos(c))
    s = u + v
    norm = np.linalg.norm(s, axis=-1, keepdims=True)
    safe = np.where(norm > 1e-9, norm, 1.0)
    b = np.where(norm > 1e-9, s / safe, np.array([-1.0, 0.0, 0.0]))
    theta_b, phi_b = angles_from_unit_vector(b)
    # Exact pass-through where the rays coincide, mirroring the scalar op.
    same = (np.asarray(ti) == np.asarray(ts)) & (
        wrap_azimuth(pi) == wrap_azimuth(ps)
    )
    theta_b = np.where(same, ti, theta_b)
    phi_b = np.where(same, wrap_azimuth(pi), phi_b)
    return theta_b, phi_b, beta
