"""Environment objects: deterministic large reflectors and target-like objects.

Type-1 objects behave exactly like sensing targets and are routed through
the target-channel pipeline.  Type-2 objects are large planar reflectors:
each contributes at most one single-hop mirror path per link, built by the
image-source construction against a finite rectangle, with a flat
configurable reflection loss.  The reflector side of the channel is scaled
by sqrt(K_EO) and the stochastic side by sqrt(1 - K_EO) at synthesis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SPEED_OF_LIGHT, angles_from_unit_vector, unit_vector_from_angles
from .large_scale import FREE_SPACE, pathloss_segment
from .paths import PathSet, empty_path_set


@dataclass(frozen=True)
class EoDescriptor:
    """An environment object; type-2 fields describe a finite rectangular plane."""

    kind: str  # "type1" | "type2"
    point: np.ndarray | None = None  # a point on the plane
    normal: np.ndarray | None = None  # unit normal
    width_m: float = 0.0
    height_m: float = 0.0
    reflection_loss_db: float = 3.0
    target_descriptor: object = None  # type-1: the embedded target spec

    def __post_init__(self):
        if self.kind == "type2":
            n = np.asarray(self.normal, dtype=float)
            norm = np.linalg.norm(n)
            if not math.isclose(norm, 1.0, rel_tol=0, abs_tol=1e-9):
                raise ValueError("type-2 plane normal must be unit length")
            if self.width_m <= 0 or self.height_m <= 0:
                raise ValueError("type-2 plane extent must be positive")
            object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
            object.__setattr__(self, "normal", n)


@dataclass(frozen=True)
class Type1Target:
    """Target-equivalent description embedded in a type-1 object."""

    pose: object  # geometry.Pose
    velocity: tuple
    model: object  # rcs.RcsModel
    size: tuple = (0.0, 0.0, 0.0)


def build_type1_eo_channel(
    eo: EoDescriptor, link_id, tx, rx, los_states, lsp_los, lsp_nlos, concat_cfg, f_hz, rng_factory
) -> PathSet:
    """Delegate a type-1 object to the target pipeline.

    The result is identical to building a sensing target from the embedded
    descriptor with the same random streams.
    """
    if eo.kind != "type1" or eo.target_descriptor is None:
        raise ValueError("type-1 delegation needs an embedded target descriptor")
    from .rcs import spst_layout
    from .target_channel import build_target_channel

    t: Type1Target = eo.target_descriptor
    spsts = spst_layout(t.model, t.size)
    return build_target_channel(
        link_id, tx, rx, t.pose, t.velocity, t.model, spsts,
        list(los_states), lsp_los, lsp_nlos, concat_cfg, f_hz, rng_factory,
    )


@dataclass(frozen=True)
class EoPath:
    """One specular reflection path off a type-2 object."""

    delay: float
    length_m: float
    reflection_point: np.ndarray
    aod: float
    zod: float
    aoa: float
    zoa: float
    amplitude: float


def _plane_axes(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z = np.array([0.0, 0.0, 1.0])
    u = np.cross(normal, z)
    if np.linalg.norm(u) < 1e-9:  # horizontal plane: use x/y as in-plane axes
        u = np.array([1.0, 0.0, 0.0])
    u = u / np.linalg.norm(u)
    v = np.cross(normal, u)
    return u, v


def mirror_path(tx: np.ndarray, eo: EoDescriptor, rx: np.ndarray, f_hz: float) -> EoPath | None:
    """Image-source specular path off a finite rectangle, or None if it misses.

    Requires Tx and Rx on the same side of the plane and the specular point
    inside the rectangle.  Amplitude is free-space loss over the unfolded
    length plus the flat reflection loss.
    """
    if eo.kind != "type2":
        raise ValueError("mirror paths are defined for type-2 objects only")
    tx = np.asarray(tx, dtype=float)
    rx = np.asarray(rx, dtype=float)
    n, p0 = eo.normal, eo.point
    side_tx = float(np.dot(tx - p0, n))
    side_rx = float(np.dot(rx - p0, n))
    if side_tx == 0.0 or side_rx == 0.0 or (side_tx > 0) != (side_rx > 0):
        return None
    image = tx - 2.0 * side_tx * n
    seg = rx - image
    denom = float(np.dot(seg, n))
    if denom == 0.0:
        return None
    t = float(np.dot(p0 - image, n)) / denom
    if not (0.0 < t < 1.0):
        return None
    point = image + t * seg
    u, v = _plane_axes(n)
    du = float(np.dot(point - p0, u))
    dv = float(np.dot(point - p0, v))
    if abs(du) > eo.width_m / 2.0 or abs(dv) > eo.height_m / 2.0:
        return None
    length = float(np.linalg.norm(seg))
    amp = 10.0 ** (-(pathloss_segment(length, f_hz, FREE_SPACE) + eo.reflection_loss_db) / 20.0)
    zod, aod = angles_from_unit_vector(point - tx)
    zoa, aoa = angles_from_unit_vector(point - rx)
    return EoPath(
        delay=length / SPEED_OF_LIGHT,
        length_m=length,
        reflection_point=point,
        aod=float(aod),
        zod=float(zod),
        aoa=float(aoa),
        zoa=float(zoa),
        amplitude=float(amp),
    )


def build_eo_channel(
    tx: np.ndarray, rx: np.ndarray, eos: list[EoDescriptor], k_eo: float, f_hz: float, link_id: str = ""
) -> PathSet:
    """All valid type-2 mirror paths of a link, amplitude-scaled by sqrt(K_EO).

    K_EO = 0 turns the reflector side off entirely (empty set); the
    matching sqrt(1 - K_EO) on the stochastic side is applied at synthesis.
    """
    if not (0.0 <= k_eo <= 1.0):
        raise ValueError("K_EO must lie in [0, 1]")
    hits = []
    if k_eo > 0.0:
        for eo in eos:
            if eo.kind != "type2":
                continue
            hit = mirror_path(tx, eo, rx, f_hz)
            if hit is not None:
                hits.append(hit)
    if not hits:
        return empty_path_set(link_id=link_id, kind="eo")
    n = len(hits)
    scale = math.sqrt(k_eo)
    pol = np.broadcast_to(np.array([[1.0 + 0j, 0.0], [0.0, -1.0 + 0j]]), (n, 2, 2)).copy()
    z3 = np.zeros((n, 3))
    arr = lambda key: np.array([getattr(h, key) for h in hits], dtype=float)
    delays = arr("delay")
    return PathSet(
        delay=delays,
        amp=scale * arr("amplitude"),
        phase=(-(2.0 * math.pi * f_hz) * delays) % (2.0 * math.pi),
        pol=pol,
        aod=arr("aod"),
        zod=arr("zod"),
        aoa=arr("aoa"),
        zoa=arr("zoa"),
        inc_theta=np.full(n, np.nan),
        inc_phi=np.full(n, np.nan),
        sca_theta=np.full(n, np.nan),
        sca_phi=np.full(n, np.nan),
        seg1_dist=arr("length_m"),
        seg2_dist=np.zeros(n),
        spst_idx=np.full(n, -2, dtype=int),
        ray1_idx=np.arange(n),
        ray2_idx=np.full(n, -1, dtype=int),
        r_tx=unit_vector_from_angles(arr("zod"), arr("aod")),
        r_rx=unit_vector_from_angles(arr("zoa"), arr("aoa")),
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
        kind="eo",
    )
