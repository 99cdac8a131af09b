"""Spatially correlated random variates for link parameters.

A CorrelatedField is a deterministic Gaussian random field: i.i.d.
standard-normal values live on an implicit integer lattice (spacing half
the correlation distance, values derived by hashing the node coordinates),
and queries take a Gaussian-kernel-weighted sum over nearby nodes,
renormalized to exact unit variance.  The autocorrelation decays as
exp(-(d/d_corr)^2), hitting e^-1 at the correlation distance; the marginal
at any position is exactly standard normal, and values are a pure function
of (seed, parameter, scope, position).

The correlation policy says which link pairs may share a field at all:
links of different types (outdoor-LoS / outdoor-NLoS / O2I), different
floors, non-co-located TRP anchors, TRP-TRP links versus others, and every
monostatic background channel (across nodes and across reference points of
one node) are mutually independent.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

_MIX1 = np.uint64(0x9E3779B97F4A7C15)
_MIX2 = np.uint64(0xBF58476D1CE4E5B9)
_MIX3 = np.uint64(0x94D049BB133111EB)
_PRIMES = (np.uint64(0x8B72E1E2E4D7C35D), np.uint64(0xA5F152E1E10B2F6B), np.uint64(0xC2B2AE3D27D4EB4F))

# Default correlation distances [m]; placeholders chosen for plausibility,
# override per deployment in the config.
DEFAULT_D_CORR = {
    "los_state": 50.0,
    "delays": 50.0,
    "cluster_powers": 50.0,
    "angles": 15.0,
}

LINK_CORRELATED = frozenset(
    {"delays", "cluster_powers", "angle_offset", "angle_sign", "random_coupling",
     "xpr", "initial_phase", "los_state"}
)
ALL_CORRELATED = frozenset(
    {"blockage_a", "o2i_penetration", "indoor_distance", "indoor_state"}
)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    z = (x + _MIX1).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * _MIX2
    z = (z ^ (z >> np.uint64(27))) * _MIX3
    return z ^ (z >> np.uint64(31))


def _seed_from(*parts: str) -> np.uint64:
    digest = hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()
    return np.uint64(int.from_bytes(digest[:8], "little"))


def _lattice_normals(seed: np.uint64, nodes: np.ndarray) -> np.ndarray:
    """Standard-normal value of integer lattice node(s), shape (..., dims) -> (...)."""
    h = np.full(nodes.shape[:-1], seed, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for d in range(nodes.shape[-1]):
            h = _splitmix64(h ^ (nodes[..., d].astype(np.int64).view(np.uint64) * _PRIMES[d]))
    u = ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    return ndtri(u)


@dataclass(frozen=True)
class CorrelatedField:
    """One parameter's random field within one correlation scope."""

    parameter: str
    scope: str
    seed: int
    d_corr: float  # meters; inf collapses to a single shared draw
    dims: int = 2  # 2 = horizontal plane, 3 = adds the same vertical distance

    def sample(self, pos) -> float | np.ndarray:
        """Field value(s) at position(s); accepts (3,) or (N, 3) arrays."""
        p = np.atleast_2d(np.asarray(pos, dtype=float))[:, : self.dims]
        scalar = np.asarray(pos).ndim == 1
        seed = np.uint64(self.seed)
        if math.isinf(self.d_corr):
            v = float(_lattice_normals(seed, np.zeros((1, self.dims), dtype=np.int64))[0])
            out = np.full(p.shape[0], v)
            return float(out[0]) if scalar else out
        s = self.d_corr / 2.0  # lattice spacing
        w2 = 2.0 * (self.d_corr / 2.0) ** 2  # 2 * kernel_width^2
        g = p / s
        base = np.floor(g).astype(np.int64)
        offsets = np.array(list(itertools.product(range(-3, 5), repeat=self.dims)), dtype=np.int64)
        nodes = base[:, None, :] + offsets[None, :, :]  # (N, K, dims)
        d2 = np.sum((p[:, None, :] - nodes * s) ** 2, axis=2)
        wgt = np.exp(-d2 / w2)
        num = np.sum(wgt * _lattice_normals(seed, nodes), axis=1)
        den = np.sum(wgt**2, axis=1)
        out = num / np.sqrt(den)
        return float(out[0]) if scalar else out


def sample_field(field: CorrelatedField, pos) -> float | np.ndarray:
    """Standard-normal spatially correlated value(s) at pos."""
    return field.sample(pos)


@dataclass(frozen=True)
class CorrelationPolicy:
    """Which parameters correlate across in-scope links, and how."""

    link_correlated: frozenset = LINK_CORRELATED
    all_correlated: frozenset = ALL_CORRELATED

    def correlation_type(self, parameter: str) -> str:
        if parameter in self.all_correlated:
            return "all_correlated"
        if parameter in self.link_correlated:
            return "link_correlated"
        return "link_correlated"


DEFAULT_POLICY = CorrelationPolicy()


@dataclass(frozen=True)
class LinkClass:
    """Classification of one link for the consistency exclusion rules."""

    kind: str  # target_segment | background
    sensing_mode: str  # monostatic | bistatic
    link_type: str = "outdoor_los"  # outdoor_los | outdoor_nlos | o2i
    floor: int = 0
    trp_site: int | None = None  # co-located TRP anchor, None for UT links
    is_trp_trp: bool = False
    node_id: str = ""
    rp_index: int | None = None


def scope_key(link: LinkClass) -> str:
    """Field-sharing scope; two links correlate iff their scopes match."""
    if link.kind == "background" and link.sensing_mode == "monostatic":
        # Never consistent: unique per node and per reference point.
        return f"monobg|{link.node_id}|rp{link.rp_index}"
    if link.is_trp_trp:
        return f"trptrp|{link.node_id}"
    return f"{link.link_type}|floor{link.floor}|site{link.trp_site}"


def applies(policy: CorrelationPolicy, link_a: LinkClass, link_b: LinkClass, parameter: str = "delays") -> bool:
    """Whether spatial consistency is modeled between two links for a parameter.

    False for every excluded pair: monostatic background channels
    (including two RPs of the same node), different link types, different
    floors, non-co-located TRP anchors, and TRP-TRP links against anything
    else; True otherwise.
    """
    if link_a.kind == "background" and link_a.sensing_mode == "monostatic":
        if not (link_a == link_b):
            return False
    if link_b.kind == "background" and link_b.sensing_mode == "monostatic":
        if not (link_a == link_b):
            return False
    policy.correlation_type(parameter)  # unknown parameters default to link-correlated
    return scope_key(link_a) == scope_key(link_b)


class ConsistencyContext:
    """Per-drop cache of correlated fields, keyed by (parameter, scope)."""

    def __init__(
        self,
        drop_seed: int,
        d_corr: dict[str, float] | None = None,
        three_d: bool = False,
        policy: CorrelationPolicy = DEFAULT_POLICY,
    ):
        self.drop_seed = int(drop_seed)
        self.d_corr = dict(DEFAULT_D_CORR)
        if d_corr:
            self.d_corr.update(d_corr)
        self.dims = 3 if three_d else 2
        self.policy = policy
        self._fields: dict[tuple[str, str], CorrelatedField] = {}

    def field(self, parameter: str, scope: str) -> CorrelatedField:
        key = (parameter, scope)
        if key not in self._fields:
            d = self.d_corr.get(parameter, 50.0)
            if self.policy.correlation_type(parameter) == "all_correlated":
                d = math.inf
            seed = int(_seed_from(str(self.drop_seed), "field", parameter, scope))
            self._fields[key] = CorrelatedField(parameter, scope, seed, d, self.dims)
        return self._fields[key]

    def field_for_link(self, parameter: str, link: LinkClass) -> CorrelatedField:
        return self.field(parameter, scope_key(link))

    def uniform(self, parameter: str, scope: str, pos) -> float | np.ndarray:
        """Spatially consistent uniform(0,1) variate(s) at pos."""
        return ndtr(self.field(parameter, scope).sample(pos))
