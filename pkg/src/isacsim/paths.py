"""The PathSet record: concatenated/background/reflector rays as flat arrays.

Every channel part (target, background, environment objects) is reduced to
a PathSet so synthesis, Doppler, metrics, and export can treat them
uniformly.  Amplitudes are real magnitude weights; per-path polarization
matrices and the scalar deterministic phase carry the complex structure.
Powers quoted in dB are amp^2 (unit-gain co-polarized reference).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np


@dataclass
class PathSet:
    """Struct-of-arrays path list for one link's channel component."""

    delay: np.ndarray  # (P,) absolute seconds
    amp: np.ndarray  # (P,) real magnitude weight
    phase: np.ndarray  # (P,) deterministic phase [rad]
    pol: np.ndarray  # (P, 2, 2) complex polarization chain
    aod: np.ndarray  # departure azimuth at Tx [deg]
    zod: np.ndarray
    aoa: np.ndarray  # arrival azimuth at Rx [deg]
    zoa: np.ndarray
    # Target-local incident/scattered angles at the scattering point (NaN
    # when the path has no target anchor).
    inc_theta: np.ndarray
    inc_phi: np.ndarray
    sca_theta: np.ndarray
    sca_phi: np.ndarray
    seg1_dist: np.ndarray  # (P,) meters; background paths use seg1 only
    seg2_dist: np.ndarray
    spst_idx: np.ndarray  # (P,) int; -1 background, -2 reflector
    ray1_idx: np.ndarray  # (P,) index into segment-1 ray list (-1 if n/a)
    ray2_idx: np.ndarray
    # Doppler state: unit vectors at Tx/Rx toward their first/last hop and
    # at the anchor toward each side; anchor bulk velocity; clutter draws.
    r_tx: np.ndarray  # (P, 3)
    r_rx: np.ndarray
    r_sp_tx: np.ndarray
    r_sp_rx: np.ndarray
    v_anchor: np.ndarray  # (P, 3) m/s
    alpha_tx: np.ndarray  # (P,)
    alpha_rx: np.ndarray
    d_tx: np.ndarray  # (P,) random clutter speeds [m/s]
    d_rx: np.ndarray
    micro_group: np.ndarray  # (P,) index into micro_groups, -1 = none
    micro_groups: list = field(default_factory=list)
    link_id: str = ""
    kind: str = "target"  # target | background | eo

    def __len__(self) -> int:
        return int(self.delay.shape[0])

    @property
    def power(self) -> np.ndarray:
        return self.amp**2

    def power_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 10.0 * np.log10(self.power)

    def select(self, mask) -> "PathSet":
        """New PathSet keeping only the masked/indexed paths."""
        kwargs = {}
        for f in fields(self):
            v = getattr(self, f.name)
            kwargs[f.name] = v[mask] if isinstance(v, np.ndarray) else v
        return PathSet(**kwargs)

    def scaled(self, factor) -> "PathSet":
        """New PathSet with amplitudes multiplied by factor (scalar or per-path)."""
        out = self.select(slice(None))
        out.amp = out.amp * factor
        return out

    def sorted_by_delay(self) -> "PathSet":
        return self.select(np.argsort(self.delay, kind="stable"))

    @staticmethod
    def concatenate(parts: list["PathSet"], link_id: str | None = None, kind: str | None = None) -> "PathSet":
        """Merge path sets; micro-motion group indices are re-based."""
        parts = [p for p in parts if len(p) > 0]
        if not parts:
            return empty_path_set(link_id=link_id or "", kind=kind or "target")
        if len(parts) == 1:
            out = parts[0]
            if link_id is not None:
                out.link_id = link_id
            if kind is not None:
                out.kind = kind
            return out
        groups: list = []
        shifted = []
        for p in parts:
            mg = p.micro_group.copy()
            if p.micro_groups:
                mg = np.where(mg >= 0, mg + len(groups), -1)
                groups.extend(p.micro_groups)
            shifted.append(mg)
        kwargs = {}
        for f in fields(PathSet):
            if f.name == "micro_group":
                kwargs[f.name] = np.concatenate(shifted)
            elif f.name == "micro_groups":
                kwargs[f.name] = groups
            elif f.name == "link_id":
                kwargs[f.name] = link_id if link_id is not None else parts[0].link_id
            elif f.name == "kind":
                kwargs[f.name] = kind if kind is not None else parts[0].kind
            else:
                kwargs[f.name] = np.concatenate([getattr(p, f.name) for p in parts])
        return PathSet(**kwargs)


def empty_path_set(link_id: str = "", kind: str = "target") -> PathSet:
    z = np.zeros(0)
    zi = np.zeros(0, dtype=int)
    z3 = np.zeros((0, 3))
    return PathSet(
        delay=z, amp=z, phase=z, pol=np.zeros((0, 2, 2), dtype=complex),
        aod=z, zod=z, aoa=z, zoa=z,
        inc_theta=z, inc_phi=z, sca_theta=z, sca_phi=z,
        seg1_dist=z, seg2_dist=z, spst_idx=zi, ray1_idx=zi, ray2_idx=zi,
        r_tx=z3, r_rx=z3, r_sp_tx=z3, r_sp_rx=z3, v_anchor=z3,
        alpha_tx=z, alpha_rx=z, d_tx=z, d_rx=z,
        micro_group=zi, micro_groups=[], link_id=link_id, kind=kind,
    )
