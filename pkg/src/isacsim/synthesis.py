"""Final channel impulse response assembly and export.

Combines the target, background, and reflector path sets of one link into
per-antenna-pair, per-time-sample complex tap lists: antenna field
responses sandwich each path's polarization chain, array geometry adds the
inter-element phases, and per-path Doppler advances the phase over the
time grid.  The background is scaled by the normalization factor O_isac
and the stochastic side by sqrt(1 - K_EO) against the reflector side.

Exports: CSV records [drop, link, u, s, t_s, tap_idx, delay_s, re, im] and
a binary variant with the same field order as little-endian float64 behind
the magic header "ISACCIR1".
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

from .doppler import path_doppler_arrays
from .errors import InconsistentLink, TooManyShared
from .geometry import SPEED_OF_LIGHT
from .paths import PathSet, empty_path_set
from .small_scale import ClusterSet

BINARY_MAGIC = b"ISACCIR1"


@dataclass(frozen=True)
class AntennaPattern:
    """Antenna port positions and (constant) dual-polarized field responses."""

    positions: np.ndarray  # (E, 3) meters, relative to the node reference point
    responses: np.ndarray  # (E, 2) complex (F_theta, F_phi)

    def __post_init__(self):
        object.__setattr__(self, "positions", np.asarray(self.positions, dtype=float))
        object.__setattr__(self, "responses", np.asarray(self.responses, dtype=complex))

    @property
    def n_elements(self) -> int:
        return self.positions.shape[0]

    @staticmethod
    def isotropic_dual_pol() -> "AntennaPattern":
        """Single dual-polarized isotropic element: two co-located unit ports."""
        return AntennaPattern(np.zeros((2, 3)), np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex))

    @staticmethod
    def linear_array(n: int, spacing_m: float, axis=(0.0, 1.0, 0.0)) -> "AntennaPattern":
        """n theta-polarized elements along an axis (for array-phase checks)."""
        ax = np.asarray(axis, dtype=float)
        pos = np.outer(np.arange(n) * spacing_m, ax / np.linalg.norm(ax))
        resp = np.tile(np.array([1.0, 0.0], dtype=complex), (n, 1))
        return AntennaPattern(pos, resp)


@dataclass(frozen=True)
class SynthesisConfig:
    """Combination factors and the output time grid."""

    o_isac: float = 1.0
    k_eo: float = 0.0
    n_shared: int = 0
    t_start: float = 0.0
    t_step: float = 1e-3
    t_count: int = 1

    def __post_init__(self):
        if self.t_step <= 0 or self.t_count < 1:
            raise ValueError("time grid needs t_step > 0 and t_count >= 1")
        if not (0.0 <= self.k_eo <= 1.0):
            raise ValueError("K_EO must lie in [0, 1]")

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.t_step * np.arange(self.t_count)


@dataclass
class Cir:
    """Time-varying channel impulse response of one link.

    amps has shape (U, S, T, P) over rx port u, tx port s, time sample t,
    and tap p; delays (P,) are absolute and sorted ascending.
    """

    delays: np.ndarray
    amps: np.ndarray
    times: np.ndarray
    link_id: str = ""
    link_index: int = 0
    drop_seed: int = 0
    mode: str = ""

    @property
    def n_taps(self) -> int:
        return int(self.delays.shape[0])


def assemble_cir(
    target: PathSet,
    background: PathSet,
    eo_paths: PathSet,
    cfg: SynthesisConfig,
    rx_antenna: AntennaPattern,
    tx_antenna: AntennaPattern,
    f_hz: float,
    v_tx=(0.0, 0.0, 0.0),
    v_rx=(0.0, 0.0, 0.0),
    drop_seed: int = 0,
    link_index: int = 0,
    mode: str = "",
) -> Cir:
    """Synthesize the combined CIR of one link on the configured time grid."""
    ids = {p.link_id for p in (target, background, eo_paths) if len(p) > 0}
    if len(ids) > 1:
        raise InconsistentLink(f"channel parts built for different links: {sorted(ids)}")
    link_id = next(iter(ids)) if ids else ""

    stoch_scale = math.sqrt(1.0 - cfg.k_eo)
    parts = []
    if len(target):
        parts.append(target.scaled(stoch_scale))
    if len(background):
        parts.append(background.scaled(cfg.o_isac * stoch_scale))
    if len(eo_paths):
        parts.append(eo_paths)  # already carries sqrt(K_EO)
    merged = PathSet.concatenate(parts, link_id=link_id).sorted_by_delay() if parts else empty_path_set(link_id)

    lam = SPEED_OF_LIGHT / f_hz
    times = cfg.times
    n_p = len(merged)
    u_n, s_n = rx_antenna.n_elements, tx_antenna.n_elements
    amps = np.zeros((u_n, s_n, len(times), n_p), dtype=complex)
    if n_p:
        base = merged.amp * np.exp(1j * merged.phase)  # (P,)
        port = np.einsum("ui,pij,sj->usp", rx_antenna.responses, merged.pol, tx_antenna.responses)
        ph_rx = np.exp(1j * (2.0 * math.pi / lam) * (merged.r_rx @ rx_antenna.positions.T)).T  # (U, P)
        ph_tx = np.exp(1j * (2.0 * math.pi / lam) * (merged.r_tx @ tx_antenna.positions.T)).T  # (S, P)
        for ti, t in enumerate(times):
            fd = path_doppler_arrays(merged, lam, v_tx, v_rx, t=float(t))
            dop = np.exp(1j * 2.0 * math.pi * fd * t)
            amps[:, :, ti, :] = (
                port * base[None, None, :] * dop[None, None, :]
                * ph_rx[:, None, :] * ph_tx[None, :, :]
            )
    if not np.all(np.isfinite(amps)):
        raise ValueError("non-finite CIR amplitude")
    return Cir(
        delays=merged.delay,
        amps=amps,
        times=times,
        link_id=link_id,
        link_index=link_index,
        drop_seed=drop_seed,
        mode=mode,
    )


def _backsolve_scatterer(tx: np.ndarray, rx: np.ndarray, aod_deg, zod_deg, tau_rel: float) -> np.ndarray:
    """Single-bounce scatterer position implied by departure angles and delay."""
    from .geometry import unit_vector_from_angles

    d_vec = rx - tx
    big_d = float(np.linalg.norm(d_vec))
    big_l = big_d + tau_rel * SPEED_OF_LIGHT  # total unfolded length
    u = unit_vector_from_angles(zod_deg, aod_deg)
    denom = 2.0 * (big_l - float(np.dot(u, d_vec)))
    r = (big_l**2 - big_d**2) / denom if denom > 0 else 0.0
    return tx + r * u


def share_clusters(
    comm: ClusterSet, sens: ClusterSet, n_shared: int, rng: np.random.Generator
) -> tuple[ClusterSet, ClusterSet]:
    """Inject n_shared sensing-cluster scatterers into the communication set.

    The chosen sensing clusters' implied single-bounce scatterer positions
    replace the geometry (delay and both angle pairs) of the communication
    set's weakest clusters; the sensing set is untouched, and the
    communication powers are kept and renormalized.  Both sets must carry
    tx/rx positions.
    """
    if n_shared < 0 or n_shared > min(comm.n_clusters, sens.n_clusters):
        raise TooManyShared(
            f"n_shared={n_shared} exceeds cluster counts ({comm.n_clusters}, {sens.n_clusters})"
        )
    if n_shared == 0:
        return comm, sens
    for cs in (comm, sens):
        if cs.tx_pos is None or cs.rx_pos is None:
            raise ValueError("share_clusters needs tx/rx positions on both cluster sets")

    picked = rng.choice(sens.n_clusters, size=n_shared, replace=False)
    weakest = np.argsort(comm.power, kind="stable")[:n_shared]

    out = ClusterSet(
        tau=comm.tau.copy(), power=comm.power.copy(),
        caod=comm.caod.copy(), czod=comm.czod.copy(),
        caoa=comm.caoa.copy(), czoa=comm.czoa.copy(),
        aod=comm.aod.copy(), zod=comm.zod.copy(),
        aoa=comm.aoa.copy(), zoa=comm.zoa.copy(),
        kappa=comm.kappa.copy(), phases=comm.phases.copy(),
        tx_pos=comm.tx_pos, rx_pos=comm.rx_pos,
    )
    direct = float(np.linalg.norm(comm.rx_pos - comm.tx_pos)) / SPEED_OF_LIGHT
    from .geometry import angles_from_unit_vector, wrap_azimuth

    for ci, si in zip(weakest, picked):
        scat = _backsolve_scatterer(sens.tx_pos, sens.rx_pos, sens.caod[si], sens.czod[si], float(sens.tau[si]))
        d1 = float(np.linalg.norm(scat - comm.tx_pos))
        d2 = float(np.linalg.norm(comm.rx_pos - scat))
        new_tau = max((d1 + d2) / SPEED_OF_LIGHT - direct, 0.0)
        zod_new, aod_new = angles_from_unit_vector(scat - comm.tx_pos)
        zoa_new, aoa_new = angles_from_unit_vector(scat - comm.rx_pos)
        # Shift per-ray angles with the cluster center to keep intra-cluster structure.
        out.aod[ci] = wrap_azimuth(out.aod[ci] + (aod_new - out.caod[ci]))
        out.zod[ci] = np.clip(out.zod[ci] + (zod_new - out.czod[ci]), 0.0, 180.0)
        out.aoa[ci] = wrap_azimuth(out.aoa[ci] + (aoa_new - out.caoa[ci]))
        out.zoa[ci] = np.clip(out.zoa[ci] + (zoa_new - out.czoa[ci]), 0.0, 180.0)
        out.tau[ci] = new_tau
        out.caod[ci], out.czod[ci] = float(aod_new), float(zod_new)
        out.caoa[ci], out.czoa[ci] = float(aoa_new), float(zoa_new)

    order = np.argsort(out.tau, kind="stable")
    for name in ("tau", "power", "caod", "czod", "caoa", "czoa", "aod", "zod", "aoa", "zoa", "kappa", "phases"):
        setattr(out, name, getattr(out, name)[order])
    out.power = out.power / out.power.sum()
    return out, sens


def normalize_background(target: PathSet, background: PathSet, mode: str = "none", rho: float = 1.0) -> float:
    """Background scale O_isac; "none" keeps the placeholder value 1.

    "power_ratio" solves ||O * background||^2 / ||target||^2 = rho.
    """
    if mode == "none":
        return 1.0
    if mode != "power_ratio":
        raise ValueError(f"unknown normalization mode {mode!r}")
    if len(target) == 0 or len(background) == 0:
        raise ValueError("power_ratio normalization needs non-empty target and background")
    pt = float(np.sum(target.power))
    pb = float(np.sum(background.power))
    return math.sqrt(rho * pt / pb)


def cir_to_csv_rows(cir: Cir):
    """Yield export rows (drop, link, u, s, t_s, tap_idx, delay_s, re, im)."""
    u_n, s_n, t_n, p_n = cir.amps.shape
    for u in range(u_n):
        for s in range(s_n):
            for ti in range(t_n):
                for p in range(p_n):
                    a = cir.amps[u, s, ti, p]
                    yield (
                        cir.drop_seed, cir.link_index, u, s, float(cir.times[ti]),
                        p, float(cir.delays[p]), float(a.real), float(a.imag),
                    )


def write_cir_csv(cir: Cir, fh) -> None:
    fh.write("drop,link,u,s,t_s,tap_idx,delay_s,re,im\n")
    for row in cir_to_csv_rows(cir):
        drop, link, u, s, t_s, tap, delay, re, im = row
        fh.write(f"{drop},{link},{u},{s},{t_s:.17g},{tap},{delay:.17g},{re:.17g},{im:.17g}\n")


def write_cir_binary(cir: Cir, fh) -> None:
    """Binary export: magic "ISACCIR1", then little-endian f64 records."""
    fh.write(BINARY_MAGIC)
    packer = struct.Struct("<9d")
    for row in cir_to_csv_rows(cir):
        fh.write(packer.pack(*[float(x) for x in row]))


def read_cir_binary(fh) -> np.ndarray:
    """Read a binary export back as an (N, 9) float array (for round-trip checks)."""
    magic = fh.read(len(BINARY_MAGIC))
    if magic != BINARY_MAGIC:
        raise ValueError("not a CIR binary file (bad magic)")
    data = fh.read()
    return np.frombuffer(data, dtype="<f8").reshape(-1, 9)
