"""Per-path Doppler frequencies: transceiver motion, target bulk motion,
random mobile clutter, and sinusoidal micro-motion of target parts.

The unified per-path frequency is

    f_D = [r_rx . v_rx + r_sp_rx . v_anchor + 2 a_rx D_rx
         + r_tx . v_tx + r_sp_tx . v_anchor + 2 a_tx D_tx] / lambda

with unit vectors pointing from each node toward its first/last hop and,
at the anchor, toward each side of the link, so motion that shortens the
path gives a positive shift.  a ~ Bernoulli and D ~ U(-v_scatt, v_scatt)
model mobile non-target scatterers and are drawn once per path per drop.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .paths import PathSet


@dataclass(frozen=True)
class DopplerState:
    """Doppler inputs of a single path (scalar convenience mirror of PathSet rows)."""

    lam: float
    v_tx: np.ndarray
    v_rx: np.ndarray
    v_anchor: np.ndarray
    r_tx: np.ndarray  # at Tx, toward the first hop
    r_rx: np.ndarray  # at Rx, toward the last hop
    r_sp_tx: np.ndarray  # at the anchor, toward the Tx side
    r_sp_rx: np.ndarray  # at the anchor, toward the Rx side
    alpha_tx: float = 0.0
    alpha_rx: float = 0.0
    d_tx: float = 0.0
    d_rx: float = 0.0


@dataclass(frozen=True)
class MicroMotion:
    """Harmonic oscillation of a target part (arm, leg, rotor, ...).

    Default amplitudes/frequencies shipped in the config are illustrative
    only; measurements show the periodic shifts, not a parameter table.
    """

    part: str
    amplitude_m: float
    frequency_hz: float
    phase_rad: float = 0.0
    axis: tuple[float, float, float] = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if self.amplitude_m < 0 or self.frequency_hz < 0:
            raise ValueError("micro-motion amplitude and frequency must be >= 0")


def micro_doppler_velocity(m: MicroMotion, t: float) -> np.ndarray:
    """Instantaneous part velocity [m/s] at time t along the swing axis."""
    speed = m.amplitude_m * 2.0 * math.pi * m.frequency_hz * math.cos(
        2.0 * math.pi * m.frequency_hz * t + m.phase_rad
    )
    axis = np.asarray(m.axis, dtype=float)
    n = np.linalg.norm(axis)
    return speed * (axis / n if n > 0 else axis)


def path_doppler(state: DopplerState, t: float = 0.0, micro: tuple[MicroMotion, ...] = ()) -> float:
    """Doppler frequency [Hz] of one path at time t."""
    v_kp = np.asarray(state.v_anchor, dtype=float)
    for m in micro:
        v_kp = v_kp + micro_doppler_velocity(m, t)
    rx_part = (
        float(np.dot(state.r_rx, state.v_rx))
        + float(np.dot(state.r_sp_rx, v_kp))
        + 2.0 * state.alpha_rx * state.d_rx
    )
    tx_part = (
        float(np.dot(state.r_tx, state.v_tx))
        + float(np.dot(state.r_sp_tx, v_kp))
        + 2.0 * state.alpha_tx * state.d_tx
    )
    return (rx_part + tx_part) / state.lam


def sample_scatterer_motion(
    rng: np.random.Generator, p: float, p_prime: float, v_scatt: float, size: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Per-path clutter draws (alpha_tx, d_tx, alpha_rx, d_rx).

    alpha_tx ~ Bernoulli(p), alpha_rx ~ Bernoulli(p'), D ~ U(-v_scatt,
    v_scatt); constant over the drop.
    """
    if not (0.0 <= p <= 1.0 and 0.0 <= p_prime <= 1.0):
        raise ValueError("Bernoulli means must lie in [0, 1]")
    alpha_tx = (rng.random(size) < p).astype(float)
    alpha_rx = (rng.random(size) < p_prime).astype(float)
    d_tx = rng.uniform(-v_scatt, v_scatt, size) if v_scatt > 0 else np.zeros(size)
    d_rx = rng.uniform(-v_scatt, v_scatt, size) if v_scatt > 0 else np.zeros(size)
    return alpha_tx, d_tx, alpha_rx, d_rx


def assign_scatterer_motion(ps: PathSet, rng: np.random.Generator, p: float, p_prime: float, v_scatt: float) -> None:
    """Fill a PathSet's clutter-motion columns in place."""
    a_tx, d_tx, a_rx, d_rx = sample_scatterer_motion(rng, p, p_prime, v_scatt, len(ps))
    ps.alpha_tx, ps.d_tx, ps.alpha_rx, ps.d_rx = a_tx, d_tx, a_rx, d_rx


def path_doppler_arrays(ps: PathSet, lam: float, v_tx: np.ndarray, v_rx: np.ndarray, t: float = 0.0) -> np.ndarray:
    """Vectorized Doppler frequency [Hz] of every path in a set at time t."""
    v_anchor = ps.v_anchor
    if ps.micro_groups:
        v_anchor = v_anchor.copy()
        for gi, group in enumerate(ps.micro_groups):
            mask = ps.micro_group == gi
            if not np.any(mask):
                continue
            extra = np.zeros(3)
            for m in group:
                extra = extra + micro_doppler_velocity(m, t)
            v_anchor[mask] += extra
    rx_part = ps.r_rx @ np.asarray(v_rx, float) + np.sum(ps.r_sp_rx * v_anchor, axis=1) + 2.0 * ps.alpha_rx * ps.d_rx
    tx_part = ps.r_tx @ np.asarray(v_tx, float) + np.sum(ps.r_sp_tx * v_anchor, axis=1) + 2.0 * ps.alpha_tx * ps.d_tx
    return (rx_part + tx_part) / lam
