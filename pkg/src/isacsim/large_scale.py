"""Line-of-sight states, path loss, shadow fading, and the coupling-loss metric.

A sensing link through a target has two segments (Tx-target, target-Rx);
each gets its own LoS state, path-loss curve evaluation, and shadow-fading
draw.  The concatenated path loss combines both segments with the radar
aperture constant and the target RCS.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DistanceOutOfRange, UnsupportedScenario
from .geometry import SPEED_OF_LIGHT


@dataclass(frozen=True)
class PathlossCurve:
    """Named loss curve PL = a*lg(d_m) + b + c*lg(f_GHz), or the exact free-space law."""

    name: str
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    exact_free_space: bool = False


FREE_SPACE = PathlossCurve("freespace", exact_free_space=True)
# Reference urban-macro curves (d here is the 3D distance in meters).
UMA_LOS = PathlossCurve("uma_los", a=22.0, b=28.0, c=20.0)
UMA_NLOS = PathlossCurve("uma_nlos", a=39.08, b=13.54, c=20.0)

BUILTIN_CURVES = {c.name: c for c in (FREE_SPACE, UMA_LOS, UMA_NLOS)}


@dataclass(frozen=True)
class LosState:
    """Per-segment propagation condition; monostatic links carry one shared state."""

    tx_target: bool  # True = LoS
    target_rx: bool

    @property
    def category(self) -> int:
        """Category 1..4: (LoS,LoS), (LoS,NLoS), (NLoS,LoS), (NLoS,NLoS)."""
        return 1 + (not self.tx_target) * 2 + (not self.target_rx)


@dataclass(frozen=True)
class LargeScale:
    """Realized large-scale quantities of one concatenated link."""

    pl_segment1_db: float
    pl_segment2_db: float
    sf1_db: float
    sf2_db: float
    coupling_loss_db: float


def los_probability(d2d_m: float, model: str = "uma") -> float:
    """LoS probability of one segment versus its 2D distance.

    The embedded "uma" curve is the urban-macro ground formula (node
    heights up to 23 m); "always"/"never" cover deterministic cases such
    as aerial targets well above the clutter.
    """
    if d2d_m < 0:
        raise ValueError("2D distance must be >= 0")
    if model == "always":
        return 1.0
    if model == "never":
        return 0.0
    if model == "uma":
        if d2d_m <= 18.0:
            return 1.0
        return 18.0 / d2d_m + math.exp(-d2d_m / 63.0) * (1.0 - 18.0 / d2d_m)
    raise UnsupportedScenario(f"no LoS probability model named {model!r}")


def los_state_joint(p1: float, p2: float, u1: float, u2: float | None, monostatic: bool) -> LosState:
    """Resolve segment LoS states from probabilities and uniform variates.

    The variates come from the spatial-consistency fields so that nearby
    targets see correlated states.  Monostatic sensing draws a single
    state for the round trip (u2 is ignored).
    """
    s1 = u1 < p1
    if monostatic:
        return LosState(s1, s1)
    return LosState(s1, u2 < p2)


def pathloss_segment(d_m: float, f_hz: float, curve: PathlossCurve = FREE_SPACE) -> float:
    """Path loss [dB] of one segment at 3D distance d_m."""
    d = np.asarray(d_m, dtype=float)
    if np.any(d < 1.0):
        raise DistanceOutOfRange(f"pathloss curves are valid for d >= 1 m, got {np.min(d)}")
    if curve.exact_free_space:
        out = 20.0 * np.log10(4.0 * math.pi * d * f_hz / SPEED_OF_LIGHT)
    else:
        out = curve.a * np.log10(d) + curve.b + curve.c * np.log10(f_hz / 1e9)
    return float(out) if np.isscalar(d_m) else out


def aperture_constant_db(f_hz: float) -> float:
    """The 10lg(lambda^2 / 4pi) term of the concatenated loss [dB]."""
    lam = SPEED_OF_LIGHT / f_hz
    return 10.0 * math.log10(lam**2 / (4.0 * math.pi))


def pathloss_concatenated(
    d1_m: float,
    d2_m: float,
    f_hz: float,
    sigma_rcs_m2: float,
    curve1: PathlossCurve = FREE_SPACE,
    curve2: PathlossCurve | None = None,
) -> float:
    """Concatenated two-segment path loss [dB] including the RCS gain.

    PL(d1) + PL(d2) + 10lg(lambda^2/4pi) - 10lg(sigma); symmetric in
    (d1, d2) when both segments share a curve, and PL(d1,d2) - PL(d2) is
    independent of d2 by construction.
    """
    if sigma_rcs_m2 <= 0:
        raise ValueError("sigma_rcs must be positive")
    curve2 = curve2 or curve1
    return (
        pathloss_segment(d1_m, f_hz, curve1)
        + pathloss_segment(d2_m, f_hz, curve2)
        + aperture_constant_db(f_hz)
        - 10.0 * math.log10(sigma_rcs_m2)
    )


def coupling_loss(
    pl1_db: float,
    pl2_db: float,
    f_hz: float,
    component_a_db: float,
    sf1_db: float = 0.0,
    sf2_db: float = 0.0,
) -> float:
    """Power scaling factor of a target link [dB].

    Segment path losses plus the aperture constant, minus the target's
    large-scale RCS component, plus both shadow-fading draws.  Used both
    as the calibration metric and to rank candidate Tx/Rx pairs.
    """
    return pl1_db + pl2_db + aperture_constant_db(f_hz) - component_a_db + sf1_db + sf2_db


def sample_shadow_fading(rng: np.random.Generator, std_db: float) -> float:
    """Zero-mean log-normal shadow fading [dB]."""
    return float(rng.normal(0.0, std_db)) if std_db > 0 else 0.0
