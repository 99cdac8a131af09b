"""Scenario configuration, Monte-Carlo drop generation, and sensing-pair selection.

A drop places TRPs on a hexagonal multi-site layout (single 360-degree
sector per site, no wrapping), user terminals and targets uniformly inside
the center cell, and enforces the minimum 3D distances by rejection
resampling.  Drops are pure functions of (config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, PlacementInfeasible
from .geometry import Pose
from .streams import substream

SENSING_MODES = ("TRP-monostatic", "TRP-TRP", "TRP-UT", "UT-UT", "UT-monostatic")
SCENARIO_IDS = ("UMa-AV", "UMa", "UMi", "UMi-AV", "RMa", "RMa-AV", "InH", "InF", "UrbanGrid")


@dataclass(frozen=True)
class LayoutConfig:
    """Hexagonal site layout; the center cell is the Voronoi hexagon of site 0."""

    isd_m: float = 500.0
    num_sites: int = 7
    trp_height_m: float = 25.0
    cell_radius_m: float | None = None  # circumradius; default isd / sqrt(3)

    @property
    def radius(self) -> float:
        return self.cell_radius_m if self.cell_radius_m is not None else self.isd_m / math.sqrt(3.0)


@dataclass(frozen=True)
class ScenarioConfig:
    scenario_id: str = "UMa-AV"
    carrier_frequency_hz: float = 6e9
    bandwidth_hz: float = 100e6
    sensing_mode: str = "TRP-monostatic"
    tx_power_dbm: float = 56.0
    noise_figure_db: float = 5.0
    num_uts: int = 30
    num_targets: int = 1
    target_type: str = "uav_small"
    target_height_m: float = 200.0
    target_speed_mps: float = 0.0
    target_size_m: tuple[float, float, float] = (0.0, 0.0, 0.0)
    rcs_mode: str = "single_spst"
    ut_height_m: float = 1.5
    min_dist_tx_target_m: float = 10.0
    min_dist_target_target_m: float | None = None
    layout: LayoutConfig = field(default_factory=LayoutConfig)

    def __post_init__(self):
        if self.scenario_id not in SCENARIO_IDS:
            raise ConfigError(f"unknown scenario {self.scenario_id!r} (expected one of {SCENARIO_IDS})")
        if self.min_dist_tx_target_m <= 0:
            raise ConfigError("min_dist_tx_target_m must be positive")
        if not (0.5e9 <= self.carrier_frequency_hz <= 100e9):
            raise ConfigError("carrier frequency must lie in [0.5, 100] GHz")
        if self.sensing_mode not in SENSING_MODES:
            raise ConfigError(f"unknown sensing mode {self.sensing_mode!r}")
        if self.num_uts < 0 or self.num_targets < 1:
            raise ConfigError("need num_uts >= 0 and num_targets >= 1")

    @property
    def min_dist_target_target(self) -> float:
        return (
            self.min_dist_target_target_m
            if self.min_dist_target_target_m is not None
            else self.min_dist_tx_target_m
        )


@dataclass(frozen=True)
class NodeState:
    pose: Pose
    velocity: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))


@dataclass(frozen=True)
class TargetState:
    pose: Pose
    velocity: np.ndarray
    target_type: str
    size: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))


@dataclass
class Drop:
    """One Monte-Carlo realization of node and target placements."""

    seed: int
    trps: list[NodeState]
    uts: list[NodeState]
    targets: list[TargetState]
    eos: list = field(default_factory=list)

    def node(self, kind: str, index: int) -> NodeState:
        return (self.trps if kind == "trp" else self.uts)[index]


@dataclass(frozen=True)
class SensingLink:
    """A sensing Tx/Rx pair, optionally bound to a target index."""

    tx_kind: str
    tx_index: int
    rx_kind: str
    rx_index: int
    target_index: int | None = None
    monostatic: bool = False

    def __post_init__(self):
        if self.monostatic and (self.tx_kind, self.tx_index) != (self.rx_kind, self.rx_index):
            raise ConfigError("monostatic links must be co-located")

    @property
    def link_id(self) -> str:
        t = f"t{self.target_index}" if self.target_index is not None else "bg"
        return f"{self.tx_kind}{self.tx_index}-{self.rx_kind}{self.rx_index}-{t}"


def site_positions(layout: LayoutConfig) -> np.ndarray:
    """Hexagonal grid positions (num_sites, 3): center site plus rings of 6."""
    pts = [np.array([0.0, 0.0, layout.trp_height_m])]
    ring = 1
    while len(pts) < layout.num_sites:
        for k in range(6 * ring):
            ang = math.radians(60.0 * k / ring)
            r = layout.isd_m * ring
            pts.append(np.array([r * math.cos(ang), r * math.sin(ang), layout.trp_height_m]))
            if len(pts) == layout.num_sites:
                break
        ring += 1
    return np.array(pts[: layout.num_sites])


_HEX_DIRS = np.array(
    [[math.cos(math.radians(60.0 * k)), math.sin(math.radians(60.0 * k))] for k in range(6)]
)


def _in_center_cell(xy: np.ndarray, layout: LayoutConfig) -> np.ndarray:
    """Mask of points inside the center cell hexagon (flat sides toward neighbors)."""
    inradius = layout.radius * math.sqrt(3.0) / 2.0
    return np.all(xy @ _HEX_DIRS.T <= inradius + 1e-12, axis=-1)


def _uniform_in_cell(rng: np.random.Generator, layout: LayoutConfig, count: int) -> np.ndarray:
    """count points uniform in the center cell, by batched rejection from the bounding box."""
    out = np.empty((0, 2))
    r = layout.radius
    while out.shape[0] < count:
        batch = rng.uniform(-r, r, size=(max(2 * (count - out.shape[0]), 8), 2))
        out = np.vstack([out, batch[_in_center_cell(batch, layout)]])
    return out[:count]


def generate_drop(cfg: ScenarioConfig, seed: int, eos: list | None = None) -> Drop:
    """Place all nodes for one drop; pure function of (cfg, seed).

    Targets violating a minimum 3D distance to any TRP/UT (or to an
    earlier target) are rejection-resampled up to 10k times before
    PlacementInfeasible is raised.
    """
    rng = substream(seed, "drop")
    trp_pos = site_positions(cfg.layout)
    trps = [NodeState(Pose(p, 0.0), np.zeros(3)) for p in trp_pos]

    ut_xy = _uniform_in_cell(rng, cfg.layout, cfg.num_uts)
    uts = [
        NodeState(Pose(np.array([x, y, cfg.ut_height_m]), 0.0), np.zeros(3))
        for x, y in ut_xy
    ]

    node_positions = np.vstack([trp_pos] + ([np.column_stack([ut_xy, np.full(cfg.num_uts, cfg.ut_height_m)])] if cfg.num_uts else []))

    targets: list[TargetState] = []
    for _ in range(cfg.num_targets):
        placed = False
        for _attempt in range(10_000):
            xy = _uniform_in_cell(rng, cfg.layout, 1)[0]
            pos = np.array([xy[0], xy[1], cfg.target_height_m])
            d_nodes = np.linalg.norm(node_positions - pos, axis=1)
            if np.any(d_nodes < cfg.min_dist_tx_target_m):
                continue
            if targets and any(
                np.linalg.norm(t.pose.position - pos) < cfg.min_dist_target_target for t in targets
            ):
                continue
            heading = rng.uniform(-180.0, 180.0)
            h = math.radians(heading)
            vel = cfg.target_speed_mps * np.array([math.cos(h), math.sin(h), 0.0])
            targets.append(TargetState(Pose(pos, heading), vel, cfg.target_type, cfg.target_size_m))
            placed = True
            break
        if not placed:
            raise PlacementInfeasible(
                f"could not place target under min distance {cfg.min_dist_tx_target_m} m after 10k retries"
            )

    return Drop(seed=seed, trps=trps, uts=uts, targets=targets, eos=list(eos or []))


def candidate_links(cfg: ScenarioConfig, drop: Drop, target_index: int = 0) -> list[SensingLink]:
    """All Tx/Rx pairs allowed by the sensing mode, bound to one target."""
    mode = cfg.sensing_mode
    n_trp = len(drop.trps)
    n_ut = len(drop.uts)
    out: list[SensingLink] = []
    if mode == "TRP-monostatic":
        out = [SensingLink("trp", i, "trp", i, target_index, True) for i in range(n_trp)]
    elif mode == "TRP-TRP":
        out = [
            SensingLink("trp", i, "trp", j, target_index)
            for i in range(n_trp)
            for j in range(n_trp)
            if i != j
        ]
    elif mode == "TRP-UT":
        out = [
            SensingLink("trp", i, "ut", j, target_index)
            for i in range(n_trp)
            for j in range(n_ut)
        ]
    elif mode == "UT-UT":
        out = [
            SensingLink("ut", i, "ut", j, target_index)
            for i in range(n_ut)
            for j in range(n_ut)
            if i != j
        ]
    elif mode == "UT-monostatic":
        out = [SensingLink("ut", i, "ut", i, target_index, True) for i in range(n_ut)]
    return out


def select_sensing_pairs(candidates: list[SensingLink], n: int, coupling) -> list[SensingLink]:
    """The n candidates with the smallest power scaling factor.

    coupling(link) -> dB; ties break on ascending (tx index, rx index).
    Fewer candidates than n returns them all (sorted).
    """
    ranked = sorted(candidates, key=lambda lk: (coupling(lk), lk.tx_index, lk.rx_index))
    return ranked[:n]
