"""Geometry-based stochastic channel simulator for integrated sensing and
communication: target channels with RCS-weighted concatenation, bistatic and
multi-reference-point monostatic background channels, Doppler and
micro-Doppler, spatial consistency, environment objects, and a drop-campaign
calibration harness.
"""

from .campaign import CampaignSpec, CdfResult, compute_spreads, run_campaign, simulate_drop
from .config import SimulationConfig, load, loads
from .errors import (
    ConfigError,
    DegenerateGeometry,
    DistanceOutOfRange,
    EmptyPathSet,
    InconsistentLink,
    IsacSimError,
    NoFaceCovers,
    PlacementInfeasible,
    TooManyShared,
    UnsupportedScenario,
)
from .geometry import Pose, SphericalAngle
from .paths import PathSet
from .scenario import Drop, ScenarioConfig, SensingLink, generate_drop, select_sensing_pairs
from .synthesis import AntennaPattern, Cir, SynthesisConfig, assemble_cir

__version__ = "0.1.0"

__all__ = [
    "AntennaPattern",
    "CampaignSpec",
    "CdfResult",
    "Cir",
    "ConfigError",
    "DegenerateGeometry",
    "DistanceOutOfRange",
    "Drop",
    "EmptyPathSet",
    "InconsistentLink",
    "IsacSimError",
    "NoFaceCovers",
    "PathSet",
    "PlacementInfeasible",
    "Pose",
    "ScenarioConfig",
    "SensingLink",
    "SimulationConfig",
    "SphericalAngle",
    "SynthesisConfig",
    "TooManyShared",
    "UnsupportedScenario",
    "assemble_cir",
    "compute_spreads",
    "generate_drop",
    "load",
    "loads",
    "run_campaign",
    "select_sensing_pairs",
    "simulate_drop",
    "__version__",
]
