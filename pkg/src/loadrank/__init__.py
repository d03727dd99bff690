"""Occupancy-aware stochastic ranking and curtailment of commercial-building loads."""

from .domain import (
    Appliance,
    ApplianceKind,
    Building,
    ControlAlternative,
    ControlSetting,
    CriteriaConfig,
    Floor,
    Zone,
    default_building,
    enumerate_alternatives,
    load_building,
    validate_criteria,
)
from .scoring import (
    CurtailmentScaleParams,
    ScoreDistribution,
    comfort_hvac,
    comfort_light,
    comfort_plug,
    curtailment_score,
    score_alternative,
)
from .mcdm import (
    OutcomeClassification,
    PairwiseComparison,
    RankingResult,
    brute_force_rank,
    classify_outcomes,
    rank,
    win_probability,
)
from .occupancy import (
    OccupancyForecast,
    OccupancyModel,
    OccupancyTrace,
    OfficeProfile,
    fit_occupancy,
    forecast,
    generate_office_trace,
    simulate,
)
from .chiller import ChillerModel, ChillerObservation, fit_chiller, predict_power, setpoint_power_delta
from .emulator import BuildingEmulator, Snapshot, WeatherProfile
from .controller import CurtailmentEvent, DispatchPlan, decide, run_event

__all__ = [
    "Appliance",
    "ApplianceKind",
    "Building",
    "BuildingEmulator",
    "ChillerModel",
    "ChillerObservation",
    "ControlAlternative",
    "ControlSetting",
    "CriteriaConfig",
    "CurtailmentEvent",
    "CurtailmentScaleParams",
    "DispatchPlan",
    "Floor",
    "OccupancyForecast",
    "OccupancyModel",
    "OccupancyTrace",
    "OfficeProfile",
    "OutcomeClassification",
    "PairwiseComparison",
    "RankingResult",
    "ScoreDistribution",
    "Snapshot",
    "WeatherProfile",
    "Zone",
    "brute_force_rank",
    "classify_outcomes",
    "comfort_hvac",
    "comfort_light",
    "comfort_plug",
    "curtailment_score",
    "decide",
    "default_building",
    "enumerate_alternatives",
    "fit_chiller",
    "fit_occupancy",
    "forecast",
    "generate_office_trace",
    "load_building",
    "predict_power",
    "rank",
    "run_event",
    "score_alternative",
    "setpoint_power_delta",
    "simulate",
    "validate_criteria",
    "win_probability",
]

__version__ = "0.1.0"
