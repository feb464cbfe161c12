"""Data models for pybmsbalance."""

from .base import FrozenModel, HermitianOperator, SystemModel
from .bath import (
    BathSpec,
    Channel,
    ConstantProfile,
    KmsReport,
    LorentzianProfile,
    MeanTemperature,
    RateProfile,
    SpectralMatrix,
    Statistics,
    TabulatedProfile,
)
from .bundle import ModelBundle
from .coefficients import BmsCoefficients, LindbladFormReport, Liouvillian
from .ladder import (
    EffectiveThermalFit,
    RateLadder,
    SolverMethod,
    StationaryState,
    Trajectory,
)
from .report import BalanceReport, GibbsResidual
from .scenario import (
    GridSpec,
    ModelSpec,
    OutputSpec,
    PresetName,
    PresetParams,
    RunMode,
    ScenarioConfig,
    SolverOptions,
    SweepSpec,
    read_scenario_mapping,
)
from .structure import BohrFrequency, CouplingReport, CouplingSelection, EigenStructure

__all__ = [
    "FrozenModel",
    "HermitianOperator",
    "SystemModel",
    "BathSpec",
    "Channel",
    "ConstantProfile",
    "LorentzianProfile",
    "TabulatedProfile",
    "RateProfile",
    "Statistics",
    "SpectralMatrix",
    "KmsReport",
    "MeanTemperature",
    "ModelBundle",
    "BmsCoefficients",
    "Liouvillian",
    "LindbladFormReport",
    "RateLadder",
    "SolverMethod",
    "StationaryState",
    "Trajectory",
    "EffectiveThermalFit",
    "BalanceReport",
    "GibbsResidual",
    "GridSpec",
    "ModelSpec",
    "OutputSpec",
    "PresetName",
    "PresetParams",
    "RunMode",
    "ScenarioConfig",
    "SolverOptions",
    "SweepSpec",
    "read_scenario_mapping",
    "EigenStructure",
    "BohrFrequency",
    "CouplingSelection",
    "CouplingReport",
]
