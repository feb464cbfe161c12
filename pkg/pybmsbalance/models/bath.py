"""Bath models: statistics, tunneling-rate profiles and spectral matrices."""

from collections.abc import Callable
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from .base import FrozenModel, frozen_array


class Statistics(str, Enum):
    """Particle statistics of a reservoir."""

    FERMI = "fermi"
    BOSE = "bose"

    @property
    def sign(self) -> int:
        """The +/- of 1 +/- F in the factorized rates (+1 Bose, -1 Fermi)."""
        return 1 if self is Statistics.BOSE else -1


class ConstantProfile(BaseModel):
    """Frequency-independent tunneling rate."""

    kind: Literal["constant"] = "constant"
    gamma: float = Field(..., ge=0)


class LorentzianProfile(BaseModel):
    """Lorentzian rate with peak ``gamma`` at ``center`` and half-width ``width``."""

    kind: Literal["lorentzian"] = "lorentzian"
    gamma: float = Field(..., ge=0)
    center: float
    width: float = Field(..., gt=0)


class TabulatedProfile(BaseModel):
    """Piecewise-linear rate table, zero outside its range."""

    kind: Literal["tabulated"] = "tabulated"
    omegas: list[float]
    gammas: list[float]

    @model_validator(mode="before")
    @classmethod
    def _load_from_path(cls, data: Any) -> Any:
        if isinstance(data, dict) and "path" in data:
            path = Path(data["path"])
            try:
                table = np.loadtxt(path, ndmin=2)
            except OSError as e:
                raise ValueError(f"cannot read rate table {path}: {e}") from e
            if table.shape[0] == 0 or table.shape[1] < 2:
                raise ValueError(f"rate table {path} needs two columns omega gamma")
            data = {
                key: value
                for key, value in data.items()
                if key not in ("path", "omegas", "gammas")
            }
            data["omegas"] = table[:, 0].tolist()
            data["gammas"] = table[:, 1].tolist()
        return data

    @model_validator(mode="after")
    def _validate_table(self) -> "TabulatedProfile":
        if len(self.omegas) != len(self.gammas) or not self.omegas:
            raise ValueError("omegas and gammas must be non-empty and of equal length")
        if any(b <= a for a, b in zip(self.omegas, self.omegas[1:], strict=False)):
            raise ValueError("tabulated omegas must be strictly increasing")
        if any(g < 0 for g in self.gammas):
            raise ValueError("tabulated rates must be non-negative")
        return self


RateProfile = Annotated[
    ConstantProfile | LorentzianProfile | TabulatedProfile,
    Field(discriminator="kind"),
]


class BathSpec(BaseModel):
    """One thermal reservoir at inverse temperature beta and chemical potential mu."""

    statistics: Statistics
    beta: float = Field(..., gt=0)
    mu: float = 0.0
    profile: RateProfile
    label: str = ""

    @property
    def temperature(self) -> float:
        """Temperature 1/beta."""
        return 1.0 / self.beta


class Channel(FrozenModel):
    """Coupling-space direction that changes the particle number by ``delta_n``."""

    vector: np.ndarray
    delta_n: int

    @field_validator("vector", mode="before")
    @classmethod
    def _complex_vector(cls, value: Any) -> np.ndarray:
        return frozen_array(value, complex)


class SpectralMatrix(FrozenModel):
    """Matrix-valued even (gamma) and optional odd (sigma) bath transforms."""

    size: int = Field(..., ge=1)
    gamma: Callable[[float], np.ndarray]
    sigma: Callable[[float], np.ndarray] | None = None
    channels: tuple[Channel, ...] = ()
    label: str = ""

    def __call__(self, omega: float) -> np.ndarray:
        """Evaluate gamma(omega) as a size x size complex matrix."""
        return np.asarray(self.gamma(omega), dtype=complex)

    def lamb(self, omega: float) -> np.ndarray:
        """Evaluate sigma(omega); zero when no Lamb-shift input was supplied."""
        if self.sigma is None:
            return np.zeros((self.size, self.size), dtype=complex)
        return np.asarray(self.sigma(omega), dtype=complex)


class KmsReport(BaseModel):
    """Outcome of a KMS check on a frequency grid."""

    max_relative_violation: float
    worst_omega: float | None = None
    max_cross_channel: float = 0.0
    channel_based: bool
    mu_shift_inferred: bool
    profile_asymmetric: bool
    passed: bool
    notes: list[str] = Field(default_factory=list)


class MeanTemperature(BaseModel):
    """Low-energy mean temperature of several baths."""

    statistics: Statistics
    temperature: float
    regime_warning: bool
