"""Ready-made example systems with their closed-form rate structure."""

from typing import Any

import numpy as np
from pydantic import Field, field_validator, model_validator

from ..errors import ModelValidationError
from .base import FrozenModel, SystemModel, frozen_array
from .bath import BathSpec, Statistics


class ModelBundle(FrozenModel):
    """A system model together with its ladder factors g_m and link frequencies."""

    name: str
    model: SystemModel
    g_factors: np.ndarray
    frequencies: np.ndarray
    bath_statistics: tuple[Statistics, ...] = ()
    notes: str = ""
    parameters: dict[str, float] = Field(default_factory=dict)

    @field_validator("g_factors", "frequencies", mode="before")
    @classmethod
    def _real_vector(cls, value: Any) -> np.ndarray:
        return frozen_array(np.atleast_1d(np.asarray(value, dtype=float)), float)

    @model_validator(mode="after")
    def _validate_links(self) -> "ModelBundle":
        links = self.model.dim - 1
        if self.g_factors.shape != (links,) or self.frequencies.shape != (links,):
            raise ModelValidationError(
                f"Bundle {self.name!r} needs {links} g factors and link frequencies"
            )
        return self

    @property
    def levels(self) -> int:
        """Number of ladder levels."""
        return self.model.dim

    def predicted_ratios(self, baths: list[BathSpec]) -> np.ndarray:
        """Generalized Boltzmann factor at every link frequency of the bundle."""
        from ..services.steady import generalized_boltzmann_ratio

        return np.array(
            [generalized_boltzmann_ratio(float(w), baths) for w in self.frequencies]
        )
