"""Rate ladders, stationary states, trajectories and effective thermal fits."""

from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from ..errors import LadderStructureError
from .base import FrozenModel, frozen_array


class RateLadder(FrozenModel):
    """Tridiagonal up/down rates between number-ordered levels.

    ``up[m]`` is the rate m -> m+1 and ``down[m]`` the rate m+1 -> m; both are
    evaluated at ``omega[m] = E_{m+1} - E_m``.
    """

    levels: int = Field(..., ge=1)
    omega: np.ndarray
    up: np.ndarray
    down: np.ndarray
    numbers: np.ndarray | None = None
    energies: np.ndarray | None = None
    per_bath_up: np.ndarray | None = None
    per_bath_down: np.ndarray | None = None

    @field_validator("omega", "up", "down", mode="before")
    @classmethod
    def _real_vector(cls, value: Any) -> np.ndarray:
        return frozen_array(np.atleast_1d(np.asarray(value, dtype=float)), float)

    @field_validator(
        "numbers", "energies", "per_bath_up", "per_bath_down", mode="before"
    )
    @classmethod
    def _optional_array(cls, value: Any) -> np.ndarray | None:
        return None if value is None else frozen_array(value, float)

    @model_validator(mode="after")
    def _validate_rates(self) -> "RateLadder":
        links = self.levels - 1
        for name in ("omega", "up", "down"):
            if getattr(self, name).shape != (links,):
                raise LadderStructureError(
                    f"Ladder with {self.levels} levels needs {links} {name} entries"
                )
        if np.any(self.up < 0) or np.any(self.down < 0):
            raise LadderStructureError("Ladder rates must be non-negative")
        for name in ("per_bath_up", "per_bath_down"):
            split = getattr(self, name)
            if split is not None and (split.ndim != 2 or split.shape[1] != links):
                raise LadderStructureError(f"{name} must have shape (baths, {links})")
        return self

    @property
    def links(self) -> int:
        """Number of nearest-neighbour links."""
        return self.levels - 1

    @property
    def bath_count(self) -> int:
        """Number of reservoirs in the per-bath split (1 without a split)."""
        return 1 if self.per_bath_up is None else int(self.per_bath_up.shape[0])

    def scaled(self, factors: np.ndarray) -> "RateLadder":
        """Ladder with the rates of each link multiplied by ``factors``."""
        factors = np.asarray(factors, dtype=float)
        return self.model_copy(
            update={
                "up": frozen_array(self.up * factors),
                "down": frozen_array(self.down * factors),
                "per_bath_up": None,
                "per_bath_down": None,
            }
        )


class SolverMethod(str, Enum):
    """How a stationary state was obtained."""

    LADDER_RECURSION = "ladder_recursion"
    NULLSPACE = "nullspace"
    TIME_EVOLUTION = "time_evolution"


class StationaryState(FrozenModel):
    """Stationary populations, optionally with the full density matrix."""

    populations: np.ndarray
    method: SolverMethod
    residual: float = Field(..., ge=0)
    unique: bool = True
    density_matrix: np.ndarray | None = None
    nullspace_basis: tuple[np.ndarray, ...] = ()
    warnings: tuple[str, ...] = ()

    @field_validator("populations", mode="before")
    @classmethod
    def _real_vector(cls, value: Any) -> np.ndarray:
        return frozen_array(value, float)

    @field_validator("density_matrix", mode="before")
    @classmethod
    def _optional_matrix(cls, value: Any) -> np.ndarray | None:
        return None if value is None else frozen_array(value, complex)

    @property
    def ratios(self) -> np.ndarray:
        """Successive population ratios rho_{m+1} / rho_m (inf where rho_m is 0)."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.populations[1:] / self.populations[:-1]


class Trajectory(FrozenModel):
    """Density matrices sampled along a fixed-step integration."""

    times: np.ndarray
    states: np.ndarray
    max_trace_drift: float
    final_deviation: float | None = None

    @field_validator("times", mode="before")
    @classmethod
    def _real_vector(cls, value: Any) -> np.ndarray:
        return frozen_array(value, float)

    @field_validator("states", mode="before")
    @classmethod
    def _state_stack(cls, value: Any) -> np.ndarray:
        return frozen_array(value, complex)

    @property
    def final_state(self) -> np.ndarray:
        """Density matrix at the last recorded time."""
        return self.states[-1]

    def populations(self) -> np.ndarray:
        """Diagonal of every recorded state, shape (samples, dim)."""
        return np.real(np.einsum("tii->ti", self.states))


class EffectiveThermalFit(BaseModel):
    """Least-squares effective inverse temperature and chemical potential."""

    beta_bar: float
    mu_bar: float
    consistency: float
    inverted: bool = False
    underdetermined: bool = False

    @property
    def temperature(self) -> float:
        """Effective temperature 1 / beta_bar (inf for beta_bar = 0)."""
        return float("inf") if self.beta_bar == 0 else 1.0 / self.beta_bar
