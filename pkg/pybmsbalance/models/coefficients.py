"""Dampening coefficients, Lamb shift and the Liouvillian superoperator."""

from typing import Any

import numpy as np
from pydantic import Field, field_validator

from .base import FrozenModel, frozen_array

GammaKey = tuple[int, int, int, int]
SigmaKey = tuple[int, int]


class BmsCoefficients(FrozenModel):
    """Sparse dampening coefficients gamma~_{ab,cd} and Lamb shift sigma~_{ab}.

    Indices refer to the joint eigenbasis whose energies are stored alongside,
    so coefficient sets built on different eigenstructures can be told apart.
    """

    dim: int = Field(..., ge=1)
    energies: np.ndarray
    gamma: dict[GammaKey, complex] = Field(default_factory=dict)
    sigma: dict[SigmaKey, complex] = Field(default_factory=dict)
    per_bath: tuple["BmsCoefficients", ...] | None = None
    labels: tuple[str, ...] = ()

    @field_validator("energies", mode="before")
    @classmethod
    def _real_vector(cls, value: Any) -> np.ndarray:
        return frozen_array(value, float)

    @property
    def bath_count(self) -> int:
        """Number of reservoirs that contributed to the coefficients."""
        return len(self.per_bath) if self.per_bath else 1

    @property
    def max_magnitude(self) -> float:
        """Largest |gamma~| entry (0 for an empty set)."""
        return max((abs(v) for v in self.gamma.values()), default=0.0)

    def rate(self, target: int, source: int) -> float:
        """Population rate source -> target, gamma~_{ts,ts}."""
        return float(self.gamma.get((target, source, target, source), 0.0).real)

    def bath_sets(self) -> tuple["BmsCoefficients", ...]:
        """Per-reservoir coefficient sets (the set itself for a single bath)."""
        return self.per_bath if self.per_bath else (self,)


class Liouvillian(FrozenModel):
    """d^2 x d^2 generator acting on column-major vectorized density matrices.

    The density matrix is expressed in the joint eigenbasis of the system.
    """

    matrix: np.ndarray
    dim: int = Field(..., ge=1)
    bath_labels: tuple[str, ...] = ()
    includes_hamiltonian: bool = True

    @field_validator("matrix", mode="before")
    @classmethod
    def _complex_matrix(cls, value: Any) -> np.ndarray:
        return frozen_array(value, complex)

    @property
    def norm(self) -> float:
        """Max-norm of the generator matrix."""
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """Apply the generator to a density matrix and return d rho / dt."""
        vector = np.asarray(rho, dtype=complex).reshape(-1, order="F")
        return (self.matrix @ vector).reshape(self.dim, self.dim, order="F")


class LindbladFormReport(FrozenModel):
    """Smallest eigenvalue of gamma~ within each secular frequency block."""

    block_minima: dict[float, float] = Field(default_factory=dict)
    tolerance: float
    passed: bool

    @property
    def minimum(self) -> float:
        """Smallest eigenvalue across all blocks."""
        return min(self.block_minima.values(), default=0.0)
