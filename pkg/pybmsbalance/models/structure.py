"""Joint eigenstructure of the system Hamiltonian and number operator."""

from typing import Any

import numpy as np
from pydantic import BaseModel, Field, field_validator

from .base import FrozenModel, frozen_array


class EigenStructure(FrozenModel):
    """Simultaneous eigenbasis of H_S and N_S with its degeneracy clusters."""

    energies: np.ndarray
    numbers: np.ndarray
    basis: np.ndarray
    energy_clusters: tuple[tuple[int, ...], ...]
    number_clusters: tuple[tuple[int, ...], ...]
    degeneracy_tol: float = Field(..., gt=0)

    @field_validator("energies", "numbers", mode="before")
    @classmethod
    def _real_vector(cls, value: Any) -> np.ndarray:
        return frozen_array(value, float)

    @field_validator("basis", mode="before")
    @classmethod
    def _complex_matrix(cls, value: Any) -> np.ndarray:
        return frozen_array(value, complex)

    @property
    def dim(self) -> int:
        """Number of eigenstates."""
        return int(self.energies.shape[0])

    @property
    def cluster_labels(self) -> np.ndarray:
        """Energy-cluster index of every eigenstate."""
        labels = np.empty(self.dim, dtype=int)
        for label, cluster in enumerate(self.energy_clusters):
            labels[list(cluster)] = label
        return labels

    @property
    def integer_numbers(self) -> np.ndarray:
        """Particle numbers counted from the lowest eigenvalue of N_S.

        Only differences N_a - N_b enter the dynamics, so a constant offset such
        as the 1/2 of N_S = -sigma_z/2 is removed before rounding.
        """
        offset = float(np.min(self.numbers)) if self.dim else 0.0
        return np.rint(self.numbers - offset).astype(int)

    def to_eigenbasis(self, operator: np.ndarray) -> np.ndarray:
        """Express a computational-basis matrix in the joint eigenbasis."""
        return self.basis.conj().T @ operator @ self.basis

    def from_eigenbasis(self, operator: np.ndarray) -> np.ndarray:
        """Express an eigenbasis matrix in the computational basis."""
        return self.basis @ operator @ self.basis.conj().T


class BohrFrequency(BaseModel):
    """One secular frequency and its transitions (a, b) with E_b - E_a = omega."""

    omega: float
    transitions: tuple[tuple[int, int], ...]


class CouplingSelection(BaseModel):
    """Number changes induced by one coupling operator."""

    index: int
    delta_n: tuple[int, ...]
    mixes_raise_and_lower: bool
    beyond_ladder: bool


class CouplingReport(BaseModel):
    """Selection-rule diagnostics for all coupling operators."""

    couplings: list[CouplingSelection]
    per_bath: list[tuple[int, ...]] = Field(default_factory=list)
    warnings: list[str] = Field(default_factory=list)

    @property
    def ladder_compatible(self) -> bool:
        """True when no coupling changes the number by more than one quantum."""
        return not any(c.beyond_ladder for c in self.couplings)
