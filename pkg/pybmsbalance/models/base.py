"""Base model components: immutable array-carrying models and operators."""

import logging
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..config import (
    COMMUTATION_RTOL,
    DEFAULT_REFERENCE_UNIT,
    HERMITICITY_TOL,
    ORTHONORMALITY_TOL,
    TRACELESS_TOL,
)
from ..errors import CommutationError, HermiticityError, ModelValidationError

logger = logging.getLogger(__name__)


def frozen_array(value: Any, dtype: type = float) -> np.ndarray:
    """Copy ``value`` into a read-only numpy array of the given dtype."""
    array = np.array(value, dtype=dtype)
    array.setflags(write=False)
    return array


def max_norm(matrix: np.ndarray) -> float:
    """Largest absolute entry of an array (0 for empty arrays)."""
    return float(np.max(np.abs(matrix))) if matrix.size else 0.0


class FrozenModel(BaseModel):
    """Immutable pydantic model that may carry numpy arrays."""

    model_config = ConfigDict(
        frozen=True, arbitrary_types_allowed=True, populate_by_name=True
    )


class HermitianOperator(FrozenModel):
    """A dense hermitian matrix acting on the system Hilbert space."""

    entries: np.ndarray
    label: str = ""

    @field_validator("entries", mode="before")
    @classmethod
    def _validate_entries(cls, value: Any) -> np.ndarray:
        matrix = np.array(value, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise HermiticityError(f"Operator must be square, got shape {matrix.shape}")
        if matrix.shape[0] < 1:
            raise HermiticityError("Operator dimension must be at least 1")
        deviation = max_norm(matrix - matrix.conj().T)
        if deviation > HERMITICITY_TOL:
            raise HermiticityError(
                f"Operator deviates from hermiticity by {deviation:.3e}"
            )
        return frozen_array(matrix, complex)

    @property
    def dim(self) -> int:
        """Hilbert space dimension."""
        return int(self.entries.shape[0])


class SystemModel(FrozenModel):
    """System Hamiltonian, conserved number operator and coupling operators."""

    hamiltonian: HermitianOperator
    number_op: HermitianOperator
    couplings: list[HermitianOperator] = Field(default_factory=list)
    energy_unit_label: str = DEFAULT_REFERENCE_UNIT

    @model_validator(mode="after")
    def _validate_structure(self) -> "SystemModel":
        dim = self.hamiltonian.dim
        if self.number_op.dim != dim or any(a.dim != dim for a in self.couplings):
            raise ModelValidationError(
                "Hamiltonian, number operator and couplings must share one dimension"
            )

        h, n = self.hamiltonian.entries, self.number_op.entries
        violation = max_norm(h @ n - n @ h)
        bound = COMMUTATION_RTOL * max_norm(h)
        if violation > bound:
            raise CommutationError(violation, bound)

        for index, coupling in enumerate(self.couplings):
            trace = abs(np.trace(coupling.entries))
            if trace > TRACELESS_TOL:
                raise ModelValidationError(
                    f"Coupling operator {index} has trace {trace:.3e}, expected zero"
                )

        if self.couplings and not self.couplings_orthonormal():
            # The model builders use unnormalized (trace-orthogonal) couplings.
            logger.warning(
                "Coupling operators are not orthonormal under Tr{A_a A_b}; continuing"
            )
        return self

    @property
    def dim(self) -> int:
        """Hilbert space dimension."""
        return self.hamiltonian.dim

    def couplings_orthonormal(self) -> bool:
        """Check Tr{A_a A_b} = delta_ab for the coupling operators."""
        stack = np.array([a.entries for a in self.couplings])
        gram = np.einsum("aij,bji->ab", stack, stack)
        return max_norm(gram - np.eye(len(self.couplings))) <= ORTHONORMALITY_TOL
