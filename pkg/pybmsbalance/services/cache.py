"""Cache management for assembled generator data."""

import logging

from ..models import BathSpec, BmsCoefficients, EigenStructure

logger = logging.getLogger(__name__)


class AssemblyCache:
    """Keeps the eigenstructure and per-bath coefficients of one system."""

    def __init__(self) -> None:
        """Initialize an empty cache."""
        self._eigenstructure: EigenStructure | None = None
        self._coefficients: dict[str, BmsCoefficients] = {}

    @staticmethod
    def _key(bath: BathSpec) -> str:
        return bath.model_dump_json()

    def get_eigenstructure(self) -> EigenStructure | None:
        """Get the cached eigenstructure."""
        return self._eigenstructure

    def set_eigenstructure(self, eig: EigenStructure) -> None:
        """Store the eigenstructure; coefficients built on an older one are dropped."""
        if self._eigenstructure is not None and self._coefficients:
            self._coefficients.clear()
        self._eigenstructure = eig
        logger.debug("Eigenstructure of dimension %d cached", eig.dim)

    def has_eigenstructure(self) -> bool:
        """Check if an eigenstructure is cached."""
        return self._eigenstructure is not None

    def get_coefficients(self, bath: BathSpec) -> BmsCoefficients | None:
        """Get the cached coefficients of one bath."""
        return self._coefficients.get(self._key(bath))

    def set_coefficients(self, bath: BathSpec, coeff: BmsCoefficients) -> None:
        """Store the coefficients of one bath."""
        self._coefficients[self._key(bath)] = coeff
        logger.debug("Coefficients for bath %r cached", bath.label)

    def invalidate_cache(self) -> None:
        """Drop everything."""
        self._eigenstructure = None
        self._coefficients.clear()
        logger.debug("Cache invalidated")

    def __len__(self) -> int:
        return len(self._coefficients)
