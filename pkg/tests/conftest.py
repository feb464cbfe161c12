"""Shared fixtures for the pybmsbalance test suite."""

import numpy as np
import pytest

from pybmsbalance.models import (
    BathSpec,
    ConstantProfile,
    LorentzianProfile,
    Statistics,
)


@pytest.fixture
def make_bath():
    """Factory for baths with a constant or Lorentzian rate profile."""

    def factory(
        statistics: str = "fermi",
        beta: float = 1.0,
        mu: float = 0.0,
        gamma: float = 1.0,
        center: float | None = None,
        width: float = 1.0,
        label: str = "",
    ) -> BathSpec:
        if center is None:
            profile = ConstantProfile(gamma=gamma)
        else:
            profile = LorentzianProfile(gamma=gamma, center=center, width=width)
        return BathSpec(
            statistics=Statistics(statistics),
            beta=beta,
            mu=mu,
            profile=profile,
            label=label,
        )

    return factory


@pytest.fixture
def rng():
    """Seeded random generator."""
    return np.random.default_rng(20240611)
