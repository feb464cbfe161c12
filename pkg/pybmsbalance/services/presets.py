"""Built-in example systems in their symmetry-reduced ladder bases."""

import logging

import numpy as np

from ..errors import PreconditionError
from ..models import (
    HermitianOperator,
    ModelBundle,
    PresetName,
    PresetParams,
    Statistics,
    SystemModel,
)

logger = logging.getLogger(__name__)


def single_particle_couplings(raising: np.ndarray) -> list[HermitianOperator]:
    """A1 = R + R^dag and A2 = i(R - R^dag) for a number-raising operator R."""
    lowering = raising.conj().T
    return [
        HermitianOperator(entries=raising + lowering, label="A1"),
        HermitianOperator(entries=1j * (raising - lowering), label="A2"),
    ]


def _ladder_bundle(
    name: str,
    energies: np.ndarray,
    numbers: np.ndarray,
    raising_elements: np.ndarray,
    statistics: tuple[Statistics, ...],
    notes: str,
    parameters: dict[str, float],
) -> ModelBundle:
    levels = energies.size
    raising = np.zeros((levels, levels))
    raising[np.arange(1, levels), np.arange(levels - 1)] = raising_elements
    model = SystemModel(
        hamiltonian=HermitianOperator(entries=np.diag(energies), label="H_S"),
        number_op=HermitianOperator(entries=np.diag(numbers), label="N_S"),
        couplings=single_particle_couplings(raising),
    )
    logger.debug("Built %s model with %d levels", name, levels)
    return ModelBundle(
        name=name,
        model=model,
        g_factors=raising_elements**2,
        frequencies=np.diff(energies),
        bath_statistics=statistics,
        notes=notes,
        parameters=parameters,
    )


def build_electronic(
    n_sites: int, epsilon: float, interaction: float, hopping: float
) -> ModelBundle:
    """
    Permutation-symmetric interacting sites coupled to fermionic leads.

    Levels m = 0..N carry E_m = m eps + m(m - 1) U / 2 + m (N - m) T and
    <m+1|D^dag|m> = sqrt((N - m)(m + 1)).
    """
    if n_sites < 1:
        raise PreconditionError(f"Need at least one site, got {n_sites}")
    m = np.arange(n_sites + 1, dtype=float)
    energies = m * epsilon + m * (m - 1) * interaction / 2 + m * (n_sites - m) * hopping
    elements = np.sqrt((n_sites - m[:-1]) * (m[:-1] + 1))
    notes = "single resonant level" if n_sites == 1 else ""
    if n_sites > 1 and np.isclose(interaction, 2 * hopping):
        notes = "equidistant spectrum (U = 2T)"
    return _ladder_bundle(
        "electronic",
        energies,
        m,
        elements,
        (Statistics.FERMI,),
        notes,
        {"N": n_sites, "eps": epsilon, "U": interaction, "T": hopping},
    )


def build_oscillator(omega: float, n_cut: int) -> ModelBundle:
    """Harmonic mode Omega b^dag b truncated after ``n_cut`` quanta."""
    if omega <= 0:
        raise PreconditionError(f"Omega must be positive, got {omega}")
    if n_cut < 1:
        raise PreconditionError(f"N_cut must be at least 1, got {n_cut}")
    n = np.arange(n_cut + 1, dtype=float)
    return _ladder_bundle(
        "oscillator",
        omega * n,
        n,
        np.sqrt(n[:-1] + 1),
        (Statistics.BOSE,),
        "successive population ratios do not depend on N_cut",
        {"Omega": omega, "N_cut": n_cut},
    )


def build_spin_boson(n_spins: int, omega: float) -> ModelBundle:
    """
    Collective spin of ``n_spins`` two-level systems in the j = N/2 multiplet.

    E_m = Omega m for m = -j..j, the particle number is m + j and the rates
    carry g_m = j(j + 1) - m(m + 1).
    """
    if n_spins < 1:
        raise PreconditionError(f"Need at least one spin, got {n_spins}")
    if omega <= 0:
        raise PreconditionError(f"Omega must be positive, got {omega}")
    j = n_spins / 2
    m = np.arange(n_spins + 1, dtype=float) - j
    elements = np.sqrt(j * (j + 1) - m[:-1] * (m[:-1] + 1))
    return _ladder_bundle(
        "spin-boson",
        omega * m,
        m + j,
        elements,
        (Statistics.BOSE,),
        "attached Bose baths need mu < Omega",
        {"N": n_spins, "Omega": omega},
    )


def build_mixed_spin(omega: float) -> ModelBundle:
    """Two-level system with one Bose slot and one Fermi slot."""
    if omega <= 0:
        raise PreconditionError(f"Omega must be positive, got {omega}")
    return _ladder_bundle(
        "mixed-spin",
        np.array([-omega / 2, omega / 2]),
        np.array([0.0, 1.0]),
        np.array([1.0]),
        (Statistics.BOSE, Statistics.FERMI),
        "bath 1 bosonic (needs mu < Omega), bath 2 fermionic",
        {"Omega": omega},
    )


def build_preset(name: PresetName, params: PresetParams) -> ModelBundle:
    """Build a preset from its configuration parameters."""
    if name is PresetName.ELECTRONIC:
        return build_electronic(
            params.levels, params.epsilon, params.interaction, params.hopping
        )
    if name is PresetName.OSCILLATOR:
        return build_oscillator(params.omega, params.n_cut)
    if name is PresetName.SPIN_BOSON:
        return build_spin_boson(params.levels, params.omega)
    return build_mixed_spin(params.omega)
