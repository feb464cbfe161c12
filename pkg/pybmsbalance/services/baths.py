"""Occupation functions, rate profiles, spectral matrices and multi-bath averages."""

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from scipy.special import expit

from ..config import (
    BALANCE_ABSOLUTE_FLOOR,
    EXPONENT_SATURATION,
    KMS_TOLERANCE,
    LOW_ENERGY_WARNING,
    PSD_TOLERANCE,
    RELATIVE_FLOOR,
)
from ..errors import (
    ChemicalPotentialDomainError,
    PreconditionError,
    StatisticsMismatchError,
    UndefinedAverageError,
)
from ..models import (
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

logger = logging.getLogger(__name__)

# Raising channel of the built-in couplings A1 = R + R^dag, A2 = i(R - R^dag).
RAISING_CHANNEL = np.array([1.0, 1.0j]) / np.sqrt(2.0)


def _require(bath: BathSpec, statistics: Statistics) -> None:
    if bath.statistics is not statistics:
        raise StatisticsMismatchError(
            f"Bath {bath.label or '?'} has {bath.statistics.value} statistics, "
            f"expected {statistics.value}"
        )


def fermi_occupation(omega: float, bath: BathSpec) -> float:
    """
    Fermi-Dirac occupation 1 / (exp(beta (omega - mu)) + 1).

    Saturates to exactly 0 or 1 once |beta (omega - mu)| reaches the
    saturation exponent.
    """
    _require(bath, Statistics.FERMI)
    x = bath.beta * (omega - bath.mu)
    if x >= EXPONENT_SATURATION:
        return 0.0
    if x <= -EXPONENT_SATURATION:
        return 1.0
    return float(expit(-x))


def bose_occupation(omega: float, bath: BathSpec) -> float:
    """
    Bose-Einstein occupation 1 / (exp(beta (omega - mu)) - 1).

    Raises:
        ChemicalPotentialDomainError: omega <= mu
    """
    _require(bath, Statistics.BOSE)
    x = bath.beta * (omega - bath.mu)
    if x <= 0:
        raise ChemicalPotentialDomainError(omega, bath.mu)
    if x >= EXPONENT_SATURATION:
        return 0.0
    return float(1.0 / np.expm1(x))


def occupation(omega: float, bath: BathSpec) -> float:
    """Occupation F(omega) of the bath according to its statistics."""
    if bath.statistics is Statistics.FERMI:
        return fermi_occupation(omega, bath)
    return bose_occupation(omega, bath)


def occupation_complement(omega: float, bath: BathSpec) -> float:
    """1 - f for fermions and 1 + n for bosons, without cancellation."""
    x = bath.beta * (omega - bath.mu)
    if bath.statistics is Statistics.FERMI:
        if x >= EXPONENT_SATURATION:
            return 1.0
        if x <= -EXPONENT_SATURATION:
            return 0.0
        return float(expit(x))
    if x <= 0:
        raise ChemicalPotentialDomainError(omega, bath.mu)
    if x >= EXPONENT_SATURATION:
        return 1.0
    return float(-1.0 / np.expm1(-x))


def rate_at(omega: float, profile: RateProfile) -> float:
    """Tunneling rate Gamma(omega) of a profile."""
    if isinstance(profile, ConstantProfile):
        return profile.gamma
    if isinstance(profile, LorentzianProfile):
        width2 = profile.width**2
        return profile.gamma * width2 / ((omega - profile.center) ** 2 + width2)
    if isinstance(profile, TabulatedProfile):
        return float(
            np.interp(omega, profile.omegas, profile.gammas, left=0.0, right=0.0)
        )
    raise TypeError(f"Unknown rate profile {type(profile).__name__}")


def bath_rate(omega: float, bath: BathSpec) -> float:
    """Rate profile of a bath; bosonic baths only absorb and emit at omega > 0."""
    if bath.statistics is Statistics.BOSE and omega <= 0:
        return 0.0
    return rate_at(omega, bath.profile)


def load_tabulated_profile(path: Path) -> TabulatedProfile:
    """Read a two-column ``omega gamma`` file."""
    return TabulatedProfile.model_validate({"kind": "tabulated", "path": Path(path)})


def _channel_matrix(emission: float, absorption: float) -> np.ndarray:
    # Eigenvalue absorption/2 on RAISING_CHANNEL, emission/2 on its conjugate.
    s, d = (emission + absorption) / 4, (emission - absorption) / 4
    return np.array([[s, 1j * d], [-1j * d, s]], dtype=complex)


def _single_particle_channels() -> tuple[Channel, ...]:
    return (
        Channel(vector=RAISING_CHANNEL, delta_n=1),
        Channel(vector=RAISING_CHANNEL.conj(), delta_n=-1),
    )


def spectral_matrix_electronic(bath: BathSpec) -> SpectralMatrix:
    """
    Spectral matrix of a lead with A1 = D + D^dag and A2 = i(D^dag - D).

    gamma_11 = gamma_22 = [Gamma(w)(1 - f(w)) + Gamma(-w) f(-w)] / 4 and
    gamma_12 = conj(gamma_21) = i[Gamma(w)(1 - f(w)) - Gamma(-w) f(-w)] / 4.
    """
    _require(bath, Statistics.FERMI)

    def gamma(omega: float) -> np.ndarray:
        emission = rate_at(omega, bath.profile) * occupation_complement(omega, bath)
        absorption = rate_at(-omega, bath.profile) * fermi_occupation(-omega, bath)
        return _channel_matrix(emission, absorption)

    return SpectralMatrix(
        size=2, gamma=gamma, channels=_single_particle_channels(), label=bath.label
    )


def spectral_matrix_bosonic(bath: BathSpec) -> SpectralMatrix:
    """
    Spectral matrix of a bosonic bath with the Heaviside structure Theta(+-w).

    Theta(0) = 0 on both branches, so omega = 0 never touches the pole.
    """
    _require(bath, Statistics.BOSE)

    def gamma(omega: float) -> np.ndarray:
        emission = absorption = 0.0
        if omega > 0:
            emission = occupation_complement(omega, bath) * rate_at(omega, bath.profile)
        elif omega < 0:
            absorption = bose_occupation(-omega, bath) * rate_at(-omega, bath.profile)
        return _channel_matrix(emission, absorption)

    return SpectralMatrix(
        size=2, gamma=gamma, channels=_single_particle_channels(), label=bath.label
    )


def spectral_matrix_for(bath: BathSpec) -> SpectralMatrix:
    """Built-in single-particle spectral matrix matching the bath statistics."""
    if bath.statistics is Statistics.FERMI:
        return spectral_matrix_electronic(bath)
    return spectral_matrix_bosonic(bath)


def is_positive_semidefinite(sm: SpectralMatrix, omegas: Sequence[float]) -> bool:
    """True when gamma(omega) is hermitian and PSD at every grid point."""
    for omega in omegas:
        matrix = sm(float(omega))
        if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > 1e-12:
            return False
        if np.min(np.linalg.eigvalsh(matrix)) < PSD_TOLERANCE:
            return False
    return True


def _relative(lhs: float, rhs: float) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), RELATIVE_FLOOR)


def kms_check(
    sm: SpectralMatrix, bath: BathSpec, omegas: Sequence[float]
) -> KmsReport:
    """
    Check the KMS relation of a spectral matrix on a frequency grid.

    With declared channels the relation u^dag gamma(-w) u =
    exp(-beta (w - mu dn)) conj(u)^dag gamma(w) conj(u) is checked for every
    channel u exchanging dn quanta, and the elements between channels with
    different dn must vanish. Without channels the plain entrywise relation
    gamma_ab(-w) = exp(-beta w) gamma_ba(w) is used and mu is ignored.
    """
    grid = [float(w) for w in omegas]
    scale = max(
        (float(np.max(np.abs(sm(s * w)))) for w in grid for s in (1, -1)),
        default=0.0,
    )
    floor = BALANCE_ABSOLUTE_FLOOR * scale
    channel_based = bool(sm.channels)
    notes: list[str] = []

    worst, worst_omega, cross = 0.0, None, 0.0
    for omega in grid:
        g_minus, g_plus = sm(-omega), sm(omega)
        if channel_based:
            comparisons = []
            for channel in sm.channels:
                u = channel.vector / np.linalg.norm(channel.vector)
                lhs = float(np.real(u.conj() @ g_minus @ u))
                rhs = float(np.real(u @ g_plus @ u.conj()))
                exponent = -bath.beta * (omega - bath.mu * channel.delta_n)
                comparisons.append((lhs, rhs, exponent))
            for first in sm.channels:
                for second in sm.channels:
                    if first.delta_n != second.delta_n:
                        element = abs(first.vector.conj() @ g_plus @ second.vector)
                        cross = max(cross, element / scale if scale else 0.0)
        else:
            comparisons = [
                (g_minus[a, b].real, g_plus[b, a].real, -bath.beta * omega)
                for a in range(sm.size)
                for b in range(sm.size)
            ] + [
                (g_minus[a, b].imag, g_plus[b, a].imag, -bath.beta * omega)
                for a in range(sm.size)
                for b in range(sm.size)
            ]
        for lhs, rhs, exponent in comparisons:
            # The Boltzmann factor goes on the side where it is <= 1.
            if exponent <= 0:
                rhs *= float(np.exp(max(exponent, -EXPONENT_SATURATION)))
            else:
                lhs *= float(np.exp(max(-exponent, -EXPONENT_SATURATION)))
            if abs(lhs - rhs) <= floor:
                continue
            violation = _relative(lhs, rhs)
            if violation > worst:
                worst, worst_omega = violation, omega

    asymmetric = any(
        abs(bath_rate(w, bath) - bath_rate(-w, bath)) > floor for w in grid
    )
    if asymmetric:
        notes.append("rate profile is not symmetric under omega -> -omega")
    if not channel_based and bath.mu != 0:
        notes.append("no channels declared: chemical potential ignored")
    if channel_based and bath.mu != 0:
        notes.append("chemical-potential shift inferred from channel number changes")

    passed = worst <= KMS_TOLERANCE and cross <= KMS_TOLERANCE
    logger.debug(
        "KMS check on %d points: worst %.3e, cross %.3e", len(grid), worst, cross
    )
    return KmsReport(
        max_relative_violation=worst,
        worst_omega=worst_omega,
        max_cross_channel=cross,
        channel_based=channel_based,
        mu_shift_inferred=channel_based and bath.mu != 0,
        profile_asymmetric=asymmetric,
        passed=passed,
        notes=notes,
    )


def _shared_statistics(baths: Sequence[BathSpec]) -> Statistics:
    if not baths:
        raise PreconditionError("At least one bath is required")
    kinds = {bath.statistics for bath in baths}
    if len(kinds) > 1:
        raise StatisticsMismatchError("Baths mix Fermi and Bose statistics")
    return kinds.pop()


def _weights(omega: float, baths: Sequence[BathSpec]) -> np.ndarray:
    weights = np.array([bath_rate(omega, bath) for bath in baths])
    if weights.sum() <= 0:
        raise UndefinedAverageError(omega)
    return weights / weights.sum()


def effective_occupation(omega: float, baths: Sequence[BathSpec]) -> float:
    """Rate-weighted average occupation F_bar(omega) of baths with shared statistics."""
    _shared_statistics(baths)
    weights = _weights(omega, baths)
    pairs = zip(weights, baths, strict=True)
    return float(sum(w * occupation(omega, bath) for w, bath in pairs if w > 0))


def mean_temperature_low_energy(
    baths: Sequence[BathSpec], omega_probe: float
) -> MeanTemperature:
    """
    Low-energy mixing temperature of several baths at mu = 0.

    Bosons mix arithmetically in T, fermions harmonically, with the rates at
    ``omega_probe`` as weights.
    """
    statistics = _shared_statistics(baths)
    if any(bath.mu != 0 for bath in baths):
        raise PreconditionError("Low-energy temperature mixing requires mu = 0")
    weights = _weights(omega_probe, baths)
    temperatures = np.array([bath.temperature for bath in baths])
    if statistics is Statistics.BOSE:
        temperature = float(weights @ temperatures)
    else:
        temperature = float(1.0 / (weights @ (1.0 / temperatures)))

    largest = max(bath.beta for bath in baths) * abs(omega_probe)
    regime_warning = largest > LOW_ENERGY_WARNING
    if regime_warning:
        logger.warning(
            "beta * omega = %.3g exceeds %.2g; low-energy mixing is approximate",
            largest,
            LOW_ENERGY_WARNING,
        )
    return MeanTemperature(
        statistics=statistics, temperature=temperature, regime_warning=regime_warning
    )


def classical_limit_boltzmann(baths: Sequence[BathSpec], omega: float) -> float:
    """Rate-weighted arithmetic mean of the Boltzmann factors exp(-beta_k omega)."""
    if omega <= 0:
        raise PreconditionError(f"Classical limit needs omega > 0, got {omega}")
    if not baths:
        raise PreconditionError("At least one bath is required")
    weights = _weights(omega, baths)
    factors = np.exp(-np.array([bath.beta for bath in baths]) * omega)
    return float(weights @ factors)
