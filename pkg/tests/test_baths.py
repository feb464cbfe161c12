"""Tests for occupations, rate profiles, spectral matrices and bath averages."""

import numpy as np
import pytest

from pybmsbalance.errors import (
    ChemicalPotentialDomainError,
    PreconditionError,
    StatisticsMismatchError,
    UndefinedAverageError,
)
from pybmsbalance.models import (
    ConstantProfile,
    LorentzianProfile,
    SpectralMatrix,
    TabulatedProfile,
)
from pybmsbalance.services import (
    RAISING_CHANNEL,
    bath_rate,
    bose_occupation,
    classical_limit_boltzmann,
    effective_occupation,
    fermi_occupation,
    is_positive_semidefinite,
    kms_check,
    load_tabulated_profile,
    mean_temperature_low_energy,
    occupation,
    occupation_complement,
    rate_at,
    spectral_matrix_bosonic,
    spectral_matrix_electronic,
)

GRID = np.linspace(0.1, 5.0, 25)


class TestOccupations:
    """Test Fermi and Bose occupation functions."""

    def test_fermi_at_mu(self, make_bath):
        """Test f(mu) = 1/2."""
        assert fermi_occupation(1.5, make_bath(mu=1.5)) == pytest.approx(0.5)

    def test_fermi_value(self, make_bath):
        """Test f against the closed form."""
        bath = make_bath(beta=2.0, mu=0.5)

        assert fermi_occupation(1.0, bath) == pytest.approx(1 / (np.e + 1), rel=1e-14)

    def test_fermi_saturation(self, make_bath):
        """Test f saturates to exactly 0 and 1."""
        bath = make_bath(beta=1000.0)

        assert fermi_occupation(1.0, bath) == 0.0
        assert fermi_occupation(-1.0, bath) == 1.0
        assert occupation_complement(1.0, bath) == 1.0
        assert occupation_complement(-1.0, bath) == 0.0

    def test_fermi_complement(self, make_bath):
        """Test 1 - f is evaluated without cancellation."""
        bath = make_bath(beta=1.0, mu=0.0)

        assert occupation_complement(-40.0, bath) == pytest.approx(
            np.exp(-40.0), rel=1e-12
        )

    def test_bose_value(self, make_bath):
        """Test n against the closed form and 1 + n."""
        bath = make_bath("bose", beta=1.0, mu=0.5)

        n = bose_occupation(1.5, bath)

        assert n == pytest.approx(1 / (np.e - 1), rel=1e-14)
        assert occupation_complement(1.5, bath) == pytest.approx(1 + n, rel=1e-14)

    @pytest.mark.parametrize("omega", [0.5, 0.2])
    def test_bose_below_mu(self, make_bath, omega):
        """Test n is undefined at or below the chemical potential."""
        with pytest.raises(ChemicalPotentialDomainError):
            bose_occupation(omega, make_bath("bose", mu=0.5))

    def test_statistics_mismatch(self, make_bath):
        """Test occupations check the bath statistics."""
        with pytest.raises(StatisticsMismatchError):
            fermi_occupation(1.0, make_bath("bose"))
        with pytest.raises(StatisticsMismatchError):
            bose_occupation(1.0, make_bath("fermi"))

    def test_dispatch(self, make_bath):
        """Test occupation() follows the bath statistics."""
        fermi, bose = make_bath("fermi"), make_bath("bose")

        assert occupation(1.0, fermi) == fermi_occupation(1.0, fermi)
        assert occupation(1.0, bose) == bose_occupation(1.0, bose)


class TestRateProfiles:
    """Test tunneling-rate profiles."""

    def test_constant(self):
        """Test a constant profile."""
        assert rate_at(-3.0, ConstantProfile(gamma=2.0)) == 2.0

    def test_lorentzian(self):
        """Test peak and half-width of a Lorentzian."""
        profile = LorentzianProfile(gamma=2.0, center=1.0, width=0.5)

        assert rate_at(1.0, profile) == pytest.approx(2.0)
        assert rate_at(1.5, profile) == pytest.approx(1.0)
        assert rate_at(0.5, profile) == pytest.approx(1.0)

    def test_tabulated(self):
        """Test linear interpolation and zero outside the table."""
        profile = TabulatedProfile(omegas=[0.0, 2.0], gammas=[1.0, 3.0])

        assert rate_at(1.0, profile) == pytest.approx(2.0)
        assert rate_at(-1.0, profile) == 0.0
        assert rate_at(3.0, profile) == 0.0

    def test_load_tabulated_profile(self, tmp_path):
        """Test reading a two-column rate file."""
        path = tmp_path / "rates.dat"
        path.write_text("# omega gamma\n0.0 1.0\n1.0 0.0\n")

        profile = load_tabulated_profile(path)

        assert rate_at(0.25, profile) == pytest.approx(0.75)

    def test_bose_rate_vanishes_at_non_positive_frequency(self, make_bath):
        """Test bosonic baths have no rate at omega <= 0."""
        bath = make_bath("bose")

        assert bath_rate(0.0, bath) == 0.0
        assert bath_rate(-1.0, bath) == 0.0
        assert bath_rate(1.0, bath) == 1.0

    def test_fermi_rate_at_negative_frequency(self, make_bath):
        """Test fermionic baths keep their rate at negative frequency."""
        assert bath_rate(-1.0, make_bath("fermi", gamma=0.7)) == 0.7


class TestSpectralMatrices:
    """Test the built-in single-particle spectral matrices."""

    def test_electronic_channel_eigenvalues(self, make_bath):
        """Test the raising channel carries Gamma(w) f(w) / 2 at -w."""
        bath = make_bath(beta=2.0, mu=0.3, center=1.0, width=0.5)
        sm = spectral_matrix_electronic(bath)
        u = RAISING_CHANNEL

        for omega in (0.4, 1.0, 2.5):
            absorption = rate_at(omega, bath.profile) * fermi_occupation(omega, bath)
            emission = rate_at(omega, bath.profile) * occupation_complement(
                omega, bath
            )
            assert np.real(u.conj() @ sm(-omega) @ u) == pytest.approx(absorption / 2)
            assert np.real(u @ sm(omega) @ u.conj()) == pytest.approx(emission / 2)

    def test_electronic_positive_semidefinite(self, make_bath):
        """Test gamma(w) is hermitian PSD on both frequency branches."""
        sm = spectral_matrix_electronic(make_bath(beta=1.0, mu=0.5))

        assert sm.size == 2
        assert is_positive_semidefinite(sm, np.concatenate([GRID, -GRID]))

    def test_bosonic_zero_frequency(self, make_bath):
        """Test the bosonic matrix vanishes at omega = 0."""
        sm = spectral_matrix_bosonic(make_bath("bose"))

        np.testing.assert_array_equal(sm(0.0), np.zeros((2, 2)))

    def test_bosonic_positive_semidefinite(self, make_bath):
        """Test the bosonic matrix is PSD on both branches."""
        sm = spectral_matrix_bosonic(make_bath("bose", beta=0.5, center=1.0))

        assert is_positive_semidefinite(sm, np.concatenate([GRID, -GRID]))

    def test_statistics_checked(self, make_bath):
        """Test the builders reject baths of the wrong statistics."""
        with pytest.raises(StatisticsMismatchError):
            spectral_matrix_electronic(make_bath("bose"))
        with pytest.raises(StatisticsMismatchError):
            spectral_matrix_bosonic(make_bath("fermi"))

    def test_not_positive_semidefinite(self):
        """Test a negative matrix is detected."""
        sm = SpectralMatrix(size=1, gamma=lambda omega: np.array([[-1.0]]))

        assert not is_positive_semidefinite(sm, [1.0])

    def test_lamb_defaults_to_zero(self, make_bath):
        """Test sigma is zero without Lamb-shift input."""
        sm = spectral_matrix_electronic(make_bath())

        np.testing.assert_array_equal(sm.lamb(1.0), np.zeros((2, 2)))


class TestKmsCheck:
    """Test the KMS diagnostics."""

    def test_fermi_channels_with_mu(self, make_bath):
        """Test a Fermi lead satisfies KMS with the inferred mu shift."""
        bath = make_bath(beta=1.5, mu=0.7)

        report = kms_check(spectral_matrix_electronic(bath), bath, GRID)

        assert report.passed
        assert report.channel_based
        assert report.mu_shift_inferred
        assert report.max_cross_channel < 1e-12
        assert not report.profile_asymmetric

    def test_bose_channels(self, make_bath):
        """Test a Bose bath at mu = 0 satisfies KMS."""
        bath = make_bath("bose", beta=0.8)

        report = kms_check(spectral_matrix_bosonic(bath), bath, GRID)

        assert report.passed
        assert not report.mu_shift_inferred

    def test_asymmetric_profile_noted(self, make_bath):
        """Test an off-center Lorentzian is flagged as asymmetric."""
        bath = make_bath(beta=2.0, mu=1.0, center=1.0, width=0.1)

        report = kms_check(spectral_matrix_electronic(bath), bath, GRID)

        assert report.profile_asymmetric
        assert any("symmetric" in note for note in report.notes)

    def test_entrywise_without_channels(self, make_bath):
        """Test the entrywise relation and the ignored chemical potential."""
        bath = make_bath(beta=2.0, mu=0.5)
        sm = SpectralMatrix(
            size=1,
            gamma=lambda omega: np.array([[1.0 / (1.0 + np.exp(-2.0 * omega))]]),
        )

        report = kms_check(sm, bath, GRID)

        assert report.passed
        assert not report.channel_based
        assert any("ignored" in note for note in report.notes)

    def test_violation_detected(self, make_bath):
        """Test a matrix at the wrong temperature fails."""
        bath = make_bath(beta=2.0)
        sm = SpectralMatrix(
            size=1,
            gamma=lambda omega: np.array([[1.0 / (1.0 + np.exp(-1.0 * omega))]]),
        )

        report = kms_check(sm, bath, GRID)

        assert not report.passed
        assert report.worst_omega is not None


class TestAverages:
    """Test multi-bath averages."""

    def test_effective_occupation(self, make_bath):
        """Test equal rates give the plain mean occupation."""
        baths = [make_bath(mu=0.0), make_bath(mu=2.0)]

        value = effective_occupation(1.0, baths)

        expected = fermi_occupation(1.0, baths[0]) + fermi_occupation(1.0, baths[1])
        assert value == pytest.approx(expected / 2)

    def test_effective_occupation_weights(self, make_bath):
        """Test rates act as weights."""
        baths = [make_bath(mu=50.0, gamma=3.0), make_bath(mu=-50.0, gamma=1.0)]

        assert effective_occupation(0.0, baths) == pytest.approx(0.75)

    def test_effective_occupation_mixed_statistics(self, make_bath):
        """Test mixed statistics are rejected."""
        with pytest.raises(StatisticsMismatchError):
            effective_occupation(1.0, [make_bath("fermi"), make_bath("bose")])

    def test_effective_occupation_no_rates(self, make_bath):
        """Test vanishing rates leave the average undefined."""
        with pytest.raises(UndefinedAverageError):
            effective_occupation(1.0, [make_bath(gamma=0.0)])

    def test_bose_temperature_arithmetic(self, make_bath):
        """Test bosonic temperatures mix arithmetically."""
        baths = [make_bath("bose", beta=1 / 100), make_bath("bose", beta=1 / 300)]

        mean = mean_temperature_low_energy(baths, 1e-3)

        assert mean.temperature == pytest.approx(200.0)
        assert not mean.regime_warning

    def test_fermi_temperature_harmonic(self, make_bath):
        """Test fermionic temperatures mix harmonically."""
        baths = [make_bath(beta=1 / 100), make_bath(beta=1 / 300)]

        mean = mean_temperature_low_energy(baths, 1e-3)

        assert mean.temperature == pytest.approx(150.0)

    def test_temperature_regime_warning(self, make_bath):
        """Test a probe above the low-energy regime is flagged."""
        mean = mean_temperature_low_energy([make_bath(beta=1.0)], 1.0)

        assert mean.regime_warning

    def test_temperature_needs_zero_mu(self, make_bath):
        """Test mixing requires mu = 0."""
        with pytest.raises(PreconditionError):
            mean_temperature_low_energy([make_bath(mu=0.1)], 1e-3)

    def test_classical_limit(self, make_bath):
        """Test the weighted mean of Boltzmann factors."""
        baths = [make_bath("bose", beta=1.0), make_bath("bose", beta=2.0)]

        value = classical_limit_boltzmann(baths, 3.0)

        assert value == pytest.approx((np.exp(-3.0) + np.exp(-6.0)) / 2)

    def test_classical_limit_positive_frequency(self, make_bath):
        """Test the classical limit needs omega > 0."""
        with pytest.raises(PreconditionError):
            classical_limit_boltzmann([make_bath("bose")], 0.0)
