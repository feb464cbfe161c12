"""Tests for configuration constants."""

from pybmsbalance import config


class TestConfig:
    """Test configuration constants."""

    def test_validation_tolerances(self):
        """Test operator validation tolerances."""
        assert config.HERMITICITY_TOL == 1e-12
        assert config.COMMUTATION_RTOL == 1e-10
        assert config.NUMBER_INTEGER_TOL == 1e-8
        assert config.DEFAULT_RELATIVE_DEGENERACY_TOL == 1e-9

    def test_balance_tolerances(self):
        """Test balance diagnostics tolerances."""
        assert config.BALANCE_TOLERANCE == 1e-9
        assert config.BALANCE_ABSOLUTE_FLOOR == 1e-12
        assert config.KMS_TOLERANCE == 1e-9
        assert config.EXPONENT_SATURATION == 700.0

    def test_solver_constants(self):
        """Test stationary-state solver constants."""
        assert config.NULLSPACE_RTOL == 1e-10
        assert config.POSITIVITY_CLIP == -1e-10
        assert config.TRACE_DRIFT_TOL == 1e-8
        assert config.DEFAULT_DT_FACTOR == 0.05
        assert config.CROSSING_XTOL == 1e-8

    def test_fig1_defaults(self):
        """Test the two-lead inversion scenario matches its published parameters."""
        assert config.FIG1_LEVELS == 10
        assert config.FIG1_EPSILON == config.FIG1_INTERACTION == 1.0
        assert config.FIG1_HOPPING == 0.0
        assert config.FIG1_BETA == 2.0
        assert config.FIG1_MU == (1.0, 9.0)
        assert config.FIG1_CENTERS == (1.0, 9.0)
        assert config.FIG1_WIDTH == 0.1

    def test_exit_codes(self):
        """Test command-line exit codes are distinct."""
        codes = {
            config.EXIT_SUCCESS,
            config.EXIT_VERIFICATION_FAILED,
            config.EXIT_CONFIG_ERROR,
            config.EXIT_NUMERICAL_FAILURE,
        }
        assert codes == {0, 1, 2, 3}

    def test_csv_format(self):
        """Test floats are written with 17 significant digits."""
        assert format(0.1, config.CSV_FLOAT_FORMAT) == "0.10000000000000001"
