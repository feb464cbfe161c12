"""Tests for the pydantic data models."""

import numpy as np
import pytest
from pydantic import ValidationError

from pybmsbalance.errors import (
    CommutationError,
    ConfigError,
    HermiticityError,
    LadderStructureError,
    ModelValidationError,
)
from pybmsbalance.models import (
    BalanceReport,
    BathSpec,
    EffectiveThermalFit,
    EigenStructure,
    GridSpec,
    HermitianOperator,
    LorentzianProfile,
    ModelBundle,
    ModelSpec,
    PresetName,
    RateLadder,
    RunMode,
    ScenarioConfig,
    SolverMethod,
    StationaryState,
    Statistics,
    SystemModel,
    TabulatedProfile,
)


def _two_level_model(**kwargs) -> SystemModel:
    raising = np.array([[0.0, 0.0], [1.0, 0.0]])
    return SystemModel(
        hamiltonian=HermitianOperator(entries=np.diag([0.0, 1.0])),
        number_op=HermitianOperator(entries=np.diag([0.0, 1.0])),
        couplings=[
            HermitianOperator(entries=raising + raising.T),
            HermitianOperator(entries=1j * (raising - raising.T)),
        ],
        **kwargs,
    )


class TestHermitianOperator:
    """Test the HermitianOperator model."""

    def test_valid_operator(self):
        """Test a hermitian matrix is accepted and frozen."""
        op = HermitianOperator(entries=[[1.0, 1j], [-1j, 2.0]], label="H")

        assert op.dim == 2
        assert op.entries.dtype == complex
        assert not op.entries.flags.writeable

    def test_non_hermitian(self):
        """Test a non-hermitian matrix is rejected."""
        with pytest.raises(HermiticityError):
            HermitianOperator(entries=[[0.0, 1.0], [0.0, 0.0]])

    def test_non_square(self):
        """Test a non-square matrix is rejected."""
        with pytest.raises(HermiticityError, match="square"):
            HermitianOperator(entries=np.zeros((2, 3)))

    def test_tolerance(self):
        """Test asymmetries below 1e-12 are tolerated."""
        op = HermitianOperator(entries=[[0.0, 1.0 + 1e-13], [1.0, 0.0]])

        assert op.dim == 2


class TestSystemModel:
    """Test the SystemModel model."""

    def test_valid_model(self):
        """Test a two-level model with trace-orthogonal couplings."""
        model = _two_level_model()

        assert model.dim == 2
        assert len(model.couplings) == 2
        assert not model.couplings_orthonormal()

    def test_orthonormal_couplings(self):
        """Test Tr{A_a A_b} = delta_ab is detected."""
        scale = 1 / np.sqrt(2)
        model = SystemModel(
            hamiltonian=HermitianOperator(entries=np.diag([0.0, 1.0])),
            number_op=HermitianOperator(entries=np.diag([0.0, 1.0])),
            couplings=[HermitianOperator(entries=[[0.0, scale], [scale, 0.0]])],
        )

        assert model.couplings_orthonormal()

    def test_non_commuting(self):
        """Test [H_S, N_S] != 0 is rejected."""
        with pytest.raises(CommutationError) as excinfo:
            SystemModel(
                hamiltonian=HermitianOperator(entries=[[0.0, 1.0], [1.0, 0.0]]),
                number_op=HermitianOperator(entries=np.diag([0.0, 1.0])),
            )

        assert excinfo.value.violation > excinfo.value.bound

    def test_dimension_mismatch(self):
        """Test operators of different dimension are rejected."""
        with pytest.raises(ModelValidationError, match="dimension"):
            SystemModel(
                hamiltonian=HermitianOperator(entries=np.eye(2)),
                number_op=HermitianOperator(entries=np.eye(3)),
            )

    def test_coupling_with_trace(self):
        """Test a coupling operator with non-zero trace is rejected."""
        with pytest.raises(ModelValidationError, match="trace"):
            SystemModel(
                hamiltonian=HermitianOperator(entries=np.diag([0.0, 1.0])),
                number_op=HermitianOperator(entries=np.diag([0.0, 1.0])),
                couplings=[HermitianOperator(entries=np.eye(2))],
            )


class TestBathSpec:
    """Test bath and rate-profile models."""

    def test_fermi_bath(self, make_bath):
        """Test a Fermi bath with a Lorentzian profile."""
        bath = make_bath("fermi", beta=2.0, mu=1.0, center=1.0, width=0.1)

        assert bath.statistics is Statistics.FERMI
        assert bath.statistics.sign == -1
        assert bath.temperature == 0.5
        assert isinstance(bath.profile, LorentzianProfile)

    def test_bose_sign(self):
        """Test the statistics sign of bosons."""
        assert Statistics.BOSE.sign == 1

    def test_profile_discriminator(self):
        """Test profiles are parsed from plain mappings by their kind."""
        bath = BathSpec.model_validate(
            {
                "statistics": "bose",
                "beta": 1.0,
                "profile": {"kind": "lorentzian", "gamma": 1, "center": 0, "width": 2},
            }
        )

        assert isinstance(bath.profile, LorentzianProfile)
        assert bath.profile.width == 2

    def test_invalid_beta(self, make_bath):
        """Test a non-positive beta is rejected."""
        with pytest.raises(ValidationError):
            make_bath(beta=0.0)

    def test_invalid_width(self):
        """Test a zero Lorentzian width is rejected."""
        with pytest.raises(ValidationError):
            LorentzianProfile(gamma=1.0, center=0.0, width=0.0)

    def test_tabulated_profile_from_file(self, tmp_path):
        """Test a two-column table is read from a file."""
        table = tmp_path / "rates.txt"
        table.write_text("0.0 1.0\n1.0 2.0\n2.0 0.5\n")

        profile = TabulatedProfile.model_validate({"kind": "tabulated", "path": table})

        assert profile.omegas == [0.0, 1.0, 2.0]
        assert profile.gammas == [1.0, 2.0, 0.5]

    def test_tabulated_profile_not_increasing(self):
        """Test a table with unsorted frequencies is rejected."""
        with pytest.raises(ValidationError, match="increasing"):
            TabulatedProfile(omegas=[0.0, 0.0], gammas=[1.0, 1.0])

    def test_tabulated_profile_negative_rate(self):
        """Test a table with a negative rate is rejected."""
        with pytest.raises(ValidationError, match="non-negative"):
            TabulatedProfile(omegas=[0.0, 1.0], gammas=[1.0, -1.0])


class TestEigenStructure:
    """Test the EigenStructure model."""

    def test_integer_numbers_remove_offset(self):
        """Test half-integer number eigenvalues are counted from the lowest one."""
        eig = EigenStructure(
            energies=[-0.5, 0.5],
            numbers=[-0.5, 0.5],
            basis=np.eye(2),
            energy_clusters=((0,), (1,)),
            number_clusters=((0,), (1,)),
            degeneracy_tol=1e-9,
        )

        np.testing.assert_array_equal(eig.integer_numbers, [0, 1])
        np.testing.assert_array_equal(eig.cluster_labels, [0, 1])

    def test_basis_changes(self):
        """Test eigenbasis transforms are inverse to each other."""
        basis = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
        eig = EigenStructure(
            energies=[0.0, 1.0],
            numbers=[0.0, 0.0],
            basis=basis,
            energy_clusters=((0,), (1,)),
            number_clusters=((0,), (1,)),
            degeneracy_tol=1e-9,
        )
        operator = np.array([[1.0, 2.0], [2.0, 3.0]])

        np.testing.assert_allclose(
            eig.from_eigenbasis(eig.to_eigenbasis(operator)), operator
        )


class TestRateLadder:
    """Test the RateLadder model."""

    def test_valid_ladder(self):
        """Test a three-level ladder."""
        ladder = RateLadder(levels=3, omega=[1, 2], up=[0.5, 0.1], down=[1, 1])

        assert ladder.links == 2
        assert ladder.bath_count == 1

    def test_wrong_length(self):
        """Test the link arrays must have levels - 1 entries."""
        with pytest.raises(LadderStructureError, match="needs 2 up"):
            RateLadder(levels=3, omega=[1, 2], up=[0.5], down=[1, 1])

    def test_negative_rate(self):
        """Test negative rates are rejected."""
        with pytest.raises(LadderStructureError, match="non-negative"):
            RateLadder(levels=2, omega=[1], up=[-0.5], down=[1])

    def test_per_bath_shape(self):
        """Test per-bath splits need one row per bath."""
        with pytest.raises(LadderStructureError, match="per_bath_up"):
            RateLadder(
                levels=3, omega=[1, 2], up=[1, 1], down=[1, 1], per_bath_up=[1, 1]
            )

    def test_scaled(self):
        """Test scaling multiplies both directions and drops the split."""
        ladder = RateLadder(
            levels=3,
            omega=[1, 2],
            up=[1, 2],
            down=[3, 4],
            per_bath_up=[[1, 2]],
            per_bath_down=[[3, 4]],
        )

        scaled = ladder.scaled(np.array([2.0, 0.5]))

        np.testing.assert_allclose(scaled.up, [2.0, 1.0])
        np.testing.assert_allclose(scaled.down, [6.0, 2.0])
        assert scaled.per_bath_up is None


class TestStationaryState:
    """Test the StationaryState model."""

    def test_ratios(self):
        """Test successive population ratios."""
        state = StationaryState(
            populations=[0.5, 0.25, 0.25],
            method=SolverMethod.LADDER_RECURSION,
            residual=0.0,
        )

        np.testing.assert_allclose(state.ratios, [0.5, 1.0])

    def test_zero_population_ratio(self):
        """Test a zero population gives an infinite ratio."""
        state = StationaryState(
            populations=[0.0, 1.0], method=SolverMethod.NULLSPACE, residual=0.0
        )

        assert np.isinf(state.ratios[0])

    def test_effective_fit_temperature(self):
        """Test the effective temperature of a fit."""
        assert EffectiveThermalFit(
            beta_bar=2.0, mu_bar=0.0, consistency=0.0
        ).temperature == 0.5
        assert np.isinf(
            EffectiveThermalFit(beta_bar=0.0, mu_bar=0.0, consistency=0.0).temperature
        )


class TestModelBundle:
    """Test the ModelBundle model."""

    def test_link_count(self):
        """Test g factors must match the number of links."""
        with pytest.raises(ModelValidationError, match="g factors"):
            ModelBundle(
                name="broken",
                model=_two_level_model(),
                g_factors=[1.0, 1.0],
                frequencies=[1.0],
            )

    def test_predicted_ratios(self, make_bath):
        """Test the predicted ratio of a single Fermi bath is exp(-beta (w - mu))."""
        bundle = ModelBundle(
            name="two-level",
            model=_two_level_model(),
            g_factors=[1.0],
            frequencies=[1.0],
            bath_statistics=(Statistics.FERMI,),
        )

        ratios = bundle.predicted_ratios([make_bath(beta=2.0, mu=0.5)])

        assert bundle.levels == 2
        np.testing.assert_allclose(ratios, [np.exp(-1.0)], rtol=1e-12)


class TestBalanceReport:
    """Test the BalanceReport model."""

    def test_aggregate(self):
        """Test the worst child determines the aggregated report."""
        children = [
            BalanceReport(relation="local_balance", max_rel=1e-14, checked=3),
            BalanceReport(
                relation="local_balance",
                max_abs=1e-3,
                max_rel=1e-2,
                worst_index=(0, 1, 0),
                passed=False,
                checked=2,
                bath_label="hot",
                notes=["injected"],
            ),
        ]

        report = BalanceReport.aggregate("local_balance", children, 1e-9)

        assert not report.passed
        assert report.max_rel == 1e-2
        assert report.worst_index == (0, 1, 0)
        assert report.checked == 5
        assert report.notes == ["injected"]
        assert len(report.per_bath) == 2

    def test_aggregate_empty(self):
        """Test aggregating nothing passes."""
        assert BalanceReport.aggregate("local_balance", [], 1e-9).passed

    def test_summary(self):
        """Test the one-line summary."""
        report = BalanceReport(
            relation="detailed_balance", worst_index=(1, 0, 1), bath_label="cold"
        )

        summary = report.summary()

        assert summary.startswith("detailed_balance [cold]: PASS")
        assert "worst=(1,0,1)" in summary


class TestScenarioConfig:
    """Test scenario configuration models."""

    @pytest.fixture
    def scenario(self, make_bath):
        """A steady-state scenario on the electronic preset."""
        return ScenarioConfig(
            model=ModelSpec.from_string("electronic:N=2,eps=1,U=0.5,T=0"),
            baths=[make_bath(beta=1.0, label="lead")],
        )

    def test_model_from_string(self):
        """Test parsing of the --model syntax with physics aliases."""
        spec = ModelSpec.from_string("electronic:N=10, eps=1,U=1,T=0")

        assert spec.preset is PresetName.ELECTRONIC
        assert spec.params.levels == 10
        assert spec.params.interaction == 1.0

    @pytest.mark.parametrize(
        "text",
        ["bogus:N=1", "electronic:N", "electronic:X=1", "oscillator:Omega=-1"],
    )
    def test_model_from_string_invalid(self, text):
        """Test malformed model strings raise ConfigError."""
        with pytest.raises(ConfigError):
            ModelSpec.from_string(text)

    def test_model_needs_source(self):
        """Test a model needs a preset or operator files, not both."""
        with pytest.raises(ValidationError):
            ModelSpec()
        with pytest.raises(ValidationError):
            ModelSpec(preset="oscillator", hamiltonian="h.txt", number_op="n.txt")

    def test_run_needs_model_and_baths(self):
        """Test steady runs need a model and baths."""
        with pytest.raises(ConfigError, match="needs a model"):
            ScenarioConfig.from_mapping({"run": "steady"})

    def test_occupation_scan_needs_grid(self, make_bath):
        """Test occupation scans need a grid."""
        with pytest.raises(ConfigError, match="grid"):
            ScenarioConfig.from_mapping(
                {"run": "occupation-scan", "baths": [make_bath().model_dump()]}
            )

    def test_with_value(self, scenario):
        """Test replacing a scalar addressed by a dotted path."""
        changed = scenario.with_value("baths.0.beta", 3.0)

        assert changed.baths[0].beta == 3.0
        assert scenario.baths[0].beta == 1.0

    def test_with_value_alias(self, scenario):
        """Test preset parameters are addressed by their physics names."""
        changed = scenario.with_value("model.params.U", 2.0)

        assert changed.model.params.interaction == 2.0

    @pytest.mark.parametrize("path", ["baths.3.beta", "baths.0.label", "nope"])
    def test_with_value_invalid_path(self, scenario, path):
        """Test paths that do not address a number raise ConfigError."""
        with pytest.raises(ConfigError):
            scenario.with_value(path, 1.0)

    def test_with_value_invalid_value(self, scenario):
        """Test invalid values surface as validation errors."""
        with pytest.raises(ValidationError):
            scenario.with_value("baths.0.beta", -1.0)

    def test_from_yaml(self, tmp_path):
        """Test loading a YAML scenario."""
        path = tmp_path / "scenario.yaml"
        path.write_text(
            "run: verify\n"
            "model:\n"
            "  preset: oscillator\n"
            "  params: {Omega: 1.0, N_cut: 5}\n"
            "baths:\n"
            "  - statistics: bose\n"
            "    beta: 1.0\n"
            "    profile: {kind: constant, gamma: 1.0}\n"
        )

        config = ScenarioConfig.from_yaml(path)

        assert config.run is RunMode.VERIFY
        assert config.model.params.n_cut == 5

    def test_from_yaml_not_a_mapping(self, tmp_path):
        """Test a YAML list is rejected."""
        path = tmp_path / "scenario.yaml"
        path.write_text("- 1\n- 2\n")

        with pytest.raises(ConfigError, match="mapping"):
            ScenarioConfig.from_yaml(path)

    def test_from_yaml_missing_file(self, tmp_path):
        """Test a missing file raises ConfigError."""
        with pytest.raises(ConfigError, match="Cannot read"):
            ScenarioConfig.from_yaml(tmp_path / "missing.yaml")


class TestGridSpec:
    """Test the GridSpec model."""

    def test_linear(self):
        """Test evenly spaced values."""
        np.testing.assert_allclose(
            GridSpec(start=0, stop=1, points=3).values(), [0, 0.5, 1]
        )

    def test_log(self):
        """Test log-spaced values."""
        np.testing.assert_allclose(
            GridSpec(start=1, stop=100, points=3, log=True).values(), [1, 10, 100]
        )

    def test_empty(self):
        """Test an empty grid."""
        assert GridSpec(start=0, stop=1, points=0).values().size == 0

    def test_log_needs_positive_bounds(self):
        """Test log grids reject non-positive bounds."""
        with pytest.raises(ValidationError):
            GridSpec(start=0, stop=1, points=3, log=True)
