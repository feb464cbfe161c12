"""High-level entry point: a system model attached to thermal reservoirs."""

import logging
from collections.abc import Sequence
from typing import Literal

import numpy as np

from .config import (
    BALANCE_TOLERANCE,
    DENSE_LIOUVILLIAN_MAX_DIM,
    EVOLUTION_TIME_FACTOR,
    FACTORIZATION_TOLERANCE,
)
from .errors import (
    DimensionMismatchError,
    LadderStructureError,
    PreconditionError,
    SecularStructureError,
    StatisticsMismatchError,
)
from .models import (
    BalanceReport,
    BathSpec,
    BmsCoefficients,
    CouplingReport,
    EigenStructure,
    GibbsResidual,
    Liouvillian,
    ModelBundle,
    RateLadder,
    SolverMethod,
    SpectralMatrix,
    StationaryState,
    SystemModel,
    Trajectory,
)
from .models.base import frozen_array
from .services import (
    AssemblyCache,
    assemble_coefficients,
    build_liouvillian,
    check_conserved_coupling,
    combine_baths,
    diagonalize_joint,
    ladder_steady_state,
    liouvillian_nullspace,
    reduce_to_ladder,
    spectral_matrix_for,
    time_evolve,
    verify_all,
    verify_factorization,
    verify_gibbs_stationarity,
)

logger = logging.getLogger(__name__)

Method = Literal["auto", "ladder", "nullspace", "evolution"]


class OpenSystem:
    """
    A system model coupled to one or more thermal reservoirs.

    This class wires the assembly, verification and solver services together.
    The joint eigenstructure and the per-bath coefficients are built on first
    use and cached. Populations of returned stationary states are always in
    the order of the joint eigenbasis.
    """

    def __init__(
        self,
        model: SystemModel,
        baths: Sequence[BathSpec],
        degeneracy_tol: float | None = None,
        g_factors: Sequence[float] | None = None,
        spectral_matrices: Sequence[SpectralMatrix] | None = None,
    ):
        """
        Initialize the open system.

        Args:
            model: Validated system model
            baths: Reservoirs, in the order their coefficients are reported
            degeneracy_tol: Absolute energy tolerance for degeneracy clustering
            g_factors: Known ladder factors g_m, enabling the factorization check
            spectral_matrices: Spectral matrix per bath. Defaults to the
                built-in single-particle matrix of each bath's statistics.
        """
        if not baths:
            raise PreconditionError("An open system needs at least one bath")
        if spectral_matrices is not None and len(spectral_matrices) != len(baths):
            raise DimensionMismatchError("Need one spectral matrix per bath")
        self._model = model
        self._baths = tuple(baths)
        self._degeneracy_tol = degeneracy_tol
        self._g_factors = None if g_factors is None else np.asarray(g_factors, float)
        self._spectral_matrices = (
            tuple(spectral_matrices) if spectral_matrices is not None else None
        )
        self._overrides: dict[int, BmsCoefficients] = {}
        self._cache = AssemblyCache()

    @classmethod
    def from_bundle(
        cls,
        bundle: ModelBundle,
        baths: Sequence[BathSpec],
        degeneracy_tol: float | None = None,
    ) -> "OpenSystem":
        """
        Attach baths to a ready-made model.

        A bundle with one statistics slot accepts any number of baths of that
        statistics; a bundle with several slots needs exactly one bath per slot.
        """
        slots = bundle.bath_statistics
        if len(slots) == 1:
            expected = [slots[0]] * len(baths)
        elif slots and len(slots) != len(baths):
            raise StatisticsMismatchError(
                f"Model {bundle.name!r} takes {len(slots)} baths, got {len(baths)}"
            )
        else:
            expected = list(slots) or [b.statistics for b in baths]
        for index, (bath, statistics) in enumerate(
            zip(baths, expected, strict=True)
        ):
            if bath.statistics is not statistics:
                raise StatisticsMismatchError(
                    f"Bath {index} of model {bundle.name!r} must be "
                    f"{statistics.value}, got {bath.statistics.value}"
                )
        return cls(bundle.model, baths, degeneracy_tol, g_factors=bundle.g_factors)

    @property
    def model(self) -> SystemModel:
        """The system model."""
        return self._model

    @property
    def baths(self) -> tuple[BathSpec, ...]:
        """Attached reservoirs."""
        return self._baths

    @property
    def g_factors(self) -> np.ndarray | None:
        """Ladder factors g_m, when known."""
        return self._g_factors

    @property
    def eigenstructure(self) -> EigenStructure:
        """Joint eigenstructure of H_S and N_S."""
        eig = self._cache.get_eigenstructure()
        if eig is None:
            eig = diagonalize_joint(self._model, self._degeneracy_tol)
            self._cache.set_eigenstructure(eig)
        return eig

    def spectral_matrix(self, index: int) -> SpectralMatrix:
        """Spectral matrix of bath ``index``."""
        if self._spectral_matrices is not None:
            return self._spectral_matrices[index]
        return spectral_matrix_for(self._baths[index])

    def bath_label(self, index: int) -> str:
        """Label of bath ``index``, ``bath<index>`` when none was given."""
        return self._baths[index].label or f"bath{index}"

    def coefficients_for(self, index: int) -> BmsCoefficients:
        """Coefficients of a single bath."""
        if index in self._overrides:
            return self._overrides[index]
        label = self.bath_label(index)
        bath = self._baths[index].model_copy(update={"label": label})
        eig = self.eigenstructure
        coeff = self._cache.get_coefficients(bath)
        if coeff is None:
            coeff = assemble_coefficients(
                eig, self._model, self.spectral_matrix(index), label
            )
            self._cache.set_coefficients(bath, coeff)
        return coeff

    def inject_coefficients(self, index: int, coeff: BmsCoefficients) -> None:
        """Replace the assembled coefficients of one bath (diagnostic use)."""
        if coeff.dim != self._model.dim:
            raise DimensionMismatchError(
                f"Injected coefficients have dimension {coeff.dim}, "
                f"the model {self._model.dim}"
            )
        logger.warning("Coefficients of bath %d replaced by injected values", index)
        self._overrides[index] = coeff

    @property
    def per_bath_coefficients(self) -> list[BmsCoefficients]:
        """Coefficients of every bath, in bath order."""
        return [self.coefficients_for(k) for k in range(len(self._baths))]

    @property
    def coefficients(self) -> BmsCoefficients:
        """Summed coefficients, keeping the per-bath sets."""
        return combine_baths(self.per_bath_coefficients)

    def coupling_report(self) -> CouplingReport:
        """Selection-rule diagnostics of the coupling operators."""
        return check_conserved_coupling(self._model, eig=self.eigenstructure)

    def liouvillian(self, include_hamiltonian: bool = True) -> Liouvillian:
        """Dense Liouvillian in the joint eigenbasis."""
        if self._model.dim > DENSE_LIOUVILLIAN_MAX_DIM:
            raise PreconditionError(
                f"Dimension {self._model.dim} is above the dense Liouvillian "
                f"limit {DENSE_LIOUVILLIAN_MAX_DIM}; use the ladder solver"
            )
        return build_liouvillian(
            self.coefficients, self.eigenstructure, include_hamiltonian
        )

    def ladder(self) -> RateLadder:
        """Tridiagonal rate ladder of the population dynamics."""
        return reduce_to_ladder(self.coefficients, self.eigenstructure)

    @property
    def ladder_order(self) -> np.ndarray:
        """Eigenstate indices sorted by particle number."""
        return np.argsort(self.eigenstructure.integer_numbers, kind="stable")

    def _from_ladder(self, ladder: RateLadder) -> StationaryState:
        state = ladder_steady_state(ladder)
        populations = np.empty(ladder.levels)
        populations[self.ladder_order] = state.populations
        return state.model_copy(update={"populations": frozen_array(populations)})

    def _relaxation_time(self) -> float:
        coeff = self.coefficients
        rates = [
            value.real
            for (a, b, c, d), value in coeff.gamma.items()
            if a == c and b == d and a != b and value.real > 0
        ]
        if not rates:
            raise PreconditionError("No population transfer; give t_final explicitly")
        return EVOLUTION_TIME_FACTOR / min(rates)

    def relax(
        self,
        t_final: float | None = None,
        dt: float | None = None,
        rho0: np.ndarray | None = None,
        record_every: int | None = 1,
    ) -> Trajectory:
        """
        Integrate the master equation in the joint eigenbasis.

        Starts from the maximally mixed state unless ``rho0`` is given and runs
        for 50 inverse slowest population rates unless ``t_final`` is given.
        """
        d = self._model.dim
        if rho0 is None:
            rho0 = np.eye(d, dtype=complex) / d
        if t_final is None:
            t_final = self._relaxation_time()
        return time_evolve(self.liouvillian(), rho0, t_final, dt, record_every)

    def steady_state(
        self,
        method: Method = "auto",
        t_final: float | None = None,
        dt: float | None = None,
    ) -> StationaryState:
        """
        Stationary state by the selected method.

        ``auto`` uses the ladder recursion when the dynamics reduces to a ladder
        and the Liouvillian nullspace otherwise. Uniqueness is not examined by
        the time-evolution method.
        """
        if method == "auto":
            try:
                ladder = self.ladder()
            except (LadderStructureError, SecularStructureError) as e:
                logger.info("No ladder structure (%s); solving the nullspace", e)
                return liouvillian_nullspace(self.liouvillian())
            return self._from_ladder(ladder)
        if method == "ladder":
            return self._from_ladder(self.ladder())
        if method == "nullspace":
            return liouvillian_nullspace(self.liouvillian())

        trajectory = self.relax(t_final, dt, record_every=None)
        liouvillian = self.liouvillian()
        final = trajectory.final_state
        rho = (final + final.conj().T) / 2
        return StationaryState(
            populations=np.real(np.diag(rho)),
            method=SolverMethod.TIME_EVOLUTION,
            residual=float(np.max(np.abs(liouvillian.apply(rho)))),
            density_matrix=rho,
        )

    def verify(self, tolerance: float = BALANCE_TOLERANCE) -> list[BalanceReport]:
        """
        Run every balance relation per bath.

        When the model has known g factors and a ladder structure, the rate
        factorization is checked as well.
        """
        reports = verify_all(
            self.coefficients, self.eigenstructure, self._baths, tolerance
        )
        if self._g_factors is not None:
            try:
                ladder = self.ladder()
            except (LadderStructureError, SecularStructureError) as e:
                logger.warning("Factorization check skipped: %s", e)
            else:
                factorization_tol = max(tolerance, FACTORIZATION_TOLERANCE)
                reports.append(
                    verify_factorization(
                        ladder, self._baths, self._g_factors, factorization_tol
                    )
                )
        return reports

    def gibbs_residual(self) -> GibbsResidual | None:
        """
        Generator applied to the grand-canonical state of the single bath.

        Returns None with several baths (no common equilibrium) or when the
        model is too large for a dense Liouvillian.
        """
        if len(self._baths) != 1:
            logger.info("Gibbs check skipped: %d baths attached", len(self._baths))
            return None
        if self._model.dim > DENSE_LIOUVILLIAN_MAX_DIM:
            logger.warning("Gibbs check skipped: dimension %d", self._model.dim)
            return None
        bath = self._baths[0]
        return verify_gibbs_stationarity(
            self.liouvillian(), self.eigenstructure, bath.beta, bath.mu
        )
