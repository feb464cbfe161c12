"""Stationary states: ladder recursion, Liouvillian nullspace and time evolution."""

import logging
import math
from collections.abc import Sequence

import numpy as np
from scipy import linalg, optimize

from ..config import (
    CROSSING_XTOL,
    DEFAULT_DT_FACTOR,
    HERMITICITY_TOL,
    MAX_EVOLUTION_AMPLITUDE,
    MAX_EVOLUTION_STEPS,
    NULLSPACE_RTOL,
    POSITIVITY_CLIP,
    TRACE_DRIFT_TOL,
)
from ..errors import (
    DisconnectedLadderError,
    DivergentRatioError,
    LogDomainError,
    PositivityError,
    PreconditionError,
    StatisticsMismatchError,
    StepSizeError,
    UndefinedAverageError,
)
from ..models import (
    BathSpec,
    EffectiveThermalFit,
    Liouvillian,
    RateLadder,
    SolverMethod,
    StationaryState,
    Statistics,
    Trajectory,
)
from .baths import bath_rate, effective_occupation, occupation, occupation_complement

logger = logging.getLogger(__name__)


def ladder_rate_matrix(ladder: RateLadder) -> np.ndarray:
    """L x L generator W of the rate equation d rho / dt = W rho."""
    rates = np.zeros((ladder.levels, ladder.levels))
    links = np.arange(ladder.links)
    rates[links + 1, links] = ladder.up
    rates[links, links + 1] = ladder.down
    rates[np.diag_indices(ladder.levels)] = -rates.sum(axis=0)
    return rates


def ladder_steady_state(ladder: RateLadder) -> StationaryState:
    """
    Stationary populations of a rate ladder from rho_{m+1} / rho_m = up_m / down_m.

    The cumulative products are formed in log space. A link with vanishing
    down rate but finite up rate pumps all weight above it; the state with
    zero weight below that link is returned and a warning recorded.

    Raises:
        DisconnectedLadderError: A link has neither up nor down rate
    """
    log_weights = np.zeros(ladder.levels)
    warnings: list[str] = []
    for m in range(ladder.links):
        up, down = float(ladder.up[m]), float(ladder.down[m])
        if up == 0 and down == 0:
            raise DisconnectedLadderError(m)
        if down == 0:
            message = f"Link {m} has no down rate; all weight moves above it"
            logger.warning(message)
            warnings.append(message)
            log_weights[: m + 1] = -np.inf
            log_weights[m + 1] = 0.0
        elif up == 0:
            log_weights[m + 1] = -np.inf
        else:
            log_weights[m + 1] = log_weights[m] + math.log(up) - math.log(down)

    weights = np.exp(log_weights - np.max(log_weights))
    populations = weights / weights.sum()
    residual = float(np.max(np.abs(ladder_rate_matrix(ladder) @ populations)))
    return StationaryState(
        populations=populations,
        method=SolverMethod.LADDER_RECURSION,
        residual=residual,
        unique=True,
        warnings=tuple(warnings),
    )


def generalized_boltzmann_ratio(omega: float, baths: Sequence[BathSpec]) -> float:
    """
    Stationary ratio sum_k G_k F_k / sum_k G_k (1 +- F_k) at a link frequency.

    Each bath contributes with its own statistics, so Fermi and Bose
    reservoirs may be mixed.
    """
    numerator = denominator = 0.0
    for bath in baths:
        rate = bath_rate(omega, bath)
        if rate == 0:
            continue
        numerator += rate * occupation(omega, bath)
        denominator += rate * occupation_complement(omega, bath)
    if denominator == 0:
        if numerator == 0:
            raise UndefinedAverageError(omega)
        raise DivergentRatioError(
            f"Generalized Boltzmann factor diverges at omega={omega:.6g}"
        )
    return numerator / denominator


def _density_from_vector(vector: np.ndarray, dim: int) -> np.ndarray:
    return vector.reshape(dim, dim, order="F")


def _physical_state(rho: np.ndarray) -> np.ndarray:
    # Normalize, hermitize and clip small negative eigenvalues.
    rho = rho / np.trace(rho)
    rho = (rho + rho.conj().T) / 2
    values, vectors = np.linalg.eigh(rho)
    if values.min() < POSITIVITY_CLIP:
        raise PositivityError(
            f"Stationary state has eigenvalue {values.min():.3e} "
            f"below {POSITIVITY_CLIP}"
        )
    if values.min() < 0:
        values = np.clip(values, 0.0, None)
        rho = (vectors * values) @ vectors.conj().T
        rho = rho / np.trace(rho).real
    return rho


def liouvillian_nullspace(liouvillian: Liouvillian) -> StationaryState:
    """
    Stationary density matrix from the right nullspace of the Liouvillian.

    Singular values below 1e-10 of the largest one span the nullspace. A
    nullspace of dimension above one is reported with ``unique=False``; the
    returned state is then the projection of the maximally mixed state.
    """
    d = liouvillian.dim
    _, singular, vh = linalg.svd(liouvillian.matrix)
    threshold = NULLSPACE_RTOL * singular[0] if singular[0] > 0 else np.inf
    null_rows = vh[singular <= threshold]
    warnings: list[str] = []
    if null_rows.shape[0] == 0:
        message = "No singular value below the nullspace threshold"
        logger.warning(message)
        warnings.append(message)
        null_rows = vh[-1:]
    basis = null_rows.conj().T

    unique = basis.shape[1] == 1
    if unique:
        rho = _density_from_vector(basis[:, 0], d)
    else:
        message = f"Liouvillian nullspace has dimension {basis.shape[1]}; not ergodic"
        logger.warning(message)
        warnings.append(message)
        mixed = np.eye(d, dtype=complex).reshape(-1, order="F") / d
        rho = _density_from_vector(basis @ (basis.conj().T @ mixed), d)

    rho = _physical_state(rho)
    residual = float(np.max(np.abs(liouvillian.matrix @ rho.reshape(-1, order="F"))))
    logger.debug("Nullspace state found with residual %.3e", residual)
    return StationaryState(
        populations=np.real(np.diag(rho)),
        method=SolverMethod.NULLSPACE,
        residual=residual,
        unique=unique,
        density_matrix=rho,
        nullspace_basis=tuple(_density_from_vector(v, d) for v in basis.T),
        warnings=tuple(warnings),
    )


def _validate_density_matrix(rho: np.ndarray, dim: int) -> None:
    if rho.shape != (dim, dim):
        raise PreconditionError(f"Initial state must be {dim}x{dim}, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
        raise PreconditionError("Initial state is not hermitian")
    if abs(np.trace(rho) - 1) > TRACE_DRIFT_TOL:
        raise PreconditionError("Initial state does not have unit trace")


def time_evolve(
    liouvillian: Liouvillian,
    rho0: np.ndarray,
    t_final: float,
    dt: float | None = None,
    record_every: int | None = 1,
    reference: np.ndarray | None = None,
) -> Trajectory:
    """
    Fixed-step fourth-order Runge-Kutta integration of d vec(rho) / dt = L vec(rho).

    Args:
        liouvillian: Generator in the joint eigenbasis
        rho0: Initial density matrix in the same basis
        t_final: Integration time
        dt: Step size. Defaults to 0.05 over the largest absolute row sum of L.
        record_every: Keep every n-th step (the final state is always kept).
            None keeps only the initial and final states.
        reference: Optional state compared with the final one

    Raises:
        StepSizeError: The trace drifts beyond 1e-8 or the state blows up
        PreconditionError: The run needs more than MAX_EVOLUTION_STEPS steps
    """
    d = liouvillian.dim
    rho0 = np.asarray(rho0, dtype=complex)
    _validate_density_matrix(rho0, d)
    if t_final < 0:
        raise PreconditionError(f"t_final must be non-negative, got {t_final}")
    if dt is not None and dt <= 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    if record_every is not None and record_every < 1:
        raise PreconditionError("record_every must be at least 1")

    generator = liouvillian.matrix
    max_rate = float(np.max(np.abs(generator).sum(axis=1)))
    if t_final == 0:
        steps = 0
    elif max_rate == 0:
        steps = 1
    else:
        step = dt if dt is not None else DEFAULT_DT_FACTOR / max_rate
        steps = max(1, math.ceil(t_final / step))
    if steps > MAX_EVOLUTION_STEPS:
        raise PreconditionError(
            f"Integration to t={t_final:.3g} needs {steps} steps, above "
            f"{MAX_EVOLUTION_STEPS}; use a larger dt or a ladder or nullspace solve"
        )
    h = t_final / steps if steps else 0.0

    diagonal = np.arange(d) * (d + 1)
    state = rho0.reshape(-1, order="F").copy()
    initial_trace = state[diagonal].sum()
    times, states = [0.0], [rho0.copy()]
    drift = 0.0
    for n in range(1, steps + 1):
        k1 = generator @ state
        k2 = generator @ (state + h / 2 * k1)
        k3 = generator @ (state + h / 2 * k2)
        k4 = generator @ (state + h * k3)
        state = state + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)

        magnitude = np.max(np.abs(state))
        if not np.isfinite(magnitude) or magnitude > MAX_EVOLUTION_AMPLITUDE:
            raise StepSizeError(f"Integration diverged at step {n} with dt={h:.3e}")
        drift = max(drift, float(abs(state[diagonal].sum() - initial_trace)))
        if drift > TRACE_DRIFT_TOL:
            raise StepSizeError(f"Trace drift {drift:.3e} exceeds {TRACE_DRIFT_TOL}")
        if n == steps or (record_every is not None and n % record_every == 0):
            times.append(n * h)
            states.append(_density_from_vector(state, d).copy())

    final = states[-1]
    deviation = None
    if reference is not None:
        deviation = float(np.max(np.abs(final - np.asarray(reference))))
    logger.debug(
        "Integrated %d steps of size %.3e, trace drift %.3e", steps, h, drift
    )
    return Trajectory(
        times=times,
        states=np.array(states),
        max_trace_drift=drift,
        final_deviation=deviation,
    )


def fit_effective_beta_mu(
    omegas: Sequence[float], ratios: Sequence[float]
) -> EffectiveThermalFit:
    """
    Fit ln(ratio_m) = -beta_bar omega_m + beta_bar mu_bar by least squares.

    With a single distinct frequency only beta_bar is determined; mu_bar is
    then fixed to 0 and the fit is flagged as underdetermined.

    Raises:
        LogDomainError: A ratio is not finite and positive
    """
    w = np.asarray(omegas, dtype=float)
    r = np.asarray(ratios, dtype=float)
    if w.shape != r.shape or w.size == 0:
        raise PreconditionError("Need matching, non-empty frequency and ratio lists")
    if not np.all(np.isfinite(r)) or np.any(r <= 0):
        raise LogDomainError("Population ratios must be finite and positive")
    logs = np.log(r)

    if np.unique(w).size < 2:
        if w[0] == 0:
            raise PreconditionError("Cannot fit a temperature at omega = 0")
        beta = float(-np.mean(logs) / w[0])
        return EffectiveThermalFit(
            beta_bar=beta,
            mu_bar=0.0,
            consistency=float(np.max(np.abs(logs - np.mean(logs)))),
            inverted=beta < 0,
            underdetermined=True,
        )

    design = np.column_stack([-w, np.ones_like(w)])
    (beta, offset), *_ = np.linalg.lstsq(design, logs, rcond=None)
    consistency = float(np.max(np.abs(design @ np.array([beta, offset]) - logs)))
    mu = float(offset / beta) if beta != 0 else 0.0
    return EffectiveThermalFit(
        beta_bar=float(beta),
        mu_bar=mu,
        consistency=consistency,
        inverted=bool(beta < 0),
    )


def fit_ladder(ladder: RateLadder) -> EffectiveThermalFit:
    """Effective (beta_bar, mu_bar) of a ladder from its up/down rate ratios."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = ladder.up / ladder.down
    return fit_effective_beta_mu(ladder.omega, ratios)


def threshold_crossings(
    baths: Sequence[BathSpec], omega_grid: Sequence[float]
) -> list[float]:
    """
    Frequencies where the average Fermi occupation crosses 1/2.

    Sign changes on the grid are refined by bisection; exact zeros on the grid
    are reported as they are.
    """
    if any(bath.statistics is not Statistics.FERMI for bath in baths):
        raise StatisticsMismatchError("Threshold crossings need Fermi baths")

    def excess(omega: float) -> float:
        return effective_occupation(omega, baths) - 0.5

    grid = [float(w) for w in omega_grid]
    values = [excess(w) for w in grid]
    crossings: list[float] = []
    for i, value in enumerate(values):
        if value == 0:
            crossings.append(grid[i])
        elif i and values[i - 1] * value < 0:
            crossings.append(
                float(
                    optimize.bisect(
                        excess, grid[i - 1], grid[i], xtol=CROSSING_XTOL
                    )
                )
            )
    logger.debug("Found %d threshold crossings", len(crossings))
    return crossings
