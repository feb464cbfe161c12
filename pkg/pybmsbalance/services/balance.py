"""Balance relations of grand-canonical BMS coefficients and Gibbs stationarity."""

import logging
from collections.abc import Iterable, Sequence

import numpy as np

from ..config import (
    BALANCE_ABSOLUTE_FLOOR,
    BALANCE_TOLERANCE,
    EXPONENT_SATURATION,
    FACTORIZATION_TOLERANCE,
    RELATIVE_FLOOR,
)
from ..errors import DimensionMismatchError
from ..models import (
    BalanceReport,
    BathSpec,
    BmsCoefficients,
    EigenStructure,
    GibbsResidual,
    Liouvillian,
    RateLadder,
)
from .baths import bath_rate, occupation, occupation_complement

logger = logging.getLogger(__name__)

LAMB_SHIFT_SELECTION = "lamb_shift_selection"
DEGENERATE_DISSIPATOR = "degenerate_dissipator"
LOCAL_BALANCE = "local_balance"
DETAILED_BALANCE = "detailed_balance"
FACTORIZATION = "factorization"


class _Tally:
    """Running worst violation of one relation."""

    def __init__(self, relation: str, floor: float, tolerance: float):
        self.relation = relation
        self.floor = floor
        self.tolerance = tolerance
        self.max_abs = 0.0
        self.max_rel = 0.0
        self.worst: tuple[int, ...] | None = None
        self.failed = False
        self.checked = 0

    def compare(self, lhs: complex, rhs: complex, index: tuple[int, ...]) -> None:
        self.checked += 1
        difference = abs(lhs - rhs)
        if difference <= self.floor:
            return
        relative = difference / max(abs(lhs), abs(rhs), RELATIVE_FLOOR)
        self.max_abs = max(self.max_abs, difference)
        if relative > self.max_rel:
            self.max_rel = relative
            self.worst = index
        if relative > self.tolerance:
            self.failed = True

    def report(self, bath: BathSpec, notes: list[str] | None = None) -> BalanceReport:
        if self.failed:
            logger.debug(
                "%s violated for bath %r at %s (relative %.3e)",
                self.relation,
                bath.label,
                self.worst,
                self.max_rel,
            )
        return BalanceReport(
            relation=self.relation,
            max_abs=self.max_abs,
            max_rel=self.max_rel,
            worst_index=self.worst,
            passed=not self.failed,
            tolerance=self.tolerance,
            checked=self.checked,
            bath_label=bath.label,
            notes=notes or [],
        )


def _scale(coeff: BmsCoefficients) -> float:
    magnitudes = [abs(v) for v in coeff.gamma.values()]
    magnitudes += [abs(v) for v in coeff.sigma.values()]
    return max(magnitudes, default=0.0)


def _tally(relation: str, coeff: BmsCoefficients, tolerance: float) -> _Tally:
    return _Tally(relation, BALANCE_ABSOLUTE_FLOOR * _scale(coeff), tolerance)


def _weighted(value: complex, exponent: float) -> tuple[complex, complex]:
    # value * exp(exponent) compared with value; the factor goes where it is <= 1.
    exponent = float(np.clip(exponent, -EXPONENT_SATURATION, EXPONENT_SATURATION))
    if exponent <= 0:
        return value * np.exp(exponent), value
    return value, value * np.exp(-exponent)


def _number_shift(eig: EigenStructure, bath: BathSpec, i: int, j: int) -> float:
    numbers = eig.integer_numbers
    return bath.beta * bath.mu * float(numbers[i] - numbers[j])


def verify_lamb_shift_selection(
    coeff: BmsCoefficients,
    eig: EigenStructure,
    bath: BathSpec,
    tolerance: float = BALANCE_TOLERANCE,
) -> BalanceReport:
    """Lamb shift invariance sigma~_ij exp(beta mu (N_i - N_j)) = sigma~_ij."""
    tally = _tally(LAMB_SHIFT_SELECTION, coeff, tolerance)
    for (i, j), value in coeff.sigma.items():
        tally.compare(*_weighted(value, _number_shift(eig, bath, i, j)), (i, j))
    return tally.report(bath)


def verify_degenerate_dissipator(
    coeff: BmsCoefficients,
    eig: EigenStructure,
    bath: BathSpec,
    tolerance: float = BALANCE_TOLERANCE,
) -> BalanceReport:
    """
    Dissipator invariance within one output level a.

    gamma~_{aj,ai} exp(beta mu (N_i - N_j)) = gamma~_{aj,ai}.
    """
    tally = _tally(DEGENERATE_DISSIPATOR, coeff, tolerance)
    for (a, j, c, i), value in coeff.gamma.items():
        if a == c:
            shift = _number_shift(eig, bath, i, j)
            tally.compare(*_weighted(value, shift), (a, j, a, i))
    return tally.report(bath)


def _local_balance_triples(coeff: BmsCoefficients) -> set[tuple[int, int, int]]:
    # (i, a, j) for every stored gamma~_{ia,ja} or gamma~_{aj,ai}
    triples = {(p, q, r) for p, q, r, s in coeff.gamma if q == s}
    triples |= {(s, p, q) for p, q, r, s in coeff.gamma if p == r}
    return triples


def _check_local_balance(
    relation: str,
    triples: Iterable[tuple[int, int, int]],
    coeff: BmsCoefficients,
    eig: EigenStructure,
    bath: BathSpec,
    tolerance: float,
) -> BalanceReport:
    tally = _tally(relation, coeff, tolerance)
    energies, numbers = eig.energies, eig.integer_numbers
    for i, a, j in sorted(triples):
        forward = coeff.gamma.get((i, a, j, a), 0j)
        backward = coeff.gamma.get((a, j, a, i), 0j)
        exponent = bath.beta * (
            bath.mu * float(numbers[a] - numbers[j]) - (energies[a] - energies[i])
        )
        exponent = float(np.clip(exponent, -EXPONENT_SATURATION, EXPONENT_SATURATION))
        if exponent <= 0:
            lhs, rhs = forward * np.exp(exponent), backward
        else:
            lhs, rhs = forward, backward * np.exp(-exponent)
        tally.compare(lhs, rhs, (i, a, j))
    return tally.report(bath)


def verify_local_balance(
    coeff: BmsCoefficients,
    eig: EigenStructure,
    bath: BathSpec,
    tolerance: float = BALANCE_TOLERANCE,
) -> BalanceReport:
    """
    Grand-canonical local balance of one reservoir's coefficients.

    gamma~_{ia,ja} exp(-beta (E_a - E_i)) exp(beta mu (N_a - N_j)) = gamma~_{aj,ai}
    for every stored index triple (i, a, j).
    """
    triples = _local_balance_triples(coeff)
    return _check_local_balance(LOCAL_BALANCE, triples, coeff, eig, bath, tolerance)


def verify_detailed_balance(
    coeff: BmsCoefficients,
    eig: EigenStructure,
    bath: BathSpec,
    tolerance: float = BALANCE_TOLERANCE,
) -> BalanceReport:
    """Classical detailed balance, the i = j case of the local balance relation."""
    triples = {t for t in _local_balance_triples(coeff) if t[0] == t[2]}
    return _check_local_balance(DETAILED_BALANCE, triples, coeff, eig, bath, tolerance)


def verify_factorization(
    ladder: RateLadder,
    baths: Sequence[BathSpec],
    g_factors: Sequence[float] | None,
    tolerance: float = FACTORIZATION_TOLERANCE,
) -> BalanceReport:
    """
    Compare ladder rates with g_m G_k(omega_m) F_k(omega_m) and g_m G_k (1 +- F_k).

    Without g factors the check is skipped and reported as passed with a note.
    """
    if g_factors is None:
        logger.warning("No g factors known for this model; factorization check skipped")
        return BalanceReport(
            relation=FACTORIZATION,
            tolerance=tolerance,
            notes=["skipped: g factors unknown"],
        )
    g = np.asarray(g_factors, dtype=float)
    if ladder.per_bath_up is not None and ladder.per_bath_down is not None:
        ups, downs = ladder.per_bath_up, ladder.per_bath_down
    else:
        ups, downs = ladder.up[None, :], ladder.down[None, :]
    if len(baths) != ups.shape[0] or g.shape != (ladder.links,):
        raise DimensionMismatchError(
            "Factorization needs one bath per rate split and one g factor per link"
        )

    scale = max(float(np.max(ups, initial=0.0)), float(np.max(downs, initial=0.0)))
    children = []
    for k, bath in enumerate(baths):
        tally = _Tally(FACTORIZATION, BALANCE_ABSOLUTE_FLOOR * scale, tolerance)
        for m, omega in enumerate(ladder.omega):
            rate = g[m] * bath_rate(float(omega), bath)
            if rate == 0:
                expected_up = expected_down = 0.0
            else:
                expected_up = rate * occupation(float(omega), bath)
                expected_down = rate * occupation_complement(float(omega), bath)
            tally.compare(ups[k, m], expected_up, (m, 1))
            tally.compare(downs[k, m], expected_down, (m, -1))
        children.append(tally.report(bath))
    if len(children) == 1:
        return children[0]
    return BalanceReport.aggregate(FACTORIZATION, children, tolerance)


def gibbs_state(eig: EigenStructure, beta: float, mu: float) -> np.ndarray:
    """Grand-canonical state exp(-beta (H - mu N)) / Z in the joint eigenbasis."""
    exponents = -beta * (eig.energies - mu * eig.numbers)
    weights = np.exp(exponents - np.max(exponents))
    return np.diag(weights / weights.sum()).astype(complex)


def verify_gibbs_stationarity(
    liouvillian: Liouvillian, eig: EigenStructure, beta: float, mu: float
) -> GibbsResidual:
    """
    Apply the generator to the grand-canonical Gibbs state.

    The residual is also split into off-diagonal elements between different
    energy clusters (a), diagonal elements (b) and off-diagonal elements within
    one cluster (c).
    """
    if liouvillian.dim != eig.dim:
        raise DimensionMismatchError(
            "Liouvillian and eigenstructure differ in dimension"
        )
    derivative = np.abs(liouvillian.apply(gibbs_state(eig, beta, mu)))
    labels = eig.cluster_labels
    same_cluster = labels[:, None] == labels[None, :]
    diagonal = np.eye(eig.dim, dtype=bool)

    def restricted(mask: np.ndarray) -> float:
        return float(np.max(derivative[mask], initial=0.0))

    return GibbsResidual(
        residual=float(np.max(derivative)),
        case_a=restricted(~same_cluster),
        case_b=restricted(diagonal),
        case_c=restricted(same_cluster & ~diagonal),
        generator_norm=liouvillian.norm,
    )


def verify_all(
    coeff: BmsCoefficients,
    eig: EigenStructure,
    baths: Sequence[BathSpec],
    tolerance: float = BALANCE_TOLERANCE,
) -> list[BalanceReport]:
    """
    Run every coefficient relation separately for each reservoir.

    Returns one aggregated report per relation; its ``per_bath`` field holds
    the report of each reservoir.
    """
    sets = coeff.bath_sets()
    if len(sets) != len(baths):
        raise DimensionMismatchError(
            f"{len(sets)} coefficient sets but {len(baths)} baths were given"
        )
    checks = (
        verify_lamb_shift_selection,
        verify_degenerate_dissipator,
        verify_local_balance,
        verify_detailed_balance,
    )
    reports = []
    for check, relation in zip(
        checks,
        (LAMB_SHIFT_SELECTION, DEGENERATE_DISSIPATOR, LOCAL_BALANCE, DETAILED_BALANCE),
        strict=True,
    ):
        children = [
            check(part, eig, bath, tolerance)
            for part, bath in zip(sets, baths, strict=True)
        ]
        reports.append(BalanceReport.aggregate(relation, children, tolerance))
    failed = [r.relation for r in reports if not r.passed]
    if failed:
        logger.info("Balance relations failed: %s", ", ".join(failed))
    return reports
