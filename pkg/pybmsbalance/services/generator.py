"""Assembly of BMS coefficients, the Liouvillian and the tridiagonal rate ladder."""

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ..config import (
    COEFFICIENT_PRUNE_RTOL,
    COHERENCE_COUPLING_RTOL,
    CSV_FLOAT_FORMAT,
    LINDBLAD_PSD_TOL,
    TRACE_PRESERVATION_TOL,
)
from ..errors import (
    DimensionMismatchError,
    LadderStructureError,
    SecularStructureError,
)
from ..models import (
    BmsCoefficients,
    EigenStructure,
    LindbladFormReport,
    Liouvillian,
    RateLadder,
    SpectralMatrix,
    SystemModel,
)
from .operators import bohr_frequencies, coupling_in_eigenbasis

logger = logging.getLogger(__name__)

GammaMap = dict[tuple[int, int, int, int], complex]
SigmaMap = dict[tuple[int, int], complex]


def _prune(values: dict, scale: float) -> dict:
    threshold = COEFFICIENT_PRUNE_RTOL * scale
    return {key: value for key, value in values.items() if abs(value) > threshold}


def assemble_coefficients(
    eig: EigenStructure,
    model: SystemModel,
    sm: SpectralMatrix,
    label: str = "",
) -> BmsCoefficients:
    """
    Dampening coefficients and Lamb shift of one reservoir.

    gamma~_{ab,cd} = sum gamma_{alpha beta}(E_b - E_a) <a|A_beta|b> <c|A_alpha|d>^*
    for pairs (a, b) and (c, d) in the same Bohr-frequency group. The spectral
    matrix is evaluated once per group and only where some coupling has a
    non-vanishing matrix element.

    Args:
        eig: Joint eigenstructure of ``model``
        model: System model providing the coupling operators A_alpha
        sm: Spectral matrix with one row per coupling operator
        label: Name stored with the coefficients

    Returns:
        Pruned sparse coefficients
    """
    if sm.size != len(model.couplings):
        raise DimensionMismatchError(
            f"Spectral matrix has size {sm.size} but the model has "
            f"{len(model.couplings)} coupling operators"
        )
    if eig.dim != model.dim:
        raise DimensionMismatchError("Eigenstructure does not belong to the model")

    elements = np.array([coupling_in_eigenbasis(eig, a) for a in model.couplings])
    gamma: GammaMap = {}
    for frequency in bohr_frequencies(eig):
        pairs = [
            (a, b) for a, b in frequency.transitions if np.any(elements[:, a, b] != 0)
        ]
        if not pairs:
            continue
        columns = np.array([elements[:, a, b] for a, b in pairs]).T
        # block[p, q] = gamma~_{p, q}
        block = (columns.conj().T @ sm(frequency.omega) @ columns).T
        for p, (a, b) in enumerate(pairs):
            for q, (c, d) in enumerate(pairs):
                if block[p, q] != 0:
                    gamma[(a, b, c, d)] = complex(block[p, q])

    sigma: SigmaMap = {}
    if sm.sigma is not None:
        sigma = _lamb_shift(eig, elements, sm)

    scale = max((abs(v) for v in gamma.values()), default=0.0)
    gamma = _prune(gamma, scale)
    sigma = _prune(sigma, max((abs(v) for v in sigma.values()), default=0.0))
    logger.debug(
        "Assembled %d dampening and %d Lamb-shift coefficients for bath %r",
        len(gamma),
        len(sigma),
        label,
    )
    return BmsCoefficients(
        dim=eig.dim,
        energies=eig.energies,
        gamma=gamma,
        sigma=sigma,
        labels=(label,) if label else (),
    )


def _lamb_shift(
    eig: EigenStructure, elements: np.ndarray, sm: SpectralMatrix
) -> SigmaMap:
    # sigma~_{ab} = 1/(2i) sum_c sum_{alpha beta} sigma_{alpha beta}(E_a - E_c)
    #               <c|A_alpha|a>^* <c|A_beta|b>, for E_a = E_b
    centers = [float(np.mean(eig.energies[list(c)])) for c in eig.energy_clusters]
    sigma: SigmaMap = {}
    for i, cluster in enumerate(eig.energy_clusters):
        members = list(cluster)
        shift = np.zeros((len(members), len(members)), dtype=complex)
        for k, other in enumerate(eig.energy_clusters):
            block = elements[:, list(other)][:, :, members]
            shift += np.einsum(
                "ica,ij,jcb->ab", block.conj(), sm.lamb(centers[i] - centers[k]), block
            )
        shift /= 2j
        shift = (shift + shift.conj().T) / 2
        for p, a in enumerate(members):
            for q, b in enumerate(members):
                if shift[p, q] != 0:
                    sigma[(a, b)] = complex(shift[p, q])
    return sigma


def _check_same_universe(sets: Sequence[BmsCoefficients]) -> None:
    first = sets[0]
    for other in sets[1:]:
        tol = 1e-9 * (1 + float(np.ptp(first.energies)))
        if other.dim != first.dim or not np.allclose(
            other.energies, first.energies, rtol=0, atol=tol
        ):
            raise DimensionMismatchError(
                "Coefficient sets were built on different eigenstructures"
            )


def add_coefficients(
    first: BmsCoefficients, second: BmsCoefficients
) -> BmsCoefficients:
    """Entrywise sum of two coefficient sets on the same eigenbasis."""
    _check_same_universe([first, second])
    gamma: GammaMap = dict(first.gamma)
    for key, value in second.gamma.items():
        gamma[key] = gamma.get(key, 0.0) + value
    sigma: SigmaMap = dict(first.sigma)
    for key, value in second.sigma.items():
        sigma[key] = sigma.get(key, 0.0) + value
    return BmsCoefficients(
        dim=first.dim,
        energies=first.energies,
        gamma=gamma,
        sigma=sigma,
        labels=first.labels,
    )


def combine_baths(per_bath: Sequence[BmsCoefficients]) -> BmsCoefficients:
    """
    Sum the coefficients of several reservoirs.

    The per-reservoir sets are kept on the result for the balance checks.
    """
    if not per_bath:
        raise DimensionMismatchError("At least one coefficient set is required")
    _check_same_universe(per_bath)
    if len(per_bath) == 1:
        return per_bath[0]

    total = per_bath[0]
    for extra in per_bath[1:]:
        total = add_coefficients(total, extra)
    return total.model_copy(
        update={
            "per_bath": tuple(per_bath),
            "labels": tuple(label for c in per_bath for label in c.labels),
        }
    )


def build_liouvillian(
    coeff: BmsCoefficients,
    eig: EigenStructure,
    include_hamiltonian: bool = True,
) -> Liouvillian:
    """
    Liouvillian of the BMS master equation in the joint eigenbasis.

    Acts on column-major vectorized density matrices, vec(A rho B) =
    (B^T kron A) vec(rho). With ``include_hamiltonian=False`` only the Lamb
    shift and the dissipator are included, which makes the result additive in
    the coefficients.
    """
    d = eig.dim
    if coeff.dim != d:
        raise DimensionMismatchError(
            f"Coefficients of dimension {coeff.dim} do not fit eigenstructure {d}"
        )
    effective = np.zeros((d, d), dtype=complex)
    if include_hamiltonian:
        effective += np.diag(eig.energies)
    for (a, b), value in coeff.sigma.items():
        effective[a, b] += value
    identity = np.eye(d)
    matrix = -1j * (np.kron(identity, effective) - np.kron(effective.T, identity))

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    span = np.arange(d)
    for (a, b, c, dd), value in coeff.gamma.items():
        # jump term |a><b| rho |dd><c|
        rows.append(np.array([a + d * c]))
        cols.append(np.array([b + d * dd]))
        vals.append(np.array([value]))
        if a == c:
            # anticommutator with |dd><b|
            rows.extend((dd + d * span, span + d * b))
            cols.extend((b + d * span, span + d * dd))
            half = np.full(d, -value / 2)
            vals.extend((half, half))
    if vals:
        np.add.at(
            matrix, (np.concatenate(rows), np.concatenate(cols)), np.concatenate(vals)
        )

    labels = tuple(label for c in coeff.bath_sets() for label in c.labels)
    liouvillian = Liouvillian(
        matrix=matrix,
        dim=d,
        bath_labels=labels,
        includes_hamiltonian=include_hamiltonian,
    )
    violation = trace_preservation_violation(liouvillian)
    if violation > TRACE_PRESERVATION_TOL * max(coeff.max_magnitude, 1.0):
        logger.warning("Liouvillian does not preserve the trace (%.3e)", violation)
    return liouvillian


def trace_preservation_violation(liouvillian: Liouvillian) -> float:
    """Max-norm of vec(I)^T L, zero for a trace-preserving generator."""
    d = liouvillian.dim
    diagonal = np.arange(d) * (d + 1)
    return float(np.max(np.abs(liouvillian.matrix[diagonal, :].sum(axis=0))))


def check_lindblad_form(
    coeff: BmsCoefficients, eig: EigenStructure
) -> LindbladFormReport:
    """Smallest eigenvalue of gamma~ restricted to each secular frequency block."""
    frequency_of = {
        pair: group.omega
        for group in bohr_frequencies(eig)
        for pair in group.transitions
    }
    blocks: dict[float, set[tuple[int, int]]] = {}
    for a, b, c, d in coeff.gamma:
        omega = frequency_of.get((a, b), float(eig.energies[b] - eig.energies[a]))
        blocks.setdefault(omega, set()).update({(a, b), (c, d)})

    minima: dict[float, float] = {}
    for omega, members in blocks.items():
        pairs = sorted(members)
        matrix = np.array(
            [[coeff.gamma.get((*p, *q), 0.0) for q in pairs] for p in pairs],
            dtype=complex,
        )
        hermitian = (matrix + matrix.conj().T) / 2
        minima[omega] = float(np.min(np.linalg.eigvalsh(hermitian)))

    tolerance = LINDBLAD_PSD_TOL * max(coeff.max_magnitude, 1.0)
    passed = all(value >= tolerance for value in minima.values())
    if not passed:
        logger.warning("Coefficient matrix is not positive semidefinite in some block")
    return LindbladFormReport(block_minima=minima, tolerance=tolerance, passed=passed)


def _ladder_rates(
    coeff: BmsCoefficients, order: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    links = list(zip(order[:-1], order[1:], strict=True))
    up = np.array([coeff.rate(int(high), int(low)) for low, high in links])
    down = np.array([coeff.rate(int(low), int(high)) for low, high in links])
    floor = -COEFFICIENT_PRUNE_RTOL * max(coeff.max_magnitude, 1.0)
    for rates in (up, down):
        rates[(rates < 0) & (rates >= floor)] = 0.0
    return up, down


def reduce_to_ladder(coeff: BmsCoefficients, eig: EigenStructure) -> RateLadder:
    """
    Reduce the populations' dynamics to a tridiagonal rate ladder.

    Requires one eigenstate per consecutive particle number, populations that
    do not couple to coherences, and population rates only between adjacent
    number sectors.

    Raises:
        LadderStructureError: Not a ladder (names the offending transition)
        SecularStructureError: Populations couple to coherences
    """
    numbers = eig.integer_numbers
    order = np.argsort(numbers, kind="stable")
    if np.any(np.diff(numbers[order]) != 1):
        raise LadderStructureError(
            "Ladder reduction needs exactly one eigenstate per consecutive number"
        )

    threshold = COHERENCE_COUPLING_RTOL * max(coeff.max_magnitude, 1e-300)
    for (a, b, c, d), value in coeff.gamma.items():
        if abs(value) <= threshold:
            continue
        if (a == c) != (b == d):
            raise SecularStructureError(
                f"Coefficient ({a},{b},{c},{d}) couples populations to coherences"
            )
        change = int(numbers[a]) - int(numbers[b])
        if a == c and b == d and a != b and abs(change) != 1:
            raise LadderStructureError(
                f"Population transfer {b} -> {a} changes the number by {change}",
                transition=(b, a),
            )
    for (a, b), value in coeff.sigma.items():
        if a != b and abs(value) > threshold:
            raise SecularStructureError(
                f"Lamb shift ({a},{b}) couples populations to coherences"
            )

    up, down = _ladder_rates(coeff, order)
    per_bath_up = per_bath_down = None
    if coeff.per_bath:
        splits = [_ladder_rates(c, order) for c in coeff.per_bath]
        per_bath_up = np.array([s[0] for s in splits])
        per_bath_down = np.array([s[1] for s in splits])

    energies = eig.energies[order]
    return RateLadder(
        levels=eig.dim,
        omega=np.diff(energies),
        up=up,
        down=down,
        numbers=numbers[order],
        energies=energies,
        per_bath_up=per_bath_up,
        per_bath_down=per_bath_down,
    )


def _format_entry(key: tuple[int, ...], value: complex) -> str:
    fmt = CSV_FLOAT_FORMAT
    return " ".join(map(str, key)) + f" {value.real:{fmt}} {value.imag:{fmt}}"


def export_coefficients(coeff: BmsCoefficients, path: Path) -> None:
    """Write ``[gamma]`` lines ``a b c d re im`` and ``[sigma]`` lines ``a b re im``."""
    lines = ["[gamma]"]
    lines += [_format_entry(key, coeff.gamma[key]) for key in sorted(coeff.gamma)]
    lines.append("[sigma]")
    lines += [_format_entry(key, coeff.sigma[key]) for key in sorted(coeff.sigma)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_coefficients(
    path: Path, eig: EigenStructure, label: str = ""
) -> BmsCoefficients:
    """Read a coefficient file written by :func:`export_coefficients`.

    Lines before any section header are read as ``[gamma]`` lines.
    """
    gamma: GammaMap = {}
    sigma: SigmaMap = {}
    section = "gamma"
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise DimensionMismatchError(f"Cannot read coefficient file {path}: {e}") from e

    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line in ("[gamma]", "[sigma]"):
            section = line[1:-1]
            continue
        fields = line.split()
        width = 6 if section == "gamma" else 4
        try:
            if len(fields) != width:
                raise ValueError(f"expected {width} fields")
            index = [int(f) for f in fields[:-2]]
            value = complex(float(fields[-2]), float(fields[-1]))
        except ValueError as e:
            raise DimensionMismatchError(f"{path}:{number}: {e}") from e
        if any(not 0 <= i < eig.dim for i in index):
            raise DimensionMismatchError(
                f"{path}:{number}: index outside dimension {eig.dim}"
            )
        if section == "gamma":
            a, b, c, d = index
            gamma[(a, b, c, d)] = gamma.get((a, b, c, d), 0.0) + value
        else:
            a, b = index
            sigma[(a, b)] = sigma.get((a, b), 0.0) + value

    return BmsCoefficients(
        dim=eig.dim,
        energies=eig.energies,
        gamma=gamma,
        sigma=sigma,
        labels=(label,) if label else (),
    )
