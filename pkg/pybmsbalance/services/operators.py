"""Joint eigenstructure, Bohr frequencies and selection rules of a system model."""

import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ..config import (
    CSV_FLOAT_FORMAT,
    DEFAULT_RELATIVE_DEGENERACY_TOL,
    MATRIX_ELEMENT_RTOL,
    NUMBER_INTEGER_TOL,
    RECONSTRUCTION_RTOL,
    UNITARITY_TOL,
)
from ..errors import ModelValidationError, NumberQuantizationError, PreconditionError
from ..models import (
    BohrFrequency,
    CouplingReport,
    CouplingSelection,
    EigenStructure,
    HermitianOperator,
    SystemModel,
)

logger = logging.getLogger(__name__)


def default_degeneracy_tol(energies: np.ndarray) -> float:
    """Relative degeneracy tolerance scaled by the spectral range (or magnitude)."""
    spread = float(np.ptp(energies)) if energies.size else 0.0
    if spread == 0.0:
        spread = float(np.max(np.abs(energies))) if energies.size else 0.0
    return DEFAULT_RELATIVE_DEGENERACY_TOL * (spread or 1.0)


def cluster_sorted(values: np.ndarray, tol: float) -> list[list[int]]:
    """Single-link grouping of ascending values; a gap above ``tol`` splits."""
    groups: list[list[int]] = []
    for index, value in enumerate(values):
        if groups and value - values[groups[-1][-1]] <= tol:
            groups[-1].append(index)
        else:
            groups.append([index])
    return groups


def _fix_phase(vector: np.ndarray) -> np.ndarray:
    # Largest component real and positive.
    pivot = vector[int(np.argmax(np.abs(vector)))]
    return vector * (np.conj(pivot) / abs(pivot))


def diagonalize_joint(
    model: SystemModel, degeneracy_tol: float | None = None
) -> EigenStructure:
    """
    Find the common eigenbasis of H_S and N_S.

    H_S is diagonalized first; inside every degenerate energy cluster N_S is
    diagonalized again, so each basis vector is an eigenvector of both.

    Args:
        model: Validated system model ([H_S, N_S] = 0 is checked on construction)
        degeneracy_tol: Absolute energy tolerance for clustering. Defaults to
            1e-9 of the spectral range.

    Returns:
        EigenStructure sorted by energy cluster, then by particle number
    """
    hamiltonian = model.hamiltonian.entries
    number_op = model.number_op.entries
    raw_energies, vectors = np.linalg.eigh(hamiltonian)

    tol = degeneracy_tol
    if tol is None:
        tol = default_degeneracy_tol(raw_energies)
    if tol <= 0:
        raise PreconditionError(f"Degeneracy tolerance must be positive, got {tol}")

    columns: list[np.ndarray] = []
    energies: list[float] = []
    numbers: list[float] = []
    energy_clusters: list[tuple[int, ...]] = []
    for members in cluster_sorted(raw_energies, tol):
        subspace = vectors[:, members]
        n_block = subspace.conj().T @ number_op @ subspace
        _, rotation = np.linalg.eigh((n_block + n_block.conj().T) / 2)
        start = len(columns)
        for vector in (subspace @ rotation).T:
            vector = _fix_phase(vector)
            columns.append(vector)
            energies.append(float(np.real(vector.conj() @ hamiltonian @ vector)))
            numbers.append(float(np.real(vector.conj() @ number_op @ vector)))
        energy_clusters.append(tuple(range(start, len(columns))))

    number_values = np.array(numbers)
    offsets = number_values - number_values.min()
    deviation = float(np.max(np.abs(offsets - np.rint(offsets))))
    if deviation > NUMBER_INTEGER_TOL:
        raise NumberQuantizationError(
            f"Number eigenvalues are not integer-spaced (deviation {deviation:.3e})"
        )
    rounded = np.rint(offsets).astype(int)

    number_clusters: list[tuple[int, ...]] = []
    for cluster in energy_clusters:
        for value in sorted({int(rounded[i]) for i in cluster}):
            number_clusters.append(tuple(i for i in cluster if rounded[i] == value))

    basis = np.array(columns).T
    unitarity = float(np.max(np.abs(basis.conj().T @ basis - np.eye(model.dim))))
    reconstruction = float(
        np.max(np.abs((basis * np.array(energies)) @ basis.conj().T - hamiltonian))
    )
    scale = max(float(np.max(np.abs(hamiltonian))), 1.0)
    if unitarity > UNITARITY_TOL or reconstruction > RECONSTRUCTION_RTOL * scale:
        logger.warning(
            "Joint eigenbasis is inaccurate: unitarity %.3e, reconstruction %.3e",
            unitarity,
            reconstruction,
        )

    logger.debug(
        "Diagonalized %d-dimensional model into %d energy and %d number clusters",
        model.dim,
        len(energy_clusters),
        len(number_clusters),
    )
    return EigenStructure(
        energies=energies,
        numbers=numbers,
        basis=basis,
        energy_clusters=tuple(energy_clusters),
        number_clusters=tuple(number_clusters),
        degeneracy_tol=tol,
    )


def bohr_frequencies(eig: EigenStructure) -> list[BohrFrequency]:
    """
    Group every transition (a, b) by its frequency E_b - E_a.

    Frequencies are built from the energy clusters, so degenerate transitions
    land in the same group and the zero group holds all intra-cluster pairs.

    Returns:
        Frequency groups in ascending order of omega
    """
    centers = [float(np.mean(eig.energies[list(c)])) for c in eig.energy_clusters]
    pairs = sorted(
        (centers[j] - centers[i], i, j)
        for i in range(len(centers))
        for j in range(len(centers))
    )
    omegas = np.array([p[0] for p in pairs])

    frequencies: list[BohrFrequency] = []
    for group in cluster_sorted(omegas, eig.degeneracy_tol):
        transitions = tuple(
            (a, b)
            for k in group
            for a in eig.energy_clusters[pairs[k][1]]
            for b in eig.energy_clusters[pairs[k][2]]
        )
        omega = float(np.mean(omegas[group]))
        if abs(omega) <= eig.degeneracy_tol:
            omega = 0.0
        frequencies.append(BohrFrequency(omega=omega, transitions=transitions))
    return frequencies


def coupling_in_eigenbasis(
    eig: EigenStructure, coupling: HermitianOperator
) -> np.ndarray:
    """Matrix elements <a|A|b> in the joint eigenbasis, tiny entries cleared."""
    elements = eig.to_eigenbasis(coupling.entries)
    scale = float(np.max(np.abs(elements))) if elements.size else 0.0
    elements[np.abs(elements) <= MATRIX_ELEMENT_RTOL * scale] = 0.0
    return elements


def check_conserved_coupling(
    model: SystemModel,
    per_bath_coupling_mask: Sequence[Sequence[int]] | None = None,
    eig: EigenStructure | None = None,
) -> CouplingReport:
    """
    Report the number changes induced by each coupling operator.

    Args:
        model: System model whose couplings are inspected
        per_bath_coupling_mask: For each bath, the indices of the couplings it
            acts through. Defaults to a single bath using all couplings.
        eig: Precomputed eigenstructure of ``model``

    Returns:
        CouplingReport listing the Delta N set of every coupling
    """
    if eig is None:
        eig = diagonalize_joint(model)
    numbers = eig.integer_numbers
    selections: list[CouplingSelection] = []
    warnings: list[str] = []

    for index, coupling in enumerate(model.couplings):
        rows, cols = np.nonzero(coupling_in_eigenbasis(eig, coupling))
        pairs = zip(rows, cols, strict=True)
        delta_n = tuple(sorted({int(numbers[a] - numbers[b]) for a, b in pairs}))
        beyond = any(abs(d) > 1 for d in delta_n)
        if beyond:
            message = (
                f"Coupling {index} changes the number by {delta_n}; "
                "outside the ladder picture"
            )
            logger.warning(message)
            warnings.append(message)
        selections.append(
            CouplingSelection(
                index=index,
                delta_n=delta_n,
                mixes_raise_and_lower=any(d > 0 for d in delta_n)
                and any(d < 0 for d in delta_n),
                beyond_ladder=beyond,
            )
        )

    mask = per_bath_coupling_mask or [tuple(range(len(model.couplings)))]
    per_bath = [
        tuple(sorted({d for i in couplings for d in selections[i].delta_n}))
        for couplings in mask
    ]
    return CouplingReport(couplings=selections, per_bath=per_bath, warnings=warnings)


def load_operator(path: Path, label: str | None = None) -> HermitianOperator:
    """
    Read an operator from the text format ``dim`` followed by ``row col re im`` lines.

    Entries that are not listed are zero.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").split("\n")
        dim = int(lines[0].strip())
        body = [line for line in lines[1:] if line.strip()]
        table = np.loadtxt(body, ndmin=2) if body else np.empty((0, 4))
    except (OSError, ValueError, IndexError) as e:
        raise ModelValidationError(f"Cannot read operator file {path}: {e}") from e

    if dim < 1 or (table.size and table.shape[1] != 4):
        raise ModelValidationError(f"Operator file {path} is malformed")
    entries = np.zeros((dim, dim), dtype=complex)
    for row, col, re, im in table:
        r, c = int(row), int(col)
        if not (0 <= r < dim and 0 <= c < dim):
            raise ModelValidationError(
                f"Operator file {path} has index ({r}, {c}) outside dim {dim}"
            )
        entries[r, c] = complex(re, im)
    logger.debug("Loaded %dx%d operator from %s", dim, dim, path)
    name = label if label is not None else path.stem
    return HermitianOperator(entries=entries, label=name)


def write_operator(operator: HermitianOperator, path: Path) -> None:
    """Write every entry of ``operator`` in the ``row col re im`` text format."""
    fmt = CSV_FLOAT_FORMAT
    lines = [str(operator.dim)]
    for (row, col), value in np.ndenumerate(operator.entries):
        lines.append(f"{row} {col} {value.real:{fmt}} {value.imag:{fmt}}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
