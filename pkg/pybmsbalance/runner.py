"""Scenario pipelines behind the command-line interface."""

import asyncio
import logging
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from .config import (
    FIG1_BETA,
    FIG1_CENTERS,
    FIG1_EPSILON,
    FIG1_GAMMA,
    FIG1_GRID,
    FIG1_HOPPING,
    FIG1_INTERACTION,
    FIG1_LEVELS,
    FIG1_MU,
    FIG1_WIDTH,
)
from .errors import BmsError, ConfigError, VerificationFailed
from .models import (
    BathSpec,
    EffectiveThermalFit,
    GridSpec,
    LorentzianProfile,
    ModelSpec,
    OutputSpec,
    PresetName,
    PresetParams,
    RunMode,
    ScenarioConfig,
    StationaryState,
    Statistics,
    SystemModel,
)
from .services import (
    bohr_frequencies,
    build_preset,
    check_lindblad_form,
    effective_occupation,
    fit_effective_beta_mu,
    generalized_boltzmann_ratio,
    key_value_lines,
    kms_check,
    load_coefficients,
    load_operator,
    occupation,
    threshold_crossings,
    write_csv,
    write_text,
)
from .system import OpenSystem

logger = logging.getLogger(__name__)

# |F_bar - 1/2| below this counts as sitting on the threshold
THRESHOLD_TIE = 1e-12
RATIO_TIE = 1e-9

RATE_SCALE_NOTE = (
    "rates in units of the tunneling scale Gamma; the stationary state does not "
    "depend on it, transients do"
)


class RunResult(BaseModel):
    """Files written by one pipeline."""

    mode: RunMode
    files: list[Path] = Field(default_factory=list)


class SweepRow(BaseModel):
    """Outcome of one sweep grid point."""

    value: float
    populations: list[float] = Field(default_factory=list)
    fit: EffectiveThermalFit | None = None
    error: str | None = None


def build_system(config: ScenarioConfig) -> OpenSystem:
    """Create the open system described by a scenario."""
    spec = config.model
    if spec is None:
        raise ConfigError(f"run '{config.run.value}' needs a model")
    tol = config.solver.degeneracy_tol
    if spec.preset is not None:
        bundle = build_preset(spec.preset, spec.params)
        logger.info("Using preset %s with %d levels", bundle.name, bundle.levels)
        return OpenSystem.from_bundle(bundle, config.baths, tol)

    if spec.hamiltonian is None or spec.number_op is None:
        raise ConfigError("operator models need both hamiltonian and number_op")
    model = SystemModel(
        hamiltonian=load_operator(spec.hamiltonian, "H_S"),
        number_op=load_operator(spec.number_op, "N_S"),
        couplings=[
            load_operator(path, f"A{index + 1}")
            for index, path in enumerate(spec.couplings)
        ],
        energy_unit_label=config.reference_unit,
    )
    return OpenSystem(model, config.baths, tol)


def describe_model(spec: ModelSpec | None) -> str:
    """Short description of a model specification."""
    if spec is None:
        return "-"
    if spec.preset is None:
        return f"operators from {spec.hamiltonian}"
    params = spec.params.model_dump(by_alias=True)
    return spec.preset.value + ":" + ",".join(f"{k}={v}" for k, v in params.items())


def ladder_view(
    system: OpenSystem, state: StationaryState
) -> tuple[np.ndarray, np.ndarray]:
    """
    Link frequencies and population ratios in particle-number order.

    Both arrays are empty when the eigenstates do not form a ladder with one
    state per consecutive particle number.
    """
    eig = system.eigenstructure
    order = system.ladder_order
    if np.any(np.diff(eig.integer_numbers[order]) != 1):
        return np.array([]), np.array([])
    populations = state.populations[order]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = populations[1:] / populations[:-1]
    return np.diff(eig.energies[order]), ratios


def effective_fit(
    omegas: np.ndarray, ratios: np.ndarray
) -> EffectiveThermalFit | None:
    """Effective (beta_bar, mu_bar) from the finite, positive ratios only."""
    usable = np.isfinite(ratios) & (ratios > 0)
    if not np.any(usable):
        return None
    try:
        return fit_effective_beta_mu(omegas[usable], ratios[usable])
    except BmsError as e:
        logger.info("No effective thermal fit: %s", e)
        return None


def _prediction(omega: float, baths: list[BathSpec]) -> float | str:
    try:
        return generalized_boltzmann_ratio(omega, baths)
    except BmsError:
        return "error"


def _fit_values(fit: EffectiveThermalFit | None) -> dict[str, Any]:
    if fit is None:
        return {"fit": "unavailable"}
    return {
        "beta_bar": fit.beta_bar,
        "mu_bar": fit.mu_bar,
        "consistency": fit.consistency,
        "inverted": fit.inverted,
        "underdetermined": fit.underdetermined,
    }


def write_populations(
    path: Path, system: OpenSystem, state: StationaryState
) -> Path:
    """Write ``level, energy, number, population`` in particle-number order."""
    eig = system.eigenstructure
    numbers = eig.integer_numbers
    rows = [
        (int(a), eig.energies[a], int(numbers[a]), state.populations[a])
        for a in system.ladder_order
    ]
    return write_csv(path, ("level", "energy", "number", "population"), rows)


def run_steady(config: ScenarioConfig) -> RunResult:
    """Solve for the stationary state and write populations, ratios and summary."""
    system = build_system(config)
    solver = config.solver
    state = system.steady_state(solver.method, solver.t_final, solver.dt)
    omegas, ratios = ladder_view(system, state)
    baths = list(system.baths)

    output = config.output
    files = [write_populations(output.path("populations.csv"), system, state)]
    rows = [
        (m, omega, ratio, _prediction(float(omega), baths))
        for m, (omega, ratio) in enumerate(zip(omegas, ratios, strict=True))
    ]
    files.append(
        write_csv(
            output.path("ratios.csv"), ("link", "omega", "ratio", "prediction"), rows
        )
    )

    summary: dict[str, Any] = {
        "run": RunMode.STEADY.value,
        "model": describe_model(config.model),
        "reference_unit": config.reference_unit,
        "baths": len(baths),
        "method": state.method.value,
        "residual": state.residual,
        "unique": state.unique,
    }
    summary.update(_fit_values(effective_fit(omegas, ratios)))
    summary["rate_scale"] = RATE_SCALE_NOTE
    lines = key_value_lines(summary) + [f"warning: {w}" for w in state.warnings]
    files.append(write_text(output.path("summary.txt"), lines))
    logger.info("Steady state solved with %s", state.method.value)
    return RunResult(mode=RunMode.STEADY, files=files)


def _status(passed: bool) -> str:
    return "PASS" if passed else "FAIL"


def run_verify(
    config: ScenarioConfig, inject_coefficients: Path | None = None
) -> RunResult:
    """
    Check every balance relation per bath and, for one bath, Gibbs stationarity.

    Args:
        config: Scenario with a model and at least one bath
        inject_coefficients: Coefficient file replacing the assembled
            coefficients of the first bath

    Raises:
        VerificationFailed: Some relation failed; the report is written first
    """
    system = build_system(config)
    tolerance = config.solver.tolerance
    eig = system.eigenstructure
    if inject_coefficients is not None:
        injected = load_coefficients(inject_coefficients, eig, system.bath_label(0))
        system.inject_coefficients(0, injected)

    lines: list[str] = [f"model: {describe_model(config.model)}"]
    failures: list[str] = []
    for report in system.verify(tolerance):
        lines.append(report.summary())
        lines.extend(f"  {child.summary()}" for child in report.per_bath)
        lines.extend(f"  note: {note}" for note in report.notes)
        if not report.passed:
            failures.append(report.summary())

    lindblad = check_lindblad_form(system.coefficients, eig)
    lines.append(
        f"lindblad_form: {_status(lindblad.passed)} minimum={lindblad.minimum:.3e}"
    )
    if not lindblad.passed:
        failures.append(lines[-1])

    gibbs = system.gibbs_residual()
    if gibbs is None:
        reason = (
            f"{len(system.baths)} baths attached, no common equilibrium"
            if len(system.baths) != 1
            else f"dimension {eig.dim} too large for a dense generator"
        )
        lines.append(f"gibbs: SKIPPED ({reason})")
    else:
        passed = gibbs.relative <= tolerance
        lines.append(
            f"gibbs: {_status(passed)} residual={gibbs.residual:.3e} "
            f"relative={gibbs.relative:.3e} case_a={gibbs.case_a:.3e} "
            f"case_b={gibbs.case_b:.3e} case_c={gibbs.case_c:.3e}"
        )
        if not passed:
            failures.append(lines[-1])

    omegas = [f.omega for f in bohr_frequencies(eig) if f.omega > 0]
    for index, bath in enumerate(system.baths):
        label = system.bath_label(index)
        try:
            kms = kms_check(system.spectral_matrix(index), bath, omegas)
        except BmsError as e:
            lines.append(f"kms [{label}]: not evaluated ({e})")
            continue
        state = "ok" if kms.passed else "violated"
        notes = "; ".join(kms.notes)
        lines.append(
            f"kms [{label}]: {state} max_rel={kms.max_relative_violation:.3e} "
            f"(informational{'; ' + notes if notes else ''})"
        )

    path = write_text(config.output.path("verify.txt"), lines)
    if failures:
        raise VerificationFailed(
            f"{len(failures)} check(s) failed, see {path}; first: {failures[0]}"
        )
    logger.info("All balance relations hold")
    return RunResult(mode=RunMode.VERIFY, files=[path])


def fig1_baths() -> list[BathSpec]:
    """Two Fermi leads with Lorentzian rates tuned for population inversion."""
    return [
        BathSpec(
            statistics=Statistics.FERMI,
            beta=FIG1_BETA,
            mu=mu,
            profile=LorentzianProfile(
                gamma=FIG1_GAMMA, center=center, width=FIG1_WIDTH
            ),
            label=f"lead{index + 1}",
        )
        for index, (mu, center) in enumerate(zip(FIG1_MU, FIG1_CENTERS, strict=True))
    ]


def fig1_config(output: OutputSpec | None = None) -> ScenarioConfig:
    """Default ladder-engineering scenario on the ten-site electronic model."""
    start, stop, points = FIG1_GRID
    return ScenarioConfig(
        run=RunMode.FIG1,
        model=ModelSpec(
            preset=PresetName.ELECTRONIC,
            params=PresetParams(
                levels=FIG1_LEVELS,
                epsilon=FIG1_EPSILON,
                interaction=FIG1_INTERACTION,
                hopping=FIG1_HOPPING,
            ),
        ),
        baths=fig1_baths(),
        grid=GridSpec(start=start, stop=stop, points=points),
        output=output or OutputSpec(),
    )


def _threshold_sign(value: float) -> int:
    excess = value - 0.5
    return 0 if abs(excess) <= THRESHOLD_TIE else int(np.sign(excess))


def _ratio_sign(ratio: float) -> int:
    excess = ratio - 1.0
    return 0 if abs(excess) <= RATIO_TIE else int(np.sign(excess))


def run_fig1(config: ScenarioConfig | None = None) -> RunResult:
    """
    Reproduce the two-lead population-inversion scenario.

    Every part missing from ``config`` (model, baths, grid) is taken from the
    built-in defaults.
    """
    defaults = fig1_config()
    if config is not None:
        defaults = defaults.model_copy(
            update={
                "model": config.model or defaults.model,
                "baths": config.baths or defaults.baths,
                "grid": config.grid or defaults.grid,
                "output": config.output,
                "solver": config.solver,
            }
        )
    config = defaults
    if config.grid is None:
        raise ConfigError("fig1 needs a frequency grid")
    baths = config.baths
    grid = config.grid.values()
    output = config.output

    rows = [
        (omega, *(occupation(float(omega), b) for b in baths), _average(omega, baths))
        for omega in grid
    ]
    header = ("omega", *(f"f{k + 1}" for k in range(len(baths))), "F_bar")
    files = [write_csv(output.path("occupation.csv"), header, rows)]

    crossings = threshold_crossings(baths, grid)
    files.append(
        write_csv(
            output.path("crossings.csv"),
            ("index", "omega"),
            list(enumerate(crossings)),
        )
    )

    system = build_system(config)
    state = system.steady_state("auto")
    files.append(write_populations(output.path("populations.csv"), system, state))

    omegas, ratios = ladder_view(system, state)
    agree = sum(
        _ratio_sign(ratio) == _threshold_sign(effective_occupation(w, baths))
        for w, ratio in zip(omegas, ratios, strict=True)
    )
    summary: dict[str, Any] = {
        "run": RunMode.FIG1.value,
        "model": describe_model(config.model),
        "reference_unit": config.reference_unit,
        "crossings": len(crossings),
        "link_sign_agreement": f"{agree}/{len(ratios)}",
        "method": state.method.value,
        "residual": state.residual,
        "rate_scale": RATE_SCALE_NOTE,
    }
    files.append(write_text(output.path("summary.txt"), key_value_lines(summary)))
    logger.info("Fig1 scenario: %d threshold crossings", len(crossings))
    return RunResult(mode=RunMode.FIG1, files=files)


def _average(omega: float, baths: list[BathSpec]) -> float | str:
    try:
        return effective_occupation(float(omega), baths)
    except BmsError:
        return "error"


def _occupation_cell(omega: float, bath: BathSpec) -> float | str:
    try:
        return occupation(omega, bath)
    except BmsError:
        return "error"


def run_occupation_scan(config: ScenarioConfig) -> RunResult:
    """
    Tabulate each bath's occupation, their average and the stationary ratio.

    The average column is only written when all baths share one statistics.
    """
    if config.grid is None:
        raise ConfigError("occupation-scan needs a grid")
    baths = config.baths
    shared = len({bath.statistics for bath in baths}) == 1
    labels = [bath.label or f"bath{k}" for k, bath in enumerate(baths)]
    header = ["omega", *(f"F_{label}" for label in labels)]
    if shared:
        header.append("F_bar")
    header.append("ratio")

    rows = []
    for omega in config.grid.values():
        w = float(omega)
        row: list[Any] = [w, *(_occupation_cell(w, bath) for bath in baths)]
        if shared:
            row.append(_average(w, baths))
        row.append(_prediction(w, baths))
        rows.append(row)
    path = write_csv(config.output.path("occupation.csv"), header, rows)
    return RunResult(mode=RunMode.OCCUPATION_SCAN, files=[path])


def _sweep_row(config: ScenarioConfig, path: str, value: float) -> SweepRow:
    try:
        system = build_system(config.with_value(path, value))
        solver = config.solver
        state = system.steady_state(solver.method, solver.t_final, solver.dt)
        omegas, ratios = ladder_view(system, state)
    except (BmsError, ValidationError) as e:
        logger.warning("Sweep point %s=%.6g failed: %s", path, value, e)
        return SweepRow(value=value, error=type(e).__name__)
    populations = state.populations[system.ladder_order]
    return SweepRow(
        value=value,
        populations=populations.tolist(),
        fit=effective_fit(omegas, ratios),
    )


def _check_sweep_path(config: ScenarioConfig, path: str) -> None:
    try:
        config.with_value(path, 1.0)
    except ValidationError:
        # The path exists; 1.0 is just not a valid value there.
        pass


async def run_sweep(config: ScenarioConfig) -> RunResult:
    """
    Solve one stationary state per grid value of the swept parameter.

    Grid points run concurrently in worker threads, bounded by
    ``solver.max_workers``; the CSV is written once all rows are done. Points
    where the model or a bath becomes invalid are marked ``error``.
    """
    sweep = config.sweep
    if sweep is None:
        raise ConfigError("run 'sweep' needs a sweep section")
    _check_sweep_path(config, sweep.path)
    target = config.output.path("sweep.csv")
    values = sweep.grid.values()
    if values.size == 0:
        logger.info("Empty sweep grid, nothing to do")
        return RunResult(mode=RunMode.SWEEP, files=[write_text(target, [])])

    semaphore = asyncio.Semaphore(config.solver.max_workers)

    async def evaluate(value: float) -> SweepRow:
        async with semaphore:
            return await asyncio.to_thread(_sweep_row, config, sweep.path, value)

    results = await asyncio.gather(*(evaluate(float(v)) for v in values))

    width = max(len(row.populations) for row in results)
    header = [
        sweep.path,
        *(f"p{m}" for m in range(width)),
        "beta_bar",
        "mu_bar",
        "consistency",
        "status",
    ]
    rows = []
    for row in results:
        padded = row.populations + [""] * (width - len(row.populations))
        fit: list[Any] = ["", "", ""]
        if row.fit is not None:
            fit = [row.fit.beta_bar, row.fit.mu_bar, row.fit.consistency]
        status = "ok" if row.error is None else "error"
        rows.append([row.value, *padded, *fit, status])
    failed = sum(row.error is not None for row in results)
    if failed:
        logger.warning("%d of %d sweep points failed", failed, len(results))
    return RunResult(mode=RunMode.SWEEP, files=[write_csv(target, header, rows)])


def run_scenario(
    config: ScenarioConfig, inject_coefficients: Path | None = None
) -> RunResult:
    """Dispatch a scenario to its pipeline."""
    if config.run is RunMode.STEADY:
        return run_steady(config)
    if config.run is RunMode.VERIFY:
        return run_verify(config, inject_coefficients)
    if config.run is RunMode.SWEEP:
        return asyncio.run(run_sweep(config))
    if config.run is RunMode.OCCUPATION_SCAN:
        return run_occupation_scan(config)
    return run_fig1(config)
