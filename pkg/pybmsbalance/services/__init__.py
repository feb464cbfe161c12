"""Service layer components for pybmsbalance."""

from .balance import (
    DEGENERATE_DISSIPATOR,
    DETAILED_BALANCE,
    FACTORIZATION,
    LAMB_SHIFT_SELECTION,
    LOCAL_BALANCE,
    gibbs_state,
    verify_all,
    verify_degenerate_dissipator,
    verify_detailed_balance,
    verify_factorization,
    verify_gibbs_stationarity,
    verify_lamb_shift_selection,
    verify_local_balance,
)
from .baths import (
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
    spectral_matrix_for,
)
from .cache import AssemblyCache
from .generator import (
    add_coefficients,
    assemble_coefficients,
    build_liouvillian,
    check_lindblad_form,
    combine_baths,
    export_coefficients,
    load_coefficients,
    reduce_to_ladder,
    trace_preservation_violation,
)
from .operators import (
    bohr_frequencies,
    check_conserved_coupling,
    coupling_in_eigenbasis,
    diagonalize_joint,
    load_operator,
    write_operator,
)
from .output import format_cell, key_value_lines, write_csv, write_text
from .presets import (
    build_electronic,
    build_mixed_spin,
    build_oscillator,
    build_preset,
    build_spin_boson,
    single_particle_couplings,
)
from .steady import (
    fit_effective_beta_mu,
    fit_ladder,
    generalized_boltzmann_ratio,
    ladder_rate_matrix,
    ladder_steady_state,
    liouvillian_nullspace,
    threshold_crossings,
    time_evolve,
)

__all__ = [
    "AssemblyCache",
    "DEGENERATE_DISSIPATOR",
    "DETAILED_BALANCE",
    "FACTORIZATION",
    "LAMB_SHIFT_SELECTION",
    "LOCAL_BALANCE",
    "RAISING_CHANNEL",
    "add_coefficients",
    "assemble_coefficients",
    "bath_rate",
    "bohr_frequencies",
    "bose_occupation",
    "build_electronic",
    "build_liouvillian",
    "build_mixed_spin",
    "build_oscillator",
    "build_preset",
    "build_spin_boson",
    "check_conserved_coupling",
    "check_lindblad_form",
    "classical_limit_boltzmann",
    "combine_baths",
    "coupling_in_eigenbasis",
    "diagonalize_joint",
    "effective_occupation",
    "export_coefficients",
    "fermi_occupation",
    "fit_effective_beta_mu",
    "fit_ladder",
    "format_cell",
    "generalized_boltzmann_ratio",
    "gibbs_state",
    "is_positive_semidefinite",
    "key_value_lines",
    "kms_check",
    "ladder_rate_matrix",
    "ladder_steady_state",
    "liouvillian_nullspace",
    "load_coefficients",
    "load_operator",
    "load_tabulated_profile",
    "mean_temperature_low_energy",
    "occupation",
    "occupation_complement",
    "rate_at",
    "reduce_to_ladder",
    "single_particle_couplings",
    "spectral_matrix_bosonic",
    "spectral_matrix_electronic",
    "spectral_matrix_for",
    "threshold_crossings",
    "time_evolve",
    "verify_all",
    "verify_degenerate_dissipator",
    "verify_detailed_balance",
    "verify_factorization",
    "verify_gibbs_stationarity",
    "verify_lamb_shift_selection",
    "verify_local_balance",
    "write_csv",
    "write_operator",
    "write_text",
]
