"""Configuration constants for pybmsbalance.

All physical quantities use natural units (hbar = k_B = 1) and one shared
reference energy unit.
"""

# Operator validation
HERMITICITY_TOL = 1e-12
COMMUTATION_RTOL = 1e-10
TRACELESS_TOL = 1e-12
ORTHONORMALITY_TOL = 1e-10
NUMBER_INTEGER_TOL = 1e-8
UNITARITY_TOL = 1e-10
RECONSTRUCTION_RTOL = 1e-9

# Degeneracy clustering, relative to the spectral range
DEFAULT_RELATIVE_DEGENERACY_TOL = 1e-9

# Matrix elements below this fraction of the largest one count as selection-rule zeros
MATRIX_ELEMENT_RTOL = 1e-12

# Occupation functions saturate beyond |beta * (omega - mu)| >= this value
EXPONENT_SATURATION = 700.0

# Spectral matrices and KMS diagnostics
PSD_TOLERANCE = -1e-12
KMS_TOLERANCE = 1e-9

# Generator assembly
COEFFICIENT_PRUNE_RTOL = 1e-14
TRACE_PRESERVATION_TOL = 1e-10
LINDBLAD_PSD_TOL = -1e-10
COHERENCE_COUPLING_RTOL = 1e-10

# Balance diagnostics
BALANCE_TOLERANCE = 1e-9
BALANCE_ABSOLUTE_FLOOR = 1e-12
RELATIVE_FLOOR = 1e-300
FACTORIZATION_TOLERANCE = 1e-10

# Stationary-state solvers
NULLSPACE_RTOL = 1e-10
POSITIVITY_CLIP = -1e-10
TRACE_DRIFT_TOL = 1e-8
DEFAULT_DT_FACTOR = 0.05
EVOLUTION_TIME_FACTOR = 50.0
DENSE_LIOUVILLIAN_MAX_DIM = 64
MAX_EVOLUTION_AMPLITUDE = 1e3
MAX_EVOLUTION_STEPS = 5_000_000
CROSSING_XTOL = 1e-8
LOW_ENERGY_WARNING = 0.1

# Two-lead ladder-engineering scenario, in units of the level spacing
FIG1_LEVELS = 10
FIG1_EPSILON = 1.0
FIG1_INTERACTION = 1.0
FIG1_HOPPING = 0.0
FIG1_BETA = 2.0
FIG1_MU = (1.0, 9.0)
FIG1_GAMMA = 1.0
FIG1_CENTERS = (1.0, 9.0)
FIG1_WIDTH = 0.1
FIG1_GRID = (0.0, 11.0, 1101)

# CLI
EXIT_SUCCESS = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3
CSV_FLOAT_FORMAT = ".17g"
DEFAULT_MAX_WORKERS = 4
DEFAULT_REFERENCE_UNIT = "Δε₀"
