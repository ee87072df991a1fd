# Integration
DEFAULT_STEPS_PER_UNIT: int = 1000
DEFAULT_REL_TOL: float = 1e-10
DEFAULT_ABS_TOL: float = 1e-12
DEFAULT_REORTHO_TAU: float = 1e-9
DEFAULT_REORTHO_EVERY: int = 16
MAX_FRAME_CONDITION: float = 1e12
EXIT_TIME_TOLERANCE: float = 1e-10  # bisection bracket of a chart exit

# Finite differences, relative to the chart box diagonal
FD_RELATIVE_STEP: float = 1e-6
FD_SECOND_RELATIVE_STEP: float = 1e-4
FD_CURVE_STEP: float = 1e-6  # t-derivatives of callable curves
FD_U_STEP: float = 1e-5  # u-derivatives of families

# Chart domains are closed boxes up to this slack
DOMAIN_SLACK: float = 1e-12

# Submanifolds
SNAP_TOLERANCE: float = 1e-6
RANK_TOLERANCE: float = 1e-10
MAP_ISOMETRY_TOLERANCE: float = 1e-10  # Gramian of the lifted frame at construction
MAP_SAMPLE_FRACTIONS = (0.25, 0.5, 0.75)

# Hypothesis checks
DEFAULT_CHECK_TOLERANCE: float = 1e-5
DEFAULT_CURVE_COUNT: int = 16
EXHAUSTIVE_QUADRUPLE_DIM: int = 4
RANDOM_QUADRUPLE_COUNT: int = 256
DEFAULT_WELL_DEFINED_TOLERANCE: float = 1e-6

# Normal geodesic shooting
NEWTON_MAX_ITERATIONS: int = 50
SHOOTING_STEPS_PER_UNIT: int = 200
SHOOTING_TOLERANCE: float = 1e-10

# Curve sampling
DEFAULT_CURVE_SAMPLES: int = 1001
