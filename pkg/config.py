# config.py - Configuration defaults for cylinder-verify
from pathlib import Path
import os

# Run defaults
DEFAULT_N_MAX = 8
DEFAULT_K_TRUNC = 64
DEFAULT_HBAR_TRUNC = 4
DEFAULT_BAND_LIMIT = 8
DEFAULT_SEED = 0
DEFAULT_OUTPUT_DIR = Path(os.getenv("CYLVERIFY_OUTPUT_DIR", "reports"))
CONFIG_SECTION = "run"

# Tolerances
TOL_ROUTE = 1e-10
TOL_KERNEL = 1e-10
TOL_ABEL = 1e-4
TOL_ANOMALY = 1e-6
TOL_PRIMARY = 1e-8
TOL_WEIGHTED = 1e-8
TOL_SCHWARZIAN = 1e-9
TOL_DIAG_EXP = 1e-9

# Numerics
DIAG_LIMIT_THRESHOLD = 1e-4
POSITIVITY_GRID = 2048
QUADRATURE_GRID = 256
TORUS_GRID = 128
RICHARDSON_STEP = 0.01
NEWTON_TOL = 1e-14
NEWTON_MAX_ITER = 60
ORACLE_DPS = 50

# Randomized checks
ROUTE_SAMPLES = 20
ROUTE_N_MAX = 6
IMAGE_GRID_POINTS = 10_000
ANOMALY_DIFFEOS = 5
ANOMALY_TEST_FNS = 5

# Kernel dumps
KERNEL_NAMES = ("e-mink", "e-cyl", "w-cyl", "diag-diff")
CSV_SIGNIFICANT_DIGITS = 17

# Suites
SUITE_NAMES = ("heisenberg", "virasoro", "zeta", "conformal", "routes", "propagators")

# Logging
LOG_LEVEL = os.getenv("CYLVERIFY_LOG_LEVEL", "INFO")
LOG_FILE = Path(os.getenv("CYLVERIFY_LOG_FILE", str(Path.home() / ".cylverify" / "cylverify.log")))
