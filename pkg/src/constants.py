"""Library-wide numeric defaults for annulus-lab."""

import math

# --- Digital line ---
RAY_TOL = 1e-9  # radians; winding angles this close to a vertical ray are even

# --- Lifted points ---
Y_CLAMP_TOL = 1e-12
INVERSE_TOL = 1e-8

# --- Foliations and continuation ---
SAME_LEAF_TOL = 1e-9
MIN_PATH_STEP = 1e-12
MAX_PATH_STEP = 0.125
MAX_TURN = math.pi / 4
VANISHING_NORM = 1e-12
DEFAULT_EXHAUSTION = 32

# --- Isotopy probes ---
PROBE_GRID = 8  # probes per axis
JACOBIAN_STEP = 1e-6

# --- Billiards ---
CHORD_TOL = 1e-12
TANGENT_TOL = 1e-9  # on theta, radians
ARCLENGTH_SAMPLES = 2048
CHORD_SCAN_POINTS = 200

# --- Sampling ---
DEFAULT_PAIRS = 500
DEFAULT_SAME_LEAF_PAIRS = 150
DEFAULT_BOUNDARY_PAIRS = 50
DEFAULT_SEED = 0

# --- Orbits ---
ROTATION_ITERATIONS = 1000
ORBIT_TOL = 1e-8
LEAF_GRID = 64
LEAF_SAMPLES = 64
BRACKET_STEPS = 16
MAX_ORBITS = 16
DEDUP_FACTOR = 10.0

# --- Invariant graphs ---
GRAPH_ITERATIONS = 10_000
GRAPH_CELL_BITS = 10
GRAPH_SEEDS = 16
GRAPH_TOL = 1e-6
GRAPH_MAX_EMPTY_RUN = 4
LIPSCHITZ_SLACK = 0.05
GRAPH_LIPSCHITZ_CAP = 64.0  # spread allowance when the map has no twist cone
CONNECT_SEEDS = 32
INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# --- Membership search ---
MEMBERSHIP_NX = 128
MEMBERSHIP_NY = 32
MEMBERSHIP_WIDTH = 2.0

# --- CLI ---
APP_NAME = "annulus_lab"
THREADS_ENV = "ANNULUS_LAB_THREADS"
DEFAULT_THREADS = 4
RESULT_FILE = "result.json"
