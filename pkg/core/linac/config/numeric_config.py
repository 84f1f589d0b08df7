# do not edit this file expect you know what you are doing
import os

# complex-time integration (explicit embedded Runge-Kutta, DOP853 pair)
INTEGRATOR_REL_TOL = 1e-10
INTEGRATOR_ABS_TOL = 1e-12
INTEGRATOR_MAX_STEPS = 10**6
# abort when the state leaves this ball, orbits of the desk-scale actions stay far below it
ESCAPE_NORM = 1e8

# trapezoid averaging over t in [0, 1]
QUADRATURE_NODES = 64
QUADRATURE_AGREEMENT = 1e-12
QUADRATURE_MAX_NODES = 4096

# weights
WEIGHT_ROUNDING_TOL = 1e-6
# eigenvector matrix condition number beyond which the linear part counts as defective
SEMISIMPLE_COND_LIMIT = 1e8
# |lambda_j| above this is treated as suspect input
WEIGHT_CAP = 10**6

# validation
CLOSED_FORM_TOL = 1e-12
PERIODICITY_TOL = 1e-8
VALIDATION_SAMPLES = 50
VALIDATION_RADIUS = 1.0
VALIDATION_S_MIN = 0.1
VALIDATION_S_MAX = 10.0
PERIODICITY_SAMPLES = 20
PERIODICITY_RADIUS = 0.5

# polynomial reconstruction of the averaged map
FIT_RADIUS = 0.4
FIT_COND_LIMIT = 1e10
FIT_ZERO_THRESHOLD = 1e-9

# injectivity search around the fixed point (diagonalizing frame, polydisc radius)
INJECTIVITY_START_RADIUS = 1.0
INJECTIVITY_MIN_RADIUS = 1e-4
INJECTIVITY_BOUNDARY_SAMPLES = 200
INJECTIVITY_PAIR_SAMPLES = 1000
INJECTIVITY_MIN_SINGULAR = 1e-6
INJECTIVITY_COLLISION = 1e-9
INJECTIVITY_SEPARATION = 1e-6
INJECTIVITY_BISECTION_STEPS = 20
# normalization gate applied before the search: |F(p)| and |DF(p) - Id|
NORMALIZATION_GATE = 1e-6

# saturation extension: contraction depth 2**k * SATURATION_BASE_DEPTH
SATURATION_BASE_DEPTH = 0.05
SATURATION_DOUBLINGS = 24

# conjugacy certificate sampling
CONJUGACY_SAMPLES = 100
CONJUGACY_X_RADIUS = 0.5
CONJUGACY_IM_Z = 0.2
CONJUGACY_RE_Z = 1.0

# holomorphic finite differences (circle of radius FD_RADIUS, FD_POINTS nodes)
FD_RADIUS = 1e-3
FD_POINTS = 8

REPORT_SCHEMA_VERSION = 1
SPEC_FORMAT_VERSION = 1

DEFAULT_SEED = 42
SEED = int(os.environ.get("CSTAR_LINAC_SEED", DEFAULT_SEED))
# numeric averaging fans out over points with this many threads
MAX_WORKERS = int(os.environ.get("LINAC_WORKERS", 1))
