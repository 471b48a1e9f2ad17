"""
The constant values and enumerations for the weight construction and verification
"""
from enum import Enum
from fractions import Fraction


# Sign rule for the residual intervals I(J) of the triadic construction
class SignRule(Enum):
    GREEDY = "greedy"           # reinforce the far-field transform at the center of J
    ALL_PLUS = "all-plus"       # I(J) always to the left of J
    ALL_MINUS = "all-minus"     # I(J) always to the right of J


# What happens to the mass of the last generation
class Closure(Enum):
    STAGE = "stage"             # literal stage measure w_k^depth
    RESIDUAL = "residual"       # last-generation K^m mass moved onto I(K^m)


class GridKind(Enum):
    DYADIC = "dyadic"
    SHIFTED = "shifted"
    FULL = "full"               # dyadic and shifted together


# Kind of a transform value
class ValueKind(Enum):
    FINITE = "finite"
    PLUS_INFINITY = "plus-infinity"
    MINUS_INFINITY = "minus-infinity"


# Provenance of a reported constant
class Provenance(Enum):
    EXACT = "exact"
    QUADRATURE = "quadrature"
    SAMPLED_LOWER_BOUND = "sampled-lower-bound"
    FLOAT = "float"


class ExitCode(Enum):
    PASS = 0
    CHECK_FAILURE = 1
    USAGE_ERROR = 2
    RESOURCE_CAP = 3


class CheckName(Enum):
    CONTMAX = "contmax"
    HLOWER = "hlower"
    PROP41 = "prop41"
    PROP51 = "prop51"
    SAWYER = "sawyer"
    LINEARIZATION = "linearization"
    GLIDING = "gliding"
    THEOREM6 = "theorem6"


# Environment variable for the working precision of mpmath (bits of significand)
PRECISION_ENV_VAR = "WEIGHTLAB_PRECISION_BITS"
DEFAULT_PRECISION_BITS = 128

# Construction caps
DEFAULT_RESIDUAL_CAP = 10 ** 6         # residual intervals per tree
DEFAULT_CANTOR_CAP = 2 ** 20           # intervals of a Cantor approximant
DEFAULT_ATOM_CAP = 2 ** 16             # atoms in one Cantor block family

# Verification defaults
DEFAULT_TOL = 1e-6                     # relative slack on upper-bound claims
DEFAULT_QUAD_TOL = 1e-6                # relative change that stops quadrature refinement
DEFAULT_ZERO_TOL = 1e-8                # bracket width for zeros of H(gamma_R)
DEFAULT_SAMPLES_PER_INTERVAL = 64
DEFAULT_MAX_RESIDUALS = 2000           # residuals sampled per check before subsampling
DEFAULT_PIECE_CAP = 2500               # pieces allowed in a measure that enters a quadrature check
# pieces allowed in a measure that is only evaluated pointwise; k = 10 fits at depth 1
DEFAULT_EVAL_PIECE_CAP = 40000
DEFAULT_RANDOM_Q = 200
DEFAULT_Q_PER_LEVEL = 8
DEFAULT_SEED = 20120101
DEFAULT_SCALE_RANGE = (-40, 8)
DEFAULT_K_VALUES = (4, 6, 8, 10)
DEFAULT_ORACLE_GRID = 1000

# Bounds checked by the suite
CONTMAX_BOUND = 13
LINEARIZATION_BOUND = 3
CHRIST_RATIO_BOUND = 8
TRANSLATED_SUM_K = 3
GLIDING_WINDOW = (Fraction(1, 2), Fraction(2))   # S_K / sum k^((1-eps) p) at K_max
CANTOR_MASS_RATIO = Fraction(2, 9)
ZERO_SAMPLE_COUNT = 16
