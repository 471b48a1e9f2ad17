"""
weightlab - exact counterexample weights for the Hilbert transform

Builds the triadic weights w_k and the Cantor measure with its atomic
companion in exact rational arithmetic, evaluates the Hilbert transform and
the maximal function on them, and checks the two-weight inequalities the
construction is meant to violate or satisfy.
"""

from ._version import __version__
from .measure import Atom, Piece, PiecewiseMeasure, RationalInterval, uniform
from .transform import HilbertEvaluator, TransformValue, hilbert_exact, hilbert_quadrature_oracle
from .maximal import MaximalProfile, dyadic_maximal, linearize_maximal, maximal_exact, maximal_grid_oracle
from .grids import GridFamily, christ_cover, grid_pair
from .triadic import TriadicTree, build_tree, build_w_k, select_sign
from .cantor import build_cantor_family, build_lambda, cantor_measure_approx, find_zero, theorem6_blocks
from .report import VerificationReport, emit_plotdata
from .config import RunConfig
from .verify import check_dual_sawyer, dual_sawyer_testing, run_check, run_suite, sawyer_testing
from .errors import (
    WeightLabError,
    AtomAtPoint,
    AtomicPart,
    NonRationalPower,
    SizeLimit,
    NoConvergence,
    ScaleRange,
    MonotonicityViolation,
    UsageError,
    ArtifactError,
)
from .constant import (
    SignRule,
    Closure,
    GridKind,
    ValueKind,
    Provenance,
    ExitCode,
    CheckName,
)

__all__ = [
    "__version__",
    # Measures
    "Atom",
    "Piece",
    "PiecewiseMeasure",
    "RationalInterval",
    "uniform",
    # Operators
    "HilbertEvaluator",
    "TransformValue",
    "hilbert_exact",
    "hilbert_quadrature_oracle",
    "MaximalProfile",
    "dyadic_maximal",
    "linearize_maximal",
    "maximal_exact",
    "maximal_grid_oracle",
    "GridFamily",
    "christ_cover",
    "grid_pair",
    # Constructions
    "TriadicTree",
    "build_tree",
    "build_w_k",
    "select_sign",
    "build_cantor_family",
    "build_lambda",
    "cantor_measure_approx",
    "find_zero",
    "theorem6_blocks",
    # Verification
    "VerificationReport",
    "emit_plotdata",
    "RunConfig",
    "run_check",
    "run_suite",
    "sawyer_testing",
    "dual_sawyer_testing",
    "check_dual_sawyer",
    # Errors
    "WeightLabError",
    "AtomAtPoint",
    "AtomicPart",
    "NonRationalPower",
    "SizeLimit",
    "NoConvergence",
    "ScaleRange",
    "MonotonicityViolation",
    "UsageError",
    "ArtifactError",
    # Enums from constant module
    "SignRule",
    "Closure",
    "GridKind",
    "ValueKind",
    "Provenance",
    "ExitCode",
    "CheckName",
]
