"""Mixed model B-splines: P-spline smoothing with the penalty selected by REML.

The sparse transformation keeps the mixed model equations banded, so each
likelihood evaluation is linear in the number of B-splines. The classical
dense transformation is included as a reference.
"""
from ._backend import BACKEND
from .banded import BandSymMatrix, BorderedBandMatrix, TriangularFactor, cholesky, solve
from .basis import BasisSpec, SparseBasis, build_spec, check_second_derivative_identity, eval_basis
from .exceptions import (
    DimensionError,
    DomainError,
    MMBSplineError,
    NonFiniteLikelihoodError,
    NonPositiveVarianceError,
    NotPositiveDefiniteError,
    NumericalError,
    UnsupportedDegreeError,
)
from .optimize import OptResult, maximize
from .penalty import DiffOp, FixedDesign, Precision, build_D, build_G, build_Q
from .reml import (
    CURRIE_DURBAN,
    MMB,
    ModelBlocks,
    ProfilePoint,
    assemble,
    coefficients,
    direct_pspline_solve,
    profile_loglik,
)
from .smoother import FitResult, fit, predict

__version__ = "0.1.0"
