"""Fit and predict: P-spline smoothing with the penalty chosen by REML."""
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .basis import BasisSpec, eval_basis
from .exceptions import DimensionError
from .optimize import DEFAULT_BRACKET, DEFAULT_TOL, maximize
from .penalty import build_G
from .reml import MMB, assemble, coefficients, normalize_kind, profile_loglik

SCHEMA_VERSION = 1
FULL = "full"
LINEAR = "linear"


@dataclass(frozen=True)
class FitResult:
    """
    A fitted smoother.

    ``timing_seconds`` covers the penalty search (or the single evaluation
    when the penalty is fixed); ``assembly_seconds`` covers building the
    basis and the model blocks. ``converged`` is None for a fixed penalty.
    """

    spec: BasisSpec
    kind: str
    lam: float
    a_hat: np.ndarray = field(repr=False)
    b_hat: np.ndarray
    u_hat: np.ndarray = field(repr=False)
    sigma2_hat: float
    loglik: float
    evaluations: int
    timing_seconds: float
    assembly_seconds: float = 0.0
    converged: bool = None
    degenerate: bool = False
    n: int = 0

    def predict(self, x0, mode=FULL):
        return predict(self, x0, mode)

    def to_dict(self):
        """JSON-ready summary, including everything :meth:`from_dict` needs."""
        out = {"schema_version": SCHEMA_VERSION}
        for key, value in asdict(self).items():
            if key == "spec":
                value = asdict(self.spec)
            elif isinstance(value, np.ndarray):
                value = value.tolist()
            out["lambda" if key == "lam" else key] = value
        out["log10_lambda"] = float(np.log10(self.lam))
        return out

    @classmethod
    def from_dict(cls, data):
        version = data.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"unsupported fit summary schema_version {version!r}")
        kwargs = {}
        for name in cls.__dataclass_fields__:
            key = "lambda" if name == "lam" else name
            if key in data:
                kwargs[name] = data[key]
        kwargs["spec"] = BasisSpec(**data["spec"])
        for key in ("a_hat", "b_hat", "u_hat"):
            kwargs[key] = np.asarray(kwargs[key], dtype=float)
        return cls(**kwargs)


def fit(x, y, spec, kind=MMB, lam=None, bracket=DEFAULT_BRACKET, tol=DEFAULT_TOL):
    """
    Fit a penalized B-spline smoother.

    Parameters
    ----------
    x, y : array-like, shape (n,)
        Observations; every `x` must lie in the domain of `spec`.
    spec : BasisSpec
        The B-spline basis.
    kind : {"mmb", "currie_durban"}, optional
        Mixed model transformation. Both give the same fit; ``"mmb"`` costs
        ``O(m)`` per likelihood evaluation, ``"currie_durban"`` ``O(m**3)``.
    lam : float, optional
        Fixed penalty. If None (default) the penalty maximizing the REML
        profile likelihood is found by golden-section search.
    bracket : tuple(float, float), optional
        Search interval in log10(lambda).
    tol : float, optional
        Bracket width at which the search stops.

    Returns
    -------
    FitResult

    """
    kind = normalize_kind(kind)
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise DimensionError(f"x has {x.size} values but y has {y.size}")
    if x.size < 3:
        raise DimensionError("need at least 3 observations")

    start = time.perf_counter()
    basis = eval_basis(spec, x)
    blocks = assemble(basis, y, spec, kind)
    assembly_seconds = time.perf_counter() - start

    start = time.perf_counter()
    if lam is not None:
        point = profile_loglik(blocks, lam)
        evaluations, converged = 1, None
    else:
        best = {}

        def evaluate(value):
            pt = profile_loglik(blocks, value)
            if not best or pt.loglik >= best["point"].loglik:
                best["point"] = pt
            return pt.loglik

        opt = maximize(evaluate, bracket[0], bracket[1], tol)
        point = best["point"]
        evaluations, converged = opt.evaluations, opt.converged
    timing = time.perf_counter() - start

    return FitResult(
        spec=spec,
        kind=kind,
        lam=point.lam,
        a_hat=coefficients(point),
        b_hat=np.asarray(point.b_hat),
        u_hat=np.asarray(point.u_hat),
        sigma2_hat=point.sigma2_hat,
        loglik=point.loglik,
        evaluations=evaluations,
        timing_seconds=timing,
        assembly_seconds=assembly_seconds,
        converged=converged,
        degenerate=point.degenerate,
        n=int(x.size),
    )


def predict(fit_result, x0, mode=FULL):
    """
    Evaluate a fitted smoother on new points.

    ``mode="full"`` returns ``B(x0) a``; ``mode="linear"`` returns only the
    fixed-effect trend ``B(x0) G b``. Points outside the basis domain raise
    :class:`~mmbspline.exceptions.DomainError`.
    """
    basis = eval_basis(fit_result.spec, x0)
    if mode == FULL:
        return basis.dot(fit_result.a_hat)
    if mode == LINEAR:
        return basis.dot(build_G(fit_result.spec.m).matvec(fit_result.b_hat))
    raise ValueError(f"mode must be {FULL!r} or {LINEAR!r}, got {mode!r}")
