"""Mixed model equations and the REML profile log-likelihood.

Two reparameterizations of the P-spline coefficients ``a`` are supported:

``mmb``
    ``a = G b + D' u`` with ``Z = B D'`` and ``Q = (D D')**2``. ``Z'Z + lam Q``
    is banded, so each likelihood evaluation costs ``O(m)``.
``currie_durban``
    ``a = G b + D' (D D')^{-1} u`` with ``Q = I``. ``Z`` is dense and each
    evaluation costs ``O(m**3)``.

Both describe the same model, so fitted values and the profile likelihood
agree for every penalty value.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.linalg import lapack

from ._backend import kernels
from .banded import BandSymMatrix, cholesky
from .exceptions import DimensionError, NotPositiveDefiniteError, NonPositiveVarianceError
from .penalty import IDENTITY, SQUARED_GRAM, band_to_dense, build_D, build_G, build_Q

MMB = "mmb"
CURRIE_DURBAN = "currie_durban"
KINDS = (MMB, CURRIE_DURBAN)
_ALIASES = {"cd": CURRIE_DURBAN, "sparse": MMB, "dense": CURRIE_DURBAN}

# |rss| below this fraction of y'y counts as an exact fit
VARIANCE_SLACK = 1e-12


def normalize_kind(kind):
    kind = _ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ValueError(f"unknown transformation {kind!r}; expected one of {KINDS + tuple(_ALIASES)}")
    return kind


def band_width_for_degree(degree):
    """Bandwidth of ``Z'Z + lam Q`` under the sparse transformation."""
    return max(degree + 2, 4)


@dataclass(frozen=True)
class ModelBlocks:
    """
    Penalty-independent inner products of the mixed model.

    For ``mmb`` the ``ztz`` and ``q_band`` arrays are in lower band storage
    with ``band_width_for_degree(degree) + 1`` rows; for ``currie_durban``
    ``ztz`` is a dense ``(m - 2, m - 2)`` array.
    """

    kind: str
    n: int
    m: int
    degree: int
    xtx: np.ndarray = field(repr=False)
    ztx: np.ndarray = field(repr=False)
    ztz: np.ndarray = field(repr=False)
    precision: object = field(repr=False)
    xty: np.ndarray = field(repr=False)
    zty: np.ndarray = field(repr=False)
    yty: float
    q_band: np.ndarray = field(default=None, repr=False)
    rhs: np.ndarray = field(init=False, repr=False)
    dense_base: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rhs", np.concatenate((self.zty, self.xty)))
        base = None
        if self.kind == CURRIE_DURBAN:
            base = np.block([[self.ztz, self.ztx], [self.ztx.T, self.xtx]])
        object.__setattr__(self, "dense_base", base)

    @property
    def p(self):
        return self.xtx.shape[0]

    @property
    def log_det_Q(self):
        return self.precision.log_det

    def coefficient_matrix(self, lam):
        """``C_lam`` ordered (u, b), as a dense array. Meant for small checks."""
        if self.kind == MMB:
            upper = band_to_dense(self.ztz + lam * self.q_band)
            return np.block([[upper, self.ztx], [self.ztx.T, self.xtx]])
        c = self.dense_base.copy()
        idx = np.arange(self.m - 2)
        c[idx, idx] += lam
        return c


@dataclass(frozen=True)
class ProfilePoint:
    """
    Solution of the mixed model equations at one penalty value.

    ``degenerate`` marks an (almost) exact fit, where ``sigma2_hat`` is
    reported as 0 and the likelihood uses a variance floor of
    ``VARIANCE_SLACK * y'y / (n - p)``.
    """

    kind: str
    lam: float
    loglik: float
    sigma2_hat: float
    b_hat: np.ndarray
    u_hat: np.ndarray
    log_det_C: float
    degenerate: bool = False


def _check_data(basis, y):
    y = np.asarray(y, dtype=float).ravel()
    if basis.n_rows != y.size:
        raise DimensionError(f"basis has {basis.n_rows} rows but y has {y.size} values")
    if basis.m_cols < 3:
        raise DimensionError("need at least 3 basis functions")
    if y.size <= 2:
        raise DimensionError(f"need more observations than fixed effects (n={y.size}, p=2)")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")
    return y


def assemble(basis, y, spec=None, kind=MMB):
    """
    Build the penalty-independent blocks of the mixed model equations.

    Parameters
    ----------
    basis : SparseBasis
        B-spline design at the observations.
    y : array-like, shape (n,)
        Responses.
    spec : BasisSpec, optional
        Only used to cross-check the basis size.
    kind : {"mmb", "currie_durban"}
        The transformation to mixed model form.

    Returns
    -------
    ModelBlocks

    """
    kind = normalize_kind(kind)
    y = _check_data(basis, y)
    m, degree = basis.m_cols, basis.degree
    if spec is not None and spec.m != m:
        raise DimensionError(f"basis has {m} columns but spec implies m={spec.m}")
    if kind == MMB:
        ztz, zty, ztx, xtx, xty = kernels.mmb_moments(basis.first, basis.values, y, m)
        width = band_width_for_degree(degree)
        ztz_band = np.zeros((width + 1, m - 2))
        ztz_band[: ztz.shape[0]] = ztz
        precision = build_Q(m, SQUARED_GRAM)
        return ModelBlocks(
            kind, y.size, m, degree, xtx, ztx, ztz_band, precision, xty, zty,
            float(y @ y), precision.padded(width),
        )

    d = build_D(m).toarray().astype(float)
    g = build_G(m).toarray()
    btb = band_to_dense(basis.gram_band())
    bty = basis.rdot(y)
    # M = D'(DD')^{-1}, so Z = B M
    transform = linalg.solve(d @ d.T, d, assume_a="pos").T
    btb_m = btb @ transform
    btb_g = btb @ g
    ztz = transform.T @ btb_m
    return ModelBlocks(
        kind, y.size, m, degree, g.T @ btb_g, transform.T @ btb_g, 0.5 * (ztz + ztz.T),
        build_Q(m, IDENTITY), g.T @ bty, transform.T @ bty, float(y @ y),
    )


def _solve_sparse(blocks, lam):
    # same steps as banded.cholesky / banded.solve, minus the per-call wrapper objects
    low_band, low_border, low_corner, log_det, info = kernels.bordered_cholesky(
        blocks.ztz + lam * blocks.q_band, blocks.ztx, blocks.xtx
    )
    if info >= 0:
        raise NotPositiveDefiniteError(int(info))
    sol = kernels.bordered_solve(low_band, low_border, low_corner, blocks.rhs[:, None])
    return sol[:, 0], log_det


def _solve_dense(blocks, lam):
    c = blocks.coefficient_matrix(lam)
    low, info = lapack.dpotrf(c, lower=1, clean=1, overwrite_a=1)
    if info > 0:
        raise NotPositiveDefiniteError(info - 1)
    if info < 0:
        raise ValueError(f"dpotrf: illegal argument {-info}")
    sol, info = lapack.dpotrs(low, blocks.rhs, lower=1)
    return sol, 2.0 * float(np.log(np.diag(low)).sum())


def profile_loglik(blocks, lam):
    """
    REML profile log-likelihood at penalty `lam`.

    Factors ``C_lam`` (random effects ordered first), solves for ``(u, b)``,
    estimates the residual variance as
    ``(y'y - b'X'y - u'Z'y) / (n - p)`` and returns

    ``L = -0.5 * (log|C_lam| - (m - p) log(lam) + (n - p) log(sigma2) + n - p - log|Q|)``.

    Raises
    ------
    NotPositiveDefiniteError
        If the factorization fails.
    NonPositiveVarianceError
        If the residual sum of squares is negative beyond rounding slack.

    """
    lam = float(lam)
    if not lam > 0 or not np.isfinite(lam):
        raise ValueError(f"penalty must be positive and finite, got {lam!r}")
    if blocks.kind == MMB:
        sol, log_det_c = _solve_sparse(blocks, lam)
    else:
        sol, log_det_c = _solve_dense(blocks, lam)
    dim = blocks.m - 2
    u_hat, b_hat = sol[:dim], sol[dim:]
    n, p, m = blocks.n, blocks.p, blocks.m
    rss = blocks.yty - b_hat @ blocks.xty - u_hat @ blocks.zty
    slack = VARIANCE_SLACK * blocks.yty
    if rss < -slack:
        raise NonPositiveVarianceError(
            f"residual sum of squares {rss!r} is negative beyond rounding (lam={lam!r})"
        )
    degenerate = rss <= slack
    sigma2 = 0.0 if degenerate else rss / (n - p)
    sigma2_lik = max(slack / (n - p), np.finfo(float).tiny) if degenerate else sigma2
    loglik = -0.5 * (
        log_det_c - (m - p) * np.log(lam) + (n - p) * np.log(sigma2_lik) + (n - p) - blocks.log_det_Q
    )
    return ProfilePoint(blocks.kind, lam, float(loglik), float(sigma2), b_hat, u_hat, log_det_c, bool(degenerate))


def coefficients(point, kind=None):
    """
    Spline coefficients ``a`` from the fixed and random effects.

    ``a = G b + D' u`` for ``mmb`` and ``a = G b + D' (D D')^{-1} u`` for
    ``currie_durban``.
    """
    if kind is not None and normalize_kind(kind) != point.kind:
        raise ValueError(f"point was computed for {point.kind!r}, not {kind!r}")
    m = point.u_hat.size + 2
    d = build_D(m)
    u = point.u_hat
    if point.kind == CURRIE_DURBAN:
        gram = BandSymMatrix(d.gram_band().astype(float))
        u = cholesky(gram).solve(u)
    return build_G(m).matvec(point.b_hat) + d.rmatvec(u)


def direct_pspline_solve(basis, y, D, lam):
    """
    Minimize ``|y - B a|**2 + lam |D a|**2`` directly.

    Solves ``(B'B + lam D'D) a = B'y`` with LAPACK's banded Cholesky; this
    route shares no code with the mixed model paths.
    """
    y = _check_data(basis, y)
    if not lam > 0:
        raise ValueError(f"penalty must be positive, got {lam!r}")
    btb = basis.gram_band()
    pen = D.penalty_band()
    width = max(btb.shape[0], pen.shape[0])
    ab = np.zeros((width, basis.m_cols))
    ab[: btb.shape[0]] += btb
    ab[: pen.shape[0]] += lam * pen
    try:
        return linalg.solveh_banded(ab, basis.rdot(y), lower=True)
    except linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(-1, str(exc)) from exc
