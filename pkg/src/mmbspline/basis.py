"""Equidistant-knot B-spline bases evaluated in row-sparse form."""
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from ._backend import kernels
from .exceptions import DomainError, UnsupportedDegreeError

SUPPORTED_DEGREES = (2, 3)


@dataclass(frozen=True)
class BasisSpec:
    """
    Domain and resolution of an equidistant B-spline basis.

    The knot vector is ``x_min + (k - degree) * h`` for ``k = 0 .. nseg + 2 * degree``,
    i.e. ``degree`` extra knots on each side of ``[x_min, x_max]``. This gives
    ``m = nseg + degree`` basis functions, the first of which is supported on
    ``[x_min - degree * h, x_min + h]``.

    """

    x_min: float
    x_max: float
    nseg: int
    degree: int = 2

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)) or not self.x_min < self.x_max:
            raise DomainError(f"empty domain: x_min={self.x_min!r} must be below x_max={self.x_max!r}")
        if int(self.nseg) != self.nseg or self.nseg < 1:
            raise ValueError(f"nseg must be a positive integer, got {self.nseg!r}")
        if int(self.degree) != self.degree or self.degree < 0:
            raise UnsupportedDegreeError(f"degree must be a nonnegative integer, got {self.degree!r}")

    @property
    def h(self):
        """Knot spacing."""
        return (self.x_max - self.x_min) / self.nseg

    @property
    def m(self):
        """Number of basis functions."""
        return self.nseg + self.degree

    @property
    def knots(self):
        k = np.arange(self.nseg + 2 * self.degree + 1)
        return self.x_min + (k - self.degree) * self.h

    def with_degree(self, degree):
        """Same domain and knot spacing, different degree (no range check)."""
        return BasisSpec(self.x_min, self.x_max, self.nseg, degree)

    def shifted(self, offset):
        return BasisSpec(self.x_min + offset, self.x_max + offset, self.nseg, self.degree)


@dataclass(frozen=True)
class SparseBasis:
    """
    Row-sparse ``n x m`` B-spline design matrix.

    Row ``i`` is nonzero only in columns ``first[i] .. first[i] + degree``
    (0-based), where it holds ``values[i]``.
    """

    first: np.ndarray
    values: np.ndarray
    m_cols: int

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def degree(self):
        return self.values.shape[1] - 1

    @property
    def shape(self):
        return (self.n_rows, self.m_cols)

    def columns(self):
        """Column index of every stored value, shape ``(n, degree + 1)``."""
        return self.first[:, None] + np.arange(self.degree + 1)

    def dot(self, coef):
        """Return ``B @ coef``."""
        coef = np.asarray(coef, dtype=float)
        return np.einsum("ij,ij->i", self.values, coef[self.columns()])

    def rdot(self, vec):
        """Return ``B' @ vec``."""
        vec = np.asarray(vec, dtype=float)
        out = np.zeros(self.m_cols)
        np.add.at(out, self.columns().ravel(), (self.values * vec[:, None]).ravel())
        return out

    def tocsr(self):
        rows = np.repeat(np.arange(self.n_rows), self.degree + 1)
        return sparse.csr_matrix(
            (self.values.ravel(), (rows, self.columns().ravel())), shape=self.shape
        )

    def toarray(self):
        return self.tocsr().toarray()

    def gram_band(self):
        """``B'B`` in lower band storage, shape ``(degree + 1, m)``."""
        return kernels.gram_band(self.first, self.values, self.m_cols)


def build_spec(x_min, x_max, nseg, degree=2):
    """
    Validated basis specification.

    Parameters
    ----------
    x_min, x_max : float
        The domain of the basis.
    nseg : int
        Number of equal-width segments; at least 3.
    degree : int, optional
        Spline degree, 2 (default) or 3.

    Returns
    -------
    BasisSpec

    Raises
    ------
    DomainError
        If ``x_min >= x_max``.
    UnsupportedDegreeError
        If `degree` is not 2 or 3.

    """
    if not float(x_min) < float(x_max):
        raise DomainError(f"empty domain: x_min={x_min!r} must be below x_max={x_max!r}")
    if degree not in SUPPORTED_DEGREES:
        raise UnsupportedDegreeError(f"degree must be one of {SUPPORTED_DEGREES}, got {degree!r}")
    if int(nseg) != nseg or nseg < 3:
        raise ValueError(f"nseg must be an integer >= 3, got {nseg!r}")
    return BasisSpec(float(x_min), float(x_max), int(nseg), int(degree))


def _check_in_domain(spec, x):
    x = np.asarray(x, dtype=float).ravel()
    bad = ~((x >= spec.x_min) & (x <= spec.x_max))
    if bad.any():
        idx = int(np.flatnonzero(bad)[0])
        raise DomainError(
            f"x[{idx}] = {float(x[idx])!r} lies outside [{spec.x_min!r}, {spec.x_max!r}]"
            f" ({int(bad.sum())} point(s) out of domain)"
        )
    return x


def eval_basis(spec, x):
    """
    Evaluate the basis at `x`.

    Uses the two-term de Boor recursion on the local segment coordinate. At
    ``x_max`` the last segment is used (left-continuous), so rows sum to one
    on the closed domain.

    Raises
    ------
    DomainError
        If any point lies outside ``[x_min, x_max]``; the message names the
        first offending index.

    """
    x = _check_in_domain(spec, x)
    t = (x - spec.x_min) / spec.h
    seg = np.clip(np.floor(t), 0, spec.nseg - 1)
    u = np.clip(t - seg, 0.0, 1.0)
    values = kernels.uniform_basis_values(u, spec.degree)
    return SparseBasis(seg.astype(np.intp), values, spec.m)


def _dense_rows(x, x_min, h, degree, col_lo, col_hi):
    # basis functions col_lo .. col_hi - 1 on the bi-infinite knot grid, no domain check
    x = np.asarray(x, dtype=float)
    t = (x - x_min) / h
    seg = np.floor(t)
    values = kernels.uniform_basis_values(t - seg, degree)
    cols = seg.astype(np.intp)[:, None] + np.arange(degree + 1) - col_lo
    out = np.zeros((x.size, col_hi - col_lo))
    keep = (cols >= 0) & (cols < out.shape[1])
    rows = np.broadcast_to(np.arange(x.size)[:, None], cols.shape)
    out[rows[keep], cols[keep]] = values[keep]
    return out


def check_second_derivative_identity(spec, x, step=1e-4):
    """
    Largest deviation between the scaled quartic second derivative and the
    second difference of quadratic B-splines.

    ``h**2`` times the second derivative of each quartic B-spline (by central
    finite differences with the given step) is compared with
    ``B[j] - 2 B[j+1] + B[j+2]`` of the quadratic basis on the same knots.

    Parameters
    ----------
    spec : BasisSpec
        Supplies the domain and segment count; its degree is ignored.
    x : array-like
        Points strictly inside the domain.
    step : float, optional
        Finite-difference step in x units.

    Returns
    -------
    float

    """
    x = _check_in_domain(spec, x)
    if np.any((x <= spec.x_min) | (x >= spec.x_max)):
        raise DomainError("points must lie strictly inside the domain")
    h = spec.h
    quartic_m = spec.nseg + 4
    # quartic function j starts at knot x_min + (j - 4) h, as does quadratic function j - 2
    quartic = [_dense_rows(x + s, spec.x_min, h, 4, 0, quartic_m) for s in (-step, 0.0, step)]
    second = h**2 * (quartic[0] - 2.0 * quartic[1] + quartic[2]) / step**2
    quad = _dense_rows(x, spec.x_min, h, 2, -2, quartic_m)
    diff = quad[:, :-2] - 2.0 * quad[:, 1:-1] + quad[:, 2:]
    return float(np.max(np.abs(second - diff)))
