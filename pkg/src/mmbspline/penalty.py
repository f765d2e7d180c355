"""Second-order difference operator, fixed-effect design and random-effect precisions.

All band arrays use lower storage: ``ab[k, j] = A[j + k, j]``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .exceptions import DimensionError, NotPositiveDefiniteError

IDENTITY = "identity"
SQUARED_GRAM = "squared_gram"


def _check_size(m):
    if int(m) != m or m < 3:
        raise DimensionError(f"need at least 3 basis functions, got m={m!r}")
    return int(m)


@dataclass(frozen=True)
class DiffOp:
    """The ``(m - 2) x m`` second-difference matrix, stencil (1, -2, 1)."""

    m: int

    @property
    def shape(self):
        return (self.m - 2, self.m)

    def toarray(self):
        d = np.zeros(self.shape, dtype=np.int64)
        rows = np.arange(self.m - 2)
        d[rows, rows] = 1
        d[rows, rows + 1] = -2
        d[rows, rows + 2] = 1
        return d

    def matvec(self, a):
        """``D @ a`` along the first axis."""
        return np.diff(np.asarray(a), n=2, axis=0)

    def rmatvec(self, u):
        """``D' @ u`` along the first axis."""
        u = np.asarray(u, dtype=float)
        out = np.zeros((self.m,) + u.shape[1:])
        out[:-2] += u
        out[1:-1] -= 2.0 * u
        out[2:] += u
        return out

    def gram_band(self):
        """``D D'`` as an int64 band, shape ``(3, m - 2)``."""
        dim = self.m - 2
        band = np.zeros((3, dim), dtype=np.int64)
        band[0] = 6
        band[1, :-1] = -4
        band[2, :-2] = 1
        return band

    def penalty_band(self):
        """``D' D`` as an int64 band, shape ``(3, m)``."""
        stencil = (1, -2, 1)
        band = np.zeros((3, self.m), dtype=np.int64)
        rows = np.arange(self.m - 2)
        for a in range(3):
            for k in range(3 - a):
                band[k, rows + a] += stencil[a] * stencil[a + k]
        return band


@dataclass(frozen=True)
class FixedDesign:
    """``G = [1, (1, 2, ..., m)']``, spanning the null space of ``D``."""

    m: int

    @property
    def p(self):
        return 2

    def toarray(self):
        return np.column_stack((np.ones(self.m), np.arange(1, self.m + 1, dtype=float)))

    def matvec(self, b):
        return b[0] + b[1] * np.arange(1, self.m + 1, dtype=float)


@dataclass(frozen=True)
class Precision:
    """
    Precision matrix of the random effects.

    Attributes
    ----------
    kind : str
        ``"identity"`` or ``"squared_gram"`` (``(D D')**2``).
    band : numpy.ndarray, shape (bandwidth + 1, m - 2)
        Lower band storage.
    log_det : float
        ``log|Q|``. For ``"squared_gram"`` this is ``2 log|D D'|``, see
        :func:`gram_log_det`.

    """

    kind: str
    band: np.ndarray = field(repr=False)
    log_det: float

    @property
    def dim(self):
        return self.band.shape[1]

    @property
    def bandwidth(self):
        nonzero = np.flatnonzero(np.any(self.band != 0, axis=1))
        return int(nonzero[-1]) if nonzero.size else 0

    def padded(self, width):
        """Band storage padded with zero rows to ``width + 1`` rows."""
        out = np.zeros((width + 1, self.dim))
        out[: self.band.shape[0]] = self.band
        return out

    def toarray(self):
        return band_to_dense(self.band)


def band_to_dense(ab):
    """Expand symmetric lower band storage into a dense array."""
    ab = np.asarray(ab)
    dim = ab.shape[1]
    out = np.zeros((dim, dim), dtype=ab.dtype)
    for k in range(min(ab.shape[0], dim)):
        idx = np.arange(dim - k)
        out[idx + k, idx] = ab[k, : dim - k]
        out[idx, idx + k] = ab[k, : dim - k]
    return out


def _sym_band_entries(ab, rows, cols):
    lo = np.minimum(rows, cols)
    off = np.abs(rows - cols)
    dim = ab.shape[1]
    valid = (off < ab.shape[0]) & (lo >= 0) & (np.maximum(rows, cols) < dim)
    out = np.zeros(rows.shape, dtype=ab.dtype)
    out[valid] = ab[off[valid], lo[valid]]
    return out


def sym_band_square(ab):
    """
    Square of a symmetric band matrix, in band storage.

    Bandwidth doubles. Works in the dtype of `ab`, so integer input is exact.
    """
    ab = np.asarray(ab)
    w = ab.shape[0] - 1
    dim = ab.shape[1]
    out = np.zeros((2 * w + 1, dim), dtype=ab.dtype)
    j = np.arange(dim)
    for d in range(2 * w + 1):
        for k in range(-w, w + 1):
            mid = j + k
            out[d] += _sym_band_entries(ab, j + d, mid) * _sym_band_entries(ab, mid, j)
        out[d, max(dim - d, 0):] = 0
    return out


def band_log_det(ab):
    """log-determinant of a symmetric positive definite band matrix."""
    empty = np.zeros((ab.shape[1], 0))
    _, _, _, log_det, info = kernels.bordered_cholesky(
        np.asarray(ab, dtype=float), empty, np.zeros((0, 0))
    )
    if info >= 0:
        raise NotPositiveDefiniteError(info)
    return float(log_det)


def gram_log_det(m):
    """
    ``log|D D'|`` from the closed form ``det(D D') = m**2 (m**2 - 1) / 12``.

    Factoring ``D D'`` (condition ~ ``m**4``) loses about 1e-7 relative
    accuracy by m = 1000; factoring ``Q`` itself fails near m = 400.
    """
    m = _check_size(m)
    return 2.0 * math.log(m) + math.log(m * m - 1.0) - math.log(12.0)


def build_D(m):
    """Second-order difference operator for `m` coefficients."""
    return DiffOp(_check_size(m))


def build_G(m):
    """Fixed-effect design with an intercept and a linear trend column."""
    return FixedDesign(_check_size(m))


def build_Q(m, kind):
    """
    Random-effect precision for `m` basis functions.

    Parameters
    ----------
    m : int
        Number of basis functions; the precision has dimension ``m - 2``.
    kind : {"identity", "squared_gram"}
        ``"identity"`` for the dense reparameterization, ``"squared_gram"``
        for ``Q = D D' D D'`` used with ``Z = B D'``.

    Returns
    -------
    Precision

    """
    m = _check_size(m)
    dim = m - 2
    if kind == IDENTITY:
        return Precision(IDENTITY, np.ones((1, dim)), 0.0)
    if kind == SQUARED_GRAM:
        gram = DiffOp(m).gram_band()
        band = sym_band_square(gram).astype(float)
        return Precision(SQUARED_GRAM, band, 2.0 * gram_log_det(m))
    raise ValueError(f"unknown precision kind {kind!r}")
