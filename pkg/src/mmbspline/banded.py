"""Symmetric band matrices with a dense border, and their Cholesky factors.

The bordered layout ``[[A, E], [E', F]]`` keeps the band block ``A`` first so
that elimination never fills in outside the band; only the ``p`` border
columns are dense. Factorization costs ``O(dim * w**2 + dim * p**2)``.
"""
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .exceptions import DimensionError, NotPositiveDefiniteError
from .penalty import band_to_dense


@dataclass(frozen=True)
class BandSymMatrix:
    """Symmetric matrix in lower band storage, ``band[k, j] = A[j + k, j]``."""

    band: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.band.ndim != 2:
            raise DimensionError("band storage must be two dimensional")

    @property
    def dim(self):
        return self.band.shape[1]

    @property
    def bandwidth(self):
        return self.band.shape[0] - 1

    @classmethod
    def from_dense(cls, a, bandwidth):
        a = np.asarray(a, dtype=float)
        dim = a.shape[0]
        band = np.zeros((bandwidth + 1, dim))
        for k in range(min(bandwidth + 1, dim)):
            idx = np.arange(dim - k)
            band[k, : dim - k] = a[idx + k, idx]
        return cls(band)

    def toarray(self):
        return band_to_dense(self.band)

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        out = self.band[0][:, None] * x.reshape(self.dim, -1)
        x2 = x.reshape(self.dim, -1)
        for k in range(1, min(self.bandwidth + 1, self.dim)):
            diag = self.band[k, : self.dim - k][:, None]
            out[k:] += diag * x2[:-k]
            out[:-k] += diag * x2[k:]
        return out.reshape(x.shape)


@dataclass(frozen=True)
class BorderedBandMatrix:
    """
    Symmetric ``[[A, E], [E', F]]`` with ``A`` banded.

    Attributes
    ----------
    band : BandSymMatrix
        The ``dim x dim`` band block ``A``.
    border : numpy.ndarray, shape (dim, p)
        The coupling block ``E``.
    corner : numpy.ndarray, shape (p, p)
        The dense block ``F``.

    """

    band: BandSymMatrix
    border: np.ndarray = field(repr=False)
    corner: np.ndarray = field(repr=False)

    def __post_init__(self):
        dim, p = self.band.dim, self.corner.shape[0]
        if self.border.shape != (dim, p) or self.corner.shape != (p, p):
            raise DimensionError(
                f"border {self.border.shape} / corner {self.corner.shape} do not fit band dim {dim}"
            )

    @property
    def dim(self):
        return self.band.dim

    @property
    def p(self):
        return self.corner.shape[0]

    @property
    def shape(self):
        n = self.dim + self.p
        return (n, n)

    def toarray(self):
        return np.block([[self.band.toarray(), self.border], [self.border.T, self.corner]])

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        top = self.band.matvec(x[: self.dim]) + self.border @ x[self.dim:]
        bottom = self.border.T @ x[: self.dim] + self.corner @ x[self.dim:]
        return np.concatenate((top, bottom))


@dataclass(frozen=True)
class TriangularFactor:
    """
    Lower Cholesky factor ``L`` of a bordered band matrix, ``C = L L'``.

    ``L = [[L_A, 0], [W', L_S]]`` where ``L_A`` is banded, ``W = L_A^{-1} E``
    and ``L_S`` is the Cholesky factor of the Schur complement ``F - W'W``.
    """

    band: np.ndarray = field(repr=False)
    border: np.ndarray = field(repr=False)
    corner: np.ndarray = field(repr=False)
    log_det: float

    @property
    def dim(self):
        return self.band.shape[1]

    @property
    def p(self):
        return self.corner.shape[0]

    def diagonal(self):
        return np.concatenate((self.band[0], np.diag(self.corner)))

    def toarray(self):
        low_band = np.tril(band_to_dense(self.band))
        top = np.hstack((low_band, np.zeros((self.dim, self.p))))
        bottom = np.hstack((self.border.T, self.corner))
        return np.vstack((top, bottom))

    def solve(self, rhs):
        return solve(self, rhs)


def cholesky(matrix):
    """
    Factor a symmetric positive definite bordered band matrix.

    Parameters
    ----------
    matrix : BorderedBandMatrix or BandSymMatrix

    Returns
    -------
    TriangularFactor
        ``log_det`` holds ``log|C| = 2 * sum(log(diag(L)))``.

    Raises
    ------
    NotPositiveDefiniteError
        With the index of the failing pivot, band unknowns counted first.

    """
    if isinstance(matrix, BandSymMatrix):
        matrix = BorderedBandMatrix(matrix, np.zeros((matrix.dim, 0)), np.zeros((0, 0)))
    low_band, low_border, low_corner, log_det, info = kernels.bordered_cholesky(
        matrix.band.band, matrix.border, matrix.corner
    )
    if info >= 0:
        raise NotPositiveDefiniteError(int(info))
    return TriangularFactor(low_band, low_border, low_corner, float(log_det))


def solve(factor, rhs):
    """
    Solve ``C x = rhs`` with one forward and one backward sweep.

    `rhs` may be a vector of length ``dim + p`` or an array with that many rows.
    """
    rhs = np.asarray(rhs, dtype=float)
    n = factor.dim + factor.p
    if rhs.shape[0] != n or rhs.ndim > 2:
        raise DimensionError(f"right-hand side has {rhs.shape[0]} rows, expected {n}")
    out = kernels.bordered_solve(factor.band, factor.border, factor.corner, rhs.reshape(n, -1))
    return out.reshape(rhs.shape)
