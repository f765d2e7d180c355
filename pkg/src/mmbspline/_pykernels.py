"""Pure-Python kernels.

Mirror of ``_ckernels.pyx`` with identical signatures and results. Used when
the compiled extension is not built, or when ``MMBSPLINE_BACKEND=python``.

Band storage convention shared by every kernel: a symmetric (or lower
triangular) matrix ``A`` of dimension ``dim`` and bandwidth ``w`` is held in
an array ``ab`` of shape ``(w + 1, dim)`` with ``ab[k, j] = A[j + k, j]``.
"""
import math

import numpy as np


def uniform_basis_values(u, degree):
    """
    Nonzero uniform B-spline values on one knot segment.

    Parameters
    ----------
    u : numpy.ndarray, shape (N,)
        Local coordinate within the segment, in [0, 1].
    degree : int
        The spline degree ``q``.

    Returns
    -------
    numpy.ndarray, shape (N, degree + 1)
        Column ``j`` holds the value of the ``j``-th active basis function,
        counting from the leftmost one that overlaps the segment.

    """
    u = np.asarray(u, dtype=float)
    work = np.zeros((u.shape[0], degree + 1))
    work[:, 0] = 1.0
    for i in range(1, degree + 1):
        temp = work[:, :i].copy()
        work[:, 0] = 0.0
        for j in range(1, i + 1):
            factor = temp[:, j - 1] / i
            work[:, j - 1] += factor * (j - u)
            work[:, j] = factor * (u - (j - i))
    return work


def gram_band(first, values, m):
    """B'B in band storage, shape (q + 1, m)."""
    first = np.asarray(first, dtype=np.intp)
    n_active = values.shape[1]
    band = np.zeros((n_active, m))
    for k in range(n_active):
        for j in range(n_active - k):
            band[k] += np.bincount(first + j, weights=values[:, j] * values[:, j + k], minlength=m)[:m]
    return band


def mmb_moments(first, values, y, m):
    """
    Inner products of the mixed model design for ``X = BG`` and ``Z = BD'``.

    Returns
    -------
    ztz : numpy.ndarray, shape (q + 3, m - 2)
        Z'Z in band storage.
    zty : numpy.ndarray, shape (m - 2,)
    ztx : numpy.ndarray, shape (m - 2, 2)
    xtx : numpy.ndarray, shape (2, 2)
    xty : numpy.ndarray, shape (2,)

    """
    first = np.asarray(first, dtype=np.intp)
    y = np.asarray(y, dtype=float)
    n_obs, n_active = values.shape
    dim = m - 2
    width = n_active + 2
    # Z[i, k] = B[i, k] - 2 B[i, k + 1] + B[i, k + 2], nonzero for k in first-2 .. first+q
    zloc = np.zeros((n_obs, width))
    for r in range(width):
        for offset, coef in ((0, 1.0), (1, -2.0), (2, 1.0)):
            j = r - 2 + offset
            if 0 <= j < n_active:
                zloc[:, r] += coef * values[:, j]
    cols = first[:, None] - 2 + np.arange(width)
    valid = (cols >= 0) & (cols < dim)
    zloc = np.where(valid, zloc, 0.0)
    cols = np.clip(cols, 0, dim - 1)

    x0 = values.sum(axis=1)
    x1 = (values * (first[:, None] + 1 + np.arange(n_active))).sum(axis=1)
    xmat = np.column_stack((x0, x1))

    ztz = np.zeros((width, dim))
    for k in range(width):
        for r in range(width - k):
            ztz[k] += np.bincount(cols[:, r], weights=zloc[:, r] * zloc[:, r + k], minlength=dim)
    zty = np.zeros(dim)
    ztx = np.zeros((dim, 2))
    for r in range(width):
        zty += np.bincount(cols[:, r], weights=zloc[:, r] * y, minlength=dim)
        for c in range(2):
            ztx[:, c] += np.bincount(cols[:, r], weights=zloc[:, r] * xmat[:, c], minlength=dim)
    return ztz, zty, ztx, xmat.T @ xmat, xmat.T @ y


def _band_cholesky(ab):
    """In-place lower banded Cholesky on a list of lists; returns failing pivot or -1."""
    w = len(ab) - 1
    dim = len(ab[0])
    diag = ab[0]
    for j in range(dim):
        d = diag[j]
        if not d > 0.0:
            return j
        d = math.sqrt(d)
        diag[j] = d
        kmax = min(w, dim - 1 - j)
        for k in range(1, kmax + 1):
            ab[k][j] /= d
        for k in range(1, kmax + 1):
            lk = ab[k][j]
            col = j + k
            for i in range(k, kmax + 1):
                ab[i - k][col] -= ab[i][j] * lk
    return -1


def _band_forward(ab, rhs):
    """Solve L x = rhs in place; ``rhs`` is a list of columns."""
    w = len(ab) - 1
    dim = len(ab[0])
    diag = ab[0]
    for x in rhs:
        for j in range(dim):
            xj = x[j] / diag[j]
            x[j] = xj
            if xj != 0.0:
                for k in range(1, min(w, dim - 1 - j) + 1):
                    x[j + k] -= ab[k][j] * xj


def _band_backward(ab, rhs):
    """Solve L' x = rhs in place; ``rhs`` is a list of columns."""
    w = len(ab) - 1
    dim = len(ab[0])
    diag = ab[0]
    for x in rhs:
        for j in range(dim - 1, -1, -1):
            s = x[j]
            for k in range(1, min(w, dim - 1 - j) + 1):
                s -= ab[k][j] * x[j + k]
            x[j] = s / diag[j]


def _dense_cholesky(a):
    p = len(a)
    low = [[0.0] * p for _ in range(p)]
    for j in range(p):
        s = a[j][j] - sum(low[j][k] ** 2 for k in range(j))
        if not s > 0.0:
            return low, j
        low[j][j] = math.sqrt(s)
        for i in range(j + 1, p):
            low[i][j] = (a[i][j] - sum(low[i][k] * low[j][k] for k in range(j))) / low[j][j]
    return low, -1


def bordered_cholesky(band, border, corner):
    """
    Cholesky factor of ``[[A, E], [E', F]]`` with ``A`` banded.

    Parameters
    ----------
    band : numpy.ndarray, shape (w + 1, dim)
        Lower band storage of ``A``.
    border : numpy.ndarray, shape (dim, p)
        The coupling block ``E``.
    corner : numpy.ndarray, shape (p, p)
        The dense block ``F``.

    Returns
    -------
    low_band : numpy.ndarray, shape (w + 1, dim)
    low_border : numpy.ndarray, shape (dim, p)
        ``W = L_A^{-1} E``, so the bottom-left block of the factor is ``W'``.
    low_corner : numpy.ndarray, shape (p, p)
    log_det : float
        log-determinant of the full matrix; NaN on failure.
    info : int
        -1 on success, else the index of the first nonpositive pivot in the
        full ordering (band first, then corner).

    """
    ab = np.asarray(band, dtype=float).tolist()
    dim = len(ab[0])
    p = corner.shape[0]
    info = _band_cholesky(ab)
    if info >= 0:
        return (np.array(ab), np.zeros((dim, p)), np.zeros((p, p)), math.nan, info)
    cols = np.asarray(border, dtype=float).T.tolist()
    _band_forward(ab, cols)
    wmat = np.array(cols, dtype=float).reshape(p, dim).T
    schur = (np.asarray(corner, dtype=float) - wmat.T @ wmat).tolist()
    low_c, cinfo = _dense_cholesky(schur)
    low_band = np.array(ab)
    low_corner = np.array(low_c, dtype=float).reshape(p, p)
    if cinfo >= 0:
        return low_band, wmat, low_corner, math.nan, dim + cinfo
    log_det = 2.0 * (float(np.log(low_band[0]).sum()) + float(np.log(np.diag(low_corner)).sum()))
    return low_band, wmat, low_corner, log_det, -1


def bordered_solve(low_band, low_border, low_corner, rhs):
    """
    Solve ``C x = rhs`` given the bordered factor.

    ``rhs`` has shape (dim + p, r); the band unknowns come first.
    """
    rhs = np.asarray(rhs, dtype=float)
    dim = low_band.shape[1]
    p = low_corner.shape[0]
    ab = low_band.tolist()
    top = rhs[:dim].T.tolist()
    _band_forward(ab, top)
    z1 = np.array(top, dtype=float).reshape(-1, dim).T
    z2 = rhs[dim:] - low_border.T @ z1
    for i in range(p):
        z2[i] = (z2[i] - low_corner[i, :i] @ z2[:i]) / low_corner[i, i]
    for i in range(p - 1, -1, -1):
        z2[i] = (z2[i] - low_corner[i + 1:, i] @ z2[i + 1:]) / low_corner[i, i]
    cols = (z1 - low_border @ z2).T.tolist()
    _band_backward(ab, cols)
    x1 = np.array(cols, dtype=float).reshape(-1, dim).T
    return np.vstack((x1, z2))
