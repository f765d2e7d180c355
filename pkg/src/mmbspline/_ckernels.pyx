# cython: language_level=3
"""Compiled kernels; see ``_pykernels`` for the reference semantics."""
import numpy as np

cimport numpy as cnp
from libc.math cimport log, sqrt, NAN

cnp.import_array()


def uniform_basis_values(u, int degree):
    cdef const double[::1] uu = np.ascontiguousarray(u, dtype=np.float64)
    cdef Py_ssize_t n = uu.shape[0]
    out = np.zeros((n, degree + 1))
    cdef double[:, ::1] work = out
    cdef double temp[16]
    cdef double x, factor
    cdef Py_ssize_t r
    cdef int i, j
    if degree > 15:
        raise ValueError("degree too large")
    for r in range(n):
        x = uu[r]
        work[r, 0] = 1.0
        for i in range(1, degree + 1):
            for j in range(i):
                temp[j] = work[r, j]
            work[r, 0] = 0.0
            for j in range(1, i + 1):
                factor = temp[j - 1] / i
                work[r, j - 1] += factor * (j - x)
                work[r, j] = factor * (x - (j - i))
    return out


def gram_band(first, values, Py_ssize_t m):
    cdef const cnp.intp_t[::1] f = np.ascontiguousarray(first, dtype=np.intp)
    cdef const double[:, ::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], na = v.shape[1]
    out = np.zeros((na, m))
    cdef double[:, ::1] band = out
    cdef Py_ssize_t r, j, k
    for r in range(n):
        for j in range(na):
            for k in range(na - j):
                band[k, f[r] + j] += v[r, j] * v[r, j + k]
    return out


def mmb_moments(first, values, y, Py_ssize_t m):
    cdef const cnp.intp_t[::1] f = np.ascontiguousarray(first, dtype=np.intp)
    cdef const double[:, ::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] yy = np.ascontiguousarray(y, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], na = v.shape[1]
    cdef Py_ssize_t dim = m - 2, width = na + 2
    ztz_arr = np.zeros((width, dim))
    zty_arr = np.zeros(dim)
    ztx_arr = np.zeros((dim, 2))
    xtx_arr = np.zeros((2, 2))
    xty_arr = np.zeros(2)
    cdef double[:, ::1] ztz = ztz_arr
    cdef double[::1] zty = zty_arr
    cdef double[:, ::1] ztx = ztx_arr
    cdef double[:, ::1] xtx = xtx_arr
    cdef double[::1] xty = xty_arr
    cdef double z[20]
    cdef Py_ssize_t col[20]
    cdef Py_ssize_t r, a, b, j, c0
    cdef double x0, x1, yr, za
    if width > 20:
        raise ValueError("degree too large")
    for r in range(n):
        yr = yy[r]
        x0 = 0.0
        x1 = 0.0
        for j in range(na):
            x0 += v[r, j]
            x1 += v[r, j] * (f[r] + 1 + j)
        xtx[0, 0] += x0 * x0
        xtx[0, 1] += x0 * x1
        xtx[1, 1] += x1 * x1
        xty[0] += x0 * yr
        xty[1] += x1 * yr
        for a in range(width):
            za = 0.0
            j = a - 2
            if 0 <= j < na:
                za += v[r, j]
            j = a - 1
            if 0 <= j < na:
                za -= 2.0 * v[r, j]
            j = a
            if j < na:
                za += v[r, j]
            c0 = f[r] - 2 + a
            if c0 < 0 or c0 >= dim:
                za = 0.0
                c0 = 0
            z[a] = za
            col[a] = c0
        for a in range(width):
            za = z[a]
            if za == 0.0:
                continue
            zty[col[a]] += za * yr
            ztx[col[a], 0] += za * x0
            ztx[col[a], 1] += za * x1
            for b in range(a, width):
                ztz[b - a, col[a]] += za * z[b]
    xtx[1, 0] = xtx[0, 1]
    return ztz_arr, zty_arr, ztx_arr, xtx_arr, xty_arr


cdef Py_ssize_t _band_cholesky(double[:, ::1] ab) noexcept nogil:
    cdef Py_ssize_t w = ab.shape[0] - 1, dim = ab.shape[1]
    cdef Py_ssize_t j, k, i, kmax, col
    cdef double d, lk, inv
    for j in range(dim):
        d = ab[0, j]
        if not d > 0.0:
            return j
        d = sqrt(d)
        ab[0, j] = d
        inv = 1.0 / d
        kmax = w if w < dim - 1 - j else dim - 1 - j
        for k in range(1, kmax + 1):
            ab[k, j] *= inv
        for k in range(1, kmax + 1):
            lk = ab[k, j]
            col = j + k
            for i in range(k, kmax + 1):
                ab[i - k, col] -= ab[i, j] * lk
    return -1


cdef void _band_forward(const double[:, ::1] ab, double[:, ::1] x) noexcept nogil:
    # x has shape (r, dim): one right-hand side per row
    cdef Py_ssize_t w = ab.shape[0] - 1, dim = ab.shape[1]
    cdef Py_ssize_t c, j, k, kmax
    cdef double xj
    for c in range(x.shape[0]):
        for j in range(dim):
            xj = x[c, j] / ab[0, j]
            x[c, j] = xj
            kmax = w if w < dim - 1 - j else dim - 1 - j
            for k in range(1, kmax + 1):
                x[c, j + k] -= ab[k, j] * xj


cdef void _band_backward(const double[:, ::1] ab, double[:, ::1] x) noexcept nogil:
    cdef Py_ssize_t w = ab.shape[0] - 1, dim = ab.shape[1]
    cdef Py_ssize_t c, j, k, kmax
    cdef double s
    for c in range(x.shape[0]):
        for j in range(dim - 1, -1, -1):
            s = x[c, j]
            kmax = w if w < dim - 1 - j else dim - 1 - j
            for k in range(1, kmax + 1):
                s -= ab[k, j] * x[c, j + k]
            x[c, j] = s / ab[0, j]


def bordered_cholesky(band, border, corner):
    low_band = np.array(band, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] ab = low_band
    cdef Py_ssize_t dim = ab.shape[1]
    cdef const double[:, :] fc = np.asarray(corner, dtype=np.float64)
    cdef Py_ssize_t p = fc.shape[0]
    cdef Py_ssize_t info, i, j, k
    cdef double s, log_det = 0.0
    wt_arr = np.array(np.asarray(border, dtype=np.float64).T, order="C", copy=True)
    cdef double[:, ::1] wt = wt_arr
    low_corner = np.zeros((p, p))
    cdef double[:, ::1] lc = low_corner
    with nogil:
        info = _band_cholesky(ab)
    if info >= 0:
        return low_band, np.zeros((dim, p)), low_corner, NAN, info
    with nogil:
        _band_forward(ab, wt)
        for j in range(dim):
            log_det += log(ab[0, j])
        for j in range(p):
            s = fc[j, j]
            for k in range(dim):
                s -= wt[j, k] * wt[j, k]
            for k in range(j):
                s -= lc[j, k] * lc[j, k]
            if not s > 0.0:
                info = dim + j
                break
            lc[j, j] = sqrt(s)
            log_det += log(lc[j, j])
            for i in range(j + 1, p):
                s = fc[i, j]
                for k in range(dim):
                    s -= wt[i, k] * wt[j, k]
                for k in range(j):
                    s -= lc[i, k] * lc[j, k]
                lc[i, j] = s / lc[j, j]
    if info >= 0:
        return low_band, wt_arr.T.copy(), low_corner, NAN, info
    return low_band, wt_arr.T.copy(), low_corner, 2.0 * log_det, -1


def bordered_solve(low_band, low_border, low_corner, rhs):
    cdef const double[:, ::1] ab = np.ascontiguousarray(low_band, dtype=np.float64)
    cdef const double[:, ::1] wt = np.ascontiguousarray(np.asarray(low_border, dtype=np.float64).T)
    cdef const double[:, ::1] lc = np.ascontiguousarray(low_corner, dtype=np.float64)
    cdef Py_ssize_t dim = ab.shape[1], p = lc.shape[0]
    rhs_t = np.array(np.asarray(rhs, dtype=np.float64).T, order="C", copy=True)
    cdef double[:, ::1] x = rhs_t
    cdef Py_ssize_t nr = x.shape[0]
    cdef Py_ssize_t c, i, k
    cdef double s
    with nogil:
        # forward sweep: band block, then corner
        _band_forward(ab, x)
        for c in range(nr):
            for i in range(p):
                s = x[c, dim + i]
                for k in range(dim):
                    s -= wt[i, k] * x[c, k]
                for k in range(i):
                    s -= lc[i, k] * x[c, dim + k]
                x[c, dim + i] = s / lc[i, i]
        # backward sweep: corner, then band block
        for c in range(nr):
            for i in range(p - 1, -1, -1):
                s = x[c, dim + i]
                for k in range(i + 1, p):
                    s -= lc[k, i] * x[c, dim + k]
                x[c, dim + i] = s / lc[i, i]
            for k in range(dim):
                s = 0.0
                for i in range(p):
                    s += wt[i, k] * x[c, dim + i]
                x[c, k] -= s
        _band_backward(ab, x)
    return rhs_t.T.copy()
