# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled Newton/residual kernels for the gauge-reduced system.

Same contract as dziobek._pykernels; see that module for the reference
implementation and documentation.  Distances enter as (r^2)^a, no square
roots anywhere.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()

NEWTON_OK = 0
NEWTON_NO_CONVERGENCE = 1
NEWTON_COLLAPSE = 2
NEWTON_STALLED = 3

DEF MERIT_INF = 1e300


cdef inline int _nfree(int body, int d) nogil:
    return body if body < d else d


cdef void _coords_from_free(const double[::1] free, int n, int d, double[:, ::1] coords) nogil:
    cdef int i, c, k = 0
    for i in range(n):
        for c in range(d):
            coords[i, c] = 0.0
    for i in range(1, n):
        for c in range(_nfree(i, d)):
            coords[i, c] = free[k]
            k += 1


cdef double _residual_full_c(const double[:, ::1] coords, const double[::1] m, double a,
                             double[:, ::1] f, double* min_r2) nogil:
    """Fill f with the balance equations; return max |f|, set min pair r^2."""
    cdef int n = coords.shape[0]
    cdef int d = coords.shape[1]
    cdef int i, j, c
    cdef double r2, w, diffc, best = 1e300, norm = 0.0, v
    for i in range(n):
        for c in range(d):
            f[i, c] = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for c in range(d):
                diffc = coords[i, c] - coords[j, c]
                r2 += diffc * diffc
            if r2 < best:
                best = r2
            w = pow(r2, a) - 1.0
            for c in range(d):
                diffc = coords[i, c] - coords[j, c]
                f[j, c] += m[i] * w * diffc
                f[i, c] -= m[j] * w * diffc
    for i in range(n):
        for c in range(d):
            v = fabs(f[i, c])
            if v != v:
                min_r2[0] = best
                return v
            if v > norm:
                norm = v
    min_r2[0] = best
    return norm


cdef double _reduced_norm(const double[:, ::1] f, int n, int d) nogil:
    cdef int i, c
    cdef double norm = 0.0, v
    for i in range(1, n):
        for c in range(_nfree(i, d)):
            v = fabs(f[i, c])
            if v != v:
                return v
            if v > norm:
                norm = v
    return norm


cdef void _jacobian_reduced_c(const double[:, ::1] coords, const double[::1] m, double a,
                              const int[::1] base, double[:, ::1] jac) nogil:
    cdef int n = coords.shape[0]
    cdef int d = coords.shape[1]
    cdef int nred = jac.shape[0]
    cdef int i, j, p, q, al, be
    cdef double r2, w, g, gval, diffc
    cdef double u[16]
    for p in range(nred):
        for q in range(nred):
            jac[p, q] = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            r2 = 0.0
            for al in range(d):
                diffc = coords[i, al] - coords[j, al]
                u[al] = diffc
                r2 += diffc * diffc
            w = pow(r2, a) - 1.0
            g = 2.0 * a * pow(r2, a - 1.0)
            # d F_i / d x_j = m_j G, d F_j / d x_i = m_i G,
            # diagonal blocks accumulate the negatives
            for al in range(_nfree(i, d)):
                for be in range(_nfree(j, d)):
                    gval = g * u[al] * u[be]
                    if al == be:
                        gval += w
                    jac[base[i] + al, base[j] + be] += m[j] * gval
            for al in range(_nfree(j, d)):
                for be in range(_nfree(i, d)):
                    gval = g * u[al] * u[be]
                    if al == be:
                        gval += w
                    jac[base[j] + al, base[i] + be] += m[i] * gval
            for al in range(_nfree(i, d)):
                for be in range(_nfree(i, d)):
                    gval = g * u[al] * u[be]
                    if al == be:
                        gval += w
                    jac[base[i] + al, base[i] + be] -= m[j] * gval
            for al in range(_nfree(j, d)):
                for be in range(_nfree(j, d)):
                    gval = g * u[al] * u[be]
                    if al == be:
                        gval += w
                    jac[base[j] + al, base[j] + be] -= m[i] * gval


cdef int _solve_inplace(double[:, ::1] a_mat, double[::1] b, int nred) nogil:
    """Gaussian elimination with partial pivoting; 0 on success, 1 singular."""
    cdef int col, row, piv, k
    cdef double best, v, factor
    for col in range(nred):
        piv = col
        best = fabs(a_mat[col, col])
        for row in range(col + 1, nred):
            v = fabs(a_mat[row, col])
            if v > best:
                best = v
                piv = row
        if best < 1e-150 or best != best:
            return 1
        if piv != col:
            for k in range(nred):
                v = a_mat[col, k]
                a_mat[col, k] = a_mat[piv, k]
                a_mat[piv, k] = v
            v = b[col]
            b[col] = b[piv]
            b[piv] = v
        for row in range(col + 1, nred):
            factor = a_mat[row, col] / a_mat[col, col]
            if factor != 0.0:
                a_mat[row, col] = 0.0
                for k in range(col + 1, nred):
                    a_mat[row, k] -= factor * a_mat[col, k]
                b[row] -= factor * b[col]
    for col in range(nred - 1, -1, -1):
        v = b[col]
        for k in range(col + 1, nred):
            v -= a_mat[col, k] * b[k]
        b[col] = v / a_mat[col, col]
    return 0


def _layout(int n):
    cdef int d = n - 2
    base = np.full(n, -1, dtype=np.int32)
    cdef int i, off = 0
    for i in range(n):
        base[i] = off
        off += _nfree(i, d)
    return base, off


def residual_full(coords, m, a):
    coords_arr = np.ascontiguousarray(coords, dtype=np.float64)
    m_arr = np.ascontiguousarray(m, dtype=np.float64)
    out = np.empty_like(coords_arr)
    cdef double minr2 = 0.0
    cdef const double[:, ::1] cv = coords_arr
    cdef const double[::1] mv = m_arr
    cdef double[:, ::1] ov = out
    _residual_full_c(cv, mv, float(a), ov, &minr2)
    return out.ravel()


def residual_reduced(free, m, a):
    m_arr = np.ascontiguousarray(m, dtype=np.float64)
    cdef int n = m_arr.shape[0]
    cdef int d = n - 2
    free_arr = np.ascontiguousarray(free, dtype=np.float64)
    coords = np.empty((n, d))
    f = np.empty((n, d))
    cdef double minr2 = 0.0
    cdef const double[::1] fv = free_arr
    cdef double[:, ::1] cv = coords
    cdef double[:, ::1] ff = f
    cdef const double[::1] mv = m_arr
    _coords_from_free(fv, n, d, cv)
    _residual_full_c(cv, mv, float(a), ff, &minr2)
    out = np.empty(_layout(n)[1])
    cdef double[::1] outv = out
    cdef int i, c, k = 0
    for i in range(1, n):
        for c in range(_nfree(i, d)):
            outv[k] = ff[i, c]
            k += 1
    return out


def jacobian_reduced(free, m, a):
    m_arr = np.ascontiguousarray(m, dtype=np.float64)
    cdef int n = m_arr.shape[0]
    cdef int d = n - 2
    if d > 16:
        raise ValueError("compiled kernel supports n <= 18")
    base_arr, nred = _layout(n)
    free_arr = np.ascontiguousarray(free, dtype=np.float64)
    coords = np.empty((n, d))
    jac = np.empty((nred, nred))
    cdef const double[::1] fv = free_arr
    cdef double[:, ::1] cv = coords
    cdef double[:, ::1] jv = jac
    cdef const double[::1] mv = m_arr
    cdef const int[::1] bv = base_arr
    _coords_from_free(fv, n, d, cv)
    _jacobian_reduced_c(cv, mv, float(a), bv, jv)
    return jac


def newton_reduced(free0, m, a, tol, max_iters, shrink, max_backtracks, collision_eps):
    """Damped Newton on the reduced system; see _pykernels.newton_reduced."""
    m_arr = np.ascontiguousarray(m, dtype=np.float64)
    cdef int n = m_arr.shape[0]
    cdef int d = n - 2
    if d > 16:
        raise ValueError("compiled kernel supports n <= 18")
    base_arr, nred = _layout(n)
    free_arr = np.array(free0, dtype=np.float64)
    if free_arr.shape[0] != nred:
        raise ValueError("free vector has the wrong length")

    coords = np.empty((n, d))
    fmat = np.empty((n, d))
    trial_free = np.empty(nred)
    trial_coords = np.empty((n, d))
    trial_f = np.empty((n, d))
    jac = np.empty((nred, nred))
    amat = np.empty((nred, nred))
    step = np.empty(nred)

    cdef double[::1] freev = free_arr
    cdef double[:, ::1] cv = coords
    cdef double[:, ::1] fv = fmat
    cdef double[::1] tfreev = trial_free
    cdef double[:, ::1] tcv = trial_coords
    cdef double[:, ::1] tfv = trial_f
    cdef double[:, ::1] jv = jac
    cdef double[:, ::1] av = amat
    cdef double[::1] stepv = step
    cdef const double[::1] mv = m_arr
    cdef const int[::1] bv = base_arr

    cdef double a_c = float(a)
    cdef double tol_c = float(tol)
    cdef double shrink_c = float(shrink)
    cdef double eps2 = float(collision_eps) * float(collision_eps)
    cdef int max_iters_c = int(max_iters)
    cdef int max_bt = int(max_backtracks)

    cdef double minr2 = 0.0, tmin = 0.0
    cdef double full_norm, red_norm, merit, tnorm, alpha
    cdef int iters = 0, it, bt, k, i, c, accepted, singular

    _coords_from_free(freev, n, d, cv)
    full_norm = _residual_full_c(cv, mv, a_c, fv, &minr2)
    if minr2 < eps2:
        return free_arr, np.inf, 0, NEWTON_COLLAPSE

    for it in range(max_iters_c):
        if full_norm < tol_c:
            return free_arr, full_norm, iters, NEWTON_OK
        red_norm = _reduced_norm(fv, n, d)
        if red_norm < 1e-3 * tol_c:
            return free_arr, full_norm, iters, NEWTON_NO_CONVERGENCE
        _jacobian_reduced_c(cv, mv, a_c, bv, jv)
        # solve jac * step = -f_reduced
        k = 0
        for i in range(1, n):
            for c in range(_nfree(i, d)):
                stepv[k] = -fv[i, c]
                k += 1
        for i in range(nred):
            for k in range(nred):
                av[i, k] = jv[i, k]
        singular = _solve_inplace(av, stepv, nred)
        if singular:
            return free_arr, full_norm, iters, NEWTON_STALLED
        for k in range(nred):
            if stepv[k] != stepv[k]:
                return free_arr, full_norm, iters, NEWTON_STALLED

        alpha = 1.0
        accepted = 0
        for bt in range(max_bt + 1):
            for k in range(nred):
                tfreev[k] = freev[k] + alpha * stepv[k]
            _coords_from_free(tfreev, n, d, tcv)
            tnorm = _residual_full_c(tcv, mv, a_c, tfv, &tmin)
            if tmin >= eps2:
                merit = _reduced_norm(tfv, n, d)
                if merit == merit and merit < red_norm and merit < MERIT_INF:
                    for k in range(nred):
                        freev[k] = tfreev[k]
                    for i in range(n):
                        for c in range(d):
                            cv[i, c] = tcv[i, c]
                            fv[i, c] = tfv[i, c]
                    full_norm = tnorm
                    accepted = 1
                    break
            alpha *= shrink_c
        if not accepted:
            return free_arr, full_norm, iters, NEWTON_STALLED
        iters += 1

    if full_norm < tol_c:
        return free_arr, full_norm, iters, NEWTON_OK
    return free_arr, full_norm, iters, NEWTON_NO_CONVERGENCE
