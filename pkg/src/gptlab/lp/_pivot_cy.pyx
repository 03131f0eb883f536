# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled simplex pivot loop; see _pivot_py for the reference semantics.

Both kernels must select identical pivot sequences (Dantzig entering with
Bland engagement under degeneracy, two-tier ratio test), so results are
bit-identical across them.
"""

from libc.math cimport fabs, INFINITY

OPTIMAL = 0
UNBOUNDED = 1
MAXITER = 2

KERNEL_NAME = "cython"

cdef double TIE_REL = 1e-12
cdef double TIE_ABS = 1e-15
cdef double PIVOT_STRONG = 1e-7
cdef int STALL_LIMIT = 25


cdef Py_ssize_t _ratio_test(double[:, ::1] T, long[::1] basis, Py_ssize_t m,
                            Py_ssize_t enter, double tol) nogil:
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t i, leave
    cdef double threshold, best, cut, ratio
    cdef long smallest
    cdef int tier
    for tier in range(2):
        threshold = PIVOT_STRONG if tier == 0 else tol
        best = INFINITY
        for i in range(m):
            if T[i, enter] > threshold:
                ratio = T[i, rhs] / T[i, enter]
                if ratio < best:
                    best = ratio
        if best == INFINITY:
            continue
        cut = best + TIE_REL * fabs(best) + TIE_ABS
        leave = -1
        smallest = 0
        for i in range(m):
            if T[i, enter] > threshold:
                ratio = T[i, rhs] / T[i, enter]
                if ratio <= cut and (leave < 0 or basis[i] < smallest):
                    smallest = basis[i]
                    leave = i
        return leave
    return -1


def run_pivots(double[:, ::1] T, long[::1] basis, double tol, long max_iter):
    """Pivot ``T`` in place until optimal/unbounded; returns (status, iterations)."""
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t ncols = T.shape[1]
    cdef Py_ssize_t rhs = ncols - 1
    cdef Py_ssize_t it = 0, i, j, k, enter, leave
    cdef double factor, piv, z_before, best_cost
    cdef int stall = 0
    cdef bint bland = False

    while it < max_iter:
        enter = -1
        if bland:
            for j in range(rhs):
                if T[m, j] < -tol:
                    enter = j
                    break
            if enter < 0:
                return OPTIMAL, it
        else:
            best_cost = INFINITY
            for j in range(rhs):
                if T[m, j] < best_cost:
                    best_cost = T[m, j]
                    enter = j
            if best_cost >= -tol:
                return OPTIMAL, it

        leave = _ratio_test(T, basis, m, enter, tol)
        if leave < 0:
            return UNBOUNDED, it

        z_before = T[m, rhs]
        piv = T[leave, enter]
        for k in range(ncols):
            T[leave, k] /= piv
        for i in range(m + 1):
            if i == leave:
                continue
            factor = T[i, enter]
            if factor != 0.0:
                for k in range(ncols):
                    T[i, k] -= factor * T[leave, k]
        for i in range(m + 1):
            T[i, enter] = 0.0
        T[leave, enter] = 1.0
        basis[leave] = enter
        it += 1

        if T[m, rhs] > z_before + TIE_ABS:
            stall = 0
            bland = False
        else:
            stall += 1
            if stall >= STALL_LIMIT:
                bland = True
    return MAXITER, it
