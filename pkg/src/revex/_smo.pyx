# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""SMO inner loop for the linear, weighted soft-margin SVM dual.

Minimises 0.5 a'Qa - sum(a) subject to 0 <= a_i <= upper_i and, when the
bias is fitted, y'a = 0. Q_ij = y_i y_j <x_i, x_j>. Kernel columns are never
stored: they are accumulated through the CSC copy of X, which is cheap for
sparse n-gram data. ``alpha``, ``grad`` and ``w`` are updated in place.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef double TAU = 1e-12
cdef double INF = float("inf")


cdef inline void _kernel_column(Py_ssize_t i,
                                const long long[::1] indptr, const int[::1] indices,
                                const double[::1] data,
                                const long long[::1] cptr, const int[::1] crow,
                                const double[::1] cval, double[::1] out) noexcept nogil:
    cdef long long p, q
    cdef int f
    cdef double v
    for p in range(indptr[i], indptr[i + 1]):
        f = indices[p]
        v = data[p]
        for q in range(cptr[f], cptr[f + 1]):
            out[crow[q]] += v * cval[q]


cdef inline void _clear_column(Py_ssize_t i,
                               const long long[::1] indptr, const int[::1] indices,
                               const long long[::1] cptr, const int[::1] crow,
                               double[::1] out) noexcept nogil:
    cdef long long p, q
    for p in range(indptr[i], indptr[i + 1]):
        for q in range(cptr[indices[p]], cptr[indices[p] + 1]):
            out[crow[q]] = 0.0


cdef inline void _scatter(Py_ssize_t i, double coef,
                          const long long[::1] indptr, const int[::1] indices,
                          const double[::1] data,
                          const long long[::1] cptr, const int[::1] crow,
                          const double[::1] cval, const double[::1] y,
                          double[::1] grad, double[::1] w) noexcept nogil:
    # w += coef * x_i ; grad_t += y_t * coef * <x_i, x_t>
    cdef long long p, q
    cdef int f
    cdef double c
    for p in range(indptr[i], indptr[i + 1]):
        f = indices[p]
        c = coef * data[p]
        w[f] += c
        for q in range(cptr[f], cptr[f + 1]):
            grad[crow[q]] += y[crow[q]] * c * cval[q]


def smo_run(const long long[::1] indptr, const int[::1] indices, const double[::1] data,
            const long long[::1] cptr, const int[::1] crow, const double[::1] cval,
            const double[::1] y, const double[::1] upper, double[::1] alpha,
            double[::1] grad, double[::1] w, const double[::1] diag,
            double eps, long long max_updates, bint fit_bias):
    """Run at most ``max_updates`` SMO steps. Returns (updates, violation)."""
    cdef Py_ssize_t n = y.shape[0]
    cdef double[::1] kcol = np.zeros(n, dtype=np.float64)
    cdef long long it = 0
    cdef Py_ssize_t t, i, j
    cdef double gmax, gmax2, obj_min, grad_diff, quad, obj_diff, violation = INF
    cdef double old_ai, old_aj, delta, diff, total, ci, cj, qij, pg
    with nogil:
        while it < max_updates:
            if not fit_bias:
                i = -1
                gmax = 0.0
                for t in range(n):
                    pg = grad[t]
                    if alpha[t] <= 0.0 and pg > 0.0:
                        pg = 0.0
                    elif alpha[t] >= upper[t] and pg < 0.0:
                        pg = 0.0
                    if pg < 0.0:
                        pg = -pg
                    if pg > gmax:
                        gmax = pg
                        i = t
                violation = gmax
                if i < 0 or gmax < eps:
                    break
                old_ai = alpha[i]
                if diag[i] > 0.0:
                    alpha[i] = old_ai - grad[i] / diag[i]
                else:
                    alpha[i] = upper[i] if grad[i] < 0.0 else 0.0
                if alpha[i] < 0.0:
                    alpha[i] = 0.0
                elif alpha[i] > upper[i]:
                    alpha[i] = upper[i]
                delta = alpha[i] - old_ai
                if delta != 0.0:
                    _scatter(i, y[i] * delta, indptr, indices, data, cptr, crow, cval, y, grad, w)
                it += 1
                continue

            # second-order working set selection
            gmax = -INF
            i = -1
            for t in range(n):
                if y[t] > 0.0:
                    if alpha[t] < upper[t] and -grad[t] >= gmax:
                        gmax = -grad[t]
                        i = t
                else:
                    if alpha[t] > 0.0 and grad[t] >= gmax:
                        gmax = grad[t]
                        i = t
            if i < 0:
                violation = 0.0
                break
            _kernel_column(i, indptr, indices, data, cptr, crow, cval, kcol)
            gmax2 = -INF
            obj_min = INF
            j = -1
            for t in range(n):
                if y[t] > 0.0:
                    if alpha[t] > 0.0:
                        grad_diff = gmax + grad[t]
                        if grad[t] >= gmax2:
                            gmax2 = grad[t]
                    else:
                        continue
                else:
                    if alpha[t] < upper[t]:
                        grad_diff = gmax - grad[t]
                        if -grad[t] >= gmax2:
                            gmax2 = -grad[t]
                    else:
                        continue
                if grad_diff > 0.0:
                    quad = diag[i] + diag[t] - 2.0 * kcol[t]
                    if quad <= 0.0:
                        quad = TAU
                    obj_diff = -(grad_diff * grad_diff) / quad
                    if obj_diff <= obj_min:
                        obj_min = obj_diff
                        j = t
            violation = gmax + gmax2
            if violation < eps or j < 0:
                _clear_column(i, indptr, indices, cptr, crow, kcol)
                break

            qij = y[i] * y[j] * kcol[j]
            _clear_column(i, indptr, indices, cptr, crow, kcol)
            ci = upper[i]
            cj = upper[j]
            old_ai = alpha[i]
            old_aj = alpha[j]
            if y[i] != y[j]:
                quad = diag[i] + diag[j] + 2.0 * qij
                if quad <= 0.0:
                    quad = TAU
                delta = (-grad[i] - grad[j]) / quad
                diff = alpha[i] - alpha[j]
                alpha[i] += delta
                alpha[j] += delta
                if diff > 0.0:
                    if alpha[j] < 0.0:
                        alpha[j] = 0.0
                        alpha[i] = diff
                else:
                    if alpha[i] < 0.0:
                        alpha[i] = 0.0
                        alpha[j] = -diff
                if diff > ci - cj:
                    if alpha[i] > ci:
                        alpha[i] = ci
                        alpha[j] = ci - diff
                else:
                    if alpha[j] > cj:
                        alpha[j] = cj
                        alpha[i] = cj + diff
            else:
                quad = diag[i] + diag[j] - 2.0 * qij
                if quad <= 0.0:
                    quad = TAU
                delta = (grad[i] - grad[j]) / quad
                total = alpha[i] + alpha[j]
                alpha[i] -= delta
                alpha[j] += delta
                if total > ci:
                    if alpha[i] > ci:
                        alpha[i] = ci
                        alpha[j] = total - ci
                else:
                    if alpha[j] < 0.0:
                        alpha[j] = 0.0
                        alpha[i] = total
                if total > cj:
                    if alpha[j] > cj:
                        alpha[j] = cj
                        alpha[i] = total - cj
                else:
                    if alpha[i] < 0.0:
                        alpha[i] = 0.0
                        alpha[j] = total

            delta = alpha[i] - old_ai
            if delta != 0.0:
                _scatter(i, y[i] * delta, indptr, indices, data, cptr, crow, cval, y, grad, w)
            delta = alpha[j] - old_aj
            if delta != 0.0:
                _scatter(j, y[j] * delta, indptr, indices, data, cptr, crow, cval, y, grad, w)
            it += 1
    return it, violation
