"""Pure Python/NumPy twin of the compiled SMO loop in ``_smo.pyx``.

Same signature and same arithmetic, so both backends agree to rounding;
used when the extension is not built or REVEX_PURE_PYTHON is set.
"""

import numpy as np
import scipy.sparse as sp

TAU = 1e-12


def smo_run(indptr, indices, data, cptr, crow, cval, y, upper, alpha, grad, w, diag,
            eps, max_updates, fit_bias):
    n = y.shape[0]
    X = sp.csr_matrix((data, indices, indptr), shape=(n, w.shape[0]))
    pos = y > 0

    def kernel_column(i):
        return X @ X[i].toarray().ravel()

    def scatter(i, coef):
        lo, hi = indptr[i], indptr[i + 1]
        w[indices[lo:hi]] += coef * data[lo:hi]
        grad[:] += y * (coef * kernel_column(i))

    it = 0
    violation = np.inf
    while it < max_updates:
        if not fit_bias:
            pg = grad.copy()
            pg[(alpha <= 0.0) & (pg > 0.0)] = 0.0
            pg[(alpha >= upper) & (pg < 0.0)] = 0.0
            pg = np.abs(pg)
            i = int(np.argmax(pg))
            violation = float(pg[i])
            if violation <= 0.0 or violation < eps:
                break
            old = alpha[i]
            if diag[i] > 0.0:
                new = old - grad[i] / diag[i]
            else:
                new = upper[i] if grad[i] < 0.0 else 0.0
            alpha[i] = min(max(new, 0.0), upper[i])
            if alpha[i] != old:
                scatter(i, y[i] * (alpha[i] - old))
            it += 1
            continue

        up = np.where(pos, alpha < upper, alpha > 0.0)
        low = np.where(pos, alpha > 0.0, alpha < upper)
        if not up.any():
            violation = 0.0
            break
        score = np.where(up, -y * grad, -np.inf)
        # ties go to the last index, as in the compiled loop
        i = n - 1 - int(np.argmax(score[::-1]))
        gmax = score[i]
        gmax2 = float(np.max(np.where(low, y * grad, -np.inf))) if low.any() else -np.inf
        kcol = kernel_column(i)
        grad_diff = gmax + y * grad
        cand = low & (grad_diff > 0.0)
        j = -1
        if cand.any():
            quad = diag[i] + diag - 2.0 * kcol
            quad = np.where(quad <= 0.0, TAU, quad)
            obj = np.where(cand, -(grad_diff * grad_diff) / quad, np.inf)
            j = n - 1 - int(np.argmin(obj[::-1]))
        violation = gmax + gmax2
        if violation < eps or j < 0:
            break

        qij = y[i] * y[j] * kcol[j]
        ci, cj = upper[i], upper[j]
        old_ai, old_aj = alpha[i], alpha[j]
        ai, aj = old_ai, old_aj
        if y[i] != y[j]:
            quad = diag[i] + diag[j] + 2.0 * qij
            if quad <= 0.0:
                quad = TAU
            delta = (-grad[i] - grad[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0.0:
                if aj < 0.0:
                    aj, ai = 0.0, diff
            elif ai < 0.0:
                ai, aj = 0.0, -diff
            if diff > ci - cj:
                if ai > ci:
                    ai, aj = ci, ci - diff
            elif aj > cj:
                aj, ai = cj, cj + diff
        else:
            quad = diag[i] + diag[j] - 2.0 * qij
            if quad <= 0.0:
                quad = TAU
            delta = (grad[i] - grad[j]) / quad
            total = ai + aj
            ai -= delta
            aj += delta
            if total > ci:
                if ai > ci:
                    ai, aj = ci, total - ci
            elif aj < 0.0:
                aj, ai = 0.0, total
            if total > cj:
                if aj > cj:
                    aj, ai = cj, total - cj
            elif ai < 0.0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        if ai != old_ai:
            scatter(i, y[i] * (ai - old_ai))
        if aj != old_aj:
            scatter(j, y[j] * (aj - old_aj))
        it += 1
    return it, float(violation)
