"""Loop kernels compiled with numba.

Every function here has a vectorized twin in ``_kernels_np`` with the same
signature and the same arithmetic order where it matters for determinism.
"""
import math

import numpy as np
from numba import njit

EPS = 2.0 ** -52
TINY = 2.2250738585072014e-308
MAX_QL_ITER = 50
MAX_INVIT = 5


@njit(cache=True)
def householder_tridiagonalize(a):
    """Reduce symmetric ``a`` to tridiagonal form, accumulating the transform.

    Returns ``(d, e, q)`` with ``e[i]`` coupling rows i and i+1 (``e[n-1] = 0``)
    and ``a = q @ T @ q.T``.
    """
    n = a.shape[0]
    v = a.copy()
    d = np.empty(n)
    e = np.zeros(n)
    for j in range(n):
        d[j] = v[n - 1, j]

    for i in range(n - 1, 0, -1):
        scale = 0.0
        h = 0.0
        for k in range(i):
            scale += abs(d[k])
        if scale == 0.0:
            e[i] = d[i - 1]
            for j in range(i):
                d[j] = v[i - 1, j]
                v[i, j] = 0.0
                v[j, i] = 0.0
        else:
            for k in range(i):
                d[k] /= scale
                h += d[k] * d[k]
            f = d[i - 1]
            g = math.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h = h - f * g
            d[i - 1] = f - g
            for j in range(i):
                e[j] = 0.0
            for j in range(i):
                f = d[j]
                v[j, i] = f
                g = e[j] + v[j, j] * f
                for k in range(j + 1, i):
                    g += v[k, j] * d[k]
                    e[k] += v[k, j] * f
                e[j] = g
            f = 0.0
            for j in range(i):
                e[j] /= h
                f += e[j] * d[j]
            hh = f / (h + h)
            for j in range(i):
                e[j] -= hh * d[j]
            for j in range(i):
                f = d[j]
                g = e[j]
                for k in range(j, i):
                    v[k, j] -= f * e[k] + g * d[k]
                d[j] = v[i - 1, j]
                v[i, j] = 0.0
        d[i] = h

    for i in range(n - 1):
        v[n - 1, i] = v[i, i]
        v[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            for k in range(i + 1):
                d[k] = v[k, i + 1] / h
            for j in range(i + 1):
                g = 0.0
                for k in range(i + 1):
                    g += v[k, i + 1] * v[k, j]
                for k in range(i + 1):
                    v[k, j] -= g * d[k]
        for k in range(i + 1):
            v[k, i + 1] = 0.0
    for j in range(n):
        d[j] = v[n - 1, j]
        v[n - 1, j] = 0.0
    v[n - 1, n - 1] = 1.0

    # shift so that e[i] couples i and i+1
    for i in range(n - 1):
        e[i] = e[i + 1]
    e[n - 1] = 0.0
    return d, e, v


@njit(cache=True)
def tridiagonal_ql(d, e, z):
    """Implicitly shifted QL on a symmetric tridiagonal matrix.

    ``e[i]`` couples i and i+1. Rotations are accumulated into ``z`` in place.
    Returns ``(eigenvalues, ok)``; ``ok`` is False when some eigenvalue needed
    more than ``MAX_QL_ITER`` sweeps. Eigenvalues come back unsorted.
    """
    n = d.shape[0]
    d = d.copy()
    e = e.copy()
    if n > 0:
        e[n - 1] = 0.0
    nrow = z.shape[0]
    f = 0.0
    tst1 = 0.0
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n - 1:
            if abs(e[m]) <= EPS * tst1:
                break
            m += 1
        if m > l:
            it = 0
            while True:
                it += 1
                if it > MAX_QL_ITER:
                    return d, False
                g = d[l]
                p = (d[l + 1] - g) / (2.0 * e[l])
                r = math.hypot(p, 1.0)
                if p < 0:
                    r = -r
                d[l] = e[l] / (p + r)
                d[l + 1] = e[l] * (p + r)
                dl1 = d[l + 1]
                h = g - d[l]
                for i in range(l + 2, n):
                    d[i] -= h
                f += h

                p = d[m]
                c = 1.0
                c2 = c
                c3 = c
                el1 = e[l + 1]
                s = 0.0
                s2 = 0.0
                for i in range(m - 1, l - 1, -1):
                    c3 = c2
                    c2 = c
                    s2 = s
                    g = c * e[i]
                    h = c * p
                    r = math.hypot(p, e[i])
                    e[i + 1] = s * r
                    s = e[i] / r
                    c = p / r
                    p = c * d[i] - s * g
                    d[i + 1] = h + s * (c * g + s * d[i])
                    for k in range(nrow):
                        h = z[k, i + 1]
                        z[k, i + 1] = s * z[k, i] + c * h
                        z[k, i] = c * z[k, i] - s * h
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= EPS * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    return d, True


@njit(cache=True)
def _sturm_count_below(d, e2, x, pivmin):
    # number of eigenvalues strictly below x
    count = 0
    q = d[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, d.shape[0]):
        q = d[i] - x - e2[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


@njit(cache=True)
def _top_eigenvalue(d, e):
    n = d.shape[0]
    if n == 1:
        return d[0]
    e2 = e * e
    emax2 = 0.0
    for i in range(n - 1):
        emax2 = max(emax2, e2[i])
    pivmin = TINY * max(1.0, emax2)
    lo = d[0] - abs(e[0])
    hi = d[0] + abs(e[0])
    for i in range(1, n):
        r = abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        lo = min(lo, d[i] - r)
        hi = max(hi, d[i] + r)
    width = max(abs(lo), abs(hi))
    lo -= 2.0 * EPS * width * n + 2.0 * pivmin
    hi += 2.0 * EPS * width * n + 2.0 * pivmin
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if hi - lo <= 2.0 * EPS * max(abs(lo), abs(hi)) + pivmin:
            break
        if _sturm_count_below(d, e2, mid, pivmin) == n:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@njit(cache=True)
def _start_vector(n):
    # fixed, sign-definite start; deterministic across calls
    b = np.empty(n)
    for i in range(n):
        b[i] = 1.0 + 0.25 * math.sin(1.0 + i)
    return b


@njit(cache=True)
def _inverse_iteration(d, e, lam):
    n = d.shape[0]
    anorm = 0.0
    for i in range(n):
        r = abs(d[i])
        if i > 0:
            r += abs(e[i - 1])
        if i < n - 1:
            r += abs(e[i])
        anorm = max(anorm, r)
    pert = EPS * max(anorm, TINY)

    # LU with partial pivoting of T - lam I (LAPACK gttrf layout)
    dd = d - lam
    dl = e.copy()
    du = e.copy()
    du2 = np.zeros(max(n - 2, 0))
    swap = np.zeros(n - 1, dtype=np.bool_)
    for i in range(n - 1):
        if abs(dd[i]) >= abs(dl[i]):
            if abs(dd[i]) < pert:
                dd[i] = pert
            fact = dl[i] / dd[i]
            dl[i] = fact
            dd[i + 1] -= fact * du[i]
        else:
            fact = dd[i] / dl[i]
            dd[i] = dl[i]
            dl[i] = fact
            tmp = du[i]
            du[i] = dd[i + 1]
            dd[i + 1] = tmp - fact * dd[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            swap[i] = True
    if abs(dd[n - 1]) < pert:
        dd[n - 1] = pert

    x = _start_vector(n)
    nrm = math.sqrt(np.sum(x * x))
    x /= nrm
    for _ in range(MAX_INVIT):
        b = x.copy()
        for i in range(n - 1):
            if not swap[i]:
                b[i + 1] -= dl[i] * b[i]
            else:
                tmp = b[i]
                b[i] = b[i + 1]
                b[i + 1] = tmp - dl[i] * b[i]
        b[n - 1] /= dd[n - 1]
        if n > 1:
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / dd[n - 2]
        for i in range(n - 3, -1, -1):
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / dd[i]
        nrm = math.sqrt(np.sum(b * b))
        b /= nrm
        if b[np.argmax(np.abs(b))] < 0:
            b = -b
        diff = 0.0
        for i in range(n):
            diff = max(diff, abs(b[i] - x[i]))
        x = b
        if diff <= 16.0 * EPS * math.sqrt(n):
            break
    return x


@njit(cache=True)
def _residual(d, e, lam, v):
    n = d.shape[0]
    acc = 0.0
    for i in range(n):
        r = (d[i] - lam) * v[i]
        if i > 0:
            r += e[i - 1] * v[i - 1]
        if i < n - 1:
            r += e[i] * v[i + 1]
        acc += r * r
    return math.sqrt(acc)


@njit(cache=True)
def top_eigenpairs(d, e):
    """Largest eigenpair of each tridiagonal matrix in a batch.

    ``d`` has shape (B, n), ``e`` shape (B, n-1). Returns eigenvalues (B,),
    unit eigenvectors (B, n) with the largest-magnitude entry positive, and
    residual norms (B,).
    """
    nb, n = d.shape
    lam = np.empty(nb)
    vec = np.empty((nb, n))
    res = np.empty(nb)
    for b in range(nb):
        if n == 1:
            lam[b] = d[b, 0]
            vec[b, 0] = 1.0
            res[b] = 0.0
            continue
        lam[b] = _top_eigenvalue(d[b], e[b])
        vec[b] = _inverse_iteration(d[b], e[b], lam[b])
        res[b] = _residual(d[b], e[b], lam[b], vec[b])
    return lam, vec, res
