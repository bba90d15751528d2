"""Pure-numpy versions of the kernels in ``_kernels_jit``.

Dense kernels vectorize the inner row/column loops; the batched tridiagonal
kernels loop over the matrix index and vectorize across the batch.
"""
import math

import numpy as np

EPS = 2.0 ** -52
TINY = 2.2250738585072014e-308
MAX_QL_ITER = 50
MAX_INVIT = 5


def householder_tridiagonalize(a):
    n = a.shape[0]
    v = np.array(a, dtype=np.float64, copy=True)
    d = v[n - 1, :].copy()
    e = np.zeros(n)

    for i in range(n - 1, 0, -1):
        scale = np.abs(d[:i]).sum()
        h = 0.0
        if scale == 0.0:
            e[i] = d[i - 1]
            d[:i] = v[i - 1, :i]
            v[i, :i] = 0.0
            v[:i, i] = 0.0
        else:
            d[:i] /= scale
            h = float(d[:i] @ d[:i])
            f = d[i - 1]
            g = math.sqrt(h)
            if f > 0:
                g = -g
            e[i] = scale * g
            h = h - f * g
            d[i - 1] = f - g
            low = np.tril(v[:i, :i])
            di = d[:i]
            v[:i, i] = di
            e[:i] = low @ di + low.T @ di - np.diag(low) * di
            e[:i] /= h
            hh = float(e[:i] @ di) / (h + h)
            e[:i] -= hh * di
            v[:i, :i] -= np.tril(np.outer(e[:i], di) + np.outer(di, e[:i]))
            d[:i] = v[i - 1, :i]
            v[i, :i] = 0.0
        d[i] = h

    for i in range(n - 1):
        v[n - 1, i] = v[i, i]
        v[i, i] = 1.0
        h = d[i + 1]
        if h != 0.0:
            col = v[: i + 1, i + 1]
            g = col @ v[: i + 1, : i + 1]
            v[: i + 1, : i + 1] -= np.outer(col / h, g)
        v[: i + 1, i + 1] = 0.0
    d = v[n - 1, :].copy()
    v[n - 1, :] = 0.0
    v[n - 1, n - 1] = 1.0

    e[: n - 1] = e[1:]
    e[n - 1] = 0.0
    return d, e, v


def tridiagonal_ql(d, e, z):
    n = len(d)
    d = [float(x) for x in d]
    e = [float(x) for x in e]
    if n > 0:
        e[n - 1] = 0.0
    # rotate rows of the transpose: contiguous column pairs
    zt = np.ascontiguousarray(z.T)
    f = 0.0
    tst1 = 0.0
    for l in range(n):
        tst1 = max(tst1, abs(d[l]) + abs(e[l]))
        m = l
        while m < n - 1 and abs(e[m]) > EPS * tst1:
            m += 1
        if m > l:
            it = 0
            while True:
                it += 1
                if it > MAX_QL_ITER:
                    z[...] = zt.T
                    return np.array(d), False
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
                c = c2 = c3 = 1.0
                el1 = e[l + 1]
                s = s2 = 0.0
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
                    zi = zt[i].copy()
                    zi1 = zt[i + 1].copy()
                    zt[i + 1] = s * zi + c * zi1
                    zt[i] = c * zi - s * zi1
                p = -s * s2 * c3 * el1 * e[l] / dl1
                e[l] = s * p
                d[l] = c * p
                if abs(e[l]) <= EPS * tst1:
                    break
        d[l] = d[l] + f
        e[l] = 0.0
    z[...] = zt.T
    return np.array(d), True


def _top_eigenvalues(d, e):
    nb, n = d.shape
    e2 = e * e
    emax2 = e2.max(axis=1)
    pivmin = TINY * np.maximum(1.0, emax2)
    ae = np.abs(e)
    radius = np.zeros((nb, n))
    radius[:, :-1] += ae
    radius[:, 1:] += ae
    lo = (d - radius).min(axis=1)
    hi = (d + radius).max(axis=1)
    width = np.maximum(np.abs(lo), np.abs(hi))
    lo = lo - (2.0 * EPS * width * n + 2.0 * pivmin)
    hi = hi + (2.0 * EPS * width * n + 2.0 * pivmin)

    active = np.ones(nb, dtype=bool)
    for _ in range(2000):
        mid = 0.5 * (lo + hi)
        active &= (mid > lo) & (mid < hi)
        active &= ~(hi - lo <= 2.0 * EPS * np.maximum(np.abs(lo), np.abs(hi)) + pivmin)
        if not active.any():
            break
        idx = np.flatnonzero(active)
        x = mid[idx]
        pm = pivmin[idx]
        q = d[idx, 0] - x
        q = np.where(np.abs(q) < pm, -pm, q)
        count = (q < 0).astype(np.int64)
        for i in range(1, n):
            q = d[idx, i] - x - e2[idx, i - 1] / q
            q = np.where(np.abs(q) < pm, -pm, q)
            count += q < 0
        below = count == n
        hi[idx] = np.where(below, x, hi[idx])
        lo[idx] = np.where(below, lo[idx], x)
    return 0.5 * (lo + hi)


def _inverse_iteration(d, e, lam):
    nb, n = d.shape
    ae = np.abs(e)
    rowsum = np.abs(d).copy()
    rowsum[:, :-1] += ae
    rowsum[:, 1:] += ae
    pert = EPS * np.maximum(rowsum.max(axis=1), TINY)

    dd = d - lam[:, None]
    dl = e.copy()
    du = e.copy()
    du2 = np.zeros((nb, max(n - 2, 0)))
    swap = np.zeros((nb, n - 1), dtype=bool)
    for i in range(n - 1):
        a = dd[:, i].copy()
        b = dl[:, i].copy()
        sw = np.abs(a) < np.abs(b)
        swap[:, i] = sw
        a_ns = np.where(np.abs(a) < pert, pert, a)
        # no interchange
        fact_ns = b / np.where(sw, 1.0, a_ns)
        # interchange
        fact_sw = a / np.where(sw, b, 1.0)
        dd[:, i] = np.where(sw, b, a_ns)
        dl[:, i] = np.where(sw, fact_sw, fact_ns)
        dup = du[:, i].copy()
        dnext = dd[:, i + 1].copy()
        du[:, i] = np.where(sw, dnext, dup)
        dd[:, i + 1] = np.where(sw, dup - fact_sw * dnext, dnext - fact_ns * dup)
        if i < n - 2:
            du2[:, i] = np.where(sw, du[:, i + 1], 0.0)
            du[:, i + 1] = np.where(sw, -fact_sw * du[:, i + 1], du[:, i + 1])
    last = dd[:, n - 1]
    dd[:, n - 1] = np.where(np.abs(last) < pert, pert, last)

    start = 1.0 + 0.25 * np.sin(1.0 + np.arange(n))
    x = np.tile(start / math.sqrt(float(np.sum(start * start))), (nb, 1))
    active = np.ones(nb, dtype=bool)
    for _ in range(MAX_INVIT):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        b = x[idx].copy()
        sw = swap[idx]
        l_ = dl[idx]
        for i in range(n - 1):
            bi = b[:, i].copy()
            bi1 = b[:, i + 1].copy()
            s = sw[:, i]
            b[:, i] = np.where(s, bi1, bi)
            b[:, i + 1] = np.where(s, bi - l_[:, i] * bi1, bi1 - l_[:, i] * bi)
        dd_ = dd[idx]
        du_ = du[idx]
        du2_ = du2[idx]
        b[:, n - 1] /= dd_[:, n - 1]
        if n > 1:
            b[:, n - 2] = (b[:, n - 2] - du_[:, n - 2] * b[:, n - 1]) / dd_[:, n - 2]
        for i in range(n - 3, -1, -1):
            b[:, i] = (b[:, i] - du_[:, i] * b[:, i + 1] - du2_[:, i] * b[:, i + 2]) / dd_[:, i]
        b /= np.sqrt(np.sum(b * b, axis=1))[:, None]
        big = b[np.arange(idx.size), np.argmax(np.abs(b), axis=1)]
        b *= np.where(big < 0, -1.0, 1.0)[:, None]
        diff = np.abs(b - x[idx]).max(axis=1)
        x[idx] = b
        active[idx[diff <= 16.0 * EPS * math.sqrt(n)]] = False
    return x


def top_eigenpairs(d, e):
    d = np.asarray(d, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    nb, n = d.shape
    if n == 1:
        return d[:, 0].copy(), np.ones((nb, 1)), np.zeros(nb)
    lam = _top_eigenvalues(d, e)
    vec = _inverse_iteration(d, e, lam)
    r = (d - lam[:, None]) * vec
    r[:, 1:] += e * vec[:, :-1]
    r[:, :-1] += e * vec[:, 1:]
    res = np.sqrt(np.sum(r * r, axis=1))
    return lam, vec, res
