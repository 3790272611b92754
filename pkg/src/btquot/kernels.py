"""Compiled inner loops over table-coded 2x2 matrices.

A matrix is four ring codes (a, b, c, d); its encoding is the integer
((a*r + b)*r + c)*r + d, whose numeric order is the row-major lexicographic
order of the entries. Scalar classes are canonicalized through precomputed
per-element data: ``orbmin[e]`` is min(lambda*e), ``lam0[e]`` one minimizing
scalar, and ``sidx[sptr[e]:sptr[e+1]]`` the scalars fixing e.
"""

from __future__ import annotations

import numpy as np
from numba import njit

INT64_MAX = np.iinfo(np.int64).max


@njit(cache=True, inline="always")
def _enc(v0, v1, v2, v3, r):
    return ((v0 * r + v1) * r + v2) * r + v3


@njit(cache=True)
def canon_enc(e0, e1, e2, e3, mul, lam0, sptr, sidx, r, scaled):
    if not scaled:
        return _enc(e0, e1, e2, e3, r)
    if e0 != 0:
        piv = e0
    elif e1 != 0:
        piv = e1
    elif e2 != 0:
        piv = e2
    else:
        piv = e3
    base = lam0[piv]
    best = INT64_MAX
    for t in range(sptr[piv], sptr[piv + 1]):
        lam = mul[base, sidx[t]]
        enc = _enc(mul[lam, e0], mul[lam, e1], mul[lam, e2], mul[lam, e3], r)
        if enc < best:
            best = enc
    return best


@njit(cache=True)
def coset_min(m0, m1, m2, m3, sub, gptr, add, mul, orbmin, lam0, sptr, sidx, r, scaled):
    """Least canonical encoding over m*x, x running through the rows of sub.

    Rows of sub are grouped by first column (gptr delimits groups), so a whole
    group is skipped when its common top-left entry cannot beat the best.
    """
    r3 = r * r * r
    best = INT64_MAX
    best_top = r
    for gi in range(gptr.shape[0] - 1):
        j0 = gptr[gi]
        x0 = sub[j0, 0]
        x2 = sub[j0, 2]
        y0 = add[mul[m0, x0], mul[m1, x2]]
        top = orbmin[y0] if scaled else y0
        if top > best_top:
            continue
        y2 = add[mul[m2, x0], mul[m3, x2]]
        for j in range(j0, gptr[gi + 1]):
            x1 = sub[j, 1]
            x3 = sub[j, 3]
            y1 = add[mul[m0, x1], mul[m1, x3]]
            y3 = add[mul[m2, x1], mul[m3, x3]]
            enc = canon_enc(y0, y1, y2, y3, mul, lam0, sptr, sidx, r, scaled)
            if enc < best:
                best = enc
                best_top = enc // r3
    return best


@njit(cache=True)
def batch_coset_keys(reps, left, right, sub, gptr, add, mul, orbmin, lam0, sptr, sidx, r, scaled):
    """keys[i, l, k] = coset_min(left[l] @ reps[i] @ right[k])."""
    n = reps.shape[0]
    out = np.empty((n, left.shape[0], right.shape[0]), dtype=np.int64)
    for i in range(n):
        h0 = reps[i, 0]
        h1 = reps[i, 1]
        h2 = reps[i, 2]
        h3 = reps[i, 3]
        for li in range(left.shape[0]):
            l0 = left[li, 0]
            l1 = left[li, 1]
            l2 = left[li, 2]
            l3 = left[li, 3]
            a0 = add[mul[l0, h0], mul[l1, h2]]
            a1 = add[mul[l0, h1], mul[l1, h3]]
            a2 = add[mul[l2, h0], mul[l3, h2]]
            a3 = add[mul[l2, h1], mul[l3, h3]]
            for ki in range(right.shape[0]):
                k0 = right[ki, 0]
                k1 = right[ki, 1]
                k2 = right[ki, 2]
                k3 = right[ki, 3]
                b0 = add[mul[a0, k0], mul[a1, k2]]
                b1 = add[mul[a0, k1], mul[a1, k3]]
                b2 = add[mul[a2, k0], mul[a3, k2]]
                b3 = add[mul[a2, k1], mul[a3, k3]]
                out[i, li, ki] = coset_min(b0, b1, b2, b3, sub, gptr, add, mul,
                                           orbmin, lam0, sptr, sidx, r, scaled)
    return out


@njit(cache=True)
def batch_products(elems, gens, add, mul, lam0, sptr, sidx, r, scaled):
    """Canonical encodings of g*e and e*g for every element row e and generator g."""
    n = elems.shape[0]
    ng = gens.shape[0]
    out = np.empty((n, 2 * ng), dtype=np.int64)
    for i in range(n):
        e0 = elems[i, 0]
        e1 = elems[i, 1]
        e2 = elems[i, 2]
        e3 = elems[i, 3]
        for j in range(ng):
            g0 = gens[j, 0]
            g1 = gens[j, 1]
            g2 = gens[j, 2]
            g3 = gens[j, 3]
            out[i, 2 * j] = canon_enc(
                add[mul[g0, e0], mul[g1, e2]], add[mul[g0, e1], mul[g1, e3]],
                add[mul[g2, e0], mul[g3, e2]], add[mul[g2, e1], mul[g3, e3]],
                mul, lam0, sptr, sidx, r, scaled)
            out[i, 2 * j + 1] = canon_enc(
                add[mul[e0, g0], mul[e1, g2]], add[mul[e0, g1], mul[e1, g3]],
                add[mul[e2, g0], mul[e3, g2]], add[mul[e2, g1], mul[e3, g3]],
                mul, lam0, sptr, sidx, r, scaled)
    return out


@njit(cache=True)
def batch_canon(mats, mul, lam0, sptr, sidx, r, scaled):
    n = mats.shape[0]
    out = np.empty(n, dtype=np.int64)
    for i in range(n):
        out[i] = canon_enc(mats[i, 0], mats[i, 1], mats[i, 2], mats[i, 3],
                           mul, lam0, sptr, sidx, r, scaled)
    return out


def decode(encs: np.ndarray, r: int) -> np.ndarray:
    """Inverse of the encoding for an array of encodings: shape (N, 4)."""
    encs = np.asarray(encs, dtype=np.int64)
    out = np.empty(encs.shape + (4,), dtype=np.int64)
    rest = encs.copy()
    for j in (3, 2, 1, 0):
        out[..., j] = rest % r
        rest //= r
    return out


@njit(cache=True)
def _polymulmod(x, y, g, n, fadd, fmul, fneg, out):
    """out = x*y mod g for digit vectors of length n over F_q (g monic, length n+1)."""
    buf = np.zeros(2 * n, dtype=np.int64)
    for i in range(n):
        if x[i] == 0:
            continue
        for j in range(n):
            buf[i + j] = fadd[buf[i + j], fmul[x[i], y[j]]]
    for k in range(2 * n - 1, n - 1, -1):
        c = buf[k]
        if c != 0:
            for j in range(n + 1):
                buf[k - n + j] = fadd[buf[k - n + j], fneg[fmul[c, g[j]]]]
    for i in range(n):
        out[i] = buf[i]


@njit(cache=True)
def _is_coprime(x, g, n, fadd, fmul, fneg, finv):
    """gcd(x, g) == 1 by the Euclidean algorithm on digit vectors."""
    a = np.zeros(n + 1, dtype=np.int64)
    b = np.zeros(n + 1, dtype=np.int64)
    for i in range(n + 1):
        a[i] = g[i]
    for i in range(n):
        b[i] = x[i]
    da = n
    db = n - 1
    while db >= 0 and b[db] == 0:
        db -= 1
    while db >= 0:
        inv_lc = finv[b[db]]
        while da >= db:
            c = fmul[a[da], inv_lc]
            if c != 0:
                for j in range(db + 1):
                    a[da - db + j] = fadd[a[da - db + j], fneg[fmul[c, b[j]]]]
            da -= 1
            while da >= 0 and a[da] == 0:
                da -= 1
        for i in range(n + 1):
            t = a[i]
            a[i] = b[i]
            b[i] = t
        t = da
        da = db
        db = t
    return da == 0


@njit(cache=True)
def square_class_counts(g, q, fadd, fmul, fneg, finv):
    """(|R^x|, |F_q^x R^x2|) for R = F_q[t]/(g), listing every element."""
    n = g.shape[0] - 1
    r = q ** n
    x = np.zeros(n, dtype=np.int64)
    sq = np.zeros(n, dtype=np.int64)
    in_sub = np.zeros(r, dtype=np.bool_)
    units = 0
    for code in range(r):
        c = code
        for i in range(n):
            x[i] = c % q
            c //= q
        if not _is_coprime(x, g, n, fadd, fmul, fneg, finv):
            continue
        units += 1
        _polymulmod(x, x, g, n, fadd, fmul, fneg, sq)
        for lam in range(1, q):
            enc = 0
            for i in range(n - 1, -1, -1):
                enc = enc * q + fmul[lam, sq[i]]
            in_sub[enc] = True
    return units, in_sub.sum()
