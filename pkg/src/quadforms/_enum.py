"""Exact lattice-point enumeration for positive definite even-diagonal forms.

The form Q(x) = (1/2) x^T A x is rewritten through an integer-scaled LDL^T
decomposition:  with leading principal minors d_1..d_r (d_0 = 1), unit upper
triangular U and M[i][j] = d_{i+1} * U[i][j] (always an integer), the linear
forms  l_i = d_{i+1} x_i + sum_{j>i} M[i][j] x_j  satisfy

    2 * P * Q(x) = sum_i K_i * l_i^2,   K_i = P / (d_{i+1} d_i),

for any common multiple P of the products d_{i+1} d_i.  All quantities are
integers, every partial sum is bounded by 2*B*P for an enumeration up to
Q <= B, and ranges come from integer square roots, so the recursion is exact.
A preflight bound check dispatches to an int64 numba kernel when safe and to
an arbitrary-precision Python twin otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from ._exact import ldl_decomposition

try:  # numba is optional at import time so the pure-Python paths still work
    from numba import njit

    HAVE_NUMBA = True
except Exception:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore
        def wrap(f):
            return f

        return wrap(args[0]) if args and callable(args[0]) else wrap


INT64_LIMIT = 1 << 62


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a // gcd(a, b) * b


@dataclass(frozen=True)
class EnumContext:
    """Per-form integer data driving the enumeration recursion."""

    rank: int
    delta: tuple[int, ...]  # leading principal minors d_1..d_r
    mcoef: tuple[tuple[int, ...], ...]  # M[i][j] = d_{i+1} U[i][j], j > i
    kcoef: tuple[int, ...]  # K_i = P / (d_{i+1} d_i)
    scale: int  # P

    def max_abs_coord(self, bound: int) -> list[int]:
        """Componentwise bound |x_i| <= bound_i for Q(x) <= bound."""
        # x_i^2 <= 2 * bound * (A^{-1})_{ii}; in LDL terms the crude cascade
        # bound below is simpler and still exact: |l_i| <= sqrt(2*bound*P/K_i)
        # and x_i = (l_i - s_i)/d_{i+1} with |s_i| <= sum |M_ij| bound_j.
        r = self.rank
        out = [0] * r
        for i in range(r - 1, -1, -1):
            lmax = isqrt(2 * bound * self.scale // self.kcoef[i])
            smax = sum(
                abs(self.mcoef[i][j]) * out[j] for j in range(i + 1, r)
            )
            out[i] = (lmax + smax) // self.delta[i] + 1
        return out


def make_context(gram: list[list[int]]) -> EnumContext:
    from fractions import Fraction

    r = len(gram)
    d, u = ldl_decomposition(gram)
    # leading principal minors are the running products of the D_i
    minors: list[int] = []
    fprod = Fraction(1)
    for i in range(r):
        fprod *= d[i]
        assert fprod.denominator == 1
        minors.append(int(fprod))
    mcoef = [[0] * r for _ in range(r)]
    for i in range(r):
        for j in range(i + 1, r):
            mij = minors[i] * u[i][j]
            assert mij.denominator == 1
            mcoef[i][j] = int(mij)
    scale = 1
    for i in range(r):
        scale = _lcm(scale, minors[i] * (minors[i - 1] if i else 1))
    kcoef = [scale // (minors[i] * (minors[i - 1] if i else 1)) for i in range(r)]
    return EnumContext(
        rank=r,
        delta=tuple(minors),
        mcoef=tuple(tuple(row) for row in mcoef),
        kcoef=tuple(kcoef),
        scale=scale,
    )


def _fits_int64(ctx: EnumContext, budget: int, tshift: tuple[int, ...] | None = None) -> bool:
    """True when the enumeration with total budget sum K_i l_i^2 <= budget
    provably stays inside signed 64-bit arithmetic."""
    if budget >= INT64_LIMIT:
        return False
    coord = ctx.max_abs_coord(budget // (2 * ctx.scale) + 1)
    for i in range(ctx.rank):
        lmax = isqrt(budget // ctx.kcoef[i]) + ctx.delta[i] + 1
        if tshift:
            lmax += abs(tshift[i])
        if lmax * lmax * ctx.kcoef[i] >= INT64_LIMIT:
            return False
        smax = sum(
            abs(ctx.mcoef[i][j]) * coord[j] for j in range(i + 1, ctx.rank)
        ) + (abs(tshift[i]) if tshift else 0)
        if (smax + lmax) >= INT64_LIMIT // max(ctx.delta[i], 1):
            return False
    return True


# ---------------------------------------------------------------------------
# numba kernels (int64)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _isqrt64(v):  # pragma: no cover - compiled
    if v < 0:
        return -1
    a = int(np.sqrt(np.float64(v)))
    while a > 0 and a * a > v:
        a -= 1
    while (a + 1) * (a + 1) <= v:
        a += 1
    return a


@njit(cache=True)
def _theta_kernel(r, delta, mco, kco, twop, budget, counts, tsh, c0):
    """Counts vectors by value (sum K l^2 - c0) / twop into counts."""
    nmax = counts.shape[0]
    x = np.zeros(r, dtype=np.int64)
    s = np.zeros(r, dtype=np.int64)
    rem = np.zeros(r + 1, dtype=np.int64)
    lo = np.zeros(r, dtype=np.int64)
    hi = np.zeros(r, dtype=np.int64)
    rem[r] = budget
    i = r - 1
    descend = True
    while i < r:
        if descend:
            sv = s[i] + tsh[i]
            lmax = _isqrt64(rem[i + 1] // kco[i])
            lo[i] = -((lmax + sv) // delta[i])
            hi[i] = (lmax - sv) // delta[i]
            x[i] = lo[i]
        else:
            x[i] += 1
        if x[i] > hi[i]:
            # backtrack: undo contribution of level i+1's current x
            i += 1
            if i >= r:
                break
            xi = x[i]
            for t in range(i):
                s[t] -= mco[i, t] * xi
            descend = False
            continue
        xi = x[i]
        l = delta[i] * xi + s[i] + tsh[i]
        v = l * l * kco[i]
        if v > rem[i + 1]:
            descend = False
            continue
        if i == 0:
            tot = budget - rem[1] + v
            idx = (tot - c0) // twop
            if 0 <= idx < nmax:
                counts[idx] += 1
            descend = False
        else:
            rem[i] = rem[i + 1] - v
            for t in range(i):
                s[t] += mco[i, t] * xi
            i -= 1
            descend = True
    return counts


@njit(cache=True)
def _represents_kernel(r, delta, mco, kco, target):
    """1 if some integer vector has sum K_i l_i^2 == target (> 0), else 0."""
    x = np.zeros(r, dtype=np.int64)
    s = np.zeros(r, dtype=np.int64)
    rem = np.zeros(r + 1, dtype=np.int64)
    lo = np.zeros(r, dtype=np.int64)
    hi = np.zeros(r, dtype=np.int64)
    rem[r] = target
    if r == 1:
        if target % kco[0] != 0:
            return 0
        q = target // kco[0]
        a = _isqrt64(q)
        if a * a != q:
            return 0
        return 1 if a % delta[0] == 0 else 0
    i = r - 1
    descend = True
    while i < r:
        if i == 0:
            # solve K_0 * l^2 == rem[1] with l == s[0] (mod delta[0]) directly
            ok = 0
            if rem[1] % kco[0] == 0:
                q = rem[1] // kco[0]
                a = _isqrt64(q)
                if a >= 0 and a * a == q:
                    if (a - s[0]) % delta[0] == 0 or (-a - s[0]) % delta[0] == 0:
                        ok = 1
            if ok:
                return 1
            i += 1
            if i >= r:
                break
            xi = x[i]
            for t in range(i):
                s[t] -= mco[i, t] * xi
            descend = False
            continue
        if descend:
            lmax = _isqrt64(rem[i + 1] // kco[i])
            lo[i] = -((lmax + s[i]) // delta[i])
            hi[i] = (lmax - s[i]) // delta[i]
            x[i] = lo[i]
        else:
            x[i] += 1
        if x[i] > hi[i]:
            i += 1
            if i >= r:
                break
            xi = x[i]
            for t in range(i):
                s[t] -= mco[i, t] * xi
            descend = False
            continue
        xi = x[i]
        l = delta[i] * xi + s[i]
        v = l * l * kco[i]
        if v > rem[i + 1]:
            descend = False
            continue
        rem[i] = rem[i + 1] - v
        for t in range(i):
            s[t] += mco[i, t] * xi
        i -= 1
        descend = True
    return 0


# ---------------------------------------------------------------------------
# arbitrary-precision Python twins
# ---------------------------------------------------------------------------


def _theta_python(ctx: EnumContext, bound: int, tsh: tuple[int, ...] | None, c0: int, nmax: int) -> list[int]:
    r = ctx.rank
    twop = 2 * ctx.scale
    budget = 2 * bound * ctx.scale
    counts = [0] * nmax
    tshift = tsh or tuple([0] * r)
    delta, mco, kco = ctx.delta, ctx.mcoef, ctx.kcoef

    def rec(i: int, rem: int, s: list[int], used: int) -> None:
        sv = s[i] + tshift[i]
        lmax = isqrt(rem // kco[i])
        lo = -((lmax + sv) // delta[i])
        hi = (lmax - sv) // delta[i]
        for xi in range(lo, hi + 1):
            l = delta[i] * xi + sv
            v = l * l * kco[i]
            if v > rem:
                continue
            if i == 0:
                idx = (used + v - c0) // twop
                if 0 <= idx < nmax:
                    counts[idx] += 1
            else:
                s2 = s[:]
                for t in range(i):
                    s2[t] += mco[t][i] * xi
                rec(i - 1, rem - v, s2, used + v)

    rec(r - 1, budget, [0] * r, 0)
    return counts


def _represents_python(ctx: EnumContext, target: int) -> bool:
    r = ctx.rank
    delta, mco, kco = ctx.delta, ctx.mcoef, ctx.kcoef
    if r == 1:
        if target % kco[0] != 0:
            return False
        q = target // kco[0]
        a = isqrt(q)
        return a * a == q and a % delta[0] == 0

    def rec(i: int, rem: int, s: list[int]) -> bool:
        if i == 0:
            if rem % kco[0] != 0:
                return False
            q = rem // kco[0]
            a = isqrt(q)
            if a * a != q:
                return False
            return (a - s[0]) % delta[0] == 0 or (-a - s[0]) % delta[0] == 0
        lmax = isqrt(rem // kco[i])
        lo = -((lmax + s[i]) // delta[i])
        hi = (lmax - s[i]) // delta[i]
        for xi in range(lo, hi + 1):
            l = delta[i] * xi + s[i]
            v = l * l * kco[i]
            if v > rem:
                continue
            s2 = s[:]
            for t in range(i):
                s2[t] += mco[t][i] * xi
            if rec(i - 1, rem - v, s2):
                return True
        return False

    return rec(r - 1, target, [0] * r)


# ---------------------------------------------------------------------------
# public entry points
# ---------------------------------------------------------------------------


def _kernel_args(ctx: EnumContext):
    r = ctx.rank
    delta = np.array(ctx.delta, dtype=np.int64)
    # mco[i, t] = coefficient M[t][i] applied to s[t] when x_i is fixed
    mco = np.zeros((r, r), dtype=np.int64)
    for t in range(r):
        for j in range(t + 1, r):
            mco[j, t] = ctx.mcoef[t][j]
    kco = np.array(ctx.kcoef, dtype=np.int64)
    return r, delta, mco, kco


def theta_counts(ctx: EnumContext, bound: int) -> np.ndarray:
    """r_Q(n) for n = 0..bound as an int64 array (counts all vectors, x=0 included)."""
    if bound < 0:
        return np.zeros(0, dtype=np.int64)
    if ctx.rank == 0:
        out = np.zeros(bound + 1, dtype=np.int64)
        out[0] = 1
        return out
    nmax = bound + 1
    zero = tuple([0] * ctx.rank)
    if HAVE_NUMBA and _fits_int64(ctx, 2 * bound * ctx.scale):
        r, delta, mco, kco = _kernel_args(ctx)
        counts = np.zeros(nmax, dtype=np.int64)
        tsh = np.zeros(r, dtype=np.int64)
        _theta_kernel(
            r,
            delta,
            mco,
            kco,
            2 * ctx.scale,
            2 * bound * ctx.scale,
            counts,
            tsh,
            0,
        )
        return counts
    return np.array(_theta_python(ctx, bound, zero, 0, nmax), dtype=np.int64)


def shifted_value_counts(
    ctx: EnumContext,
    tshift: tuple[int, ...],
    c0: int,
    vmin: int,
    vmax: int,
) -> np.ndarray:
    """Counts of lattice vectors of the shifted form by integer value.

    The shifted values are v(x) = (sum_i K_i l_i(x)^2 - c0) / (2P) with
    l_i(x) = d_{i+1} x_i + sum_j M_ij x_j + tshift_i; entry k of the result
    counts vectors with v(x) == vmin + k, for v in [vmin, vmax].
    """
    nmax = vmax - vmin + 1
    budget = c0 + 2 * ctx.scale * vmax
    offset = c0 + 2 * ctx.scale * vmin
    if HAVE_NUMBA and _fits_int64(ctx, budget, tshift):
        r, delta, mco, kco = _kernel_args(ctx)
        counts = np.zeros(nmax, dtype=np.int64)
        tsh = np.array(tshift, dtype=np.int64)
        _theta_kernel(r, delta, mco, kco, 2 * ctx.scale, budget, counts, tsh, offset)
        return counts
    return np.array(
        _theta_python(ctx, (budget // (2 * ctx.scale)) + 1, tshift, offset, nmax),
        dtype=np.int64,
    )


def represents_value(ctx: EnumContext, n: int) -> bool:
    """True if Q(x) == n for some integer vector x (n >= 1)."""
    if n == 0:
        return True
    if n < 0 or ctx.rank == 0:
        return False
    target = 2 * n * ctx.scale
    if HAVE_NUMBA and _fits_int64(ctx, target):
        r, delta, mco, kco = _kernel_args(ctx)
        return bool(_represents_kernel(r, delta, mco, kco, target))
    return _represents_python(ctx, target)


def short_vectors(gram: list[list[int]], bound: int) -> list[tuple[tuple[int, ...], int]]:
    """All (x, Q(x)) with 0 < Q(x) <= bound, both sign representatives included.

    Pure Python, exact; intended for the modest bounds used in isometry
    testing and canonicalization.
    """
    ctx = make_context(gram)
    r = ctx.rank
    delta, mco, kco = ctx.delta, ctx.mcoef, ctx.kcoef
    twop = 2 * ctx.scale
    budget = 2 * bound * ctx.scale
    out: list[tuple[tuple[int, ...], int]] = []
    x = [0] * r

    def rec(i: int, rem: int, s: list[int], used: int) -> None:
        lmax = isqrt(rem // kco[i])
        lo = -((lmax + s[i]) // delta[i])
        hi = (lmax - s[i]) // delta[i]
        for xi in range(lo, hi + 1):
            l = delta[i] * xi + s[i]
            v = l * l * kco[i]
            if v > rem:
                continue
            x[i] = xi
            if i == 0:
                val = used + v
                if val:
                    out.append((tuple(x), val // twop))
            else:
                s2 = s[:]
                for t in range(i):
                    s2[t] += mco[t][i] * xi
                rec(i - 1, rem - v, s2, used + v)
        x[i] = 0

    if r and bound >= 1:
        rec(r - 1, budget, [0] * r, 0)
    return out
