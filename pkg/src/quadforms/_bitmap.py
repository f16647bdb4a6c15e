"""Represented-value bitmaps for medium/large bounds via orthogonal splitting.

For a form Q of rank >= 3 we pick a primitive vector u, take the sublattice
L = Z u + (complement of u), and expand around the finitely many cosets c of
L in Z^r:

    Q(c + a*u + B y) = Q(c) + (u^T A c) a + Q(u) a^2 + (B^T A c)^T y + Q_B(y)

(the cross term vanishes because B spans u's orthogonal complement).  All
coefficients are integers, so the represented set is a union over cosets and
a of integer translates of the value sets of shifted lower-rank forms
W(y) = Q_B(y) + h^T y.  Rank 2 is enumerated directly by a numba kernel into
a packed uint64 bitmap; higher ranks recurse.  Everything is exact integer
arithmetic; no floating point decisions are involved.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt

import numpy as np

from ._exact import (
    adjugate,
    coset_representatives,
    det,
    kernel_basis,
    mat_mul,
    mat_vec,
    transpose,
)

try:
    from numba import njit

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore
        def wrap(f):
            return f

        return wrap(args[0]) if args and callable(args[0]) else wrap


# ---------------------------------------------------------------------------
# packed bit arrays (little-endian bit order inside uint64 words)
# ---------------------------------------------------------------------------


def pack_empty(nbits: int) -> np.ndarray:
    return np.zeros((nbits + 63) // 64, dtype=np.uint64)


def bit_test(words: np.ndarray, idx: int) -> bool:
    return bool((int(words[idx >> 6]) >> (idx & 63)) & 1)


def unpack_bits(words: np.ndarray, nbits: int) -> np.ndarray:
    flat = np.unpackbits(words.view(np.uint8), bitorder="little")
    return flat[:nbits].astype(bool)


def clear_tail_bits(words: np.ndarray, nbits: int) -> None:
    """Zero the storage bits at positions >= nbits (keeps OR composition clean)."""
    tail = nbits & 63
    used = (nbits + 63) // 64
    if tail and used:
        words[used - 1] &= np.uint64((1 << tail) - 1)
    if used < len(words):
        words[used:] = 0


class _Scratch:
    """Reusable shift buffers so or_shifted never allocates."""

    def __init__(self) -> None:
        self.lo = np.zeros(0, dtype=np.uint64)
        self.hi = np.zeros(0, dtype=np.uint64)

    def reserve(self, n: int) -> None:
        if len(self.lo) < n:
            self.lo = np.zeros(n, dtype=np.uint64)
            self.hi = np.zeros(n, dtype=np.uint64)


_SCRATCH = _Scratch()


def or_shifted(dst: np.ndarray, dst_bits: int, src: np.ndarray, src_bits: int, offset: int) -> None:
    """dst[offset + k] |= src[k] for 0 <= k < src_bits, clipped to dst_bits.

    Storage bits of src beyond src_bits must be zero (see clear_tail_bits);
    dst may accumulate junk beyond dst_bits, cleared by the caller at the end.
    """
    if offset >= dst_bits:
        return
    if offset < 0:
        skip = -offset
        whole, rem = divmod(skip, 64)
        src = src[whole:]
        src_bits -= whole * 64
        if src_bits <= 0:
            return
        if rem == 0:
            offset = 0
        else:
            n = len(src)
            _SCRATCH.reserve(n)
            lo = _SCRATCH.lo[:n]
            np.right_shift(src, np.uint64(rem), out=lo)
            if n > 1:
                hi = _SCRATCH.hi[: n - 1]
                np.left_shift(src[1:], np.uint64(64 - rem), out=hi)
                lo[:-1] |= hi
            src = lo
            src_bits -= rem
            offset = 0
        if src_bits <= 0:
            return
    usable = min(src_bits, dst_bits - offset)
    nword_src = (usable + 63) // 64
    src = src[:nword_src]
    q, r = divmod(offset, 64)
    if r == 0:
        end = min(q + nword_src, len(dst))
        dst[q:end] |= src[: end - q]
        return
    n = nword_src
    _SCRATCH.reserve(n)
    lo = _SCRATCH.lo[:n]
    hi = _SCRATCH.hi[:n]
    # hi first: src may alias the lo scratch after a negative-offset shift
    np.right_shift(src, np.uint64(64 - r), out=hi)
    np.left_shift(src, np.uint64(r), out=lo)
    end = min(q + n, len(dst))
    dst[q:end] |= lo[: end - q]
    end2 = min(q + 1 + n, len(dst))
    if end2 > q + 1:
        dst[q + 1 : end2] |= hi[: end2 - q - 1]


# ---------------------------------------------------------------------------
# rank-2 base case
# ---------------------------------------------------------------------------


@njit(cache=True)
def _binary_bits_kernel(g11, g12, g22, h1, h2, vmin, vmax, words):  # pragma: no cover
    detg = g11 * g22 - g12 * g12
    a = g11 // 2
    b2 = g11 * h2 - g12 * h1
    c2 = h1 * h1 + 2 * g11 * vmax
    disc = b2 * b2 + detg * c2
    if disc < 0:
        return
    s = int(np.sqrt(np.float64(disc)))
    while s > 0 and s * s > disc:
        s -= 1
    while (s + 1) * (s + 1) <= disc:
        s += 1
    ylo = -((b2 + s) // detg)
    yhi = (s - b2) // detg
    for y2 in range(ylo, yhi + 1):
        b = g12 * y2 + h1
        c = (g22 // 2) * y2 * y2 + h2 * y2
        d2 = b * b - 4 * a * (c - vmax)
        if d2 < 0:
            continue
        t = int(np.sqrt(np.float64(d2)))
        while t > 0 and t * t > d2:
            t -= 1
        while (t + 1) * (t + 1) <= d2:
            t += 1
        xlo = -((b + t) // (2 * a))
        xhi = (t - b) // (2 * a)
        for y1 in range(xlo, xhi + 1):
            v = a * y1 * y1 + b * y1 + c
            if vmin <= v <= vmax:
                idx = v - vmin
                words[idx >> 6] |= np.uint64(1) << np.uint64(idx & 63)


def _binary_bits_python(g11, g12, g22, h1, h2, vmin, vmax, words):
    detg = g11 * g22 - g12 * g12
    a = g11 // 2
    b2 = g11 * h2 - g12 * h1
    c2 = h1 * h1 + 2 * g11 * vmax
    disc = b2 * b2 + detg * c2
    if disc < 0:
        return
    s = isqrt(disc)
    ylo = -((b2 + s) // detg)
    yhi = (s - b2) // detg
    for y2 in range(ylo, yhi + 1):
        b = g12 * y2 + h1
        c = (g22 // 2) * y2 * y2 + h2 * y2
        d2 = b * b - 4 * a * (c - vmax)
        if d2 < 0:
            continue
        t = isqrt(d2)
        xlo = -((b + t) // (2 * a))
        xhi = (t - b) // (2 * a)
        for y1 in range(xlo, xhi + 1):
            v = a * y1 * y1 + b * y1 + c
            if vmin <= v <= vmax:
                idx = v - vmin
                words[idx >> 6] |= np.uint64(1) << np.uint64(idx & 63)


_INT63 = 1 << 62


def _binary_bits(g, h, vmin, vmax):
    nbits = vmax - vmin + 1
    words = pack_empty(nbits)
    g11, g12, g22 = g[0][0], g[0][1], g[1][1]
    h1, h2 = h
    detg = g11 * g22 - g12 * g12
    safe = (
        abs(g11 * h2 - g12 * h1) ** 2 + detg * (h1 * h1 + 2 * g11 * max(vmax, 1))
        < _INT63
    )
    if HAVE_NUMBA and safe:
        _binary_bits_kernel(g11, g12, g22, h1, h2, vmin, vmax, words)
    else:
        _binary_bits_python(g11, g12, g22, h1, h2, vmin, vmax, words)
    return words


# ---------------------------------------------------------------------------
# shift reduction and value minimum
# ---------------------------------------------------------------------------


def _qvalue(g: list[list[int]], v: list[int]) -> int:
    tot = 0
    r = len(v)
    for i in range(r):
        tot += g[i][i] * v[i] * v[i]
        for j in range(i + 1, r):
            tot += 2 * g[i][j] * v[i] * v[j]
    return tot // 2


def _reduce_shift(g: list[list[int]], h: list[int]) -> tuple[list[int], int]:
    """Translate y -> y + k so the shift vector is small.

    Returns (h', const) with value sets {W_h(y)} = {W_h'(y) + const}.
    """
    r = len(g)
    adj = adjugate(g)
    dg = det(g)
    s = [Fraction(sum(adj[i][j] * h[j] for j in range(r)), dg) for i in range(r)]
    k = [-int(round(si)) for si in s]
    if all(v == 0 for v in k):
        return list(h), 0
    gk = mat_vec(g, k)
    h2 = [h[i] + gk[i] for i in range(r)]
    const = _qvalue(g, k) + sum(h[i] * k[i] for i in range(r))
    return h2, const


def _value_min(g: list[list[int]], h: list[int]) -> int:
    """ceil of the real minimum of Q_g(y) + h^T y."""
    r = len(g)
    adj = adjugate(g)
    dg = det(g)
    num = sum(h[i] * adj[i][j] * h[j] for i in range(r) for j in range(r))
    # real min = -num / (2 dg); ceil(-a/b) = -(a // b)
    return -(num // (2 * dg))


# ---------------------------------------------------------------------------
# split selection
# ---------------------------------------------------------------------------


def _split_candidates(r: int) -> list[list[int]]:
    out = []
    for i in range(r):
        e = [0] * r
        e[i] = 1
        out.append(e)
    for i in range(r):
        for j in range(i + 1, r):
            for sj in (1, -1):
                e = [0] * r
                e[i] = 1
                e[j] = sj
                out.append(e)
    return out


def _prepare_split(g: list[list[int]], vmax: int):
    """Choose u minimizing estimated work; returns split data."""
    r = len(g)
    best = None
    for u in _split_candidates(r):
        ug = mat_vec(g, u)
        d = sum(u[i] * ug[i] for i in range(r)) // 2
        if d <= 0:
            continue
        basis_cols = kernel_basis([ug])
        if len(basis_cols) != r - 1:
            continue
        bmat = transpose(basis_cols)
        umat = [[u[i]] + bmat[i] for i in range(r)]
        f = abs(det(umat))
        if f == 0 or f > 64:
            continue
        g2 = mat_mul(transpose(bmat), mat_mul(g, bmat))
        det2 = det(g2)
        alpha_cnt = 2 * isqrt(max(vmax, 1) // d) + 1
        or_term = f * alpha_cnt * (vmax / 64.0) * 1.5
        enum_term = f * (6.3 * vmax / max(det2, 1) ** 0.5) * 2.0
        cost = or_term + enum_term
        if best is None or cost < best[0]:
            best = (cost, u, d, bmat, umat, f, g2)
    if best is None:
        raise ValueError("no usable splitting vector")
    _, u, d, bmat, umat, f, g2 = best
    cosets = coset_representatives(umat)
    return u, d, bmat, g2, cosets


# ---------------------------------------------------------------------------
# main recursion
# ---------------------------------------------------------------------------


class BitmapBuilder:
    """Computes packed bitmaps of the integer values of Q(y) + h^T y."""

    def __init__(self) -> None:
        self._cache: dict = {}
        self._split_cache: dict = {}

    def value_bitmap(
        self, g: list[list[int]], h: list[int], vmax: int
    ) -> tuple[int, np.ndarray, int]:
        """Returns (vmin, words, nbits) covering values in [vmin, vmax] at least."""
        h, const = _reduce_shift(g, h)
        req = vmax - const
        # round the range up so nearby requests share cache entries
        req = ((req >> 14) + 1) << 14
        key = (tuple(tuple(row) for row in g), tuple(h), req)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._compute(g, h, req)
            self._cache[key] = hit
        vmin, words, nbits = hit
        return vmin + const, words, nbits

    def _compute(self, g, h, vmax):
        r = len(g)
        vmin = _value_min(g, h)
        if vmax < vmin:
            return vmin, pack_empty(1), 0
        if r == 1:
            return self._unary(g, h, vmin, vmax)
        if r == 2:
            words = _binary_bits(g, h, vmin, vmax)
            return vmin, words, vmax - vmin + 1
        nbits = vmax - vmin + 1
        words = pack_empty(nbits)
        gkey = tuple(tuple(row) for row in g)
        split = self._split_cache.get(gkey)
        if split is None:
            split = _prepare_split(g, vmax - vmin)
            self._split_cache[gkey] = split
        u, d, bmat, g2, cosets = split
        gu = mat_vec(g, u)
        bt = transpose(bmat)
        for c in cosets:
            gc = mat_vec(g, c)
            base = _qvalue(g, c) + sum(h[i] * c[i] for i in range(r))
            lin = sum(gu[i] * c[i] for i in range(r)) + sum(h[i] * u[i] for i in range(r))
            # recentre a so |lin| <= d
            shift_a = -(lin // (2 * d)) if d else 0
            base += d * shift_a * shift_a + lin * shift_a
            lin += 2 * d * shift_a
            h2 = [
                sum(bt[t][i] * (gc[i] + h[i]) for i in range(r))
                for t in range(r - 1)
            ]
            # alpha range: base + d a^2 + lin a + w <= vmax for some achievable w
            sub_max = vmax - base + (lin * lin) // (4 * d) + 1
            svmin, swords, snbits = self.value_bitmap(g2, h2, sub_max)
            if snbits <= 0:
                continue
            rbound = vmax - base - svmin
            disc = lin * lin + 4 * d * rbound
            if disc < 0:
                continue
            sq = isqrt(disc)
            alo = -((lin + sq) // (2 * d))
            ahi = (sq - lin) // (2 * d)
            for a in range(alo, ahi + 1):
                off = base + d * a * a + lin * a + svmin - vmin
                or_shifted(words, nbits, swords, snbits, off)
        clear_tail_bits(words, nbits)
        return vmin, words, nbits

    @staticmethod
    def _unary(g, h, vmin, vmax):
        nbits = vmax - vmin + 1
        words = pack_empty(nbits)
        a = g[0][0] // 2
        b = h[0]
        disc = b * b + 4 * a * (vmax - 0)
        # a y^2 + b y <= vmax
        if disc >= 0:
            t = isqrt(disc)
            ylo = -((b + t) // (2 * a))
            yhi = (t - b) // (2 * a)
            for y in range(ylo, yhi + 1):
                v = a * y * y + b * y
                if vmin <= v <= vmax:
                    idx = v - vmin
                    words[idx >> 6] |= np.uint64(1) << np.uint64(idx & 63)
        return vmin, words, nbits


def represented_bitmap(gram: list[list[int]], bound: int) -> np.ndarray:
    """Boolean array b[0..bound]; b[n] iff Q represents n."""
    builder = BitmapBuilder()
    vmin, words, nbits = builder.value_bitmap(gram, [0] * len(gram), bound)
    out = np.zeros(bound + 1, dtype=bool)
    if nbits > 0:
        bits = unpack_bits(words, nbits)
        lo = max(vmin, 0)
        hi = min(vmin + nbits, bound + 1)
        if hi > lo:
            out[lo:hi] = bits[lo - vmin : hi - vmin]
    return out


# ---------------------------------------------------------------------------
# split oracle for values beyond the bitmap range
# ---------------------------------------------------------------------------


@njit(cache=True)
def _probe_kernel(ns, d_arr, base_arr, lin_arr, svmin_arr, snbits_arr, woff_arr, words, out):  # pragma: no cover
    rows = d_arr.shape[0]
    for qi in range(ns.shape[0]):
        n = ns[qi]
        hit = 0
        for row in range(rows):
            if hit:
                break
            d = d_arr[row]
            base = base_arr[row]
            lin = lin_arr[row]
            svmin = svmin_arr[row]
            snbits = snbits_arr[row]
            if snbits <= 0:
                continue
            woff = woff_arr[row]
            svmax = svmin + snbits - 1
            lo_t = n - base - svmax
            hi_t = n - base - svmin
            disc_hi = lin * lin + 4 * d * hi_t
            if disc_hi < 0:
                continue
            sq_hi = _isqrt_i64(disc_hi)
            outer_lo = -((lin + sq_hi) // (2 * d))
            outer_hi = (sq_hi - lin) // (2 * d)
            disc_lo = lin * lin + 4 * d * lo_t
            if disc_lo < 0:
                b1lo, b1hi = outer_lo, outer_hi
                b2lo, b2hi = 1, 0
            else:
                sq_lo = _isqrt_i64(disc_lo)
                gap_lo = (-lin - sq_lo) // (2 * d)
                gap_hi = -((lin - sq_lo) // (2 * d))
                b1lo, b1hi = outer_lo, min(gap_lo, outer_hi)
                b2lo, b2hi = max(gap_hi, outer_lo), outer_hi
            for a in range(b1lo, b1hi + 1):
                w = n - base - (d * a * a + lin * a)
                if svmin <= w <= svmax:
                    idx = w - svmin
                    if (words[woff + (idx >> 6)] >> np.uint64(idx & 63)) & np.uint64(1):
                        hit = 1
                        break
            if not hit:
                for a in range(b2lo, b2hi + 1):
                    if b1lo <= a <= b1hi:
                        continue
                    w = n - base - (d * a * a + lin * a)
                    if svmin <= w <= svmax:
                        idx = w - svmin
                        if (words[woff + (idx >> 6)] >> np.uint64(idx & 63)) & np.uint64(1):
                            hit = 1
                            break
        out[qi] = hit


@njit(cache=True)
def _isqrt_i64(v):  # pragma: no cover
    if v < 0:
        return -1
    a = int(np.sqrt(np.float64(v)))
    while a > 0 and a * a > v:
        a -= 1
    while (a + 1) * (a + 1) <= v:
        a += 1
    return a


class SplitOracle:
    """Answers 'does Q represent n' via orthogonal-split witness search.

    Per splitting vector u and coset c, values decompose as
    n = base + d a^2 + lin a + w with w a value of a shifted complement form;
    the complement values are precomputed as bitmaps up to `cutoff`.  Queries
    are exact for n <= complete_below and sound-but-incomplete above (a True
    answer is always certified by a genuine witness; False above the line
    means "no witness found" and must be treated as unresolved).
    """

    def __init__(self, gram: list[list[int]], cutoff: int, max_splits: int = 3) -> None:
        self.gram = gram
        self.cutoff = cutoff
        r = len(gram)
        builder = BitmapBuilder()
        rows = []
        chunks: list[np.ndarray] = []
        margin = 0
        nsplits = 0
        seen_d = set()
        for u in _split_candidates(r):
            ug = mat_vec(gram, u)
            d = sum(u[i] * ug[i] for i in range(r)) // 2
            if d <= 0 or d in seen_d:
                continue
            basis_cols = kernel_basis([ug])
            if len(basis_cols) != r - 1:
                continue
            bmat = transpose(basis_cols)
            umat = [[u[i]] + bmat[i] for i in range(r)]
            f = abs(det(umat))
            if f == 0 or f > 16:
                continue
            seen_d.add(d)
            nsplits += 1
            g2 = mat_mul(transpose(bmat), mat_mul(gram, bmat))
            bt = transpose(bmat)
            split_margin = 0
            for c in coset_representatives(umat):
                gc = mat_vec(gram, c)
                base = _qvalue(gram, c)
                lin = sum(ug[i] * c[i] for i in range(r))
                shift_a = -(lin // (2 * d))
                base += d * shift_a * shift_a + lin * shift_a
                lin += 2 * d * shift_a
                h2 = [sum(bt[t][i] * gc[i] for i in range(r)) for t in range(r - 1)]
                svmin, swords, snbits = builder.value_bitmap(g2, h2, cutoff)
                rows.append((d, base, lin, svmin, snbits, sum(len(c_) for c_ in chunks)))
                chunks.append(swords)
                split_margin = max(split_margin, base + (lin * lin) // (4 * d) + 1)
            margin = split_margin if nsplits == 1 else min(margin, split_margin)
            if nsplits >= max_splits:
                break
        if not rows:
            raise ValueError("no usable splitting vector")
        self.complete_below = cutoff - margin
        self._d = np.array([t[0] for t in rows], dtype=np.int64)
        self._base = np.array([t[1] for t in rows], dtype=np.int64)
        self._lin = np.array([t[2] for t in rows], dtype=np.int64)
        self._svmin = np.array([t[3] for t in rows], dtype=np.int64)
        self._snbits = np.array([t[4] for t in rows], dtype=np.int64)
        self._woff = np.array([t[5] for t in rows], dtype=np.int64)
        self._words = (
            np.concatenate(chunks) if chunks else np.zeros(0, dtype=np.uint64)
        )

    def probe_many(self, ns: list[int] | np.ndarray) -> np.ndarray:
        """uint8 array: 1 where a witness was found."""
        arr = np.asarray(ns, dtype=np.int64)
        out = np.zeros(len(arr), dtype=np.uint8)
        if len(arr) == 0:
            return out
        if HAVE_NUMBA:
            _probe_kernel(
                arr, self._d, self._base, self._lin, self._svmin,
                self._snbits, self._woff, self._words, out,
            )
            return out
        for i, n in enumerate(arr):
            out[i] = 1 if self._probe_python(int(n)) else 0
        return out

    def probe(self, n: int) -> bool:
        return bool(self.probe_many([n])[0])

    def _probe_python(self, n: int) -> bool:
        for row in range(len(self._d)):
            d = int(self._d[row])
            base = int(self._base[row])
            lin = int(self._lin[row])
            svmin = int(self._svmin[row])
            snbits = int(self._snbits[row])
            woff = int(self._woff[row])
            if snbits <= 0:
                continue
            svmax = svmin + snbits - 1
            lo_t = n - base - svmax
            hi_t = n - base - svmin
            disc_hi = lin * lin + 4 * d * hi_t
            if disc_hi < 0:
                continue
            sq_hi = isqrt(disc_hi)
            outer_lo = -((lin + sq_hi) // (2 * d))
            outer_hi = (sq_hi - lin) // (2 * d)
            disc_lo = lin * lin + 4 * d * lo_t
            if disc_lo < 0:
                bands = [(outer_lo, outer_hi)]
            else:
                sq_lo = isqrt(disc_lo)
                gap_lo = (-lin - sq_lo) // (2 * d)
                gap_hi = -((lin - sq_lo) // (2 * d))
                bands = [
                    (outer_lo, min(gap_lo, outer_hi)),
                    (max(gap_hi, outer_lo), outer_hi),
                ]
            seen_first = bands[0]
            for bi, (a_lo, a_hi) in enumerate(bands):
                for a in range(a_lo, a_hi + 1):
                    if bi == 1 and seen_first[0] <= a <= seen_first[1]:
                        continue
                    w = n - base - (d * a * a + lin * a)
                    idx = w - svmin
                    if 0 <= idx < snbits and bit_test(
                        self._words[woff : woff + ((snbits + 63) // 64)], idx
                    ):
                        return True
        return False
