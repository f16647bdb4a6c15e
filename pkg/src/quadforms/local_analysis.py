"""Exact p-adic representation densities and analytic constants.

Local densities are computed from exact solution counts of Q(x) = n over
Z/p^k.  At odd p the form is diagonalized over the local ring Z_(p) and the
count is evaluated by a closed quadratic character-sum formula; at p = 2 the
form is split into unary/binary blocks whose value-count vectors are
convolved.  Representability over Z_2 (density > 0) is decided separately by
exact coset arithmetic on block value sets, which scales to arbitrary depth.
All routes return exact rationals and are cross-checked against each other
and against brute-force counting in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._exact import factorize, prime_factors, squarefree_part
from .forms_core import GramForm, TargetSet

try:
    from numba import njit

    HAVE_NUMBA = True
except Exception:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # type: ignore
        def wrap(f):
            return f

        return wrap(args[0]) if args and callable(args[0]) else wrap


class StabilizationError(ArithmeticError):
    """Raised when a counting density fails its depth-stabilization check."""


class LocallyObstructedError(ValueError):
    """Raised when a computation requires local representability that fails."""


# ---------------------------------------------------------------------------
# elementary number theory
# ---------------------------------------------------------------------------


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), defined for all integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if a < 0:
            sign = -sign
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t:
        if a % 2 == 0:
            return 0
        if t % 2 == 1 and a % 8 in (3, 5):
            sign = -sign
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                sign = -sign
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            sign = -sign
        a %= n
    return sign if n == 1 else 0


def _valuation(x: int, p: int) -> int:
    if x == 0:
        raise ValueError("valuation of zero")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _frac_valuation(a: Fraction, p: int) -> int:
    return _valuation(a.numerator, p) - _valuation(a.denominator, p)


def _frac_mod(a: Fraction, m: int) -> int:
    return (a.numerator * pow(a.denominator, -1, m)) % m


# ---------------------------------------------------------------------------
# local block decompositions (exact, over the localization at p)
# ---------------------------------------------------------------------------


def _sym_swap(m: list[list[Fraction]], i: int, j: int) -> None:
    if i == j:
        return
    m[i], m[j] = m[j], m[i]
    for row in m:
        row[i], row[j] = row[j], row[i]


def _sym_addmul(m: list[list[Fraction]], dst: int, src: int, c: Fraction) -> None:
    """Apply x_dst <- x_dst, basis col_dst += c*col_src symmetrically."""
    n = len(m)
    for t in range(n):
        m[t][dst] += c * m[t][src]
    for t in range(n):
        m[dst][t] += c * m[src][t]


def diagonalize_odd(gram: list[list[int]], p: int) -> list[Fraction]:
    """Coefficients a_i with Q ~ sum a_i x_i^2 over the localization at odd p."""
    assert p % 2 == 1
    r = len(gram)
    m = [[Fraction(v) for v in row] for row in gram]
    out: list[Fraction] = []
    for i in range(r):
        best = None
        for j in range(i, r):
            for l in range(j, r):
                if m[j][l] == 0:
                    continue
                v = _frac_valuation(m[j][l], p)
                if best is None or v < best[0]:
                    best = (v, j, l)
        assert best is not None
        _, j, l = best
        if j != l and all(
            m[t][t] == 0 or _frac_valuation(m[t][t], p) > best[0] for t in range(i, r)
        ):
            _sym_addmul(m, j, l, Fraction(1))
        elif j != l:
            j = next(
                t
                for t in range(i, r)
                if m[t][t] != 0 and _frac_valuation(m[t][t], p) <= best[0]
            )
        _sym_swap(m, i, j)
        piv = m[i][i]
        assert piv != 0
        for t in range(i + 1, r):
            if m[i][t] != 0:
                _sym_addmul(m, t, i, -m[i][t] / piv)
        out.append(piv / 2)
    return out


def two_adic_blocks(
    gram: list[list[int]],
) -> list[tuple[str, tuple[Fraction, ...]]]:
    """Split Q into unary a*x^2 and binary a*x^2+b*xy+c*y^2 blocks over Z_(2).

    All returned coefficients are rationals with odd denominator.
    """
    r = len(gram)
    m = [[Fraction(v) for v in row] for row in gram]
    out: list[tuple[str, tuple[Fraction, ...]]] = []
    i = 0
    while i < r:
        best = None
        for j in range(i, r):
            for l in range(j, r):
                if m[j][l] == 0:
                    continue
                v = _frac_valuation(m[j][l], 2)
                if best is None or v < best[0] or (v == best[0] and j == l and best[1] != best[2]):
                    best = (v, j, l)
        assert best is not None
        vmin, j, l = best
        diag_ok = None
        for t in range(i, r):
            if m[t][t] != 0 and _frac_valuation(m[t][t], 2) <= vmin:
                diag_ok = t
                break
        if diag_ok is not None:
            _sym_swap(m, i, diag_ok)
            piv = m[i][i]
            for t in range(i + 1, r):
                if m[i][t] != 0:
                    c = -m[i][t] / piv
                    assert _frac_valuation(c, 2) >= 0
                    _sym_addmul(m, t, i, c)
            out.append(("u", (piv / 2,)))
            i += 1
        else:
            _sym_swap(m, i, j)
            _sym_swap(m, i + 1, l if l != i else j)
            a, b, c = m[i][i], m[i][i + 1], m[i + 1][i + 1]
            dd = a * c - b * b
            assert dd != 0
            for t in range(i + 2, r):
                u, v = m[i][t], m[i + 1][t]
                c0 = -(c * u - b * v) / dd
                c1 = -(a * v - b * u) / dd
                assert _frac_valuation(c0, 2) >= 0 if c0 else True
                assert _frac_valuation(c1, 2) >= 0 if c1 else True
                if c0:
                    _sym_addmul(m, t, i, c0)
                if c1:
                    _sym_addmul(m, t, i + 1, c1)
            out.append(("b", (m[i][i] / 2, m[i][i + 1], m[i + 1][i + 1] / 2)))
            i += 2
    return out


# ---------------------------------------------------------------------------
# exact counting mod p^k
# ---------------------------------------------------------------------------


def count_diagonal_odd(avals: list[Fraction], n: int, p: int, k: int) -> int:
    """#{x mod p^k : sum a_i x_i^2 = n mod p^k} by exact character sums."""
    assert p % 2 == 1 and n != 0 and k >= 0
    if k == 0:
        return 1
    r = len(avals)
    eps = kronecker(-1, p)
    es: list[int] = []
    chis: list[int] = []
    for a in avals:
        e = _frac_valuation(a, p)
        assert e >= 0
        unit = a / Fraction(p) ** e
        chis.append(kronecker(_frac_mod(unit, p), p))
        es.append(e)
    valn, nn = 0, abs(n)
    while valn < k and nn % p == 0:
        nn //= p
        valn += 1
    nn = n // p**valn if valn < k else 1
    total = Fraction(p) ** (k * (r - 1))
    for m in range(1, k + 1):
        sel = [i for i in range(r) if es[i] < m]
        exp = k * r - sum((m - es[i] + 1) // 2 for i in sel)
        odd_sel = [i for i in sel if (m - es[i]) % 2 == 1]
        s = len(odd_sel)
        cu = 1
        for i in odd_sel:
            cu *= chis[i]
        if s % 2 == 0:
            if valn >= m:
                unit_sum: Fraction | int = Fraction(p) ** (m - 1) * (p - 1)
            elif valn == m - 1:
                unit_sum = -(Fraction(p) ** (m - 1))
            else:
                continue
            total += Fraction(p) ** (exp - k) * cu * (eps * p) ** (s // 2) * unit_sum
        else:
            if valn != m - 1:
                continue
            ch = kronecker((-nn) % p, p)
            total += (
                Fraction(p) ** (exp - k)
                * cu
                * ch
                * Fraction(p) ** (m - 1)
                * (eps * p) ** ((s + 1) // 2)
            )
    assert total.denominator == 1 and total >= 0, (avals, n, p, k, total)
    return int(total)


@njit(cache=True)
def _binary_block_counts(a, b, c, mask, dist):  # pragma: no cover
    m = mask + 1
    for x in range(m):
        ax2 = (a * x * x) & mask
        bx = (b * x) & mask
        for y in range(m):
            v = (ax2 + bx * y + c * y * y) & mask
            dist[v] += 1


def _binary_block_counts_python(a: int, b: int, c: int, mask: int, dist) -> None:
    m = mask + 1
    for x in range(m):
        ax2 = (a * x * x) & mask
        bx = (b * x) & mask
        for y in range(m):
            dist[(ax2 + bx * y + c * y * y) & mask] += 1


def count_blocks_two(blocks, n: int, k: int) -> int:
    """#{x mod 2^k : Q(x) = n mod 2^k} via block count-vector convolution."""
    assert k >= 0
    if k == 0:
        return 1
    m = 1 << k
    rank = sum(1 if kind == "u" else 2 for kind, _ in blocks)
    assert k * (rank - 1) < 62, "count would overflow the convolution kernel"
    assert k <= 14, "count-vector convolution capped at depth 2^14"
    dist: np.ndarray | None = None
    for kind, coefs in blocks:
        if kind == "u":
            am = _frac_mod(coefs[0], m)
            x = np.arange(m, dtype=np.int64)
            vals = (am * ((x * x) & (m - 1))) & (m - 1)
            bd = np.bincount(vals, minlength=m).astype(np.int64)
        else:
            assert k <= 16, "binary block enumeration capped at 2^32 pairs"
            am, bm, cm = (_frac_mod(cf, m) for cf in coefs)
            bd = np.zeros(m, dtype=np.int64)
            if HAVE_NUMBA:
                _binary_block_counts(am, bm, cm, m - 1, bd)
            else:
                _binary_block_counts_python(am, bm, cm, m - 1, bd)
        if dist is None:
            dist = bd
        else:
            full = np.convolve(dist, bd)
            dist = full[:m].copy()
            dist[: full.size - m] += full[m:]
    assert dist is not None
    return int(dist[n % m])


# ---------------------------------------------------------------------------
# 2-adic value sets as unions of cosets c + 2^s Z_2
# ---------------------------------------------------------------------------


def _add_coset(cosets: set[tuple[int, int]], s: int, c: int, cap: int) -> None:
    s = min(s, cap)
    cosets.add((s, c % (1 << s) if s else 0))


def _unary_value_cosets(a: Fraction, cap: int) -> set[tuple[int, int]]:
    """Value set of a*x^2 over Z_2 (as cosets mod 2^cap)."""
    e = _frac_valuation(a, 2)
    out: set[tuple[int, int]] = set()
    out.add((cap, 0))
    mu = 0
    while e + 2 * mu < cap:
        mm = 1 << min(e + 2 * mu + 3, cap)
        am = _frac_mod(a, mm)
        # unit squares are exactly 1 + 8 Z_2, so values with |x|_2 = 2^-mu
        # form the single coset a*4^mu + 2^(e+2mu+3) Z_2
        _add_coset(out, e + 2 * mu + 3, (am << (2 * mu)) % mm, cap)
        mu += 1
    return out


_BINARY_ENUM_BITS = 20


def _binary_value_cosets(
    coefs: tuple[Fraction, ...], cap: int
) -> set[tuple[int, int]]:
    """Value set of a*x^2+b*xy+c*y^2 with val(b) <= val(a), val(c).

    Sufficient for exactness: after scaling by 2^-val(b) the t-derivative
    b + 2*c*t of the unit-coordinate section w(t) stays a unit, so w maps the
    ball t0 + 2^J Z_2 onto exactly w(t0) + 2^J Z_2.  Enumerating t mod 2^J
    therefore yields the exact value set for ANY depth J: values whose
    2-valuation v satisfies v <= J - 3 close up into (v, unit mod 8) square
    classes (odd-square scaling stays inside), and each deeper value w0 is
    kept as the literal coset w0 + 2^J Z_2.  Capping J keeps memory and time
    bounded independently of how large cap gets for high-valuation
    determinants.
    """
    a, b, c = coefs
    e = _frac_valuation(b, 2)
    assert (a == 0 or _frac_valuation(a, 2) >= e) and (
        c == 0 or _frac_valuation(c, 2) >= e
    )
    an, bn, cn = a / 2**e, b / 2**e, c / 2**e
    out: set[tuple[int, int]] = {(cap, 0)}
    mu = 0
    while (mm := cap - e - 2 * mu) >= 1:
        depth = min(mm, _BINARY_ENUM_BITS)
        mod = 1 << depth
        mask = mod - 1
        am, bm, cm = (_frac_mod(cf, mod) for cf in (an, bn, cn))
        base = e + 2 * mu
        t = np.arange(mod, dtype=np.int64)
        for p0, p1, p2 in ((am, bm, cm), (cm, bm, am)):
            w = (p0 + ((p1 * t) & mask) + ((p2 * ((t * t) & mask)) & mask)) & mask
            nz = w[w != 0]
            deep: set[int] = {0} if nz.size < w.size else set()
            if nz.size:
                low = (nz & -nz).astype(np.int64)
                v = np.log2(low.astype(np.float64)).astype(np.int64)
                shallow = v <= depth - 3
                u8 = (nz[shallow] >> v[shallow]) & 7
                for key in np.unique(v[shallow] * 8 + u8):
                    vv, uu = int(key) // 8, int(key) % 8
                    _add_coset(out, base + vv + 3, (uu << vv) << base, cap)
                deep.update(int(w0) for w0 in np.unique(nz[~shallow]))
            for w0 in deep:
                _add_coset(out, base + depth, w0 << base, cap)
        mu += 1
    return out


def _coset_sumset(
    s1: set[tuple[int, int]], s2: set[tuple[int, int]], cap: int
) -> set[tuple[int, int]]:
    out: set[tuple[int, int]] = set()
    for a_s, a_c in s1:
        for b_s, b_c in s2:
            s = min(a_s, b_s)
            out.add((s, (a_c + b_c) % (1 << s)))
    # drop cosets absorbed by a coarser one
    pruned: set[tuple[int, int]] = set()
    for s, c in sorted(out):
        if not any(c % (1 << s2_) == c2 for s2_, c2 in pruned if s2_ < s):
            pruned.add((s, c))
    return pruned


def two_adic_value_cosets(form: GramForm, cap: int) -> set[tuple[int, int]]:
    """The set Q(Z_2^r), expressed exactly as a union of cosets c + 2^s Z_2.

    Valid for deciding membership of any n with val_2(n) <= cap - 3.
    """
    blocks = two_adic_blocks(form.matrix)
    total: set[tuple[int, int]] | None = None
    for kind, coefs in blocks:
        cs = (
            _unary_value_cosets(coefs[0], cap)
            if kind == "u"
            else _binary_value_cosets(coefs, cap)
        )
        total = cs if total is None else _coset_sumset(total, cs, cap)
    assert total is not None
    return total


def _cosets_contain(cosets: set[tuple[int, int]], n: int) -> bool:
    return any(n % (1 << s) == c for s, c in cosets)


# ---------------------------------------------------------------------------
# densities, obstructions, representability
# ---------------------------------------------------------------------------


def local_density(form: GramForm, n: int, p: int) -> Fraction:
    """beta_p(n) = lim #{x mod p^k: Q(x)=n} / p^(k(r-1)), computed exactly.

    Counts at depth k0 = ord_p(2 det) + ord_p(n) + 3 and at k0 + 1 must agree;
    otherwise StabilizationError is raised.
    """
    assert n != 0
    r = form.rank
    k0 = _valuation(2 * form.det, p) + _valuation_cap(n, p, 64) + 3
    if p == 2:
        blocks = two_adic_blocks(form.matrix)
        c1 = count_blocks_two(blocks, n, k0)
        c2 = count_blocks_two(blocks, n, k0 + 1)
    else:
        avals = diagonalize_odd(form.matrix, p)
        c1 = count_diagonal_odd(avals, n, p, k0)
        c2 = count_diagonal_odd(avals, n, p, k0 + 1)
    b1 = Fraction(c1, p ** (k0 * (r - 1)))
    b2 = Fraction(c2, p ** ((k0 + 1) * (r - 1)))
    if b1 != b2:
        raise StabilizationError(
            f"density at p={p}, n={n} not stabilized at depth {k0}"
        )
    return b1


def _valuation_cap(n: int, p: int, cap: int) -> int:
    v = 0
    nn = abs(n)
    while v < cap and nn % p == 0:
        nn //= p
        v += 1
    return v


def represents_over_zp(form: GramForm, n: int, p: int) -> bool:
    """Exact test of n in Q(Z_p^r) (equivalent to beta_p(n) > 0)."""
    assert n != 0
    if p == 2:
        cap = _valuation(2 * form.det, 2) + _valuation_cap(n, 2, 60) + 4
        return _cosets_contain(two_adic_value_cosets(form, cap), n)
    avals = diagonalize_odd(form.matrix, p)
    k0 = _valuation(2 * form.det, p) + _valuation_cap(n, p, 60) + 3
    return count_diagonal_odd(avals, n, p, k0) > 0


def locally_represents(form: GramForm, n: int) -> bool:
    """True iff n is represented over Z_p for every prime p (and over R)."""
    assert n != 0
    if n < 0:
        return False
    bad = 2 * form.det
    if form.rank <= 2:
        bad *= n
    return all(represents_over_zp(form, n, p) for p in prime_factors(bad))


@dataclass(frozen=True)
class SquareClass:
    """The p-adic square class of p^exponent * unit (unit mod 8 when p = 2)."""

    prime: int
    exponent: int
    unit: int

    def representative(self) -> int:
        return self.prime**self.exponent * self.unit

    def __str__(self) -> str:
        return f"{self.prime}^{self.exponent}*{self.unit}"


@dataclass(frozen=True)
class LocalObstruction:
    """A square class none of whose members the form represents over Z_p."""

    square_class: SquareClass

    @property
    def prime(self) -> int:
        return self.square_class.prime

    def smallest_member(self, target: TargetSet, bound: int = 10**7) -> int | None:
        q, v, u = (
            self.square_class.prime,
            self.square_class.exponent,
            self.square_class.unit,
        )
        step = q ** (v + (3 if q == 2 else 1))
        n = q**v * u
        while n <= bound:
            if target.contains(n) and _in_square_class(n, q, v, u):
                return n
            n += step
        return None


def _in_square_class(n: int, q: int, v: int, u: int) -> bool:
    if _valuation_cap(n, q, v + 2) != v:
        return False
    unit = n // q**v
    if q == 2:
        return unit % 8 == u % 8
    return kronecker(unit % q, q) == kronecker(u % q, q)


def _unit_class_reps(p: int) -> list[int]:
    if p == 2:
        return [1, 3, 5, 7]
    g = next(u for u in range(2, p) if kronecker(u, p) == -1)
    return [1, g]


def class_meets_target(
    q: int, v: int, u: int, target: TargetSet
) -> bool:
    """Does the square class contain a member of the target set?"""
    if target.kind == "all":
        return True
    if target.kind == "coprime":
        return all(v == 0 if pl == q else True for pl in prime_factors(target.modulus))
    # progression K mod M
    m, kres = target.modulus, target.residue
    o = _valuation_cap(m, q, 64)
    if o <= v:
        return kres % q**o == 0
    kq = kres % q**o
    if kq == 0 or _valuation_cap(kq, q, o) != v:
        return False
    unit = (kq // q**v) % q ** (o - v)
    if q == 2:
        depth = min(o - v, 3)
        return unit % (1 << depth) == u % (1 << depth)
    return kronecker(unit % q, q) == kronecker(u, q)


def obstructions(form: GramForm, target: TargetSet | None = None) -> list[LocalObstruction]:
    """All obstructed square classes at primes dividing 2*det, within the
    stabilization range exponent <= ord_q(4 det) + 2 (the pattern in the
    exponent is eventually 2-periodic beyond the last block scale)."""
    out: list[LocalObstruction] = []
    for q in prime_factors(2 * form.det):
        vmax = _valuation(4 * form.det, q) + 2
        if q == 2:
            cap = _valuation(2 * form.det, 2) + vmax + 4
            cosets = two_adic_value_cosets(form, cap)
            tester = lambda n: _cosets_contain(cosets, n)  # noqa: E731
        else:
            avals = diagonalize_odd(form.matrix, q)
            k_base = _valuation(2 * form.det, q) + 3
            tester = lambda n, av=avals, kb=k_base: (  # noqa: E731
                count_diagonal_odd(av, n, q, kb + _valuation_cap(n, q, 64)) > 0
            )
        for v in range(vmax + 1):
            for u in _unit_class_reps(q):
                if target is not None and not class_meets_target(q, v, u, target):
                    continue
                if not tester(q**v * u):
                    out.append(LocalObstruction(SquareClass(q, v, u)))
    return out


def is_locally_obstructed(
    form: GramForm, target: TargetSet
) -> LocalObstruction | None:
    obs = obstructions(form, target)
    return obs[0] if obs else None


# ---------------------------------------------------------------------------
# Dirichlet L(2, chi_D) and the analytic lower-bound constant
# ---------------------------------------------------------------------------


def fundamental_decomposition(d: int) -> tuple[int, int]:
    """d = d0 * f^2 with d0 a fundamental discriminant (d positive, 0/1 mod 4)."""
    assert d > 0 and d % 4 in (0, 1)
    s = squarefree_part(d)
    d0 = s if s % 4 == 1 else 4 * s
    rem, f2 = divmod(d, d0)
    assert f2 == 0, (d, d0)
    from math import isqrt

    f = isqrt(rem)
    assert f * f == rem, (d, d0)
    return d0, f


def bernoulli2_chi(d0: int) -> Fraction:
    """Generalized Bernoulli number B_{2,chi} for the character (d0|.)."""
    total = Fraction(0)
    for a in range(1, d0 + 1):
        ch = kronecker(d0, a)
        if ch:
            x = Fraction(a, d0)
            total += ch * (x * x - x + Fraction(1, 6))
    return d0 * total


def dirichlet_l2_exact(d: int) -> tuple[Fraction, int]:
    """(c, d0) with L(2, chi_d) = c * pi^2 / sqrt(d0), exactly (d > 0)."""
    d0, f = fundamental_decomposition(d)
    c = bernoulli2_chi(d0) / d0
    for ell in prime_factors(f):
        c *= 1 - Fraction(kronecker(d0, ell), ell * ell)
    return c, d0


def dirichlet_l2(d: int) -> float:
    """Numeric L(2, chi_d) via Hurwitz zeta values (independent route)."""
    import mpmath as mp

    q = abs(d)
    with mp.workdps(40):
        total = mp.mpf(0)
        for a in range(1, q + 1):
            ch = kronecker(d, a)
            if ch:
                total += ch * mp.zeta(2, mp.mpf(a) / q)
        return float(total / q**2)


def _chi_factor(d: int, q: int) -> Fraction:
    return 1 - Fraction(kronecker(d, q), q * q)


def eisenstein_constant(form: GramForm, target: TargetSet) -> Fraction:
    """Exact rational constant C with r_E(n) >= C * n for eligible targets n.

    Rank-4 only.  Minimizes the finite product of normalized bad-prime
    densities over local classes compatible with the target, with the prime
    exponent ranging up to ord_q of twice the level (exponent 0 is forced at
    primes excluded by the target).  Raises LocallyObstructedError if some bad
    prime admits no represented class.
    """
    assert form.rank == 4
    d = form.det
    d0, f = fundamental_decomposition(d)
    # archimedean factor pi^2 n / sqrt(det(A)/16), as in siegel_expected
    lead = 4 * Fraction(d0, f) / bernoulli2_chi(d0)
    for ell in prime_factors(f):
        lead /= _chi_factor(d0, ell)
    prod = Fraction(1)
    for q in prime_factors(2 * form.level):
        best: Fraction | None = None
        for e in range(_valuation(2 * form.level, q) + 1):
            for u in _unit_class_reps(q):
                if not class_meets_target(q, e, u, target):
                    continue
                beta = local_density(form, q**e * u, q)
                if beta <= 0:
                    continue
                val = beta / _chi_factor(d, q)
                if best is None or val < best:
                    best = val
        if best is None:
            raise LocallyObstructedError(
                f"no represented target-compatible square class at q={q}"
            )
        prod *= best
    return lead * prod


def good_prime_density(p: int, n: int, disc: int) -> Fraction:
    """Closed-form beta_p(n) for rank 4 at p odd, p coprime to disc and level.

    Covers p coprime to n and p exactly dividing n.
    """
    assert p % 2 == 1 and disc % p != 0
    chi = kronecker(disc, p)
    v = _valuation_cap(n, p, 2)
    if v == 0:
        return 1 - Fraction(chi, p * p)
    if v == 1:
        return Fraction((p - 1) * (p * p + (1 + chi) * p + 1), p**3)
    raise ValueError("closed form implemented only for ord_p(n) <= 1")


def siegel_expected(form: GramForm, n: int) -> Fraction:
    """Exact genus-average representation count of n (rank 4).

    The archimedean factor is pi^2 n / sqrt(det(A)/16) for the doubled Gram
    convention used here, whence the leading 4.
    """
    assert form.rank == 4 and n > 0
    d = form.det
    d0, f = fundamental_decomposition(d)
    lead = 4 * Fraction(n, 1) * Fraction(d0, f) / bernoulli2_chi(d0)
    for ell in prime_factors(f):
        lead /= _chi_factor(d0, ell)
    for q in sorted(prime_factors(2 * d * n)):
        lead *= local_density(form, n, q) / _chi_factor(d, q)
    return lead


@dataclass(frozen=True)
class DensityProfile:
    """Local densities of one target at every prime dividing 2*det."""

    form: GramForm
    target_value: int
    densities: tuple[tuple[int, Fraction], ...]

    @property
    def locally_represented(self) -> bool:
        return all(b > 0 for _, b in self.densities)


def local_profile(form: GramForm, n: int) -> DensityProfile:
    entries = tuple(
        (p, local_density(form, n, p)) for p in prime_factors(2 * form.det)
    )
    return DensityProfile(form, n, entries)


def genus_average_theta(
    forms: list[GramForm], bound: int
) -> list[Fraction]:
    """Automorphism-weighted average of representation counts up to bound."""
    from .forms_core import theta_prefix
    from .isometry import automorphisms

    weights = [Fraction(1, automorphisms(f).order) for f in forms]
    total = sum(weights)
    out = [Fraction(0)] * (bound + 1)
    for f, w in zip(forms, weights):
        th = theta_prefix(f, bound)
        for i in range(bound + 1):
            out[i] += (w / total) * th[i]
    return out
