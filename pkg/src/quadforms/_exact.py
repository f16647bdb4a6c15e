"""Exact integer linear algebra helpers (arbitrary precision).

Everything here works on plain Python ints (or Fractions internally) so the
results are exact regardless of matrix size.  Matrices are lists of lists,
row-major.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, isqrt


def mat_copy(a: list[list[int]]) -> list[list[int]]:
    return [row[:] for row in a]


def identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(m):
                    oi[j] += c * bt[j]
    return out


def mat_vec(a: list[list[int]], v: list[int]) -> list[int]:
    return [sum(a[i][j] * v[j] for j in range(len(v))) for i in range(len(a))]


def transpose(a: list[list[int]]) -> list[list[int]]:
    return [list(col) for col in zip(*a)] if a else []


def det(a: list[list[int]]) -> int:
    """Determinant by fraction-free Bareiss elimination with row pivoting."""
    n = len(a)
    if n == 0:
        return 1
    m = mat_copy(a)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def leading_minors(a: list[list[int]]) -> list[int]:
    """Determinants of the leading principal k x k submatrices, k = 1..n."""
    n = len(a)
    return [det([row[: k + 1] for row in a[: k + 1]]) for k in range(n)]


def is_positive_definite(a: list[list[int]]) -> bool:
    return all(d > 0 for d in leading_minors(a))


def minor(a: list[list[int]], i: int, j: int) -> int:
    sub = [row[:j] + row[j + 1 :] for k, row in enumerate(a) if k != i]
    return det(sub)


def adjugate(a: list[list[int]]) -> list[list[int]]:
    """adj(a) with a @ adj(a) == det(a) * I."""
    n = len(a)
    return [
        [(-1) ** (i + j) * minor(a, j, i) for j in range(n)] for i in range(n)
    ]


def ldl_decomposition(a: list[list[int]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """A = U^T D U with U unit upper triangular; returns (diag(D), U).

    Requires all leading principal minors nonzero (positive definite is fine).
    """
    n = len(a)
    u = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
    d: list[Fraction] = [Fraction(0)] * n
    work = [[Fraction(x) for x in row] for row in a]
    for i in range(n):
        d[i] = work[i][i] - sum(d[k] * u[k][i] * u[k][i] for k in range(i))
        if d[i] == 0:
            raise ValueError("singular leading principal submatrix")
        for j in range(i + 1, n):
            s = work[i][j] - sum(d[k] * u[k][i] * u[k][j] for k in range(i))
            u[i][j] = s / d[i]
    return d, u


def column_hnf(a: list[list[int]]) -> tuple[list[list[int]], list[list[int]]]:
    """Column-style Hermite form: returns (h, w) with h = a @ w, w unimodular.

    h is lower column echelon: pivots move left-to-right down the rows,
    entries right of a pivot are zero, entries left of it are reduced into
    [0, pivot).
    """
    rows = len(a)
    cols = len(a[0]) if rows else 0
    h = mat_copy(a)
    w = identity(cols)

    def col_op(j1: int, j2: int, x: int, y: int, z: int, t: int) -> None:
        # (col j1, col j2) <- (x*col j1 + y*col j2, z*col j1 + t*col j2)
        for m in (h, w):
            for r in range(len(m)):
                c1, c2 = m[r][j1], m[r][j2]
                m[r][j1] = x * c1 + y * c2
                m[r][j2] = z * c1 + t * c2

    pivot_col = 0
    for row in range(rows):
        if pivot_col >= cols:
            break
        # clear row entries in columns > pivot_col via gcd combinations
        for j in range(pivot_col + 1, cols):
            if h[row][j] == 0:
                continue
            p, q = h[row][pivot_col], h[row][j]
            g = gcd(p, q)
            # extended gcd: u*p + v*q = g
            u0, v0 = _ext_gcd(p, q)
            col_op(pivot_col, j, u0, v0, -(q // g), p // g)
        if h[row][pivot_col] == 0:
            continue
        if h[row][pivot_col] < 0:
            for m in (h, w):
                for r in range(len(m)):
                    m[r][pivot_col] = -m[r][pivot_col]
        # reduce columns to the left against this pivot
        piv = h[row][pivot_col]
        for j in range(pivot_col):
            q = h[row][j] // piv
            if q:
                for m in (h, w):
                    for r in range(len(m)):
                        m[r][j] -= q * m[r][pivot_col]
        pivot_col += 1
    return h, w


def _ext_gcd(p: int, q: int) -> tuple[int, int]:
    """(u, v) with u*p + v*q = gcd(p, q)."""
    old_r, r = p, q
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    if old_r < 0:
        old_s, old_t = -old_s, -old_t
    return old_s, old_t


def kernel_basis(a: list[list[int]]) -> list[list[int]]:
    """Basis (as column vectors) of {v integer : a @ v = 0}; saturated."""
    cols = len(a[0]) if a else 0
    h, w = column_hnf(a)
    basis = []
    for j in range(cols):
        if all(h[i][j] == 0 for i in range(len(h))):
            basis.append([w[i][j] for i in range(cols)])
    return basis


def solve_integer(a: list[list[int]], b: list[int]) -> list[int] | None:
    """One integer solution x of a @ x = b, or None."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    h, w = column_hnf(a)
    x_h = [0] * cols
    resid = b[:]
    used = set()
    for i in range(rows):
        j = next((c for c in range(cols) if c not in used and h[i][c] != 0), None)
        if j is None:
            if resid[i] != 0:
                return None
            continue
        if resid[i] % h[i][j] != 0:
            return None
        t = resid[i] // h[i][j]
        x_h[j] = t
        used.add(j)
        for r in range(rows):
            resid[r] -= t * h[r][j]
    if any(resid):
        return None
    return mat_vec(w, x_h)


def coset_representatives(u: list[list[int]]) -> list[list[int]]:
    """Representatives of Z^r modulo the column lattice of the full-rank r x r
    integer matrix u (there are |det u| of them)."""
    r = len(u)
    h, _ = column_hnf(u)
    # h is lower column echelon and square full rank -> lower triangular
    reps: list[list[int]] = [[0] * r]
    for i in range(r):
        piv = h[i][i]
        new_reps = []
        for rep in reps:
            for k in range(piv):
                cand = rep[:]
                cand[i] += k
                # reduce later coordinates only at the end; box reps suffice
                new_reps.append(cand)
        reps = new_reps
    return reps


def prime_factors(n: int) -> list[int]:
    """Sorted distinct prime factors of |n|."""
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| as {p: exponent}."""
    n = abs(n)
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    n = abs(n)
    d = 2
    while d * d <= n:
        if n % (d * d) == 0:
            return False
        if n % d == 0:
            n //= d
        d += 1 if d == 2 else 2
    return True


def squarefree_part(n: int) -> int:
    """The squarefree integer s with n = s * (square), preserving sign."""
    if n == 0:
        return 0
    sign = -1 if n < 0 else 1
    s = 1
    for p, e in factorize(n).items():
        if e % 2:
            s *= p
    return sign * s


def perfect_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n
