"""Core types and operations for positive definite integral quadratic forms.

A form in r variables is Q(x) = (1/2) x^T A x where A is a symmetric integer
matrix with even diagonal (A_ii = 2 * coefficient of x_i^2, A_ij = coefficient
of x_i x_j for i < j).  "Classical" forms are those whose off-diagonal entries
are all even.  All arithmetic is exact.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from . import _enum
from ._exact import (
    adjugate,
    det,
    is_positive_definite,
    kernel_basis,
    leading_minors,
    mat_mul,
    transpose,
)

VARIABLE_NAMES = ("x", "y", "z", "w")


def _variable(index: int) -> str:
    return VARIABLE_NAMES[index] if index < 4 else f"v{index - 3}"


def _variable_index(name: str) -> int:
    if name in VARIABLE_NAMES:
        return VARIABLE_NAMES.index(name)
    if name.startswith("v") and name[1:].isdigit():
        return 3 + int(name[1:])
    raise ValueError(f"unknown variable {name!r}")


@dataclass(frozen=True)
class GramForm:
    """Immutable positive definite even-diagonal Gram matrix."""

    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        g = self.gram
        r = len(g)
        for i in range(r):
            if len(g[i]) != r:
                raise ValueError("gram matrix must be square")
            if g[i][i] % 2 or g[i][i] <= 0:
                raise ValueError("diagonal entries must be positive and even")
            for j in range(r):
                if g[i][j] != g[j][i]:
                    raise ValueError("gram matrix must be symmetric")
        if r and not is_positive_definite([list(row) for row in g]):
            raise ValueError("form is not positive definite")

    @staticmethod
    def from_rows(rows: list[list[int]]) -> "GramForm":
        return GramForm(tuple(tuple(int(v) for v in row) for row in rows))

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def matrix(self) -> list[list[int]]:
        return [list(row) for row in self.gram]

    @property
    def det(self) -> int:
        return _cached_det(self.gram)

    @property
    def disc(self) -> int:
        return self.det

    @property
    def level(self) -> int:
        return _cached_level(self.gram)

    @property
    def is_classical(self) -> bool:
        return all(
            self.gram[i][j] % 2 == 0
            for i in range(self.rank)
            for j in range(i + 1, self.rank)
        )

    def __str__(self) -> str:
        return format_form(self)

    def __repr__(self) -> str:
        return f"GramForm({format_form(self)!r})"


ThetaPrefix = tuple[int, ...]


@lru_cache(maxsize=200000)
def _cached_det(gram: tuple[tuple[int, ...], ...]) -> int:
    return det([list(row) for row in gram])


@lru_cache(maxsize=65536)
def _cached_level(gram: tuple[tuple[int, ...], ...]) -> int:
    a = [list(row) for row in gram]
    r = len(a)
    if r == 0:
        return 1
    d = det(a)
    adj = adjugate(a)
    level = 1
    for i in range(r):
        for j in range(r):
            bound = 2 * d if i == j else d
            g = gcd(bound, adj[i][j])
            need = abs(bound // g)
            level = level // gcd(level, need) * need
    return level


@lru_cache(maxsize=65536)
def _cached_context(gram: tuple[tuple[int, ...], ...]) -> _enum.EnumContext:
    return _enum.make_context([list(row) for row in gram])


def enum_context(form: GramForm) -> _enum.EnumContext:
    return _cached_context(form.gram)


# ---------------------------------------------------------------------------
# target sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TargetSet:
    """The positive integers a form is asked to represent.

    kind "all": every n >= 1; "coprime": n with gcd(n, modulus) == 1;
    "progression": n == residue (mod modulus).
    """

    kind: str
    modulus: int = 1
    residue: int = 0

    @staticmethod
    def all_integers() -> "TargetSet":
        return TargetSet("all")

    @staticmethod
    def coprime_to(p: int) -> "TargetSet":
        if p < 1:
            raise ValueError("modulus must be positive")
        return TargetSet("coprime", p)

    @staticmethod
    def progression(modulus: int, residue: int) -> "TargetSet":
        if modulus < 1:
            raise ValueError("modulus must be positive")
        return TargetSet("progression", modulus, residue % modulus)

    @staticmethod
    def parse(text: str) -> "TargetSet":
        text = text.strip()
        if text in ("all", "All", ""):
            return TargetSet.all_integers()
        if text.startswith("coprime:"):
            return TargetSet.coprime_to(int(text.split(":")[1]))
        if text.startswith("progression:"):
            _, m, k = text.split(":")
            return TargetSet.progression(int(m), int(k))
        raise ValueError(f"cannot parse target set {text!r}")

    def contains(self, n: int) -> bool:
        if n < 1:
            return False
        if self.kind == "all":
            return True
        if self.kind == "coprime":
            return gcd(n, self.modulus) == 1
        return n % self.modulus == self.residue

    def members(self, bound: int) -> list[int]:
        return [n for n in range(1, bound + 1) if self.contains(n)]

    def describe(self) -> str:
        if self.kind == "all":
            return "all"
        if self.kind == "coprime":
            return f"coprime:{self.modulus}"
        return f"progression:{self.modulus}:{self.residue}"


@dataclass(frozen=True)
class RepresentationReport:
    """Result of an exception scan of one form against one target set."""

    form: GramForm
    target: TargetSet
    bound: int
    exceptions: tuple[int, ...]

    @property
    def truant(self) -> int | None:
        return self.exceptions[0] if self.exceptions else None

    @property
    def is_universal_up_to_bound(self) -> bool:
        return not self.exceptions


# ---------------------------------------------------------------------------
# parsing / formatting
# ---------------------------------------------------------------------------

_TERM_RE = re.compile(r"^(\d+)?((?:\*?[a-z]\d*(?:\^2)?)*)$")
_FACTOR_RE = re.compile(r"([a-z]\d*)(\^2)?")


def parse_form(text: str) -> GramForm:
    """Parse either the Gram serialization "r; a11 .. a1r; a22 .. a2r; .."
    or a polynomial like "x^2 + x*z + 2*y^2 - 3*y*z + 7*z^2"."""
    text = text.strip()
    if text == "0":
        return GramForm.from_rows([])
    if ";" in text:
        return _parse_gram(text)
    return _parse_polynomial(text)


def _parse_gram(text: str) -> GramForm:
    parts = [p.strip() for p in text.split(";")]
    r = int(parts[0])
    rows = [[int(v) for v in p.split()] for p in parts[1:] if p]
    if len(rows) != r or any(len(rows[i]) != r - i for i in range(r)):
        raise ValueError(f"malformed gram serialization {text!r}")
    a = [[0] * r for _ in range(r)]
    for i in range(r):
        for k, v in enumerate(rows[i]):
            a[i][i + k] = v
            a[i + k][i] = v
    return GramForm.from_rows(a)


def _parse_polynomial(text: str) -> GramForm:
    s = text.replace(" ", "").replace("**2", "^2")
    s = s.replace("²", "^2").replace("−", "-").replace("–", "-")
    if not s:
        raise ValueError("empty form")
    if s[0] not in "+-":
        s = "+" + s
    terms = re.findall(r"[+-][^+-]+", s)
    if "".join(terms) != s:
        raise ValueError(f"cannot tokenize {text!r}")
    entries: dict[tuple[int, int], int] = {}
    max_index = -1
    for term in terms:
        sign = -1 if term[0] == "-" else 1
        body = term[1:]
        m = _TERM_RE.match(body)
        if not m or not m.group(2):
            raise ValueError(f"cannot parse term {term!r}")
        coeff = sign * int(m.group(1) or 1)
        factors = _FACTOR_RE.findall(m.group(2))
        indices: list[int] = []
        for name, sq in factors:
            idx = _variable_index(name)
            indices.extend([idx, idx] if sq else [idx])
        if len(indices) != 2:
            raise ValueError(f"term {term!r} is not quadratic")
        i, j = sorted(indices)
        entries[(i, j)] = entries.get((i, j), 0) + coeff
        max_index = max(max_index, j)
    r = max_index + 1
    a = [[0] * r for _ in range(r)]
    for (i, j), c in entries.items():
        if i == j:
            a[i][i] = 2 * c
        else:
            a[i][j] += c
            a[j][i] += c
    return GramForm.from_rows(a)


def format_form(form: GramForm, style: str = "gram") -> str:
    if style == "gram":
        r = form.rank
        rows = [
            " ".join(str(form.gram[i][j]) for j in range(i, r)) for i in range(r)
        ]
        return "; ".join([str(r)] + rows) if r else "0"
    if style != "polynomial":
        raise ValueError(f"unknown style {style!r}")
    r = form.rank
    parts: list[str] = []
    for i in range(r):
        _append_term(parts, form.gram[i][i] // 2, _variable(i), square=True)
        for j in range(i + 1, r):
            _append_term(
                parts, form.gram[i][j], f"{_variable(i)}*{_variable(j)}", square=False
            )
    return " ".join(parts) if parts else "0"


def _append_term(parts: list[str], coeff: int, var: str, square: bool) -> None:
    if coeff == 0:
        return
    sign = "-" if coeff < 0 else "+"
    mag = abs(coeff)
    body = f"{var}^2" if square else var
    if mag != 1:
        body = f"{mag}*{body}"
    if not parts:
        parts.append(body if coeff > 0 else f"-{body}")
    else:
        parts.append(sign)
        parts.append(body)


# ---------------------------------------------------------------------------
# evaluation / representation
# ---------------------------------------------------------------------------


def evaluate(form: GramForm, x: list[int] | tuple[int, ...]) -> int:
    g = form.gram
    r = form.rank
    if len(x) != r:
        raise ValueError("dimension mismatch")
    total = 0
    for i in range(r):
        total += g[i][i] * x[i] * x[i]
        for j in range(i + 1, r):
            total += 2 * g[i][j] * x[i] * x[j]
    if total % 2:
        raise AssertionError("even-diagonal form produced odd double value")
    return total // 2


def theta_prefix(form: GramForm, bound: int) -> ThetaPrefix:
    """Representation counts (r(0), r(1), ..., r(bound))."""
    counts = _enum.theta_counts(enum_context(form), bound) if form.rank else None
    if form.rank == 0:
        return tuple([1] + [0] * bound)
    return tuple(int(c) for c in counts)


def represents(form: GramForm, n: int) -> bool:
    if n == 0:
        return True
    if n < 0 or form.rank == 0:
        return False
    return _enum.represents_value(enum_context(form), n)


_BITMAP_VECTOR_THRESHOLD = 3 * 10**7


def _use_bitmap(form: GramForm, bound: int) -> bool:
    if form.rank < 3:
        return False
    if bound >= 1024:
        # the split-bitmap cost is nearly determinant-independent and beats
        # direct enumeration well before the vector count gets large
        return True
    est = (2 * bound) ** (form.rank / 2) / max(isqrt(form.det), 1)
    return est > _BITMAP_VECTOR_THRESHOLD


def represented_set(form: GramForm, bound: int) -> np.ndarray:
    """Boolean array b with b[n] true iff the form represents n, 0 <= n <= bound."""
    if form.rank == 0:
        out = np.zeros(bound + 1, dtype=bool)
        out[0] = True
        return out
    if _use_bitmap(form, bound):
        from . import _bitmap

        return _bitmap.represented_bitmap(form.matrix, bound)
    counts = _enum.theta_counts(enum_context(form), bound)
    return np.asarray(counts) > 0


def exceptions(form: GramForm, target: TargetSet, bound: int) -> list[int]:
    """Sorted target members in [1, bound] the form fails to represent."""
    rep = represented_set(form, bound)
    return [n for n in range(1, bound + 1) if target.contains(n) and not rep[n]]


def exception_report(form: GramForm, target: TargetSet, bound: int) -> RepresentationReport:
    return RepresentationReport(form, target, bound, tuple(exceptions(form, target, bound)))


def default_truant_bound(rank: int) -> int:
    return 1000 if rank <= 3 else 10000


def truant(form: GramForm, target: TargetSet, bound: int | None = None) -> int | None:
    """Smallest target member in [1, bound] not represented, else None."""
    if bound is None:
        bound = default_truant_bound(form.rank)
    if form.rank == 0:
        first = [n for n in range(1, bound + 1) if target.contains(n)]
        return first[0] if first else None
    # cheap head window first: most truants are tiny, and the window costs far
    # less than a full represented-set scan when it hits
    head = min(bound, 64)
    counts = _enum.theta_counts(enum_context(form), head)
    for n in range(1, head + 1):
        if target.contains(n) and counts[n] == 0:
            return n
    if head == bound:
        return None
    rep = represented_set(form, bound)
    for n in range(head + 1, bound + 1):
        if target.contains(n) and not rep[n]:
            return n
    return None


# ---------------------------------------------------------------------------
# form-represents-form (sublattice embeddings)
# ---------------------------------------------------------------------------


def short_vector_table(form: GramForm, max_norm: int) -> dict[int, list[tuple[int, ...]]]:
    """norm -> all vectors of that norm (both signs), 1 <= norm <= max_norm."""
    table: dict[int, list[tuple[int, ...]]] = {}
    for vec, norm in _enum.short_vectors(form.matrix, max_norm):
        table.setdefault(norm, []).append(vec)
    return table


def represents_form(
    host: GramForm, guest: GramForm, all_embeddings: bool = False
) -> list[list[list[int]]]:
    """Integer matrices X (host.rank x guest.rank) with X^T A X = B.

    Returns [] if the host does not represent the guest; with
    all_embeddings=False at most one embedding is returned.
    """
    b = guest.gram
    rg = guest.rank
    if rg == 0:
        return [[[]]]
    max_norm = max(b[j][j] for j in range(rg)) // 2
    table = short_vector_table(host, max_norm)
    a = host.matrix
    found: list[list[list[int]]] = []
    cols: list[tuple[int, ...]] = []
    adots: list[list[int]] = []  # A @ v for chosen columns

    def rec(j: int) -> bool:
        if j == rg:
            found.append([list(col) for col in zip(*cols)])
            return not all_embeddings
        for v in table.get(b[j][j] // 2, []):
            ok = True
            for k in range(j):
                if sum(adots[k][t] * v[t] for t in range(host.rank)) != b[k][j]:
                    ok = False
                    break
            if not ok:
                continue
            cols.append(v)
            adots.append([sum(a[i][t] * v[t] for t in range(host.rank)) for i in range(host.rank)])
            if rec(j + 1):
                return True
            cols.pop()
            adots.pop()
        return False

    rec(0)
    return found


def orthogonal_complement(
    host: GramForm, embedding: list[list[int]]
) -> tuple[list[list[int]], GramForm]:
    """Basis (columns) and Gram form of {v : x^T A v = 0 for embedded x}."""
    a = host.matrix
    xt = transpose(embedding)
    constraints = mat_mul(xt, a)
    basis_cols = kernel_basis(constraints)
    bmat = transpose(basis_cols)  # columns are basis vectors -> matrix r x k
    gram = mat_mul(transpose(bmat), mat_mul(a, bmat))
    return bmat, GramForm.from_rows(gram)
