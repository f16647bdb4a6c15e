"""Isometry testing, canonical forms, automorphism groups, deduplication.

Two forms are (globally, integrally) isometric when some unimodular change of
basis carries one Gram matrix to the other.  The canonical form used here is
defined through the form itself, not through any particular basis: take the
smallest bound b such that the vectors of norm <= b contain a unimodular
basis, then the canonical Gram is the lexicographically least U^T A U over
ordered unimodular bases drawn from that vector set (column-major upper
triangle order).  Isometric forms see the same vector geometry, so they get
the same canonical Gram; the DFS witness makes the equivalence effective.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _enum
from ._exact import column_hnf
from ._exact import det as exact_det
from ._exact import mat_mul, transpose
from .forms_core import GramForm, theta_prefix

THETA_PREFILTER_BOUND = 16


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical representative plus a witness transform."""

    form: GramForm
    transform: tuple[tuple[int, ...], ...]  # U with U^T A U == canonical


@dataclass(frozen=True)
class AutomorphismGroup:
    """All unimodular self-isometries of a form."""

    order: int
    generators: tuple[tuple[tuple[int, ...], ...], ...]


def gram_key(gram: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    """Column-major upper-triangle flattening used for all lexicographic
    comparisons of Gram matrices."""
    r = len(gram)
    out = []
    for j in range(r):
        for i in range(j + 1):
            out.append(gram[i][j])
    return tuple(out)


# ---------------------------------------------------------------------------
# greedy basis reduction (cheap, not canonical)
# ---------------------------------------------------------------------------


def greedy_reduce(gram: list[list[int]]) -> list[list[int]]:
    """Repeatedly shorten basis vectors against each other; exact and fast.

    The result depends only on deterministic choices, shrinks entries a lot,
    and is used to cheapen duplicate detection -- equality of reduced Grams
    implies isometry, never the converse.
    """
    r = len(gram)
    a = [row[:] for row in gram]
    changed = True
    while changed:
        changed = False
        for i in range(r):
            for j in range(r):
                if i == j or a[j][j] == 0:
                    continue
                q = (2 * a[i][j] + a[j][j]) // (2 * a[j][j])
                if q == 0:
                    continue
                new_ii = a[i][i] - 2 * q * a[i][j] + q * q * a[j][j]
                if new_ii < a[i][i]:
                    # b_i <- b_i - q b_j
                    for k in range(r):
                        if k != i:
                            a[i][k] -= q * a[j][k]
                            a[k][i] = a[i][k]
                    a[i][i] = new_ii
                    changed = True
    # normalize ordering by diagonal then rows, and the sign of each vector
    order = sorted(range(r), key=lambda i: (a[i][i], [abs(a[i][k]) for k in range(r)]))
    a = [[a[i][j] for j in order] for i in order]
    for i in range(r):
        for j in range(i + 1, r):
            if a[i][j] != 0:
                if a[i][j] < 0:
                    for k in range(r):
                        if k != j:
                            a[j][k] = -a[j][k]
                            a[k][j] = a[j][k]
                break
    return a


# ---------------------------------------------------------------------------
# backtracking isometry search
# ---------------------------------------------------------------------------


def _norm_table(form: GramForm, max_norm: int) -> dict[int, list[tuple[int, ...]]]:
    table: dict[int, list[tuple[int, ...]]] = {}
    for vec, norm in _enum.short_vectors(form.matrix, max_norm):
        table.setdefault(norm, []).append(vec)
    return table


def _embedding_dfs(
    host: GramForm,
    target_gram: tuple[tuple[int, ...], ...],
    collect_all: bool,
) -> list[list[list[int]]]:
    """All (or first) integer U with U^T A_host U == target_gram."""
    b = target_gram
    r = len(b)
    rh = host.rank
    a = host.matrix
    table = _norm_table(host, max(b[j][j] for j in range(r)) // 2)
    out: list[list[list[int]]] = []
    cols: list[tuple[int, ...]] = []
    adots: list[list[int]] = []

    def rec(j: int) -> bool:
        if j == r:
            u = [[cols[c][i] for c in range(r)] for i in range(rh)]
            out.append(u)
            return not collect_all
        for v in table.get(b[j][j] // 2, []):
            ok = True
            for k in range(j):
                if sum(adots[k][t] * v[t] for t in range(rh)) != b[k][j]:
                    ok = False
                    break
            if not ok:
                continue
            cols.append(v)
            adots.append([sum(a[i][t] * v[t] for t in range(rh)) for i in range(rh)])
            if rec(j + 1):
                return True
            cols.pop()
            adots.pop()
        return False

    rec(0)
    return out


def isometric(f: GramForm, g: GramForm) -> list[list[int]] | None:
    """A unimodular M with M^T A_f M == A_g, or None."""
    if f.rank != g.rank:
        return None
    if f.det != g.det:
        return None
    if f.gram == g.gram:
        return [[1 if i == j else 0 for j in range(f.rank)] for i in range(f.rank)]
    if theta_prefix(f, THETA_PREFILTER_BOUND) != theta_prefix(g, THETA_PREFILTER_BOUND):
        return None
    found = _embedding_dfs(f, g.gram, collect_all=False)
    if not found:
        return None
    m = found[0]
    assert abs(exact_det(m)) == 1
    return m


def automorphisms(form: GramForm) -> AutomorphismGroup:
    """The full automorphism group (every element listed)."""
    if form.rank == 0:
        return AutomorphismGroup(1, (((),),))
    els = _embedding_dfs(form, form.gram, collect_all=True)
    mats = tuple(tuple(tuple(row) for row in m) for m in els)
    assert len(mats) >= 2 or form.rank == 0  # -I is always present
    return AutomorphismGroup(len(mats), mats)


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------


def _spanning_bound(form: GramForm) -> tuple[int, list[tuple[int, ...]]]:
    """Smallest b with a unimodular basis among vectors of norm <= b."""
    r = form.rank
    hi = max(form.gram[i][i] for i in range(r)) // 2
    vecs = sorted(
        _enum.short_vectors(form.matrix, hi), key=lambda t: (t[1], t[0])
    )
    norms = sorted({n for _, n in vecs})
    for b in norms:
        subset = [v for v, n in vecs if n <= b]
        if len(subset) < r:
            continue
        h, _ = column_hnf(transpose([list(v) for v in subset]))
        prod = 1
        for i in range(r):
            prod *= h[i][i]
        if abs(prod) == 1:
            return b, subset
    raise AssertionError("standard basis vectors must span")  # unreachable


def canonicalize(form: GramForm) -> CanonicalForm:
    """Deterministic canonical Gram; equal iff forms are isometric."""
    r = form.rank
    if r == 0:
        return CanonicalForm(form, ())
    bound, vecs = _spanning_bound(form)
    a = form.matrix
    adot = {v: tuple(sum(a[i][t] * v[t] for t in range(r)) for i in range(r)) for v in vecs}
    vecs = sorted(vecs, key=lambda v: (sum(x * y for x, y in zip(adot[v], v)), v))
    best_key: list[int] | None = None
    best_cols: list[tuple[int, ...]] | None = None
    cols: list[tuple[int, ...]] = []
    key: list[int] = []

    def independent(v: tuple[int, ...]) -> bool:
        m = [list(c) for c in cols] + [list(v)]
        # rank via exact elimination on a small matrix
        mm = [row[:] for row in m]
        rank = 0
        ccol = 0
        while rank < len(mm) and ccol < r:
            piv = next((k for k in range(rank, len(mm)) if mm[k][ccol]), None)
            if piv is None:
                ccol += 1
                continue
            mm[rank], mm[piv] = mm[piv], mm[rank]
            for k in range(rank + 1, len(mm)):
                if mm[k][ccol]:
                    f1, f2 = mm[rank][ccol], mm[k][ccol]
                    mm[k] = [f1 * x - f2 * y for x, y in zip(mm[k], mm[rank])]
            rank += 1
            ccol += 1
        return rank == len(m)

    def rec(j: int, tight: bool) -> None:
        # tight: the key built so far equals the best key's prefix, so the
        # segment-vs-best prune is valid; once the partial key is strictly
        # smaller at some earlier column, nothing below may be pruned.
        # Candidates are visited in increasing ext order, which makes the
        # first completed basis the greedy minimum and lets ties break early.
        nonlocal best_key, best_cols
        base = len(key)
        ranked = []
        for v in vecs:
            ext = [sum(adot[c][t] * v[t] for t in range(r)) for c in cols]
            ext.append(sum(adot[v][t] * v[t] for t in range(r)))
            ranked.append((ext, v))
        ranked.sort(key=lambda p: p[0])
        cof = None
        if j == r - 1:
            # det of the completed matrix is linear in the last column
            m = [list(c) for c in cols]
            cof = [
                (-1 if (r - 1 + i) % 2 else 1)
                * exact_det([row[:i] + row[i + 1 :] for row in m])
                for i in range(r)
            ]
        for ext, v in ranked:
            child_tight = False
            if best_key is not None and tight:
                seg = best_key[base : base + len(ext)]
                if ext > seg:
                    break  # sorted: every later ext is >= this one
                child_tight = ext == seg
            if j == r - 1:
                if abs(sum(c * x for c, x in zip(cof, v))) != 1:
                    continue
                cols.append(v)
                key.extend(ext)
                if best_key is None or key < best_key:
                    best_key = key[:]
                    best_cols = cols[:]
                del key[base:]
                cols.pop()
                continue
            if not independent(v):
                continue
            cols.append(v)
            key.extend(ext)
            rec(j + 1, child_tight)
            del key[base:]
            cols.pop()

    rec(0, True)
    assert best_cols is not None
    u = transpose([list(c) for c in best_cols])
    canon = mat_mul(transpose(u), mat_mul(a, u))
    assert gram_key(tuple(tuple(row) for row in canon)) == tuple(best_key)
    return CanonicalForm(
        GramForm.from_rows(canon), tuple(tuple(row) for row in u)
    )


# ---------------------------------------------------------------------------
# deduplication
# ---------------------------------------------------------------------------


def _theta_invariant(form: GramForm) -> tuple[int, ...]:
    return theta_prefix(form, THETA_PREFILTER_BOUND)


def dedup(forms: list[GramForm]) -> list[GramForm]:
    """One canonical representative per isometry class, stable-sorted by
    (determinant, canonical Gram lexicographic)."""
    classes = dedup_classes(forms)
    reps = [canonicalize(cls[0]).form for cls in classes]
    reps.sort(key=lambda f: (f.det, gram_key(f.gram)))
    return reps


def dedup_classes(forms: list[GramForm]) -> list[list[GramForm]]:
    """Group input forms into isometry classes (ordered by first appearance)."""
    return [[forms[i] for i in idxs] for idxs in dedup_index_classes(forms)]


def dedup_index_classes(forms: list[GramForm]) -> list[list[int]]:
    """Indices of the input grouped into isometry classes: greedy-reduction
    hashing collapses exact duplicates, cheap invariants bucket the rest, and
    pairwise isometry search settles each bucket."""
    reduced: dict[tuple, list[int]] = {}
    red_forms: list[GramForm] = []
    for idx, f in enumerate(forms):
        rg = greedy_reduce(f.matrix)
        key = tuple(tuple(row) for row in rg)
        if key in reduced:
            reduced[key].append(idx)
        else:
            reduced[key] = [idx]
            red_forms.append(GramForm(key))
    buckets: dict[tuple, list[GramForm]] = {}
    for f in red_forms:
        buckets.setdefault((f.det, _theta_invariant(f)), []).append(f)
    class_of: dict[tuple, int] = {}
    class_leads: list[GramForm] = []
    for bucket in buckets.values():
        local: list[int] = []
        for f in bucket:
            placed = None
            for ci in local:
                if isometric(class_leads[ci], f) is not None:
                    placed = ci
                    break
            if placed is None:
                class_leads.append(f)
                placed = len(class_leads) - 1
                local.append(placed)
            class_of[f.gram] = placed
    members: list[list[int]] = [[] for _ in class_leads]
    for key, idxs in reduced.items():
        members[class_of[key]].extend(idxs)
    out = []
    for idxs in members:
        if idxs:
            idxs.sort()
            out.append(idxs)
    out.sort(key=lambda idxs: idxs[0])
    return out
