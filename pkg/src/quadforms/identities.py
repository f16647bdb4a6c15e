"""Substitution identities, congruence-claim scans, and the exception gadget.

A substitution k*Q(Mv/d) = L(v) is verified symbolically: with A, B the
doubled Gram matrices of Q and L it is the integer matrix identity
k*M^T A M = d^2 * B.  Congruence claims are bounded empirical scans over
squarefree target integers.  The exception gadget wraps a form of truant t
into one whose unique target exception is t, certified constructively up to
4t+4 and by a residue-coverage argument beyond.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._exact import is_squarefree, kernel_basis, mat_mul, transpose
from .forms_core import (
    GramForm,
    TargetSet,
    represented_set,
    truant,
)


@dataclass(frozen=True)
class Substitution:
    """k * source(matrix @ v / d) claimed identically equal to target(v)."""

    k: int
    matrix: tuple[tuple[int, ...], ...]
    d: int
    source: GramForm
    target: GramForm

    @staticmethod
    def from_fixture(row: dict) -> "Substitution":
        return Substitution(
            row["k"],
            tuple(tuple(r) for r in row["matrix"]),
            row["d"],
            row["source_gram"],
            row["target_gram"],
        )


def check_substitution(sub: Substitution) -> bool:
    """True iff k * M^T A M == d^2 * B entrywise (exact integers)."""
    m = [list(row) for row in sub.matrix]
    mam = mat_mul(transpose(m), mat_mul(sub.source.matrix, m))
    b = sub.target.matrix
    r = sub.target.rank
    if len(mam) != r:
        return False
    return all(
        sub.k * mam[i][j] == sub.d * sub.d * b[i][j] for i in range(r) for j in range(r)
    )


def check_integer_substitution(matrix: list[list[int]], form: GramForm) -> GramForm:
    """The sublattice form Q∘M for an integer matrix M (columns = generators).

    Raises if the result is singular, reporting a kernel vector as witness.
    """
    mam = mat_mul(transpose(matrix), mat_mul(form.matrix, matrix))
    kernel = kernel_basis(mam)
    if kernel:
        raise ValueError(f"singular substitution; kernel witness {kernel[0]}")
    return GramForm.from_rows(mam)


# ---------------------------------------------------------------------------
# congruence claims
# ---------------------------------------------------------------------------


def _squarefree_sieve(bound: int) -> np.ndarray:
    flags = np.ones(bound + 1, dtype=bool)
    flags[0] = False
    for q in range(2, int(bound**0.5) + 1):
        flags[q * q :: q * q] = False
    return flags


def verify_congruence_claim(
    form: GramForm, prime: int, classes: list[tuple[int, list[int]]], bound: int
) -> dict:
    """Check every squarefree N <= bound, coprime to the prime, lying in one
    of the residue classes, is represented.  Returns counts and any
    counterexamples (expected none)."""
    rep = represented_set(form, bound)
    squarefree = _squarefree_sieve(bound)
    n = np.arange(bound + 1)
    in_class = np.zeros(bound + 1, dtype=bool)
    for modulus, residues in classes:
        for r in residues:
            in_class |= n % modulus == r
    candidates = squarefree & in_class & (n % prime != 0) & (n >= 1)
    missed = np.flatnonzero(candidates & ~rep)
    return {
        "checked": int(candidates.sum()),
        "counterexamples": [int(v) for v in missed],
    }


def conjecture_scan(form: GramForm, prime: int, bound: int) -> dict:
    """Exceptions of the form among ALL target integers up to bound."""
    target = TargetSet.coprime_to(prime)
    rep = represented_set(form, bound)
    n = np.arange(bound + 1)
    candidates = (n >= 1) & (np.gcd(n, prime) == 1 if prime > 1 else n >= 1)
    missed = np.flatnonzero(candidates & ~rep)
    return {
        "target": target.describe(),
        "bound": bound,
        "exceptions": [int(v) for v in missed],
    }


# ---------------------------------------------------------------------------
# the exception gadget
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GadgetCertificate:
    """Evidence that the gadget built on (form, t) misses exactly t."""

    t: int
    base_rank: int
    gadget_rank: int
    checked_to: int  # constructive verification bound (4t+4)
    residues_covered: bool  # the beyond-4t+4 coverage argument holds


def exception_gadget(
    form: GramForm, t: int, target: TargetSet, truant_bound: int | None = None
) -> GadgetCertificate:
    """Certify that form(x) + (t+1)(a²+b²+c²+d²) + Σ_{i=1..t-1} (t+1+i)x_i²
    represents every target integer except t.

    The form must have truant t for the target.  Constructive check: every
    target n in (t, 4t+4] is a sum q + (t+1)m + (a subset of {t+2..2t}),
    with q represented by the form; t itself is unreachable since every
    auxiliary term exceeds t.  Beyond 4t+4: every residue mod t+1 is hit by
    a combination of total value <= 3t+3, leaving a positive multiple of
    t+1 for the four-square block.
    """
    actual = truant(form, target, truant_bound)
    if actual != t:
        raise ValueError(f"form has truant {actual}, not {t}")
    limit = 4 * t + 4
    base = represented_set(form, limit)
    atoms = list(range(t + 2, 2 * t + 1))  # (t+1+i)·1², one per variable
    # 0/1-knapsack reachability of q + subset-of-atoms
    reach = np.array(base, dtype=bool)
    for atom in atoms:
        reach[atom:] |= reach[:-atom].copy()
    # fold in the four-square block: any nonnegative multiple of t+1
    full = reach.copy()
    for mult in range(t + 1, limit + 1, t + 1):
        full[mult:] |= reach[: limit + 1 - mult]
    missed = [
        n for n in range(1, limit + 1) if target.contains(n) and not full[n]
    ]
    if missed != [t]:
        raise ValueError(
            f"gadget verification failed: target misses in (0, {limit}] are {missed},"
            f" expected exactly [{t}]"
        )
    small = min(3 * t + 3, limit)
    covered = {int(s) % (t + 1) for s in np.flatnonzero(reach[: small + 1])}
    residues_ok = covered == set(range(t + 1))
    if not residues_ok:
        raise ValueError(
            f"gadget residue coverage incomplete mod {t + 1}:"
            f" missing {sorted(set(range(t + 1)) - covered)}"
        )
    return GadgetCertificate(
        t=t,
        base_rank=form.rank,
        gadget_rank=form.rank + 4 + (t - 1),
        checked_to=limit,
        residues_covered=residues_ok,
    )
