"""Escalation trees for positive-definite integral lattices.

Escalating a lattice by an unrepresented norm t adjoins one generator of norm
t: the possible Gram matrices are the bordered matrices [[A, b], [b^T, 2t]]
over integer columns b, bounded coordinatewise by Cauchy-Schwarz
(b_i^2 <= 2t*A_ii) and filtered to strictly positive-definite results
(b^T adj(A) b < 2t*det A); singular borders are discarded.  A tree grows
breadth-first from the rank-0 lattice, escalating every node by its truant
(the smallest target value it misses) and deduplicating each depth up to
isometry.  A "switch" re-roots part of the search: escalating a ternary by a
later exception instead of its truant yields the auxiliary forms.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import isqrt

import numpy as np

from ._exact import adjugate
from ._exact import det as exact_det
from .forms_core import (
    GramForm,
    TargetSet,
    default_truant_bound,
    format_form,
    parse_form,
    represents,
    theta_prefix,
    truant,
)
from .isometry import (
    THETA_PREFILTER_BOUND,
    dedup_index_classes,
    gram_key,
    greedy_reduce,
    isometric,
)
from .local_analysis import LocalObstruction, SquareClass, obstructions


@dataclass
class EscalationNode:
    """One isometry class in the tree; ids are canonical-sort indices."""

    id: int
    form: GramForm
    parent: int | None
    adjoined_norm: int | None
    depth: int
    flavor: str = "basic"  # "basic" | "auxiliary"
    switch_norm: int | None = None
    truant: int | None = None
    truant_bound: int | None = None
    candidate: bool = False  # no truant found up to truant_bound
    obstructed: tuple[LocalObstruction, ...] = ()


@dataclass
class EscalationTree:
    target: TargetSet
    classical_only: bool
    nodes: list[EscalationNode]
    levels: list[list[int]] = field(default_factory=list)  # node ids per depth
    truant_set: tuple[int, ...] = ()

    @property
    def counts(self) -> list[int]:
        return [len(level) for level in self.levels]

    def depth_nodes(self, depth: int) -> list[EscalationNode]:
        return [self.nodes[i] for i in self.levels[depth]]


# ---------------------------------------------------------------------------
# single escalation step
# ---------------------------------------------------------------------------

_CHUNK_LIMIT = 1 << 62


def _border_columns(a: list[list[int]], corner: int, classical_only: bool) -> list[tuple[int, ...]]:
    """Integer columns b with b_i^2 <= corner*A_ii and b^T adj(A) b < corner*det A,
    up to the sign symmetry b ~ -b (first nonzero entry kept positive)."""
    r = len(a)
    adj = adjugate(a)
    limit = corner * exact_det(a)
    axes: list[np.ndarray] = []
    for i in range(r):
        m = isqrt(corner * a[i][i])
        if classical_only:
            m -= m % 2
            axes.append(np.arange(-m, m + 1, 2, dtype=np.int64))
        else:
            axes.append(np.arange(-m, m + 1, dtype=np.int64))
    max_b = max(int(ax[-1]) for ax in axes) if r else 0
    max_adj = max((abs(v) for row in adj for v in row), default=0)
    if r * r * max_adj * max_b * max_b >= _CHUNK_LIMIT:
        return _border_columns_bigint(a, adj, limit, axes)
    adj_np = np.array(adj, dtype=np.int64).reshape(r, r)
    if r == 1:
        rest = np.zeros((1, 0), dtype=np.int64)
    else:
        rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, r - 1)
    out: list[tuple[int, ...]] = []
    for v0 in axes[0]:
        if v0 < 0:
            continue  # -b is isometric to b
        b = np.concatenate(
            [np.full((rest.shape[0], 1), v0, dtype=np.int64), rest], axis=1
        )
        if v0 == 0 and r > 1:
            undecided = np.ones(len(b), dtype=bool)
            keep = np.zeros(len(b), dtype=bool)
            for col in range(1, r):
                keep |= undecided & (b[:, col] > 0)
                undecided &= b[:, col] == 0
            keep |= undecided  # the zero column
            b = b[keep]
        q = np.einsum("ij,jk,ik->i", b, adj_np, b)
        for row in b[q < limit]:
            out.append(tuple(int(v) for v in row))
    return out


def _border_columns_bigint(
    a: list[list[int]], adj: list[list[int]], limit: int, axes: list[np.ndarray]
) -> list[tuple[int, ...]]:
    from itertools import product

    r = len(a)
    out: list[tuple[int, ...]] = []
    for b in product(*(tuple(int(v) for v in ax) for ax in axes)):
        nz = next((v for v in b if v), 0)
        if nz < 0:
            continue
        q = sum(adj[i][j] * b[i] * b[j] for i in range(r) for j in range(r))
        if q < limit:
            out.append(b)
    return out


def _sort_key(form: GramForm) -> tuple:
    return (form.det, gram_key(form.gram))


def _class_representative(members: list[GramForm]) -> GramForm:
    """Deterministic class label: the smallest greedy-reduced Gram reached by
    any member (invariant under the order members were generated in)."""
    best = None
    for f in members:
        g = GramForm(tuple(tuple(row) for row in greedy_reduce(f.matrix)))
        if best is None or _sort_key(g) < _sort_key(best):
            best = g
    return best


def escalate_once(form: GramForm, t: int, classical_only: bool = False) -> list[GramForm]:
    """All pairwise non-isometric rank+1 escalations of the form by norm t."""
    if t < 1:
        raise ValueError("adjoined norm must be a positive integer")
    if represents(form, t):
        raise ValueError(f"form represents {t}; escalation requires a missed norm")
    r = form.rank
    corner = 2 * t
    if r == 0:
        return [GramForm.from_rows([[corner]])]
    a = form.matrix
    candidates = []
    for b in _border_columns(a, corner, classical_only):
        rows = [a[i] + [b[i]] for i in range(r)]
        rows.append(list(b) + [corner])
        candidates.append(GramForm.from_rows(rows))
    reps = [
        _class_representative([candidates[i] for i in idxs])
        for idxs in dedup_index_classes(candidates)
    ]
    reps.sort(key=_sort_key)
    return reps


# ---------------------------------------------------------------------------
# tree construction
# ---------------------------------------------------------------------------


def build_tree(
    target: TargetSet,
    max_rank: int,
    truant_bound: int | None = None,
    classical_only: bool = False,
) -> EscalationTree:
    """Breadth-first escalation from rank 0, one node per isometry class
    per depth; every node gets a truant scan, rank-4+ leaves get local
    obstruction analysis."""
    if max_rank > 5:
        raise ValueError("escalation trees are supported up to rank 5")
    root = EscalationNode(0, GramForm.from_rows([]), None, None, 0)
    nodes = [root]
    levels = [[0]]
    truants: set[int] = set()
    frontier = [root]
    for depth in range(1, max_rank + 1):
        pooled: dict[tuple, tuple[GramForm, int, int]] = {}
        for node in frontier:
            bound = truant_bound if truant_bound is not None else default_truant_bound(node.depth)
            node.truant = truant(node.form, target, bound)
            node.truant_bound = bound
            if node.truant is None:
                node.candidate = True
                continue
            truants.add(node.truant)
            for child in escalate_once(node.form, node.truant, classical_only):
                pooled.setdefault(child.gram, (child, node.id, node.truant))
        # representatives from different parents may still be isometric
        unique = list(pooled.values())
        entries = []
        for idxs in dedup_index_classes([u[0] for u in unique]):
            rep = min((unique[i][0] for i in idxs), key=_sort_key)
            _, parent_id, adjoined = unique[idxs[0]]
            entries.append((rep, parent_id, adjoined))
        entries.sort(key=lambda e: _sort_key(e[0]))
        level_ids = []
        for child, parent_id, adjoined in entries:
            node = EscalationNode(len(nodes), child, parent_id, adjoined, depth)
            level_ids.append(node.id)
            nodes.append(node)
        levels.append(level_ids)
        frontier = [nodes[i] for i in level_ids]
    for node in frontier:
        bound = truant_bound if truant_bound is not None else default_truant_bound(node.depth)
        node.truant = truant(node.form, target, bound)
        node.truant_bound = bound
        if node.truant is None:
            node.candidate = True
        else:
            truants.add(node.truant)
    if max_rank >= 4 and frontier:
        classify_obstructed(frontier, target)
    return EscalationTree(target, classical_only, nodes, levels, tuple(sorted(truants)))


def classify_obstructed(
    nodes: list[EscalationNode], target: TargetSet
) -> tuple[list[EscalationNode], list[EscalationNode]]:
    """Partition nodes into (locally unobstructed, obstructed) for the target,
    recording each node's obstructed square classes."""
    basic: list[EscalationNode] = []
    obstructed: list[EscalationNode] = []
    for node in nodes:
        node.obstructed = tuple(obstructions(node.form, target))
        (obstructed if node.obstructed else basic).append(node)
    return basic, obstructed


# ---------------------------------------------------------------------------
# the switch
# ---------------------------------------------------------------------------


def apply_switch(
    ternary: GramForm, switch_norm: int, exclude: list[GramForm]
) -> list[GramForm]:
    """Escalations of the ternary by a later exception (the switch norm),
    dropping classes isometric to anything in exclude."""
    if represents(ternary, switch_norm):
        raise ValueError(f"switch norm {switch_norm} is represented; not an exception")
    fresh = escalate_once(ternary, switch_norm)
    buckets: dict[tuple, list[GramForm]] = {}
    for f in exclude:
        buckets.setdefault((f.det, theta_prefix(f, THETA_PREFILTER_BOUND)), []).append(f)
    kept = []
    for f in fresh:
        bucket = buckets.get((f.det, theta_prefix(f, THETA_PREFILTER_BOUND)), [])
        if all(isometric(f, other) is None for other in bucket):
            kept.append(f)
    return kept


def add_auxiliary_nodes(
    tree: EscalationTree,
    ternary_id: int,
    switch_norm: int,
    forms: list[GramForm],
    truant_bound: int | None = None,
) -> list[EscalationNode]:
    """Append switch products under a ternary node, with the same truant scan
    and obstruction analysis basic nodes get."""
    parent = tree.nodes[ternary_id]
    depth = parent.depth + 1
    while len(tree.levels) <= depth:
        tree.levels.append([])
    added = []
    truants = set(tree.truant_set)
    for form in forms:
        node = EscalationNode(
            len(tree.nodes),
            form,
            ternary_id,
            switch_norm,
            depth,
            flavor="auxiliary",
            switch_norm=switch_norm,
        )
        bound = truant_bound if truant_bound is not None else default_truant_bound(depth)
        node.truant = truant(form, tree.target, bound)
        node.truant_bound = bound
        if node.truant is None:
            node.candidate = True
        else:
            truants.add(node.truant)
        tree.nodes.append(node)
        tree.levels[depth].append(node.id)
        added.append(node)
    if depth >= 4 and added:
        classify_obstructed(added, tree.target)
    tree.truant_set = tuple(sorted(truants))
    return added


def derive_switch_plans(tree: EscalationTree) -> list[tuple[int, int]]:
    """Switch plans (ternary node id, switch norm) read off the obstructed
    quaternaries: each one's own truant, charged to its ternary parent,
    deduplicated in first-appearance order."""
    plans: list[tuple[int, int]] = []
    for node in tree.depth_nodes(4):
        if not node.obstructed:
            continue
        if node.truant is None:
            raise ValueError(
                f"obstructed node {node.id} has no truant up to {node.truant_bound};"
                " raise the truant bound"
            )
        plan = (node.parent, node.truant)
        if plan not in plans:
            plans.append(plan)
    return plans


def extend_with_auxiliary(
    tree: EscalationTree, truant_bound: int | None = None
) -> list[EscalationNode]:
    """Run every derived switch, dropping products isometric to an existing
    rank-4 class or to an earlier switch product, and append the survivors
    as auxiliary nodes."""
    added: list[EscalationNode] = []
    exclude = [n.form for n in tree.depth_nodes(4)]
    for ternary_id, norm in derive_switch_plans(tree):
        fresh = apply_switch(tree.nodes[ternary_id].form, norm, exclude)
        exclude.extend(fresh)
        added.extend(add_auxiliary_nodes(tree, ternary_id, norm, fresh, truant_bound))
    return added


# ---------------------------------------------------------------------------
# persistence (line-delimited JSON)
# ---------------------------------------------------------------------------


def save_tree(tree: EscalationTree, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        header = {
            "kind": "tree",
            "target": tree.target.describe(),
            "classical_only": tree.classical_only,
            "counts": tree.counts,
            "truant_set": list(tree.truant_set),
        }
        fp.write(json.dumps(header) + "\n")
        for node in tree.nodes:
            rec = {
                "kind": "node",
                "id": node.id,
                "parent": node.parent,
                "depth": node.depth,
                "flavor": node.flavor,
                "switch_norm": node.switch_norm,
                "adjoined_norm": node.adjoined_norm,
                "form": format_form(node.form),
                "truant": node.truant,
                "truant_bound": node.truant_bound,
                "candidate": node.candidate,
                "obstructed": [
                    [o.square_class.prime, o.square_class.exponent, o.square_class.unit]
                    for o in node.obstructed
                ],
            }
            fp.write(json.dumps(rec) + "\n")


def load_tree(path: str) -> EscalationTree:
    with open(path, encoding="utf-8") as fp:
        header = json.loads(fp.readline())
        if header.get("kind") != "tree":
            raise ValueError("missing tree header record")
        tree = EscalationTree(
            TargetSet.parse(header["target"]),
            bool(header["classical_only"]),
            [],
            [],
            tuple(header["truant_set"]),
        )
        for line in fp:
            rec = json.loads(line)
            node = EscalationNode(
                rec["id"],
                parse_form(rec["form"]),
                rec["parent"],
                rec["adjoined_norm"],
                rec["depth"],
                flavor=rec["flavor"],
                switch_norm=rec["switch_norm"],
                truant=rec["truant"],
                truant_bound=rec["truant_bound"],
                candidate=rec["candidate"],
                obstructed=tuple(
                    LocalObstruction(SquareClass(p, e, u)) for p, e, u in rec["obstructed"]
                ),
            )
            while len(tree.levels) <= node.depth:
                tree.levels.append([])
            tree.levels[node.depth].append(node.id)
            tree.nodes.append(node)
    return tree
