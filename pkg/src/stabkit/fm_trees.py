"""Leaf-labeled rooted trees indexing strata of the compactified configuration space.

A tree on leaves ``1..k`` is stored canonically as a nested tuple: a leaf is its
int label, an internal vertex is a tuple of children sorted by smallest leaf.
The root is the outermost tuple. A root whose only child is internal encodes
the stratum where all points coincide.

Equivalently, a tree is its set of *clusters*: the leaf sets of the non-root
internal vertices. Contracting the edge above a vertex deletes its cluster, so
codimension is the number of clusters and ``contracts_to`` is cluster-set
inclusion.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterator, Mapping

from .errors import BudgetExceeded

__all__ = [
    "StratumTree",
    "StrataPoset",
    "TREE_BUDGET",
    "corolla",
    "enumerate_strata",
    "count_strata",
    "codimension",
    "contracts_to",
    "contract",
    "build_poset",
    "overcharged_vertices",
    "retract_to_bounded",
    "parse_tree",
    "format_tree",
    "tree_to_dot",
    "poset_to_dot",
]

TREE_BUDGET = 7

Node = "int | tuple"


def _leaves(node) -> frozenset:
    if isinstance(node, int):
        return frozenset((node,))
    return frozenset().union(*(_leaves(ch) for ch in node))


def _min_leaf(node) -> int:
    return node if isinstance(node, int) else min(_min_leaf(ch) for ch in node)


def _canon(node):
    if isinstance(node, int):
        return node
    return tuple(sorted((_canon(ch) for ch in node), key=_min_leaf))


@dataclass(frozen=True)
class StratumTree:
    root: tuple
    leaf_charges: tuple[tuple[int, int], ...] | None = field(default=None, compare=True)

    def __post_init__(self):
        root = _canon(tuple(self.root))
        object.__setattr__(self, "root", root)
        if self.leaf_charges is not None:
            lc = tuple(sorted(dict(self.leaf_charges).items()))
            object.__setattr__(self, "leaf_charges", lc)
        self._validate()

    def _validate(self):
        if not self.root:
            raise ValueError("the root needs at least one child")
        leaves = []

        def walk(node, is_root):
            if isinstance(node, int):
                leaves.append(node)
                return
            if not is_root and len(node) < 2:
                raise ValueError("non-root internal vertices need >= 2 children")
            for ch in node:
                walk(ch, False)

        walk(self.root, True)
        k = len(leaves)
        if sorted(leaves) != list(range(1, k + 1)):
            raise ValueError("leaves must be labeled 1..k exactly once")
        if len(self.root) == 1 and isinstance(self.root[0], int) and k != 1:
            raise ValueError("a root with a single leaf child only occurs for k = 1")
        if self.leaf_charges is not None:
            lc = dict(self.leaf_charges)
            if set(lc) != set(leaves):
                raise ValueError("leaf_charges must cover every leaf")
            if any(q < 1 for q in lc.values()):
                raise ValueError("leaf charges must be >= 1")

    @classmethod
    def from_clusters(cls, k: int, clusters, leaf_charges=None) -> "StratumTree":
        """Rebuild a tree from its laminar family of clusters."""
        cl = sorted({frozenset(c) for c in clusters}, key=len)
        for c in cl:
            if len(c) < 2 or not c <= set(range(1, k + 1)):
                raise ValueError(f"bad cluster {sorted(c)}")
        nodes: dict[frozenset, object] = {}
        for c in cl:
            maximal_inside = [d for d in nodes if d < c and not any(d < e < c for e in nodes)]
            covered = frozenset().union(*maximal_inside) if maximal_inside else frozenset()
            children = [nodes[d] for d in maximal_inside] + sorted(c - covered)
            nodes[c] = tuple(children)
        top = [d for d in nodes if not any(d < e for e in nodes)]
        covered = frozenset().union(*top) if top else frozenset()
        children = [nodes[d] for d in top] + sorted(set(range(1, k + 1)) - covered)
        lc = None if leaf_charges is None else tuple(dict(leaf_charges).items())
        return cls(tuple(children), lc)

    @property
    def k(self) -> int:
        return len(_leaves(self.root))

    @property
    def charges(self) -> dict[int, int] | None:
        return None if self.leaf_charges is None else dict(self.leaf_charges)

    def with_charges(self, charges: Mapping[int, int] | None) -> "StratumTree":
        return StratumTree(self.root, None if charges is None else tuple(charges.items()))

    def internal_vertices(self) -> list[tuple]:
        """Non-root internal vertices, preorder."""
        out = []

        def walk(node):
            for ch in node:
                if not isinstance(ch, int):
                    out.append(ch)
                    walk(ch)

        walk(self.root)
        return out

    def clusters(self) -> frozenset[frozenset]:
        return frozenset(_leaves(v) for v in self.internal_vertices())

    def __str__(self):
        return format_tree(self)


def corolla(k: int) -> StratumTree:
    return StratumTree(tuple(range(1, k + 1)))


def codimension(t: StratumTree) -> int:
    """Number of vertices that are neither the root nor leaves."""
    return len(t.internal_vertices())


# --- enumeration --------------------------------------------------------------


def _set_partitions(items: tuple) -> Iterator[list[tuple]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [(first,)] + part
        for i in range(len(part)):
            yield part[:i] + [(first,) + part[i]] + part[i + 1:]


@lru_cache(maxsize=None)
def _subtrees(block: tuple) -> tuple:
    """All internal (>= 2 children) subtrees with leaf set ``block``."""
    out = []
    for part in _set_partitions(block):
        if len(part) < 2:
            continue
        options = [_options(b) for b in part]
        for choice in _product(options):
            out.append(_canon(tuple(choice)))
    return tuple(out)


def _options(block: tuple) -> tuple:
    return (block[0],) if len(block) == 1 else _subtrees(block)


def _product(options):
    if not options:
        yield ()
        return
    for head in options[0]:
        for tail in _product(options[1:]):
            yield (head,) + tail


def enumerate_strata(k: int, budget: int = TREE_BUDGET) -> list[StratumTree]:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > budget:
        raise BudgetExceeded(f"k = {k} exceeds the tree budget {budget}")
    leaves = tuple(range(1, k + 1))
    if k == 1:
        return [StratumTree((1,))]
    trees = []
    for sub in _subtrees(leaves):
        trees.append(StratumTree(sub))       # root with >= 2 children
        trees.append(StratumTree((sub,)))    # added root over the same shape
    trees.sort(key=lambda t: (codimension(t), format_tree(t)))
    return trees


def count_strata(k: int) -> int:
    """Number of strata by the exponential recurrence, without building trees.

    ``a(n)`` counts internal subtrees on n labeled leaves: the ways to split the
    leaves into >= 2 blocks, each block a leaf or again such a subtree. Every
    such subtree gives two strata, with or without the added root.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    a = {1: 1}
    # part[n]: weighted set partitions of n leaves into any number of blocks
    part = {0: 1, 1: 1}
    for n in range(2, k + 1):
        # partitions with >= 2 blocks, split off the block of the first leaf
        a[n] = sum(comb(n - 1, s - 1) * a[s] * part[n - s] for s in range(1, n))
        part[n] = a[n] + a[n]
    return 1 if k == 1 else 2 * a[k]


# --- contraction order --------------------------------------------------------


def _same_leaves(a: StratumTree, b: StratumTree):
    if a.k != b.k:
        raise ValueError("trees have different leaf labels")


def contracts_to(t_from: StratumTree, t_to: StratumTree) -> bool:
    """Does ``t_to`` arise from ``t_from`` by contracting internal edges?"""
    _same_leaves(t_from, t_to)
    return t_to.clusters() <= t_from.clusters()


def contract(t: StratumTree, vertices) -> StratumTree:
    """Contract the edge above each given non-root internal vertex (given by leaf set)."""
    drop = {frozenset(v) for v in vertices}
    cl = t.clusters()
    if not drop <= cl:
        raise ValueError("can only contract edges above non-root internal vertices")
    return StratumTree.from_clusters(t.k, cl - drop, t.leaf_charges)


@dataclass(frozen=True)
class StrataPoset:
    """``relation`` holds index pairs (i, j): stratum i lies in the closure of stratum j."""

    trees: tuple[StratumTree, ...]
    relation: frozenset[tuple[int, int]]

    def covers(self) -> list[tuple[int, int]]:
        cods = [codimension(t) for t in self.trees]
        return sorted((i, j) for i, j in self.relation if cods[i] == cods[j] + 1)

    def maxima(self) -> list[int]:
        below = {i for i, j in self.relation if i != j}
        return [n for n in range(len(self.trees)) if n not in below]

    def is_graded(self) -> bool:
        """Every relation is a composite of codimension-one covers."""
        cods = [codimension(t) for t in self.trees]
        for i, j in self.relation:
            if cods[i] < cods[j]:
                return False
        cover_set = set(self.covers())
        up: dict[int, set] = {}
        for i, j in cover_set:
            up.setdefault(i, set()).add(j)
        for i, j in self.relation:
            if i == j:
                continue
            frontier = {i}
            for _ in range(cods[i] - cods[j]):
                frontier = set().union(*(up.get(x, set()) for x in frontier))
            if j not in frontier:
                return False
        return True


def build_poset(k: int, budget: int = TREE_BUDGET) -> StrataPoset:
    trees = enumerate_strata(k, budget)
    index = {t.clusters(): n for n, t in enumerate(trees)}
    rel = set()
    for n, t in enumerate(trees):
        cl = sorted(t.clusters(), key=lambda c: sorted(c))
        for r in range(len(cl) + 1):
            for sub in combinations(cl, r):
                rel.add((n, index[frozenset(sub)]))
    return StrataPoset(tuple(trees), frozenset(rel))


# --- charge retraction --------------------------------------------------------


def _need_charges(t: StratumTree) -> dict[int, int]:
    if t.leaf_charges is None:
        raise ValueError("tree has no leaf charges")
    return dict(t.leaf_charges)


def overcharged_vertices(t: StratumTree, c: int) -> set[frozenset]:
    """Non-root vertices carrying total leaf charge >= c + 1 above them.

    Vertices are named by their leaf sets; a leaf appears as a singleton.
    """
    q = _need_charges(t)
    out = {cl for cl in t.clusters() if sum(q[x] for x in cl) > c}
    out |= {frozenset((x,)) for x, v in q.items() if v > c}
    return out


def retract_to_bounded(t: StratumTree, c: int) -> StratumTree:
    """Contract the edge above every overcharged internal vertex until none remain."""
    _need_charges(t)
    cur = t
    while True:
        bad = [v for v in overcharged_vertices(cur, c) if len(v) > 1]
        if not bad:
            return cur
        cur = contract(cur, bad)


# --- text and DOT forms -------------------------------------------------------


def format_tree(t: StratumTree) -> str:
    """Nested-list form such as ``(r (v1 1 2) 3)``; leaves carry ``:charge`` when known."""
    q = t.charges
    counter = [0]

    def fmt(node, name):
        parts = [name]
        for ch in node:
            if isinstance(ch, int):
                parts.append(f"{ch}:{q[ch]}" if q else str(ch))
            else:
                counter[0] += 1
                parts.append(fmt(ch, f"v{counter[0]}"))
        return "(" + " ".join(parts) + ")"

    return fmt(t.root, "r")


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_tree(text: str) -> StratumTree:
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise ValueError("empty tree text")
    pos = 0
    charges: dict[int, int] = {}

    def node():
        nonlocal pos
        if tokens[pos] != "(":
            raise ValueError(f"expected '(' at token {pos}")
        pos += 1
        if pos >= len(tokens) or tokens[pos] in "()":
            raise ValueError("every node needs a name")
        pos += 1
        children = []
        while True:
            if pos >= len(tokens):
                raise ValueError("unbalanced parentheses")
            tok = tokens[pos]
            if tok == ")":
                pos += 1
                return tuple(children)
            if tok == "(":
                children.append(node())
                continue
            label, _, charge = tok.partition(":")
            try:
                leaf = int(label)
            except ValueError:
                raise ValueError(f"bad leaf token {tok!r}") from None
            if charge:
                charges[leaf] = int(charge)
            children.append(leaf)
            pos += 1

    root = node()
    if pos != len(tokens):
        raise ValueError("trailing tokens after tree")
    leaves = _leaves(root)
    if charges and set(charges) != set(leaves):
        raise ValueError("charge annotations must be given for all leaves or none")
    return StratumTree(root, tuple(charges.items()) if charges else None)


def tree_to_dot(t: StratumTree, name: str = "stratum") -> str:
    q = t.charges
    lines = [f"digraph {name} {{", '  r [label="root"];']
    counter = [0]

    def walk(node, nid):
        for ch in node:
            if isinstance(ch, int):
                label = f"{ch}:{q[ch]}" if q else str(ch)
                lines.append(f'  l{ch} [shape=box,label="{label}"];')
                lines.append(f"  {nid} -> l{ch};")
            else:
                counter[0] += 1
                cid = f"v{counter[0]}"
                lines.append(f'  {cid} [label="{cid}"];')
                lines.append(f"  {nid} -> {cid};")
                walk(ch, cid)

    walk(t.root, "r")
    lines.append("}")
    return "\n".join(lines)


def poset_to_dot(p: StrataPoset) -> str:
    lines = ["digraph strata {", "  rankdir=BT;"]
    for n, t in enumerate(p.trees):
        lines.append(f'  t{n} [label="{format_tree(t)}"];')
    for i, j in p.covers():
        lines.append(f"  t{i} -> t{j};")
    lines.append("}")
    return "\n".join(lines)
