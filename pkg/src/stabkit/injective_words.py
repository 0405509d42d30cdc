"""Bounded-charge injective-words complexes and their weak Cohen-Macaulay check."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .complexes import (
    DEFAULT_CELL_BUDGET,
    SimplicialComplex,
    chain_complex_ss,
    first_nonvanishing_degree,
    is_homologically_connected,
    link,
    ordered,
)
from .errors import BudgetExceeded
from .exact_linalg import homology, rank_rational

__all__ = [
    "ChargedSet",
    "WcmReport",
    "build_inj_c",
    "verify_wcm",
    "link_isomorphism_check",
    "injective_words_top_rank",
    "injective_words_top_homology",
    "charge_multisets",
    "DERANGEMENT_BUDGET",
]

DERANGEMENT_BUDGET = 6


@dataclass(frozen=True)
class ChargedSet:
    """Finite set with a charge ``>= 1`` on each element.

    Elements default to ``0..n-1``; they must be mutually comparable because
    vertices of the complexes are sorted tuples of elements.
    """

    charges: tuple[int, ...]
    elements: tuple = ()

    def __post_init__(self):
        charges = tuple(int(c) for c in self.charges)
        elements = tuple(self.elements) or tuple(range(len(charges)))
        if len(elements) != len(charges):
            raise ValueError("one charge per element")
        if len(set(elements)) != len(elements):
            raise ValueError("elements must be distinct")
        if any(c < 1 for c in charges):
            raise ValueError("every element needs charge >= 1")
        object.__setattr__(self, "charges", charges)
        object.__setattr__(self, "elements", elements)

    @classmethod
    def from_mapping(cls, charge: dict) -> "ChargedSet":
        elems = tuple(sorted(charge))
        return cls(tuple(charge[e] for e in elems), elems)

    def __len__(self):
        return len(self.elements)

    def charge_of(self, subset: Sequence) -> int:
        lookup = dict(zip(self.elements, self.charges))
        return sum(lookup[e] for e in subset)

    def without(self, removed) -> "ChargedSet":
        gone = set(removed)
        keep = [(e, c) for e, c in zip(self.elements, self.charges) if e not in gone]
        return ChargedSet(tuple(c for _, c in keep), tuple(e for e, _ in keep))

    @property
    def max_charge(self) -> int:
        return max(self.charges, default=0)


def _vertices(s: ChargedSet, c: int) -> list[tuple]:
    """Nonempty subsets of total charge <= c, as sorted tuples."""
    pairs = sorted(zip(s.elements, s.charges))
    out = []

    def grow(start: int, chosen: list, total: int):
        for i in range(start, len(pairs)):
            e, q = pairs[i]
            if total + q <= c:
                chosen.append(e)
                out.append(tuple(chosen))
                grow(i + 1, chosen, total + q)
                chosen.pop()

    grow(0, [], 0)
    return sorted(out)


def _disjoint_families(verts: list[tuple]) -> Iterator[tuple]:
    # extend only by vertices later in the canonical order, so each family appears once
    sets = [frozenset(v) for v in verts]

    def extend(start: int, family: list[int], used: frozenset):
        for i in range(start, len(verts)):
            if used.isdisjoint(sets[i]):
                family.append(i)
                yield tuple(verts[j] for j in family)
                yield from extend(i + 1, family, used | sets[i])
                family.pop()

    yield from extend(0, [], frozenset())


def build_inj_c(s: ChargedSet, c: int) -> SimplicialComplex:
    """Vertices: nonempty subsets of charge <= c. Simplices: pairwise disjoint families."""
    if c < 1:
        raise ValueError("charge bound c must be >= 1")
    verts = _vertices(s, c)
    for v in verts:
        assert s.charge_of(v) <= c
    return SimplicialComplex.from_faces(_disjoint_families(verts), check=False)


@dataclass
class WcmReport:
    target_dim: int
    global_pass: bool
    global_required: int
    link_failures: list[tuple[tuple, int, int | None]] = field(default_factory=list)
    simplices_checked: int = 0
    complete: bool = True

    def as_dict(self) -> dict:
        return {
            "target_dim": self.target_dim,
            "global_required_connectivity": self.global_required,
            "global_pass": self.global_pass,
            "passed": self.passed,
            "complete": self.complete,
            "simplices_checked": self.simplices_checked,
            "link_failures": [
                {"simplex": [list(v) for v in sigma], "required": req, "first_nonvanishing": obs}
                for sigma, req, obs in self.link_failures
            ],
            "connectivity_notion": "homological (reduced integral homology); pi_1 not checked",
        }

    @property
    def passed(self) -> bool:
        return self.global_pass and not self.link_failures and self.complete


def verify_wcm(s: ChargedSet, c: int, cell_budget: int = DEFAULT_CELL_BUDGET) -> WcmReport:
    """Check that Inj^c(S) is weakly Cohen-Macaulay of dimension floor(#S/c) - 1.

    The whole complex must be (floor(#S/c) - 2)-connected and the link of each
    p-simplex (floor(#S/c) - p - 3)-connected, both homologically. If the
    complex has more faces than ``cell_budget`` only the global check runs and
    the report is flagged incomplete.
    """
    n = len(s)
    top = n // c
    target = top - 1
    k = build_inj_c(s, c)
    required = top - 2
    ok = is_homologically_connected(k, required)
    report = WcmReport(target_dim=target, global_pass=ok, global_required=required)
    if not ok:
        report.global_pass = False
    if len(k.faces) > cell_budget:
        report.complete = False
        return report
    for sigma in sorted(k.faces, key=lambda f: (len(f), f)):
        p = len(sigma) - 1
        need = top - p - 3
        report.simplices_checked += 1
        if need < -1:
            continue
        lk = link(k, sigma)
        if not is_homologically_connected(lk, need):
            report.link_failures.append((sigma, need, first_nonvanishing_degree(lk, need)))
    return report


def link_isomorphism_check(s: ChargedSet, c: int, sigma: Sequence[Sequence],
                           k: SimplicialComplex | None = None) -> bool:
    """Is link(sigma) in Inj^c(S) literally Inj^c(S minus the elements used by sigma)?"""
    k = build_inj_c(s, c) if k is None else k
    sigma = tuple(sorted(tuple(sorted(v)) for v in sigma))
    if sigma and sigma not in k.faces:
        raise ValueError(f"{sigma!r} is not a simplex of Inj^{c}(S)")
    used = [e for v in sigma for e in v]
    return link(k, sigma) == build_inj_c(s.without(used), c)


def injective_words_top_rank(n: int, budget: int = DERANGEMENT_BUDGET) -> int:
    """Rank of reduced homology in degree n-1 of the complex of injective words on n letters."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > budget:
        raise BudgetExceeded(f"n = {n} exceeds the injective-words budget {budget}")
    k = build_inj_c(ChargedSet((1,) * n), 1)
    cc = chain_complex_ss(ordered(k))
    top = n - 1
    rank = cc.dims[top] - rank_rational(cc.boundary(top))
    return rank - 1 if top == 0 else rank


def injective_words_top_homology(n: int, budget: int = DERANGEMENT_BUDGET) -> tuple[int, list[int]]:
    """Betti number and torsion of the top degree via Smith normal form."""
    if n > budget:
        raise BudgetExceeded(f"n = {n} exceeds the injective-words budget {budget}")
    k = build_inj_c(ChargedSet((1,) * n), 1)
    cc = chain_complex_ss(ordered(k))
    h = homology(cc, [n - 1])
    b = h.betti[n - 1] - (1 if n == 1 else 0)
    return b, h.torsion[n - 1]


def charge_multisets(size: int, max_charge: int) -> Iterator[tuple[int, ...]]:
    """Non-decreasing charge vectors; charges only matter up to permuting S."""
    return itertools.combinations_with_replacement(range(1, max_charge + 1), size)
