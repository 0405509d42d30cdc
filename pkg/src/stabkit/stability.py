"""Closed-form stability ranges and section-degree bookkeeping, in exact arithmetic."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "ExceptionalCollection",
    "RangeReport",
    "stable_range",
    "exceptional_charge",
    "exceptional_range",
    "partition_collection",
    "closed_range",
    "section_degree",
    "degree_shift",
    "solve_degree",
    "verify_vanishing_arithmetic",
    "compare_partition_bounds",
]


@dataclass(frozen=True)
class ExceptionalCollection:
    """Finite set of charge multisets, each drawn from (c, c_top]."""

    c: int
    c_top: int
    members: frozenset = frozenset()

    def __post_init__(self):
        if self.c < 1 or self.c_top < self.c:
            raise ValueError("need 1 <= c <= c_top")
        members = frozenset(tuple(sorted(int(x) for x in m)) for m in self.members)
        for m in members:
            for x in m:
                if not self.c < x <= self.c_top:
                    raise ValueError(f"member charge {x} outside ({self.c}, {self.c_top}]")
        object.__setattr__(self, "members", members)


@dataclass(frozen=True)
class RangeReport:
    k: int
    c: int
    iso_below: int
    surj_at: int
    kind: str

    def as_dict(self) -> dict:
        return {"k": self.k, "c": self.c, "iso_below": self.iso_below,
                "surj_at": self.surj_at, "kind": self.kind}


def stable_range(k: int, c: int) -> tuple[int, int]:
    """Isomorphism strictly below floor(k/2c), surjection at it."""
    if c < 1:
        raise ValueError("c must be >= 1")
    b = k // (2 * c)
    return b, b


def exceptional_charge(lam: ExceptionalCollection) -> int:
    """Largest total charge of a member; 0 for an empty collection."""
    return max((sum(m) for m in lam.members), default=0)


def exceptional_range(k: int, lam: ExceptionalCollection) -> tuple[int, int]:
    q = exceptional_charge(lam)
    if k < q:
        raise ValueError(f"k = {k} is smaller than the collection charge {q}")
    b = (k - q) // (2 * lam.c)
    return b, b


def partition_collection(c: int, m: int) -> ExceptionalCollection:
    """All multisets of charges in (c, m(c+1)+c] with total charge < (m+1)(c+1).

    This is the collection excluded when every point of charge > c is forbidden
    to exceed the partition (c+1)^(m+1).
    """
    if c < 1 or m < 0:
        raise ValueError("need c >= 1 and m >= 0")
    limit = (m + 1) * (c + 1)
    top = limit - 1
    members = set()

    def grow(smallest: int, parts: tuple, total: int):
        members.add(parts)
        for x in range(smallest, limit - total):
            grow(x, parts + (x,), total + x)

    grow(c + 1, (), 0)
    return ExceptionalCollection(c, max(top, c), frozenset(members))


def closed_range(k: int, j: int, c: int, chi, n: int) -> tuple[int, bool]:
    if c < 1 or k < c or j < c:
        raise ValueError("need c >= 1 and k, j >= c")
    half = Fraction(chi) / 2
    bound = min((k - c) // (2 * c), (j - c) // (2 * c))
    admissible = n % 2 == 1 or (j != half and k != half)
    return bound, admissible


def section_degree(k: int, chi) -> Fraction:
    return Fraction(k) - Fraction(chi) / 2


def degree_shift(d, k: int, chi) -> Fraction:
    d = Fraction(d)
    return d * k - (1 - d) * Fraction(chi) / 2


def solve_degree(j: int, k: int, chi) -> Fraction:
    """The d with degree_shift(d, k, chi) == j."""
    half = Fraction(chi) / 2
    if k + half == 0:
        raise ValueError("no solution: k + chi/2 = 0")
    if j + half == 0:
        raise ValueError("forces d = 0: j + chi/2 = 0")
    return (j + half) / (k + half)


def verify_vanishing_arithmetic(k_max: int, c_max: int) -> bool:
    """Every differential into column -1 at total degree <= floor((k-c)/2c) starts
    at a group that vanishes, i.e. q - r + 1 <= floor((k - rc)/2c)."""
    for c in range(1, c_max + 1):
        for k in range(c, k_max + 1):
            for q in range(0, (k - c) // (2 * c) + 1):
                for r in range(1, q + 2):
                    if q - r + 1 > (k - r * c) // (2 * c):
                        return False
    return True


def compare_partition_bounds(k_max: int, c_max: int, m_max: int) -> dict:
    """Compare floor((k' - |Lambda|)/2c), k' = k + (m+1)(c+1), against
    floor((k - (m+1)(c+1) + 1)/2c) for 0 <= k <= k_max. Reported, not asserted."""
    checked = 0
    mismatches = []
    for c in range(1, c_max + 1):
        for m in range(0, m_max + 1):
            weight = (m + 1) * (c + 1)
            q = weight - 1
            for k in range(0, k_max + 1):
                ours = (k + weight - q) // (2 * c)
                theirs = (k - weight + 1) // (2 * c)
                checked += 1
                if ours != theirs and len(mismatches) < 20:
                    mismatches.append({"k": k, "c": c, "m": m, "collection_bound": ours,
                                       "closed_form_bound": theirs})
    return {"checked": checked, "agree": not mismatches, "sample_mismatches": mismatches}
