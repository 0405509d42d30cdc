"""Rational homology of symmetric products as graded symmetric powers.

Only dimensions are tracked. Even-degree classes contribute polynomially and
odd-degree classes exteriorly, so the k-th power of a graded vector space V is
the coefficient of x^k in

    prod_{i even} (1 - t^i x)^(-dim V_i) * prod_{i odd} (1 + t^i x)^(dim V_i)

computed here with exact integer polynomial arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Mapping

__all__ = [
    "GradedDims",
    "sphere",
    "graded_sym",
    "sym_product_homology",
    "stabilization_monotone",
    "free_graded_commutative_dims",
]


@dataclass(frozen=True)
class GradedDims:
    """Finitely supported map degree -> dimension. Zero entries are dropped."""

    dims: Mapping[int, int]

    def __post_init__(self):
        clean = {}
        for d, n in dict(self.dims).items():
            d, n = int(d), int(n)
            if d < 0 or n < 0:
                raise ValueError("degrees and dimensions must be non-negative")
            if n:
                clean[d] = n
        object.__setattr__(self, "dims", dict(sorted(clean.items())))

    def __getitem__(self, d: int) -> int:
        return self.dims.get(d, 0)

    def __eq__(self, other):
        return isinstance(other, GradedDims) and self.dims == other.dims

    def __hash__(self):
        return hash(tuple(self.dims.items()))

    @property
    def top(self) -> int:
        return max(self.dims, default=0)

    def total(self) -> int:
        return sum(self.dims.values())

    def window(self, n_max: int) -> list[int]:
        return [self[d] for d in range(n_max + 1)]

    def to_json(self) -> dict:
        return {"dims": {str(d): n for d, n in self.dims.items()}}

    @classmethod
    def from_json(cls, obj: dict) -> "GradedDims":
        return cls({int(d): int(n) for d, n in obj["dims"].items()})

    def __repr__(self):
        return f"GradedDims({self.dims})"


def sphere(n: int) -> GradedDims:
    """Rational homology of S^n (n >= 1)."""
    return GradedDims({0: 1, n: 1})


Poly = dict  # degree -> coefficient


def _mul(a: Poly, b: Poly, top: int) -> Poly:
    out: Poly = {}
    for i, x in a.items():
        for j, y in b.items():
            if i + j <= top:
                out[i + j] = out.get(i + j, 0) + x * y
    return {d: v for d, v in out.items() if v}


def graded_sym(v: GradedDims, k: int, top_degree: int | None = None) -> GradedDims:
    """Dimensions of the k-th graded-symmetric power of ``v``, truncated at ``top_degree``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    top = k * v.top if top_degree is None else top_degree
    # series[j] = t-polynomial coefficient of x^j
    series: list[Poly] = [{0: 1}] + [{} for _ in range(k)]
    for deg, mult in v.dims.items():
        if deg % 2 == 0:
            factor = [{deg * j: comb(mult + j - 1, j)} if deg * j <= top else {} for j in range(k + 1)]
        else:
            factor = [{deg * j: comb(mult, j)} if deg * j <= top and j <= mult else {}
                      for j in range(k + 1)]
        new: list[Poly] = [{} for _ in range(k + 1)]
        for a in range(k + 1):
            if not series[a]:
                continue
            for b in range(k + 1 - a):
                if factor[b]:
                    prod = _mul(series[a], factor[b], top)
                    acc = new[a + b]
                    for d, c in prod.items():
                        acc[d] = acc.get(d, 0) + c
        series = new
    return GradedDims(series[k])


def sym_product_homology(h_m: GradedDims, k: int, top_degree: int | None = None) -> GradedDims:
    """Rational homology of Sym_k(M) from that of a connected M."""
    if h_m[0] != 1:
        raise ValueError("requires connected homology (dimension 1 in degree 0)")
    return graded_sym(h_m, k, top_degree)


def stabilization_monotone(h_m: GradedDims, k_max: int) -> bool:
    """Do the dimensions of Sym_k(M) never drop from k to k+1, degree by degree?"""
    if h_m[0] != 1:
        raise ValueError("requires connected homology (dimension 1 in degree 0)")
    top = k_max * h_m.top
    prev = graded_sym(h_m, 0, top)
    for k in range(1, k_max + 1):
        cur = graded_sym(h_m, k, top)
        if any(prev[d] > cur[d] for d in range(top + 1)):
            return False
        prev = cur
    return True


def free_graded_commutative_dims(generators: GradedDims, top_degree: int) -> GradedDims:
    """Dimensions of the free graded-commutative algebra on generators of the
    given degrees (all >= 1), up to ``top_degree``."""
    if generators[0]:
        raise ValueError("generators must have positive degree")
    series: Poly = {0: 1}
    for deg, mult in generators.dims.items():
        if deg % 2 == 0:
            factor = {deg * j: comb(mult + j - 1, j) for j in range(top_degree // deg + 1)}
        else:
            factor = {deg * j: comb(mult, j) for j in range(mult + 1) if deg * j <= top_degree}
        series = _mul(series, factor, top_degree)
    return GradedDims(series)
