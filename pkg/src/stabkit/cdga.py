"""Free graded-commutative differential algebras over Q (Sullivan algebras).

A monomial is an exponent vector aligned with the declared generator order;
odd generators appear with exponent 0 or 1. Products are brought back to the
declared order with the Koszul sign, counted as inversions between odd factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm
from typing import Mapping

from .exact_linalg import IntMatrix, rank_rational
from .symmetric_powers import GradedDims, free_graded_commutative_dims

__all__ = [
    "GeneratorSpec",
    "Monomial",
    "Polynomial",
    "SullivanAlgebra",
    "cohomology",
    "is_cocycle",
    "is_exact",
    "model_sym_sphere",
    "model_odd_sphere",
    "model_mapping_homology_sphere",
    "model_mapping_cp2",
    "loop_homotopy_dims",
    "stable_component_homology",
    "algebra_from_json",
    "algebra_to_json",
]

Monomial = tuple  # exponent vector
Polynomial = dict  # Monomial -> Fraction, no zero values


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int

    def __post_init__(self):
        if not self.name or not str(self.name).isidentifier():
            raise ValueError(f"generator name must be an identifier, got {self.name!r}")
        if self.degree < 2:
            raise ValueError(f"generator {self.name} has degree {self.degree}; "
                             "only simply connected models (degree >= 2) are supported")

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1


@dataclass(frozen=True)
class SullivanAlgebra:
    generators: tuple[GeneratorSpec, ...]
    differential: Mapping[str, Polynomial] = field(default_factory=dict)
    truncation: int | None = None

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        names = [g.name for g in gens]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        unknown = set(self.differential) - set(names)
        if unknown:
            raise ValueError(f"differential given for unknown generators {sorted(unknown)}")
        diff = {}
        for g in gens:
            p = {tuple(m): Fraction(c) for m, c in dict(self.differential.get(g.name, {})).items()
                 if Fraction(c) != 0}
            for m in p:
                self._check_monomial(m)
                if self.degree_of(m) != g.degree + 1:
                    raise ValueError(f"d({g.name}) must have degree {g.degree + 1}")
            diff[g.name] = p
        object.__setattr__(self, "differential", diff)
        if self.truncation is None:
            object.__setattr__(self, "truncation", 2 * max((g.degree for g in gens), default=0) + 2)
        for i in range(len(gens)):
            if self.d(self.d(self.generator(i))):
                raise ValueError(f"d^2 != 0 on generator {gens[i].name}")

    # basic structure

    def index(self, name: str) -> int:
        for i, g in enumerate(self.generators):
            if g.name == name:
                return i
        raise KeyError(name)

    def generator(self, i: int) -> Polynomial:
        m = [0] * len(self.generators)
        m[i] = 1
        return {tuple(m): Fraction(1)}

    def monomial(self, **exponents: int) -> Monomial:
        m = [0] * len(self.generators)
        for name, e in exponents.items():
            m[self.index(name)] = e
        m = tuple(m)
        self._check_monomial(m)
        return m

    def _check_monomial(self, m: Monomial):
        if len(m) != len(self.generators):
            raise ValueError("monomial length does not match the generators")
        for g, e in zip(self.generators, m):
            if e < 0 or (g.odd and e > 1):
                raise ValueError(f"bad exponent {e} for generator {g.name}")

    def degree_of(self, m: Monomial) -> int:
        return sum(e * g.degree for g, e in zip(self.generators, m))

    def top_generator_degree(self) -> int:
        return max((g.degree for g in self.generators), default=0)

    # arithmetic

    def mul_monomials(self, a: Monomial, b: Monomial) -> tuple[int, Monomial | None]:
        sign = 1
        odd_a = [i for i, (g, e) in enumerate(zip(self.generators, a)) if g.odd and e]
        for j, (g, e) in enumerate(zip(self.generators, b)):
            if g.odd and e:
                if a[j]:
                    return 0, None
                # b's factor j moves left past a's odd factors of larger index
                if sum(1 for i in odd_a if i > j) % 2:
                    sign = -sign
        return sign, tuple(x + y for x, y in zip(a, b))

    def mul(self, p: Polynomial, q: Polynomial) -> Polynomial:
        out: Polynomial = {}
        for ma, ca in p.items():
            for mb, cb in q.items():
                s, m = self.mul_monomials(ma, mb)
                if s:
                    out[m] = out.get(m, 0) + s * ca * cb
        return {m: c for m, c in out.items() if c}

    def add(self, p: Polynomial, q: Polynomial, scale=1) -> Polynomial:
        out = dict(p)
        for m, c in q.items():
            out[m] = out.get(m, 0) + scale * c
        return {m: c for m, c in out.items() if c}

    def d_monomial(self, m: Monomial) -> Polynomial:
        out: Polynomial = {}
        n = len(self.generators)
        for i, e in enumerate(m):
            if not e:
                continue
            g = self.generators[i]
            prefix = tuple(m[:i]) + (0,) * (n - i)
            suffix = (0,) * (i + 1) + tuple(m[i + 1:])
            rest = [0] * n
            rest[i] = e - 1
            # d(g^e) = e g^(e-1) dg for even g; e = 1 for odd g
            inner = self.mul({tuple(rest): Fraction(e)}, self.differential[g.name])
            term = self.mul(self.mul({prefix: Fraction(1)}, inner), {suffix: Fraction(1)})
            sign = -1 if self.degree_of(prefix) % 2 else 1
            out = self.add(out, term, sign)
        return out

    def d(self, p: Polynomial) -> Polynomial:
        out: Polynomial = {}
        for m, c in p.items():
            out = self.add(out, self.d_monomial(m), c)
        return out

    def basis(self, degree: int) -> list[Monomial]:
        """Monomials of the given total degree, in a fixed order."""
        out = []
        n = len(self.generators)

        def grow(i: int, left: int, cur: list):
            if i == n:
                if left == 0:
                    out.append(tuple(cur))
                return
            g = self.generators[i]
            top = 1 if g.odd else left // g.degree
            for e in range(min(top, left // g.degree) + 1):
                cur.append(e)
                grow(i + 1, left - e * g.degree, cur)
                cur.pop()

        if degree >= 0:
            grow(0, degree, [])
        return sorted(out)

    def is_minimal(self) -> bool:
        return not any(sum(m) == 1 for p in self.differential.values() for m in p)

    def __str__(self):
        parts = []
        for g in self.generators:
            parts.append(f"{g.name}[{g.degree}]: d = {self.format(self.differential[g.name])}")
        return "; ".join(parts)

    def format(self, p: Polynomial) -> str:
        if not p:
            return "0"
        terms = []
        for m, c in sorted(p.items()):
            mono = "*".join(g.name if e == 1 else f"{g.name}^{e}"
                            for g, e in zip(self.generators, m) if e) or "1"
            terms.append(f"{c}*{mono}" if c != 1 else mono)
        return " + ".join(terms)


def _differential_matrix(a: SullivanAlgebra, degree: int) -> IntMatrix:
    """Integer matrix of d: A^degree -> A^(degree+1), columns rescaled to clear denominators."""
    src = a.basis(degree)
    dst = a.basis(degree + 1)
    row = {m: i for i, m in enumerate(dst)}
    entries = {}
    for j, m in enumerate(src):
        img = a.d_monomial(m)
        scale = lcm(*(c.denominator for c in img.values())) if img else 1
        for mm, c in img.items():
            entries[(row[mm], j)] = int(c * scale)
    return IntMatrix(len(dst), len(src), entries)


def _check_window(a: SullivanAlgebra, n_max: int):
    if n_max + 1 > a.truncation:
        raise ValueError(f"truncation too small: window {n_max} needs truncation >= {n_max + 1}, "
                         f"algebra has {a.truncation}")


def cohomology(a: SullivanAlgebra, n_max: int) -> GradedDims:
    """dim H^i for 0 <= i <= n_max."""
    _check_window(a, n_max)
    ranks = {-1: 0}
    for i in range(n_max + 1):
        ranks[i] = rank_rational(_differential_matrix(a, i))
    return GradedDims({i: len(a.basis(i)) - ranks[i] - ranks[i - 1] for i in range(n_max + 1)})


def is_cocycle(a: SullivanAlgebra, p: Polynomial) -> bool:
    return not a.d(p)


def _homogeneous_degree(a: SullivanAlgebra, p: Polynomial) -> int:
    degs = {a.degree_of(m) for m in p}
    if len(degs) != 1:
        raise ValueError("element must be nonzero and homogeneous")
    return degs.pop()


def is_exact(a: SullivanAlgebra, p: Polynomial) -> bool:
    """Is ``p`` in the image of d? (The zero element is exact.)"""
    if not p:
        return True
    deg = _homogeneous_degree(a, p)
    _check_window(a, deg)
    mat = _differential_matrix(a, deg - 1) if deg >= 1 else IntMatrix.zero(len(a.basis(deg)), 0)
    row = {m: i for i, m in enumerate(a.basis(deg))}
    scale = lcm(*(c.denominator for c in p.values()))
    extra = {(row[m], mat.cols): int(c * scale) for m, c in p.items()}
    augmented = IntMatrix(mat.rows, mat.cols + 1, {**mat.entries, **extra})
    return rank_rational(augmented) == rank_rational(mat)


# --- the explicit models ------------------------------------------------------


def _power(a_idx: int, e: int, n: int) -> Monomial:
    m = [0] * n
    m[a_idx] = e
    return tuple(m)


def model_sym_sphere(n: int, c: int, truncation: int | None = None) -> SullivanAlgebra:
    """Minimal model of the c-fold symmetric power of S^n, n even:
    generators a (degree n), b (degree (c+1)n - 1), da = 0, db = a^(c+1)."""
    if n < 2 or n % 2:
        raise ValueError("model_sym_sphere needs an even n >= 2; use model_odd_sphere for odd n")
    if c < 1:
        raise ValueError("c must be >= 1")
    gens = (GeneratorSpec("a", n), GeneratorSpec("b", (c + 1) * n - 1))
    return SullivanAlgebra(gens, {"a": {}, "b": {_power(0, c + 1, 2): Fraction(1)}}, truncation)


def model_odd_sphere(n: int, truncation: int | None = None) -> SullivanAlgebra:
    if n < 3 or n % 2 == 0:
        raise ValueError("model_odd_sphere needs an odd n >= 3")
    return SullivanAlgebra((GeneratorSpec("a", n),), {"a": {}}, truncation)


def model_mapping_homology_sphere(n: int, c: int, truncation: int | None = None) -> SullivanAlgebra:
    """Model for maps from an even-dimensional homology n-sphere into Sym_c(S^n)_Q
    (nonzero degree): generators b (degree n), v (degree cn - 1), dv = b^c."""
    if n < 2 or n % 2:
        raise ValueError("n must be even and >= 2")
    if c < 1 or c * n - 1 < 1:
        raise ValueError("degenerate: c*n - 1 < 1")
    gens = (GeneratorSpec("b", n), GeneratorSpec("v", c * n - 1))
    return SullivanAlgebra(gens, {"b": {}, "v": {_power(0, c, 2): Fraction(1)}}, truncation)


def model_mapping_cp2(c: int, truncation: int | None = None) -> SullivanAlgebra:
    """Model for degree-one maps CP^2 -> Sym_c(S^4)_Q.

    For c = 1 the lowest odd generator has a linear term in its differential,
    so that instance is not minimal.
    """
    if c < 1:
        raise ValueError("c must be >= 1")
    gens = (
        GeneratorSpec("x4", 4),
        GeneratorSpec("x2", 2),
        GeneratorSpec("y_top", 4 * (c + 1) - 1),
        GeneratorSpec("y_mid", 4 * (c + 1) - 3),
        GeneratorSpec("y_low", 4 * (c + 1) - 5),
    )

    def mono(e4: int, e2: int) -> Monomial:
        return (e4, e2, 0, 0, 0)

    diff = {
        "x4": {},
        "x2": {},
        "y_top": {mono(c + 1, 0): Fraction(1)},
        "y_mid": {mono(c, 1): Fraction(c + 1)},
        "y_low": {mono(c, 0): Fraction(c + 1), mono(c - 1, 2): Fraction(comb(c + 1, 2))},
    }
    return SullivanAlgebra(gens, diff, truncation)


# --- loop spaces --------------------------------------------------------------


def loop_homotopy_dims(a: SullivanAlgebra, n: int) -> GradedDims:
    """Rational homotopy of the n-fold loop space: generator degrees shifted down by n,
    keeping only positive degrees."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not a.is_minimal():
        raise ValueError("requires minimal model")
    dims: dict[int, int] = {}
    for g in a.generators:
        if g.degree - n >= 1:
            dims[g.degree - n] = dims.get(g.degree - n, 0) + 1
    return GradedDims(dims)


def stable_component_homology(a: SullivanAlgebra, n: int, window: int | None = None) -> GradedDims:
    """Rational homology of a component of the n-fold loop space: free graded-commutative
    on its rational homotopy."""
    pi = loop_homotopy_dims(a, n)
    window = max(pi.top, 1) * 2 if window is None else window
    return free_graded_commutative_dims(pi, window)


# --- JSON ---------------------------------------------------------------------


def algebra_to_json(a: SullivanAlgebra) -> dict:
    names = [g.name for g in a.generators]
    diff = {}
    for g in a.generators:
        terms = []
        for m, c in sorted(a.differential[g.name].items()):
            terms.append([{nm: e for nm, e in zip(names, m) if e}, str(c)])
        diff[g.name] = terms
    return {
        "schema": "stabkit/1",
        "generators": [{"name": g.name, "degree": g.degree} for g in a.generators],
        "differential": diff,
        "truncation": a.truncation,
    }


def algebra_from_json(obj: dict) -> SullivanAlgebra:
    gens = tuple(GeneratorSpec(str(g["name"]), int(g["degree"])) for g in obj["generators"])
    names = [g.name for g in gens]
    diff = {}
    for name, terms in obj.get("differential", {}).items():
        poly: dict = {}
        for exps, coeff in terms:
            bad = set(exps) - set(names)
            if bad:
                raise ValueError(f"unknown generators in differential: {sorted(bad)}")
            m = tuple(int(exps.get(nm, 0)) for nm in names)
            poly[m] = poly.get(m, 0) + Fraction(str(coeff))
        diff[name] = poly
    return SullivanAlgebra(gens, diff, obj.get("truncation"))
