"""Exact integer linear algebra: Smith normal form, ranks and chain-complex homology.

Matrices are stored sparsely as ``{(row, col): value}`` with Python ints, so
nothing overflows. Smith normal form works in two phases: unit pivots are
eliminated sparsely (Markowitz-style choice of the cheapest ``±1`` entry);
whatever is left is typically tiny and handled by a dense reduction.
"""

from __future__ import annotations

import heapq
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

__all__ = [
    "IntMatrix",
    "InvariantFactors",
    "ChainComplex",
    "HomologySummary",
    "smith_invariant_factors",
    "rank_rational",
    "homology",
]


def _check_mode() -> bool:
    return os.environ.get("STABKIT_CHECK", "") not in ("", "0")


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix shape must be non-negative")
        clean = {}
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"entry ({r}, {c}) out of range for {self.rows}x{self.cols}")
            if not isinstance(v, int):
                raise TypeError("IntMatrix entries must be int")
            if v:
                clean[(r, c)] = v
        object.__setattr__(self, "entries", clean)

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "IntMatrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if nrows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged dense matrix")
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = int(v)
        return cls(nrows, ncols, entries)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        acc: dict[tuple[int, int], int] = {}
        for (r, k), v in self.entries.items():
            for c, w in by_row.get(k, ()):
                key = (r, c)
                acc[key] = acc.get(key, 0) + v * w
        return IntMatrix(self.rows, other.cols, acc)


@dataclass(frozen=True)
class InvariantFactors:
    factors: tuple[int, ...]

    def __post_init__(self):
        fs = tuple(self.factors)
        object.__setattr__(self, "factors", fs)
        for f in fs:
            if f <= 0:
                raise ValueError("invariant factors must be positive")
        for a, b in zip(fs, fs[1:]):
            if b % a:
                raise ValueError(f"divisibility chain broken: {a} does not divide {b}")

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    @property
    def torsion(self) -> list[int]:
        return [f for f in self.factors if f > 1]


# --- sparse elimination -------------------------------------------------------


class _Sparse:
    """Mutable row/column-indexed working copy used during elimination."""

    def __init__(self, m: IntMatrix):
        self.rows: dict[int, dict[int, int]] = {}
        self.cols: dict[int, set[int]] = {}
        for (r, c), v in m.entries.items():
            self.rows.setdefault(r, {})[c] = v
            self.cols.setdefault(c, set()).add(r)

    def eliminate_unit(self, r: int, c: int) -> list[int]:
        """Pivot on the unit at (r, c); delete row r and column c.

        Returns the columns whose contents changed.
        """
        prow = self.rows[r]
        p = prow[c]
        touched = set()
        for i in list(self.cols[c]):
            if i == r:
                continue
            row = self.rows[i]
            factor = row[c] * p  # p == p**-1 for units
            for j, v in prow.items():
                nv = row.get(j, 0) - factor * v
                if nv:
                    if j not in row:
                        self.cols[j].add(i)
                    row[j] = nv
                else:
                    if j in row:
                        del row[j]
                        self.cols[j].discard(i)
                touched.add(j)
            if not row:
                del self.rows[i]
        for j in prow:
            self.cols[j].discard(r)
            if not self.cols[j]:
                del self.cols[j]
            touched.add(j)
        del self.rows[r]
        touched.discard(c)
        return [j for j in touched if j in self.cols]

    def unit_phase(self) -> int:
        """Eliminate every reachable unit pivot; return how many were removed."""
        count = 0
        heap = [(len(rs), c) for c, rs in self.cols.items()]
        heapq.heapify(heap)
        while heap:
            size, c = heapq.heappop(heap)
            rs = self.cols.get(c)
            if rs is None:
                continue
            if len(rs) != size:
                heapq.heappush(heap, (len(rs), c))
                continue
            best = None
            for r in rs:
                v = self.rows[r][c]
                if v == 1 or v == -1:
                    cost = len(self.rows[r])
                    if best is None or cost < best[0]:
                        best = (cost, r)
            if best is None:
                continue
            for j in self.eliminate_unit(best[1], c):
                heapq.heappush(heap, (len(self.cols[j]), j))
            count += 1
        return count

    def dense_remainder(self) -> list[list[int]]:
        rlist = sorted(self.rows)
        clist = sorted(self.cols)
        cidx = {c: k for k, c in enumerate(clist)}
        out = []
        for r in rlist:
            row = [0] * len(clist)
            for c, v in self.rows[r].items():
                row[cidx[c]] = v
            out.append(row)
        return out


def _dense_smith_diagonal(a: list[list[int]]) -> list[int]:
    """Nonzero diagonal of the Smith form of a dense integer matrix (destructive)."""
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < m and t < n:
        # smallest nonzero entry in the trailing block
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                v = a[i][t]
                if v:
                    q = v // p
                    ri, rt = a[i], a[t]
                    for j in range(t, n):
                        if rt[j]:
                            ri[j] -= q * rt[j]
                    if ri[t]:
                        dirty = True
            rt = a[t]
            for j in range(t + 1, n):
                v = rt[j]
                if v:
                    q = v // p
                    for i in range(t, m):
                        if a[i][t]:
                            a[i][j] -= q * a[i][t]
                    if rt[j]:
                        dirty = True
            if dirty:
                # move the smallest remaining entry of row/column t to the pivot
                cand = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
                cand += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
                _, i, j = min(cand)
                a[t], a[i] = a[i], a[t]
                if j != t:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                continue
            # row and column cleared; enforce divisibility on the trailing block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            rb, rt = a[bad], a[t]
            for j in range(t, n):
                rt[j] += rb[j]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def smith_invariant_factors(m: IntMatrix) -> InvariantFactors:
    """Nonzero invariant factors ``d1 | d2 | ...`` of ``m``."""
    work = _Sparse(m)
    units = work.unit_phase()
    rest = _dense_smith_diagonal(work.dense_remainder()) if work.rows else []
    return InvariantFactors(tuple([1] * units + sorted(rest)))


def _bareiss_rank(a: list[list[int]]) -> int:
    m = len(a)
    n = len(a[0]) if m else 0
    rank = 0
    prev = 1
    col = 0
    rows = [list(r) for r in a]
    while rank < m and col < n:
        piv = None
        for i in range(rank, m):
            if rows[i][col]:
                if piv is None or abs(rows[i][col]) < abs(rows[piv][col]):
                    piv = i
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for i in range(rank + 1, m):
            ri = rows[i]
            f = ri[col]
            for j in range(col + 1, n):
                ri[j] = (p * ri[j] - f * rows[rank][j]) // prev
            ri[col] = 0
        prev = p
        rank += 1
        col += 1
    return rank


def rank_rational(m: IntMatrix) -> int:
    """Rank of ``m`` over the rationals."""
    work = _Sparse(m)
    units = work.unit_phase()
    if not work.rows:
        return units
    return units + _bareiss_rank(work.dense_remainder())


# --- chain complexes ----------------------------------------------------------


@dataclass(frozen=True)
class ChainComplex:
    """Free chain complex ``C_0 <- C_1 <- ... <- C_top``.

    ``boundaries[i - 1]`` is the matrix of ``d_i : C_i -> C_{i-1}`` (rows index
    ``C_{i-1}``). When ``truncated`` is set the complex was cut off above
    ``top`` and homology in degree ``top`` is unavailable.
    """

    dims: tuple[int, ...]
    boundaries: tuple[IntMatrix, ...]
    truncated: bool = False

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        if any(d < 0 for d in self.dims):
            raise ValueError("negative chain group rank")
        if len(self.boundaries) != max(len(self.dims) - 1, 0):
            raise ValueError("need exactly one boundary matrix per positive degree")
        for i, b in enumerate(self.boundaries, start=1):
            if b.shape != (self.dims[i - 1], self.dims[i]):
                raise ValueError(f"boundary d_{i} has shape {b.shape}, expected "
                                 f"{(self.dims[i - 1], self.dims[i])}")
        for i in range(1, len(self.boundaries)):
            if not (self.boundaries[i - 1] @ self.boundaries[i]).is_zero():
                raise ValueError(f"d_{i} o d_{i + 1} != 0")

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def boundary(self, i: int) -> IntMatrix:
        """``d_i``; zero maps outside the stored range."""
        if 1 <= i <= len(self.boundaries):
            return self.boundaries[i - 1]
        rows = self.dims[i - 1] if 0 <= i - 1 < len(self.dims) else 0
        cols = self.dims[i] if 0 <= i < len(self.dims) else 0
        return IntMatrix.zero(rows, cols)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * d for i, d in enumerate(self.dims))

    def valid_degrees(self) -> range:
        return range(0, self.top if self.truncated else self.top + 1)


@dataclass(frozen=True)
class HomologySummary:
    """``H_i = Z^betti[i] + sum_j Z/torsion[i][j]`` for each computed degree."""

    betti: dict[int, int]
    torsion: dict[int, list[int]]

    def degrees(self) -> list[int]:
        return sorted(self.betti)

    def is_trivial(self, i: int) -> bool:
        return self.betti[i] == 0 and not self.torsion[i]

    def as_dict(self) -> dict:
        return {str(i): {"betti": self.betti[i], "torsion": list(self.torsion[i])}
                for i in self.degrees()}


def homology(c: ChainComplex, degrees: Iterable[int] | None = None, *,
             over: str = "Z") -> HomologySummary:
    """Integral (or, with ``over="Q"``, rational) homology in the given degrees.

    ``over="Q"`` is the rank-only fast path: torsion lists come back empty.
    """
    if over not in ("Z", "Q"):
        raise ValueError("over must be 'Z' or 'Q'")
    valid = c.valid_degrees()
    degs = list(valid) if degrees is None else list(degrees)
    for i in degs:
        if i not in valid:
            raise ValueError(f"degree out of range: {i}")

    ranks: dict[int, int] = {}
    snfs: dict[int, InvariantFactors] = {}

    def rank_of(i: int) -> int:
        if i not in ranks:
            if over == "Z" or i in snfs:
                ranks[i] = len(snf_of(i))
            else:
                ranks[i] = rank_rational(c.boundary(i))
        return ranks[i]

    def snf_of(i: int) -> InvariantFactors:
        if i not in snfs:
            snfs[i] = smith_invariant_factors(c.boundary(i))
            ranks[i] = len(snfs[i])
        return snfs[i]

    betti, torsion = {}, {}
    for i in degs:
        betti[i] = c.dims[i] - rank_of(i) - rank_of(i + 1)
        torsion[i] = snf_of(i + 1).torsion if over == "Z" else []

    if _check_mode() and not c.truncated:
        full = [c.dims[i] - rank_of(i) - rank_of(i + 1) for i in range(len(c.dims))]
        if sum((-1) ** i * b for i, b in enumerate(full)) != c.euler_characteristic():
            raise AssertionError("Euler-Poincare identity violated")
    return HomologySummary(betti, torsion)
