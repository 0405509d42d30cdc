"""Simplicial complexes, semisimplicial sets and the constructions on them.

Vertices are opaque, totally ordered tokens (ints, strings, tuples of ints ...);
a simplex is the strictly increasing tuple of its vertices, which also fixes its
orientation. All complexes are immutable.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Hashable, Iterable

from .errors import BudgetExceeded
from .exact_linalg import ChainComplex, IntMatrix, homology

__all__ = [
    "Simplex",
    "SimplicialComplex",
    "SemiSimplicialSet",
    "DEFAULT_CELL_BUDGET",
    "make_simplex",
    "from_maximal",
    "relabel",
    "link",
    "star",
    "join",
    "cone",
    "ordered",
    "chain_complex",
    "chain_complex_ss",
    "is_homologically_connected",
    "homological_connectivity",
    "reduced_betti",
    "first_nonvanishing_degree",
]

DEFAULT_CELL_BUDGET = 2_000_000

Simplex = tuple  # strictly increasing tuple of vertex identifiers


def make_simplex(vertices: Iterable[Any]) -> Simplex:
    vs = list(vertices)
    if not vs:
        raise ValueError("a simplex needs at least one vertex")
    s = tuple(sorted(vs))
    if len(set(s)) != len(s):
        raise ValueError(f"repeated vertex in face {vs!r}")
    return s


@dataclass(frozen=True)
class SimplicialComplex:
    vertices: frozenset
    faces: frozenset

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "faces", frozenset(self.faces))

    @classmethod
    def from_faces(cls, faces: Iterable[Simplex], check: bool = True) -> "SimplicialComplex":
        fs = frozenset(faces)
        verts = frozenset(v for f in fs for v in f)
        k = cls(verts, fs)
        if check:
            k.check_closed()
        return k

    @classmethod
    def empty(cls) -> "SimplicialComplex":
        return cls(frozenset(), frozenset())

    def check_closed(self) -> None:
        for f in self.faces:
            if tuple(sorted(f)) != f or len(set(f)) != len(f) or not f:
                raise ValueError(f"malformed face {f!r}")
            if len(f) > 1:
                for i in range(len(f)):
                    sub = f[:i] + f[i + 1:]
                    if sub not in self.faces:
                        raise ValueError(f"not downward closed: {sub!r} missing")
        if {(v,) for v in self.vertices} - self.faces:
            raise ValueError("every vertex must be a 0-face")

    def __len__(self):
        return len(self.faces)

    def __contains__(self, s):
        return s in self.faces

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.faces), default=0) - 1

    def is_empty(self) -> bool:
        return not self.faces

    @cached_property
    def by_dim(self) -> dict[int, list[Simplex]]:
        out: dict[int, list] = {}
        for f in self.faces:
            out.setdefault(len(f) - 1, []).append(f)
        for v in out.values():
            v.sort()
        return out

    def f_vector(self) -> list[int]:
        return [len(self.by_dim.get(p, ())) for p in range(self.dim + 1)]

    @cached_property
    def _cofaces(self) -> dict[Any, list[Simplex]]:
        idx: dict[Any, list] = {}
        for f in self.faces:
            for v in f:
                idx.setdefault(v, []).append(f)
        return idx

    def cofaces(self, s: Simplex) -> list[Simplex]:
        """All faces containing ``s`` (``s`` itself included)."""
        if not s:
            return list(self.faces)
        ss = set(s)
        pool = min((self._cofaces.get(v, []) for v in s), key=len)
        return [f for f in pool if len(f) >= len(s) and ss.issubset(f)]

    def maximal_faces(self) -> list[Simplex]:
        out = []
        for f in self.faces:
            if len(self.cofaces(f)) == 1:
                out.append(f)
        return sorted(out, key=lambda f: (len(f), f))

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return self.faces <= other.faces


def from_maximal(maximal_faces: Iterable[Iterable[Any]],
                 vertices: Iterable[Any] = ()) -> SimplicialComplex:
    """Smallest downward-closed complex containing the given faces."""
    faces = set()
    for mf in maximal_faces:
        s = make_simplex(mf)
        for r in range(1, len(s) + 1):
            faces.update(itertools.combinations(s, r))
    faces.update((v,) for v in vertices)
    return SimplicialComplex.from_faces(faces, check=False)


def relabel(k: SimplicialComplex, mapping: Callable[[Any], Any] | dict) -> SimplicialComplex:
    """Apply an injective vertex relabeling."""
    f = mapping.__getitem__ if isinstance(mapping, dict) else mapping
    image = {v: f(v) for v in k.vertices}
    if len(set(image.values())) != len(image):
        raise ValueError("relabeling must be injective")
    return SimplicialComplex.from_faces(
        (tuple(sorted(image[v] for v in s)) for s in k.faces), check=False)


def _require_face(k: SimplicialComplex, s: Simplex) -> Simplex:
    s = tuple(s)
    if s and s not in k.faces:
        raise ValueError(f"{s!r} is not a face of the complex")
    return s


def link(k: SimplicialComplex, s: Simplex) -> SimplicialComplex:
    """Faces disjoint from ``s`` whose union with ``s`` is a face.

    The empty simplex is accepted and has the whole complex as its link.
    """
    s = _require_face(k, s)
    if not s:
        return k
    ss = set(s)
    faces = set()
    for f in k.cofaces(s):
        if len(f) > len(s):
            faces.add(tuple(v for v in f if v not in ss))
    return SimplicialComplex.from_faces(faces, check=False)


def star(k: SimplicialComplex, s: Simplex) -> SimplicialComplex:
    """Closed star: every face of a face containing ``s``."""
    s = _require_face(k, s)
    if not s:
        return k
    faces = set()
    for f in k.cofaces(s):
        for r in range(1, len(f) + 1):
            faces.update(itertools.combinations(f, r))
    return SimplicialComplex.from_faces(faces, check=False)


def join(k1: SimplicialComplex, k2: SimplicialComplex) -> SimplicialComplex:
    if k1.vertices & k2.vertices:
        raise ValueError("join needs disjoint vertex sets; relabel first")
    faces = set(k1.faces) | set(k2.faces)
    for a in k1.faces:
        for b in k2.faces:
            faces.add(tuple(sorted(a + b)))
    return SimplicialComplex.from_faces(faces, check=False)


class _ConePoint:
    """Fresh apex vertex that sorts after every other token."""

    __slots__ = ()

    def __lt__(self, other):
        return False

    def __gt__(self, other):
        return not isinstance(other, _ConePoint)

    def __eq__(self, other):
        return isinstance(other, _ConePoint)

    def __hash__(self):
        return hash("_ConePoint")

    def __repr__(self):
        return "*"


APEX = _ConePoint()


def cone(k: SimplicialComplex, apex: Hashable | None = None) -> SimplicialComplex:
    apex = APEX if apex is None else apex
    if apex in k.vertices:
        raise ValueError("cone apex must be a fresh vertex")
    return join(k, SimplicialComplex.from_faces([(apex,)], check=False))


# --- semisimplicial sets ------------------------------------------------------


@dataclass(frozen=True)
class SemiSimplicialSet:
    """``simplices[p]`` lists the p-simplices; ``face_maps[p][j][i]`` is the index
    of ``d_i`` of the j-th p-simplex in ``simplices[p - 1]`` (``face_maps[0]`` is
    empty)."""

    simplices: tuple[tuple, ...]
    face_maps: tuple[tuple[tuple[int, ...], ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "simplices", tuple(tuple(x) for x in self.simplices))
        object.__setattr__(self, "face_maps",
                           tuple(tuple(tuple(f) for f in fm) for fm in self.face_maps))
        if len(self.face_maps) != len(self.simplices):
            raise ValueError("need one face-map table per dimension")
        for p, fm in enumerate(self.face_maps):
            if p == 0:
                if fm:
                    raise ValueError("0-simplices have no faces")
                continue
            if len(fm) != len(self.simplices[p]):
                raise ValueError(f"face table size mismatch in dimension {p}")
            for faces in fm:
                if len(faces) != p + 1:
                    raise ValueError(f"a {p}-simplex needs {p + 1} faces")
                for x in faces:
                    if not 0 <= x < len(self.simplices[p - 1]):
                        raise ValueError("face index out of range")
        self._check_identities()

    def _check_identities(self):
        # d_i d_j = d_{j-1} d_i for i < j
        for p in range(2, len(self.simplices)):
            below = self.face_maps[p - 1]
            for faces in self.face_maps[p]:
                for j in range(p + 1):
                    for i in range(j):
                        if below[faces[j]][i] != below[faces[i]][j - 1]:
                            raise ValueError("semisimplicial identity violated")

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def counts(self) -> list[int]:
        return [len(x) for x in self.simplices]


def ordered(k: SimplicialComplex, cell_budget: int = DEFAULT_CELL_BUDGET,
            max_dim: int | None = None) -> SemiSimplicialSet:
    """Semisimplicial set of simplices with a chosen ordering of their vertices;
    ``d_i`` deletes the i-th entry."""
    low = sum(len(k.by_dim.get(p, ())) * math.factorial(p + 1) for p in range(4))
    if low > cell_budget:
        raise BudgetExceeded(f"ordered complex needs {low} cells in dimensions 0-3, "
                             f"budget is {cell_budget}")
    top = k.dim if max_dim is None else min(max_dim, k.dim)
    simplices: list[list[tuple]] = []
    index: list[dict[tuple, int]] = []
    faces: list[list[tuple[int, ...]]] = []
    for p in range(top + 1):
        cells = sorted(w for s in k.by_dim.get(p, ()) for w in itertools.permutations(s))
        idx = {w: n for n, w in enumerate(cells)}
        simplices.append(cells)
        index.append(idx)
        if p == 0:
            faces.append([])
        else:
            prev = index[p - 1]
            faces.append([tuple(prev[w[:i] + w[i + 1:]] for i in range(p + 1)) for w in cells])
    return SemiSimplicialSet(tuple(map(tuple, simplices)), tuple(map(tuple, faces)))


# --- chains and homology ------------------------------------------------------


def chain_complex(k: SimplicialComplex, max_dim: int | None = None) -> ChainComplex:
    """Simplicial chains, oriented by sorted vertex order, optionally cut at ``max_dim``."""
    top = k.dim if max_dim is None else min(max_dim, k.dim)
    truncated = top < k.dim
    cells = [k.by_dim.get(p, []) for p in range(top + 1)]
    index = [{s: n for n, s in enumerate(cs)} for cs in cells]
    bds = []
    for p in range(1, top + 1):
        prev = index[p - 1]
        entries = {}
        for col, s in enumerate(cells[p]):
            for i in range(p + 1):
                entries[(prev[s[:i] + s[i + 1:]], col)] = -1 if i % 2 else 1
        bds.append(IntMatrix(len(cells[p - 1]), len(cells[p]), entries))
    return ChainComplex(tuple(len(c) for c in cells), tuple(bds), truncated)


def chain_complex_ss(x: SemiSimplicialSet, max_dim: int | None = None) -> ChainComplex:
    """Unnormalized chains ``d = sum (-1)^i d_i`` of a semisimplicial set."""
    top = x.dim if max_dim is None else min(max_dim, x.dim)
    bds = []
    for p in range(1, top + 1):
        entries: dict[tuple[int, int], int] = {}
        for col, fs in enumerate(x.face_maps[p]):
            for i, r in enumerate(fs):
                entries[(r, col)] = entries.get((r, col), 0) + (-1 if i % 2 else 1)
        bds.append(IntMatrix(len(x.simplices[p - 1]), len(x.simplices[p]), entries))
    return ChainComplex(tuple(len(s) for s in x.simplices[:top + 1]), tuple(bds), top < x.dim)


def reduced_betti(k: SimplicialComplex, max_degree: int | None = None, over: str = "Q") -> dict[int, int]:
    """Reduced Betti numbers (rank of reduced homology) by degree.

    The empty complex has reduced homology Z in degree -1.
    """
    if k.is_empty():
        return {-1: 1}
    top = k.dim if max_degree is None else min(max_degree, k.dim)
    h = homology(chain_complex(k, top + 1), range(top + 1), over=over)
    out = dict(h.betti)
    out[0] -= 1
    return out


def homological_connectivity(k: SimplicialComplex, limit: int | None = None) -> int | None:
    """Largest d with ``is_homologically_connected(k, d)``, searching up to ``limit``.

    Returns None when every degree up to ``limit`` (default: dim k) vanishes.
    """
    if k.is_empty():
        return -2
    limit = k.dim if limit is None else limit
    first = first_nonvanishing_degree(k, limit)
    return None if first is None else first - 1


def first_nonvanishing_degree(k: SimplicialComplex, up_to: int) -> int | None:
    """Smallest i <= up_to with reduced ``H_i(k; Z) != 0`` (-1 for the empty complex)."""
    if k.is_empty():
        return -1 if up_to >= -1 else None
    if up_to < 0:
        return None
    top = min(up_to, k.dim)
    cc = chain_complex(k, top + 1)
    h = homology(cc, range(top + 1), over="Z")
    for i in range(top + 1):
        b = h.betti[i] - (1 if i == 0 else 0)
        if b or h.torsion[i]:
            return i
    return None


def is_homologically_connected(k: SimplicialComplex, d: int) -> bool:
    """Homological d-connectivity: nonempty, connected and reduced ``H_i(k; Z) = 0``
    for ``i <= d``. Fundamental groups are not examined."""
    if d < -2:
        raise ValueError("connectivity is defined for d >= -2")
    if d == -2:
        return True
    if k.is_empty():
        return False
    if d == -1:
        return True
    top = min(d, k.dim)
    cc = chain_complex(k, top + 1)
    degs = range(top + 1)
    # rational ranks first; torsion only if those already vanish
    hq = homology(cc, degs, over="Q")
    if hq.betti[0] != 1 or any(hq.betti[i] for i in degs if i > 0):
        return False
    hz = homology(cc, degs, over="Z")
    return not any(hz.torsion[i] for i in degs)
