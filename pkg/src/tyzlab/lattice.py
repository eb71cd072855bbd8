"""Lattice polytopes, fans and unimodular maps for small toric examples.

Polytopes live in half-space form ``{x : <x, u_i> <= lambda_i}``.  Vertices
are found by brute force over n-subsets of the inequalities with exact
rational elimination, which is plenty for n <= 4 and a dozen facets.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd, lcm
from functools import reduce
from typing import Sequence

from .exactpoly import as_fraction, fraction_str


class Unbounded(ValueError):
    pass


class UnknownCase(KeyError):
    pass


# ---------------------------------------------------------------------------
# small exact linear algebra
# ---------------------------------------------------------------------------

def solve_linear(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Unique solution of a square system, or None when singular."""
    n = len(A)
    M = [[Fraction(v) for v in row] + [Fraction(bv)] for row, bv in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        p = M[col][col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / p
                M[r] = [a - f * c for a, c in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def rank(rows: Sequence[Sequence]) -> int:
    M = [[Fraction(v) for v in row] for row in rows]
    if not M:
        return 0
    r = 0
    ncols = len(M[0])
    for col in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        for i in range(len(M)):
            if i != r and M[i][col] != 0:
                f = M[i][col] / M[r][col]
                M[i] = [a - f * c for a, c in zip(M[i], M[r])]
        r += 1
        if r == len(M):
            break
    return r


def null_vector(rows: Sequence[Sequence], n: int) -> list[Fraction] | None:
    """A nonzero kernel vector when the kernel is one-dimensional."""
    M = [[Fraction(v) for v in row] for row in rows]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        M[r] = [v / M[r][col] for v in M[r]]
        for i in range(len(M)):
            if i != r and M[i][col] != 0:
                f = M[i][col]
                M[i] = [a - f * c for a, c in zip(M[i], M[r])]
        pivots.append(col)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        return None
    d = [Fraction(0)] * n
    d[free[0]] = Fraction(1)
    for i, col in enumerate(pivots):
        d[col] = -M[i][free[0]]
    return d


def primitive_direction(v) -> tuple[int, ...]:
    """Primitive integer vector along a nonzero rational vector."""
    den = reduce(lcm, (Fraction(c).denominator for c in v), 1)
    ints = [int(Fraction(c) * den) for c in v]
    g = reduce(gcd, (abs(c) for c in ints))
    return tuple(c // g for c in ints)


def int_det(M: Sequence[Sequence[int]]) -> int:
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * int_det([row[:j] + row[j + 1:] for row in M[1:]])
               for j in range(n) if M[0][j])


def int_inverse(M: Sequence[Sequence[int]]) -> list[list[int]]:
    n = len(M)
    d = int_det(M)
    if abs(d) != 1:
        raise ValueError("matrix is not unimodular")
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]
            out[j][i] = (-1) ** (i + j) * int_det(minor) * d
    return out


def transpose(M):
    return [list(r) for r in zip(*M)]


def matvec(M, v):
    return [sum(a * b for a, b in zip(row, v)) for row in M]


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Fan:
    dim: int
    rays: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rays = tuple(tuple(int(c) for c in r) for r in self.rays)
        object.__setattr__(self, "rays", rays)
        for r in rays:
            if len(r) != self.dim:
                raise ValueError(f"ray {r} has wrong length")
            if reduce(gcd, (abs(c) for c in r)) != 1:
                raise ValueError(f"ray {r} is not primitive")
        if len(set(rays)) != len(rays):
            raise ValueError("duplicate rays")

    def to_json(self) -> dict:
        return {"dim": self.dim, "rays": [list(r) for r in self.rays]}

    @classmethod
    def from_json(cls, data) -> "Fan":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["dim"]), tuple(tuple(r) for r in data["rays"]))


class LatticePolytope:
    """Bounded polytope ``{x : <x, u_i> <= b_i}`` with integer normals."""

    def __init__(self, dim: int, inequalities: Sequence[tuple[Sequence[int], object]]):
        self.dim = int(dim)
        ineqs = []
        for normal, bound in inequalities:
            normal = tuple(int(c) for c in normal)
            if len(normal) != self.dim:
                raise ValueError(f"normal {normal} has wrong length")
            if not any(normal):
                raise ValueError("zero normal")
            ineqs.append((normal, as_fraction(bound)))
        self.inequalities: tuple[tuple[tuple[int, ...], Fraction], ...] = tuple(ineqs)
        self._check_bounded()
        self.vertices = self._vertices()
        if not self.vertices:
            raise ValueError("empty polytope")
        self.redundant = tuple(not self._is_facet(i) for i in range(len(self.inequalities)))

    # construction helpers
    def _check_bounded(self):
        normals = [u for u, _ in self.inequalities]
        n = self.dim
        if rank(normals) < n:
            raise Unbounded("normals do not span; the polytope contains a line")
        # recession cone {d : U d <= 0}; pointed, so nonzero iff it has an extreme ray
        for subset in itertools.combinations(range(len(normals)), n - 1):
            rows = [normals[i] for i in subset]
            if n > 1 and rank(rows) != n - 1:
                continue
            d = null_vector(rows, n) if n > 1 else [Fraction(1)]
            if d is None:
                continue
            for sgn in (1, -1):
                dd = [sgn * c for c in d]
                if all(dot(u, dd) <= 0 for u in normals):
                    raise Unbounded(f"recession direction {[fraction_str(c) for c in dd]}")

    def _vertices(self) -> tuple[tuple[Fraction, ...], ...]:
        n = self.dim
        found = set()
        for subset in itertools.combinations(self.inequalities, n):
            x = solve_linear([u for u, _ in subset], [b for _, b in subset])
            if x is None:
                continue
            if all(dot(u, x) <= b for u, b in self.inequalities):
                found.add(tuple(x))
        return tuple(sorted(found))

    def tight(self, x) -> list[int]:
        return [i for i, (u, b) in enumerate(self.inequalities) if dot(u, x) == b]

    def _is_facet(self, i: int) -> bool:
        on = [v for v in self.vertices if i in self.tight(v)]
        if len(on) < self.dim:
            return False
        base = on[0]
        diffs = [[a - b for a, b in zip(v, base)] for v in on[1:]]
        return rank(diffs) == self.dim - 1 if diffs else self.dim == 1

    # queries
    def contains(self, x) -> bool:
        return all(dot(u, x) <= b for u, b in self.inequalities)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for v in self.vertices for c in v)

    def bounding_box(self) -> list[tuple[int, int]]:
        return [(ceil(min(v[i] for v in self.vertices)), floor(max(v[i] for v in self.vertices)))
                for i in range(self.dim)]

    def vertex_set(self) -> frozenset:
        return frozenset(self.vertices)

    def adjacent_vertices(self, v) -> list[tuple[Fraction, ...]]:
        """Vertices sharing an edge with ``v`` (common tight normals of rank n-1)."""
        tv = set(self.tight(v))
        out = []
        for w in self.vertices:
            if w == v:
                continue
            common = tv & set(self.tight(w))
            if common and rank([self.inequalities[i][0] for i in common]) == self.dim - 1:
                out.append(w)
        return out

    def irredundant(self) -> "LatticePolytope":
        return LatticePolytope(self.dim, [q for q, r in zip(self.inequalities, self.redundant) if not r])

    def __eq__(self, other):
        return isinstance(other, LatticePolytope) and self.dim == other.dim and \
            self.vertex_set() == other.vertex_set()

    def __hash__(self):
        return hash((self.dim, self.vertex_set()))

    def __repr__(self):
        return f"LatticePolytope(dim={self.dim}, inequalities={len(self.inequalities)}, vertices={len(self.vertices)})"

    def to_json(self) -> dict:
        return {"dim": self.dim,
                "inequalities": [{"normal": list(u), "bound": fraction_str(b)} for u, b in self.inequalities]}

    @classmethod
    def from_json(cls, data) -> "LatticePolytope":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["dim"]), [(q["normal"], q["bound"]) for q in data["inequalities"]])


@dataclass(frozen=True)
class UnimodularMap:
    """Integer matrix with determinant +-1 plus an integer translation.

    With ``acts_on="points"`` the map is ``x -> A x + b`` on the polytope.
    With ``acts_on="rays"`` the matrix transforms fan rays ``u -> A u``; the
    induced map on polytopes is ``x -> A^{-T} x + b``.
    """
    matrix: tuple[tuple[int, ...], ...]
    translation: tuple[int, ...] = ()
    acts_on: str = "points"

    def __post_init__(self):
        m = tuple(tuple(int(c) for c in row) for row in self.matrix)
        object.__setattr__(self, "matrix", m)
        n = len(m)
        if any(len(row) != n for row in m):
            raise ValueError("matrix must be square")
        if abs(int_det([list(r) for r in m])) != 1:
            raise ValueError("matrix is not unimodular")
        t = tuple(int(c) for c in self.translation) or (0,) * n
        if len(t) != n:
            raise ValueError("translation has wrong length")
        object.__setattr__(self, "translation", t)
        if self.acts_on not in ("points", "rays"):
            raise ValueError("acts_on must be 'points' or 'rays'")

    @classmethod
    def identity(cls, n: int) -> "UnimodularMap":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def point_matrix(self) -> list[list[int]]:
        m = [list(r) for r in self.matrix]
        return m if self.acts_on == "points" else transpose(int_inverse(m))

    def with_translation(self, t: Sequence[int]) -> "UnimodularMap":
        return UnimodularMap(self.matrix, tuple(t), self.acts_on)

    def map_point(self, x):
        return tuple(a + b for a, b in zip(matvec(self.point_matrix(), x), self.translation))

    def map_ray(self, r):
        if self.acts_on == "rays":
            return tuple(matvec(self.matrix, r))
        return tuple(matvec(transpose(int_inverse([list(row) for row in self.matrix])), r))

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "translation": list(self.translation),
                "acts_on": self.acts_on}


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def anticanonical_polytope(fan: Fan) -> LatticePolytope:
    """``{x : <x, u> <= 1}`` over the rays of a complete fan."""
    if rank(fan.rays) < fan.dim:
        raise Unbounded("fan rays do not span")
    return LatticePolytope(fan.dim, [(r, 1) for r in fan.rays])


def lattice_points(poly: LatticePolytope) -> list[tuple[int, ...]]:
    box = poly.bounding_box()
    return [p for p in itertools.product(*(range(lo, hi + 1) for lo, hi in box)) if poly.contains(p)]


def apply_map(poly: LatticePolytope, T: UnimodularMap) -> LatticePolytope:
    """Image of ``poly`` under the affine map on points determined by ``T``.

    If ``y = A x + b`` then ``<x, u> <= c`` becomes ``<y, A^{-T} u> <= c + <A^{-T} u, b>``.
    """
    A = T.point_matrix()
    AinvT = transpose(int_inverse(A))
    ineqs = []
    for u, c in poly.inequalities:
        nu = matvec(AinvT, u)
        ineqs.append((nu, c + dot(nu, T.translation)))
    return LatticePolytope(poly.dim, ineqs)


def translate(poly: LatticePolytope, t: Sequence) -> LatticePolytope:
    return LatticePolytope(poly.dim, [(u, c + dot(u, t)) for u, c in poly.inequalities])


def find_translation(source: LatticePolytope, target: LatticePolytope, window: int = 3):
    """Integer vector ``t`` in ``[-window, window]^n`` with ``source + t == target``, else None."""
    sv = sorted(source.vertices)
    tv = target.vertex_set()
    if len(sv) != len(tv):
        return None
    # the lexicographically smallest vertex must go to the smallest target vertex
    t = tuple(a - b for a, b in zip(min(tv), sv[0]))
    if any(c.denominator != 1 or abs(c) > window for c in t):
        return None
    moved = frozenset(tuple(a + b for a, b in zip(v, t)) for v in sv)
    return tuple(int(c) for c in t) if moved == tv else None


@dataclass(frozen=True)
class Assumption1Result:
    holds: bool
    reason: str
    edge_directions: tuple = ()

    def __bool__(self):
        return self.holds


def satisfies_assumption1(poly: LatticePolytope) -> Assumption1Result:
    """Origin is a vertex whose edges point exactly along ``+e_1 .. +e_n``."""
    n = poly.dim
    origin = tuple(Fraction(0) for _ in range(n))
    if not poly.contains(origin):
        return Assumption1Result(False, "origin is not in the polytope")
    if origin not in poly.vertices:
        return Assumption1Result(False, "origin is not a vertex")
    dirs = tuple(sorted({primitive_direction(w) for w in poly.adjacent_vertices(origin)}, reverse=True))
    expected = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
    if set(dirs) != set(expected):
        return Assumption1Result(False, f"edge directions at the origin are {list(map(list, dirs))}", dirs)
    return Assumption1Result(True, "origin is a vertex with edges along +e_i", dirs)


def dilate(poly: LatticePolytope, alpha) -> tuple[LatticePolytope, bool]:
    alpha = as_fraction(alpha)
    if alpha <= 0:
        raise ValueError("dilation factor must be positive")
    out = LatticePolytope(poly.dim, [(u, c * alpha) for u, c in poly.inequalities])
    return out, out.is_integral()


# ---------------------------------------------------------------------------
# built-in cases
# ---------------------------------------------------------------------------

def _e(n, *pairs):
    v = [0] * n
    for i, c in pairs:
        v[i] += c
    return tuple(v)


def _box(n, lo=0, hi=None):
    out = []
    for i in range(n):
        out.append((_e(n, (i, -1)), -lo))
        if hi is not None:
            out.append((_e(n, (i, 1)), hi))
    return out


_FANS = {
    "dp6": [(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)],
    "dim3": [(1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, -1), (-1, 0, -1), (0, -1, 1)],
    "dim4a": [_e(4, (i, s)) for i in range(4) for s in (1, -1)] + [(1, 1, 1, 1), (-1, -1, -1, -1)],
    "dim4b": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, -1, 0), (0, 0, 0, 1), (0, 0, 0, -1),
              (0, 0, 1, 1), (0, 0, -1, -1), (-1, 0, 1, 0), (0, -1, -1, 0)],
    "dim4c": [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (-1, -1, -1, -1),
              (-1, -1, 0, 0), (0, 0, -1, -1), (1, 0, 1, 0), (0, 1, 0, 1)],
}

_MATRICES = {
    "dp6": [[1, 0], [0, 1]],
    "dim3": [[-1, 0, 0], [0, -1, 0], [0, 0, -1]],
    "dim4a": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 0], [0, 0, 0, -1]],
    "dim4b": [[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 1], [0, 0, 0, -1]],
    "dim4c": [[-1, 0, 1, 0], [0, -1, 0, 1], [0, 0, -1, 0], [0, 0, 0, -1]],
}

_POLYTOPES = {
    "dp6": _box(2, 0, 2) + [((1, -1), 1), ((-1, 1), 1)],
    "dim3": [((-1, 0, 0), 0), ((0, -1, 0), 0), ((0, 0, -1), 0), ((0, 0, 1), 2),
             ((1, 0, 1), 3), ((0, 1, -1), 1)],
    "dim4a": _box(4, 0, 2) + [((1, 1, -1, -1), 1), ((-1, -1, 1, 1), 1)],
    "dim4b": [((-1, 0, 0, 0), 0), ((0, -1, 0, 0), 0), ((0, 0, -1, 0), 0), ((0, 0, 1, 0), 2),
              ((0, 0, 0, -1), 0), ((0, 0, 0, 1), 2), ((0, 0, 1, -1), 1), ((0, 0, -1, 1), 1),
              ((1, 0, -1, 0), 1), ((0, 1, 1, 0), 3)],
    "dim4c": _box(4, 0) + [((1, 0, -1, 0), 1), ((0, 1, 0, -1), 1), ((0, 0, 1, 1), 3),
                           ((1, 1, 0, 0), 3), ((-1, -1, 1, 1), 1)],
}

# The reference dim4c polytope lists "x + y <= 1".  That bound is incompatible
# with the fan and matrix (which give 3) and with the dim4c system itself,
# which uses the lattice point (2,0,1,0).  Kept for the record.
DIM4C_AS_LISTED = _box(4, 0) + [((1, 0, -1, 0), 1), ((0, 1, 0, -1), 1), ((0, 0, 1, 1), 3),
                                 ((1, 1, 0, 0), 1), ((-1, -1, 1, 1), 1)]

CASES = tuple(_FANS)


@dataclass(frozen=True)
class Builtin:
    case: str
    fan: Fan
    normalization: UnimodularMap
    polytope: LatticePolytope


def builtin(case: str) -> Builtin:
    if case not in _FANS:
        raise UnknownCase(case)
    n = len(_MATRICES[case])
    fan = Fan(n, tuple(_FANS[case]))
    poly = LatticePolytope(n, _POLYTOPES[case])
    raw = UnimodularMap(tuple(map(tuple, _MATRICES[case])), acts_on="rays")
    moved = apply_map(anticanonical_polytope(fan), raw)
    t = find_translation(moved, poly)
    if t is None:
        raise ValueError(f"built-in {case}: fan, matrix and polytope are inconsistent")
    return Builtin(case, fan, raw.with_translation(t), poly)
