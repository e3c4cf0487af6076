"""Edge-cone geometry: incidence vectors, membership, facets and regime classification.

Everything that decides membership or facet structure runs on exact
rationals. Only the Omega* predicate is evaluated on floats, since it is fed
Gaussian samples.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from itertools import combinations
from math import gcd, isqrt
from typing import Optional, Sequence

import numpy as np

from .graphon import SkeletonGraph, StepGraphon, concentration_vector, skeleton_graph
from .simplex import solve_lp

L_TOLERANCE = 1e-9


@dataclass(frozen=True)
class IncidenceMatrix:
    """Columns z_j = (e_a + e_b)/2 for skeleton edges (a, b), in canonical edge order."""

    q: int
    edges: tuple[tuple[int, int], ...]
    columns: tuple[tuple[Fraction, ...], ...]

    @property
    def k(self) -> int:
        return len(self.columns)

    def matrix(self) -> list[list[Fraction]]:
        """Row-major q x k matrix Z."""
        return [[col[i] for col in self.columns] for i in range(self.q)]

    @cached_property
    def integer_columns(self) -> np.ndarray:
        """2 Z as an integer array of shape (k, q)."""
        return np.array([[int(2 * v) for v in col] for col in self.columns], dtype=np.int64)


def incidence_matrix(s: SkeletonGraph) -> IncidenceMatrix:
    half = Fraction(1, 2)
    cols = []
    for a, b in s.sorted_edges:
        col = [Fraction(0)] * s.q
        col[a] += half
        col[b] += half
        cols.append(tuple(col))
    return IncidenceMatrix(s.q, s.sorted_edges, tuple(cols))


def has_odd_cycle(s: SkeletonGraph) -> bool:
    """Self-loop, or a non-bipartite component (2-colouring search)."""
    if any(i == j for i, j in s.edges):
        return True
    color = [-1] * s.q
    for start in range(s.q):
        if color[start] != -1:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            u = stack.pop()
            for v in s.neighbors(u):
                if color[v] == -1:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return True
    return False


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    rows = [list(r) for r in rows]
    pivots: list[int] = []
    if not rows:
        return rows, pivots
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r][c]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    if not vectors:
        return 0
    return len(_rref([list(map(Fraction, v)) for v in vectors])[1])


def cone_dimension(z: IncidenceMatrix) -> int:
    """Rank of Z over the rationals."""
    return rank(z.columns)


def expected_cone_dimension(s: SkeletonGraph) -> int:
    """Dimension predicted for a connected skeleton: q with an odd cycle, q-1 otherwise."""
    if not s.is_connected():
        raise ValueError("dimension formula only applies to connected skeletons")
    return s.q if has_odd_cycle(s) else s.q - 1


def primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Scale a nonzero rational vector to the primitive integer vector in its direction."""
    v = [Fraction(x) for x in v]
    lcm = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in v), 1)
    ints = [int(x * lcm) for x in v]
    g = reduce(gcd, (abs(i) for i in ints), 0)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(i // g for i in ints)


class Verdict(str, enum.Enum):
    OUTSIDE = "Outside"
    BOUNDARY = "Boundary"
    INTERIOR = "Interior"


@dataclass(frozen=True)
class ConeMembership:
    """Tri-state verdict with certificate.

    For Interior/Boundary ``coefficients`` satisfies Z c = x with c >= 0
    (all strictly positive for Interior). For Outside ``separator`` is an
    integer vector w with w.z_j >= 0 for every column and w.x < 0.
    """

    verdict: Verdict
    coefficients: Optional[tuple[Fraction, ...]] = None
    separator: Optional[tuple[int, ...]] = None

    @property
    def inside(self) -> bool:
        return self.verdict is not Verdict.OUTSIDE


def cone_membership(z: IncidenceMatrix, x: Sequence[Fraction]) -> ConeMembership:
    """Solve ``max t  s.t.  Z c = x, c >= t`` exactly.

    Written with c = d + t*1, d >= 0, t >= 0; t >= 0 loses nothing because any
    feasible c >= 0 already gives t = min c >= 0.
    """
    if len(x) != z.q:
        raise ValueError(f"point has dimension {len(x)}, cone lives in R^{z.q}")
    x = [Fraction(v) for v in x]
    zmat = z.matrix()
    if z.k == 0:
        if all(v == 0 for v in x):
            return ConeMembership(Verdict.BOUNDARY, coefficients=())
        w = [-v for v in x]
        return ConeMembership(Verdict.OUTSIDE, separator=primitive(w))
    a = [row + [sum(row)] for row in zmat]
    cost = [Fraction(0)] * z.k + [Fraction(-1)]
    res = solve_lp(a, x, cost)
    if res.status == "infeasible":
        return ConeMembership(Verdict.OUTSIDE, separator=primitive(res.farkas))
    assert res.status == "optimal"
    t = res.x[-1]
    coeffs = tuple(d + t for d in res.x[:-1])
    verdict = Verdict.INTERIOR if t > 0 else Verdict.BOUNDARY
    return ConeMembership(verdict, coefficients=coeffs)


@dataclass(frozen=True)
class FacetSet:
    """Primitive integer normals v with v.z >= 0 on every generator.

    ``active`` lists indices into ``normals``; ``None`` means no x* was applied.
    """

    q: int
    normals: tuple[tuple[int, ...], ...]
    active: Optional[tuple[int, ...]] = None

    def active_normals(self) -> tuple[tuple[int, ...], ...]:
        if self.active is None:
            raise ValueError("no active set computed; call active_facets first")
        return tuple(self.normals[i] for i in self.active)


def _null_vector(rows: list[list[Fraction]], q: int) -> list[Fraction]:
    red, pivots = _rref(rows)
    free = [c for c in range(q) if c not in pivots]
    assert len(free) == 1
    f = free[0]
    v = [Fraction(0)] * q
    v[f] = Fraction(1)
    for r, p in enumerate(pivots):
        v[p] = -red[r][f]
    return v


@lru_cache(maxsize=256)
def facet_hyperplanes(z: IncidenceMatrix) -> FacetSet:
    """Supporting hyperplanes spanned by q-1 independent generators.

    For degenerate (not full-dimensional) cones both orientations of a
    supporting normal can qualify; both are kept.
    """
    q = z.q
    if q < 2:
        raise ValueError("facet hyperplanes are undefined for q = 1")
    gens = z.integer_columns
    normals: list[tuple[int, ...]] = []
    seen = set()
    for subset in combinations(range(z.k), q - 1):
        rows = [list(z.columns[j]) for j in subset]
        if rank(rows) != q - 1:
            continue
        v = primitive(_null_vector(rows, q))
        for cand in (v, tuple(-c for c in v)):
            if cand in seen:
                continue
            if (gens @ np.array(cand, dtype=np.int64) >= 0).all():
                seen.add(cand)
                normals.append(cand)
    return FacetSet(q, tuple(sorted(normals)))


def _dot(v: Sequence, x: Sequence):
    return sum(a * b for a, b in zip(v, x))


def active_facets(f: FacetSet, xstar: Sequence[Fraction]) -> FacetSet:
    """Facets whose hyperplane contains x* (v.x* = 0 exactly)."""
    if len(xstar) != f.q:
        raise ValueError("dimension mismatch")
    products = [_dot(v, xstar) for v in f.normals]
    if any(p < 0 for p in products):
        raise ValueError("x* lies outside the cone; the active set is undefined")
    active = tuple(i for i, p in enumerate(products) if p == 0)
    return FacetSet(f.q, f.normals, active)


def in_omega_star(f: FacetSet, omega: Sequence) -> bool:
    """omega on L with v.omega >= 0 for every active normal (closed half-spaces, no epsilon)."""
    if abs(float(sum(omega)) - 1.0) > L_TOLERANCE:
        raise ValueError(f"omega is off the affine hyperplane L (sum = {float(sum(omega))!r})")
    return all(_dot(v, omega) >= 0 for v in f.active_normals())


def transform_tn(x: Sequence, xstar: Sequence, n: int, direction: str = "forward"):
    """T_n(x) = sqrt(n)(x - x*) + x* and its inverse.

    Exact (tuple of Fractions) when n is a perfect square and both inputs are
    rational; otherwise a float array.
    """
    if len(x) != len(xstar):
        raise ValueError("dimension mismatch")
    if n < 1:
        raise ValueError("n must be positive")
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    root = isqrt(n)
    exact = root * root == n and all(isinstance(v, (int, Fraction)) for v in (*x, *xstar))
    if exact:
        scale = Fraction(root) if direction == "forward" else Fraction(1, root)
        return tuple(scale * (Fraction(a) - Fraction(b)) + Fraction(b) for a, b in zip(x, xstar))
    xa = np.asarray([float(v) for v in x])
    xs = np.asarray([float(v) for v in xstar])
    scale = np.sqrt(n) if direction == "forward" else 1.0 / np.sqrt(n)
    return scale * (xa - xs) + xs


class Regime(str, enum.Enum):
    ITEM1 = "Item1"
    ITEM2 = "Item2"
    ITEM3 = "Item3"
    ITEM4 = "Item4"


class Rate(str, enum.Enum):
    EXP_TO_ONE = "ExpToOne"
    EXP_TO_ZERO = "ExpToZero"
    ROOT_N_TO_ZERO = "RootNToZero"
    ROOT_N_TO_PSTAR = "RootNToPStar"


_RATE = {Regime.ITEM1: Rate.EXP_TO_ONE, Regime.ITEM2: Rate.EXP_TO_ZERO,
         Regime.ITEM3: Rate.ROOT_N_TO_ZERO, Regime.ITEM4: Rate.ROOT_N_TO_PSTAR}


@dataclass(frozen=True)
class RegimeReport:
    condA: bool
    condBprime: bool
    condB: bool
    regime: Regime
    predicted_rate: Rate
    membership: ConeMembership = field(compare=False)


def regime_from_conditions(cond_a: bool, cond_bprime: bool, cond_b: bool) -> Regime:
    if not cond_bprime:
        return Regime.ITEM2
    if not cond_a:
        return Regime.ITEM3
    return Regime.ITEM1 if cond_b else Regime.ITEM4


def classify_regime(w: StepGraphon) -> RegimeReport:
    s = skeleton_graph(w)
    if not s.is_connected():
        raise ValueError("skeleton graph is disconnected; classify each connected component separately")
    z = incidence_matrix(s)
    member = cone_membership(z, concentration_vector(w))
    cond_a = has_odd_cycle(s)
    cond_bp = member.verdict is not Verdict.OUTSIDE
    cond_b = member.verdict is Verdict.INTERIOR
    regime = regime_from_conditions(cond_a, cond_bp, cond_b)
    return RegimeReport(cond_a, cond_bp, cond_b, regime, _RATE[regime], member)


class EdgeCone:
    """Membership oracle for integer community-size vectors, cached per skeleton.

    Full-dimensional cones are tested against their facet inequalities
    (complete H-description); degenerate cones fall back to the exact LP.
    """

    def __init__(self, s: SkeletonGraph):
        self.skeleton = s
        self.z = incidence_matrix(s)
        self.full_dimensional = s.q >= 2 and cone_dimension(self.z) == s.q
        self.normals = (np.array(facet_hyperplanes(self.z).normals, dtype=np.int64)
                        if self.full_dimensional else None)
        self._cache: dict[tuple[int, ...], bool] = {}

    def contains(self, y: Sequence[int]) -> bool:
        key = tuple(int(v) for v in y)
        hit = self._cache.get(key)
        if hit is None:
            if self.normals is not None:
                hit = bool((self.normals @ np.array(key, dtype=np.int64) >= 0).all())
            else:
                hit = cone_membership(self.z, key).inside
            self._cache[key] = hit
        return hit

    def contains_many(self, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=np.int64)
        if self.normals is not None:
            return (ys @ self.normals.T >= 0).all(axis=1)
        return np.array([self.contains(row) for row in ys], dtype=bool)
