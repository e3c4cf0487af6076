"""Step-graphons, skeleton graphs and sampled graphs.

All partition breakpoints and block values are held as exact
:class:`fractions.Fraction` values; floating point never touches them.
Community indices are 0-based throughout the package.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


class GraphonFormatError(ValueError):
    """Raised for malformed or invalid graphon documents."""


def parse_rational(text: str) -> Fraction:
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise GraphonFormatError(f"malformed rational {text!r}")
    num, _, den = text.partition("/")
    if den and int(den) == 0:
        raise GraphonFormatError(f"zero denominator in {text!r}")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class StepGraphon:
    """A symmetric step function on the unit square.

    ``sigma`` holds the q+1 partition breakpoints and ``values`` the q x q
    block values; block (i, j) covers [sigma[i], sigma[i+1]) x
    [sigma[j], sigma[j+1]).
    """

    name: str
    sigma: tuple[Fraction, ...]
    values: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        sigma = tuple(Fraction(s) for s in self.sigma)
        values = tuple(tuple(Fraction(v) for v in row) for row in self.values)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "values", values)

        q = len(sigma) - 1
        if q < 1:
            raise GraphonFormatError("sigma needs at least two breakpoints")
        if sigma[0] != 0 or sigma[-1] != 1:
            raise GraphonFormatError("sigma must start at 0 and end at 1")
        for i in range(q):
            if not sigma[i] < sigma[i + 1]:
                raise GraphonFormatError(
                    f"sigma not strictly increasing at position {i + 1}")
        if len(values) != q:
            raise GraphonFormatError(f"values has {len(values)} rows, expected {q}")
        for i, row in enumerate(values):
            if len(row) != q:
                raise GraphonFormatError(
                    f"values row {i + 1} has {len(row)} entries, expected {q}")
        for i in range(q):
            for j in range(q):
                v = values[i][j]
                if v < 0 or v > 1:
                    raise GraphonFormatError(
                        f"value {format_rational(v)} outside [0,1] at ({i + 1},{j + 1})")
                if j > i and values[j][i] != v:
                    raise GraphonFormatError(
                        f"values not symmetric at ({i + 1},{j + 1})")

    @property
    def q(self) -> int:
        return len(self.sigma) - 1

    @property
    def is_zero_one(self) -> bool:
        """True when every block value is 0 or 1 (sampling is then deterministic given sizes)."""
        return all(v in (0, 1) for row in self.values for v in row)

    def block_of(self, s: float | Fraction) -> int:
        if s < 0 or s > 1:
            raise ValueError(f"coordinate {s} outside [0,1]")
        for i in range(self.q):
            if s < self.sigma[i + 1]:
                return i
        return self.q - 1

    def value(self, s: float | Fraction, t: float | Fraction) -> Fraction:
        return self.values[self.block_of(s)][self.block_of(t)]

    def to_json(self) -> str:
        doc = {
            "name": self.name,
            "sigma": [format_rational(s) for s in self.sigma],
            "values": [[format_rational(v) for v in row] for row in self.values],
        }
        return json.dumps(doc, indent=2) + "\n"


def parse_graphon(text: str) -> StepGraphon:
    """Parse and validate a graphon JSON document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphonFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise GraphonFormatError("graphon document must be a JSON object")
    for key in ("name", "sigma", "values"):
        if key not in doc:
            raise GraphonFormatError(f"missing field {key!r}")
    if not isinstance(doc["name"], str):
        raise GraphonFormatError("name must be a string")
    if not isinstance(doc["sigma"], list):
        raise GraphonFormatError("sigma must be an array")
    if not isinstance(doc["values"], list) or not all(
            isinstance(row, list) for row in doc["values"]):
        raise GraphonFormatError("values must be an array of arrays")

    sigma = []
    for k, s in enumerate(doc["sigma"]):
        try:
            sigma.append(parse_rational(s))
        except GraphonFormatError as exc:
            raise GraphonFormatError(f"sigma[{k + 1}]: {exc}") from None
    values = []
    for i, row in enumerate(doc["values"]):
        parsed = []
        for j, v in enumerate(row):
            try:
                parsed.append(parse_rational(v))
            except GraphonFormatError as exc:
                raise GraphonFormatError(f"values at ({i + 1},{j + 1}): {exc}") from None
        values.append(tuple(parsed))
    return StepGraphon(doc["name"], tuple(sigma), tuple(values))


def serialize_graphon(w: StepGraphon) -> str:
    return w.to_json()


def concentration_vector(w: StepGraphon) -> tuple[Fraction, ...]:
    """Block widths; the expected fraction of sampled nodes in each community."""
    return tuple(w.sigma[i + 1] - w.sigma[i] for i in range(w.q))


@dataclass(frozen=True)
class SkeletonGraph:
    """Support pattern of a graphon: an undirected graph on q nodes, self-loops allowed.

    Edges are stored as (i, j) with i <= j.
    """

    q: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        normalized = set()
        for i, j in self.edges:
            i, j = int(i), int(j)
            if not (0 <= i < self.q and 0 <= j < self.q):
                raise ValueError(f"edge ({i},{j}) out of range for q={self.q}")
            normalized.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(normalized))

    @cached_property
    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.q, self.q), dtype=bool)
        for i, j in self.edges:
            adj[i, j] = adj[j, i] = True
        adj.setflags(write=False)
        return adj

    @cached_property
    def sorted_edges(self) -> tuple[tuple[int, int], ...]:
        """Canonical edge order: lexicographic by (min, max) endpoint."""
        return tuple(sorted(self.edges))

    def has_loop(self, i: int) -> bool:
        return (i, i) in self.edges

    def neighbors(self, i: int) -> list[int]:
        """Distinct neighbors of node i (a self-loop does not count)."""
        return [j for j in range(self.q) if j != i and self.adjacency[i, j]]

    def is_connected(self) -> bool:
        if self.q == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.q

    def induced(self, nodes: Sequence[int]) -> "SkeletonGraph":
        """Sub-skeleton induced on ``nodes``, relabelled 0..len(nodes)-1 in the given order."""
        index = {u: k for k, u in enumerate(nodes)}
        return SkeletonGraph(
            len(nodes),
            frozenset((index[i], index[j]) for i, j in self.edges
                      if i in index and j in index))


def skeleton_graph(w: StepGraphon) -> SkeletonGraph:
    edges = frozenset((i, j) for i in range(w.q) for j in range(i, w.q)
                      if w.values[i][j] != 0)
    return SkeletonGraph(w.q, edges)


def split_self_loops(w: StepGraphon) -> StepGraphon:
    """Split every self-looped community into two halves joined by the old diagonal value.

    The two new diagonal sub-blocks are zero, so the resulting skeleton has no
    self-loops, and the new graphon is pointwise below the old one. Halves
    stay adjacent, in the original community order.
    """
    x = concentration_vector(w)
    # origin[k] = old community of new community k
    origin: list[int] = []
    sigma = [Fraction(0)]
    for i in range(w.q):
        if w.values[i][i] != 0:
            half = x[i] / 2
            sigma += [sigma[-1] + half, sigma[-1] + 2 * half]
            origin += [i, i]
        else:
            sigma.append(sigma[-1] + x[i])
            origin.append(i)
    if len(origin) == w.q:
        return w
    m = len(origin)
    values = [[Fraction(0)] * m for _ in range(m)]
    for a in range(m):
        for b in range(m):
            # diagonal of a split community is zeroed; unsplit diagonals are already 0
            if a != b:
                values[a][b] = w.values[origin[a]][origin[b]]
    return StepGraphon(f"{w.name}-split", tuple(sigma), tuple(tuple(r) for r in values))


class SampledGraph:
    """A simple undirected graph on n nodes with optional community labels.

    ``adjacency`` is a read-only symmetric boolean matrix with a zero diagonal.
    """

    __slots__ = ("n", "community", "adjacency", "__weakref__")

    def __init__(self, adjacency: np.ndarray, community: Sequence[int] | None = None):
        adj = np.array(adjacency, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency must be a square matrix")
        if adj.diagonal().any():
            raise ValueError("sampled graphs have no self-loops")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        adj.setflags(write=False)
        self.n = adj.shape[0]
        self.adjacency = adj
        if community is not None:
            community = tuple(int(c) for c in community)
            if len(community) != self.n:
                raise ValueError("community labels must cover every node")
        self.community = community

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   community: Sequence[int] | None = None) -> "SampledGraph":
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i},{j}) out of range for n={n}")
            adj[i, j] = adj[j, i] = True
        return cls(adj, community)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SampledGraph):
            return NotImplemented
        return (self.community == other.community
                and np.array_equal(self.adjacency, other.adjacency))

    def __hash__(self) -> int:
        return hash((self.n, self.community, self.adjacency.tobytes()))

    def __repr__(self) -> str:
        return f"SampledGraph(n={self.n}, m={self.num_edges})"

    @property
    def num_edges(self) -> int:
        return int(self.adjacency.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        i, j = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(i.tolist(), j.tolist()))

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def neighbors(self, v: int) -> list[int]:
        return np.flatnonzero(self.adjacency[v]).tolist()

    def community_sizes(self, q: int) -> tuple[int, ...]:
        """y(G): the number of nodes in each community."""
        if self.community is None:
            raise ValueError("graph carries no community labels")
        return tuple(np.bincount(np.asarray(self.community, dtype=int), minlength=q).tolist())

    def empirical_concentration(self, q: int) -> tuple[Fraction, ...]:
        """x(G) = y(G) / n, exactly."""
        return tuple(Fraction(c, self.n) for c in self.community_sizes(q))

    def is_s_partite(self, s: SkeletonGraph) -> bool:
        """True when the community labelling is a homomorphism onto ``s``."""
        if self.community is None:
            return False
        lab = np.asarray(self.community, dtype=int)
        allowed = s.adjacency[np.ix_(lab, lab)]
        return not (self.adjacency & ~allowed).any()

    def is_complete_partite(self, s: SkeletonGraph) -> bool:
        """True when this graph equals K_y for its own community sizes."""
        if not self.is_s_partite(s):
            return False
        return self.num_edges == complete_partite_edge_count(s, self.community_sizes(s.q))


def complete_partite_edge_count(s: SkeletonGraph, y: Sequence[int]) -> int:
    total = 0
    for i, j in s.edges:
        total += comb(y[i], 2) if i == j else y[i] * y[j]
    return total


def build_complete_partite(s: SkeletonGraph, y: Sequence[int]) -> SampledGraph:
    """K_y: communities of sizes y (nodes grouped by community), all S-allowed edges present."""
    if len(y) != s.q:
        raise ValueError(f"y has {len(y)} entries, skeleton has {s.q} nodes")
    if any(c < 0 for c in y):
        raise ValueError("community sizes must be nonnegative")
    lab = np.repeat(np.arange(s.q), np.asarray(y, dtype=int))
    adj = s.adjacency[np.ix_(lab, lab)].copy()
    np.fill_diagonal(adj, False)
    return SampledGraph(adj, lab.tolist())


def _graphon(name: str, sigma: Sequence[Fraction], edges: Iterable[tuple[int, int]]) -> StepGraphon:
    q = len(sigma) - 1
    values = [[Fraction(0)] * q for _ in range(q)]
    for i, j in edges:
        values[i][j] = values[j][i] = Fraction(1)
    return StepGraphon(name, tuple(sigma), tuple(tuple(r) for r in values))


def _sigma_from_widths(widths: Sequence[Fraction]) -> list[Fraction]:
    sigma = [Fraction(0)]
    for w in widths:
        sigma.append(sigma[-1] + w)
    return sigma


_F = Fraction
# Triangle-with-loop skeleton shared by a-f: loop at 0, edges 0-1, 0-2, 1-2.
_TRIANGLE_LOOP = [(0, 0), (0, 1), (0, 2), (1, 2)]
_ALPHA = {"a": _F(1, 2), "b": _F(1, 4), "c": _F(1, 8)}
_BETA = {"d": _F(3, 4), "e": _F(5, 8), "f": _F(18, 32)}
_SIGMA_TWO_BLOCK = {"g": _F(7, 16), "h": _F(3, 8), "i": _F(1, 4), "j": _F(1, 2)}
_K_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 4), (2, 5)]
_K_WIDTHS = [_F(1, 4), _F(1, 4), _F(1, 8), _F(1, 8), _F(1, 8), _F(1, 8)]

CATALOG_NAMES = ("fig1", "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k")
EXPERIMENT_NAMES = CATALOG_NAMES[1:]


def catalog(name: str) -> StepGraphon:
    """Bundled graphons; every support block has value 1."""
    if name == "fig1":
        return _graphon("fig1", [_F(0), _F(3, 10), _F(3, 5), _F(1)],
                        [(0, 0), (2, 2), (0, 1), (1, 2)])
    if name in _ALPHA:
        a = _ALPHA[name]
        return _graphon(name, _sigma_from_widths([a, (1 - a) / 2, (1 - a) / 2]), _TRIANGLE_LOOP)
    if name in _BETA:
        b = _BETA[name]
        return _graphon(name, _sigma_from_widths([(1 - b) / 2, b, (1 - b) / 2]), _TRIANGLE_LOOP)
    if name in _SIGMA_TWO_BLOCK:
        return _graphon(name, [_F(0), _SIGMA_TWO_BLOCK[name], _F(1)], [(0, 1)])
    if name == "k":
        return _graphon("k", _sigma_from_widths(_K_WIDTHS), _K_EDGES)
    raise KeyError(f"unknown catalog graphon {name!r}; choose from {', '.join(CATALOG_NAMES)}")


def load_graphon(source: str) -> StepGraphon:
    """Resolve a catalog name or a path to a graphon JSON file."""
    if source in CATALOG_NAMES:
        return catalog(source)
    path = Path(source)
    if not path.exists():
        raise KeyError(f"{source!r} is neither a catalog graphon nor an existing file")
    return parse_graphon(path.read_text(encoding="utf-8"))


def half_value_variant(w: StepGraphon) -> StepGraphon:
    """Same support, every nonzero block set to 1/2."""
    values = tuple(tuple(_F(1, 2) if v != 0 else _F(0) for v in row) for row in w.values)
    return StepGraphon(f"{w.name}-half", w.sigma, values)
