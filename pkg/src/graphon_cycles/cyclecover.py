"""Cycle-cover (2-factor) detection for simple graphs.

The exact route reduces a 2-factor to a perfect matching in Tutte's gadget
graph and runs the blossom matcher on it. For complete S-partite graphs the
community sizes alone usually decide the answer: a cycle cover forces
y in the edge cone, and y in the cone with every nonempty community of size
at least 3 guarantees one.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .cone import EdgeCone, IncidenceMatrix, cone_membership
from .graphon import SampledGraph, SkeletonGraph, build_complete_partite
from .matching import Matching, max_matching
from .rng import RngStream

BRUTE_FORCE_LIMIT = 12
# Above this many edges per node the exact route first tries a sparse subgraph.
SPARSE_TRY_DENSITY = 6
SPARSE_KEEP = 4


class Method(str, enum.Enum):
    DEGREE_PRECHECK = "DegreePrecheck"
    CONE_NECESSITY = "ConeNecessity"
    KY_SUFFICIENCY = "LemmaKySufficiency"
    EXACT_MATCHING = "ExactMatching"
    ORACLE = "Oracle"


class Decision(str, enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CycleCoverVerdict:
    exists: bool
    method: Method
    witness: Optional[tuple[tuple[int, ...], ...]] = None


@dataclass(frozen=True)
class GadgetGraph:
    """Tutte gadget: per vertex v of degree d, d externals and d-2 internals.

    ``back_map`` sends each inter-vertex gadget edge (as an ordered pair of
    gadget nodes, smaller first) to its original edge.
    """

    num_nodes: int
    edges: tuple[tuple[int, int], ...]
    back_map: dict

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj


def build_tutte_gadget(n: int, edges: Sequence[tuple[int, int]]) -> GadgetGraph:
    incident: list[list[int]] = [[] for _ in range(n)]
    for k, (u, v) in enumerate(edges):
        incident[u].append(k)
        incident[v].append(k)
    low = [v for v in range(n) if len(incident[v]) < 2]
    if low:
        raise ValueError(f"vertex {low[0]} has degree < 2; the gadget needs minimum degree 2")

    ext: dict[tuple[int, int], int] = {}
    nxt = 0
    gadget_edges: list[tuple[int, int]] = []
    for v in range(n):
        for k in incident[v]:
            ext[(v, k)] = nxt
            nxt += 1
    for v in range(n):
        d = len(incident[v])
        externals = [ext[(v, k)] for k in incident[v]]
        for _ in range(d - 2):
            inner = nxt
            nxt += 1
            gadget_edges.extend((e, inner) for e in externals)
    back_map = {}
    for k, (u, v) in enumerate(edges):
        a, b = ext[(u, k)], ext[(v, k)]
        pair = (min(a, b), max(a, b))
        gadget_edges.append(pair)
        back_map[pair] = (u, v)
    return GadgetGraph(nxt, tuple(gadget_edges), back_map)


def _cycles_from_edges(n: int, chosen: Sequence[tuple[int, int]]) -> tuple[tuple[int, ...], ...]:
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in chosen:
        nbrs[u].append(v)
        nbrs[v].append(u)
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cycle = [start]
        seen[start] = True
        prev, cur = -1, start
        while True:
            a, b = nbrs[cur]
            nxt = a if a != prev else b
            if nxt == start:
                break
            cycle.append(nxt)
            seen[nxt] = True
            prev, cur = cur, nxt
        cycles.append(tuple(cycle))
    return tuple(cycles)


def _two_factor_by_matching(n: int, edges: Sequence[tuple[int, int]]) -> Optional[tuple[tuple[int, ...], ...]]:
    """Cycles of a 2-factor found through the gadget, or None when none exists."""
    gadget = build_tutte_gadget(n, edges)
    m = max_matching(gadget.adjacency(), stop_if_imperfect=True)
    if m is None or 2 * m.size != gadget.num_nodes:
        return None
    chosen = [gadget.back_map[p] for p in m.pairs if p in gadget.back_map]
    return _cycles_from_edges(n, chosen)


def _sparse_subgraph(g: SampledGraph) -> list[tuple[int, int]]:
    """Deterministic sparse spanning subgraph: each node keeps a few random incident edges."""
    rng = RngStream(0x5EED ^ g.n)
    keep = set()
    for v in range(g.n):
        nb = g.neighbors(v)
        if len(nb) <= SPARSE_KEEP:
            picks = nb
        else:
            picks = set()
            while len(picks) < SPARSE_KEEP:
                picks.add(nb[rng.next_u64() % len(nb)])
        for u in picks:
            keep.add((min(u, v), max(u, v)))
    return sorted(keep)


def has_perfect_two_matching(g: SampledGraph) -> bool:
    """Perfect matching in the bipartite double cover (v -> v' for every edge direction).

    Every 2-factor is a perfect 2-matching, so False rules a 2-factor out.
    The double cover has 2n nodes instead of the gadget's 4m - 2n.
    """
    n = g.n
    adj = [[n + u for u in g.neighbors(v)] for v in range(n)]
    adj += [[u for u in g.neighbors(v)] for v in range(n)]
    return max_matching(adj, stop_if_imperfect=True) is not None


def exact_two_factor(g: SampledGraph) -> Optional[tuple[tuple[int, ...], ...]]:
    """Exact 2-factor search; returns witness cycles or None.

    A failed perfect 2-matching test rejects early. Dense graphs then try a
    sparse subgraph: a 2-factor there is a 2-factor of g. Only when that
    fails is the full gadget built.
    """
    if g.n < 3 or (g.degrees() < 2).any():
        return None
    if not has_perfect_two_matching(g):
        return None
    edges = g.edges()
    if len(edges) > SPARSE_TRY_DENSITY * g.n:
        sparse = _sparse_subgraph(g)
        degs = np.bincount(np.array(sparse).ravel(), minlength=g.n)
        if (degs >= 2).all():
            found = _two_factor_by_matching(g.n, sparse)
            if found is not None:
                return found
    return _two_factor_by_matching(g.n, edges)


def max_matching_graph(g: SampledGraph) -> Matching:
    adj = [g.neighbors(v) for v in range(g.n)]
    return max_matching(adj)


def _ky_degrees(s: SkeletonGraph, y: Sequence[int]) -> list[int]:
    """Degree of a node in community i of K_y."""
    out = []
    for i in range(s.q):
        d = sum(y[j] for j in s.neighbors(i))
        if s.has_loop(i):
            d += y[i] - 1
        out.append(d)
    return out


def decide_complete_partite(s: SkeletonGraph, y: Sequence[int], z: IncidenceMatrix | EdgeCone | None = None) -> Decision:
    """Decide from community sizes alone whether K_y has a cycle cover, when possible."""
    if len(y) != s.q:
        raise ValueError("y must have one entry per skeleton node")
    if any(v < 0 for v in y):
        raise ValueError("community sizes must be nonnegative")
    n = sum(y)
    if n <= 2:
        return Decision.NO
    degrees = _ky_degrees(s, y)
    if any(y[i] > 0 and degrees[i] < 2 for i in range(s.q)):
        return Decision.NO
    if isinstance(z, EdgeCone):
        inside = z.contains(y)
    else:
        inside = cone_membership(z if z is not None else EdgeCone(s).z, y).inside
    if not inside:
        return Decision.NO
    # Any certificate for y avoids edges touching empty communities, so this is
    # the ">= 3" hypothesis on the sub-skeleton of nonempty communities.
    if all(v >= 3 for v in y if v > 0):
        return Decision.YES
    return Decision.UNKNOWN


def has_cycle_cover(g: SampledGraph, context: tuple[SkeletonGraph, IncidenceMatrix | EdgeCone] | None = None,
                    *, witness: bool = False) -> CycleCoverVerdict:
    """Layered decision: degree precheck, community-size fast paths, then exact matching."""
    if g.n < 3 or (g.degrees() < 2).any():
        return CycleCoverVerdict(False, Method.DEGREE_PRECHECK)
    if context is not None and g.community is not None:
        s, cone = context
        y = g.community_sizes(s.q)
        if g.is_s_partite(s):
            inside = cone.contains(y) if isinstance(cone, EdgeCone) else cone_membership(cone, y).inside
            if not inside:
                return CycleCoverVerdict(False, Method.CONE_NECESSITY)
            if g.is_complete_partite(s) and not witness:
                if decide_complete_partite(s, y, cone) is Decision.YES:
                    return CycleCoverVerdict(True, Method.KY_SUFFICIENCY)
    cycles = exact_two_factor(g)
    if cycles is None:
        return CycleCoverVerdict(False, Method.EXACT_MATCHING)
    return CycleCoverVerdict(True, Method.EXACT_MATCHING, cycles if witness else None)


def complete_partite_cover(s: SkeletonGraph, y: Sequence[int], cone: EdgeCone) -> bool:
    """Cycle cover of K_y: fast path first, exact matching on the Unknown gap."""
    d = decide_complete_partite(s, y, cone)
    if d is Decision.UNKNOWN:
        return exact_two_factor(build_complete_partite(s, y)) is not None
    return d is Decision.YES


def verify_witness(g: SampledGraph, cycles: Sequence[Sequence[int]]) -> bool:
    """Independent check: node-disjoint cycles of length >= 3 covering V(G) along edges of G."""
    covered = [v for c in cycles for v in c]
    if sorted(covered) != list(range(g.n)):
        return False
    for c in cycles:
        if len(c) < 3:
            return False
        for a, b in zip(c, (*c[1:], c[0])):
            if not g.adjacency[a, b]:
                return False
    return True


def brute_force_two_factor(g: SampledGraph) -> bool:
    """Exhaustive search for a spanning 2-regular subgraph (test oracle, n <= 12)."""
    n = g.n
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to {BRUTE_FORCE_LIMIT} nodes, got {n}")
    adj = g.adjacency
    nbrs = [[u for u in range(n) if adj[v, u]] for v in range(n)]
    deg = [0] * n
    used: set[tuple[int, int]] = set()

    def search(v: int) -> bool:
        if v == n:
            return True
        need = 2 - deg[v]
        if need == 0:
            return search(v + 1)
        # vertices before v are saturated, so only later neighbours are candidates
        cands = [u for u in nbrs[v] if u > v and deg[u] < 2 and (v, u) not in used]
        for pick in combinations(cands, need):
            for u in pick:
                used.add((v, u))
                deg[u] += 1
            deg[v] += need
            if search(v + 1):
                return True
            deg[v] -= need
            for u in pick:
                used.discard((v, u))
                deg[u] -= 1
        return False

    return search(0)


def parse_edge_list(text: str) -> SampledGraph:
    """Read ``n m`` followed by m lines ``i j`` (0-based, simple undirected graph)."""
    lines = [ln.split() for ln in text.splitlines()]
    rows = [(k + 1, parts) for k, parts in enumerate(lines) if parts and not parts[0].startswith("#")]
    if not rows:
        raise ValueError("empty edge list")

    def ints(lineno: int, parts: list[str]) -> tuple[int, int]:
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two integers")
        try:
            return int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: expected two integers") from None

    n, m = ints(*rows[0])
    if n < 0 or m < 0:
        raise ValueError(f"line {rows[0][0]}: n and m must be nonnegative")
    if len(rows) - 1 != m:
        raise ValueError(f"header announces {m} edges, found {len(rows) - 1}")
    edges = set()
    for lineno, parts in rows[1:]:
        u, v = ints(lineno, parts)
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"line {lineno}: node out of range 0..{n - 1}")
        if u == v:
            raise ValueError(f"line {lineno}: self-loop at {u}")
        e = (min(u, v), max(u, v))
        if e in edges:
            raise ValueError(f"line {lineno}: duplicate edge {u} {v}")
        edges.add(e)
    return SampledGraph.from_edges(n, sorted(edges))


def format_edge_list(g: SampledGraph) -> str:
    edges = g.edges()
    out = [f"{g.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(out) + "\n"
