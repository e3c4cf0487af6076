"""Maximum-cardinality matching in general graphs (Edmonds' blossom algorithm).

BFS-based variant with blossom contraction tracked through a ``base`` array.
A greedy pass seeds the matching; each free vertex is then the root of one
alternating-tree search. Search state is reset only for the vertices a
search touched, so sparse large graphs stay cheap.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.pairs)


def adjacency_lists(n: int, edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at {u}")
        adj[u].append(v)
        adj[v].append(u)
    return adj


class _Blossom:
    def __init__(self, adj: Sequence[Sequence[int]]):
        n = len(adj)
        self.n = n
        self.adj = adj
        self.match = [-1] * n
        self.parent = [-1] * n
        self.base = list(range(n))
        self.used = [False] * n

    def greedy(self) -> None:
        match = self.match
        # low-degree vertices first leaves fewer dead ends for the search
        order = sorted(range(self.n), key=lambda v: len(self.adj[v]))
        for v in order:
            if match[v] == -1:
                for w in self.adj[v]:
                    if match[w] == -1:
                        match[v] = w
                        match[w] = v
                        break

    def _lca(self, a: int, b: int) -> int:
        base, match, parent = self.base, self.match, self.parent
        seen = set()
        while True:
            a = base[a]
            seen.add(a)
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if b in seen:
                return b
            b = parent[match[b]]

    def _mark_path(self, v: int, b: int, child: int, blossom: set) -> None:
        base, match, parent = self.base, self.match, self.parent
        while base[v] != b:
            blossom.add(base[v])
            blossom.add(base[match[v]])
            parent[v] = child
            child = match[v]
            v = parent[match[v]]

    def augment_from(self, root: int) -> bool:
        adj, match, parent, base, used = self.adj, self.match, self.parent, self.base, self.used
        touched = [root]
        used[root] = True
        queue = deque([root])
        found = -1
        while queue and found == -1:
            v = queue.popleft()
            for to in adj[v]:
                if base[v] == base[to] or match[v] == to:
                    continue
                if to == root or (match[to] != -1 and parent[match[to]] != -1):
                    cur = self._lca(v, to)
                    blossom: set = set()
                    self._mark_path(v, cur, to, blossom)
                    self._mark_path(to, cur, v, blossom)
                    for i in list(touched):
                        if base[i] in blossom:
                            base[i] = cur
                            if not used[i]:
                                used[i] = True
                                queue.append(i)
                elif parent[to] == -1:
                    parent[to] = v
                    touched.append(to)
                    if match[to] == -1:
                        found = to
                        break
                    nxt = match[to]
                    used[nxt] = True
                    touched.append(nxt)
                    queue.append(nxt)
        if found != -1:
            v = found
            while v != -1:
                pv = parent[v]
                ppv = match[pv]
                match[v] = pv
                match[pv] = v
                v = ppv
        for i in touched:
            parent[i] = -1
            base[i] = i
            used[i] = False
        return found != -1


def max_matching(adj: Sequence[Sequence[int]], *, stop_if_imperfect: bool = False) -> Matching | None:
    """Maximum-cardinality matching of the graph given by adjacency lists.

    With ``stop_if_imperfect`` the search returns None as soon as some vertex
    provably stays unmatched (no augmenting path from a free root ever
    reappears once a search from it fails).
    """
    bl = _Blossom(adj)
    bl.greedy()
    for root in range(bl.n):
        if bl.match[root] == -1 and adj[root]:
            if not bl.augment_from(root) and stop_if_imperfect:
                return None
        elif bl.match[root] == -1 and stop_if_imperfect:
            return None
    pairs = tuple((v, bl.match[v]) for v in range(bl.n) if bl.match[v] > v)
    return Matching(pairs)


def matching_of_edges(n: int, edges: Iterable[tuple[int, int]]) -> Matching:
    return max_matching(adjacency_lists(n, edges))
