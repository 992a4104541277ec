"""Affine and Dynkin diagrams, the forbidden-subgraph detector and the
classifier of connected infinite graphs whose adjacency norm is at most 2.

Diagram vertex orders (shared by the builders and witness embeddings):

* A~_n: cycle v_0 .. v_n in cyclic order;
* D~_n: v_0 .. v_n, where v_1 .. v_{n-1} is a path, v_0 hangs off v_2 and
  v_n off v_{n-2} (D~_4 is the star K_{1,4} centred at v_2);
* E~_6, E~_7, E~_8: spiders with legs (2,2,2), (1,3,3), (1,2,5); the centre
  first, then each leg from the centre outwards, shortest leg first.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any

from .errors import FiniteInput, InvalidParameter, SchreierUnsupported
from .families import DInfinity, FiniteImported, GraphFamily, Lattice, Line, Ray
from .graph_core import FiniteGraph, ball

E_LEGS = {6: (2, 2, 2), 7: (1, 3, 3), 8: (1, 2, 5)}
DYNKIN_E_LEGS = {6: (1, 2, 2), 7: (1, 2, 3), 8: (1, 2, 4)}
KIND_ORDER = {"A": 0, "D": 1, "E": 2}


# diagram builders -------------------------------------------------------


def _graph(n: int, edges) -> FiniteGraph:
    return FiniteGraph.from_edges(n, [(u, v, 1) for u, v in edges])


def spider_edges(legs) -> tuple[int, list[tuple[int, int]]]:
    edges = []
    nxt = 1
    for length in legs:
        prev = 0
        for _ in range(length):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return nxt, edges


def path_graph(n: int) -> FiniteGraph:
    if n < 1:
        raise InvalidParameter("path needs at least one vertex")
    return _graph(n, [(i, i + 1) for i in range(n - 1)])


def affine_a(n: int) -> FiniteGraph:
    if n < 2:
        raise InvalidParameter("A~_n needs n >= 2")
    return _graph(n + 1, [(i, (i + 1) % (n + 1)) for i in range(n + 1)])


def affine_d(n: int) -> FiniteGraph:
    if n < 4:
        raise InvalidParameter("D~_n needs n >= 4")
    edges = [(i, i + 1) for i in range(1, n - 1)] + [(0, 2), (n - 2, n)]
    return _graph(n + 1, edges)


def affine_e(n: int) -> FiniteGraph:
    if n not in E_LEGS:
        raise InvalidParameter("E~_n needs n in {6, 7, 8}")
    return _graph(*spider_edges(E_LEGS[n]))


def dynkin_a(n: int) -> FiniteGraph:
    return path_graph(n)


def dynkin_d(n: int) -> FiniteGraph:
    if n < 4:
        raise InvalidParameter("D_n needs n >= 4")
    return _graph(*spider_edges((1, 1, n - 3)))


def dynkin_e(n: int) -> FiniteGraph:
    if n not in DYNKIN_E_LEGS:
        raise InvalidParameter("E_n needs n in {6, 7, 8}")
    return _graph(*spider_edges(DYNKIN_E_LEGS[n]))


def diagram(kind: str, n: int) -> FiniteGraph:
    return {"A": affine_a, "D": affine_d, "E": affine_e}[kind](n)


# detector ---------------------------------------------------------------


@dataclass(frozen=True)
class ForbiddenWitness:
    kind: str
    n: int
    embedding: tuple[int, ...]

    @property
    def name(self) -> str:
        return f"Affine{self.kind}({self.n})"

    def sort_key(self):
        return (KIND_ORDER[self.kind], self.n, self.embedding)

    def is_valid_in(self, g: FiniteGraph) -> bool:
        """Embedded vertices are distinct and carry every diagram edge."""
        emb = self.embedding
        if len(set(emb)) != len(emb):
            return False
        d = diagram(self.kind, self.n)
        if d.vertex_count != len(emb):
            return False
        return all(emb[v] in g.neighbor_list(emb[u]) for u, v, _ in d.edges())

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.name, "embedding": list(self.embedding)}


def _adjacency(g: FiniteGraph) -> list[list[int]]:
    if g.schreier:
        for u in range(g.vertex_count):
            lo, hi = g.indptr[u], g.indptr[u + 1]
            if u in g.indices[lo:hi] or (g.counts[lo:hi] > 1).any():
                raise SchreierUnsupported("graph has loops or multiple edges")
    return [sorted(g.neighbor_list(u)) for u in range(g.vertex_count)]


def _girth(adj: list[list[int]]) -> int | None:
    best = None
    for root in range(len(adj)):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            if best is not None and 2 * dist[u] >= best:
                break
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    length = dist[u] + dist[w] + 1
                    if best is None or length < best:
                        best = length
    return best


def _smallest_cycle(adj: list[list[int]], length: int) -> tuple[int, ...]:
    """Lexicographically smallest vertex sequence of a cycle of ``length``."""
    for s in range(len(adj)):
        path = [s]
        on_path = {s}

        def dfs() -> bool:
            u = path[-1]
            if len(path) == length:
                return s in adj[u]
            for w in adj[u]:
                if w > s and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    if dfs():
                        return True
                    path.pop()
                    on_path.remove(w)
            return False

        if dfs():
            return tuple(path)
    raise AssertionError("no cycle of the computed girth")


def _tree_path(adj, u: int, w: int) -> list[int]:
    parent = {u: -1}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        if x == w:
            break
        for y in adj[x]:
            if y not in parent:
                parent[y] = x
                queue.append(y)
    path = [w]
    while path[-1] != u:
        path.append(parent[path[-1]])
    return path[::-1]


def _affine_d(adj) -> ForbiddenWitness | None:
    best = None
    for v, nb in enumerate(adj):
        if len(nb) >= 4:
            a, b, c, e = nb[:4]
            cand = ForbiddenWitness("D", 4, (a, b, v, c, e))
            if best is None or cand.sort_key() < best.sort_key():
                best = cand
    if best is not None:
        return best
    branch = [v for v, nb in enumerate(adj) if len(nb) == 3]
    for u in branch:
        dist = {u: 0}
        queue = deque([u])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    queue.append(y)
        for w in branch:
            if w == u or w not in dist:
                continue
            path = _tree_path(adj, u, w)
            n = len(path) + 3
            s0 = sorted(x for x in adj[u] if x != path[1])
            s1 = sorted(x for x in adj[w] if x != path[-2])
            cand = ForbiddenWitness("D", n, (s0[0], s0[1], *path, s1[0], s1[1]))
            if best is None or cand.sort_key() < best.sort_key():
                best = cand
    return best


def _legs(adj, centre: int) -> list[list[int]]:
    legs = []
    for first in adj[centre]:
        leg = [first]
        prev = centre
        while True:
            nxt = [y for y in adj[leg[-1]] if y != prev]
            if not nxt:
                break
            prev = leg[-1]
            leg.append(nxt[0])
        legs.append(leg)
    return legs


def _affine_e(adj) -> ForbiddenWitness | None:
    best = None
    for c, nb in enumerate(adj):
        if len(nb) != 3:
            continue
        legs = sorted(_legs(adj, c), key=lambda leg: (len(leg), leg[0]))
        lengths = [len(leg) for leg in legs]
        for n, need in E_LEGS.items():
            if all(have >= want for have, want in zip(lengths, need)):
                emb = [c]
                for leg, want in zip(legs, need):
                    emb.extend(leg[:want])
                cand = ForbiddenWitness("E", n, tuple(emb))
                if best is None or cand.sort_key() < best.sort_key():
                    best = cand
                break
    return best


def find_forbidden_subgraph(g: FiniteGraph) -> ForbiddenWitness | None:
    """Smallest affine diagram contained in ``g``, by (kind, n, embedding).

    Returns None exactly when every component is a path or a Dynkin
    diagram D_n / E_6 / E_7 / E_8, i.e. when the adjacency norm is below 2.
    """
    adj = _adjacency(g)
    girth = _girth(adj)
    if girth is not None:
        return ForbiddenWitness("A", girth - 1, _smallest_cycle(adj, girth))
    return _affine_d(adj) or _affine_e(adj)


# classifier -------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    label: str
    witness: ForbiddenWitness | None = None
    radius: int | None = None
    keys: tuple | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"label": self.label}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
            out["radius"] = self.radius
            out["keys"] = [repr(k) for k in self.keys]
        return out


IS_RAY = "IsRay"
IS_LINE = "IsLine"
IS_DINFINITY = "IsDInfinity"
NORM_EXCEEDS_2 = "NormExceeds2"


def classify_norm_le_2(family: GraphFamily, *, max_radius: int = 10,
                       budget: int | None = None) -> Classification:
    """Scan balls of radius 1, 2, ... for an affine diagram; families with
    none are identified from the descriptor."""
    if isinstance(family, FiniteImported):
        raise FiniteInput("classification applies to infinite families only")
    for r in range(1, max_radius + 1):
        g = ball(family, None, r, budget=budget)
        w = find_forbidden_subgraph(g)
        if w is not None:
            return Classification(NORM_EXCEEDS_2, w, r, tuple(g.labels[p] for p in w.embedding))
    if isinstance(family, Ray):
        return Classification(IS_RAY)
    if isinstance(family, DInfinity):
        return Classification(IS_DINFINITY)
    if isinstance(family, Line) or (isinstance(family, Lattice) and family.d == 1):
        return Classification(IS_LINE)
    raise InvalidParameter(f"no witness within radius {max_radius} for {family.spec()}")
