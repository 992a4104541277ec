"""Finite graphs, ball truncation of lazy families, and exact closed-walk counts."""

from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp

from .errors import DimensionMismatch, InvalidParameter, SizeLimitExceeded

DEFAULT_BUDGET = 10**6


def default_budget() -> int:
    """Vertex budget, overridable through ``COSPECTRA_BUDGET``."""
    raw = os.environ.get("COSPECTRA_BUDGET")
    if raw:
        try:
            value = int(raw)
        except ValueError as exc:
            raise InvalidParameter(f"COSPECTRA_BUDGET must be an integer, got {raw!r}") from exc
        if value < 1:
            raise InvalidParameter("COSPECTRA_BUDGET must be >= 1")
        return value
    return DEFAULT_BUDGET


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FiniteGraph:
    """Finite graph in compressed (CSR) form.

    ``counts[k]`` is the number of edges between the row vertex and
    ``indices[k]``; a loop contributes its count to the diagonal entry.
    Multi-edges and loops are only accepted when ``schreier`` is set.
    """

    vertex_count: int
    indptr: np.ndarray
    indices: np.ndarray
    counts: np.ndarray
    labels: tuple | None = None
    boundary: frozenset = frozenset()
    schreier: bool = False

    def __post_init__(self):
        object.__setattr__(self, "indptr", _frozen(np.asarray(self.indptr, dtype=np.int64)))
        object.__setattr__(self, "indices", _frozen(np.asarray(self.indices, dtype=np.int64)))
        object.__setattr__(self, "counts", _frozen(np.asarray(self.counts, dtype=np.int64)))
        if len(self.indptr) != self.vertex_count + 1:
            raise InvalidParameter("indptr length must be vertex_count + 1")
        if self.labels is not None and len(self.labels) != self.vertex_count:
            raise InvalidParameter("labels length must equal vertex_count")
        if not self.schreier:
            rows = np.repeat(np.arange(self.vertex_count), np.diff(self.indptr))
            if np.any(self.counts != 1) or np.any(rows == self.indices):
                raise InvalidParameter("loops and multi-edges need schreier=True")
        m = self.to_sparse()
        if (m != m.T).nnz:
            raise InvalidParameter("adjacency is not symmetric")

    # construction -------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Sequence[int]],
        *,
        labels: Sequence | None = None,
        boundary: Iterable[int] = (),
        schreier: bool = False,
    ) -> FiniteGraph:
        """Build from ``(u, v)`` or ``(u, v, m)`` triples.

        ``(u, v, m)`` with ``u != v`` sets both A[u, v] and A[v, u] to m (counts
        accumulate over repeated triples); ``(u, u, m)`` adds m to A[u, u].
        """
        acc: dict[tuple[int, int], int] = {}
        for e in edges:
            u, v = int(e[0]), int(e[1])
            m = int(e[2]) if len(e) > 2 else 1
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidParameter(f"edge ({u}, {v}) out of range for {n} vertices")
            if m < 1:
                raise InvalidParameter(f"edge multiplicity must be positive, got {m}")
            acc[(u, v)] = acc.get((u, v), 0) + m
            if u != v:
                acc[(v, u)] = acc.get((v, u), 0) + m
        return cls._from_dict(n, acc, labels=labels, boundary=boundary, schreier=schreier)

    @classmethod
    def _from_dict(cls, n, acc, *, labels=None, boundary=(), schreier=False) -> FiniteGraph:
        keys = sorted(acc)
        rows = np.fromiter((k[0] for k in keys), dtype=np.int64, count=len(keys))
        cols = np.fromiter((k[1] for k in keys), dtype=np.int64, count=len(keys))
        counts = np.fromiter((acc[k] for k in keys), dtype=np.int64, count=len(keys))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(
            n,
            indptr,
            cols,
            counts,
            labels=None if labels is None else tuple(labels),
            boundary=frozenset(boundary),
            schreier=schreier,
        )

    @classmethod
    def from_dense(cls, a, *, schreier: bool = False) -> FiniteGraph:
        a = np.asarray(a)
        n = a.shape[0]
        acc = {(int(i), int(j)): int(a[i, j]) for i, j in zip(*np.nonzero(a))}
        return cls._from_dict(n, acc, schreier=schreier)

    # views --------------------------------------------------------------

    def neighbor_list(self, u: int) -> list[int]:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return [int(v) for v in self.indices[lo:hi]]

    def degree(self, u: int) -> int:
        """Row sum of the adjacency matrix (loops counted once per count)."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        return int(self.counts[lo:hi].sum())

    @property
    def degrees(self) -> np.ndarray:
        rows = np.repeat(np.arange(self.vertex_count), np.diff(self.indptr))
        return np.bincount(rows, weights=self.counts, minlength=self.vertex_count).astype(np.int64)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.vertex_count else 0

    @property
    def edge_count(self) -> int:
        """Number of undirected edges, with multiplicity; loops counted once."""
        rows = np.repeat(np.arange(self.vertex_count), np.diff(self.indptr))
        off = rows != self.indices
        return int(self.counts[off].sum() // 2 + self.counts[~off].sum())

    def to_sparse(self) -> sp.csr_matrix:
        n = self.vertex_count
        return sp.csr_matrix((self.counts, self.indices, self.indptr), shape=(n, n))

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()

    def edges(self) -> list[tuple[int, int, int]]:
        """Upper-triangular ``(u, v, m)`` triples, loops included, sorted."""
        out = []
        for u in range(self.vertex_count):
            lo, hi = self.indptr[u], self.indptr[u + 1]
            for v, m in zip(self.indices[lo:hi], self.counts[lo:hi]):
                if v >= u:
                    out.append((u, int(v), int(m)))
        return out

    def position(self, key) -> int:
        if self.labels is None:
            return int(key)
        return self.labels.index(key)

    def is_connected(self) -> bool:
        if self.vertex_count == 0:
            return True
        seen = np.zeros(self.vertex_count, dtype=bool)
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v in self.indices[self.indptr[u] : self.indptr[u + 1]]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        return bool(seen.all())

    def induced(self, positions: Sequence[int]) -> FiniteGraph:
        pos = list(positions)
        index = {p: i for i, p in enumerate(pos)}
        acc = {}
        for i, p in enumerate(pos):
            lo, hi = self.indptr[p], self.indptr[p + 1]
            for v, m in zip(self.indices[lo:hi], self.counts[lo:hi]):
                j = index.get(int(v))
                if j is not None:
                    acc[(i, j)] = int(m)
        labels = None if self.labels is None else [self.labels[p] for p in pos]
        return FiniteGraph._from_dict(len(pos), acc, labels=labels, schreier=self.schreier)


def neighbors(family, v) -> list:
    """Exact, canonically sorted neighbor list of ``v`` in ``family``."""
    return family.neighbors(v)


def ball(family, center=None, radius: int = 0, *, budget: int | None = None) -> FiniteGraph:
    """Induced subgraph on the vertices within ``radius`` of ``center``.

    Vertices are ordered breadth-first, canonical key order inside each
    level; the last level is boundary-marked.
    """
    if radius < 0:
        raise InvalidParameter("radius must be >= 0")
    budget = default_budget() if budget is None else budget
    if center is None:
        center = family.base_vertex
    family.neighbors(center)  # validates the key

    level = [center]
    index = {center: 0}
    order = [center]
    if len(order) > budget:
        raise SizeLimitExceeded(f"ball exceeds vertex budget {budget}")
    for _ in range(radius):
        nxt = set()
        for v in level:
            for w in family.neighbors(v):
                if w not in index:
                    nxt.add(w)
        level = sorted(nxt)
        if len(order) + len(level) > budget:
            raise SizeLimitExceeded(
                f"ball of radius {radius} exceeds vertex budget {budget}"
            )
        for w in level:
            index[w] = len(order)
            order.append(w)
    boundary = range(len(order) - len(level), len(order)) if radius > 0 else [0]

    indptr = [0]
    cols: list[int] = []
    for v in order:
        row = sorted(index[w] for w in family.neighbors(v) if w in index)
        cols.extend(row)
        indptr.append(len(cols))
    return FiniteGraph(
        len(order),
        np.array(indptr, dtype=np.int64),
        np.array(cols, dtype=np.int64),
        np.ones(len(cols), dtype=np.int64),
        labels=tuple(order),
        boundary=frozenset(boundary),
    )


def adjacency_apply(g: FiniteGraph, x) -> np.ndarray:
    """``A x`` honoring edge multiplicities; integer input stays integer."""
    x = np.asarray(x)
    if x.shape != (g.vertex_count,):
        raise DimensionMismatch(f"vector of length {x.shape} for {g.vertex_count} vertices")
    if x.dtype == object:
        out = np.zeros(g.vertex_count, dtype=object)
        for u in range(g.vertex_count):
            lo, hi = g.indptr[u], g.indptr[u + 1]
            out[u] = sum(int(m) * x[v] for v, m in zip(g.indices[lo:hi], g.counts[lo:hi]))
        return out
    return g.to_sparse() @ x


def closed_walk_count(family, v=None, n: int = 0, *, radius: int | None = None,
                      budget: int | None = None) -> int:
    """Exact number of closed walks of length ``n`` at ``v``, i.e. <A^n d_v, d_v>.

    Integer dynamic programming on the ball of radius ceil(n/2), which
    already contains every vertex such a walk can visit.
    """
    if n < 0:
        raise InvalidParameter("walk length must be >= 0")
    if v is None:
        v = family.base_vertex
    r = math.ceil(n / 2) if radius is None else radius
    g = ball(family, v, r, budget=budget)
    nbrs = [g.neighbor_list(u) for u in range(g.vertex_count)]
    cur = [0] * g.vertex_count
    cur[0] = 1
    for _ in range(n):
        nxt = [0] * g.vertex_count
        for u, c in enumerate(cur):
            if c:
                for w in nbrs[u]:
                    nxt[w] += c
        cur = nxt
    return cur[0]


# edge-list text format -------------------------------------------------


def write_edge_list(g: FiniteGraph, out: TextIO) -> None:
    out.write(f"# vertices {g.vertex_count}\n")
    if g.schreier:
        out.write("# schreier\n")
    for u, v, m in g.edges():
        out.write(f"{u} {v} {m}\n")


def format_edge_list(g: FiniteGraph) -> str:
    buf = io.StringIO()
    write_edge_list(g, buf)
    return buf.getvalue()


def read_edge_list(text: str) -> FiniteGraph:
    """Parse ``u v [m]`` lines (0-indexed, ``#`` comments).

    A ``# vertices N`` comment fixes the vertex count (isolated vertices
    survive the round trip); otherwise it is 1 + the largest index seen.
    """
    n = None
    schreier = False
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line, _, comment = raw.partition("#")
        words = comment.split()
        if words[:1] == ["vertices"] and len(words) > 1:
            n = int(words[1])
        elif words[:1] == ["schreier"]:
            schreier = True
        parts = line.split()
        if not parts:
            continue
        if len(parts) not in (2, 3):
            raise InvalidParameter(f"line {lineno}: expected 'u v [multiplicity]'")
        try:
            edges.append(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise InvalidParameter(f"line {lineno}: non-integer field") from exc
    if n is None:
        n = 1 + max((max(e[0], e[1]) for e in edges), default=-1)
    if not schreier and any(e[0] == e[1] or (len(e) > 2 and e[2] != 1) for e in edges):
        schreier = True
    return FiniteGraph.from_edges(n, edges, schreier=schreier)
