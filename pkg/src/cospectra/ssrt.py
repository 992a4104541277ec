"""Spherically symmetric rooted trees: shift operators, the sphere basis
and the reduction of the adjacency operator to weighted Jacobi matrices.

Ball vectors use the breadth-first order of :func:`graph_core.ball`: the
spheres S_0, S_1, ... one after another, each in lexicographic digit order.
Child ``c`` of the vertex with index ``i`` in S_r has index ``i*d_r + c`` in
S_{r+1}.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import DimensionMismatch, InvalidParameter, SizeLimitExceeded
from .families import SSRT
from .graph_core import ball, default_budget
from .jacobi import JacobiSpec, eigenvalues, jacobi_from_branching, truncate
from .sequences import BranchingSeq

SPECTRA_TOL = 1e-8
CONJUGATION_TOL = 1e-10
ACCEPT_NORM = 1e-8


def sphere_sizes(seq: BranchingSeq, depth: int) -> list[int]:
    """|S_0|, ..., |S_depth|."""
    sizes = [1]
    for r in range(depth):
        sizes.append(sizes[-1] * seq[r])
    return sizes


def _offsets(sizes: list[int]) -> list[int]:
    return [0] + list(np.cumsum(sizes))


def _check_budget(seq: BranchingSeq, depth: int, budget: int | None) -> list[int]:
    if depth < 0:
        raise InvalidParameter("depth must be >= 0")
    budget = default_budget() if budget is None else budget
    sizes = sphere_sizes(seq, depth)
    if sum(sizes) > budget:
        raise SizeLimitExceeded(f"ball of depth {depth} has {sum(sizes)} vertices > budget {budget}")
    return sizes


def _split(seq: BranchingSeq, depth: int, x) -> tuple[np.ndarray, list[int], list[int]]:
    sizes = sphere_sizes(seq, depth)
    x = np.asarray(x, dtype=float)
    if x.shape != (sum(sizes),):
        raise DimensionMismatch(f"vector of shape {x.shape}, ball has {sum(sizes)} vertices")
    return x, sizes, _offsets(sizes)


def shift_apply(seq: BranchingSeq, depth: int, x) -> np.ndarray:
    """(H x)(v) = x(parent of v); mass pushed past the last sphere is dropped."""
    x, sizes, off = _split(seq, depth, x)
    out = np.zeros_like(x)
    for r in range(depth):
        out[off[r + 1]:off[r + 2]] = np.repeat(x[off[r]:off[r + 1]], seq[r])
    return out


def shift_adjoint_apply(seq: BranchingSeq, depth: int, x) -> np.ndarray:
    """(H* x)(v) = sum of x over the children of v."""
    x, sizes, off = _split(seq, depth, x)
    out = np.zeros_like(x)
    for r in range(depth):
        out[off[r]:off[r + 1]] = x[off[r + 1]:off[r + 2]].reshape(sizes[r], seq[r]).sum(axis=1)
    return out


# multiplicities and components -----------------------------------------


def multiplicities(seq: BranchingSeq, n: int) -> int:
    """m_0 = 1, m_n = d_0 ... d_{n-2} (d_{n-1} - 1)."""
    if n < 0:
        raise InvalidParameter("level must be >= 0")
    if n == 0:
        return 1
    return math.prod(seq[q] for q in range(n - 1)) * (seq[n - 1] - 1)


@dataclass(frozen=True)
class Component:
    level: int
    multiplicity: int
    jacobi: JacobiSpec

    def to_json(self) -> dict[str, Any]:
        return {
            "level": self.level,
            "multiplicity": self.multiplicity,
            "jacobi": self.jacobi.describe(),
        }


@dataclass(frozen=True)
class Decomposition:
    seq: BranchingSeq
    components: tuple[Component, ...]

    def extend(self, levels: int) -> Decomposition:
        return decompose(self.seq, max(levels, len(self.components)))

    def distinct_jacobis(self, from_level: int = 0) -> set[JacobiSpec]:
        return {c.jacobi for c in self.components[from_level:]}

    def to_json(self) -> dict[str, Any]:
        return {
            "branching": self.seq.to_text(),
            "components": [c.to_json() for c in self.components],
        }


def decompose(seq: BranchingSeq, levels: int) -> Decomposition:
    if levels < 1:
        raise InvalidParameter("levels must be >= 1")
    comps = tuple(
        Component(n, multiplicities(seq, n), jacobi_from_branching(seq, n)) for n in range(levels)
    )
    return Decomposition(seq, comps)


# sphere basis -----------------------------------------------------------


def _mgs_complement(d: int) -> np.ndarray:
    """Orthonormal basis (d x (d-1)) of the zero-sum vectors in R^d.

    Modified Gram-Schmidt with one re-orthogonalization pass over the
    standard basis in order, after projecting out the constants.
    """
    ones = np.full(d, 1.0 / math.sqrt(d))
    cols: list[np.ndarray] = []
    for i in range(d):
        v = np.zeros(d)
        v[i] = 1.0
        for _ in range(2):
            v -= ones * (ones @ v)
            for q in cols:
                v -= q * (q @ v)
        nrm = np.linalg.norm(v)
        if nrm > ACCEPT_NORM:
            cols.append(v / nrm)
        if len(cols) == d - 1:
            break
    return np.column_stack(cols)


@dataclass(frozen=True, eq=False)
class SphereBasis:
    """Blocks ``blocks[(n, r)]``: orthonormal columns spanning U_{n,r}
    inside l2(S_r), for 0 <= n <= r <= depth."""

    seq: BranchingSeq
    depth: int
    sizes: tuple[int, ...]
    blocks: dict = field(repr=False)

    def column_order(self) -> list[tuple[int, int, int]]:
        """(n, c, r) for every column of :meth:`matrix`: by level, then
        column of U_{n,n}, then sphere."""
        out = []
        for n in range(self.depth + 1):
            for c in range(self.blocks[(n, n)].shape[1]):
                out.extend((n, c, r) for r in range(n, self.depth + 1))
        return out

    def matrix(self) -> np.ndarray:
        off = _offsets(list(self.sizes))
        order = self.column_order()
        q = np.zeros((off[-1], len(order)))
        for j, (n, c, r) in enumerate(order):
            q[off[r]:off[r + 1], j] = self.blocks[(n, r)][:, c]
        return q


def build_sphere_basis(seq: BranchingSeq, depth: int, *, budget: int | None = None) -> SphereBasis:
    sizes = _check_budget(seq, depth, budget)
    blocks = {(0, 0): np.ones((1, 1))}
    templates: dict[int, np.ndarray] = {}
    for r in range(1, depth + 1):
        d = seq[r - 1]
        for n in range(r):
            blocks[(n, r)] = np.repeat(blocks[(n, r - 1)], d, axis=0) / math.sqrt(d)
        # the complement of the pushed-forward blocks is the kernel of H*,
        # i.e. zero-sum vectors on each sibling group
        if d not in templates:
            templates[d] = _mgs_complement(d)
        new = np.kron(np.eye(sizes[r - 1]), templates[d])
        if new.shape[1] != multiplicities(seq, r):
            raise DimensionMismatch("complement has the wrong dimension")
        blocks[(r, r)] = new
    return SphereBasis(seq, depth, tuple(sizes), blocks)


# audit ------------------------------------------------------------------


@dataclass(frozen=True)
class DecompositionReport:
    branching: str
    depth: int
    vertex_count: int
    dims_ok: bool
    spectra_max_dev: float
    conjugation_max_dev: float
    orthogonality_max_dev: float
    per_component: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return (
            self.dims_ok
            and self.spectra_max_dev <= SPECTRA_TOL
            and self.conjugation_max_dev <= CONJUGATION_TOL
            and self.orthogonality_max_dev <= CONJUGATION_TOL
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "branching": self.branching,
            "depth": self.depth,
            "vertex_count": self.vertex_count,
            "dims_ok": self.dims_ok,
            "spectra_max_dev": self.spectra_max_dev,
            "conjugation_max_dev": self.conjugation_max_dev,
            "orthogonality_max_dev": self.orthogonality_max_dev,
            "per_component": list(self.per_component),
            "passed": self.passed,
        }


def verify_decomposition(seq: BranchingSeq, depth: int, *, budget: int | None = None,
                         workers: int = 1) -> DecompositionReport:
    """Check the Jacobi reduction on the ball of radius ``depth``.

    (i) sum of m_n (depth - n + 1) equals the ball size; (ii) the sorted
    spectrum of the ball equals the sorted union of m_n copies of each
    truncated component; (iii) in sphere-basis coordinates the adjacency
    matrix is block diagonal with exactly those tridiagonal blocks.
    """
    sizes = _check_budget(seq, depth, budget)
    g = ball(SSRT(seq), (), depth, budget=budget)
    n_vertices = g.vertex_count
    mult = [multiplicities(seq, n) for n in range(depth + 1)]
    dims_ok = sum(m * (depth - n + 1) for n, m in enumerate(mult)) == n_vertices == sum(sizes)

    dec = decompose(seq, depth + 1)
    sections = [truncate(c.jacobi, depth - c.level + 1) for c in dec.components]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        comp_eigs = list(pool.map(eigenvalues, sections))

    a = g.to_dense()
    ball_eigs = np.linalg.eigvalsh(a)
    expected = np.sort(np.concatenate([np.repeat(e, m) for e, m in zip(comp_eigs, mult)]))
    spectra_dev = float(np.abs(ball_eigs - expected).max()) if len(expected) == n_vertices else math.inf

    basis = build_sphere_basis(seq, depth, budget=budget)
    q = basis.matrix()
    ortho_dev = float(np.abs(q.T @ q - np.eye(q.shape[1])).max())
    b = q.T @ a @ q
    target = np.zeros_like(b)
    per_component = []
    pos = 0
    conj_dev = 0.0
    for comp, t in zip(dec.components, sections):
        dense = t.to_dense()
        k = t.size
        comp_dev = 0.0
        for _ in range(comp.multiplicity):
            target[pos:pos + k, pos:pos + k] = dense
            comp_dev = max(comp_dev, float(np.abs(b[pos:pos + k, pos:pos + k] - dense).max()))
            pos += k
        conj_dev = max(conj_dev, comp_dev)
        per_component.append({
            "level": comp.level,
            "multiplicity": comp.multiplicity,
            "size": k,
            "jacobi": comp.jacobi.describe(),
            "block_max_dev": comp_dev,
        })
    conj_dev = max(conj_dev, float(np.abs(b - target).max()))
    return DecompositionReport(
        seq.to_text(), depth, n_vertices, dims_ok, spectra_dev, conj_dev, ortho_dev,
        tuple(per_component),
    )
