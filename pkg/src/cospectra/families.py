"""Symbolic descriptors of the graph families.

Vertex keys are canonical per family:

* Ray, Line: ``int``;
* DInfinity: ``int``, with ``D_PRIME = -1`` standing for the extra vertex 0';
* Lattice(d): tuple of ``d`` ints;
* rooted trees (RegularRootedTree, RegularTree, SSRT): tuple of digits, the
  empty tuple being the root; digit r ranges over ``range(d_r)``.
* FiniteImported: position ``0 .. n-1``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, ClassVar

from .errors import InvalidKey, InvalidParameter, NotATree
from .graph_core import FiniteGraph
from .sequences import BranchingSeq

D_PRIME = -1


class GraphFamily:
    """Base class; subclasses are frozen dataclasses."""

    name: ClassVar[str]
    infinite: ClassVar[bool] = True

    def neighbors(self, v) -> list:
        raise NotImplementedError

    def is_vertex(self, v) -> bool:
        raise NotImplementedError

    @property
    def max_degree(self) -> int:
        raise NotImplementedError

    @property
    def base_vertex(self):
        """Root, origin or vertex 0: where vertex measures are taken."""
        raise NotImplementedError

    def params(self) -> dict[str, Any]:
        return {}

    def to_json(self) -> dict[str, Any]:
        return {"family": self.name, "params": self.params()}

    def spec(self) -> str:
        """``name:params`` form used on the command line."""
        params = self.params()
        if not params:
            return self.name
        return self.name + ":" + ",".join(str(v) for v in params.values())

    def _check(self, v):
        if not self.is_vertex(v):
            raise InvalidKey(f"{v!r} is not a vertex of {self.spec()}")


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


@dataclass(frozen=True)
class Ray(GraphFamily):
    name: ClassVar[str] = "ray"

    def is_vertex(self, v) -> bool:
        return _is_int(v) and v >= 0

    def neighbors(self, v) -> list:
        self._check(v)
        return [1] if v == 0 else [v - 1, v + 1]

    @property
    def max_degree(self) -> int:
        return 2

    @property
    def base_vertex(self):
        return 0


@dataclass(frozen=True)
class Line(GraphFamily):
    name: ClassVar[str] = "line"

    def is_vertex(self, v) -> bool:
        return _is_int(v)

    def neighbors(self, v) -> list:
        self._check(v)
        return [v - 1, v + 1]

    @property
    def max_degree(self) -> int:
        return 2

    @property
    def base_vertex(self):
        return 0


@dataclass(frozen=True)
class DInfinity(GraphFamily):
    """The ray with an extra leaf 0' (key ``D_PRIME``) attached to vertex 1."""

    name: ClassVar[str] = "dinfinity"

    def is_vertex(self, v) -> bool:
        return _is_int(v) and v >= D_PRIME

    def neighbors(self, v) -> list:
        self._check(v)
        if v in (D_PRIME, 0):
            return [1]
        if v == 1:
            return [D_PRIME, 0, 2]
        return [v - 1, v + 1]

    @property
    def max_degree(self) -> int:
        return 3

    @property
    def base_vertex(self):
        return 0


@dataclass(frozen=True)
class Lattice(GraphFamily):
    d: int
    name: ClassVar[str] = "lattice"

    def __post_init__(self):
        if not _is_int(self.d) or self.d < 1:
            raise InvalidParameter(f"lattice dimension must be >= 1, got {self.d!r}")

    def is_vertex(self, v) -> bool:
        return isinstance(v, tuple) and len(v) == self.d and all(_is_int(c) for c in v)

    def neighbors(self, v) -> list:
        self._check(v)
        out = []
        for j in range(self.d):
            for step in (-1, 1):
                w = list(v)
                w[j] += step
                out.append(tuple(w))
        out.sort()
        return out

    @property
    def max_degree(self) -> int:
        return 2 * self.d

    @property
    def base_vertex(self):
        return (0,) * self.d

    def params(self):
        return {"d": self.d}


class _RootedTree(GraphFamily):
    """Shared vertex logic for trees given by a branching sequence."""

    @property
    def branching(self) -> BranchingSeq:
        raise NotImplementedError

    def is_vertex(self, v) -> bool:
        if not isinstance(v, tuple):
            return False
        seq = self.branching
        return all(_is_int(x) and 0 <= x < seq[r] for r, x in enumerate(v))

    def neighbors(self, v) -> list:
        self._check(v)
        out = [v + (i,) for i in range(self.branching[len(v)])]
        if v:
            out.insert(0, v[:-1])
        return out

    @property
    def max_degree(self) -> int:
        return self.branching.max_degree + 1

    @property
    def base_vertex(self):
        return ()


@dataclass(frozen=True)
class RegularRootedTree(_RootedTree):
    d: int
    name: ClassVar[str] = "rootedtree"

    def __post_init__(self):
        if not _is_int(self.d) or self.d < 2:
            raise InvalidParameter(f"rooted tree branching must be >= 2, got {self.d!r}")

    @property
    def branching(self) -> BranchingSeq:
        return BranchingSeq.constant(self.d)

    def params(self):
        return {"d": self.d}


@dataclass(frozen=True)
class RegularTree(_RootedTree):
    """The d-regular tree, rooted at an arbitrary vertex."""

    d: int
    name: ClassVar[str] = "tree"

    def __post_init__(self):
        if not _is_int(self.d) or self.d < 3:
            raise InvalidParameter(f"regular tree degree must be >= 3, got {self.d!r}")

    @property
    def branching(self) -> BranchingSeq:
        return BranchingSeq((self.d,), (self.d - 1,))

    @property
    def max_degree(self) -> int:
        return self.d

    def params(self):
        return {"d": self.d}


@dataclass(frozen=True)
class SSRT(_RootedTree):
    seq: BranchingSeq
    name: ClassVar[str] = "ssrt"

    @property
    def branching(self) -> BranchingSeq:
        return self.seq

    def params(self):
        return {"branching": self.seq.to_text()}


@dataclass(frozen=True, eq=False)
class FiniteImported(GraphFamily):
    graph: FiniteGraph
    name: ClassVar[str] = "finite"
    infinite: ClassVar[bool] = False

    def is_vertex(self, v) -> bool:
        return _is_int(v) and 0 <= v < self.graph.vertex_count

    def neighbors(self, v) -> list:
        self._check(v)
        return sorted(self.graph.neighbor_list(v))

    @property
    def max_degree(self) -> int:
        return self.graph.max_degree

    @property
    def base_vertex(self):
        return 0

    def params(self):
        return {"vertices": self.graph.vertex_count}


TREE_FAMILIES = (RegularRootedTree, RegularTree, SSRT)


def branching_of(family: GraphFamily) -> BranchingSeq:
    if isinstance(family, _RootedTree):
        return family.branching
    raise NotATree(f"{family.spec()} is not a spherically symmetric rooted tree")


def rotations(seq: BranchingSeq) -> list[BranchingSeq]:
    return seq.rotations()


def parse_family(text: str) -> GraphFamily:
    """Parse the ``name:params`` command-line syntax.

    >>> parse_family("lattice:2")
    Lattice(d=2)
    """
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    try:
        if name == "ray":
            return Ray()
        if name == "line":
            return Line()
        if name in ("dinfinity", "dinf"):
            return DInfinity()
        if name == "lattice":
            return Lattice(int(arg))
        if name in ("rootedtree", "rooted"):
            return RegularRootedTree(int(arg))
        if name in ("tree", "regulartree"):
            return RegularTree(int(arg))
        if name == "ssrt":
            return SSRT(BranchingSeq.parse(arg))
    except ValueError as exc:
        raise InvalidParameter(f"bad parameters in family spec {text!r}") from exc
    raise InvalidParameter(f"unknown family {name!r}")


def family_from_json(obj: dict | str) -> GraphFamily:
    if isinstance(obj, str):
        obj = json.loads(obj)
    name = obj.get("family")
    params = obj.get("params", {})
    if name in ("lattice", "rootedtree", "tree"):
        return parse_family(f"{name}:{params['d']}")
    if name == "ssrt":
        return SSRT(BranchingSeq.parse(params["branching"]))
    if name in ("ray", "line", "dinfinity"):
        return parse_family(name)
    raise InvalidParameter(f"cannot build a family from {obj!r}")
