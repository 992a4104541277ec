"""Spectral theory of adjacency operators of infinite graphs, at desk scale.

Graph families and finite balls (:mod:`families`, :mod:`graph_core`),
Jacobi matrices (:mod:`jacobi`), the tree decomposition (:mod:`ssrt`),
spectral measures (:mod:`measures`), marked spectra and cospectrality
(:mod:`spectra`), the norm-at-most-2 classifier (:mod:`forbidden`) and
Schreier graphs (:mod:`schreier`).
"""

from .errors import CospectraError
from .families import (
    SSRT, DInfinity, FiniteImported, GraphFamily, Lattice, Line, Ray, RegularRootedTree,
    RegularTree, branching_of, parse_family, rotations,
)
from .graph_core import FiniteGraph, adjacency_apply, ball, closed_walk_count, neighbors
from .sequences import BranchingSeq

__all__ = [
    "BranchingSeq", "CospectraError", "DInfinity", "FiniteGraph", "FiniteImported", "GraphFamily",
    "Lattice", "Line", "Ray", "RegularRootedTree", "RegularTree", "SSRT", "adjacency_apply",
    "ball", "branching_of", "closed_walk_count", "neighbors", "parse_family", "rotations",
]

__version__ = "0.1.0"
