"""Marked spectra (spectrum, measure class, multiplicity) of the graph
families, norm estimates from finite induced subgraphs, and cospectrality
verdicts.

Verdicts come from the catalog; the numerical evidence attached to them
(endpoint lower bounds, interior positivity of the vertex measures) is a
consistency check only.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Sequence

import numpy as np
import scipy.sparse.linalg as spla
from numpy.polynomial import Polynomial

from .errors import InvalidParameter, NotCataloged, ToleranceFailure
from .families import (
    SSRT, DInfinity, FiniteImported, GraphFamily, Lattice, Line, Ray, RegularRootedTree,
    RegularTree, TREE_FAMILIES, branching_of,
)
from .graph_core import adjacency_apply, ball
from .jacobi import JacobiSpec, eigen, eigenvalues, jacobi_from_branching, top_eigenvalue, truncate
from .measures import (
    DEFAULT_GRID_STEP, AllPositive, Arcsine, JaDensity, Semicircle, SpectralMeasure,
    convolution_power, positivity_on_interior,
)
from .sequences import BranchingSeq
from .ssrt import decompose, multiplicities, sphere_sizes

DENSE_LIMIT = 2000
EVIDENCE_TOL = 1e-3
LANCZOS_RESIDUAL = 1e-10

LEBESGUE = "LebesgueOnSpectrum"
LEBESGUE_PLUS_ATOMS = "LebesguePlusAtoms"


@dataclass(frozen=True)
class Multiplicity:
    kind: str  # "One", "Uniform" or "UniformInfinite"
    n: int | None = None

    def __str__(self):
        return f"Uniform({self.n})" if self.kind == "Uniform" else self.kind


ONE = Multiplicity("One")
UNIFORM_INFINITE = Multiplicity("UniformInfinite")


def uniform(n: int) -> Multiplicity:
    if n == 1:
        return ONE
    return Multiplicity("Uniform", n)


@dataclass(frozen=True)
class MarkedSpectrum:
    """``bands``: closed intervals whose union is the continuous spectrum;
    ``atoms``: (eigenvalue, multiplicity), None meaning infinite;
    ``radius_sq``: exact square of the spectral radius when known."""

    bands: tuple[tuple[float, float], ...]
    measure_class: str
    multiplicity: Multiplicity
    provenance: str
    atoms: tuple[tuple[float, int | None], ...] = ()
    radius_sq: Fraction | None = None

    def __post_init__(self):
        if not self.bands or any(lo > hi for lo, hi in self.bands):
            raise InvalidParameter("spectrum needs at least one band lo <= hi")

    @property
    def spectrum(self) -> tuple[float, float]:
        """Convex hull of the spectrum, atoms included."""
        xs = [x for b in self.bands for x in b] + [x for x, _ in self.atoms]
        return (min(xs), max(xs))

    @property
    def norm(self) -> float:
        if self.radius_sq is not None:
            return math.sqrt(float(self.radius_sq))
        lo, hi = self.spectrum
        return max(abs(lo), abs(hi))

    def to_json(self) -> dict[str, Any]:
        return {
            "spectrum": list(self.spectrum),
            "bands": [list(b) for b in self.bands],
            "atoms": [{"value": x, "multiplicity": "infinite" if m is None else m}
                      for x, m in self.atoms],
            "measure_class": self.measure_class,
            "multiplicity": str(self.multiplicity),
            "provenance": self.provenance,
            "norm_squared": None if self.radius_sq is None else str(self.radius_sq),
        }


def _interval(radius_sq: Fraction, mult: Multiplicity, provenance: str,
              atoms=()) -> MarkedSpectrum:
    r = math.sqrt(float(radius_sq))
    cls = LEBESGUE_PLUS_ATOMS if atoms else LEBESGUE
    return MarkedSpectrum(((-r, r),), cls, mult, provenance, tuple(atoms), Fraction(radius_sq))


def _rooted(d: int) -> MarkedSpectrum:
    return _interval(Fraction(4 * d), UNIFORM_INFINITE,
                     f"catalog: rooted tree with constant branching {d}, components sqrt({d}) J")


def _regular(d: int) -> MarkedSpectrum:
    return _interval(Fraction(4 * (d - 1)), UNIFORM_INFINITE,
                     f"catalog: {d}-regular tree, components sqrt({d - 1}) J_a with a^2 = {d}/{d - 1} "
                     f"and sqrt({d - 1}) J")


def marked_spectrum(family: GraphFamily) -> MarkedSpectrum:
    if isinstance(family, Ray):
        return _interval(Fraction(4), ONE, "catalog: free Jacobi matrix, semicircle law")
    if isinstance(family, Line) or (isinstance(family, Lattice) and family.d == 1):
        return _interval(Fraction(4), uniform(2),
                         "catalog: line, arcsine law, even and odd parts")
    if isinstance(family, DInfinity):
        return _interval(Fraction(4), ONE, "catalog: ray with extra leaf, kernel vector at 0",
                         atoms=((0.0, 1),))
    if isinstance(family, Lattice):
        return _interval(Fraction(4 * family.d ** 2), UNIFORM_INFINITE,
                         f"catalog: Z^{family.d}, {family.d}-fold convolution of the arcsine law")
    if isinstance(family, RegularRootedTree):
        return _rooted(family.d)
    if isinstance(family, RegularTree):
        return _regular(family.d)
    if isinstance(family, SSRT):
        seq = family.seq
        if not seq.prefix and len(seq.period) == 1:
            return _rooted(seq.period[0])
        if len(seq.prefix) == 1 and seq.period == (seq.prefix[0] - 1,) and seq.prefix[0] >= 3:
            return _regular(seq.prefix[0])
        return derived_marked_spectrum(seq)
    raise NotCataloged(f"no catalog entry for {family.spec()}")


# spectra derived from the Jacobi reduction -----------------------------


def discriminant(period_sq: Sequence) -> Polynomial:
    """Trace of the transfer matrix over one period of the periodic Jacobi
    matrix with squared off-diagonals ``period_sq``."""
    b = [math.sqrt(float(q)) for q in period_sq]
    p = len(b)
    one = Polynomial([1.0])
    zero = Polynomial([0.0])
    m = [[one, zero], [zero, one]]
    for n in range(p):
        t = [[Polynomial([0.0, 1.0 / b[n]]), Polynomial([-b[n - 1] / b[n]])], [one, zero]]
        m = [[t[0][0] * m[0][0] + t[0][1] * m[1][0], t[0][0] * m[0][1] + t[0][1] * m[1][1]],
             [m[0][0], m[0][1]]]
    return m[0][0] + m[1][1]


def periodic_bands(period_sq: Sequence) -> tuple[tuple[float, float], ...]:
    delta = discriminant(period_sq)
    roots = np.concatenate([(delta - 2).roots(), (delta + 2).roots()])
    edges = np.sort(roots.real)
    bands: list[list[float]] = []
    for lo, hi in zip(edges[0::2], edges[1::2]):
        if bands and lo - bands[-1][1] < 1e-9:
            bands[-1][1] = float(hi)
        else:
            bands.append([float(lo), float(hi)])
    return tuple((lo, hi) for lo, hi in bands)


def _in_bands(x: float, bands, margin: float) -> bool:
    return any(lo - margin <= x <= hi + margin for lo, hi in bands)


def gap_eigenvalues(j: JacobiSpec, bands, size: int = 400) -> list[float]:
    """Eigenvalues of the half-line operator outside the bands: section
    eigenvalues in a gap that persist, with non-negligible first component,
    at sizes ``size`` and ``size + 1``."""
    found = []
    a, b = eigen(truncate(j, size)), eigen(truncate(j, size + 1))
    for x, w in zip(a.eigenvalues, a.first_components):
        if _in_bands(x, bands, 1e-6) or w <= 1e-10:
            continue
        k = np.argmin(np.abs(b.eigenvalues - x))
        if abs(b.eigenvalues[k] - x) < 1e-8 and b.first_components[k] > 1e-10:
            found.append(0.0 if abs(x) < 1e-9 else float(x))
    return found


def derived_marked_spectrum(seq: BranchingSeq) -> MarkedSpectrum:
    """Marked spectrum assembled from the decomposition of an SSRT.

    Tail components (rotations of the period) occur at infinitely many
    levels; prefix components occur once, with multiplicity m_n. All share
    the bands of the periodic part, each with uniform infinite multiplicity.
    """
    pre = len(seq.prefix)
    p = len(seq.period)
    bands = periodic_bands(seq.period)
    atoms: dict[float, int | None] = {}
    seen: dict[JacobiSpec, int] = {}
    for n in range(pre + p):
        j = jacobi_from_branching(seq, n)
        if j in seen:
            continue
        seen[j] = n
        infinite = n >= pre
        mult = None if infinite else sum(
            multiplicities(seq, k) for k in range(pre) if jacobi_from_branching(seq, k) == j
        )
        for x in gap_eigenvalues(j, bands):
            key = round(x, 10)
            if key in atoms:
                atoms[key] = None if (atoms[key] is None or mult is None) else atoms[key] + mult
            else:
                atoms[key] = mult
    cls = LEBESGUE_PLUS_ATOMS if atoms else LEBESGUE
    return MarkedSpectrum(
        bands, cls, UNIFORM_INFINITE,
        f"derived: periodic Jacobi components of branching {seq.to_text()}",
        tuple(sorted(atoms.items())),
    )


# norm estimates ---------------------------------------------------------


def default_radii(family: GraphFamily) -> tuple[int, ...]:
    if isinstance(family, Lattice) and family.d >= 2:
        return {2: (10, 20, 40), 3: (10, 20, 40, 60)}.get(family.d, (2, 4, 8))
    if isinstance(family, TREE_FAMILIES):
        return (2, 4, 6, 8, 10, 12, 100, 1000)
    return (10, 100, 1000)


def _tree_ball_top(family: GraphFamily, radius: int) -> float:
    """Top eigenvalue of a tree ball from its Jacobi components; only the
    first level carrying each distinct component matters."""
    seq = branching_of(family)
    best = -math.inf
    seen = set()
    for n in range(min(radius, len(seq.prefix) + len(seq.period) - 1) + 1):
        j = jacobi_from_branching(seq, n)
        if j not in seen:
            seen.add(j)
            best = max(best, top_eigenvalue(truncate(j, radius - n + 1)))
    return best


def _lanczos_top(g) -> float:
    a = g.to_sparse().astype(float)
    v0 = np.ones(g.vertex_count)
    vals, vecs = spla.eigsh(a, k=1, which="LA", v0=v0, tol=0)
    x = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    lam = float(x @ (a @ x))
    resid = float(np.linalg.norm(a @ x - lam * x))
    if resid > LANCZOS_RESIDUAL * max(1.0, lam):
        raise ToleranceFailure(f"Lanczos residual {resid:.3e} above tolerance")
    return lam


@dataclass(frozen=True)
class NormPoint:
    radius: int
    lower_bound: float
    method: str
    vertices: int | None


@dataclass(frozen=True)
class NormEstimate:
    family: str
    points: tuple[NormPoint, ...]
    catalog_norm: float

    @property
    def lower_bounds(self) -> list[float]:
        return [p.lower_bound for p in self.points]

    @property
    def monotone(self) -> bool:
        lb = self.lower_bounds
        return all(b >= a - 1e-12 for a, b in zip(lb, lb[1:]))

    @property
    def bounded(self) -> bool:
        return all(b <= self.catalog_norm + 1e-9 for b in self.lower_bounds)

    @property
    def gap(self) -> float:
        return self.catalog_norm - max(self.lower_bounds)

    def to_json(self) -> dict[str, Any]:
        return {
            "family": self.family,
            "catalog_norm": self.catalog_norm,
            "points": [p.__dict__ for p in self.points],
            "monotone": self.monotone,
            "bounded": self.bounded,
            "gap": self.gap,
        }

    def to_csv(self) -> str:
        rows = ["radius,lower_bound"] + [f"{p.radius},{p.lower_bound!r}" for p in self.points]
        return "\n".join(rows) + "\n"


def ball_top(family: GraphFamily, radius: int, *, budget: int | None = None) -> NormPoint:
    """Top adjacency eigenvalue of the ball of ``radius`` at the base vertex."""
    if isinstance(family, TREE_FAMILIES):
        count = sum(sphere_sizes(branching_of(family), radius)) if radius <= 64 else None
        if count is None or count > DENSE_LIMIT:
            return NormPoint(radius, _tree_ball_top(family, radius), "jacobi-reduction", count)
    g = ball(family, None, radius, budget=budget)
    if g.vertex_count <= DENSE_LIMIT:
        top = float(np.linalg.eigvalsh(g.to_dense().astype(float))[-1])
        return NormPoint(radius, top, "dense", g.vertex_count)
    return NormPoint(radius, _lanczos_top(g), "lanczos", g.vertex_count)


def norm_estimate(family: GraphFamily, radii: Sequence[int] | None = None, *,
                  budget: int | None = None, workers: int = 1) -> NormEstimate:
    """Lower bounds for the adjacency norm from balls of increasing radius."""
    radii = tuple(default_radii(family) if radii is None else radii)
    if any(r < 0 for r in radii) or list(radii) != sorted(set(radii)):
        raise InvalidParameter("radii must be strictly increasing and >= 0")
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        points = tuple(pool.map(lambda r: ball_top(family, r, budget=budget), radii))
    return NormEstimate(family.spec(), points, marked_spectrum(family).norm)


def endpoint_lower_bound(family: GraphFamily) -> float:
    """A lower bound for the norm, sharp to well within ``EVIDENCE_TOL``,
    from a large induced subgraph (path, box or tree ball)."""
    if isinstance(family, (Ray, Line, DInfinity)):
        return ball_top(family, 400).lower_bound
    if isinstance(family, Lattice):
        # the box [-R, R]^d is the product of d paths
        path = ball_top(Ray(), 400).lower_bound
        return family.d * path
    if isinstance(family, TREE_FAMILIES):
        return _tree_ball_top(family, 2000)
    raise NotCataloged(f"no endpoint evidence for {family.spec()}")


# vertex measures and cospectrality --------------------------------------


def vertex_measure(family: GraphFamily, grid_step: float = DEFAULT_GRID_STEP) -> SpectralMeasure | None:
    """Density part of the vertex measure at the base vertex, when known in
    closed form (a grid for lattices)."""
    if isinstance(family, Ray):
        return Semicircle(1)
    if isinstance(family, (Line, DInfinity)):
        return Arcsine(1)
    if isinstance(family, Lattice):
        return convolution_power(Arcsine(1), family.d, step=grid_step)
    if isinstance(family, RegularRootedTree):
        return Semicircle(family.d)
    if isinstance(family, RegularTree):
        return JaDensity(family.d - 1, Fraction(family.d, family.d - 1))
    if isinstance(family, SSRT):
        seq = family.seq
        if not seq.prefix and len(seq.period) == 1:
            return Semicircle(seq.period[0])
        if len(seq.prefix) == 1 and seq.period == (seq.prefix[0] - 1,) and seq.prefix[0] >= 3:
            d = seq.prefix[0]
            return JaDensity(d - 1, Fraction(d, d - 1))
    return None


def _same_bands(a: MarkedSpectrum, b: MarkedSpectrum) -> bool:
    if a.radius_sq is not None and b.radius_sq is not None and len(a.bands) == len(b.bands) == 1:
        return a.radius_sq == b.radius_sq
    if len(a.bands) != len(b.bands):
        return False
    return all(abs(x - y) <= 1e-9 * max(1.0, abs(x))
               for ba, bb in zip(a.bands, b.bands) for x, y in zip(ba, bb))


def _same_atoms(a: MarkedSpectrum, b: MarkedSpectrum) -> bool:
    if len(a.atoms) != len(b.atoms):
        return False
    return all(abs(x - y) <= 1e-9 and m == n for (x, m), (y, n) in zip(a.atoms, b.atoms))


@dataclass(frozen=True)
class Verdict:
    cospectral: bool
    reasons: tuple[str, ...]
    spectra: tuple[MarkedSpectrum, MarkedSpectrum]
    evidence: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        return "Cospectral" if self.cospectral else "NotCospectral"

    def to_json(self) -> dict[str, Any]:
        return {
            "verdict": self.label,
            "reasons": list(self.reasons),
            "marked_spectra": [s.to_json() for s in self.spectra],
            "provenance": [s.provenance for s in self.spectra],
            "evidence": self.evidence,
        }


def _evidence(family: GraphFamily, spec: MarkedSpectrum, grid_step: float) -> dict[str, Any]:
    lb = endpoint_lower_bound(family)
    out: dict[str, Any] = {
        "family": family.spec(),
        "norm_lower_bound": lb,
        "catalog_norm": spec.norm,
        "endpoint_ok": spec.norm - EVIDENCE_TOL <= lb <= spec.norm + 1e-9,
    }
    m = vertex_measure(family, grid_step)
    if m is None:
        out["positivity"] = None
    else:
        res = positivity_on_interior(m, 1001)
        out["positivity"] = {
            "all_positive": isinstance(res, AllPositive),
            "min_value" if isinstance(res, AllPositive) else "fails_at":
                res.min_value if isinstance(res, AllPositive) else res.x,
        }
    return out


def are_cospectral(f1: GraphFamily, f2: GraphFamily, *, evidence: bool = True,
                   grid_step: float = DEFAULT_GRID_STEP) -> Verdict:
    """Compare marked spectra component by component (spectrum, atoms and
    measure class, multiplicity)."""
    s1, s2 = marked_spectrum(f1), marked_spectrum(f2)
    reasons = []
    if not _same_bands(s1, s2):
        reasons.append(f"spectrum {s1.spectrum} != {s2.spectrum}")
    if not _same_atoms(s1, s2) or s1.measure_class != s2.measure_class:
        reasons.append(
            f"atoms {[x for x, _ in s1.atoms]} ({s1.measure_class}) != "
            f"{[x for x, _ in s2.atoms]} ({s2.measure_class})"
        )
    if s1.multiplicity != s2.multiplicity:
        reasons.append(f"multiplicity {s1.multiplicity} != {s2.multiplicity}")
    ev = {}
    if evidence:
        ev = {"a": _evidence(f1, s1, grid_step), "b": _evidence(f2, s2, grid_step)}
    return Verdict(not reasons, tuple(reasons), (s1, s2), ev)


# D-infinity -------------------------------------------------------------


@dataclass(frozen=True)
class DInfinityReport:
    kernel_residuals: tuple[tuple[int, int], ...]
    finite_spectra: tuple[tuple[int, float, float], ...]

    @property
    def kernel_ok(self) -> bool:
        return all(res == 0 for _, res in self.kernel_residuals)

    @property
    def inside_ok(self) -> bool:
        return all(margin > 0 for _, _, margin in self.finite_spectra)

    @property
    def monotone(self) -> bool:
        tops = [t for _, t, _ in self.finite_spectra]
        return all(b > a for a, b in zip(tops, tops[1:]))

    @property
    def passed(self) -> bool:
        return self.kernel_ok and self.inside_ok and self.monotone

    def to_json(self) -> dict[str, Any]:
        return {
            "kernel_residuals": {str(r): v for r, v in self.kernel_residuals},
            "finite_spectra": [{"n": n, "top": t, "margin": m} for n, t, m in self.finite_spectra],
            "kernel_ok": self.kernel_ok,
            "inside_ok": self.inside_ok,
            "monotone": self.monotone,
            "passed": self.passed,
        }


def dinfinity_graph(n: int):
    """The Dynkin diagram D_n as the induced subgraph on 0', 0, 1, .., n-2."""
    if n < 4:
        raise InvalidParameter("D_n needs n >= 4")
    return ball(DInfinity(), 1, n - 3)


def dinfinity_checks(radii=range(2, 11), sizes=range(4, 21)) -> DInfinityReport:
    fam = DInfinity()
    residuals = []
    for r in radii:
        g = ball(fam, 0, r)
        xi = np.zeros(g.vertex_count, dtype=object)
        xi[g.position(0)] = 1
        xi[g.position(-1)] = -1
        residuals.append((r, int(max(abs(v) for v in adjacency_apply(g, xi)))))
    spectra = []
    for n in sizes:
        ev = np.linalg.eigvalsh(dinfinity_graph(n).to_dense().astype(float))
        spectra.append((n, float(ev[-1]), float(2.0 - np.abs(ev).max())))
    return DInfinityReport(tuple(residuals), tuple(spectra))


# rotations --------------------------------------------------------------


@dataclass(frozen=True)
class RotationReport:
    period: tuple[int, ...]
    rotations: tuple[str, ...]
    tail_sets: tuple[tuple[str, ...], ...]
    tail_identity: bool
    norm_max_diff: float
    endpoint_max_diff: float

    @property
    def passed(self) -> bool:
        return (self.tail_identity and self.norm_max_diff <= EVIDENCE_TOL
                and self.endpoint_max_diff <= EVIDENCE_TOL)

    def to_json(self) -> dict[str, Any]:
        return {
            "period": list(self.period),
            "rotations": list(self.rotations),
            "tail_components": [list(s) for s in self.tail_sets],
            "tail_identity": self.tail_identity,
            "norm_max_diff": self.norm_max_diff,
            "endpoint_max_diff": self.endpoint_max_diff,
            "passed": self.passed,
            "note": "cospectrality of rotations is a catalog fact; the checks above are evidence",
        }


def compare_rotations(seq: BranchingSeq, *, radii: Sequence[int] = (500, 1000),
                      quadrature_size: int = 1000) -> RotationReport:
    """Tail-component identity, matched-radius norm bounds and quadrature
    support endpoints for every pair of rotations of a periodic sequence."""
    rots = seq.rotations()
    p = len(seq.period)
    tails = []
    norms = []
    ends = []
    for rot in rots:
        dec = decompose(rot, 3 * p)
        tails.append(frozenset(dec.distinct_jacobis(from_level=p)))
        fam = SSRT(rot)
        norms.append([_tree_ball_top(fam, r) for r in radii])
        q = eigenvalues(truncate(dec.components[0].jacobi, quadrature_size), [0, quadrature_size - 1])
        ends.append((float(q[0]), float(q[1])))
    identity = all(t == tails[0] for t in tails)
    norm_diff = 0.0
    end_diff = 0.0
    for i, k in combinations(range(len(rots)), 2):
        norm_diff = max(norm_diff, max(abs(a - b) for a, b in zip(norms[i], norms[k])))
        end_diff = max(end_diff, abs(ends[i][0] - ends[k][0]), abs(ends[i][1] - ends[k][1]))
    return RotationReport(
        seq.period,
        tuple(r.to_text() for r in rots),
        tuple(tuple(sorted(j.describe() for j in t)) for t in tails),
        identity, norm_diff, end_diff,
    )
