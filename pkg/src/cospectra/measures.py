"""Spectral measures in three interchangeable forms.

* closed-form densities (semicircle, arcsine, and the vertex measure of the
  Jacobi matrix with first off-diagonal entry ``a``, rest 1);
* exact moment sequences (``MomentSequence``, the source of truth);
* discrete measures (``DiscreteMeasure``, e.g. Gauss quadrature);
* ``GridDensity``: cell averages on a uniform grid, used for convolution
  and positivity checks.

Closed forms are parametrised by ``scale_sq`` = (radius / 2)**2 so that
rescaling and exact moments stay rational.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Sequence

import numpy as np

from .errors import InvalidParameter, RepresentationMismatch
from .rational import as_fraction, square_as_fraction

DEFAULT_GRID_STEP = 1e-3

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


class SpectralMeasure:
    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError


# closed forms -----------------------------------------------------------


@dataclass(frozen=True)
class ClosedFormDensity(SpectralMeasure):
    scale_sq: Fraction = Fraction(1)

    def __post_init__(self):
        q = as_fraction(self.scale_sq)
        if q <= 0:
            raise InvalidParameter("scale must be positive")
        object.__setattr__(self, "scale_sq", q)

    @property
    def radius(self) -> float:
        return 2.0 * math.sqrt(float(self.scale_sq))

    @property
    def support(self) -> tuple[float, float]:
        return (-self.radius, self.radius)

    def theta_density(self, theta: np.ndarray) -> np.ndarray:
        """Density in the variable theta, where x = radius * cos(theta)."""
        raise NotImplementedError

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        r = self.radius
        inside = np.abs(x) < r
        out = np.zeros_like(x)
        xi = x[inside]
        s = np.sqrt(r * r - xi * xi)
        out[inside] = self.theta_density(np.arccos(xi / r)) / s
        return out

    def with_scale_sq(self, scale_sq: Fraction) -> ClosedFormDensity:
        raise NotImplementedError


@dataclass(frozen=True)
class Semicircle(ClosedFormDensity):
    """(1/(2 pi d)) sqrt(4d - x^2) on [-2 sqrt(d), 2 sqrt(d)], with d = scale_sq."""

    def theta_density(self, theta):
        return (2.0 / math.pi) * np.sin(theta) ** 2

    def with_scale_sq(self, scale_sq):
        return Semicircle(scale_sq)

    def exact_moments(self, up_to: int) -> MomentSequence:
        d = self.scale_sq
        return MomentSequence(
            tuple(Fraction(comb(k, k // 2), k // 2 + 1) * d ** (k // 2) if k % 2 == 0 else Fraction(0)
                  for k in range(up_to + 1))
        )


@dataclass(frozen=True)
class Arcsine(ClosedFormDensity):
    """1 / (pi sqrt(R^2 - x^2)) on [-R, R], R = 2 sqrt(scale_sq)."""

    def theta_density(self, theta):
        return np.full_like(np.asarray(theta, dtype=float), 1.0 / math.pi)

    def with_scale_sq(self, scale_sq):
        return Arcsine(scale_sq)

    def exact_moments(self, up_to: int) -> MomentSequence:
        c = self.scale_sq
        return MomentSequence(
            tuple(Fraction(comb(k, k // 2)) * c ** (k // 2) if k % 2 == 0 else Fraction(0)
                  for k in range(up_to + 1))
        )


@dataclass(frozen=True)
class JaDensity(ClosedFormDensity):
    """Vertex measure at the first basis vector of the Jacobi matrix with
    off-diagonal (a, 1, 1, ...), rescaled by sqrt(scale_sq).

    For a**2 <= 2 the measure is absolutely continuous; from the m-function
    m(z) = -1 / (z + a**2 m0(z)), m0 the semicircle transform,

        rho(y) = a**2 sqrt(4 - y**2) / (2 pi [y**2 (1 - a**2/2)**2 + a**4 (4 - y**2) / 4]).

    a = 1 is the semicircle, a**2 = 2 the arcsine law.
    """

    a_sq: Fraction = Fraction(1)

    def __post_init__(self):
        super().__post_init__()
        a_sq = as_fraction(self.a_sq)
        if not 0 < a_sq <= 2:
            raise InvalidParameter("density form needs 0 < a^2 <= 2 (no atoms)")
        object.__setattr__(self, "a_sq", a_sq)

    def theta_density(self, theta):
        a2 = float(self.a_sq)
        s2 = np.sin(theta) ** 2
        c2 = np.cos(theta) ** 2
        denom = 4.0 * c2 * (1.0 - a2 / 2.0) ** 2 + a2 * a2 * s2
        return 2.0 * a2 * s2 / (math.pi * denom)

    def with_scale_sq(self, scale_sq):
        return JaDensity(scale_sq, self.a_sq)


def semicircle(d=1) -> Semicircle:
    if as_fraction(d) <= 0:
        raise InvalidParameter("semicircle parameter must be positive")
    return Semicircle(d)


def arcsine() -> Arcsine:
    return Arcsine(1)


# moments and discrete ---------------------------------------------------


@dataclass(frozen=True)
class MomentSequence(SpectralMeasure):
    """Exact moments m_0 .. m_N (m_0 = 1)."""

    moments: tuple[Fraction, ...]
    support_hint: tuple[float, float] | None = None

    def __post_init__(self):
        ms = tuple(as_fraction(m) for m in self.moments)
        if not ms or ms[0] != 1:
            raise InvalidParameter("moment 0 must be exactly 1")
        object.__setattr__(self, "moments", ms)

    @classmethod
    def dirac(cls, up_to: int, at=0) -> MomentSequence:
        at = as_fraction(at)
        return cls(tuple(at**k for k in range(up_to + 1)), (float(at), float(at)))

    @property
    def order(self) -> int:
        return len(self.moments) - 1

    @property
    def support(self):
        if self.support_hint is None:
            raise RepresentationMismatch("moment sequences carry no support")
        return self.support_hint

    def __getitem__(self, k: int) -> Fraction:
        return self.moments[k]

    def __len__(self):
        return len(self.moments)


@dataclass(frozen=True, eq=False)
class DiscreteMeasure(SpectralMeasure):
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise InvalidParameter("nodes and weights must be 1-d of equal length")
        if np.any(weights < 0):
            raise InvalidParameter("weights must be non-negative")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def support(self):
        return (float(self.nodes.min()), float(self.nodes.max()))

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    def moments(self, up_to: int) -> list[float]:
        return [float(np.dot(self.weights, self.nodes**k)) for k in range(up_to + 1)]


# grids ------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GridDensity(SpectralMeasure):
    """Piecewise-constant density: ``values[i]`` is the average of the
    density over the cell [lo + i*step, lo + (i+1)*step]."""

    lo: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if self.step <= 0:
            raise InvalidParameter("grid step must be positive")
        if np.any(values < 0):
            raise InvalidParameter("grid density values must be >= 0")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def cells(self) -> int:
        return len(self.values)

    @property
    def support(self):
        return (self.lo, self.lo + self.cells * self.step)

    @property
    def centers(self) -> np.ndarray:
        return self.lo + (np.arange(self.cells) + 0.5) * self.step

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.step)

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.floor((x - self.lo) / self.step).astype(np.int64)
        ok = (idx >= 0) & (idx < self.cells)
        out = np.zeros_like(x)
        out[ok] = self.values[idx[ok]]
        return out

    def moments(self, up_to: int) -> list[float]:
        edges = self.lo + np.arange(self.cells + 1) * self.step
        out = []
        for k in range(up_to + 1):
            p = edges ** (k + 1)
            out.append(float(np.dot(self.values, p[1:] - p[:-1]) / (k + 1)))
        return out


def _grid_extent(lo: float, hi: float, step: float) -> tuple[int, int]:
    return math.floor(lo / step + 1e-9), math.ceil(hi / step - 1e-9)


def to_grid(m: SpectralMeasure, step: float = DEFAULT_GRID_STEP) -> GridDensity:
    """Cell averages of a closed-form density, integrated in the angle
    variable so that inverse-square-root endpoints stay finite."""
    if isinstance(m, GridDensity):
        if not math.isclose(m.step, step, rel_tol=1e-9):
            raise RepresentationMismatch(f"grid step {m.step} != requested {step}")
        return m
    if not isinstance(m, ClosedFormDensity):
        raise RepresentationMismatch(f"{type(m).__name__} cannot be sampled on a grid")
    r = m.radius
    k_lo, k_hi = _grid_extent(-r, r, step)
    edges = np.arange(k_lo, k_hi + 1) * step
    a = np.clip(edges[:-1], -r, r)
    b = np.clip(edges[1:], -r, r)
    t_hi = np.arccos(a / r)
    t_lo = np.arccos(b / r)
    half = 0.5 * (t_hi - t_lo)
    mid = 0.5 * (t_hi + t_lo)
    theta = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    masses = half * (m.theta_density(theta) @ _GL_WEIGHTS)
    masses /= masses.sum()
    return GridDensity(float(edges[0]), step, masses / step)


def _convolve_grids(g1: GridDensity, g2: GridDensity) -> GridDensity:
    if not math.isclose(g1.step, g2.step, rel_tol=1e-9):
        raise RepresentationMismatch(f"grid steps differ: {g1.step} vs {g2.step}")
    h = g1.step
    q = np.convolve(g1.values * h, g2.values * h)
    # uniform-on-cell x uniform-on-cell is a tent over two cells: split it evenly
    r = 0.5 * (np.concatenate(([0.0], q)) + np.concatenate((q, [0.0])))
    r /= r.sum()
    return GridDensity(g1.lo + g2.lo, h, r / h)


def _convolve_moments(m1: MomentSequence, m2: MomentSequence) -> MomentSequence:
    n = min(m1.order, m2.order)
    out = tuple(
        sum(comb(k, j) * m1[j] * m2[k - j] for j in range(k + 1)) for k in range(n + 1)
    )
    hint = None
    if m1.support_hint and m2.support_hint:
        hint = (m1.support_hint[0] + m2.support_hint[0], m1.support_hint[1] + m2.support_hint[1])
    return MomentSequence(out, hint)


def convolve(m1: SpectralMeasure, m2: SpectralMeasure, *, step: float | None = None) -> SpectralMeasure:
    """Convolution of two probability measures.

    Moments mode is exact (binomial rule); two densities are convolved on a
    common grid, the result supported on the Minkowski sum of the supports.
    """
    if isinstance(m1, MomentSequence) and isinstance(m2, MomentSequence):
        return _convolve_moments(m1, m2)
    gridable = (ClosedFormDensity, GridDensity)
    if isinstance(m1, gridable) and isinstance(m2, gridable):
        if step is None:
            grid = next((m.step for m in (m1, m2) if isinstance(m, GridDensity)), DEFAULT_GRID_STEP)
        else:
            grid = step
        return _convolve_grids(to_grid(m1, grid), to_grid(m2, grid))
    raise RepresentationMismatch(
        f"cannot convolve {type(m1).__name__} with {type(m2).__name__}"
    )


def convolution_power(m: SpectralMeasure, d: int, **kw) -> SpectralMeasure:
    if d < 1:
        raise InvalidParameter("convolution power must be >= 1")
    out = m
    for _ in range(d - 1):
        out = convolve(out, m, **kw)
    return out


def rescale_measure(m: SpectralMeasure, k) -> SpectralMeasure:
    """Law of k*X when X ~ m (spectral measure of k times the operator)."""
    if float(k) <= 0:
        raise InvalidParameter("rescaling factor must be positive")
    if isinstance(m, ClosedFormDensity):
        return m.with_scale_sq(m.scale_sq * square_as_fraction(k))
    if isinstance(m, MomentSequence):
        hint = None
        if m.support_hint:
            hint = (m.support_hint[0] * float(k), m.support_hint[1] * float(k))
        try:
            kq = as_fraction(k)
        except InvalidParameter:
            kq = None
        if kq is not None and abs(float(kq) - float(k)) <= 1e-15 * float(k):
            return MomentSequence(tuple(mu * kq**n for n, mu in enumerate(m.moments)), hint)
        if any(mu for mu in m.moments[1::2]):
            raise InvalidParameter("irrational rescaling of a non-symmetric moment sequence")
        k2 = square_as_fraction(k)
        return MomentSequence(
            tuple(mu * k2 ** (n // 2) if n % 2 == 0 else mu for n, mu in enumerate(m.moments)), hint
        )
    if isinstance(m, DiscreteMeasure):
        return DiscreteMeasure(m.nodes * float(k), m.weights)
    if isinstance(m, GridDensity):
        return GridDensity(m.lo * float(k), m.step * float(k), m.values / float(k))
    raise RepresentationMismatch(f"cannot rescale {type(m).__name__}")


def moments_of(m: SpectralMeasure, up_to: int, *, step: float = DEFAULT_GRID_STEP) -> list:
    """Moments 0..up_to.

    Exact Fractions for moment sequences; exact sums for discrete measures;
    for closed forms, composite 8-point Gauss-Legendre in the angle variable
    on panels of width ``step`` (radians); for grids, exact integrals of the
    piecewise-constant density.
    """
    if up_to < 0:
        raise InvalidParameter("up_to must be >= 0")
    if isinstance(m, MomentSequence):
        if up_to > m.order:
            raise InvalidParameter(f"only {m.order} moments are known")
        return list(m.moments[: up_to + 1])
    if isinstance(m, (DiscreteMeasure, GridDensity)):
        return m.moments(up_to)
    if isinstance(m, ClosedFormDensity):
        panels = max(16, math.ceil(math.pi / step))
        edges = np.linspace(0.0, math.pi, panels + 1)
        half = 0.5 * np.diff(edges)
        theta = (0.5 * (edges[1:] + edges[:-1]))[:, None] + half[:, None] * _GL_NODES[None, :]
        w = (half[:, None] * _GL_WEIGHTS[None, :] * m.theta_density(theta)).ravel()
        x = (m.radius * np.cos(theta)).ravel()
        return [float(np.dot(w, x**k)) for k in range(up_to + 1)]
    raise RepresentationMismatch(f"no moments for {type(m).__name__}")


# positivity -------------------------------------------------------------


@dataclass(frozen=True)
class AllPositive:
    min_value: float


@dataclass(frozen=True)
class FailsAt:
    x: float
    value: float = 0.0


def positivity_on_interior(m: SpectralMeasure, samples: int = 1001) -> AllPositive | FailsAt:
    """Sample the density on the interior, 1% of the support width away
    from each endpoint."""
    if not isinstance(m, (ClosedFormDensity, GridDensity)):
        raise RepresentationMismatch(f"{type(m).__name__} has no density to sample")
    if samples < 1:
        raise InvalidParameter("samples must be >= 1")
    lo, hi = m.support
    margin = 0.01 * (hi - lo)
    xs = np.linspace(lo + margin, hi - margin, samples)
    vals = m.density(xs)
    bad = np.flatnonzero(~(vals > 0))
    if len(bad):
        return FailsAt(float(xs[bad[0]]), float(vals[bad[0]]))
    return AllPositive(float(vals.min()))


# CSV --------------------------------------------------------------------


def grid_csv(g: GridDensity) -> str:
    lines = ["x,value"]
    lines += [f"{x!r},{v!r}" for x, v in zip(g.centers.tolist(), g.values.tolist())]
    return "\n".join(lines) + "\n"


def moments_csv(moments: Sequence) -> str:
    lines = ["order,numerator,denominator"]
    for k, mu in enumerate(moments):
        mu = Fraction(mu)
        lines.append(f"{k},{mu.numerator},{mu.denominator}")
    return "\n".join(lines) + "\n"
