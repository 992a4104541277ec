"""Half-infinite Jacobi matrices with zero diagonal.

Off-diagonal entries are stored through their squares, as exact rationals,
together with a rational squared scale. Square roots are only taken when a
finite section is materialized as floats.

Finite sections are solved by Sturm-count bisection (all eigenvalues in one
vectorized sweep) and the first eigenvector components come from a twisted
factorization of ``T - lambda I``, evaluated in log space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidParameter, ToleranceFailure
from .measures import DiscreteMeasure
from .rational import as_fraction, square_as_fraction
from .sequences import BranchingSeq, canonical, entry, tail

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass(frozen=True, eq=False)
class JacobiSpec:
    """Off-diagonal squares ``prefix_sq`` then ``period_sq`` repeated, times
    ``scale_sq``. Equality compares the effective squared entries, so
    ``sqrt(2) * J`` equals the matrix with all entries ``sqrt(2)``."""

    prefix_sq: tuple[Fraction, ...]
    period_sq: tuple[Fraction, ...]
    scale_sq: Fraction = Fraction(1)

    def __post_init__(self):
        pre = tuple(as_fraction(q) for q in self.prefix_sq)
        per = tuple(as_fraction(q) for q in self.period_sq)
        scale_sq = as_fraction(self.scale_sq)
        if not per:
            raise InvalidParameter("period must be non-empty")
        if any(q <= 0 for q in pre + per):
            raise InvalidParameter("off-diagonal entries must be positive")
        if scale_sq <= 0:
            raise InvalidParameter("scale must be positive")
        pre, per = canonical(pre, per)
        object.__setattr__(self, "prefix_sq", pre)
        object.__setattr__(self, "period_sq", per)
        object.__setattr__(self, "scale_sq", scale_sq)

    @property
    def scale(self) -> float:
        return math.sqrt(float(self.scale_sq))

    @property
    def effective(self) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
        k = self.scale_sq
        return canonical([k * q for q in self.prefix_sq], [k * q for q in self.period_sq])

    def __eq__(self, other):
        if not isinstance(other, JacobiSpec):
            return NotImplemented
        return self.effective == other.effective

    def __hash__(self):
        return hash(self.effective)

    def entry_sq(self, i: int) -> Fraction:
        """Square of the effective i-th off-diagonal entry (0-based)."""
        return self.scale_sq * entry(self.prefix_sq, self.period_sq, i)

    def entries_sq(self, count: int) -> list[Fraction]:
        return [self.entry_sq(i) for i in range(count)]

    def shift(self, n: int) -> JacobiSpec:
        return JacobiSpec(*tail(self.prefix_sq, self.period_sq, n), self.scale_sq)

    @property
    def norm_bound(self) -> float:
        """2 * scale * sup a_n, an upper bound for the operator norm."""
        return 2.0 * math.sqrt(float(self.scale_sq * max(self.prefix_sq + self.period_sq)))

    def describe(self) -> str:
        pre, per = self.effective

        def fmt(q):
            return f"sqrt({q})"

        head = ",".join(fmt(q) for q in pre)
        body = "(" + ",".join(fmt(q) for q in per) + ")^inf"
        return f"{head},{body}" if head else body

    def to_json(self) -> dict:
        pre, per = self.effective
        return {"prefix_sq": [str(q) for q in pre], "period_sq": [str(q) for q in per]}

    def __repr__(self):
        return f"JacobiSpec({self.describe()})"


def free_jacobi() -> JacobiSpec:
    return JacobiSpec((), (1,))


def jacobi_a(a=None, *, a_squared=None) -> JacobiSpec:
    """J_a: first off-diagonal entry ``a``, all others 1."""
    if (a is None) == (a_squared is None):
        raise InvalidParameter("give exactly one of a, a_squared")
    if a is not None:
        if float(a) <= 0:
            raise InvalidParameter("a must be positive")
        a_squared = square_as_fraction(a)
    return JacobiSpec((as_fraction(a_squared),), (1,))


def jacobi_from_branching(seq: BranchingSeq, n: int = 0) -> JacobiSpec:
    """Squared off-diagonals d_n, d_{n+1}, ... of the branching sequence."""
    if n < 0:
        raise InvalidParameter("offset must be >= 0")
    return JacobiSpec(*tail(seq.prefix, seq.period, n))


def scaled(j: JacobiSpec, k) -> JacobiSpec:
    """k * J for k > 0 with k**2 rational."""
    if float(k) <= 0:
        raise InvalidParameter("scale must be positive")
    return JacobiSpec(j.prefix_sq, j.period_sq, j.scale_sq * square_as_fraction(k))


# finite sections --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TridiagonalMatrix:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=float)
        off = np.asarray(self.offdiag, dtype=float)
        if diag.ndim != 1 or len(diag) < 1 or off.shape != (len(diag) - 1,):
            raise InvalidParameter("need n diagonal and n-1 off-diagonal entries")
        if np.any(diag != 0):
            raise InvalidParameter("only zero-diagonal Jacobi matrices are supported")
        if np.any(off <= 0):
            raise InvalidParameter("off-diagonal entries must be positive (unreduced)")
        diag.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @classmethod
    def from_offdiag(cls, offdiag: Sequence[float]) -> TridiagonalMatrix:
        off = np.asarray(offdiag, dtype=float)
        return cls(np.zeros(len(off) + 1), off)

    @property
    def size(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def truncate(j: JacobiSpec, n: int) -> TridiagonalMatrix:
    """Leading n x n section."""
    if n < 1:
        raise InvalidParameter("section size must be >= 1")
    cache: dict[Fraction, float] = {}
    off = np.empty(n - 1)
    for i in range(n - 1):
        q = j.entry_sq(i)
        if q not in cache:
            cache[q] = math.sqrt(float(q))
        off[i] = cache[q]
    return TridiagonalMatrix.from_offdiag(off)


@dataclass(frozen=True, eq=False)
class EigenSystem:
    eigenvalues: np.ndarray
    first_components: np.ndarray

    def to_csv(self) -> str:
        lines = ["index,eigenvalue,weight"]
        for i, (x, w) in enumerate(zip(self.eigenvalues.tolist(), self.first_components.tolist())):
            lines.append(f"{i},{x!r},{w!r}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "weights": self.first_components.tolist(),
        }


def _pivmin(b2: np.ndarray) -> float:
    return _TINY * max(1.0, float(b2.max()) if len(b2) else 1.0)


def _count_below_scalar(b2: np.ndarray, x: float, pivmin: float) -> int:
    pivmin = float(pivmin)
    q = -x
    if abs(q) < pivmin:
        q = -pivmin
    count = int(q < 0)
    for bb in b2.tolist():
        q = -x - bb / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def _count_below(b2: np.ndarray, x: np.ndarray, pivmin: float) -> np.ndarray:
    """Number of eigenvalues strictly below each x (Sturm sign changes)."""
    if len(x) <= 4:
        # plain floats beat numpy dispatch for a handful of shifts
        return np.array([_count_below_scalar(b2, float(s), pivmin) for s in x], dtype=np.int64)
    q = -x.copy()
    q[np.abs(q) < pivmin] = -pivmin
    count = (q < 0).astype(np.int64)
    for bb in b2:
        q = -x - bb / q
        q[np.abs(q) < pivmin] = -pivmin
        count += q < 0
    return count


def eigenvalues(t: TridiagonalMatrix, select: Iterable[int] | None = None) -> np.ndarray:
    """Eigenvalues (ascending) by bisection to full double precision.

    ``select`` restricts the computation to the given ascending indices.
    """
    n = t.size
    idx = np.arange(n) if select is None else np.asarray(list(select), dtype=np.int64)
    if np.any((idx < 0) | (idx >= n)):
        raise InvalidParameter("eigenvalue index out of range")
    if n == 1:
        return np.zeros(len(idx))
    b = t.offdiag
    b2 = b * b
    pivmin = _pivmin(b2)
    radius = float(np.max(np.concatenate(([0.0], b)) + np.concatenate((b, [0.0]))))
    pad = 2 * _EPS * radius * n + 2 * pivmin
    lo = np.full(len(idx), -radius - pad)
    hi = np.full(len(idx), radius + pad)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        width = np.maximum(np.abs(lo), np.abs(hi))
        active = (mid > lo) & (mid < hi) & (hi - lo > 2 * _EPS * width + _EPS * radius)
        if not active.any():
            break
        c = _count_below(b2, mid[active], pivmin)
        k = idx[active]
        upper = c > k
        lo_a, hi_a, mid_a = lo[active], hi[active], mid[active]
        hi_a[upper] = mid_a[upper]
        lo_a[~upper] = mid_a[~upper]
        lo[active], hi[active] = lo_a, hi_a
    else:
        raise ToleranceFailure("bisection did not converge")
    return 0.5 * (lo + hi)


def top_eigenvalue(t: TridiagonalMatrix) -> float:
    return float(eigenvalues(t, [t.size - 1])[0])


def _first_weights(b: np.ndarray, lam: np.ndarray, chunk: int = 256) -> np.ndarray:
    """|<v, e_0>|^2 for unit eigenvectors v, via twisted factorizations."""
    n = len(b) + 1
    if n == 1:
        return np.ones(len(lam))
    b2 = b * b
    logb = np.log(b)
    pivmin = _pivmin(b2)
    out = np.empty(len(lam))
    for start in range(0, len(lam), chunk):
        x = lam[start:start + chunk]
        m = len(x)
        D = np.empty((m, n))
        P = np.empty((m, n))
        D[:, 0] = -x
        for i in range(1, n):
            prev = D[:, i - 1]
            prev[np.abs(prev) < pivmin] = -pivmin
            D[:, i] = -x - b2[i - 1] / prev
        P[:, n - 1] = -x
        for i in range(n - 2, -1, -1):
            nxt = P[:, i + 1]
            nxt[np.abs(nxt) < pivmin] = -pivmin
            P[:, i] = -x - b2[i] / nxt
        gamma = D + P + x[:, None]
        k = np.argmin(np.abs(gamma), axis=1)
        absD = np.maximum(np.abs(D[:, :-1]), pivmin)
        absP = np.maximum(np.abs(P[:, 1:]), pivmin)
        C = np.zeros((m, n))
        C[:, 1:] = np.cumsum(logb[None, :] - np.log(absD), axis=1)
        E = np.zeros((m, n))
        E[:, 1:] = np.cumsum(logb[None, :] - np.log(absP), axis=1)
        rows = np.arange(m)
        Ck = C[rows, k][:, None]
        Ek = E[rows, k][:, None]
        cols = np.arange(n)[None, :]
        logz = np.where(cols <= k[:, None], Ck - C, E - Ek)
        out[start:start + m] = np.exp(2 * logz[:, 0] - logsumexp(2 * logz, axis=1))
    return out


def eigen(t: TridiagonalMatrix) -> EigenSystem:
    lam = eigenvalues(t)
    if t.size > 1 and np.any(np.diff(lam) <= 0):
        raise ToleranceFailure("bisection failed to separate eigenvalues")
    w = _first_weights(t.offdiag, lam)
    # the weights sum to 1 exactly in exact arithmetic
    w = w / w.sum()
    return EigenSystem(lam, w)


def quadrature_measure(j: JacobiSpec, n: int) -> DiscreteMeasure:
    """Gauss quadrature for the vertex measure at e_0, from the n x n section."""
    es = eigen(truncate(j, n))
    return DiscreteMeasure(es.eigenvalues, es.first_components)


def jacobi_moments(j: JacobiSpec, up_to: int) -> list[Fraction]:
    """Exact <J^k e_0, e_0> for k = 0..up_to.

    Walks on the half-line from 0 back to 0; each down-step across edge i
    carries the weight a_i**2 and each up-step weight 1.
    """
    if up_to < 0:
        raise InvalidParameter("up_to must be >= 0")
    depth = up_to // 2 + 1
    w = j.entries_sq(depth)
    v = [Fraction(0)] * (depth + 1)
    v[0] = Fraction(1)
    out = [Fraction(1)]
    for k in range(1, up_to + 1):
        new = [Fraction(0)] * (depth + 1)
        for i in range(depth + 1):
            s = Fraction(0)
            if i > 0:
                s += v[i - 1]
            if i < depth:
                s += w[i] * v[i + 1]
            new[i] = s
        v = new
        out.append(v[0])
    return out


def point_spectrum_ja(a=None, *, a_squared=None) -> list[float]:
    """Eigenvalues of J_a: none for a <= sqrt(2), else +-a^2/sqrt(a^2-1)."""
    if (a is None) == (a_squared is None):
        raise InvalidParameter("give exactly one of a, a_squared")
    if a is not None:
        if float(a) <= 0:
            raise InvalidParameter("a must be positive")
        a_squared = square_as_fraction(a)
    q = as_fraction(a_squared)
    if q <= 2:
        return []
    v = float(q) / math.sqrt(float(q - 1))
    return [-v, v]
