"""Independent reference computations used by the tests.

Each oracle avoids the code path it checks: walks are enumerated
recursively, spectra come from dense LAPACK solves, Schreier actions from
a direct string recursion.
"""

from __future__ import annotations

from math import comb
from fractions import Fraction

import numpy as np


def count_closed_walks(neighbors, start, n: int) -> int:
    """Enumerate walks one step at a time (exponential; small n only)."""

    def go(v, left):
        if left == 0:
            return 1 if v == start else 0
        return sum(go(w, left - 1) for w in neighbors(v))

    return go(start, n)


def catalan(m: int) -> int:
    return comb(2 * m, m) // (m + 1)


def arcsine_moments(up_to: int) -> list[Fraction]:
    return [Fraction(comb(k, k // 2)) if k % 2 == 0 else Fraction(0) for k in range(up_to + 1)]


def lattice_walks(d: int, n: int) -> int:
    """Closed walks on Z^d by splitting the steps among the d axes."""
    if n % 2:
        return 0

    def rec(dims, steps):
        if dims == 1:
            return comb(steps, steps // 2) if steps % 2 == 0 else 0
        return sum(comb(steps, k) * (comb(k, k // 2) if k % 2 == 0 else 0) * rec(dims - 1, steps - k)
                   for k in range(steps + 1))

    return rec(d, n)


def dense_tridiagonal(offdiag) -> np.ndarray:
    off = np.asarray(offdiag, dtype=float)
    return np.diag(off, 1) + np.diag(off, -1)


def dense_eigensystem(offdiag):
    w, v = np.linalg.eigh(dense_tridiagonal(offdiag))
    return w, v[0] ** 2


def top_eigenvalue(a) -> float:
    return float(np.linalg.eigvalsh(np.asarray(a, dtype=float))[-1])


def fg_act(gen: str, w: str) -> str:
    """Fabrykowski-Gupta generators by literal wreath recursion."""
    if not w:
        return w
    head, rest = w[0], w[1:]
    step = {"a": 1, "A": 2, "b": 1, "B": 2}[gen]
    if gen in "aA":
        return str((int(head) + step) % 3) + rest
    if head == "0":
        return head + fg_act("a" if gen == "b" else "A", rest)
    if head == "1":
        return w
    return head + fg_act(gen, rest)
