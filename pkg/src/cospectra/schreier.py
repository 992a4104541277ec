"""The Fabrykowski-Gupta generators acting on words over {0, 1, 2} and the
Schreier graphs of that action on the levels of the ternary rooted tree.

``a`` rotates the first letter; ``b = (a, 1, b)``: after a leading 0 it
applies ``a`` to the rest, after a 1 it stops, after a 2 it recurses.
"""

from __future__ import annotations

import enum
from typing import Any

import numpy as np

from .errors import InvalidParameter, InvalidWord, SizeLimitExceeded
from .graph_core import FiniteGraph

ALPHABET = "012"
WORD_BUDGET = 10**5
DENSE_LEVEL_LIMIT = 7


class Generator(enum.Enum):
    A = "a"
    A_INV = "a^-1"
    B = "b"
    B_INV = "b^-1"

    @property
    def inverse(self) -> Generator:
        return _INVERSE[self]

    @property
    def shift(self) -> int:
        return 1 if self in (Generator.A, Generator.B) else 2


_INVERSE = {
    Generator.A: Generator.A_INV,
    Generator.A_INV: Generator.A,
    Generator.B: Generator.B_INV,
    Generator.B_INV: Generator.B,
}

GENERATORS = tuple(Generator)


def parse_generator(text: str) -> Generator:
    aliases = {"a": Generator.A, "A": Generator.A_INV, "a^-1": Generator.A_INV, "a-": Generator.A_INV,
               "b": Generator.B, "B": Generator.B_INV, "b^-1": Generator.B_INV, "b-": Generator.B_INV}
    try:
        return aliases[text]
    except KeyError:
        raise InvalidParameter(f"unknown generator {text!r}") from None


def _check_word(w: str) -> None:
    if not isinstance(w, str) or any(c not in ALPHABET for c in w):
        raise InvalidWord(f"{w!r} is not a word over {{0,1,2}}")


def _rotate(c: str, k: int) -> str:
    return str((int(c) + k) % 3)


def act(g: Generator, w: str) -> str:
    _check_word(w)
    if not w:
        return w
    k = g.shift
    if g in (Generator.A, Generator.A_INV):
        return _rotate(w[0], k) + w[1:]
    i = 0
    while i < len(w):
        c = w[i]
        if c == "0":
            if i + 1 < len(w):
                return w[:i + 1] + _rotate(w[i + 1], k) + w[i + 2:]
            return w
        if c == "1":
            return w
        i += 1
    return w


def words(n: int) -> list[str]:
    """All words of length n in lexicographic order (index = base-3 value)."""
    if n == 0:
        return [""]
    return [np.base_repr(i, 3).rjust(n, "0") for i in range(3**n)]


def _index(w: str) -> int:
    return int(w, 3) if w else 0


def schreier_level(n: int, *, budget: int = WORD_BUDGET) -> FiniteGraph:
    """Level-n Schreier graph: the adjacency matrix is the sum of the four
    permutation matrices, so a fixed point adds 1 to the diagonal per
    generator and every row sums to 4."""
    if n < 1:
        raise InvalidParameter("level must be >= 1")
    if 3**n > budget:
        raise SizeLimitExceeded(f"3^{n} words exceed the budget {budget}")
    ws = words(n)
    acc: dict[tuple[int, int], int] = {}
    for u, w in enumerate(ws):
        for g in GENERATORS:
            key = (u, _index(act(g, w)))
            acc[key] = acc.get(key, 0) + 1
    return FiniteGraph._from_dict(len(ws), acc, labels=ws, schreier=True)


def level_spectrum(n: int) -> np.ndarray:
    if n > DENSE_LEVEL_LIMIT:
        raise SizeLimitExceeded(f"dense spectra are limited to levels <= {DENSE_LEVEL_LIMIT}")
    g = schreier_level(n)
    return np.linalg.eigvalsh(g.to_dense().astype(float))


def spectrum_report(n: int, bins: int = 40) -> dict[str, Any]:
    """Observational summary of a level spectrum; no claim about the limit
    is derived from it."""
    ev = level_spectrum(n)
    # round-off can push the eigenvalue 4 just past the histogram range
    counts, edges = np.histogram(np.clip(ev, -4.0, 4.0), bins=bins, range=(-4.0, 4.0))
    distinct = np.unique(np.round(ev, 9))
    return {
        "level": n,
        "vertices": len(ev),
        "top": float(ev[-1]),
        "bottom": float(ev[0]),
        "distinct_eigenvalues": len(distinct),
        "histogram": {"edges": edges.tolist(), "counts": counts.tolist()},
        "note": "limit spectral structure is a catalog statement, not inferred from finite levels",
    }


def spectrum_csv(ev: np.ndarray) -> str:
    return "index,eigenvalue\n" + "".join(f"{i},{x!r}\n" for i, x in enumerate(ev.tolist()))
