"""Eventually periodic sequences in canonical form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from .errors import InvalidParameter, NonPeriodic


def primitive_period(period: Sequence[Any]) -> tuple:
    """Shortest block whose repetition gives ``period``."""
    period = tuple(period)
    p = len(period)
    for q in range(1, p + 1):
        if p % q == 0 and period[:q] * (p // q) == period:
            return period[:q]
    return period


def canonical(prefix: Sequence[Any], period: Sequence[Any]) -> tuple[tuple, tuple]:
    """Minimal (prefix, period) pair describing the same infinite sequence.

    The period is reduced to its primitive block, then trailing prefix
    entries that continue the period backwards are absorbed into it.
    """
    if not period:
        raise InvalidParameter("period must be non-empty")
    prefix = list(prefix)
    period = list(primitive_period(period))
    while prefix and prefix[-1] == period[-1]:
        prefix.pop()
        period = [period[-1]] + period[:-1]
    return tuple(prefix), tuple(period)


def entry(prefix: tuple, period: tuple, r: int):
    if r < 0:
        raise IndexError(r)
    if r < len(prefix):
        return prefix[r]
    return period[(r - len(prefix)) % len(period)]


def tail(prefix: tuple, period: tuple, n: int) -> tuple[tuple, tuple]:
    """(prefix, period) of the shifted sequence r -> s[r + n]."""
    if n < len(prefix):
        return prefix[n:], period
    k = (n - len(prefix)) % len(period)
    return (), period[k:] + period[:k]


@dataclass(frozen=True)
class BranchingSeq:
    """Branching degrees d_0, d_1, ... of a spherically symmetric rooted tree.

    Stored canonically, so two instances compare equal exactly when they
    describe the same sequence.
    """

    prefix: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        prefix = tuple(int(d) for d in self.prefix)
        period = tuple(int(d) for d in self.period)
        if not period:
            raise InvalidParameter("branching period must be non-empty")
        if any(d < 2 for d in prefix + period):
            raise InvalidParameter(f"branching degrees must be >= 2, got {prefix}|{period}")
        prefix, period = canonical(prefix, period)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    @classmethod
    def constant(cls, d: int) -> BranchingSeq:
        return cls((), (d,))

    @classmethod
    def periodic(cls, *period: int) -> BranchingSeq:
        return cls((), tuple(period))

    def __getitem__(self, r: int) -> int:
        return entry(self.prefix, self.period, r)

    def head(self, n: int) -> list[int]:
        return [self[r] for r in range(n)]

    def shift(self, n: int) -> BranchingSeq:
        return BranchingSeq(*tail(self.prefix, self.period, n))

    @property
    def is_periodic(self) -> bool:
        return not self.prefix

    @property
    def max_degree(self) -> int:
        return max(self.prefix + self.period)

    def rotations(self) -> list[BranchingSeq]:
        """The cyclic shifts (d_s, d_{s+1}, ...) for s = 0..p-1."""
        if self.prefix:
            raise NonPeriodic(f"sequence has non-empty prefix {self.prefix}")
        return [self.shift(s) for s in range(len(self.period))]

    def to_text(self) -> str:
        body = ",".join(map(str, self.period))
        if self.prefix:
            return ",".join(map(str, self.prefix)) + "/" + body
        return body

    @classmethod
    def parse(cls, text: str) -> BranchingSeq:
        """Parse ``"2,3"`` (periodic) or ``"3/2"`` (prefix 3, then period 2)."""
        text = text.strip()
        try:
            if "/" in text:
                head, body = text.split("/", 1)
                prefix = tuple(int(t) for t in head.split(",") if t.strip())
            else:
                prefix, body = (), text
            period = tuple(int(t) for t in body.split(",") if t.strip())
        except ValueError as exc:
            raise InvalidParameter(f"cannot parse branching sequence {text!r}") from exc
        return cls(prefix, period)

    def __str__(self) -> str:
        return self.to_text()
