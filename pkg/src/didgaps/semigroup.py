"""Additive semigroups generated by finite sets of positive integers.

The support of a compound Poisson law on the integers is the semigroup
generated by its jump sizes, so everything about its gaps reduces to the
computations here. Gaps, conductor and Frobenius number are always reported
in *reduced* units, i.e. after dividing the generators by their gcd (the
span); the span is carried alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable

from didgaps.errors import DomainError


def _as_generators(gens: Iterable[int]) -> tuple[int, ...]:
    out = set()
    for g in gens:
        if isinstance(g, bool) or int(g) != g:
            raise DomainError(f"generator {g!r} is not an integer")
        g = int(g)
        if g < 1:
            raise DomainError(f"generator {g} must be a positive integer")
        out.add(g)
    if not out:
        raise DomainError("generator set is empty")
    return tuple(sorted(out))


def normalize(gens: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    """Split a generator set into its span and the reduced (gcd 1) generators."""
    gens = _as_generators(gens)
    span = reduce(math.gcd, gens)
    return span, tuple(g // span for g in gens)


@dataclass(frozen=True)
class NumericalSemigroup:
    generators: tuple[int, ...]
    span: int
    reduced_generators: tuple[int, ...]
    gaps: tuple[int, ...]
    conductor: int

    @property
    def frobenius(self) -> int | None:
        return self.gaps[-1] if self.gaps else None

    @property
    def gap_free(self) -> bool:
        return not self.gaps

    def __contains__(self, x: int) -> bool:
        """Membership in reduced units."""
        if x < 0 or x != int(x):
            return False
        return x >= self.conductor or x not in self._gap_set

    @cached_property
    def _gap_set(self) -> frozenset[int]:
        return frozenset(self.gaps)

    def contains_value(self, value: int) -> bool:
        """Membership of a raw (unreduced) value, e.g. a realized X(t)."""
        if value != int(value) or value < 0:
            return False
        value = int(value)
        return value % self.span == 0 and (value // self.span) in self

    def members(self, upto: int) -> list[int]:
        """Members in reduced units on [0, upto]."""
        return [x for x in range(upto + 1) if x in self]


def _membership_table(gens: tuple[int, ...], bound: int) -> bytearray:
    member = bytearray(bound + 1)
    member[0] = 1
    for x in range(1, bound + 1):
        for g in gens:
            if g > x:
                break
            if member[x - g]:
                member[x] = 1
                break
    return member


def sieve(reduced: Iterable[int], generators: Iterable[int] | None = None) -> NumericalSemigroup:
    """Compute gaps and conductor of the semigroup generated by ``reduced``.

    ``reduced`` must have gcd 1 (call :func:`normalize` first, or use
    :func:`semigroup`). The membership table is grown by doubling until it
    contains ``min(reduced)`` consecutive members; from there on adding the
    smallest generator covers every larger integer.
    """
    reduced = _as_generators(reduced)
    if reduce(math.gcd, reduced) != 1:
        raise DomainError(f"generators {reduced} have gcd > 1; normalize first")
    if generators is None:
        generators, span = reduced, 1
    else:
        span, check = normalize(generators)
        generators = _as_generators(generators)
        if check != reduced:
            raise DomainError("reduced generators do not match the given generators")

    smallest = reduced[0]
    if smallest == 1:
        return NumericalSemigroup(generators, span, reduced, (), 0)

    bound = max(reduced[0] * reduced[1], 4 * reduced[-1])
    while True:
        member = _membership_table(reduced, bound)
        run = 0
        for x in range(bound + 1):
            run = run + 1 if member[x] else 0
            if run == smallest:
                conductor = x - smallest + 1
                gaps = tuple(y for y in range(conductor) if not member[y])
                return NumericalSemigroup(generators, span, reduced, gaps, conductor)
        bound *= 2


def semigroup(gens: Iterable[int]) -> NumericalSemigroup:
    """Normalize then sieve."""
    gens = _as_generators(gens)
    _, reduced = normalize(gens)
    return sieve(reduced, gens)


def gap_runs(sg: NumericalSemigroup) -> list[tuple[int, int]]:
    """Maximal runs of consecutive gaps as ``(start, length)``, in increasing order."""
    runs: list[tuple[int, int]] = []
    for g in sg.gaps:
        if runs and runs[-1][0] + runs[-1][1] == g:
            start, length = runs[-1]
            runs[-1] = (start, length + 1)
        else:
            runs.append((g, 1))
    return runs


def is_gap_free(gens: Iterable[int]) -> bool:
    """Gap-free on the span lattice iff 1 is a reduced generator.

    The generator criterion and the sieve are both evaluated; a disagreement
    would be a bug, so it raises.
    """
    _, reduced = normalize(gens)
    by_generator = 1 in reduced
    by_sieve = sieve(reduced).gap_free
    if by_generator != by_sieve:
        raise AssertionError(f"gap-free criteria disagree for {reduced}")
    return by_generator


def jump_count_values(gens: Iterable[int], n: int) -> list[int]:
    """All values reachable with exactly ``n`` jumps (n-fold sumset of ``gens``)."""
    gens = _as_generators(gens)
    if n < 0:
        raise DomainError("number of jumps must be nonnegative")
    values = {0}
    for _ in range(n):
        values = {v + g for v in values for g in gens}
    return sorted(values)


@dataclass(frozen=True)
class GapReport:
    span: int
    generators: tuple[int, ...]
    reduced_generators: tuple[int, ...]
    support_prefix: tuple[int, ...]
    gaps: tuple[int, ...]
    gap_runs: tuple[tuple[int, int], ...]
    frobenius: int | None
    conductor: int
    gap_free: bool

    def to_dict(self) -> dict:
        return {
            "span": self.span,
            "generators": list(self.generators),
            "reduced_generators": list(self.reduced_generators),
            "support_prefix": list(self.support_prefix),
            "gaps": list(self.gaps),
            "gap_runs": [list(r) for r in self.gap_runs],
            "frobenius": self.frobenius,
            "conductor": self.conductor,
            "gap_free": self.gap_free,
        }


def gap_report(sg: NumericalSemigroup, slack: int | None = None) -> GapReport:
    """Summarize ``sg`` on the window ``[0, conductor + slack]`` (reduced units).

    ``slack`` defaults to the largest reduced generator.
    """
    if slack is None:
        slack = sg.reduced_generators[-1]
    if slack < 0:
        raise DomainError("slack must be nonnegative")
    return GapReport(
        span=sg.span,
        generators=sg.generators,
        reduced_generators=sg.reduced_generators,
        support_prefix=tuple(sg.members(sg.conductor + slack)),
        gaps=sg.gaps,
        gap_runs=tuple(gap_runs(sg)),
        frobenius=sg.frobenius,
        conductor=sg.conductor,
        gap_free=sg.gap_free,
    )
