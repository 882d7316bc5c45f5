"""Supports of finite Levy measures made of closed intervals.

The support of a compound Poisson law with jump law ``M`` is ``{0}`` together
with the additive closure of ``supp(M)``. For a single generating interval
``[c, c + delta]`` the closure is ``U_k [c k, (c + delta) k]``. Once
``delta k >= c`` consecutive pieces overlap, so only finitely many gaps remain.
Point generators (``delta = 0``) never overlap and are routed to the integer
semigroup code through a common denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from didgaps.errors import DomainError
from didgaps.semigroup import NumericalSemigroup, semigroup

MERGE_TOL = 1e-12

Interval = tuple[float, float]


def _merge(intervals: Iterable[Interval], tol: float = MERGE_TOL) -> tuple[Interval, ...]:
    out: list[list[float]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1] + tol * max(1.0, abs(a)):
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted disjoint closed intervals, plus an optional tail ``[tail_start, inf)``."""

    intervals: tuple[Interval, ...] = ()
    tail_start: float | None = None

    @classmethod
    def from_intervals(cls, intervals: Iterable[Sequence[float]], tail_start: float | None = None) -> "IntervalSet":
        ivs = []
        for iv in intervals:
            a, b = float(iv[0]), float(iv[1])
            if not (math.isfinite(a) and math.isfinite(b)):
                raise DomainError(f"interval [{a}, {b}] has non-finite endpoints")
            if a < 0 or b < a:
                raise DomainError(f"[{a}, {b}] is not an interval in [0, inf)")
            ivs.append((a, b))
        merged = _merge(ivs)
        if tail_start is not None:
            kept = []
            for a, b in merged:
                if b >= tail_start - MERGE_TOL * max(1.0, tail_start):
                    tail_start = min(tail_start, a)
                else:
                    kept.append((a, b))
            merged = tuple(kept)
        return cls(merged, tail_start)

    def __contains__(self, x: float) -> bool:
        if self.tail_start is not None and x >= self.tail_start:
            return True
        return any(a <= x <= b for a, b in self.intervals)

    def contains(self, x: float, tol: float = MERGE_TOL) -> bool:
        """Membership with endpoint slack ``tol`` (relative above 1)."""
        eps = tol * max(1.0, abs(x))
        if self.tail_start is not None and x >= self.tail_start - eps:
            return True
        return any(a - eps <= x <= b + eps for a, b in self.intervals)

    def gaps(self) -> list[Interval]:
        """Open intervals between consecutive pieces (and before the tail)."""
        pieces = list(self.intervals)
        if self.tail_start is not None:
            pieces.append((self.tail_start, math.inf))
        return [(b, a2) for (_, b), (a2, _) in zip(pieces, pieces[1:])]


def minkowski_sum(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """``{x + y : x in a, y in b}``, merged."""
    sums = [(x0 + y0, x1 + y1) for x0, x1 in a.intervals for y0, y1 in b.intervals]
    tails = []
    if a.tail_start is not None and (b.intervals or b.tail_start is not None):
        tails.append(a.tail_start + _left(b))
    if b.tail_start is not None and (a.intervals or a.tail_start is not None):
        tails.append(b.tail_start + _left(a))
    return IntervalSet.from_intervals(sums, min(tails) if tails else None)


def _left(s: IntervalSet) -> float:
    if s.intervals:
        return s.intervals[0][0]
    return s.tail_start


@dataclass(frozen=True)
class LatticeClosure:
    """Closure of point generators: ``unit`` times a numerical semigroup."""

    unit: Fraction
    semigroup: NumericalSemigroup

    @property
    def span(self) -> float:
        return float(self.unit * self.semigroup.span)

    def __contains__(self, x: float) -> bool:
        k = Fraction(x).limit_denominator(10**9) / self.unit
        return k.denominator == 1 and self.semigroup.contains_value(int(k))

    def contains(self, x: float, tol: float = MERGE_TOL) -> bool:
        k = x / float(self.unit)
        r = round(k)
        return abs(k - r) <= tol * max(1.0, abs(k)) and self.semigroup.contains_value(r)


def _as_fraction(x, what: str) -> Fraction:
    f = Fraction(x).limit_denominator(10**6)
    if abs(float(f) - float(x)) > MERGE_TOL * max(1.0, abs(float(x))):
        raise DomainError(f"{what} {x!r} is not a rational with a small denominator")
    return f


def semigroup_closure(gen: IntervalSet, max_iter: int = 100_000) -> IntervalSet | LatticeClosure:
    """``{0}`` united with the additive closure of ``gen``.

    Sums of ``1..k`` generators are accumulated until some piece ``[a, b]``
    with ``a > 0`` reaches ``b >= 2a``: then ``[a, inf)`` is covered. The
    iteration continues until ``k * min(gen) > a`` so that everything below
    ``a`` is exact, and the result is reported with ``tail_start = a``.
    """
    if gen.tail_start is not None:
        raise DomainError("generator set must be bounded")
    ivs = [(a, b) for a, b in gen.intervals if b > 0]
    if not ivs:
        raise DomainError("generator set is empty (or only the point 0)")
    if any(a < 0 for a, _ in ivs):
        raise DomainError("generator intervals must lie in [0, inf)")
    points = [a for a, b in ivs if b - a <= MERGE_TOL * max(1.0, a)]
    if len(points) == len(ivs):
        fracs = [_as_fraction(p, "point generator") for p in points]
        den = math.lcm(*(f.denominator for f in fracs))
        return LatticeClosure(Fraction(1, den), semigroup(int(f * den) for f in fracs))
    if points:
        raise DomainError("mixing point generators with intervals is not supported")
    gen = IntervalSet.from_intervals(ivs)
    c_min = gen.intervals[0][0]
    if c_min <= 0:
        return IntervalSet((), 0.0)

    zero = IntervalSet(((0.0, 0.0),))
    acc = zero
    layer = zero
    tail = None
    for k in range(1, max_iter + 1):
        layer = minkowski_sum(layer, gen)
        acc = IntervalSet.from_intervals(acc.intervals + layer.intervals)
        if tail is None:
            for a, b in acc.intervals:
                if a > 0 and b >= 2 * a - MERGE_TOL * a:
                    tail = a
                    break
        if tail is not None:
            # recompute: the piece containing the tail may have grown leftwards
            tail = min(a for a, b in acc.intervals if b >= tail - MERGE_TOL * tail)
            if k * c_min > tail:
                return IntervalSet.from_intervals([iv for iv in acc.intervals if iv[1] < tail], tail)
        # pieces beyond the (eventual) tail grow without bound; prune what can no longer matter
        if tail is not None:
            layer = IntervalSet.from_intervals([iv for iv in layer.intervals if iv[0] <= tail + gen.intervals[-1][1]])
    raise RuntimeError("closure did not stabilise; increase max_iter")


@dataclass(frozen=True)
class IntervalGapReport:
    """Gaps of ``U_k [c k, (c + delta) k]``.

    ``gaps`` holds ``(lo, hi, length)`` for the nonempty gaps between the
    ``k``-th and ``k+1``-th pieces. The leading gap ``(0, c)`` sits apart in
    ``initial_gap`` and is not counted. For ``delta = 0`` the gaps never
    close; ``count`` and ``tail_start`` are then ``None`` and ``lattice_step``
    gives the spacing of the support.
    """

    c: float
    delta: float
    initial_gap: Interval
    gaps: tuple[tuple[float, float, float], ...]
    count: int | None
    tail_start: float | None
    lattice_step: float | None = None

    def to_dict(self) -> dict:
        return {
            "initial_gap": list(self.initial_gap),
            "gaps": [list(g) for g in self.gaps],
            "count": self.count,
            "tail_start": self.tail_start,
        }

    def union(self) -> list[Interval]:
        return [self.initial_gap] + [(lo, hi) for lo, hi, _ in self.gaps]


def interval_gaps(c: float, delta: float) -> IntervalGapReport:
    """Closed-form gaps ``((c + delta) k, c (k + 1))`` for every ``k`` with ``delta k < c``."""
    c, delta = float(c), float(delta)
    if not c > 0:
        raise DomainError(f"c must be positive, got {c!r}")
    if delta < 0:
        raise DomainError(f"delta must be nonnegative, got {delta!r}")
    if delta == 0:
        return IntervalGapReport(c, delta, (0.0, c), (), None, None, lattice_step=c)
    gaps = []
    k = 1
    while delta * k < c - MERGE_TOL * c:
        lo, hi = (c + delta) * k, c * (k + 1)
        gaps.append((lo, hi, c - delta * k))
        k += 1
    return IntervalGapReport(c, delta, (0.0, c), tuple(gaps), len(gaps), c * k)


def rational_discretize(c, delta, D: int) -> tuple[int, ...]:
    """Integer generators ``cD, cD + 1, ..., (c + delta) D`` on the ``1/D`` lattice.

    ``c`` and ``delta`` may be floats, strings or :class:`~fractions.Fraction`;
    both must be multiples of ``1/D``.
    """
    if int(D) != D or D < 1:
        raise DomainError(f"denominator must be a positive integer, got {D!r}")
    D = int(D)
    c_f = Fraction(c) if not isinstance(c, float) else Fraction(str(c))
    d_f = Fraction(delta) if not isinstance(delta, float) else Fraction(str(delta))
    if c_f <= 0 or d_f < 0:
        raise DomainError("need c > 0 and delta >= 0")
    lo, width = c_f * D, d_f * D
    if lo.denominator != 1 or width.denominator != 1:
        raise DomainError(f"c={c} and delta={delta} are not multiples of 1/{D}")
    return tuple(range(int(lo), int(lo + width) + 1))


def discrete_gap_cells(c, delta, D: int) -> list[Interval]:
    """Gaps of the discretized semigroup as cells ``[g/D, (g+1)/D)``, runs merged."""
    sg = semigroup(rational_discretize(c, delta, D))
    cells = [(g / D, (g + 1) / D) for g in sg.gaps]
    return list(_merge(cells, tol=0.0))


def measure(intervals: Iterable[Interval]) -> float:
    return math.fsum(b - a for a, b in _merge(intervals, tol=0.0))


def intersection_measure(a: Iterable[Interval], b: Iterable[Interval]) -> float:
    a, b = _merge(a, tol=0.0), _merge(b, tol=0.0)
    total = []
    for x0, x1 in a:
        for y0, y1 in b:
            lo, hi = max(x0, y0), min(x1, y1)
            if hi > lo:
                total.append(hi - lo)
    return math.fsum(total)


def symmetric_difference_measure(a: Iterable[Interval], b: Iterable[Interval]) -> float:
    a, b = list(a), list(b)
    return measure(a) + measure(b) - 2 * intersection_measure(a, b)


def cells_within(cells: Iterable[Interval], region: Iterable[Interval], tol: float = MERGE_TOL) -> bool:
    """Every cell lies inside one interval of ``region`` (closure-level containment)."""
    region = list(region)
    return all(any(lo - tol <= a and b <= hi + tol for lo, hi in region) for a, b in cells)
