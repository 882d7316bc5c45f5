"""Seeded Monte Carlo for compound Poisson values X(t).

Stream contract, so that runs are reproducible bit for bit:

* Generator: numpy ``PCG64``. Each time ``t`` in ``config.times`` gets its own
  child stream from ``SeedSequence(seed).spawn(len(times))``, in order.
* Each stream is consumed as uniform doubles on [0, 1), one sample at a time:
  first the Poisson count, then the jumps.
* Poisson(mu): sequential-search inversion (one uniform) for mu <= 30,
  otherwise Hormann's PTRS transformed rejection (two uniforms per trial).
* Discrete jumps: Walker alias table, one uniform per jump
  (``i = floor(u*m)``, accept column ``i`` when ``u*m - i < prob[i]``).
* Interval jumps: ``c + delta*u``.

Because samples within a time are drawn sequentially, a run with more
samples extends a run with fewer samples (same seed).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from didgaps.errors import ContainmentError, DomainError
from didgaps.levy_interval import IntervalSet, LatticeClosure, MERGE_TOL
from didgaps.semigroup import NumericalSemigroup
from didgaps.series import CompoundPoissonSpec, compound_poisson_pmf

INVERSION_MAX_MEAN = 30.0
_BLOCK = 4096


@dataclass(frozen=True)
class IntervalJumpLaw:
    """Jumps uniform on ``[c, c + delta]`` at rate ``rate``."""

    rate: float
    c: float
    delta: float

    def __post_init__(self):
        if not self.rate > 0 or not self.c > 0 or self.delta < 0:
            raise DomainError("need rate > 0, c > 0, delta >= 0")


@dataclass(frozen=True)
class SimulationConfig:
    law: CompoundPoissonSpec | IntervalJumpLaw
    times: tuple[float, ...] = (1.0,)
    samples_per_time: int = 10_000
    seed: int = 0

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        if not times or any(not t > 0 for t in times) or len(set(times)) != len(times):
            raise DomainError("times must be distinct and positive")
        if int(self.samples_per_time) != self.samples_per_time or self.samples_per_time < 1:
            raise DomainError("samples_per_time must be a positive integer")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "times", times)

    @property
    def rate(self) -> float:
        return self.law.rate


class UniformStream:
    """Sequential uniforms from one PCG64 stream, buffered in blocks."""

    def __init__(self, seed_seq: np.random.SeedSequence):
        self._gen = np.random.Generator(np.random.PCG64(seed_seq))
        self._buf = np.empty(0)
        self._pos = 0

    def __call__(self) -> float:
        if self._pos == self._buf.size:
            self._buf = self._gen.random(_BLOCK)
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return float(u)


def poisson_variate(mu: float, u: UniformStream) -> int:
    if mu <= 0:
        return 0
    if mu <= INVERSION_MAX_MEAN:
        x = u()
        k = 0
        p = math.exp(-mu)
        cdf = p
        while x > cdf:
            k += 1
            p *= mu / k
            cdf += p
            if p == 0.0:  # roundoff left cdf just short of 1
                break
        return k
    return _ptrs(mu, u)


def _ptrs(lam: float, u: UniformStream) -> int:
    slam = math.sqrt(lam)
    loglam = math.log(lam)
    b = 0.931 + 2.53 * slam
    a = -0.059 + 0.02483 * b
    invalpha = 1.1239 + 1.1328 / (b - 3.4)
    vr = 0.9277 - 3.6224 / (b - 2)
    while True:
        U = u() - 0.5
        V = u()
        us = 0.5 - abs(U)
        k = math.floor((2 * a / us + b) * U + lam + 0.43)
        if us >= 0.07 and V <= vr:
            return k
        if k < 0 or (us < 0.013 and V > us):
            continue
        if math.log(V) + math.log(invalpha) - math.log(a / (us * us) + b) <= -lam + k * loglam - math.lgamma(k + 1):
            return k


class AliasTable:
    """Walker's alias method over a finite PMF."""

    def __init__(self, values: Sequence, probs: Sequence[float]):
        m = len(values)
        self.values = list(values)
        scaled = [p * m for p in probs]
        self.prob = [1.0] * m
        self.alias = list(range(m))
        small = [i for i, s in enumerate(scaled) if s < 1.0]
        large = [i for i, s in enumerate(scaled) if s >= 1.0]
        while small and large:
            s, l = small.pop(), large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = l
            scaled[l] -= 1.0 - scaled[s]
            (small if scaled[l] < 1.0 else large).append(l)

    def draw(self, u: UniformStream):
        m = len(self.values)
        x = u() * m
        i = min(int(x), m - 1)
        return self.values[i] if x - i < self.prob[i] else self.values[self.alias[i]]


def _sample_time(config: SimulationConfig, t: float, stream: UniformStream) -> np.ndarray:
    law = config.law
    mu = law.rate * t
    out = []
    if isinstance(law, CompoundPoissonSpec):
        table = AliasTable(list(law.jump_pmf), list(law.jump_pmf.values()))
        for _ in range(config.samples_per_time):
            n = poisson_variate(mu, stream)
            out.append(sum(table.draw(stream) for _ in range(n)))
        return np.array(out, dtype=np.int64)
    for _ in range(config.samples_per_time):
        n = poisson_variate(mu, stream)
        out.append(math.fsum(law.c + law.delta * stream() for _ in range(n)))
    return np.array(out, dtype=float)


def sample(config: SimulationConfig) -> dict[float, np.ndarray]:
    """Realizations of X(t) for each configured time, deterministic given the seed.

    The time in the law itself (``CompoundPoissonSpec.time``) is ignored here;
    the config's times are used.
    """
    children = np.random.SeedSequence(config.seed).spawn(len(config.times))
    return {t: _sample_time(config, t, UniformStream(ss)) for t, ss in zip(config.times, children)}


@dataclass
class SupportCheckReport:
    containment: bool
    violations: list = field(default_factory=list)
    coverage: dict = field(default_factory=dict)
    observed: dict = field(default_factory=dict)
    gap_hits: int = 0
    t_invariant: bool = True
    horizon: float | None = None

    def to_dict(self) -> dict:
        return {
            "containment": self.containment,
            "coverage": {f"{t:.12g}": c for t, c in sorted(self.coverage.items())},
            "violations": list(self.violations),
            "gap_hits": self.gap_hits,
            "t_invariant": self.t_invariant,
            "horizon": self.horizon,
        }


def empirical_support_check(
    realizations: dict[float, Iterable],
    predicted: NumericalSemigroup | IntervalSet | LatticeClosure,
    horizon: float | None = None,
    strict: bool = True,
) -> SupportCheckReport:
    """Check sampled values against a predicted support.

    Containment: every value must lie in ``predicted`` (an integer semigroup
    with raw values, an interval closure, or a lattice closure). With
    ``strict`` any violation raises :class:`ContainmentError`. Coverage: for
    an integer semigroup, the fraction of members ``<= horizon`` that were
    observed, per time.
    """
    if not realizations or all(len(np.atleast_1d(v)) == 0 for v in realizations.values()):
        raise DomainError("no realizations to check")
    if isinstance(predicted, NumericalSemigroup):
        inside = predicted.contains_value
    elif isinstance(predicted, (IntervalSet, LatticeClosure)):
        def inside(x):
            return predicted.contains(float(x), MERGE_TOL)
    else:
        raise DomainError(f"cannot check against {type(predicted).__name__}")

    report = SupportCheckReport(containment=True, horizon=horizon)
    bad_by_t = {}
    for t, values in realizations.items():
        uniq = np.unique(np.asarray(values))
        bad = [v.item() for v in uniq if not inside(v)]
        bad_by_t[t] = bad
        report.violations.extend(bad)
        report.gap_hits += int(np.isin(np.asarray(values), bad).sum()) if bad else 0
        if isinstance(predicted, NumericalSemigroup) and horizon is not None:
            members = [predicted.span * x for x in predicted.members(int(horizon) // predicted.span)]
            seen = set(int(v) for v in uniq if v <= horizon)
            hit = [m for m in members if m in seen]
            report.observed[t] = hit
            report.coverage[t] = len(hit) / len(members)
    report.violations = sorted(set(report.violations))
    report.containment = not report.violations
    report.t_invariant = all(not b for b in bad_by_t.values())
    if strict and report.violations:
        raise ContainmentError(report.violations)
    return report


def miss_probability(spec: CompoundPoissonSpec, t: float, samples: int, horizon: int) -> float:
    """Upper bound on P(some semigroup member <= horizon is never observed).

    Union bound over members of ``(1 - p_j) ** samples`` with Panjer masses ``p_j``.
    """
    p = compound_poisson_pmf(CompoundPoissonSpec(spec.rate, spec.jump_pmf, t), int(horizon))
    positive = p[p > 0]
    return float(np.sum(np.exp(samples * np.log1p(-positive))))


def realizations_csv(realizations: dict[float, Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value"])
    for t, values in realizations.items():
        for v in values:
            w.writerow([f"{t:.12g}", f"{v:.12g}" if isinstance(v, float) else int(v)])
    return buf.getvalue()
