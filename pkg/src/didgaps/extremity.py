"""Left extremities of nonnegative infinitely divisible laws from their Laplace transforms.

The transform is ``phi(theta) = exp(-drift*theta - rate*(1 - psi(theta))) * (beta/(beta+theta))**shape``.
``psi`` is the transform of a finite jump law (atoms or a uniform interval),
and the optional gamma factor stands in for an infinite Levy measure. The
left extremity is ``lim g(theta)`` where ``g(theta) = -log(phi(theta))/theta``.
Since ``phi(theta)**(1/theta)`` is a norm of ``exp(-X)`` and grows with theta,
``g`` can only decrease towards its limit.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from didgaps.errors import DomainError, NumericInstabilityError, OutOfScopeError

DEFAULT_SCHEDULE = tuple(np.geomspace(1.0, 1e6, 16))
MONOTONE_RTOL = 1e-12


@dataclass(frozen=True)
class LaplaceSpec:
    drift: float = 0.0
    rate: float = 0.0
    jumps: Mapping[float, float] | None = None
    interval: tuple[float, float] | None = None  # (c, delta): uniform on [c, c + delta]
    gamma: tuple[float, float] | None = None  # (shape, rate)

    def __post_init__(self):
        if self.drift < 0 or self.rate < 0:
            raise DomainError("drift and rate must be nonnegative")
        if self.jumps is not None and self.interval is not None:
            raise DomainError("give either discrete jumps or an interval, not both")
        if self.rate > 0 and self.jumps is None and self.interval is None:
            raise DomainError("a positive rate needs a jump law")
        if self.jumps is not None:
            jumps = {float(y): float(q) for y, q in self.jumps.items()}
            if any(y <= 0 for y in jumps) or any(q <= 0 for q in jumps.values()):
                raise DomainError("jump sizes and probabilities must be positive")
            if abs(math.fsum(jumps.values()) - 1.0) > 1e-12:
                raise DomainError("jump probabilities must sum to 1")
            object.__setattr__(self, "jumps", dict(sorted(jumps.items())))
        if self.interval is not None:
            c, delta = map(float, self.interval)
            if c <= 0 or delta < 0:
                raise DomainError("interval jump law needs c > 0 and delta >= 0")
            object.__setattr__(self, "interval", (c, delta))
        if self.gamma is not None:
            shape, beta = map(float, self.gamma)
            if shape <= 0 or beta <= 0:
                raise DomainError("gamma shape and rate must be positive")
            object.__setattr__(self, "gamma", (shape, beta))

    @property
    def finite_measure(self) -> bool:
        return self.gamma is None


def jump_transform(spec: LaplaceSpec, theta: float) -> float:
    """``psi(theta) = E exp(-theta Y)`` for the normalized jump law."""
    if spec.jumps is not None:
        return math.fsum(q * math.exp(-theta * y) for y, q in spec.jumps.items())
    if spec.interval is not None:
        c, delta = spec.interval
        x = theta * delta
        if x < 1e-8:
            return math.exp(-theta * c) * (1.0 - x / 2.0)
        return math.exp(-theta * c) * (-math.expm1(-x)) / x
    return 1.0


def neg_log_laplace(spec: LaplaceSpec, theta: float) -> float:
    """``-log phi(theta)``; stays finite where ``phi`` itself underflows."""
    if theta < 0:
        raise DomainError("theta must be nonnegative")
    out = spec.drift * theta + spec.rate * (1.0 - jump_transform(spec, theta))
    if spec.gamma is not None:
        shape, beta = spec.gamma
        out += shape * math.log1p(theta / beta)
    return out


def laplace_eval(spec: LaplaceSpec, theta: float) -> float:
    if theta == 0:
        return 1.0
    return math.exp(-neg_log_laplace(spec, theta))


@dataclass(frozen=True)
class ExtremityEstimate:
    estimate: float
    thetas: tuple[float, ...]
    phi: tuple[float, ...]
    g: tuple[float, ...]
    running: tuple[float, ...]
    monotone: bool

    @property
    def raw(self) -> float:
        return self.g[-1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theta", "phi", "g", "running_estimate"])
        for row in zip(self.thetas, self.phi, self.g, self.running):
            w.writerow([f"{v:.12g}" for v in row])
        return buf.getvalue()


def _extrapolate(thetas: np.ndarray, g: np.ndarray, log_aware: bool) -> float:
    if len(thetas) == 1:
        return float(g[0])
    if log_aware and len(thetas) >= 3:
        # g = l + s log(theta)/theta + a/theta, exact through the last three points
        th = thetas[-3:]
        A = np.column_stack([np.ones(3), np.log(th) / th, 1.0 / th])
        return float(np.linalg.solve(A, g[-3:])[0])
    # g = l + a/theta through the last two points
    t1, t2 = thetas[-2:]
    g1, g2 = g[-2:]
    return float((t2 * g2 - t1 * g1) / (t2 - t1))


def left_extremity_estimate(spec: LaplaceSpec, schedule: Sequence[float] | None = None) -> ExtremityEstimate:
    """Estimate the left extremity from ``g(theta) = -log(phi(theta))/theta``.

    Richardson-style: fit ``l + a/theta`` on the last two schedule points, or
    ``l + s*log(theta)/theta + a/theta`` on the last three when a gamma
    factor is present. Raises :class:`NumericInstabilityError` if ``g``
    increases anywhere on the schedule.
    """
    thetas = np.asarray(DEFAULT_SCHEDULE if schedule is None else schedule, dtype=float)
    if thetas.ndim != 1 or thetas.size == 0 or np.any(thetas <= 0) or np.any(np.diff(thetas) <= 0):
        raise DomainError("schedule must be positive and strictly increasing")
    if thetas[-1] < 1e4:
        raise DomainError("schedule must reach theta >= 1e4")
    nll = np.array([neg_log_laplace(spec, t) for t in thetas])
    g = nll / thetas
    log_aware = spec.gamma is not None
    monotone = bool(np.all(np.diff(g) <= MONOTONE_RTOL * np.maximum(np.abs(g[:-1]), 1e-300)))
    if not monotone:
        k = int(np.argmax(np.diff(g)))
        raise NumericInstabilityError(
            f"g(theta) increased between theta={thetas[k]:.6g} and {thetas[k + 1]:.6g}"
        )
    running = tuple(_extrapolate(thetas[: i + 1], g[: i + 1], log_aware) for i in range(thetas.size))
    return ExtremityEstimate(
        estimate=running[-1],
        thetas=tuple(map(float, thetas)),
        phi=tuple(float(math.exp(-v)) for v in nll),
        g=tuple(map(float, g)),
        running=running,
        monotone=monotone,
    )


def convolution_root(spec: LaplaceSpec, n: int) -> LaplaceSpec:
    """Transform of the n-th convolution root: drift, rate and gamma shape divided by n."""
    if int(n) != n or n < 1:
        raise DomainError(f"root order must be a positive integer, got {n!r}")
    gamma = None if spec.gamma is None else (spec.gamma[0] / n, spec.gamma[1])
    return replace(spec, drift=spec.drift / n, rate=spec.rate / n, gamma=gamma)


def mass_at_zero(spec: LaplaceSpec, n: int = 1) -> float:
    """``F_n(0) = exp(-rate/n)`` for a finite Levy measure and zero drift.

    With a gamma factor the Levy measure is infinite and ``F_n(0) = 0``;
    that case raises :class:`OutOfScopeError` rather than return a bare 0.
    """
    if spec.gamma is not None:
        raise OutOfScopeError("infinite-measure analogue out of scope: F_n(0) = 0 when the Levy measure is infinite")
    if spec.drift > 0:
        raise DomainError("positive drift puts no mass at 0; shift the law first")
    if int(n) != n or n < 1:
        raise DomainError(f"root order must be a positive integer, got {n!r}")
    return math.exp(-spec.rate / n)


def mass_at_zero_limit(spec: LaplaceSpec, n: int, theta: float) -> float:
    """``phi(theta) ** (1/n)``, the numerical route to ``F_n(0)``."""
    return math.exp(-neg_log_laplace(spec, theta) / n)


def tail_mass(spec: LaplaceSpec, v: float) -> float:
    """``M(v, inf)`` for the finite Levy measure ``rate * jump law``."""
    if spec.jumps is not None:
        return spec.rate * math.fsum(q for y, q in spec.jumps.items() if y > v)
    if spec.interval is not None:
        c, delta = spec.interval
        if v < c:
            return spec.rate
        if v >= c + delta:
            return 0.0
        return spec.rate * (c + delta - v) / delta
    return 0.0


def eq4_identity_check(spec: LaplaceSpec, theta: float) -> tuple[float, float, float]:
    """Compare ``rate*(1 - psi(theta))/theta`` with ``int_0^inf exp(-theta v) M(v, inf) dv``.

    The right side is integrated piece by piece in closed form: the tail mass
    is constant between atoms, and linear across a uniform interval.
    """
    if spec.gamma is not None:
        raise OutOfScopeError("the identity check needs a finite Levy measure")
    if not theta > 0:
        raise DomainError("theta must be positive")
    lhs = spec.rate * (1.0 - jump_transform(spec, theta)) / theta

    def piece(a: float, b: float) -> float:
        # int_a^b exp(-theta v) dv
        return math.exp(-theta * a) * (-math.expm1(-theta * (b - a))) / theta

    terms = []
    if spec.jumps is not None:
        edges = [0.0, *spec.jumps]
        for a, b in zip(edges, edges[1:]):
            terms.append(tail_mass(spec, a) * piece(a, b))
    elif spec.interval is not None:
        c, delta = spec.interval
        terms.append(spec.rate * piece(0.0, c))
        if delta > 0:
            x = theta * delta
            # int_0^delta (delta - u) exp(-theta u) du / delta
            inner = (x + math.expm1(-x)) / (theta * x)
            terms.append(spec.rate * math.exp(-theta * c) * inner)
    rhs = math.fsum(terms)
    return lhs, rhs, abs(lhs - rhs)
