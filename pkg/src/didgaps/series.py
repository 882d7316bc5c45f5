"""Truncated power series for probability generating functions.

A truncated series is a 1-d float array ``c[0..K]``; every operation is exact
to order ``K`` and says nothing about the tail. The PGF of a compound Poisson
law is ``exp(lam * t * (Q(s) - 1))``, so exp/log/pow are all that is needed
to build PMFs, take convolution roots and decide discrete infinite
divisibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from didgaps.errors import DomainError, LeftExtremityError

# structural zero vs. positive mass; far below any mass reachable at K <= 40
SUPPORT_FLOOR = 1e-250
# DID negativity tolerance, relative to the recovered rate
DID_TOL = 1e-10


def _coeffs(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise DomainError("a truncated series needs at least one coefficient")
    if not np.all(np.isfinite(a)):
        raise DomainError("series coefficients must be finite")
    return a


def series_mul(a, b) -> np.ndarray:
    """Product truncated to the shorter order."""
    a, b = _coeffs(a), _coeffs(b)
    K = min(a.size, b.size)
    return np.convolve(a[:K], b[:K])[:K]


def series_exp(a) -> np.ndarray:
    a = _coeffs(a)
    K = a.size
    b = np.zeros(K)
    b[0] = math.exp(a[0])
    ja = np.arange(K) * a
    for k in range(1, K):
        # b_k = (1/k) sum_{j=1..k} j a_j b_{k-j}
        b[k] = np.dot(ja[1 : k + 1], b[k - 1 :: -1][:k]) / k
    return b


def series_log(a) -> np.ndarray:
    a = _coeffs(a)
    if a[0] <= 0:
        raise DomainError(f"log needs a positive constant term, got {a[0]!r}")
    K = a.size
    b = np.zeros(K)
    b[0] = math.log(a[0])
    for k in range(1, K):
        # a b' = a'  =>  k a_k = sum_{j=1..k} j b_j a_{k-j}
        acc = k * a[k]
        if k > 1:
            j = np.arange(1, k)
            acc -= np.dot(j * b[1:k], a[k - 1 : 0 : -1])
        b[k] = acc / (k * a[0])
    return b


def series_pow(a, alpha: float) -> np.ndarray:
    """``a ** alpha`` via the J.C.P. Miller recursion."""
    a = _coeffs(a)
    if a[0] <= 0:
        raise DomainError(f"pow needs a positive constant term, got {a[0]!r}")
    K = a.size
    b = np.zeros(K)
    b[0] = a[0] ** alpha
    for k in range(1, K):
        j = np.arange(1, k + 1)
        b[k] = np.dot((alpha * j - (k - j)) * a[1 : k + 1], b[k - 1 :: -1][:k]) / (k * a[0])
    return b


@dataclass(frozen=True)
class CompoundPoissonSpec:
    """Rate, finite jump law on the positive integers, and time.

    ``jump_pmf`` maps jump size to probability; probabilities must be
    positive and sum to one within 1e-12.
    """

    rate: float
    jump_pmf: Mapping[int, float]
    time: float = 1.0

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise DomainError(f"rate must be positive and finite, got {self.rate!r}")
        if not (self.time > 0 and math.isfinite(self.time)):
            raise DomainError(f"time must be positive and finite, got {self.time!r}")
        if not self.jump_pmf:
            raise DomainError("jump distribution is empty")
        pmf = {}
        for y, q in self.jump_pmf.items():
            if isinstance(y, bool) or int(y) != y or y < 1:
                raise DomainError(f"jump size {y!r} must be a positive integer")
            if not q > 0:
                raise DomainError(f"jump probability for {y} must be positive, got {q!r}")
            pmf[int(y)] = float(q)
        total = math.fsum(pmf.values())
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"jump probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "jump_pmf", dict(sorted(pmf.items())))

    @classmethod
    def uniform(cls, sizes, rate: float = 1.0, time: float = 1.0) -> "CompoundPoissonSpec":
        sizes = sorted(set(int(y) for y in sizes))
        return cls(rate, {y: 1.0 / len(sizes) for y in sizes}, time)

    @property
    def intensity(self) -> float:
        return self.rate * self.time

    @property
    def jump_sizes(self) -> tuple[int, ...]:
        return tuple(self.jump_pmf)

    def jump_series(self, K: int) -> np.ndarray:
        """Q(s) truncated to order K."""
        q = np.zeros(K + 1)
        for y, p in self.jump_pmf.items():
            if y <= K:
                q[y] = p
        return q


def compound_poisson_pmf(spec: CompoundPoissonSpec, K: int) -> np.ndarray:
    """PMF of X(t) on ``0..K`` by the Panjer recursion."""
    if K < 0:
        raise DomainError("truncation order must be nonnegative")
    mu = spec.intensity
    q = spec.jump_series(K)
    p = np.zeros(K + 1)
    p[0] = math.exp(-mu)
    jq = np.arange(K + 1) * q
    for n in range(1, K + 1):
        p[n] = mu / n * np.dot(jq[1 : n + 1], p[n - 1 :: -1][:n])
    return p


def compound_poisson_exp(spec: CompoundPoissonSpec, K: int) -> np.ndarray:
    """Same PMF through ``series_exp(lam t (Q - 1))``; an independent route."""
    a = spec.intensity * spec.jump_series(K)
    a[0] -= spec.intensity
    return series_exp(a)


def nth_root(pmf, n: int) -> np.ndarray:
    """PMF prefix of the n-th convolution root, ``P(s) ** (1/n)``.

    Refuses laws without mass at 0: their roots cannot live on the integers.

    When the input passes the DID test the root is computed as
    ``exp(log(P)/n)`` with the log-coefficients' roundoff negatives set to
    zero. Every term of that exp recursion is nonnegative, so the root is
    positive exactly on the input's support even where its masses are
    hundreds of orders of magnitude below the input's (the Miller recursion
    in :func:`series_pow` flips signs there). Other inputs go through
    :func:`series_pow` unchanged.
    """
    pmf = _coeffs(pmf)
    if int(n) != n or n < 1:
        raise DomainError(f"root order must be a positive integer, got {n!r}")
    if pmf[0] <= 0:
        raise LeftExtremityError(
            "left extremity positive: not DID; shift the law by its left extremity first"
        )
    if pmf[0] < 1:
        L = series_log(pmf)
        rate = -L[0]
        if L.size == 1 or L[1:].min() >= -DID_TOL * rate:
            L[1:] = np.maximum(L[1:], 0.0)
            return series_exp(L / n)
    return series_pow(pmf, 1.0 / n)


def support_indices(pmf, tol: float = SUPPORT_FLOOR) -> list[int]:
    pmf = _coeffs(pmf)
    return [int(j) for j in np.flatnonzero(pmf > tol)]


@dataclass(frozen=True)
class DidVerdict:
    is_did: bool
    rate: float | None = None
    jump_pmf: dict[int, float] | None = None
    violation: tuple[int, float] | None = None
    # jump mass that falls beyond the truncation; jump_pmf is renormalized to hide it
    truncated_mass: float | None = None
    reason: str = field(default="", compare=False)

    def to_dict(self) -> dict:
        return {
            "is_did": self.is_did,
            "rate": self.rate,
            "jump_pmf": None if self.jump_pmf is None else {str(k): v for k, v in self.jump_pmf.items()},
            "violation_index": None if self.violation is None else self.violation[0],
            "violation_value": None if self.violation is None else self.violation[1],
        }


def did_test(pmf, tol: float = DID_TOL, order: int | None = None) -> DidVerdict:
    """Decide whether a PMF prefix is compound Poisson to order K.

    A law on the nonnegative integers is DID iff ``log P(s) = -lam + lam Q(s)``
    for a PGF ``Q``, i.e. iff every log-coefficient past the constant is
    nonnegative. Negativity is judged against ``tol * lam``. A law with no
    mass at zero fails with violation ``(0, p_0)``. ``order`` zero-pads a
    finitely supported PMF so that log-coefficients past its support are
    examined too.
    """
    pmf = _coeffs(pmf)
    if order is not None and order + 1 > pmf.size:
        pmf = np.concatenate([pmf, np.zeros(order + 1 - pmf.size)])
    if pmf[0] <= 0:
        return DidVerdict(False, violation=(0, float(pmf[0])), reason="no mass at zero")
    L = series_log(pmf)
    rate = -float(L[0])
    if rate <= 0:
        # degenerate at 0, or pmf[0] > 1 which is not a PMF at all
        if rate == 0 and np.all(np.abs(L[1:]) <= tol):
            return DidVerdict(True, rate=0.0, jump_pmf={}, truncated_mass=0.0)
        return DidVerdict(False, violation=(0, float(pmf[0])), reason="mass at zero is not below one")
    tail = L[1:]
    if tail.size and tail.min() < -tol * rate:
        k = int(np.argmin(tail)) + 1
        return DidVerdict(False, violation=(k, float(L[k])), reason="negative log-coefficient")
    keep = {k: float(L[k]) for k in range(1, L.size) if L[k] > tol * rate}
    total = math.fsum(keep.values())
    jumps = {k: v / total for k, v in keep.items()} if total > 0 else {}
    return DidVerdict(True, rate=rate, jump_pmf=jumps, truncated_mass=1.0 - total / rate)


def pmf_rows(pmf, sg=None, tol: float = SUPPORT_FLOOR) -> list[dict]:
    """Rows ``n, p_n, member_of_semigroup`` for CSV/JSON export.

    ``sg`` is a :class:`~didgaps.semigroup.NumericalSemigroup`; when absent
    membership is read off the positivity pattern.
    """
    pmf = _coeffs(pmf)
    rows = []
    for n, p in enumerate(pmf):
        member = sg.contains_value(n) if sg is not None else bool(p > tol)
        rows.append({"n": n, "p_n": float(p), "member_of_semigroup": member})
    return rows
