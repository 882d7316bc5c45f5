import math

import numpy as np
import pytest
from scipy import integrate

from battery import FINITE, SPECS
from didgaps.errors import DomainError, NumericInstabilityError, OutOfScopeError
from didgaps.extremity import (
    LaplaceSpec,
    convolution_root,
    eq4_identity_check,
    laplace_eval,
    left_extremity_estimate,
    mass_at_zero,
    mass_at_zero_limit,
    neg_log_laplace,
    tail_mass,
)



def test_laplace_eval_examples():
    assert laplace_eval(LaplaceSpec(drift=2.0), 1.0) == pytest.approx(math.exp(-2), rel=1e-15)
    spec = LaplaceSpec(rate=1.0, jumps={1: 1.0})
    assert laplace_eval(spec, 0.0) == 1.0
    assert laplace_eval(spec, 1.0) == pytest.approx(math.exp(-(1 - math.exp(-1))), rel=1e-15)


@pytest.mark.parametrize("spec", SPECS, ids=repr)
def test_phi_is_decreasing_from_one(spec):
    thetas = np.linspace(0, 20, 81)
    phi = [laplace_eval(spec, t) for t in thetas]
    assert phi[0] == 1.0
    assert all(b <= a for a, b in zip(phi, phi[1:]))
    assert all(p > 0 for p in phi)


def test_interval_transform_against_quadrature():
    spec = LaplaceSpec(rate=1.0, interval=(1.0, 0.3))
    for theta in (0.0, 0.5, 3.0, 40.0):
        psi, _ = integrate.quad(lambda x: math.exp(-theta * x) / 0.3, 1.0, 1.3, epsabs=1e-14)
        assert neg_log_laplace(spec, theta) == pytest.approx(1 - psi, abs=1e-12)


def test_spec_validation():
    with pytest.raises(DomainError):
        LaplaceSpec(drift=-1)
    with pytest.raises(DomainError):
        LaplaceSpec(rate=1.0)
    with pytest.raises(DomainError):
        LaplaceSpec(rate=1.0, jumps={1: 0.5})
    with pytest.raises(DomainError):
        LaplaceSpec(rate=1.0, jumps={1: 1.0}, interval=(1, 0.1))
    with pytest.raises(DomainError):
        LaplaceSpec(gamma=(0, 1))


def test_pure_drift_is_exact():
    est = left_extremity_estimate(LaplaceSpec(drift=2.0))
    assert all(g == pytest.approx(2.0, rel=1e-15) for g in est.g)
    assert est.estimate == pytest.approx(2.0, rel=1e-14)


def test_finite_measure_residual():
    spec = LaplaceSpec(drift=1.0, rate=2.0, jumps={1: 0.5, 3: 0.5})
    est = left_extremity_estimate(spec)
    # g(theta) = 1 + 2 (1 - psi(theta)) / theta, so the raw error at 1e6 is about 2e-6
    assert est.raw - 1.0 == pytest.approx(2e-6, rel=1e-6)
    assert abs(est.estimate - 1.0) <= 1e-3
    assert abs(est.estimate - 1.0) < abs(est.raw - 1.0)


def test_gamma_needs_log_aware_fit():
    est = left_extremity_estimate(LaplaceSpec(gamma=(1.0, 1.0)))
    for t, g in zip(est.thetas, est.g):
        assert g == pytest.approx(math.log1p(t) / t, rel=1e-12)
    assert abs(est.estimate) <= 1e-3
    assert abs(est.estimate) < abs(est.raw)


@pytest.mark.parametrize("spec", SPECS, ids=repr)
def test_estimate_within_tolerance(spec):
    est = left_extremity_estimate(spec)
    assert est.monotone
    assert abs(est.estimate - spec.drift) <= 1e-3
    assert all(b <= a * (1 + 1e-12) for a, b in zip(est.g, est.g[1:]))


@pytest.mark.parametrize("spec", SPECS, ids=repr)
@pytest.mark.parametrize("n", [2, 3, 5])
def test_root_estimate_scales(spec, n):
    full = left_extremity_estimate(spec).estimate
    root = left_extremity_estimate(convolution_root(spec, n)).estimate
    assert abs(root * n - full) <= 2e-3
    assert abs(root - spec.drift / n) <= 1e-3


def test_schedule_validation():
    with pytest.raises(DomainError):
        left_extremity_estimate(LaplaceSpec(drift=1.0), [1.0, 10.0, 100.0])
    with pytest.raises(DomainError):
        left_extremity_estimate(LaplaceSpec(drift=1.0), [1.0, 1e5, 1e4])


def test_non_monotone_g_is_reported():
    # a sign-flipped jump law makes -log(phi)/theta increase
    spec = LaplaceSpec(rate=1.0, jumps={1: 1.0})
    object.__setattr__(spec, "rate", -1.0)
    with pytest.raises(NumericInstabilityError):
        left_extremity_estimate(spec)


def test_convolution_root_examples():
    root = convolution_root(LaplaceSpec(drift=3.0, rate=2.0, jumps={1: 1.0}), 3)
    assert root.drift == 1.0 and root.rate == pytest.approx(2 / 3)
    spec = SPECS[8]
    assert convolution_root(spec, 1) == spec


@pytest.mark.parametrize("spec", SPECS, ids=repr)
def test_root_transform_is_power(spec):
    for n in range(1, 7):
        root = convolution_root(spec, n)
        for theta in (0.1, 1.0, 10.0, 100.0):
            assert laplace_eval(root, theta) == pytest.approx(laplace_eval(spec, theta) ** (1 / n), rel=1e-12)


def test_mass_at_zero():
    assert mass_at_zero(LaplaceSpec(rate=1.0, jumps={1: 1.0}), 1) == pytest.approx(math.exp(-1))
    assert mass_at_zero(LaplaceSpec(rate=2.0, jumps={1: 1.0}), 4) == pytest.approx(math.exp(-0.5))
    spec = LaplaceSpec(rate=1.0, jumps={1: 1.0})
    assert abs(mass_at_zero_limit(spec, 1, 50.0) - mass_at_zero(spec, 1)) <= 1e-10
    with pytest.raises(OutOfScopeError, match="infinite-measure"):
        mass_at_zero(LaplaceSpec(gamma=(1.0, 1.0)))
    with pytest.raises(DomainError):
        mass_at_zero(LaplaceSpec(drift=1.0, rate=1.0, jumps={1: 1.0}))


@pytest.mark.parametrize("spec", [s for s in FINITE if s.drift == 0], ids=repr)
@pytest.mark.parametrize("n", [1, 2, 4])
def test_mass_at_zero_matches_limit(spec, n):
    # psi decays like exp(-theta * min jump); theta large enough to push it under 1e-12
    theta = 40.0 / min(spec.jumps or {spec.interval[0]: 0})
    assert abs(mass_at_zero_limit(spec, n, theta) - mass_at_zero(spec, n)) <= 1e-10


def test_tail_identity_examples():
    lhs, rhs, diff = eq4_identity_check(LaplaceSpec(rate=1.0, jumps={1: 1.0}), 1.0)
    assert lhs == pytest.approx(1 - math.exp(-1), rel=1e-15)
    assert diff <= 1e-15
    spec = LaplaceSpec(rate=3.0, jumps={1: 1 / 3, 2: 1 / 3, 3: 1 / 3})
    assert eq4_identity_check(spec, 0.5)[2] <= 1e-12
    assert eq4_identity_check(LaplaceSpec(rate=1.0, jumps={1: 1.0}), 100.0)[2] <= 1e-12


@pytest.mark.parametrize("spec", FINITE, ids=repr)
@pytest.mark.parametrize("theta", [0.25, 1.0, 4.0, 16.0])
def test_tail_identity_against_quadrature(spec, theta):
    lhs, rhs, diff = eq4_identity_check(spec, theta)
    assert diff <= 1e-10
    top = max(spec.jumps) if spec.jumps else sum(spec.interval) if spec.interval else 0.0
    breaks = sorted(spec.jumps) if spec.jumps else [spec.interval[0]] if spec.interval else None
    quad, _ = integrate.quad(
        lambda v: math.exp(-theta * v) * tail_mass(spec, v), 0, max(top, 1e-9), points=breaks, epsabs=1e-13, limit=200
    )
    assert rhs == pytest.approx(quad, abs=1e-10)


def test_tail_identity_refuses_infinite_measure():
    with pytest.raises(OutOfScopeError):
        eq4_identity_check(LaplaceSpec(gamma=(1.0, 1.0)), 1.0)
