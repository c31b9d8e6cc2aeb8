"""Quadrature, root finding, and amplitude-minimization scaffolding."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinpulse.numerics import (
    QuadraturePolicy,
    SolverConfig,
    SpareScan,
    find_root,
    integrate_adaptive,
    minimize_amplitude,
)


def test_half_sine_integral():
    val = integrate_adaptive(lambda t: np.sin(math.pi * t), (0.0, 1.0))
    assert abs(val - 2.0 / math.pi) < 1e-13


def test_cosine_integral_vanishes():
    val = integrate_adaptive(lambda t: np.cos(math.pi * t), (0.0, 1.0))
    assert abs(val) < 1e-13


def test_vector_valued_integrand():
    def f(t):
        return np.stack([np.sin(math.pi * t), np.cos(math.pi * t), t**2], axis=-1)

    val = integrate_adaptive(f, (0.0, 1.0))
    np.testing.assert_allclose(val, [2.0 / math.pi, 0.0, 1.0 / 3.0], atol=1e-13)


def test_oscillatory_integrand_against_brute_force():
    def f(t):
        return np.sin(40.0 * t) * np.exp(np.cos(7.0 * t))

    val = integrate_adaptive(f, (0.0, 1.0))
    grid = np.linspace(0.0, 1.0, 10_000_001)
    ref = np.trapezoid(f(grid), grid)
    assert abs(val - ref) < 1e-10


def test_high_degree_polynomial():
    val = integrate_adaptive(lambda t: t**40, (0.0, 1.0))
    assert abs(val - 1.0 / 41.0) < 1e-14


def test_subdivision_cap_raises():
    policy = QuadraturePolicy(target=1e-12, max_panels=4)
    with pytest.raises(RuntimeError):
        integrate_adaptive(lambda t: np.sin(1e6 * t), (0.0, 1.0), policy)


def test_quadrature_policy_rejects_unreachable_target():
    with pytest.raises(ValueError):
        QuadraturePolicy(target=1e-30)


def test_find_root_scalar_quadratic():
    res = find_root(lambda x: np.array([x[0] ** 2 - 4.0]), np.array([1.0]))
    assert res.success
    assert abs(res.x[0] - 2.0) < 1e-10
    assert res.residue < 1e-10


def test_find_root_rosenbrock_gradient():
    def grad(x):
        a, b = 1.0, 100.0
        return np.array(
            [
                -2.0 * (a - x[0]) - 4.0 * b * x[0] * (x[1] - x[0] ** 2),
                2.0 * b * (x[1] - x[0] ** 2),
            ]
        )

    res = find_root(grad, np.array([-1.2, 1.0]))
    assert res.success
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-8)
    assert res.nfev <= SolverConfig().max_evals


def test_find_root_failure_is_reported_not_raised():
    res = find_root(lambda x: np.array([x[0] ** 2 + 1.0]), np.array([3.0]))
    assert not res.success
    assert res.residue > 1e-10


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=30, deadline=None)
def test_success_implies_residue_below_acceptance(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(3, 3))
    target = rng.normal(size=3)

    def f(x):
        return A @ x - target

    config = SolverConfig()
    res = find_root(f, rng.normal(size=3), config)
    if res.success:
        assert res.residue < config.acceptance
        assert np.sum(np.abs(f(res.x))) < config.acceptance


def _quadratic_scan(center, offset, label="scan"):
    def solve_at(spare, x0):
        x = np.array([spare])
        return (spare - center) ** 2 + offset, x, 0.0

    return SpareScan(label=label, solve_at=solve_at, bracket=(-1.0, 1.0), x0=np.zeros(1))


def test_minimize_amplitude_finds_interior_minimum():
    res = minimize_amplitude([_quadratic_scan(0.3, 2.0)], SolverConfig())
    assert abs(res.spare - 0.3) < 1e-6
    assert abs(res.amplitude - 2.0) < 1e-10
    assert res.label == "scan"


def test_minimize_amplitude_picks_best_scan_and_records_all():
    scans = [_quadratic_scan(0.3, 2.5, "worse"), _quadratic_scan(-0.2, 2.0, "better")]
    res = minimize_amplitude(scans, SolverConfig())
    assert res.label == "better"
    assert abs(res.spare + 0.2) < 1e-6
    assert len(res.scans) == 2


def test_minimize_amplitude_requires_a_feasible_scan():
    def never(spare, x0):
        raise RuntimeError("no root here")

    scan = SpareScan(label="dead", solve_at=never, bracket=(-1.0, 1.0), x0=np.zeros(1))
    with pytest.raises(RuntimeError):
        minimize_amplitude([scan], SolverConfig())
