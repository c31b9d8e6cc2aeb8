"""Propagation invariants: unitarity drift, grid independence, chart
reinsertion, and agreement between analytic and integrated paths."""

import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from spinpulse.kernel import su2_rotation
from spinpulse.pulses import (
    CompositeFmSpec,
    ContinuousAmSpec,
    FmSpec,
    PiecewiseAmSpec,
    psi_am,
)
from spinpulse.trajectory import (
    columns_at,
    derivatives_spherical,
    propagate,
    quat_to_spherical,
    reinsert,
    sample_quaternions,
    spherical_initial_state,
    trajectory_table,
)

FM_PI = FmSpec(theta=math.pi, v0=3.751157, coeffs=((2, -1.090479), (4, -0.588913)))
FM_PI2ND = FmSpec(
    theta=math.pi,
    v0=8.129097,
    coeffs=((2, -0.381075), (4, 0.450018), (6, -0.496673), (8, -0.241963)),
)
PW = PiecewiseAmSpec(
    theta=math.pi,
    v0=6.72572865,
    instants=(0.07623078, 0.26784319, 1.0 - 0.26784319, 1.0 - 0.07623078),
    signs=(1, -1, 1, -1, 1),
)


@pytest.mark.invariants
def test_quaternion_norm_drift_stays_small():
    traj = propagate(FM_PI2ND, n_samples=2001)
    assert traj.norm_drift() < 1e-10


def test_fm_sweep_matches_dense_scipy_reference():
    from spinpulse.pulses import envelope, omega_fm

    def rhs(t, q):
        om = omega_fm(FM_PI, np.array([t]))[0]
        mag = FM_PI.v0 * envelope(np.array([t]), FM_PI.tau_s)[0]
        vx, vy = mag * math.cos(om), mag * math.sin(om)
        w, rx, ry, rz = q
        return [
            -(vx * rx + vy * ry),
            w * vx + vy * rz,
            w * vy - vx * rz,
            vx * ry - vy * rx,
        ]

    times = np.linspace(0.0, 1.0, 11)
    ref = solve_ivp(
        rhs, (0.0, 1.0), [1.0, 0.0, 0.0, 0.0], t_eval=times, rtol=1e-12, atol=1e-14
    ).y.T
    ours = sample_quaternions(FM_PI, times)
    np.testing.assert_allclose(ours, ref, atol=1e-9)


def test_grid_refinement_does_not_move_shared_samples():
    coarse_times = np.linspace(0.0, 1.0, 9)
    fine_times = np.linspace(0.0, 1.0, 257)
    coarse = sample_quaternions(FM_PI2ND, coarse_times)
    fine = sample_quaternions(FM_PI2ND, fine_times)
    shared = np.isin(fine_times, coarse_times)
    np.testing.assert_allclose(fine[shared], coarse, atol=1e-10)


def test_unsorted_times_are_handled():
    times = np.array([0.7, 0.1, 1.0, 0.4])
    a = sample_quaternions(FM_PI2ND, times)
    b = sample_quaternions(FM_PI2ND, np.sort(times))
    np.testing.assert_allclose(a, b[np.argsort(np.argsort(times))], atol=1e-12)


def test_am_analytic_path_matches_total_angle():
    q_end = sample_quaternions(PW, np.array([1.0]))[0]
    psi_end = psi_am(PW, np.array([1.0]))[0]
    assert abs(q_end[0] - math.cos(psi_end / 2.0)) < 1e-14
    assert abs(q_end[2] - math.sin(psi_end / 2.0)) < 1e-14
    assert q_end[1] == q_end[3] == 0.0


@pytest.mark.invariants
def test_columns_are_rotations():
    times = np.linspace(0.0, 1.0, 101)
    cols = columns_at(FM_PI2ND, times)
    for D in cols[::10]:
        np.testing.assert_allclose(D @ D.T, np.eye(3), atol=1e-10)
        assert abs(np.linalg.det(D) - 1.0) < 1e-10


def test_symmetric_fm_final_axis_is_equatorial():
    # Even-only phase coefficients make the pulse its own time-reverse; the
    # final rotation axis then has no z component (interior samples do).
    traj = propagate(FM_PI, n_samples=401)
    sph = traj.spherical()
    assert abs(sph[-1, 2] - math.pi / 2.0) < 1e-9
    assert abs(traj.quats[-1, 3]) < 1e-10


def test_composite_second_half_reverses_the_first():
    comp = CompositeFmSpec(base=FM_PI2ND)
    # the composite ends where a net 2 theta rotation would
    q = sample_quaternions(comp, np.array([0.5, 1.0, 1.5, 2.0]))
    traj_norm = np.linalg.norm(q, axis=1)
    np.testing.assert_allclose(traj_norm, 1.0, atol=1e-10)
    # U(2) = U_rev(1) U(1); the reversed half alone ends at the same angle
    U1 = propagate(comp.base, n_samples=2)
    U2 = propagate(comp.reversed_half, n_samples=2)
    full = U2.unitaries()[-1] @ U1.unitaries()[-1]
    w_full = 0.5 * np.real(np.trace(full))
    assert abs(w_full - q[-1, 0]) < 1e-9


def test_spherical_chart_reinsertion():
    for spec in (FM_PI, FM_PI2ND):
        sol = solve_ivp(
            lambda t, y, s=spec: derivatives_spherical(s, t, y),
            (0.0, 1.0),
            spherical_initial_state(),
            rtol=1e-11,
            atol=1e-12,
            dense_output=True,
        )
        assert sol.success
        times = np.linspace(0.05, 1.0, 20)
        quats = sample_quaternions(spec, times)
        for t, q in zip(times, quats):
            U_chart = reinsert(sol.sol(t))
            w = q[0]
            r = q[1:]
            U_quat = np.array(
                [[w - 1j * r[2], -r[1] - 1j * r[0]], [r[1] - 1j * r[0], w + 1j * r[2]]]
            )
            # compare up to the double-cover sign
            overlap = abs(np.trace(U_chart.conj().T @ U_quat)) / 2.0
            assert abs(overlap - 1.0) < 1e-9


def test_spherical_chart_initial_rates():
    spec = FmSpec(theta=math.pi, v0=2.0, coeffs=((1, 0.7), (2, -0.3)))
    rates = derivatives_spherical(spec, 0.0, spherical_initial_state())
    # angle grows at twice the field, the axis tracks half the phase rate
    assert abs(rates[0] - 2.0 * spec.v0) < 1e-12
    from spinpulse.pulses import omega_fm_rate

    expected_phi_rate = 0.5 * omega_fm_rate(spec, np.array([0.0]))[0]
    assert abs(rates[1] - expected_phi_rate) < 1e-12
    assert rates[2] == 0.0


def test_spherical_chart_handles_am_families():
    spec = ContinuousAmSpec(theta=math.pi, a=-1.92179255, b=2.86838351)
    sol = solve_ivp(
        lambda t, y: derivatives_spherical(spec, t, y),
        (0.0, 1.0),
        np.array([0.0, math.pi / 2.0, math.pi / 2.0]),  # axis starts along +y
        rtol=1e-11,
        atol=1e-12,
    )
    assert sol.success
    psi_end = sol.y[0, -1]
    assert abs(psi_end - math.pi) < 1e-8


def test_principal_chart_values():
    q = np.array([[1.0, 0.0, 0.0, 0.0], [math.cos(0.4), 0.0, math.sin(0.4), 0.0]])
    sph = quat_to_spherical(q)
    assert sph[0, 0] == 0.0
    assert abs(sph[1, 0] - 0.8) < 1e-14
    assert abs(sph[1, 1] - math.pi / 2.0) < 1e-14  # axis +y
    assert abs(sph[1, 2] - math.pi / 2.0) < 1e-14


def test_trajectory_table_shape():
    text = trajectory_table(FM_PI, n_samples=50)
    lines = text.strip().splitlines()
    assert len(lines) == 51
    assert lines[0].startswith("#")
    assert all(len(row.split("\t")) == 7 for row in lines[1:])
