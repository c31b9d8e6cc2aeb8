"""Rotation-algebra checks: Rodrigues matrices, SU(2) lift, quaternion columns."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spinpulse.kernel import (
    PAULI,
    angles_from_axis,
    axis_from_angles,
    quat_columns,
    rotated_noise,
    rotation_matrix,
    su2_rotation,
)


def random_axis(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def test_zero_angle_is_identity():
    D = rotation_matrix(np.array([0.0, 1.0, 0.0]), 0.0)
    np.testing.assert_allclose(D, np.eye(3), atol=1e-15)


def test_y_axis_third_column():
    # Rotation about y maps z-hat to (-sin psi, 0, cos psi).
    for psi in (0.3, 1.0, math.pi / 2, 2.7, -1.1):
        D = rotation_matrix(np.array([0.0, 1.0, 0.0]), psi)
        np.testing.assert_allclose(
            D[:, 2], [-math.sin(psi), 0.0, math.cos(psi)], atol=1e-14
        )


@pytest.mark.invariants
def test_random_rotations_are_special_orthogonal():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        axis = random_axis(rng)
        psi = rng.uniform(-8.0, 8.0)
        D = rotation_matrix(axis, psi)
        np.testing.assert_allclose(D @ D.T, np.eye(3), atol=1e-12)
        assert abs(np.linalg.det(D) - 1.0) < 1e-12


def test_axis_is_fixed_point():
    rng = np.random.default_rng(8)
    for _ in range(50):
        axis = random_axis(rng)
        D = rotation_matrix(axis, rng.uniform(-5, 5))
        np.testing.assert_allclose(D @ axis, axis, atol=1e-13)


@pytest.mark.invariants
def test_rotated_noise_matches_matrix_action_and_preserves_norm():
    rng = np.random.default_rng(9)
    for _ in range(200):
        axis = random_axis(rng)
        psi = rng.uniform(-6, 6)
        eta = rng.normal(size=3)
        out = rotated_noise(axis, psi, eta)
        np.testing.assert_allclose(out, rotation_matrix(axis, psi) @ eta, atol=1e-13)
        assert abs(np.linalg.norm(out) - np.linalg.norm(eta)) < 1e-12


def test_angle_composition_about_fixed_axis():
    rng = np.random.default_rng(10)
    axis = random_axis(rng)
    a, b = 0.9, -2.3
    np.testing.assert_allclose(
        rotation_matrix(axis, a + b),
        rotation_matrix(axis, a) @ rotation_matrix(axis, b),
        atol=1e-13,
    )


@pytest.mark.invariants
def test_su2_lift_reproduces_vector_rotation():
    # The toggling-frame conjugation U^dag (sigma . e_j) U acts on Pauli
    # components through the 3x3 matrix returned by rotation_matrix:
    # D_ij = Re tr(sigma_i U^dag sigma_j U) / 2.
    rng = np.random.default_rng(11)
    for _ in range(100):
        axis = random_axis(rng)
        psi = rng.uniform(-6, 6)
        U = su2_rotation(axis, psi)
        D = rotation_matrix(axis, psi)
        lifted = np.empty((3, 3))
        for i in range(3):
            for j in range(3):
                lifted[i, j] = np.real(
                    np.trace(PAULI[i] @ U.conj().T @ PAULI[j] @ U) / 2.0
                )
        np.testing.assert_allclose(lifted, D, atol=1e-12)


@pytest.mark.invariants
def test_su2_unitarity_and_determinant():
    U = su2_rotation(np.array([0.6, 0.0, 0.8]), 1.234)
    np.testing.assert_allclose(U @ U.conj().T, np.eye(2), atol=1e-14)
    assert abs(np.linalg.det(U) - 1.0) < 1e-14


@given(
    phi=st.floats(-math.pi, math.pi),
    theta=st.floats(0.01, math.pi - 0.01),
)
@settings(max_examples=200, deadline=None)
def test_axis_angle_chart_round_trip(phi, theta):
    axis = axis_from_angles(phi, theta)
    assert abs(np.linalg.norm(axis) - 1.0) < 1e-12
    phi2, theta2 = angles_from_axis(axis)
    np.testing.assert_allclose(axis_from_angles(phi2, theta2), axis, atol=1e-12)


def test_pole_chart_convention():
    phi, theta = angles_from_axis(np.array([0.0, 0.0, 1.0]))
    assert phi == 0.0 and abs(theta) < 1e-12


@pytest.mark.invariants
def test_quat_columns_matches_rotation_matrix():
    rng = np.random.default_rng(12)
    n = 64
    psi = rng.uniform(-7, 7, size=n)
    axes = rng.normal(size=(n, 3))
    axes /= np.linalg.norm(axes, axis=1)[:, None]
    w = np.cos(psi / 2.0)
    r = np.sin(psi / 2.0)[:, None] * axes
    cols = quat_columns(w, r)
    for k in range(n):
        np.testing.assert_allclose(cols[k], rotation_matrix(axes[k], psi[k]), atol=1e-12)
