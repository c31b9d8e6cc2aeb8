"""Axis-angle rotation algebra and Magnus-term evaluation.

Everything here is a pure function. The central object is the toggling-frame
map D(axis, psi): the rotation that carries a lab-frame noise vector into the
frame co-rotating with the pulse, equal to the rotation by -psi about the
instantaneous global axis. All higher modules express their integrands through
columns of D.
"""

from __future__ import annotations

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])
ID2 = np.eye(2, dtype=complex)


def rotation_matrix(axis: np.ndarray, psi: float) -> np.ndarray:
    """Toggling-frame rotation D(axis, -psi) as a 3x3 orthogonal matrix.

    Rodrigues form for the rotation by -psi about the unit vector `axis`:
    D = cos(psi) I + (1 - cos(psi)) a a^T - sin(psi) [a]_x. Applied to the
    noise vector eta it yields the toggled coupling; its third column is the
    pure-dephasing integrand.

    Parameters
    ----------
    axis : array_like, shape (3,)
        Unit rotation axis.
    psi : float
        Accumulated rotation angle in radians.
    """
    a = np.asarray(axis, dtype=float)
    c = np.cos(psi)
    s = np.sin(psi)
    cross = np.array([[0.0, -a[2], a[1]], [a[2], 0.0, -a[0]], [-a[1], a[0], 0.0]])
    return c * np.eye(3) + (1.0 - c) * np.outer(a, a) - s * cross


def rotated_noise(axis: np.ndarray, psi: float, eta: np.ndarray) -> np.ndarray:
    """Noise vector seen in the toggling frame, n = D(axis, -psi) eta."""
    a = np.asarray(axis, dtype=float)
    eta = np.asarray(eta, dtype=float)
    c = np.cos(psi)
    s = np.sin(psi)
    return c * eta + (1.0 - c) * a * (a @ eta) - s * np.cross(a, eta)


def su2_rotation(axis: np.ndarray, psi: float) -> np.ndarray:
    """2x2 unitary exp(-i sigma.axis psi/2) for the same rotation."""
    a = np.asarray(axis, dtype=float)
    return np.cos(psi / 2.0) * ID2 - 1.0j * np.sin(psi / 2.0) * (
        a[0] * SIGMA_X + a[1] * SIGMA_Y + a[2] * SIGMA_Z
    )


def axis_from_angles(phi: float, theta: float) -> np.ndarray:
    """Unit axis from azimuth phi and polar angle theta."""
    return np.array(
        [np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]
    )


def angles_from_axis(axis: np.ndarray) -> tuple[float, float]:
    """Inverse of axis_from_angles; phi in (-pi, pi], theta in [0, pi].

    Away from theta in {0, pi} the two maps are mutually inverse; at the poles
    phi is returned as 0 by convention.
    """
    a = np.asarray(axis, dtype=float)
    theta = float(np.arccos(np.clip(a[2], -1.0, 1.0)))
    phi = float(np.arctan2(a[1], a[0]))
    return phi, theta


def quat_columns(w: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Columns of D for a batch of unit quaternions (w, r) representing
    exp(-i sigma.r_hat psi/2) with w = cos(psi/2), r = sin(psi/2) r_hat.

    Returns an array of shape (n, 3, 3); [:, :, alpha] is the toggled image of
    the lab basis vector e_alpha, the integrand of every moment integral.
    """
    w = np.asarray(w, dtype=float)
    r = np.asarray(r, dtype=float)
    n = w.shape[0]
    out = np.empty((n, 3, 3))
    ww = w * w
    rr = np.einsum("ij,ij->i", r, r)
    diag = ww - rr
    for col in range(3):
        e = np.zeros(3)
        e[col] = 1.0
        cross = np.cross(r, e)
        out[:, :, col] = (
            diag[:, None] * e[None, :]
            + 2.0 * r * r[:, col][:, None]
            - 2.0 * w[:, None] * cross
        )
    return out


# Printed-convention sign map for the leading moment vector: the first-order
# residuals are quoted with a positive sin-psi component, while the faithful
# toggled z-column carries (-sin psi, 0, cos psi) for the y-axis family.
_ORDER1_SIGNS = np.array([-1.0, 1.0, 1.0])


def magnus_term(order: int, trajectory, noise, g1: float = 0.0) -> np.ndarray:
    """Pauli coefficient vector of the order-n average-Hamiltonian term.

    For a pulse of physical duration tau_p and a classical noise model with
    cylindrical symmetry, returns the 3-vector m_n such that the ensemble-
    averaged toggling-frame evolution contributes exp(-i sigma . m_n) at this
    order. The normalized moment integrals scale with tau_p^order, so short
    pulses suppress every term accordingly.

    order 1 uses the mean eta_bar_z; order 2 the second moments; order 3 is a
    diagnostic that assumes Gaussian factorization of the third moments, with
    the optional autocorrelation cusp slope g1 = d<eta(0) eta(dt)>/d|dt| taken
    with respect to the normalized time dt / tau_p.

    The order-1 vector follows the printed residual convention (positive
    sin-psi component); orders 2 and 3 are faithful to the cross-product form.
    """
    from . import conditions

    spec = getattr(trajectory, "spec", trajectory)
    scale = spec.tau_p**order
    if order == 1:
        first = conditions.moment_integrals(trajectory).first
        return scale * noise.eta_bar_z * (_ORDER1_SIGNS * first[:, 2])
    if order == 2:
        kvec = conditions.moment_integrals(trajectory).second
        transverse = noise.s_x2 * (kvec[:, 0] + kvec[:, 1])
        longitudinal = (noise.eta_bar_z**2 + noise.s_z2) * kvec[:, 2]
        return scale * (transverse + longitudinal)
    if order == 3:
        t0, t1 = conditions.third_moment_integrals(trajectory)
        gaussian = noise.eta_bar_z**3 + 3.0 * noise.eta_bar_z * noise.s_z2
        return scale * (2.0 / 3.0) * (gaussian * t0 + noise.eta_bar_z * g1 * t1)
    raise ValueError(f"order must be 1, 2 or 3, got {order!r}")
