"""Compiled inner loops: adaptive quaternion propagation for the FM families
and exact slice-product unitaries for noise-averaged simulation.

Everything here takes plain arrays so numba can cache the compilations; the
pulse-spec unpacking lives in trajectory.py and verify.py.
"""

import math

import numpy as np
from numba import njit, prange

_STEP_TOL = 1e-13
_MIN_STEP = 1e-12


@njit(cache=True)
def _fm_phase(t, cidx, cval):
    om = 0.0
    for k in range(cidx.size):
        n = (cidx[k] + 1) // 2
        arg = 2.0 * math.pi * n * t
        if cidx[k] % 2 == 1:
            om += cval[k] * math.sin(arg)
        else:
            om += cval[k] * (math.cos(arg) - 1.0)
    return om


@njit(cache=True)
def _fm_envelope(t, tau_s):
    if tau_s <= 0.0:
        return 1.0
    if t < tau_s:
        s = math.sin(0.5 * math.pi * t / tau_s)
        return s * s
    if t > 1.0 - tau_s:
        s = math.sin(0.5 * math.pi * (1.0 - t) / tau_s)
        return s * s
    return 1.0


@njit(cache=True)
def _fm_control(t, v0, tau_s, cidx, cval, composite):
    # The second half of a composite replays the first backwards; the
    # envelope is mirror-symmetric so a single reflected argument serves
    # both the phase and the envelope.
    u = 2.0 - t if (composite and t > 1.0) else t
    om = _fm_phase(u, cidx, cval)
    mag = v0 * _fm_envelope(u, tau_s)
    return mag * math.cos(om), mag * math.sin(om)


@njit(cache=True)
def _quat_rhs(t, q, v0, tau_s, cidx, cval, composite):
    vx, vy = _fm_control(t, v0, tau_s, cidx, cval, composite)
    w, rx, ry, rz = q[0], q[1], q[2], q[3]
    out = np.empty(4)
    out[0] = -(vx * rx + vy * ry)
    out[1] = w * vx + vy * rz
    out[2] = w * vy - vx * rz
    out[3] = vx * ry - vy * rx
    return out


@njit(cache=True)
def _rk4(t, q, h, v0, tau_s, cidx, cval, composite):
    k1 = _quat_rhs(t, q, v0, tau_s, cidx, cval, composite)
    k2 = _quat_rhs(t + 0.5 * h, q + 0.5 * h * k1, v0, tau_s, cidx, cval, composite)
    k3 = _quat_rhs(t + 0.5 * h, q + 0.5 * h * k2, v0, tau_s, cidx, cval, composite)
    k4 = _quat_rhs(t + h, q + h * k3, v0, tau_s, cidx, cval, composite)
    return q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True)
def fm_quaternion_sweep(times, v0, tau_s, cidx, cval, composite):
    """Propagator quaternions (w, r) at ascending sample times.

    Classic step-doubled RK4 with local extrapolation; the sweep stops
    exactly at every sample time and at the composite midpoint, where the
    phase rate flips sign.
    """
    out = np.empty((times.size, 4))
    q = np.zeros(4)
    q[0] = 1.0
    t = 0.0
    h = 1e-3
    for i in range(times.size):
        target = times[i]
        while target - t > 1e-14:
            hstep = h if h < target - t else target - t
            clipped = hstep < h
            if composite and t < 1.0 and t + hstep > 1.0:
                hstep = 1.0 - t
                clipped = True
            full = _rk4(t, q, hstep, v0, tau_s, cidx, cval, composite)
            half = _rk4(t, q, 0.5 * hstep, v0, tau_s, cidx, cval, composite)
            half = _rk4(t + 0.5 * hstep, half, 0.5 * hstep, v0, tau_s, cidx, cval, composite)
            err = 0.0
            for j in range(4):
                e = abs(full[j] - half[j])
                if e > err:
                    err = e
            if err < _STEP_TOL or hstep < _MIN_STEP:
                t += hstep
                for j in range(4):
                    q[j] = half[j] + (half[j] - full[j]) / 15.0
                if not clipped:
                    if err > 0.0:
                        fac = 0.9 * (_STEP_TOL / err) ** 0.2
                        if fac > 2.0:
                            fac = 2.0
                        h = hstep * fac
                    else:
                        h = hstep * 2.0
            else:
                fac = 0.9 * (_STEP_TOL / err) ** 0.2
                if fac < 0.1:
                    fac = 0.1
                h = hstep * fac
        out[i, 0] = q[0]
        out[i, 1] = q[1]
        out[i, 2] = q[2]
        out[i, 3] = q[3]
    return out


# ---------------------------------------------------------------------------
# Exact slice products for noise-averaged simulation


@njit(cache=True)
def _slice_product(vmid, dt, ex, ey, ez, per_slice_ez):
    """Time-ordered product of exact 2x2 exponentials over uniform slices.

    The noise is either a constant vector (ex, ey, ez) or, when per_slice_ez
    is non-empty, a per-slice z component added on top of ez.
    """
    u00 = 1.0 + 0.0j
    u01 = 0.0 + 0.0j
    u10 = 0.0 + 0.0j
    u11 = 1.0 + 0.0j
    n = vmid.shape[0]
    for k in range(n):
        cx = vmid[k, 0] + ex
        cy = vmid[k, 1] + ey
        cz = vmid[k, 2] + ez
        if per_slice_ez.size > 0:
            cz += per_slice_ez[k]
        norm = math.sqrt(cx * cx + cy * cy + cz * cz)
        phi = norm * dt
        c = math.cos(phi)
        if norm > 0.0:
            s = math.sin(phi) / norm
        else:
            s = dt
        nx = s * cx
        ny = s * cy
        nz = s * cz
        m00 = c - 1j * nz
        m01 = -ny - 1j * nx
        m10 = ny - 1j * nx
        m11 = c + 1j * nz
        t00 = m00 * u00 + m01 * u10
        t01 = m00 * u01 + m01 * u11
        t10 = m10 * u00 + m11 * u10
        t11 = m10 * u01 + m11 * u11
        u00, u01, u10, u11 = t00, t01, t10, t11
    out = np.empty((2, 2), dtype=np.complex128)
    out[0, 0] = u00
    out[0, 1] = u01
    out[1, 0] = u10
    out[1, 1] = u11
    return out


_EMPTY = np.empty(0)


@njit(cache=True)
def slice_unitary(vmid, dt, ex, ey, ez):
    """Single propagator under a static noise vector."""
    return _slice_product(vmid, dt, ex, ey, ez, _EMPTY)


@njit(cache=True, parallel=True)
def ensemble_static(vmid, dt, eta_vecs):
    """Propagators for a batch of static noise vectors, shape (npaths, 3)."""
    npaths = eta_vecs.shape[0]
    out = np.empty((npaths, 2, 2), dtype=np.complex128)
    for p in prange(npaths):
        out[p] = _slice_product(
            vmid, dt, eta_vecs[p, 0], eta_vecs[p, 1], eta_vecs[p, 2], _EMPTY
        )
    return out


@njit(cache=True, parallel=True)
def ensemble_dephasing_paths(vmid, dt, eta_z_paths):
    """Propagators for per-slice z-noise realizations, shape (npaths, nslices)."""
    npaths = eta_z_paths.shape[0]
    out = np.empty((npaths, 2, 2), dtype=np.complex128)
    for p in prange(npaths):
        out[p] = _slice_product(vmid, dt, 0.0, 0.0, 0.0, eta_z_paths[p])
    return out
