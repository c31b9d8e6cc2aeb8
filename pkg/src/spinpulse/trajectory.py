"""Control-only propagation: quaternion sweeps, the rotated-frame columns
they induce, and the spherical-angle chart used for cross-checks and dumps.

The y-axis amplitude families have analytic propagators (fixed rotation
axis); the FM families are integrated by the compiled adaptive RK4 sweep.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _fast
from .kernel import axis_from_angles, quat_columns, su2_rotation
from .pulses import (
    CompositeFmSpec,
    ContinuousAmSpec,
    FmSpec,
    PiecewiseAmSpec,
    PulseSpec,
    omega_fm,
    omega_fm_rate,
    psi_am,
)


def _fm_params(spec: FmSpec | CompositeFmSpec):
    base = spec.base if isinstance(spec, CompositeFmSpec) else spec
    idx = np.array([i for i, _ in base.coeffs], dtype=np.int64)
    val = np.array([v for _, v in base.coeffs], dtype=np.float64)
    return base.v0, base.tau_s, idx, val, isinstance(spec, CompositeFmSpec)


def sample_quaternions(spec: PulseSpec, times: np.ndarray) -> np.ndarray:
    """Propagator quaternions (w, r_x, r_y, r_z) at the given times
    (normalized units, ascending order not required)."""
    times = np.asarray(times, dtype=float)
    if times.size and (times.min() < -1e-12 or times.max() > spec.duration + 1e-12):
        raise ValueError("sample time outside the pulse interval")
    times = np.clip(times, 0.0, spec.duration)

    if isinstance(spec, (PiecewiseAmSpec, ContinuousAmSpec)):
        half = 0.5 * psi_am(spec, times)
        quats = np.zeros((times.size, 4))
        quats[:, 0] = np.cos(half)
        quats[:, 2] = np.sin(half)
        return quats

    order = np.argsort(times, kind="stable")
    v0, tau_s, idx, val, composite = _fm_params(spec)
    swept = _fast.fm_quaternion_sweep(times[order], v0, tau_s, idx, val, composite)
    out = np.empty_like(swept)
    out[order] = swept
    return out


def columns_at(spec: PulseSpec, times: np.ndarray) -> np.ndarray:
    """Rotated-frame basis images: stack of 3x3 matrices whose column alpha is
    the frame image of e_alpha at each time."""
    q = sample_quaternions(spec, times)
    q = q / np.linalg.norm(q, axis=1)[:, None]
    return quat_columns(q[:, 0], q[:, 1:])


@dataclass
class RotationTrajectory:
    """Sampled control-only propagator plus a cache for derived integrals."""

    spec: PulseSpec
    times: np.ndarray
    quats: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def duration(self) -> float:
        return self.spec.duration

    def columns(self) -> np.ndarray:
        q = self.quats / np.linalg.norm(self.quats, axis=1)[:, None]
        return quat_columns(q[:, 0], q[:, 1:])

    def unitaries(self) -> np.ndarray:
        """SU(2) propagators at the sample times, shape (n, 2, 2)."""
        w = self.quats[:, 0]
        r = self.quats[:, 1:]
        out = np.empty((len(w), 2, 2), dtype=complex)
        out[:, 0, 0] = w - 1j * r[:, 2]
        out[:, 0, 1] = -r[:, 1] - 1j * r[:, 0]
        out[:, 1, 0] = r[:, 1] - 1j * r[:, 0]
        out[:, 1, 1] = w + 1j * r[:, 2]
        return out

    def spherical(self) -> np.ndarray:
        return quat_to_spherical(self.quats)

    def norm_drift(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.quats, axis=1) - 1.0)))


def propagate(spec: PulseSpec, times: np.ndarray | None = None, n_samples: int = 513) -> RotationTrajectory:
    if times is None:
        times = np.linspace(0.0, spec.duration, n_samples)
    times = np.asarray(times, dtype=float)
    return RotationTrajectory(spec=spec, times=times, quats=sample_quaternions(spec, times))


def quat_to_spherical(quats: np.ndarray) -> np.ndarray:
    """Principal-chart angles (psi, phi, theta) per sample: rotation angle in
    [0, 2 pi) and the axis direction; where the angle vanishes the previous
    axis is carried forward (x-axis before any rotation has happened)."""
    w = quats[:, 0]
    r = quats[:, 1:]
    rn = np.linalg.norm(r, axis=1)
    psi = 2.0 * np.arctan2(rn, w)
    out = np.empty((len(w), 3))
    out[:, 0] = psi
    phi_prev, theta_prev = 0.0, math.pi / 2.0
    for k in range(len(w)):
        if rn[k] > 1e-12:
            axis = r[k] / rn[k]
            phi_prev = math.atan2(axis[1], axis[0]) if abs(axis[2]) < 1.0 else 0.0
            theta_prev = math.acos(min(1.0, max(-1.0, axis[2])))
        out[k, 1] = phi_prev
        out[k, 2] = theta_prev
    return out


def _plane_control(spec: PulseSpec, t: float) -> tuple[float, float, float]:
    """(magnitude, phase, phase rate) of the in-plane control at time t.

    The y-axis families reduce to a phase of +-pi/2 with zero rate, so the
    spherical chart below covers every family uniformly.
    """
    if isinstance(spec, CompositeFmSpec):
        if t > 1.0:
            u = 2.0 - t
            base = spec.base
            mag = base.v0 * float(_fast._fm_envelope(u, base.tau_s))
            return mag, float(omega_fm(base, u)), -float(omega_fm_rate(base, u))
        spec = spec.base
    if isinstance(spec, FmSpec):
        mag = spec.v0 * float(_fast._fm_envelope(t, spec.tau_s))
        return mag, float(omega_fm(spec, t)), float(omega_fm_rate(spec, t))
    if isinstance(spec, PiecewiseAmSpec):
        seg = int(np.searchsorted(np.array(spec.instants), t, side="right"))
        vy = spec.v0 * spec.signs[min(seg, len(spec.signs) - 1)]
    else:
        c1, c2, c3 = spec.cosine_coefficients()
        w = 2.0 * math.pi * t
        vy = spec.theta / 2.0 + c1 * math.cos(w) + c2 * math.cos(2.0 * w) + c3 * math.cos(3.0 * w)
    return abs(vy), math.copysign(math.pi / 2.0, vy), 0.0


def derivatives_spherical(spec: PulseSpec, t: float, state: np.ndarray) -> np.ndarray:
    """Right-hand side of the rotation flow in (psi, phi, theta) chart form.

    psi is the rotation angle, (phi, theta) the axis direction. The chart is
    singular at psi = 0; there the limiting rates apply (the axis locks to
    the control direction and tracks half its phase rate).
    """
    psi, phi, theta = state
    mag, om, om_rate = _plane_control(spec, t)
    if psi < 1e-9:
        return np.array([2.0 * mag * math.sin(theta) * math.cos(om - phi), 0.5 * om_rate, 0.0])
    half = 0.5 * psi
    ch, sh = math.cos(half), math.sin(half)
    delta = om - phi
    dpsi = 2.0 * mag * math.sin(theta) * math.cos(delta)
    dphi = mag * (ch * math.sin(delta) - sh * math.cos(theta) * math.cos(delta)) / (
        sh * math.sin(theta)
    )
    dtheta = mag * (ch * math.cos(theta) * math.cos(delta) + sh * math.sin(delta)) / sh
    return np.array([dpsi, dphi, dtheta])


def spherical_initial_state() -> np.ndarray:
    """Chart state just after t = 0: no net rotation yet, axis along x."""
    return np.array([0.0, 0.0, math.pi / 2.0])


def reinsert(state: np.ndarray) -> np.ndarray:
    """SU(2) element named by a chart state (psi, phi, theta)."""
    psi, phi, theta = state
    return su2_rotation(axis_from_angles(phi, theta), psi)


def trajectory_table(spec: PulseSpec, n_samples: int = 1000) -> str:
    """Delimiter-separated dump: t, psi, phi, theta, a_x, a_y, a_z."""
    traj = propagate(spec, n_samples=n_samples)
    sph = traj.spherical()
    rows = ["# t\tpsi\tphi\ttheta\ta_x\ta_y\ta_z"]
    for k, t in enumerate(traj.times):
        axis = axis_from_angles(sph[k, 1], sph[k, 2])
        rows.append(
            "\t".join(
                f"{x:.12g}"
                for x in (t * spec.tau_p, sph[k, 0], sph[k, 1], sph[k, 2], *axis)
            )
        )
    return "\n".join(rows) + "\n"
