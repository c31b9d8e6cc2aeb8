"""Design conditions: toggled-frame moment integrals and the residual systems
whose roots are noise-compensating pulses.

First moments are columns C_alpha = int c_alpha dt of the toggled basis
images; second moments are the time-ordered cross products
K_alpha = int_{t2<t1} c_alpha(t1) x c_alpha(t2). A pulse cancels static
dephasing to first order when C_z = 0 and to second order when additionally
K_z = 0; the general-decoherence family further zeroes K_x + K_y.

The double integrals are evaluated panel-by-panel with the 61-point
Gauss-Kronrod pair: per panel, partial inner integrals are taken at every
outer node (61 x 61 samples); panels are bisected worst-first until the
summed embedded error estimate meets the target. The y-axis amplitude
families additionally have per-segment closed forms used by the fast
residual path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from ._gk61 import GAUSS_SLICE, GAUSS_WEIGHTS, GK_WEIGHTS
from .numerics import QuadraturePolicy, panel_nodes
from .pulses import (
    CompositeFmSpec,
    ContinuousAmSpec,
    FmSpec,
    PiecewiseAmSpec,
    PulseSpec,
    psi_am,
)
from .trajectory import (
    RotationTrajectory,
    _plane_control,
    columns_at,
    sample_quaternions,
)

MOMENT_POLICY = QuadraturePolicy(target=1e-12, max_panels=512)


@dataclass(frozen=True)
class Moments:
    """First and second toggled-frame moment integrals, units tau_p = 1.

    first[:, alpha] is C_alpha; second[:, alpha] is K_alpha. `error` is the
    summed embedded quadrature estimate actually reached.
    """

    first: np.ndarray
    second: np.ndarray
    panels: int
    error: float


def _seed_boundaries(spec: PulseSpec) -> list[float]:
    pts = {0.0, spec.duration}
    if isinstance(spec, PiecewiseAmSpec):
        pts.update(spec.instants)
    base = spec.base if isinstance(spec, CompositeFmSpec) else spec
    if isinstance(base, FmSpec) and base.tau_s > 0.0:
        pts.update((base.tau_s, 1.0 - base.tau_s))
        if isinstance(spec, CompositeFmSpec):
            pts.update((1.0 + base.tau_s, 2.0 - base.tau_s))
    if isinstance(spec, CompositeFmSpec):
        pts.add(1.0)
    boundaries = sorted(p for p in pts if 0.0 <= p <= spec.duration)
    # fill to at least 4 panels per unit time so the first error estimates
    # are already meaningful
    filled = [boundaries[0]]
    for a, b in zip(boundaries, boundaries[1:]):
        n = max(1, int(math.ceil((b - a) * 4.0)))
        filled.extend(a + (b - a) * k / n for k in range(1, n + 1))
    return filled


def _panel_measure(spec: PulseSpec, a: float, b: float):
    """(first-moment integral, ordered-cross self term, error) on [a, b].

    The self term is int_a^b c(t1) x int_a^{t1} c(t2) dt2 dt1, column by
    column; the prefix from [0, a) is attached during assembly.
    """
    outer = panel_nodes(a, b)
    inner = np.empty((61, 61))
    for j in range(61):
        inner[j] = panel_nodes(a, outer[j])
    cols = columns_at(spec, np.concatenate([outer, inner.ravel()]))
    c_out = cols[:61]
    c_in = cols[61:].reshape(61, 61, 3, 3)
    half_in = 0.5 * (outer - a)
    partial = half_in[:, None, None] * np.einsum("k,jkca->jca", GK_WEIGHTS, c_in)
    crossed = np.cross(np.transpose(c_out, (0, 2, 1)), np.transpose(partial, (0, 2, 1)))
    half = 0.5 * (b - a)
    first_k = half * np.einsum("j,jca->ca", GK_WEIGHTS, c_out)
    self_k = half * np.einsum("j,jac->ca", GK_WEIGHTS, crossed)
    first_g = half * np.einsum("j,jca->ca", GAUSS_WEIGHTS, c_out[GAUSS_SLICE])
    self_g = half * np.einsum("j,jac->ca", GAUSS_WEIGHTS, crossed[GAUSS_SLICE])
    err = max(
        float(np.max(np.abs(first_k - first_g))), float(np.max(np.abs(self_k - self_g)))
    )
    return first_k, self_k, err


def moment_integrals(
    source: RotationTrajectory | PulseSpec, policy: QuadraturePolicy = MOMENT_POLICY
) -> Moments:
    """Adaptive first and second moments for a pulse or its trajectory.

    Trajectory inputs cache the result; the quadrature samples its own nodes,
    so the trajectory's sample grid plays no role in the accuracy.
    """
    cache = None
    if isinstance(source, RotationTrajectory):
        cache = source._cache
        key = ("moments", policy.target)
        if key in cache:
            return cache[key]
        spec = source.spec
    else:
        spec = source

    edges = _seed_boundaries(spec)
    panels = []
    for a, b in zip(edges, edges[1:]):
        first, self_term, err = _panel_measure(spec, a, b)
        panels.append([err, a, b, first, self_term])
    total_err = sum(p[0] for p in panels)
    while total_err > policy.target:
        if len(panels) >= policy.max_panels:
            raise RuntimeError(
                f"moment quadrature did not reach {policy.target:g} within "
                f"{policy.max_panels} panels (error {total_err:g})"
            )
        worst = max(range(len(panels)), key=lambda i: panels[i][0])
        err0, a, b, _, _ = panels.pop(worst)
        total_err -= err0
        mid = 0.5 * (a + b)
        for lo, hi in ((a, mid), (mid, b)):
            first, self_term, err = _panel_measure(spec, lo, hi)
            panels.append([err, lo, hi, first, self_term])
            total_err += err
    panels.sort(key=lambda p: p[1])

    first_total = np.zeros((3, 3))
    second_total = np.zeros((3, 3))
    prefix = np.zeros((3, 3))
    for err, a, b, first, self_term in panels:
        second_total += self_term
        for alpha in range(3):
            second_total[:, alpha] += np.cross(first[:, alpha], prefix[:, alpha])
        prefix += first
        first_total += first
    result = Moments(
        first=first_total, second=second_total, panels=len(panels), error=total_err
    )
    if cache is not None:
        cache[key] = result
    return result


# ---------------------------------------------------------------------------
# Third-order diagnostic integrals


def _control_vector(spec: PulseSpec, t: float) -> np.ndarray:
    mag, om, _ = _plane_control(spec, t)
    return np.array([mag * math.cos(om), mag * math.sin(om), 0.0])


def third_moment_integrals(
    source: RotationTrajectory | PulseSpec, column: int = 2
) -> tuple[np.ndarray, np.ndarray]:
    """Ordered triple integrals behind the third Magnus term, for one column.

    Returns (T0, T1): T0 is the plain ordered integral of
    h1 x (h2 x h3) + h3 x (h2 x h1) over t3 < t2 < t1 with h_i = c(t_i);
    T1 carries the extra pair-distance weight 2 (t1 - t3) that multiplies the
    leading correlation-decay correction. Both are computed in one augmented
    ODE sweep alongside the propagator quaternion.
    """
    spec = source.spec if isinstance(source, RotationTrajectory) else source
    e = np.zeros(3)
    e[column] = 1.0

    def rhs(t, y):
        w = y[0]
        r = y[1:4]
        v = _control_vector(spec, t)
        dq = np.empty(4)
        dq[0] = -v @ r
        dq[1:4] = w * v + np.cross(v, r)
        c = (w * w - r @ r) * e + 2.0 * r * r[column] - 2.0 * w * np.cross(r, e)
        G = y[4:7]
        M = y[7:10]
        B = y[10:19].reshape(3, 3)
        beta = y[19]
        Gp = y[20:23]
        Mp = y[23:26]
        Bp = y[26:35].reshape(3, 3)
        betap = y[35]
        core = np.cross(c, M) + B @ c - beta * c
        core_p = np.cross(c, Mp) + Bp @ c - betap * c
        out = np.empty(42)
        out[0:4] = dq
        out[4:7] = c
        out[7:10] = np.cross(c, G)
        out[10:19] = np.outer(c, G).ravel()
        out[19] = G @ c
        out[20:23] = t * c
        out[23:26] = np.cross(c, Gp)
        out[26:35] = np.outer(c, Gp).ravel()
        out[35] = Gp @ c
        out[36:39] = core
        out[39:42] = 2.0 * t * core - 2.0 * core_p
        return out

    y0 = np.zeros(42)
    y0[0] = 1.0
    sol = solve_ivp(
        rhs, (0.0, spec.duration), y0, method="DOP853", rtol=1e-11, atol=1e-12
    )
    if not sol.success:
        raise RuntimeError(f"third-moment integration failed: {sol.message}")
    y = sol.y[:, -1]
    return y[36:39].copy(), y[39:42].copy()


# ---------------------------------------------------------------------------
# Residual components


def boundary_residuals(spec: PulseSpec, theta: float) -> np.ndarray:
    """(net angle - theta, z component of the final axis)."""
    if isinstance(spec, (PiecewiseAmSpec, ContinuousAmSpec)):
        # fixed equatorial axis: the angle closed form is exact and the axis
        # constraint holds identically
        psi_end = float(psi_am(spec, np.array([spec.duration]))[0])
        return np.array([_angle_gap(psi_end, theta), 0.0])
    q = sample_quaternions(spec, np.array([spec.duration]))[0]
    rn = float(np.linalg.norm(q[1:]))
    psi_end = 2.0 * math.atan2(rn, q[0])
    a_z = q[3] / rn if rn > 1e-12 else 0.0
    return np.array([_angle_gap(psi_end, theta), a_z])


def _angle_gap(psi: float, theta: float) -> float:
    """Signed distance from psi to theta modulo full turns."""
    delta = (psi - theta) % (2.0 * math.pi)
    if delta > math.pi:
        delta -= 2.0 * math.pi
    return delta


def _am_closed_moments(spec: PiecewiseAmSpec) -> tuple[float, float, float]:
    """(int sin psi, int cos psi, ordered double sin(psi1 - psi2)) in closed
    form; psi is piecewise linear so every segment integrates exactly."""
    bounds = np.array((0.0,) + spec.instants)
    ends = np.append(spec.instants, 1.0)
    rates = 2.0 * spec.v0 * np.array(spec.signs, dtype=float)  # d psi / dt
    int_sin = 0.0
    int_cos = 0.0
    mu2 = 0.0
    psi0 = 0.0
    for j in range(len(rates)):
        L = ends[j] - bounds[j]
        k = rates[j]
        psi1 = psi0 + k * L
        if abs(k) > 1e-300:
            seg_sin = (math.cos(psi0) - math.cos(psi1)) / k
            seg_cos = (math.sin(psi1) - math.sin(psi0)) / k
            seg_self = L / k - math.sin(k * L) / (k * k)
        else:
            seg_sin = math.sin(psi0) * L
            seg_cos = math.cos(psi0) * L
            seg_self = 0.0
        mu2 += seg_sin * int_cos - seg_cos * int_sin + seg_self
        int_sin += seg_sin
        int_cos += seg_cos
        psi0 = psi1
    return int_sin, int_cos, mu2


def residual_am_dephasing(spec: PiecewiseAmSpec | ContinuousAmSpec) -> np.ndarray:
    """Static-dephasing residuals for a y-axis pulse:
    [int sin psi, int cos psi, ordered double integral of sin(psi1 - psi2)].

    The first two must vanish for first-order cancellation, all three for
    second order. Piecewise pulses use exact per-segment forms; the smooth
    family goes through the generic moment engine (the toggled z column is
    (-sin psi, 0, cos psi), so the components map directly).
    """
    if isinstance(spec, PiecewiseAmSpec):
        return np.array(_am_closed_moments(spec))
    m = moment_integrals(spec)
    return np.array([-m.first[0, 2], m.first[2, 2], m.second[1, 2]])


def residual_fm_first(spec: PulseSpec, policy: QuadraturePolicy = MOMENT_POLICY) -> np.ndarray:
    """First-order dephasing residuals: the three components of C_z."""
    return moment_integrals(spec, policy).first[:, 2].copy()


def residual_fm_second_dephasing(
    spec: PulseSpec, policy: QuadraturePolicy = MOMENT_POLICY
) -> np.ndarray:
    """Second-order dephasing residuals: the three components of K_z."""
    return moment_integrals(spec, policy).second[:, 2].copy()


def residual_general_second(
    spec: PulseSpec, policy: QuadraturePolicy = MOMENT_POLICY
) -> np.ndarray:
    """Second-order residuals for cylindrically symmetric decoherence:
    the transverse sum K_x + K_y (3 components) followed by K_z (3),
    all with unit prefactors."""
    m = moment_integrals(spec, policy)
    return np.concatenate([m.second[:, 0] + m.second[:, 1], m.second[:, 2]])


# ---------------------------------------------------------------------------
# Square systems


def _pi_axis(spec: PulseSpec) -> np.ndarray:
    """Axis of the closing pi rotation for a time-symmetric FM pulse.

    The final frame map composed with a z-plane reflection is an exact pi
    rotation; its axis is read off the symmetric part of that product.
    """
    q = sample_quaternions(spec, np.array([spec.duration]))[0]
    from .kernel import quat_columns

    D = quat_columns(np.array([q[0]]), q[1:].reshape(1, 3))[0]
    G = D @ np.diag([-1.0, -1.0, 1.0])
    M = 0.5 * (G + np.eye(3))
    j = int(np.argmax(np.diag(M)))
    col = M[:, j]
    return col / math.sqrt(max(M[j, j], 1e-300))


@dataclass(frozen=True)
class SystemLayout:
    """Names a square residual system: which family, what order, which noise,
    and how the unknown vector maps onto spec parameters.

    mode "full" solves every moment component; mode "symmetric" restricts FM
    pulses to even (cosine) coefficients, where time symmetry makes most
    components vanish identically and the system collapses to the residuals
    along the closing-rotation axis.
    """

    family: str  # "fm" | "am-piecewise" | "am-continuous"
    order: int
    noise: str  # "dephasing" | "general"
    theta: float
    tau_s: float = 0.0
    mode: str = "full"
    n_coeffs: int = 0
    pinned: tuple[tuple[int, float], ...] = ()
    v0_pin: float | None = None  # hold the amplitude fixed, solve coefficients only

    def __post_init__(self):
        if self.family not in ("fm", "am-piecewise", "am-continuous"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.order not in (1, 2):
            raise ValueError("design order must be 1 or 2")
        if self.noise not in ("dephasing", "general"):
            raise ValueError(f"unknown noise class {self.noise!r}")
        if self.noise == "general" and (self.order != 2 or self.family != "fm"):
            raise ValueError("general-decoherence systems are second-order FM")
        if self.mode not in ("full", "symmetric"):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class DesignSystem:
    """Callable square system F(x) = 0 plus the unknown-vector bookkeeping."""

    layout: SystemLayout
    labels: tuple[str, ...]
    to_spec: Callable[[np.ndarray], PulseSpec]
    residual: Callable[[np.ndarray], np.ndarray]

    @property
    def size(self) -> int:
        return len(self.labels)


def _fm_spec_builder(layout: SystemLayout):
    if layout.mode == "symmetric":
        indices = tuple(2 * (k + 1) for k in range(layout.n_coeffs))
    else:
        indices = tuple(range(1, layout.n_coeffs + 1))
    pinned = tuple(layout.pinned)
    for i, _ in pinned:
        if i in indices:
            raise ValueError(f"pinned coefficient b{i} overlaps the unknowns")

    if layout.v0_pin is not None:

        def build(x: np.ndarray) -> FmSpec:
            coeffs = tuple(zip(indices, x)) + pinned
            return FmSpec(
                theta=layout.theta, v0=layout.v0_pin, coeffs=coeffs, tau_s=layout.tau_s
            )

        return build, tuple(f"b{i}" for i in indices)

    def build(x: np.ndarray) -> FmSpec:
        coeffs = tuple(zip(indices, x[1:])) + pinned
        return FmSpec(
            theta=layout.theta, v0=float(x[0]), coeffs=coeffs, tau_s=layout.tau_s
        )

    labels = ("v0",) + tuple(f"b{i}" for i in indices)
    return build, labels


def assemble_system(
    layout: SystemLayout, policy: QuadraturePolicy = MOMENT_POLICY
) -> DesignSystem:
    """The square residual system for a layout, sized residuals == unknowns.

    Component order: first moments, second moments, net angle, final axis.
    Raises ValueError when the unknown count cannot match the residual count.
    `policy` bounds the moment quadrature; solvers pass a capped policy so
    hopeless iterates fail fast instead of burning the full panel budget.
    """
    if layout.family == "fm":
        build, labels = _fm_spec_builder(layout)
        if layout.mode == "full":
            n_res = 3 + 2  # C_z, angle, axis
            if layout.order == 2:
                n_res += 3  # K_z
            if layout.noise == "general":
                n_res += 3  # K_x + K_y
        else:
            if layout.noise == "general":
                raise ValueError("the symmetric reduction covers dephasing only")
            n_res = 2 if layout.order == 1 else 4
        if len(labels) != n_res:
            raise ValueError(
                f"{len(labels)} unknowns against {n_res} residuals; "
                f"adjust n_coeffs or pin spares"
            )

        def residual(x: np.ndarray) -> np.ndarray:
            spec = build(np.asarray(x, dtype=float))
            m = moment_integrals(spec, policy)
            bound = boundary_residuals(spec, layout.theta)
            if layout.mode == "symmetric":
                axis = _pi_axis(spec)
                parts = [np.array([m.first[:, 2] @ axis])]
                if layout.order == 2:
                    u1 = np.cross(axis, np.array([0.0, 0.0, 1.0]))
                    u1 /= np.linalg.norm(u1)
                    u2 = np.cross(axis, u1)
                    parts.append(np.array([m.second[:, 2] @ u1, m.second[:, 2] @ u2]))
                parts.append(bound[:1])
                return np.concatenate(parts)
            parts = [m.first[:, 2]]
            if layout.noise == "general":
                parts.append(m.second[:, 0] + m.second[:, 1])
            if layout.order == 2:
                parts.append(m.second[:, 2])
            parts.append(bound)
            return np.concatenate(parts)

        return DesignSystem(layout=layout, labels=labels, to_spec=build, residual=residual)

    if layout.family == "am-piecewise":
        if layout.order != 2:
            raise ValueError("the piecewise layout solves the second-order system")
        labels = ("tau1", "tau2", "v0")

        def build_pw(x: np.ndarray) -> PiecewiseAmSpec:
            t1, t2, v0 = float(x[0]), float(x[1]), float(x[2])
            return PiecewiseAmSpec(
                theta=layout.theta,
                v0=v0,
                instants=(t1, t2, 1.0 - t2, 1.0 - t1),
                signs=(1, -1, 1, -1, 1),
            )

        def residual_pw(x: np.ndarray) -> np.ndarray:
            spec = build_pw(np.asarray(x, dtype=float))
            int_sin, _, mu2 = _am_closed_moments(spec)
            psi_end = float(psi_am(spec, np.array([1.0]))[0])
            return np.array([int_sin, mu2, _angle_gap(psi_end, layout.theta)])

        return DesignSystem(
            layout=layout, labels=labels, to_spec=build_pw, residual=residual_pw
        )

    # smooth amplitude family: the angle constraint is structural, the two
    # cosine amplitudes chase the two remaining residuals
    if layout.order != 2:
        raise ValueError("the smooth-amplitude layout solves the second-order system")
    labels = ("a", "b")

    def build_cont(x: np.ndarray) -> ContinuousAmSpec:
        return ContinuousAmSpec(theta=layout.theta, a=float(x[0]), b=float(x[1]))

    def residual_cont(x: np.ndarray) -> np.ndarray:
        spec = build_cont(np.asarray(x, dtype=float))
        res = residual_am_dephasing(spec)
        return np.array([res[0], res[2]])

    return DesignSystem(
        layout=layout, labels=labels, to_spec=build_cont, residual=residual_cont
    )


# ---------------------------------------------------------------------------
# Record checking


@dataclass(frozen=True)
class CheckReport:
    label: str
    components: dict[str, float]
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.tol


def design_residual_components(spec: PulseSpec, order: int, noise: str) -> dict[str, float]:
    """Named residual values a designed pulse is supposed to zero."""
    comps: dict[str, float] = {}
    base = spec.base if isinstance(spec, CompositeFmSpec) else spec
    if isinstance(base, (PiecewiseAmSpec, ContinuousAmSpec)):
        int_sin, int_cos, mu2 = residual_am_dephasing(base)
        comps["first_sin"] = int_sin
        comps["first_cos"] = int_cos
        if order >= 2:
            comps["second"] = mu2
        bound = boundary_residuals(base, base.theta)
        comps["angle"] = bound[0]
        return comps
    m = moment_integrals(spec)
    theta = spec.theta  # a composite reports the doubled net angle
    for name, val in zip(("first_x", "first_y", "first_z"), m.first[:, 2]):
        comps[name] = float(val)
    if order >= 2:
        for name, val in zip(("second_x", "second_y", "second_z"), m.second[:, 2]):
            comps[name] = float(val)
        if noise == "general":
            kxy = m.second[:, 0] + m.second[:, 1]
            for name, val in zip(("second_xy_x", "second_xy_y", "second_xy_z"), kxy):
                comps[name] = float(val)
    bound = boundary_residuals(spec, theta)
    comps["angle"] = float(bound[0])
    comps["axis"] = float(bound[1])
    return comps


def check_record(record) -> CheckReport:
    comps = design_residual_components(record.spec, record.order, record.noise)
    worst = max(abs(v) for v in comps.values())
    return CheckReport(
        label=record.label, components=comps, worst=worst, tol=record.check_tol
    )
