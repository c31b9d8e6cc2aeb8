"""Driving the design systems: synthesis from warm or seeded cold starts,
amplitude minimization over one spare Fourier coefficient, and the
forward-plus-reversed composite.

All solves run against a panel-capped quadrature policy so that hopeless
iterates fail in bounded time; the residue gate of the root finder is
unchanged, so reported solutions are exactly as accurate as with the
default policy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .conditions import (
    DesignSystem,
    SystemLayout,
    _angle_gap,
    assemble_system,
    check_record,
    design_residual_components,
    moment_integrals,
    residual_general_second,
)
from .numerics import (
    MinimizeResult,
    QuadraturePolicy,
    SolverConfig,
    SpareScan,
    find_root,
    minimize_amplitude,
)
from .pulses import CompositeFmSpec, FmSpec, PulseRecord, time_reverse
from .trajectory import sample_quaternions

# Enough headroom for every published design (worst observed: 60 panels);
# iterates needing more than 192 panels are far outside the useful region.
SOLVER_POLICY = QuadraturePolicy(target=1e-12, max_panels=192)

# Published coefficients stay below |b| = 2 and amplitudes below 11; the box
# is generous around that. Outside it the residual turns into a penalty so
# the root search gives up on runaway starts quickly.
V0_BOX = (0.05, 25.0)
COEFF_BOX = 5.0
_PENALTY = 1e6

SCAN_CONFIG = SolverConfig(max_evals=600, seeds=(0, 1))

# Amplitudes of the published second-order counterpart designs that also
# cancel the quantum (operator-valued) part of the bath coupling. That bath
# class is out of scope here; the values serve only as comparison constants
# for the amplitude-ordering claim that classical designs get away with
# weaker driving.
QUANTUM_BATH_PI_AMPLITUDE = 10.707115
QUANTUM_BATH_PI2_AMPLITUDE = 8.435414


def _box_excess(system: DesignSystem, x: np.ndarray) -> float:
    """How far an iterate sits outside the useful parameter region."""
    family = system.layout.family
    if family == "fm":
        coeffs = x
        excess = 0.0
        if system.labels[0] == "v0":
            v0 = abs(x[0])
            excess += max(0.0, V0_BOX[0] - v0) + max(0.0, v0 - V0_BOX[1])
            coeffs = x[1:]
        return excess + float(np.sum(np.maximum(np.abs(coeffs) - COEFF_BOX, 0.0)))
    if family == "am-piecewise":
        t1, t2, v0 = x
        gap = 1e-4  # strict interior margin for the mirrored instants
        excess = max(0.0, gap - t1) + max(0.0, t1 + gap - t2)
        excess += max(0.0, t2 - (0.5 - gap))
        excess += max(0.0, V0_BOX[0] - abs(v0)) + max(0.0, abs(v0) - V0_BOX[1])
        return excess
    return float(np.sum(np.maximum(np.abs(x) - 40.0, 0.0)))


def guarded_residual(system: DesignSystem):
    """Wrap a system residual so invalid or non-integrable iterates return a
    large finite penalty instead of raising mid-solve. The penalty grows with
    the box violation, giving the solver a slope back toward the region."""

    def residual(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        excess = _box_excess(system, x)
        if excess > 0.0:
            return np.full(system.size, _PENALTY * (1.0 + excess))
        try:
            return system.residual(x)
        except (ValueError, RuntimeError):
            return np.full(system.size, _PENALTY)

    return residual


@dataclass
class SynthesisResult:
    """One solved design system: the pulse record plus solver diagnostics."""

    record: PulseRecord
    x: np.ndarray
    residue: float
    success: bool
    nfev: int
    log: tuple[str, ...]


def _describe(layout: SystemLayout, system: DesignSystem) -> str:
    return (
        f"{layout.family} order {layout.order} {layout.noise} "
        f"theta {layout.theta:.6f} [{', '.join(system.labels)}]"
    )


def synthesize(
    layout: SystemLayout,
    x0: Sequence[float],
    config: SolverConfig = SolverConfig(),
    label: str = "synthesized",
) -> SynthesisResult:
    """Solve one square design system and package the result as a record."""
    system = assemble_system(layout, SOLVER_POLICY)
    x0 = np.asarray(x0, dtype=float)
    root = find_root(guarded_residual(system), x0, config)
    spec = system.to_spec(root.x)
    record = PulseRecord(
        label=label,
        spec=spec,
        order=layout.order,
        noise=layout.noise,
        provenance=f"solved to residue {root.residue:.2e} in {root.nfev} evaluations",
        role="synthesized",
    )
    verdict = "accepted" if root.success else "rejected"
    log = (
        "system " + _describe(layout, system),
        f"start {np.array2string(x0, precision=4, suppress_small=True)}",
        f"residue {root.residue:.2e} after {root.nfev} evaluations: {verdict}",
    )
    return SynthesisResult(record, root.x, root.residue, root.success, root.nfev, log)


def cold_starts(layout: SystemLayout, amplitudes: Sequence[float]) -> list[np.ndarray]:
    """Structure-free starting points: zero coefficients for FM, equispaced
    interior instants for the piecewise family, one amplitude guess each."""
    system = assemble_system(layout, SOLVER_POLICY)
    if layout.family == "fm":
        starts = []
        for v0 in amplitudes:
            x0 = np.zeros(system.size)
            x0[0] = v0
            starts.append(x0)
        return starts
    if layout.family == "am-piecewise":
        return [np.array([1.0 / 6.0, 1.0 / 3.0, v0]) for v0 in amplitudes]
    return [np.array([0.0, 0.0])]


def synthesize_cold(
    layout: SystemLayout,
    amplitudes: Sequence[float] = (2.0, 4.0, 6.0, 8.0),
    config: SolverConfig = SolverConfig(),
    label: str = "cold-start",
) -> SynthesisResult:
    """Synthesis with no prior coefficient knowledge.

    Tries each structure-free start in turn (the root finder adds its own
    seeded jitter around every start) and returns the first accepted
    solution; if none is accepted, the best rejected attempt comes back so
    the caller can inspect the residue.
    """
    if layout.v0_pin is not None:
        raise ValueError("cold starts solve for the amplitude; do not pin it")
    best: SynthesisResult | None = None
    attempts = []
    for x0 in cold_starts(layout, amplitudes):
        result = synthesize(layout, x0, config, label)
        attempts.append(
            f"start {np.array2string(x0, precision=3)}: residue {result.residue:.2e}"
        )
        if result.success:
            return replace(result, log=result.log + tuple(attempts))
        if best is None or result.residue < best.residue:
            best = result
    return replace(best, log=best.log + tuple(attempts))


# ---------------------------------------------------------------------------
# Amplitude minimization over a spare coefficient


def fm_minimize_pipeline(
    theta: float,
    noise: str = "dephasing",
    spares: Sequence[int] = (8, 10, 12, 14),
    bracket: tuple[float, float] = (-1.2, 0.8),
    x0: Sequence[float] | None = None,
    config: SolverConfig = SCAN_CONFIG,
    n_coarse: int = 9,
    spare_tol: float = 1e-6,
) -> MinimizeResult:
    """Smallest-amplitude second-order FM design over spare-coefficient scans.

    The square system leaves one Fourier coefficient beyond the necessary set
    as a scan parameter; each choice of that spare index is one scan, and the
    smallest |V0| over all scans wins. x0 seeds the first inner solve of
    every scan (zero coefficients at a mid-range amplitude by default) and
    the solves warm-start along each scan.
    """
    n_coeffs = 10 if noise == "general" else 7
    base = SystemLayout(
        family="fm", order=2, noise=noise, theta=theta, n_coeffs=n_coeffs
    )
    if x0 is None:
        start = np.zeros(n_coeffs + 1)
        start[0] = 8.0
    else:
        start = np.asarray(x0, dtype=float)

    def make_scan(spare_index: int) -> SpareScan:
        def solve_at(spare: float, warm_x: np.ndarray):
            layout = replace(base, pinned=((spare_index, float(spare)),))
            system = assemble_system(layout, SOLVER_POLICY)
            root = find_root(guarded_residual(system), warm_x, config)
            if not root.success:
                return math.inf, warm_x, root.residue
            return abs(float(root.x[0])), root.x, root.residue

        return SpareScan(
            label=f"b{spare_index}", solve_at=solve_at, bracket=bracket, x0=start
        )

    for idx in spares:
        if idx <= n_coeffs:
            raise ValueError(f"spare b{idx} overlaps the solved coefficients")
    return minimize_amplitude(
        [make_scan(i) for i in spares],
        config=config,
        n_coarse=n_coarse,
        spare_tol=spare_tol,
    )


def minimized_record(
    result: MinimizeResult, theta: float, noise: str, label: str
) -> PulseRecord:
    """Package a minimization result, re-deriving the pulse spec from its scan."""
    n_coeffs = 10 if noise == "general" else 7
    spare_index = int(result.label.lstrip("b"))
    layout = SystemLayout(
        family="fm",
        order=2,
        noise=noise,
        theta=theta,
        n_coeffs=n_coeffs,
        pinned=((spare_index, result.spare),),
    )
    spec = assemble_system(layout, SOLVER_POLICY).to_spec(result.x)
    return PulseRecord(
        label=label,
        spec=spec,
        order=2,
        noise=noise,
        provenance=(
            f"amplitude-minimized over spare {result.label}; "
            f"residue {result.residue:.2e}"
        ),
        role="synthesized",
    )


# ---------------------------------------------------------------------------
# Forward + time-reversed composite


@dataclass
class CompositeResult:
    """The doubled-duration pulse and the identities it was checked against."""

    record: PulseRecord
    angle_gap: float
    phase: float
    rotation_norm: float
    worst_dephasing: float
    reversed_worst: float
    transverse_cross: np.ndarray
    log: tuple[str, ...]


def compose_forward_reversed(
    base: PulseRecord, check_tol: float = 1e-4
) -> CompositeResult:
    """A pi pulse followed by its time-reversed replay.

    Over the doubled duration the pair winds through a net angle of 2 pi, so
    the noiseless composite is the identity up to a global phase of -1, and
    the dephasing moment integrals cancel through second order. Both halves
    individually satisfy the full general-decoherence system, but the
    transverse second moments of the two halves combine through an ordered
    cross term built from their (nonvanishing) transverse first moments, so
    that one combination survives; it is reported, not asserted away.
    """
    if not isinstance(base.spec, FmSpec):
        raise ValueError("the composite construction replays an FM pulse")
    if abs(base.spec.theta - math.pi) > 1e-12:
        raise ValueError("the composite construction needs a pi pulse")
    if base.noise != "general" or base.order != 2:
        raise ValueError("the base pulse must be a second-order general design")
    base_report = check_record(base)
    if base_report.worst > check_tol:
        raise ValueError(
            f"base pulse fails its own design check ({base_report.worst:.2e})"
        )
    reversed_worst = float(np.max(np.abs(residual_general_second(time_reverse(base.spec)))))

    spec = CompositeFmSpec(base=base.spec)
    q_end = sample_quaternions(spec, np.array([spec.duration]))[0]
    rotation_norm = float(np.linalg.norm(q_end[1:]))
    psi_end = 2.0 * math.atan2(rotation_norm, float(q_end[0]))
    angle_gap = _angle_gap(psi_end, 2.0 * math.pi)

    m = moment_integrals(spec)
    worst_dephasing = float(
        max(np.max(np.abs(m.first[:, 2])), np.max(np.abs(m.second[:, 2])))
    )
    transverse_cross = m.second[:, 0] + m.second[:, 1]

    record = PulseRecord(
        label=f"{base.label}-composite",
        spec=spec,
        order=2,
        noise="dephasing",
        provenance=(
            "forward plus time-reversed replay of a general-decoherence pi "
            "design; net angle 2 pi with global phase -1; dephasing moments "
            "cancel over the doubled duration, the transverse second moments "
            "keep an ordered cross-half term"
        ),
        role="composite",
    )
    log = (
        f"base {base.label}: worst residual {base_report.worst:.2e}",
        f"time-reversed half worst residual {reversed_worst:.2e}",
        f"net angle gap {angle_gap:.2e}, phase {float(q_end[0]):+.6f}",
        f"doubled-duration dephasing worst {worst_dephasing:.2e}",
        "surviving transverse second moment "
        + np.array2string(transverse_cross, precision=3),
    )
    return CompositeResult(
        record=record,
        angle_gap=float(angle_gap),
        phase=float(q_end[0]),
        rotation_norm=rotation_norm,
        worst_dephasing=worst_dephasing,
        reversed_worst=reversed_worst,
        transverse_cross=transverse_cross,
        log=log,
    )


def composite_component_report(result: CompositeResult) -> dict[str, float]:
    """Named residuals of the composite, including the surviving cross term."""
    comps = design_residual_components(result.record.spec, 2, "general")
    comps["phase_gap"] = result.phase + 1.0
    comps["net_angle_gap"] = result.angle_gap
    return comps
