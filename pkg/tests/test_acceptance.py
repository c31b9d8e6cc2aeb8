"""Release gates for the package: seven end-to-end checks.

Each test prints one `acceptance N/7 ... PASS` line (shown under -s or on
failure) and enforces its tolerance and runtime budget directly, so a plain
pytest run over this file is the release decision.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from spinpulse.cli import main as cli_main
from spinpulse.conditions import SystemLayout, check_record, moment_integrals
from spinpulse.noise import NoiseModel
from spinpulse.pulses import FmSpec, load_catalog, serialize_record
from spinpulse.synthesis import (
    QUANTUM_BATH_PI2_AMPLITUDE,
    QUANTUM_BATH_PI_AMPLITUDE,
    compose_forward_reversed,
    fm_minimize_pipeline,
    synthesize,
    synthesize_cold,
)
from spinpulse.trajectory import propagate
from spinpulse.verify import (
    deviation_norm,
    magnus_unitary,
    scaling_exponent,
    simulate_exact,
)

CATALOG = load_catalog()
SCALES = 0.02 * np.logspace(0.0, 1.5, 6)


def round3(x: float) -> float:
    return float(f"{x:.3g}")


def test_catalog_regression_under_sensitivity_tolerances():
    start = time.perf_counter()
    worst = 0.0
    checked = 0
    for rec in CATALOG.values():
        if rec.role != "published":
            continue
        assert rec.check_tol <= 5e-5
        report = check_record(rec)
        assert report.passed, f"{rec.label}: worst residual {report.worst:.2e}"
        assert report.worst < 5e-5
        worst = max(worst, report.worst)
        checked += 1
    elapsed = time.perf_counter() - start
    assert checked >= 17
    assert elapsed < 60.0
    print(f"acceptance 1/7 catalog regression: PASS "
          f"({checked} sets, worst residual {worst:.2e}, {elapsed:.1f}s)")


def test_resynthesis_recovers_catalog_values_from_rounded_starts():
    start = time.perf_counter()
    # Shaped-amplitude design: all three parameters restart from three
    # significant digits and must come back to the catalog point.
    target = CATALOG["am-piecewise2-pi"].spec
    layout = SystemLayout("am-piecewise", 2, "dephasing", math.pi)
    x0 = [round3(target.instants[0]), round3(target.instants[1]), round3(target.v0)]
    out = synthesize(layout, x0)
    assert out.success
    published = (0.07623078, 0.26784319, 6.72572865)
    for got, want in zip(out.x, published):
        assert abs(got - want) < 1e-5
    # First-order frequency designs: the amplitude pins the one-parameter
    # family to each catalog member, the two even coefficients restart from
    # three significant digits.
    recovered = 0
    for rec in CATALOG.values():
        if rec.role != "published" or rec.order != 1:
            continue
        if not isinstance(rec.spec, FmSpec):
            continue
        layout = SystemLayout(
            "fm", 1, "dephasing", rec.spec.theta, tau_s=rec.spec.tau_s,
            mode="symmetric", n_coeffs=2, v0_pin=rec.spec.v0,
        )
        out = synthesize(layout, [round3(v) for _, v in rec.spec.coeffs])
        assert out.success, rec.label
        for got, (_, want) in zip(out.x, rec.spec.coeffs):
            assert abs(got - want) < 1e-5, rec.label
        recovered += 1
    elapsed = time.perf_counter() - start
    assert recovered == 6
    assert elapsed < 60.0
    print(f"acceptance 2/7 re-synthesis from rounded starts: PASS "
          f"(1 shaped-amplitude + {recovered} frequency sets, {elapsed:.1f}s)")


def test_cold_start_synthesis_confirmed_by_check_command(tmp_path):
    start = time.perf_counter()
    solved = {}
    fm_layout = SystemLayout(
        "fm", 1, "dephasing", math.pi, mode="symmetric", n_coeffs=1
    )
    solved["fm"] = synthesize_cold(fm_layout, label="cold-fm1-pi")
    am_layout = SystemLayout("am-piecewise", 2, "dephasing", math.pi)
    solved["am"] = synthesize_cold(am_layout, label="cold-am2-pi")
    for result in solved.values():
        assert result.success
        assert result.residue < 1e-10
        path = tmp_path / f"{result.record.label}.pulse"
        path.write_text(serialize_record(result.record))
        assert cli_main(["check", str(path), "--tol", "1e-8"]) == 0
    elapsed = time.perf_counter() - start
    assert elapsed < 300.0
    residues = ", ".join(
        f"{k} residue {v.residue:.1e}" for k, v in solved.items()
    )
    print(f"acceptance 3/7 cold-start synthesis: PASS ({residues}, "
          f"both confirmed by the check command, {elapsed:.1f}s)")


def _scan_seed(label: str) -> list[float]:
    """Amplitude plus first seven coefficients of a catalog record; scanned
    spare coefficients sit outside that range and drop out."""
    spec = CATALOG[label].spec
    coeffs = dict(spec.coeffs)
    return [spec.v0] + [coeffs.get(i, 0.0) for i in range(1, 8)]


def test_minimized_classical_amplitudes_undercut_quantum_counterparts():
    pi_scan = fm_minimize_pipeline(
        math.pi, spares=(8,), bracket=(-0.32, -0.17),
        x0=_scan_seed("fm2-pi"), spare_tol=1e-3,
    )
    assert pi_scan.residue < 1e-10
    assert pi_scan.amplitude <= 8.5
    assert pi_scan.amplitude < QUANTUM_BATH_PI_AMPLITUDE

    pi2_scan = fm_minimize_pipeline(
        math.pi / 2.0, spares=(11,), bracket=(-0.05, 0.10),
        x0=_scan_seed("fm2-pi2"), spare_tol=1e-3,
    )
    assert pi2_scan.residue < 1e-10
    assert pi2_scan.amplitude < QUANTUM_BATH_PI2_AMPLITUDE
    print(f"acceptance 4/7 amplitude ordering: PASS "
          f"(pi {pi_scan.amplitude:.6f} < {QUANTUM_BATH_PI_AMPLITUDE}, "
          f"pi/2 {pi2_scan.amplitude:.6f} < {QUANTUM_BATH_PI2_AMPLITUDE})")


def test_monte_carlo_scaling_laws():
    start = time.perf_counter()
    static = NoiseModel(eta_bar_z=1.0, s_z=1.0)
    runs = [
        ("am-flat-pi", static, 2048, None),
        ("fm1-pi", static, 4096, 1.7),
        ("fm1-pi2", static, 4096, 1.7),
        ("fm2-pi", static, 4096, 2.7),
        ("fm-general-pi", static, 8192, 2.7),
    ]
    lines = []
    for label, noise, n_slices, floor in runs:
        rep = scaling_exponent(
            CATALOG[label].spec, noise, SCALES, n_paths=10_000, n_slices=n_slices
        )
        if floor is None:
            assert 0.7 <= rep.slope <= 1.3, f"{label}: slope {rep.slope:.3f}"
        else:
            assert rep.slope >= floor, f"{label}: slope {rep.slope:.3f}"
        lines.append(f"{label} {rep.slope:.2f}")

    composite = compose_forward_reversed(CATALOG["fm-general-pi"]).record.spec
    ou = NoiseModel(s_z=1.0, tau_c=10.0)
    rep = scaling_exponent(composite, ou, SCALES, n_paths=10_000, n_slices=8192)
    assert rep.slope >= 2.7, f"composite: slope {rep.slope:.3f}"
    lines.append(f"composite(OU) {rep.slope:.2f}")

    elapsed = time.perf_counter() - start
    assert elapsed < 600.0
    print(f"acceptance 5/7 scaling laws: PASS ({', '.join(lines)}, {elapsed:.0f}s)")


def _trapezoid_moments(spec, n_slices):
    """Uniform-grid trapezoid oracle for both moment integrals."""
    t = np.linspace(0.0, spec.duration, n_slices + 1)
    cols = propagate(spec, times=t).columns()
    first = np.trapezoid(cols, t, axis=0)
    second = np.empty((3, 3))
    dt = np.diff(t)[:, None]
    for alpha in range(3):
        c = cols[:, :, alpha]
        prefix = np.concatenate(
            [[np.zeros(3)], 0.5 * np.cumsum((c[1:] + c[:-1]) * dt, axis=0)]
        )
        second[:, alpha] = np.trapezoid(np.cross(c, prefix), t, axis=0)
    return first, second


def test_exact_simulation_agrees_with_moment_reconstruction():
    rng = np.random.default_rng(2026)
    strengths = np.array([0.05, 0.0315, 0.02, 0.0126, 0.008])
    worst_slope = math.inf
    worst_gap = 0.0
    for _ in range(10):
        n = int(rng.integers(2, 6))
        idx = np.sort(rng.choice(np.arange(1, 9), size=n, replace=False))
        spec = FmSpec(
            theta=math.pi,
            v0=float(rng.uniform(3.0, 9.0)),
            coeffs=tuple((int(i), float(rng.normal(0.0, 0.6))) for i in idx),
            tau_s=float(rng.choice([0.0, 0.05])),
        )
        for axis in range(3):
            gaps = []
            for lam in strengths:
                eta = np.zeros(3)
                eta[axis] = lam
                _, u_c = simulate_exact(spec, eta, n_slices=8192)
                recon = magnus_unitary(spec, axis, lam)
                gaps.append(deviation_norm(recon.conj().T @ u_c))
            slope = np.polyfit(np.log(strengths), np.log(gaps), 1)[0]
            worst_slope = min(worst_slope, slope)
            assert slope > 2.6, f"axis {axis}: slope {slope:.2f}"
        first, second = _trapezoid_moments(spec, 1_000_000)
        m = moment_integrals(spec)
        gap = max(np.max(np.abs(m.first - first)), np.max(np.abs(m.second - second)))
        worst_gap = max(worst_gap, gap)
        assert gap < 1e-8
    print(f"acceptance 6/7 oracle equivalence: PASS (10 random specs, "
          f"worst truncation slope {worst_slope:.2f}, "
          f"worst brute-force gap {worst_gap:.1e})")


def test_invariant_suite_runs_fast_and_green():
    repo = Path(__file__).resolve().parents[1]
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-m", "invariants", "-q", "--no-header"],
        cwd=repo, capture_output=True, text=True,
    )
    elapsed = time.perf_counter() - start
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "passed" in proc.stdout
    assert elapsed < 30.0
    print(f"acceptance 7/7 invariant suite: PASS ({elapsed:.1f}s)")
