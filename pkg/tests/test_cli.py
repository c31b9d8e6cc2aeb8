"""The command-line surface: verbs, exit codes, and deterministic output."""

import math

import numpy as np
import pytest

from spinpulse.cli import main
from spinpulse.pulses import load_record


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_tables_passes_and_skips_quantum_columns(capsys):
    code, out, _ = run(capsys, "tables")
    assert code == 0
    assert out.count("SKIPPED (quantum bath out of scope)") == 2
    assert "0 failing" in out
    assert "CONTROL" in out  # the unshaped baseline fails by design


def test_check_unshaped_pulse_fails_on_first_moment(capsys):
    code, out, _ = run(capsys, "check", "am-flat-pi")
    assert code == 1
    assert "first_sin" in out
    assert "6.366" in out
    assert out.rstrip().endswith("FAIL")


def test_check_general_pi_passes_all_residuals(capsys):
    code, out, _ = run(capsys, "check", "fm-general-pi")
    assert code == 0
    assert out.count("PASS") == 12  # 11 residual rows plus the verdict


def test_check_corrupt_file_reports_line(tmp_path, capsys):
    bad = tmp_path / "broken.pulse"
    bad.write_text("label = x\nfamily = fm\ngarbage\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2
    assert "line 3" in err


def test_check_missing_file(capsys):
    code, _, err = run(capsys, "check", "no-such-pulse")
    assert code == 2
    assert "no-such-pulse" in err


def test_synthesize_piecewise_pi2_reaches_published_point(tmp_path, capsys):
    out_file = tmp_path / "pw.pulse"
    code, out, _ = run(
        capsys, "synthesize", "--family", "am-piecewise", "--theta", "pi/2",
        "--label", "pw-test", "--out", str(out_file),
    )
    assert code == 0
    assert "PASS" in out
    record = load_record(out_file)
    assert record.spec.instants[0] == pytest.approx(0.03312609, abs=1e-6)
    assert record.spec.instants[1] == pytest.approx(0.25209296, abs=1e-6)
    assert record.spec.v0 == pytest.approx(6.32709469, abs=1e-5)


def test_synthesize_warm_start_from_catalog_label(tmp_path, capsys):
    out_file = tmp_path / "fm1.pulse"
    code, out, _ = run(
        capsys, "synthesize", "--family", "fm", "--order", "1", "--theta", "pi",
        "--symmetric", "--harmonics", "2", "--pin-v0", "3.751157",
        "--start", "fm1-pi", "--label", "fm1-retest", "--out", str(out_file),
    )
    assert code == 0
    record = load_record(out_file)
    coeffs = dict(record.spec.coeffs)
    assert coeffs[2] == pytest.approx(-1.090479, abs=1e-4)
    assert coeffs[4] == pytest.approx(-0.588913, abs=1e-4)
    assert record.spec.v0 == 3.751157


def test_synthesize_undersized_ansatz_is_a_usage_error(capsys):
    code, _, err = run(capsys, "synthesize", "--family", "fm", "--order", "2",
                       "--theta", "pi", "--harmonics", "3")
    assert code == 2
    assert "residuals" in err


def test_unknown_theta_token_is_rejected(capsys):
    code, _, _ = run(capsys, "synthesize", "--family", "fm", "--theta", "1.57")
    assert code == 2


def test_export_keeps_drive_magnitude_constant(tmp_path, capsys):
    out_file = tmp_path / "wave.tsv"
    code, _, _ = run(capsys, "export", "fm2-pi", "--samples", "64",
                     "--out", str(out_file))
    assert code == 0
    data = np.loadtxt(out_file, skiprows=1)
    magnitude = np.hypot(data[:, 1], data[:, 2])
    assert np.allclose(magnitude, 8.129097, atol=1e-9)
    assert np.all(data[:, 3] == 0.0)


def test_simulate_is_deterministic_and_gates_on_target(capsys):
    argv = ("simulate", "fm1-pi", "--eta-bar", "1.0", "--paths", "2",
            "--slices", "1024", "--seed", "7")
    code_a, out_a, _ = run(capsys, *argv)
    code_b, out_b, _ = run(capsys, *argv)
    assert code_a == code_b == 0
    assert out_a == out_b
    code_fail, out_fail, _ = run(capsys, *argv, "--target-slope", "5.0")
    assert code_fail == 1
    assert "FAIL" in out_fail


def test_simulate_accepts_explicit_scales(capsys):
    code, out, _ = run(capsys, "simulate", "am-flat-pi", "--eta-bar", "1.0",
                       "--paths", "2", "--slices", "512",
                       "--scales", "0.01,0.02,0.05,0.1,0.2,0.32",
                       "--target-slope", "0.7")
    assert code == 0
    assert "target 0.7: PASS" in out


def test_simulate_rejects_thin_scale_span(capsys):
    code, _, err = run(capsys, "simulate", "fm1-pi", "--eta-bar", "1.0",
                       "--paths", "2", "--scales", "0.1,0.2,0.3,0.4,0.5")
    assert code == 2
    assert "decades" in err
