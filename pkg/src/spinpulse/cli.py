"""Command-line surface: solve design systems, check shipped parameter sets,
export waveforms, and run Monte-Carlo scaling fits.

Exit codes: 0 on success, 1 when residuals or a requested slope target fail,
2 on usage or file-format errors. Output is deterministic for fixed flags.
"""

from __future__ import annotations

import argparse
import math
import pathlib
import sys

import numpy as np

from .conditions import SystemLayout, assemble_system, check_record, design_residual_components
from .noise import NoiseModel
from .pulses import (
    FmSpec,
    ParseError,
    PiecewiseAmSpec,
    load_catalog,
    load_record,
    export_waveform,
    serialize_record,
)
from .synthesis import (
    QUANTUM_BATH_PI2_AMPLITUDE,
    QUANTUM_BATH_PI_AMPLITUDE,
    synthesize,
    synthesize_cold,
)
from .verify import scaling_exponent

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

_ANGLES = {"pi": math.pi, "pi/2": math.pi / 2.0}


def _parse_theta(token: str) -> float:
    try:
        return _ANGLES[token]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"angle must be one of {sorted(_ANGLES)}, got {token!r}"
        ) from None


def _parse_pin(token: str) -> tuple[int, float]:
    try:
        idx, _, val = token.partition("=")
        return int(idx), float(val)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"pin must look like INDEX=VALUE, got {token!r}"
        ) from None


def _csv_floats(token: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in token.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {token!r}"
        ) from None


def _default_harmonics(order: int, noise: str, symmetric: bool) -> int:
    if symmetric:
        return 1 if order == 1 else 3
    n = 4 if order == 1 else 7
    if noise == "general":
        n = 10
    return n


def _start_from_record(labels: tuple[str, ...], token: str) -> np.ndarray:
    """Map a stored record onto a system's unknown vector, by label."""
    record = load_record(token)
    spec = record.spec
    values = []
    for name in labels:
        if name == "v0":
            values.append(spec.v0)
        elif name.startswith("b") and isinstance(spec, FmSpec):
            values.append(dict(spec.coeffs).get(int(name[1:]), 0.0))
        elif name.startswith("tau") and isinstance(spec, PiecewiseAmSpec):
            values.append(spec.instants[int(name[3:]) - 1])
        elif name in ("a", "b"):
            values.append(getattr(spec, name))
        else:
            raise ValueError(
                f"cannot seed unknown {name!r} from record {token!r}"
            )
    return np.array(values, dtype=float)


def cmd_synthesize(args) -> int:
    mode = "symmetric" if args.symmetric else "full"
    n_coeffs = args.harmonics
    if n_coeffs is None:
        n_coeffs = _default_harmonics(args.order, args.noise, args.symmetric)
    layout = SystemLayout(
        family=args.family,
        order=args.order,
        noise=args.noise,
        theta=args.theta,
        tau_s=args.tau_s,
        mode=mode,
        n_coeffs=n_coeffs,
        pinned=tuple(args.pin),
        v0_pin=args.pin_v0,
    )
    system = assemble_system(layout)
    if args.start is None:
        result = synthesize_cold(layout, amplitudes=args.amplitudes,
                                 label=args.label)
    else:
        try:
            x0 = np.array(_csv_floats(args.start))
        except argparse.ArgumentTypeError:
            x0 = _start_from_record(system.labels, args.start)
        if x0.size != system.size:
            raise ValueError(
                f"start vector has {x0.size} entries, system needs {system.size}"
            )
        result = synthesize(layout, x0, label=args.label)
    for line in result.log:
        print(line)
    for name, value in zip(system.labels, result.x):
        print(f"  {name} = {value:.9f}")
    out = pathlib.Path(args.out or f"{args.label}.pulse")
    out.write_text(serialize_record(result.record))
    print(f"wrote {out}")
    if not result.success:
        print(f"FAIL residue {result.residue:.3e} above 1e-10")
        return EXIT_FAIL
    print(f"PASS residue {result.residue:.3e}")
    return EXIT_OK


def cmd_check(args) -> int:
    record = load_record(args.spec)
    tol = args.tol if args.tol is not None else record.check_tol
    comps = design_residual_components(record.spec, record.order, record.noise)
    print(f"{record.label}: order {record.order}, {record.noise} noise, "
          f"tolerance {tol:g}")
    failed = False
    for name, value in comps.items():
        ok = abs(value) <= tol
        failed |= not ok
        print(f"  {name:>12s} {value:+.6e}  {'PASS' if ok else 'FAIL'}")
    print("FAIL" if failed else "PASS")
    return EXIT_FAIL if failed else EXIT_OK


def cmd_tables(args) -> int:
    catalog = load_catalog()
    width = max(len(label) for label in catalog)
    bad = 0
    print(f"{'label':<{width}}  {'role':<9}  {'worst':>10}  {'tol':>8}  verdict")
    for label in sorted(catalog):
        record = catalog[label]
        report = check_record(record)
        if record.role == "baseline":
            verdict = "CONTROL" if not report.passed else "PASS"
        elif report.passed:
            verdict = "PASS"
        else:
            verdict = "FAIL"
            bad += 1
        print(f"{label:<{width}}  {record.role:<9}  {report.worst:10.3e}  "
              f"{report.tol:8.1e}  {verdict}")
    for name, amplitude in (
        ("quantum counterpart (pi)", QUANTUM_BATH_PI_AMPLITUDE),
        ("quantum counterpart (pi/2)", QUANTUM_BATH_PI2_AMPLITUDE),
    ):
        print(f"{name:<{width}}  {'constant':<9}  {'amplitude':>10} "
              f"{amplitude:8.6f}  SKIPPED (quantum bath out of scope)")
    print(f"{len(catalog)} parameter sets, {bad} failing")
    return EXIT_FAIL if bad else EXIT_OK


def cmd_export(args) -> int:
    record = load_record(args.spec)
    text = export_waveform(record.spec, args.samples)
    if args.out:
        pathlib.Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


def cmd_simulate(args) -> int:
    record = load_record(args.spec)
    model = NoiseModel(eta_bar_z=args.eta_bar, s_z=args.s_z, s_x=args.s_x,
                       tau_c=args.tau_c)
    scales = np.array(args.scales)
    report = scaling_exponent(
        record.spec,
        model,
        scales,
        n_paths=args.paths,
        seed=args.seed,
        n_slices=args.slices,
        metric=args.metric,
        target_slope=args.target_slope,
    )
    print(f"{record.label}: {args.metric} deviation vs noise scale "
          f"({args.paths} paths, seed {args.seed})")
    for lam, dev, err in zip(report.scales, report.deviations, report.errors):
        print(f"  scale {lam:8.5f}  deviation {dev:.6e} +- {err:.1e}")
    print(f"slope {report.slope:.3f} +- {report.slope_error:.3f}")
    if args.target_slope is None:
        return EXIT_OK
    verdict = report.passed
    print(f"target {args.target_slope:g}: {'PASS' if verdict else 'FAIL'}")
    return EXIT_OK if verdict else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinpulse",
        description="design and verify noise-compensating spin-1/2 pulses",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    syn = sub.add_parser("synthesize", help="solve a design system")
    syn.add_argument("--family", required=True,
                     choices=("fm", "am-piecewise", "am-continuous"))
    syn.add_argument("--order", type=int, default=2, choices=(1, 2))
    syn.add_argument("--theta", type=_parse_theta, default=math.pi,
                     help="target angle token: pi or pi/2")
    syn.add_argument("--noise", default="dephasing",
                     choices=("dephasing", "general"))
    syn.add_argument("--symmetric", action="store_true",
                     help="restrict FM profiles to cosine harmonics")
    syn.add_argument("--harmonics", type=int, default=None,
                     help="FM harmonic count (default: matches the system)")
    syn.add_argument("--tau-s", type=float, default=0.0,
                     help="switching time of the amplitude envelope")
    syn.add_argument("--pin", type=_parse_pin, action="append", default=[],
                     metavar="INDEX=VALUE",
                     help="hold one harmonic fixed (repeatable)")
    syn.add_argument("--pin-v0", type=float, default=None,
                     help="hold the drive amplitude fixed")
    syn.add_argument("--start", default=None,
                     help="warm start: catalog label or comma-separated values")
    syn.add_argument("--amplitudes", type=_csv_floats, default=(2.0, 4.0, 6.0, 8.0),
                     help="cold-start amplitude guesses")
    syn.add_argument("--label", default="synthesized")
    syn.add_argument("--out", default=None, help="output spec file path")
    syn.set_defaults(run=cmd_synthesize)

    chk = sub.add_parser("check", help="evaluate a spec file's residuals")
    chk.add_argument("spec", help="catalog label or spec file path")
    chk.add_argument("--tol", type=float, default=None,
                     help="override the stored tolerance")
    chk.set_defaults(run=cmd_check)

    tab = sub.add_parser("tables", help="regression-check every shipped set")
    tab.set_defaults(run=cmd_tables)

    exp = sub.add_parser("export", help="sample a waveform to columns")
    exp.add_argument("spec", help="catalog label or spec file path")
    exp.add_argument("--samples", type=int, default=1000)
    exp.add_argument("--out", default=None)
    exp.set_defaults(run=cmd_export)

    sim = sub.add_parser("simulate", help="Monte-Carlo scaling fit")
    sim.add_argument("spec", help="catalog label or spec file path")
    sim.add_argument("--eta-bar", type=float, default=0.0,
                     help="mean of the dephasing component")
    sim.add_argument("--s-z", type=float, default=0.0,
                     help="standard deviation of the dephasing component")
    sim.add_argument("--s-x", type=float, default=0.0,
                     help="standard deviation of each transverse component")
    sim.add_argument("--tau-c", type=float, default=math.inf,
                     help="correlation time (default: static draws)")
    sim.add_argument("--scales", type=_csv_floats,
                     default=tuple(0.02 * np.logspace(0.0, 1.5, 6)),
                     help="noise scale points (>=5 spanning >=1.5 decades)")
    sim.add_argument("--paths", type=int, default=10_000)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--slices", type=int, default=4096)
    sim.add_argument("--metric", default="average", choices=("average", "map"))
    sim.add_argument("--target-slope", type=float, default=None)
    sim.set_defaults(run=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        # argparse exits 2 on usage errors already; keep that contract
        return int(stop.code or 0)
    try:
        return args.run(args)
    except ParseError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
