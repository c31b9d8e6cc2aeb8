#!/usr/bin/env python3
"""Search for the lowest-amplitude second-order frequency designs.

The square design system leaves one Fourier coefficient free; scanning it
traces an amplitude valley whose minimum is the cheapest pulse of the
family. Scans run for the dephasing systems at both target angles and for
the general-decoherence system, and each winner is compared against the
published counterpart that also cancels quantum bath terms: the classical
designs should come in lower.
"""

from __future__ import annotations

import argparse
import math
import pathlib

from spinpulse.pulses import load_catalog, serialize_record
from spinpulse.synthesis import (
    QUANTUM_BATH_PI2_AMPLITUDE,
    QUANTUM_BATH_PI_AMPLITUDE,
    fm_minimize_pipeline,
    minimized_record,
)


def catalog_seed(label: str, n_coeffs: int) -> list[float]:
    spec = load_catalog()[label].spec
    coeffs = dict(spec.coeffs)
    return [spec.v0] + [coeffs.get(i, 0.0) for i in range(1, n_coeffs + 1)]


SCANS = {
    "pi": dict(
        theta=math.pi, noise="dephasing", spares=(8, 10, 12),
        bracket=(-0.6, 0.3), seed_label="fm2-pi", n_coeffs=7,
        reference=QUANTUM_BATH_PI_AMPLITUDE,
    ),
    "pi2": dict(
        theta=math.pi / 2.0, noise="dephasing", spares=(8, 9, 10, 11),
        bracket=(-0.3, 0.3), seed_label="fm2-pi2", n_coeffs=7,
        reference=QUANTUM_BATH_PI2_AMPLITUDE,
    ),
    "general-pi": dict(
        theta=math.pi, noise="general", spares=(11, 12, 13, 14),
        bracket=(-0.6, 0.3), seed_label="fm-general-pi", n_coeffs=10,
        reference=None,
    ),
}


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--scan", choices=sorted(SCANS), nargs="*",
                        default=sorted(SCANS))
    parser.add_argument("--spare-tol", type=float, default=1e-4)
    parser.add_argument("--write-dir", type=pathlib.Path, default=None,
                        help="save each winning record under this directory")
    args = parser.parse_args()

    for name in args.scan:
        cfg = SCANS[name]
        result = fm_minimize_pipeline(
            cfg["theta"], noise=cfg["noise"], spares=cfg["spares"],
            bracket=cfg["bracket"],
            x0=catalog_seed(cfg["seed_label"], cfg["n_coeffs"]),
            spare_tol=args.spare_tol,
        )
        line = (f"{name}: amplitude {result.amplitude:.6f} at "
                f"{result.label} = {result.spare:+.6f} "
                f"(residue {result.residue:.1e})")
        if cfg["reference"] is not None:
            verdict = "<" if result.amplitude < cfg["reference"] else ">="
            line += f"  {verdict} quantum counterpart {cfg['reference']}"
        print(line)
        for spare_label, spare, amplitude in result.scans:
            print(f"    scan {spare_label}: best {amplitude:.6f} at {spare:+.6f}")
        if args.write_dir is not None:
            args.write_dir.mkdir(parents=True, exist_ok=True)
            record = minimized_record(
                result, cfg["theta"], cfg["noise"], f"minimized-{name}"
            )
            path = args.write_dir / f"minimized-{name}.pulse"
            path.write_text(serialize_record(record))
            print(f"    wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
