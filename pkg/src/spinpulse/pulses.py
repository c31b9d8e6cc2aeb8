"""Pulse parametrizations and their evaluation as control fields v(t).

Four families: piecewise-constant amplitude about y, continuous amplitude
about y, frequency-modulated (constant-magnitude axis steering in the xy
plane, optionally with a sin^2 switching envelope), and the forward plus
time-reversed FM composite. Specs are immutable; all synthesis-facing code
works in units tau_p = 1 and specs carry tau_p only for I/O scaling.
"""

from __future__ import annotations

import math
import os
import pathlib
from dataclasses import dataclass, field, replace
from typing import Iterable, Union

import numpy as np

TWO_PI = 2.0 * math.pi


class ParseError(ValueError):
    """Malformed pulse-spec file; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


# ---------------------------------------------------------------------------
# Spec dataclasses


@dataclass(frozen=True)
class PiecewiseAmSpec:
    """Piecewise-constant amplitude about the y axis.

    `instants` are the interior switching times as fractions of tau_p,
    strictly increasing; `signs` (one per segment, +1/-1) carry the sign of
    the amplitude v0 on each segment. The published second-order pulses use
    four symmetric instants and five segments, but any count is accepted so
    constant and composite baselines fit the same type.
    """

    theta: float
    v0: float
    instants: tuple[float, ...] = ()
    signs: tuple[int, ...] = (1,)
    tau_p: float = 1.0

    def __post_init__(self):
        inst = tuple(float(t) for t in self.instants)
        if any(b <= a for a, b in zip(inst, inst[1:])):
            raise ValueError("switching instants must be strictly increasing")
        if inst and not (0.0 < inst[0] and inst[-1] < 1.0):
            raise ValueError("switching instants must be interior to (0, tau_p)")
        if len(self.signs) != len(inst) + 1:
            raise ValueError("need one sign per segment")
        if any(s not in (-1, 1) for s in self.signs):
            raise ValueError("signs must be +1 or -1")
        object.__setattr__(self, "instants", inst)
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))

    @property
    def symmetric(self) -> bool:
        inst = self.instants
        return all(abs(inst[i] + inst[len(inst) - 1 - i] - 1.0) < 1e-12 for i in range(len(inst)))

    @property
    def duration(self) -> float:
        return 1.0


@dataclass(frozen=True)
class ContinuousAmSpec:
    """Smooth amplitude about y: v(t) = theta/2 + (a - theta/2) cos(2 pi t)
    + (b - a) cos(4 pi t) - b cos(6 pi t), in units tau_p = 1.

    The cosine coefficients sum to -theta/2, so v(0) = v(tau_p) = 0 and
    v'(0) = v'(tau_p) = 0 hold identically and the total angle is theta.
    """

    theta: float
    a: float
    b: float
    tau_p: float = 1.0

    @property
    def duration(self) -> float:
        return 1.0

    def cosine_coefficients(self) -> tuple[float, float, float]:
        return (self.a - self.theta / 2.0, self.b - self.a, -self.b)


@dataclass(frozen=True)
class FmSpec:
    """Constant-magnitude control steered in the xy plane by the phase
    Omega(t) = sum_n b_{2n-1} sin(2 pi n t) + b_{2n} (cos(2 pi n t) - 1).

    `coeffs` is a sparse, ordered tuple of (index, value) pairs (odd index ->
    sine, even -> cosine-minus-one, harmonic n = (index + 1) // 2), so gaps in
    the published coefficient lists are representable. tau_s > 0 adds the
    sin^2 switching envelope V(t) = V0 f(t).
    """

    theta: float
    v0: float
    coeffs: tuple[tuple[int, float], ...] = ()
    tau_s: float = 0.0
    tau_p: float = 1.0

    def __post_init__(self):
        pairs = tuple(sorted((int(i), float(v)) for i, v in self.coeffs))
        if any(i < 1 for i, _ in pairs):
            raise ValueError("coefficient indices start at 1")
        if len({i for i, _ in pairs}) != len(pairs):
            raise ValueError("duplicate coefficient index")
        if not 0.0 <= self.tau_s <= 0.5:
            raise ValueError("switching time must lie in [0, tau_p/2]")
        object.__setattr__(self, "coeffs", pairs)

    @property
    def duration(self) -> float:
        return 1.0

    @property
    def symmetric(self) -> bool:
        """True when only even (cosine) coefficients are present."""
        return all(i % 2 == 0 for i, _ in self.coeffs)

    def coefficient(self, index: int) -> float:
        for i, v in self.coeffs:
            if i == index:
                return v
        return 0.0


@dataclass(frozen=True)
class CompositeFmSpec:
    """Forward FM pulse immediately followed by its time-reverse.

    Spans [0, 2 tau_p]; the second half replays the base pulse with
    Omega(t) -> Omega(tau_p - t), which for the Fourier ansatz is the base
    spec with all odd (sine) coefficients negated.
    """

    base: FmSpec

    @property
    def theta(self) -> float:
        return 2.0 * self.base.theta

    @property
    def tau_p(self) -> float:
        return self.base.tau_p

    @property
    def duration(self) -> float:
        return 2.0

    @property
    def reversed_half(self) -> FmSpec:
        return time_reverse(self.base)


PulseSpec = Union[PiecewiseAmSpec, ContinuousAmSpec, FmSpec, CompositeFmSpec]

FAMILY_TAGS = {
    PiecewiseAmSpec: "am-piecewise",
    ContinuousAmSpec: "am-continuous",
    FmSpec: "fm",
    CompositeFmSpec: "fm-composite",
}


@dataclass(frozen=True)
class ControlSample:
    """Control field at one time (or a batch): v in units 1/tau_p, the FM
    phase Omega in radians (0 for the AM families), and the envelope value."""

    t: np.ndarray | float
    v: np.ndarray
    omega: np.ndarray | float
    envelope: np.ndarray | float


def time_reverse(spec: FmSpec) -> FmSpec:
    """The pulse driven backwards: Omega(t) -> Omega(tau_p - t)."""
    flipped = tuple((i, -v if i % 2 == 1 else v) for i, v in spec.coeffs)
    return replace(spec, coeffs=flipped)


# ---------------------------------------------------------------------------
# Evaluation


def omega_fm(spec: FmSpec, t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for i, b in spec.coeffs:
        n = (i + 1) // 2
        if i % 2 == 1:
            out += b * np.sin(TWO_PI * n * t)
        else:
            out += b * (np.cos(TWO_PI * n * t) - 1.0)
    return out


def omega_fm_rate(spec: FmSpec, t: np.ndarray) -> np.ndarray:
    """dOmega/dt for the Fourier ansatz."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for i, b in spec.coeffs:
        n = (i + 1) // 2
        if i % 2 == 1:
            out += b * TWO_PI * n * np.cos(TWO_PI * n * t)
        else:
            out -= b * TWO_PI * n * np.sin(TWO_PI * n * t)
    return out


def envelope(t: np.ndarray, tau_s: float) -> np.ndarray:
    """sin^2 switching envelope: rises on [0, tau_s], 1 on the plateau,
    mirror-falls on [1 - tau_s, 1]. tau_s = 0 disables the envelope."""
    t = np.asarray(t, dtype=float)
    if tau_s == 0.0:
        return np.ones_like(t)
    f = np.ones_like(t)
    rise = t < tau_s
    fall = t > 1.0 - tau_s
    f[rise] = np.sin(math.pi * t[rise] / (2.0 * tau_s)) ** 2
    f[fall] = np.sin(math.pi * (1.0 - t[fall]) / (2.0 * tau_s)) ** 2
    return f


def psi_am(spec: PiecewiseAmSpec | ContinuousAmSpec, t: np.ndarray) -> np.ndarray:
    """Accumulated rotation angle psi(t) = 2 int_0^t v for the y-axis families,
    in closed form (psi is piecewise linear for the piecewise family)."""
    t = np.asarray(t, dtype=float)
    if isinstance(spec, ContinuousAmSpec):
        c1, c2, c3 = spec.cosine_coefficients()
        return spec.theta * t + (
            c1 * np.sin(TWO_PI * t)
            + c2 * np.sin(2.0 * TWO_PI * t) / 2.0
            + c3 * np.sin(3.0 * TWO_PI * t) / 3.0
        ) / math.pi
    bounds, psi_at, slopes = _piecewise_profile(spec)
    seg = np.clip(np.searchsorted(bounds, t, side="right") - 1, 0, len(slopes) - 1)
    return psi_at[seg] + slopes[seg] * (t - bounds[seg])


def _piecewise_profile(spec: PiecewiseAmSpec):
    bounds = np.array((0.0,) + spec.instants)
    slopes = 2.0 * spec.v0 * np.array(spec.signs, dtype=float)
    ends = np.append(spec.instants, 1.0)
    psi_at = np.concatenate(([0.0], np.cumsum(slopes * (ends - bounds))))[:-1]
    return bounds, psi_at, slopes


def eval_control(spec: PulseSpec, t) -> ControlSample:
    """Control field sample(s); t may be a scalar or an array in
    [0, spec.duration * tau_p] (physical units)."""
    scalar = np.isscalar(t)
    tp = np.atleast_1d(np.asarray(t, dtype=float)) / spec.tau_p
    if np.any(tp < -1e-12) or np.any(tp > spec.duration + 1e-12):
        raise ValueError("time outside the pulse interval")
    tp = np.clip(tp, 0.0, spec.duration)

    if isinstance(spec, PiecewiseAmSpec):
        bounds = np.array((0.0,) + spec.instants)
        seg = np.clip(np.searchsorted(bounds, tp, side="right") - 1, 0, len(spec.signs) - 1)
        vy = spec.v0 * np.array(spec.signs, dtype=float)[seg]
        v = np.stack([np.zeros_like(tp), vy, np.zeros_like(tp)], axis=-1)
        om = np.zeros_like(tp)
        f = np.ones_like(tp)
    elif isinstance(spec, ContinuousAmSpec):
        c1, c2, c3 = spec.cosine_coefficients()
        vy = (
            spec.theta / 2.0
            + c1 * np.cos(TWO_PI * tp)
            + c2 * np.cos(2.0 * TWO_PI * tp)
            + c3 * np.cos(3.0 * TWO_PI * tp)
        )
        v = np.stack([np.zeros_like(tp), vy, np.zeros_like(tp)], axis=-1)
        om = np.zeros_like(tp)
        f = np.ones_like(tp)
    elif isinstance(spec, FmSpec):
        om = omega_fm(spec, tp)
        f = envelope(tp, spec.tau_s)
        mag = spec.v0 * f
        v = np.stack([mag * np.cos(om), mag * np.sin(om), np.zeros_like(tp)], axis=-1)
    elif isinstance(spec, CompositeFmSpec):
        first = tp <= 1.0
        om = np.empty_like(tp)
        f = np.empty_like(tp)
        om[first] = omega_fm(spec.base, tp[first])
        f[first] = envelope(tp[first], spec.base.tau_s)
        om[~first] = omega_fm(spec.reversed_half, tp[~first] - 1.0)
        f[~first] = envelope(tp[~first] - 1.0, spec.base.tau_s)
        mag = spec.base.v0 * f
        v = np.stack([mag * np.cos(om), mag * np.sin(om), np.zeros_like(tp)], axis=-1)
    else:
        raise TypeError(f"unknown pulse spec {type(spec).__name__}")

    v = v / spec.tau_p
    if scalar:
        return ControlSample(float(t), v[0], float(om[0]), float(f[0]))
    return ControlSample(np.asarray(t, dtype=float), v, om, f)


def total_angle_am(spec: PiecewiseAmSpec | ContinuousAmSpec) -> float:
    """Signed total rotation angle psi(tau_p) = 2 int v dt of a y-axis pulse."""
    if isinstance(spec, ContinuousAmSpec):
        return spec.theta  # oscillatory terms integrate to zero over full periods
    return float(psi_am(spec, np.array([1.0]))[0])


def enumerate_sign_patterns(
    instants: Iterable[float], v0: float, theta: float, tol: float = 1e-6
) -> list[tuple[int, ...]]:
    """All segment-sign patterns whose total angle matches theta modulo 2 pi.

    The published piecewise pulses fix the pattern only through their plots;
    this brute-force enumeration recovers every candidate; patterns are sorted
    lexicographically with leading-positive ones first, so [0] is canonical.
    """
    instants = tuple(instants)
    n = len(instants) + 1
    matches = []
    for bits in range(2**n):
        signs = tuple(1 if bits & (1 << k) == 0 else -1 for k in range(n))
        spec = PiecewiseAmSpec(theta=theta, v0=v0, instants=instants, signs=signs)
        delta = (total_angle_am(spec) - theta) % TWO_PI
        if min(delta, TWO_PI - delta) < tol:
            matches.append(signs)
    matches.sort(key=lambda s: tuple(-x for x in s))
    return matches


# ---------------------------------------------------------------------------
# Records, file format, catalog


@dataclass(frozen=True)
class PulseRecord:
    """A pulse spec plus the design target it is meant to satisfy."""

    label: str
    spec: PulseSpec
    order: int
    noise: str  # "dephasing" | "general"
    provenance: str = ""
    check_tol: float = 5e-5
    role: str = "published"  # "published" | "baseline"


_ANGLE_TOKENS = {"pi": math.pi, "pi/2": math.pi / 2.0, "2pi": TWO_PI}


def format_angle(theta: float) -> str:
    for token, value in _ANGLE_TOKENS.items():
        if theta == value:
            return token
    return f"{theta:.17g}"


def parse_angle(token: str) -> float:
    token = token.strip()
    if token in _ANGLE_TOKENS:
        return _ANGLE_TOKENS[token]
    try:
        return float(token)
    except ValueError:
        raise ValueError(f"bad angle {token!r}; use pi, pi/2 or a float") from None


def serialize_record(rec: PulseRecord) -> str:
    """Key/value text form; floats at 17 significant digits so parsing is
    bit-stable."""
    spec = rec.spec
    lines = [
        f"family = {FAMILY_TAGS[type(spec)]}",
        f"label = {rec.label}",
        f"theta = {format_angle(spec.theta if not isinstance(spec, CompositeFmSpec) else spec.base.theta)}",
        f"tau_p = {spec.tau_p:.17g}",
        f"order = {rec.order}",
        f"noise = {rec.noise}",
        f"role = {rec.role}",
    ]
    base = spec.base if isinstance(spec, CompositeFmSpec) else spec
    if isinstance(base, PiecewiseAmSpec):
        lines.append(f"v0 = {base.v0:.17g}")
        for k, inst in enumerate(base.instants, start=1):
            lines.append(f"tau{k} = {inst:.17g}")
        lines.append("signs = " + "".join("+" if s > 0 else "-" for s in base.signs))
    elif isinstance(base, ContinuousAmSpec):
        lines.append(f"a = {base.a:.17g}")
        lines.append(f"b = {base.b:.17g}")
    elif isinstance(base, FmSpec):
        lines.append(f"v0 = {base.v0:.17g}")
        if base.tau_s:
            lines.append(f"tau_s = {base.tau_s:.17g}")
        for i, v in base.coeffs:
            lines.append(f"b{i} = {v:.17g}")
    if rec.check_tol != 5e-5:
        lines.append(f"check_tol = {rec.check_tol:.17g}")
    if rec.provenance:
        lines.append(f"provenance = {rec.provenance}")
    return "\n".join(lines) + "\n"


def parse_record(text: str) -> PulseRecord:
    fields: dict[str, str] = {}
    coeffs: list[tuple[int, float]] = []
    instants: dict[int, float] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(line_no, f"expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        try:
            if key.startswith("b") and key[1:].isdigit():
                coeffs.append((int(key[1:]), float(value)))
            elif key.startswith("tau") and key[3:].isdigit():
                instants[int(key[3:])] = float(value)
            else:
                if key == "theta":
                    parse_angle(value)
                elif key not in ("family", "label", "noise", "role", "signs", "provenance"):
                    float(value)  # numeric field: fail here, with the line number
                fields[key] = value
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from None

    def need(key: str) -> str:
        if key not in fields:
            raise ParseError(0, f"missing required key {key!r}")
        return fields[key]

    try:
        family = need("family")
        theta = parse_angle(need("theta"))
        tau_p = float(fields.get("tau_p", "1.0"))
        if family == "am-piecewise":
            inst = tuple(instants[k] for k in sorted(instants))
            signs = tuple(1 if ch == "+" else -1 for ch in fields.get("signs", "+"))
            spec: PulseSpec = PiecewiseAmSpec(
                theta=theta, v0=float(need("v0")), instants=inst, signs=signs, tau_p=tau_p
            )
        elif family == "am-continuous":
            spec = ContinuousAmSpec(
                theta=theta, a=float(need("a")), b=float(need("b")), tau_p=tau_p
            )
        elif family in ("fm", "fm-composite"):
            spec = FmSpec(
                theta=theta,
                v0=float(need("v0")),
                coeffs=tuple(coeffs),
                tau_s=float(fields.get("tau_s", "0.0")),
                tau_p=tau_p,
            )
            if family == "fm-composite":
                spec = CompositeFmSpec(base=spec)
        else:
            raise ParseError(0, f"unknown family {family!r}")
        return PulseRecord(
            label=fields.get("label", "unnamed"),
            spec=spec,
            order=int(fields.get("order", "1")),
            noise=fields.get("noise", "dephasing"),
            provenance=fields.get("provenance", ""),
            check_tol=float(fields.get("check_tol", "5e-5")),
            role=fields.get("role", "published"),
        )
    except ParseError:
        raise
    except (KeyError, ValueError) as exc:
        raise ParseError(0, str(exc)) from None


def data_dir() -> pathlib.Path:
    override = os.environ.get("SPINPULSE_DATA")
    if override:
        return pathlib.Path(override)
    return pathlib.Path(__file__).resolve().parent / "data"


def load_record(name_or_path: str | pathlib.Path) -> PulseRecord:
    """Load a pulse record by catalog label or by file path."""
    path = pathlib.Path(name_or_path)
    if not path.exists():
        path = data_dir() / f"{name_or_path}.pulse"
    if not path.exists():
        raise FileNotFoundError(f"no pulse file for {name_or_path!r}")
    return parse_record(path.read_text())


def load_catalog() -> dict[str, PulseRecord]:
    catalog = {}
    for path in sorted(data_dir().glob("*.pulse")):
        rec = parse_record(path.read_text())
        catalog[rec.label] = rec
    return catalog


def export_waveform(spec: PulseSpec, n_samples: int = 1000) -> str:
    """Delimiter-separated waveform columns t, v_x, v_y, v_z, Omega, f."""
    t = np.linspace(0.0, spec.duration * spec.tau_p, n_samples)
    sample = eval_control(spec, t)
    rows = ["# t\tv_x\tv_y\tv_z\tOmega\tf"]
    for k in range(n_samples):
        rows.append(
            "\t".join(
                f"{x:.12g}"
                for x in (
                    t[k],
                    sample.v[k, 0],
                    sample.v[k, 1],
                    sample.v[k, 2],
                    sample.omega[k],
                    sample.envelope[k],
                )
            )
        )
    return "\n".join(rows) + "\n"
