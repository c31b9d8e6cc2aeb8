"""Monte-Carlo ground truth for designed pulses.

Simulates the exact sliced evolution under classical noise realizations,
removes the noiseless propagator computed with the same slicing (so slicing
bias largely cancels in the correction unitary), and fits log-log scaling
exponents of ensemble deviation norms against the noise strength. Scans vary
the noise amplitude at fixed unit duration; the two are equivalent through
the dimensionless product of strength and duration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._fast import ensemble_dephasing_paths, ensemble_static, slice_unitary
from .conditions import moment_integrals
from .kernel import PAULI, su2_rotation
from .noise import NoiseModel, ou_dephasing_paths, static_vectors
from .pulses import eval_control

DEFAULT_SLICES = 4096

_ID2 = np.eye(2, dtype=complex)

# midpoint control samples and noiseless propagators, keyed by (spec, slices);
# scaling scans reuse them across every noise strength
_control_cache: dict = {}
_noiseless_cache: dict = {}


def _midpoint_controls(spec, n_slices: int):
    key = (spec, n_slices)
    hit = _control_cache.get(key)
    if hit is None:
        dt = spec.duration / n_slices
        t_mid = (np.arange(n_slices) + 0.5) * dt
        vmid = np.ascontiguousarray(eval_control(spec, t_mid).v)
        vmid.setflags(write=False)
        hit = (vmid, dt)
        _control_cache[key] = hit
    return hit


def noiseless_unitary(spec, n_slices: int = DEFAULT_SLICES) -> np.ndarray:
    """The pulse propagator alone, on the same slicing the noise runs use."""
    key = (spec, n_slices)
    hit = _noiseless_cache.get(key)
    if hit is None:
        vmid, dt = _midpoint_controls(spec, n_slices)
        hit = slice_unitary(vmid, dt, 0.0, 0.0, 0.0)
        hit.setflags(write=False)
        _noiseless_cache[key] = hit
    return hit


def simulate_exact(spec, noise, n_slices: int = DEFAULT_SLICES):
    """Exact evolution under one noise realization.

    `noise` is either a static 3-vector or a per-slice dephasing array of
    length n_slices. Returns (U_p, U_c) where U_c strips the noiseless
    propagator from the left.
    """
    vmid, dt = _midpoint_controls(spec, n_slices)
    noise = np.asarray(noise, dtype=float)
    if noise.shape == (3,):
        u_p = slice_unitary(vmid, dt, noise[0], noise[1], noise[2])
    elif noise.shape == (n_slices,):
        u_p = ensemble_dephasing_paths(vmid, dt, noise[None, :])[0]
    else:
        raise ValueError("noise must be a 3-vector or one dephasing path")
    u0 = noiseless_unitary(spec, n_slices)
    return u_p, u0.conj().T @ u_p


def slice_convergence_gap(spec, noise, n_slices: int = DEFAULT_SLICES) -> float:
    """Largest entry change of U_p when the slice count doubles."""
    noise = np.asarray(noise, dtype=float)
    u1, _ = simulate_exact(spec, noise, n_slices)
    if noise.ndim == 1 and noise.shape == (n_slices,):
        noise = np.repeat(noise, 2)
    u2, _ = simulate_exact(spec, noise, 2 * n_slices)
    return float(np.max(np.abs(u1 - u2)))


def deviation_norm(mean_uc: np.ndarray) -> float:
    """Spectral distance of an averaged correction unitary from the identity,
    after factoring out the best global phase."""
    trace = np.trace(mean_uc)
    phase = -np.angle(trace) if abs(trace) > 0.0 else 0.0
    return float(np.linalg.norm(np.exp(1j * phase) * mean_uc - _ID2, ord=2))


def ensemble_unitaries(
    spec,
    model: NoiseModel,
    n_paths: int,
    seed: int = 0,
    n_slices: int = DEFAULT_SLICES,
) -> np.ndarray:
    """Exact propagators for a seeded ensemble of realizations.

    Static models draw one constant vector per path; finite correlation
    times use the exact one-step Ornstein-Uhlenbeck transition for the
    dephasing component (transverse components must then be zero, as paths
    are generated for the z axis only).
    """
    rng = np.random.default_rng(seed)
    vmid, dt = _midpoint_controls(spec, n_slices)
    if model.static:
        vecs = static_vectors(model, n_paths, rng)
        return ensemble_static(vmid, dt, vecs)
    if model.s_x != 0.0:
        raise ValueError("time-dependent realizations cover dephasing noise only")
    # antithetic pairing: each drawn path enters together with its reflection
    # about the mean, which cancels the odd-in-fluctuation sampling error of
    # the ensemble average exactly while leaving the even-order signal alone;
    # pairs sit adjacently so error blocks keep both members
    paths = ou_dephasing_paths(model, n_slices, dt, (n_paths + 1) // 2, rng)
    mirrored = np.empty((2 * len(paths), n_slices))
    mirrored[0::2] = paths
    mirrored[1::2] = 2.0 * model.eta_bar_z - paths
    return ensemble_dephasing_paths(vmid, dt, mirrored[:n_paths])


def _jackknife(block_values: np.ndarray, full: float) -> float:
    n = block_values.size
    if n < 2:
        return 0.0
    loo = (n * full - block_values) / (n - 1)
    return float(math.sqrt(max(0.0, (n - 1) / n * np.sum((loo - loo.mean()) ** 2))))


def average_deviation(
    spec,
    model: NoiseModel,
    n_paths: int = 10_000,
    seed: int = 0,
    n_slices: int = DEFAULT_SLICES,
    n_blocks: int = 20,
) -> tuple[float, float]:
    """Deviation of the ensemble-averaged correction unitary, with a
    block-jackknife standard error."""
    us = ensemble_unitaries(spec, model, n_paths, seed, n_slices)
    u0 = noiseless_unitary(spec, n_slices)
    mean_uc = u0.conj().T @ us.mean(axis=0)
    d = deviation_norm(mean_uc)
    n_blocks = min(n_blocks, len(us))
    if n_blocks < 2:
        return d, 0.0
    block_d = np.array(
        [
            deviation_norm(u0.conj().T @ b.mean(axis=0))
            for b in np.array_split(us, n_blocks)
        ]
    )
    return d, _jackknife(block_d, d)


def map_deviation(
    spec,
    model: NoiseModel,
    n_paths: int = 10_000,
    seed: int = 0,
    n_slices: int = DEFAULT_SLICES,
    n_blocks: int = 20,
) -> tuple[float, float]:
    """Worst Pauli-axis deviation of the averaged Heisenberg map: how far
    <U_c' sigma U_c> drifts from sigma over the ensemble."""
    us = ensemble_unitaries(spec, model, n_paths, seed, n_slices)
    u0 = noiseless_unitary(spec, n_slices)
    frames = np.stack([u0 @ sigma @ u0.conj().T for sigma in PAULI])

    def worst(batch: np.ndarray) -> float:
        out = 0.0
        for alpha in range(3):
            mapped = np.einsum(
                "pji,jk,pkl->il", batch.conj(), frames[alpha], batch
            ) / len(batch)
            out = max(out, float(np.linalg.norm(mapped - PAULI[alpha], ord=2)))
        return out

    d = worst(us)
    n_blocks = min(n_blocks, len(us))
    if n_blocks < 2:
        return d, 0.0
    block_d = np.array([worst(b) for b in np.array_split(us, n_blocks)])
    return d, _jackknife(block_d, d)


# ---------------------------------------------------------------------------
# Scaling fits


@dataclass
class VerificationReport:
    """Log-log scaling fit of a deviation metric against noise strength."""

    scales: np.ndarray
    deviations: np.ndarray
    errors: np.ndarray
    slope: float
    slope_error: float
    target_slope: float | None = None

    @property
    def passed(self) -> bool:
        if self.target_slope is None:
            raise ValueError("no target slope was set for this report")
        return self.slope >= self.target_slope

    def summary(self) -> str:
        target = "" if self.target_slope is None else f" (target {self.target_slope:g})"
        return (
            f"slope {self.slope:.2f} +- {self.slope_error:.2f}{target} over "
            f"{self.scales.min():g}..{self.scales.max():g}"
        )


def _wls_slope(x: np.ndarray, y: np.ndarray, sigma: np.ndarray) -> tuple[float, float]:
    if np.all(sigma <= 0.0):
        w = np.ones_like(x)
    else:
        w = 1.0 / np.maximum(sigma, 1e-3 * np.max(sigma)) ** 2
    sw = w.sum()
    sx = (w * x).sum()
    sy = (w * y).sum()
    sxx = (w * x * x).sum()
    sxy = (w * x * y).sum()
    delta = sw * sxx - sx * sx
    slope = (sw * sxy - sx * sy) / delta
    return float(slope), float(math.sqrt(sw / delta))


def _validate_scales(scales: np.ndarray) -> np.ndarray:
    scales = np.asarray(scales, dtype=float)
    if scales.size < 5:
        raise ValueError("slope fits need at least 5 scale points")
    if np.max(scales) / np.min(scales) < 10.0**1.5 * (1.0 - 1e-12):
        raise ValueError("scale points must span at least 1.5 decades")
    return scales


def scaling_exponent(
    spec,
    model: NoiseModel,
    scales,
    n_paths: int = 10_000,
    seed: int = 0,
    n_slices: int = DEFAULT_SLICES,
    metric: str = "average",
    target_slope: float | None = None,
) -> VerificationReport:
    """Fit the scaling exponent of a deviation metric over noise strengths.

    Each scale point sees the noise a pulse shortened by that factor would
    see: amplitudes multiply by the scale and any finite correlation time
    divides by it (duration_scaled). Realizations are re-drawn with a
    per-scale offset of the seed so the fit points are statistically
    independent.
    """
    scales = _validate_scales(scales)
    measure = average_deviation if metric == "average" else map_deviation
    if metric not in ("average", "map"):
        raise ValueError(f"unknown metric {metric!r}")
    deviations = np.empty(scales.size)
    errors = np.empty(scales.size)
    for k, lam in enumerate(scales):
        deviations[k], errors[k] = measure(
            spec, model.duration_scaled(float(lam)), n_paths, seed + k, n_slices
        )
    slope, slope_err = _wls_slope(
        np.log(scales), np.log(deviations), errors / np.maximum(deviations, 1e-300)
    )
    return VerificationReport(
        scales=scales,
        deviations=deviations,
        errors=errors,
        slope=slope,
        slope_error=slope_err,
        target_slope=target_slope,
    )


@dataclass
class AveragingConsistency:
    """Paired scaling fits of the average and the Heisenberg-map metrics."""

    average: VerificationReport
    heisenberg: VerificationReport

    @property
    def slope_gap(self) -> float:
        return abs(self.average.slope - self.heisenberg.slope)

    @property
    def consistent(self) -> bool:
        tol = max(0.3, 3.0 * (self.average.slope_error + self.heisenberg.slope_error))
        return self.slope_gap <= tol


def averaging_consistency(
    spec,
    model: NoiseModel,
    scales,
    n_paths: int = 10_000,
    seed: int = 0,
    n_slices: int = DEFAULT_SLICES,
    target_slope: float | None = None,
) -> AveragingConsistency:
    """Check that the averaged unitary and the averaged Heisenberg map lose
    accuracy with the same exponent, which is the operational meaning of the
    design objective for ensembles."""
    return AveragingConsistency(
        average=scaling_exponent(
            spec, model, scales, n_paths, seed, n_slices, "average", target_slope
        ),
        heisenberg=scaling_exponent(
            spec, model, scales, n_paths, seed, n_slices, "map", target_slope
        ),
    )


# ---------------------------------------------------------------------------
# Magnus reconstruction oracle


def magnus_unitary(spec, axis: int, strength: float) -> np.ndarray:
    """Second-order Magnus prediction of the correction unitary for a
    constant noise vector along one axis.

    The first two ordered-integral terms give the rotation vector
    strength * C_axis + strength^2 * K_axis; the comparison against
    simulate_exact is the independent check that the moment integrals carry
    the correct conventions end to end.
    """
    if axis not in (0, 1, 2):
        raise ValueError("axis must be 0, 1 or 2")
    m = moment_integrals(spec)
    h = strength * m.first[:, axis] + strength**2 * m.second[:, axis]
    angle = float(np.linalg.norm(h))
    if angle == 0.0:
        return _ID2.copy()
    return su2_rotation(h / angle, 2.0 * angle)
