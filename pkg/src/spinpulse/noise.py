"""Classical noise statistics and seeded realization generators.

A NoiseModel carries the moments the design conditions and Magnus terms need
(mean and variance of the dephasing component, a shared transverse variance)
plus an optional Ornstein-Uhlenbeck correlation time for time-dependent
realizations. Amplitudes are in units of 1/tau_p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter


@dataclass(frozen=True)
class NoiseModel:
    """Cylindrically symmetric classical noise.

    eta_bar_z: mean of the z (dephasing) component.
    s_z: standard deviation of the z component.
    s_x: standard deviation shared by the two zero-mean transverse components.
    tau_c: correlation time of the stationary OU process driving the z
        component; inf means a static (quasi-DC) draw per realization.
    """

    eta_bar_z: float = 0.0
    s_z: float = 0.0
    s_x: float = 0.0
    tau_c: float = math.inf

    def __post_init__(self):
        if self.s_z < 0.0 or self.s_x < 0.0:
            raise ValueError("standard deviations must be nonnegative")
        if not self.tau_c > 0.0:
            raise ValueError("correlation time must be positive")

    @property
    def s_z2(self) -> float:
        return self.s_z**2

    @property
    def s_x2(self) -> float:
        return self.s_x**2

    @property
    def g1(self) -> float:
        """Cusp slope of the z autocorrelation at zero lag, d<nn>/d|dt|.

        Zero for static noise; the OU correlation s_z^2 exp(-|dt|/tau_c)
        starts with slope -s_z^2 / tau_c.
        """
        if math.isinf(self.tau_c):
            return 0.0
        return -self.s_z2 / self.tau_c

    @property
    def static(self) -> bool:
        return math.isinf(self.tau_c)

    def scaled(self, lam: float) -> "NoiseModel":
        """The same noise shape with every amplitude multiplied by lam."""
        return replace(
            self, eta_bar_z=lam * self.eta_bar_z, s_z=lam * self.s_z, s_x=lam * self.s_x
        )

    def duration_scaled(self, lam: float) -> "NoiseModel":
        """The noise seen by a pulse shortened to lam times its duration.

        In pulse-duration units, shrinking the pulse against a fixed physical
        noise process multiplies every amplitude by lam and stretches the
        correlation time by 1/lam. For static noise this reduces to scaled().
        The distinction matters: holding tau_c fixed while amplitudes shrink
        would keep the ratio duration/tau_c constant, and the correlation-cusp
        contribution would then flatten the observed scaling exponent.
        """
        model = self.scaled(lam)
        if math.isinf(self.tau_c):
            return model
        return replace(model, tau_c=self.tau_c / lam)


def static_vectors(model: NoiseModel, n_paths: int, rng: np.random.Generator) -> np.ndarray:
    """Per-realization constant noise vectors, shape (n_paths, 3)."""
    out = np.empty((n_paths, 3))
    out[:, 0] = model.s_x * rng.standard_normal(n_paths)
    out[:, 1] = model.s_x * rng.standard_normal(n_paths)
    out[:, 2] = model.eta_bar_z + model.s_z * rng.standard_normal(n_paths)
    return out


def ou_dephasing_paths(
    model: NoiseModel, n_slices: int, dt: float, n_paths: int, rng: np.random.Generator
) -> np.ndarray:
    """Stationary OU realizations of the z component at slice midpoints.

    Uses the exact one-step transition (no discretization error): the first
    sample is a stationary draw and successive samples follow the AR(1)
    recursion eta_k = mean + rho (eta_{k-1} - mean) + s sqrt(1-rho^2) w_k
    with rho = exp(-dt / tau_c). Returns shape (n_paths, n_slices).
    """
    if model.static:
        value = model.eta_bar_z + model.s_z * rng.standard_normal(n_paths)
        return np.repeat(value[:, None], n_slices, axis=1)
    rho = math.exp(-dt / model.tau_c)
    innovations = np.empty((n_paths, n_slices))
    innovations[:, 0] = model.s_z * rng.standard_normal(n_paths)
    innovations[:, 1:] = (
        model.s_z * math.sqrt(1.0 - rho * rho) * rng.standard_normal((n_paths, n_slices - 1))
    )
    deviations = lfilter([1.0], [1.0, -rho], innovations, axis=1)
    return model.eta_bar_z + deviations
