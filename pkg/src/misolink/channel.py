"""Flat Rayleigh MISO channel, feedback-delay aging, and training-based
channel estimation.

The channel vector h holds one complex gain per transmit antenna, i.i.d.
CN(0,1).  Feedback delay is modeled as one Gauss-Markov step
h' = rho*h + sqrt(1-rho^2)*g between the estimation instant and the data
instant, with rho either set directly or derived from Doppler and delay
via the J0 correlation.  Estimation is least-squares: the estimate is the
true channel plus white complex noise of variance n0 / (pilots * ratio * es)
per entry, which collapses to an exact copy when n0 = 0.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, ParameterError
from .numerics import bessel_j0, cgauss_vec
from .rng import RngStream, cgauss_block


@dataclass
class ChannelState:
    """Channel realization at one time instant."""

    h: np.ndarray
    time_index: int = 0

    @property
    def nt(self) -> int:
        return len(self.h)


@dataclass
class DelayModel:
    """Temporal correlation between estimation and data instants."""

    rho: float = 1.0

    def __post_init__(self):
        if not abs(self.rho) <= 1.0:
            raise ParameterError(f"correlation coefficient must satisfy |rho| <= 1, got {self.rho}")


@dataclass
class TrainingModel:
    """Downlink pilot configuration for channel estimation.

    pilot_energy_ratio is the pilot symbol energy relative to the data
    symbol energy; math.inf gives exact (noiseless) estimates at any n0.
    """

    pilots_per_antenna: int = 1
    pilot_energy_ratio: float = 1.0
    estimator: str = "ls"

    def __post_init__(self):
        if self.pilots_per_antenna < 1:
            raise ParameterError(f"pilots_per_antenna must be >= 1, got {self.pilots_per_antenna}")
        if not self.pilot_energy_ratio > 0:
            raise ParameterError(f"pilot_energy_ratio must be > 0, got {self.pilot_energy_ratio}")
        if self.estimator != "ls":
            raise ParameterError(f"unsupported estimator {self.estimator!r}")

    def error_variance(self, es: float, n0: float) -> float:
        """Per-entry estimation error variance at the given operating point."""
        if not es > 0:
            raise ParameterError(f"symbol energy must be > 0, got {es}")
        if math.isinf(self.pilot_energy_ratio):
            return 0.0
        return n0 / (self.pilots_per_antenna * self.pilot_energy_ratio * es)


@dataclass
class ChannelEstimate:
    h_hat: np.ndarray
    sigma_e2: float = 0.0


def draw_initial(nt: int, rng: RngStream) -> ChannelState:
    """Fresh CN(0, I) channel at time 0."""
    if nt < 1:
        raise DimensionError(f"antenna count must be >= 1, got {nt}")
    return ChannelState(h=cgauss_vec(nt, rng), time_index=0)


def evolve(state: ChannelState, delay: DelayModel, rng: RngStream) -> ChannelState:
    """One Gauss-Markov aging step; preserves the CN(0, I) marginal.

    rho = 1 returns the identical channel (the innovation term is scaled
    by an exact 0.0), rho = 0 draws an independent one.
    """
    rho = delay.rho
    innov = cgauss_vec(state.nt, rng)
    scale = math.sqrt(max(0.0, 1.0 - rho * rho))
    return ChannelState(h=rho * state.h + scale * innov, time_index=state.time_index + 1)


def jakes_rho(fd_hz: float, tau_s: float) -> float:
    """Doppler/delay correlation rho = J0(2 pi fd tau), clamped to [-1, 1]."""
    if fd_hz < 0 or tau_s < 0:
        raise ParameterError(f"fd_hz and tau_s must be >= 0, got ({fd_hz}, {tau_s})")
    return min(1.0, max(-1.0, bessel_j0(2.0 * math.pi * fd_hz * tau_s)))


def estimate_channel(
    state: ChannelState, training: TrainingModel, es: float, n0: float, rng: RngStream
) -> ChannelEstimate:
    """LS estimate: h plus white error of the training-determined variance."""
    sigma_e2 = training.error_variance(es, n0)
    err = cgauss_vec(state.nt, rng)
    return ChannelEstimate(h_hat=state.h + math.sqrt(sigma_e2) * err, sigma_e2=sigma_e2)


def estimate_effective(
    g_true: complex, t_eff: int, es: float, n0: float, rng: RngStream
) -> tuple[complex, float]:
    """Half-round estimate of the beamformed scalar channel.

    The receiver observes t_eff pilots through the already-selected
    beamformer, so the estimate error variance is n0 / (t_eff * es).
    """
    if t_eff < 1:
        raise ParameterError(f"t_eff must be >= 1, got {t_eff}")
    if not es > 0:
        raise ParameterError(f"symbol energy must be > 0, got {es}")
    sigma2 = n0 / (t_eff * es)
    z = complex(cgauss_block(rng.key, 1, rng.advance(2))[0])
    return g_true + math.sqrt(sigma2) * z, sigma2
