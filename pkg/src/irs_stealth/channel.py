"""Far-field line-of-sight channels between the radar and the target surfaces."""

from dataclasses import dataclass, field
import math

import numpy as np

from .exceptions import ConfigError
from .geometry import AnglePair, surface_responses, upa_response
from .validation import as_complex_vector, check_finite, check_positive


def doppler_frequency(speed, angles, wavelength):
    """Doppler shift ``v * cos(el) * cos(az) / wavelength`` in Hz."""
    wavelength = check_positive(wavelength, "wavelength")
    return speed * math.cos(angles.elevation) * math.cos(angles.azimuth) / wavelength


@dataclass(frozen=True)
class PathGain:
    """Complex LoS path gain ``sqrt(beta) / d * exp(-2j*pi*(d/lambda + f*T_c))``."""

    reference_gain: float
    distance: float
    wavelength: float
    doppler: float = 0.0
    coherence_interval: float = 1e-3

    def __post_init__(self):
        if not self.distance > 0:
            raise ConfigError(f"distance must be positive, got {self.distance}")
        if self.reference_gain < 0:
            raise ConfigError(f"reference_gain must be >= 0, got {self.reference_gain}")
        check_positive(self.wavelength, "wavelength")
        check_finite(self.doppler, "doppler")
        check_finite(self.coherence_interval, "coherence_interval")

    @property
    def modulus(self):
        return math.sqrt(self.reference_gain) / self.distance

    @property
    def value(self):
        # reduce the (huge) cycle count modulo 1 before forming the phase
        cycles = math.fmod(self.distance / self.wavelength, 1.0)
        cycles += math.fmod(self.doppler * self.coherence_interval, 1.0)
        return self.modulus * np.exp(-2j * np.pi * cycles)


@dataclass(frozen=True)
class ScenarioGeometry:
    """One coherence-block snapshot: radar at the origin, target at ``distance``.

    Reciprocity holds by construction, so one path gain serves both
    directions of every radar/surface link.
    """

    distance: float = 5000.0
    speed: float = 300.0
    radar_angles: AnglePair = field(default_factory=lambda: AnglePair(0.0, 0.0))
    surface_angles: AnglePair = field(default_factory=lambda: AnglePair(0.0, 0.0))
    reference_gain: float = 1.0
    wavelength: float = 0.1
    coherence_interval: float = 1e-3

    @classmethod
    def from_position(cls, position, **kwargs):
        """Geometry for a target at planar ``position`` (metres)."""
        distance = float(np.hypot(*position))
        if distance == 0:
            raise ConfigError("target position coincides with the radar")
        return cls(distance=distance, **kwargs)

    def path_gain(self):
        f = doppler_frequency(self.speed, self.surface_angles, self.wavelength)
        return PathGain(self.reference_gain, self.distance, self.wavelength, f, self.coherence_interval)


@dataclass(frozen=True)
class LosChannel:
    matrix: np.ndarray
    gain: PathGain

    @property
    def T(self):
        """Reverse-link channel (reciprocity)."""
        return LosChannel(self.matrix.T, self.gain)


def los_channel(geom, rx_response, tx_response):
    """Rank-one channel ``alpha * rx_response @ tx_response.T``."""
    rx = as_complex_vector(rx_response, "rx_response")
    tx = as_complex_vector(tx_response, "tx_response")
    gain = geom.path_gain()
    return LosChannel(gain.value * np.outer(rx, tx), gain)


@dataclass(frozen=True)
class ScenarioChannels:
    """All radar-side channels of one snapshot plus the responses they were built from."""

    g_ri: LosChannel  # radar -> IRS, n_irs x M
    g_rew: LosChannel  # radar -> EWAM, n_ewam x M
    a_radar: np.ndarray
    a_irs: np.ndarray
    a_ewam: np.ndarray

    @property
    def alpha(self):
        return self.g_ri.gain.value

    @property
    def radar_norm(self):
        """``||alpha^2 a_R a_R^T||_F^2``, the scenario constant in the SNR."""
        m = self.a_radar.shape[0]
        return abs(self.alpha) ** 4 * float(m) ** 2


def build_channels(geom, layout, radar):
    a_r = upa_response(geom.radar_angles, radar)
    a_i, a_ew = surface_responses(geom.surface_angles, layout)
    return ScenarioChannels(
        g_ri=los_channel(geom, a_i, a_r),
        g_rew=los_channel(geom, a_ew, a_r),
        a_radar=a_r,
        a_irs=a_i,
        a_ewam=a_ew,
    )
