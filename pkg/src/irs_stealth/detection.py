"""Radar-side quantities: echo synthesis, received SNR and detection probability."""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import special

from .exceptions import ConfigError, InvalidDimensionError
from .geometry import RadarArrayShape
from .surface import apply_reflection
from .validation import check_count, check_positive, check_probability

_TAIL_TOL = 1e-16
_SATURATION = 40.0  # exp(-40) ~ 4e-18
_CHUNK = 1 << 16


@dataclass(frozen=True)
class RadarConfig:
    shape: RadarArrayShape = field(default_factory=RadarArrayShape)
    noise_variance: float = 5e-13
    p_fa: float = 1e-4
    samples: int = 64

    def __post_init__(self):
        check_positive(self.noise_variance, "noise_variance")
        check_probability(self.p_fa, "p_fa", open_interval=True)
        check_count(self.samples, "samples")
        if self.samples <= self.shape.size:
            raise ConfigError(
                f"samples per block L={self.samples} must exceed the {self.shape.size} radar antennas"
            )


@dataclass(frozen=True)
class ReceivedBlock:
    y: np.ndarray
    hypothesis: str


@dataclass(frozen=True)
class DetectionCurve:
    snr: np.ndarray
    p_d: np.ndarray
    p_fa: float


def _check_noise(noise_variance):
    if not noise_variance > 0:
        raise ConfigError(f"noise variance must be positive, got {noise_variance}")
    return float(noise_variance)


def echo_matrix(channels, theta, gamma):
    """Round-trip channel ``G_IR Theta G_RI + G_EwR Gamma G_REw`` (M x M)."""
    g_ri, g_rew = channels.g_ri.matrix, channels.g_rew.matrix
    return apply_reflection(g_ri, theta, g_ri.T) + apply_reflection(g_rew, gamma, g_rew.T)


def snr_full(channels, theta, gamma, noise_variance):
    """SNR from the full channel matrices."""
    noise_variance = _check_noise(noise_variance)
    h = echo_matrix(channels, theta, gamma)
    return float(np.linalg.norm(h, "fro") ** 2 / noise_variance)


def snr_factored(coeffs, theta, radar_norm, noise_variance):
    """SNR via the scalar factorisation ``|d^H theta + c|^2 * radar_norm / sigma^2``."""
    theta = getattr(theta, "theta", theta)
    return coeffs.objective(theta) * radar_norm / _check_noise(noise_variance)


def _series_length(mu, tol=_TAIL_TOL):
    """Smallest ``K > mu`` whose Poisson(mu) tail beyond ``K`` is bounded by ``tol``."""
    k = int(mu + 10.0 * math.sqrt(mu) + 20)
    while True:
        log_w = -mu + k * math.log(mu) - math.lgamma(k + 1)
        ratio = mu / (k + 1)
        # geometric bound on sum_{i > k} Pois(i; mu)
        if log_w + math.log(ratio / (1.0 - ratio)) < math.log(tol):
            return k
        k += 10


def marcum_q1(a, b):
    """First-order Marcum Q function by its Poisson-mixture series.

    ``Q1(a, b) = sum_k Pois(k; a^2/2) * Gamma~(k+1, b^2/2)`` with ``Gamma~`` the
    regularised upper incomplete gamma.  For ``a > b`` the complement series
    (regularised lower gamma) is summed so values near 1 keep full precision.
    Only the window of ``k`` carrying non-negligible Poisson mass is visited:
    below it a Chernoff bound, above it a geometric bound, each under 1e-16
    (well inside the 1e-12 accuracy target).
    """
    a = float(a)
    b = float(b)
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ConfigError("Marcum Q arguments must be finite")
    if a < 0 or b < 0:
        raise ConfigError(f"Marcum Q arguments must be non-negative, got a={a}, b={b}")
    if b == 0:
        return 1.0
    mu = 0.5 * a * a
    x = 0.5 * b * b
    if mu == 0:
        return math.exp(-x)
    # 1 - Q1 <= exp(-(a-b)^2/2) for a > b and Q1 <= exp(-(b-a)^2/2) for b > a
    if 0.5 * (a - b) ** 2 > _SATURATION:
        return 1.0 if a > b else 0.0
    k_lo = max(0, int(mu - 12.0 * math.sqrt(mu)))
    k_hi = _series_length(mu)
    complement = a > b
    total = 0.0
    for start in range(k_lo, k_hi + 1, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, k_hi + 1), dtype=float)
        weights = np.exp(-mu + k * math.log(mu) - special.gammaln(k + 1))
        tail = special.gammainc(k + 1, x) if complement else special.gammaincc(k + 1, x)
        total += float(np.dot(weights, tail))
    q = 1.0 - total if complement else total
    return min(max(q, 0.0), 1.0)


def detection_probability(snr, p_fa):
    """``Q1(sqrt(2 snr), sqrt(-2 ln p_fa))``."""
    p_fa = check_probability(p_fa, "p_fa", open_interval=True)
    if snr < 0:
        raise ConfigError(f"snr must be non-negative, got {snr}")
    return marcum_q1(math.sqrt(2.0 * snr), math.sqrt(-2.0 * math.log(p_fa)))


def detection_curve(snrs, p_fa):
    snrs = np.asarray(snrs, dtype=float)
    return DetectionCurve(snrs, np.array([detection_probability(s, p_fa) for s in snrs]), float(p_fa))


def orthonormal_waveform(m, n_samples, rng):
    """Random ``m x L`` waveform with exactly orthonormal rows (``S S^H = I``)."""
    g = (rng.standard_normal((n_samples, m)) + 1j * rng.standard_normal((n_samples, m))) / math.sqrt(2)
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return q.T.conj()


def synthesize_block(channels, theta, gamma, radar, hypothesis="H1", rng_seed=None):
    """Draw one received block ``Y`` (M x L) under ``H0`` or ``H1``."""
    if hypothesis not in ("H0", "H1"):
        raise ConfigError(f"hypothesis must be 'H0' or 'H1', got {hypothesis!r}")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    m, n_samples = radar.shape.size, radar.samples
    if channels.a_radar.shape[0] != m:
        raise InvalidDimensionError(
            f"channels built for {channels.a_radar.shape[0]} radar antennas, config has {m}"
        )
    scale = math.sqrt(radar.noise_variance / 2)
    z = scale * (rng.standard_normal((m, n_samples)) + 1j * rng.standard_normal((m, n_samples)))
    if hypothesis == "H0":
        return ReceivedBlock(z, "H0")
    s = orthonormal_waveform(m, n_samples, rng)
    return ReceivedBlock(echo_matrix(channels, theta, gamma) @ s + z, "H1")


def empirical_snr(blocks, noise_variance):
    """Moment estimate ``(mean ||Y||_F^2 - M L sigma^2) / sigma^2`` over H1 blocks."""
    energies = [np.linalg.norm(b.y, "fro") ** 2 for b in blocks]
    m, n_samples = blocks[0].y.shape
    return (float(np.mean(energies)) - m * n_samples * noise_variance) / noise_variance
