"""EWAM/IRS reflection states and reduction to the echo coefficients ``(d, c)``.

With ``d`` and ``c`` built here the normalised echo power reads
``|d^H theta + c|^2``.
"""

from dataclasses import dataclass
import json
from pathlib import Path

import numpy as np

from .exceptions import ConfigError, InvalidDimensionError
from .validation import as_complex_vector

THETA_SLACK = 1e-9


@dataclass(frozen=True)
class EwamProfile:
    """Per-element absorbing efficiency ``p`` and residual reflection phase ``psi``."""

    absorb: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.absorb, dtype=float))
        psi = np.atleast_1d(np.asarray(self.phase, dtype=float))
        if p.ndim != 1 or p.shape != psi.shape:
            raise InvalidDimensionError(
                f"absorb and phase must be 1-D of equal length, got {p.shape} and {psi.shape}"
            )
        if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
            raise ConfigError("absorbing efficiencies must lie in [0, 1]")
        if not np.all(np.isfinite(psi)):
            raise ConfigError("EWAM phases must be finite")
        object.__setattr__(self, "absorb", p)
        object.__setattr__(self, "phase", np.mod(psi, 2 * np.pi))

    @classmethod
    def uniform(cls, n, p, rng):
        """``n`` elements with common efficiency ``p`` and phases uniform on [0, 2pi)."""
        return cls(np.full(n, float(p)), rng.uniform(0.0, 2 * np.pi, size=n))

    @classmethod
    def from_records(cls, records):
        try:
            p = [float(r["p"]) for r in records]
            psi = [float(r["psi"]) for r in records]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"EWAM records need numeric 'p' and 'psi' fields: {exc}") from exc
        return cls(np.array(p), np.array(psi))

    @classmethod
    def from_json(cls, path):
        with open(path, encoding="utf-8") as fh:
            records = json.load(fh)
        if not isinstance(records, list):
            raise ConfigError(f"{path}: expected a JSON array of {{p, psi}} records")
        return cls.from_records(records)

    def to_records(self):
        return [{"p": float(p), "psi": float(s)} for p, s in zip(self.absorb, self.phase)]

    def to_json(self, path):
        Path(path).write_text(json.dumps(self.to_records()), encoding="utf-8")

    def __len__(self):
        return self.absorb.shape[0]

    @property
    def coefficients(self):
        """Reflection coefficients ``sqrt(1 - p) * exp(1j * psi)``."""
        return np.sqrt(1.0 - self.absorb) * np.exp(1j * self.phase)


@dataclass(frozen=True)
class IrsState:
    theta: np.ndarray

    def __post_init__(self):
        theta = as_complex_vector(self.theta, "theta")
        if theta.size and np.max(np.abs(theta)) > 1 + THETA_SLACK:
            raise ConfigError(
                f"IRS coefficients exceed unit modulus (max {np.max(np.abs(theta)):.12g})"
            )
        object.__setattr__(self, "theta", theta)

    @property
    def amplitude(self):
        return np.abs(self.theta)

    @property
    def phase(self):
        return np.mod(np.angle(self.theta), 2 * np.pi)

    def __len__(self):
        return self.theta.shape[0]


@dataclass(frozen=True)
class EchoCoefficients:
    """Reduced problem data: cascaded IRS response ``d`` and EWAM reflection gain ``c``."""

    d: np.ndarray
    c: complex

    def __post_init__(self):
        object.__setattr__(self, "d", as_complex_vector(self.d, "d"))
        c = complex(self.c)
        if not np.isfinite(c):
            raise ConfigError("c must be finite")
        object.__setattr__(self, "c", c)

    @property
    def n_irs(self):
        return self.d.shape[0]

    @property
    def abs_c(self):
        return abs(self.c)

    @property
    def margin(self):
        """``N1 - |c|``; non-negative means the echo can be cancelled exactly."""
        return self.n_irs - self.abs_c

    def objective(self, theta):
        """Normalised echo power ``|d^H theta + c|^2``."""
        theta = as_complex_vector(theta, "theta", length=self.n_irs)
        return abs(np.vdot(self.d, theta) + self.c) ** 2


def build_echo_coefficients(a_irs, a_ewam, ewam):
    """Compute ``d_n = conj(a_I,n^2)`` and ``c = sum_n a_Ew,n^2 gamma_n``."""
    a_irs = as_complex_vector(a_irs, "a_irs")
    a_ewam = as_complex_vector(a_ewam, "a_ewam")
    if a_ewam.shape[0] != len(ewam):
        raise InvalidDimensionError(
            f"EWAM response has {a_ewam.shape[0]} entries but profile has {len(ewam)}"
        )
    d = np.conj(a_irs * a_irs)
    c = np.sum(a_ewam * a_ewam * ewam.coefficients) if len(ewam) else 0.0
    return EchoCoefficients(d, c)


def _coefficients(state):
    if isinstance(state, IrsState):
        return state.theta
    if isinstance(state, EwamProfile):
        return state.coefficients
    return as_complex_vector(state, "state")


def apply_reflection(channel_in, state, channel_out):
    """Cascaded echo matrix ``G_out @ diag(coeffs) @ G_in``.

    ``channel_in`` is the radar-to-surface channel (N x M); ``channel_out`` the
    surface-to-radar channel (M x N).  Either may be a :class:`LosChannel` or
    a plain matrix.
    """
    g_in = np.asarray(getattr(channel_in, "matrix", channel_in))
    g_out = np.asarray(getattr(channel_out, "matrix", channel_out))
    coeffs = _coefficients(state)
    if g_in.ndim != 2 or g_out.ndim != 2:
        raise InvalidDimensionError("channels must be matrices")
    n = coeffs.shape[0]
    if g_in.shape[0] != n or g_out.shape[1] != n:
        raise InvalidDimensionError(
            f"cannot chain {g_out.shape} @ diag({n}) @ {g_in.shape}"
        )
    return (g_out * coeffs) @ g_in
