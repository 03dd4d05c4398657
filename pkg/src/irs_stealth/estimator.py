"""scikit-learn style wrapper around the reflection design.

``fit`` fixes the surface layout and the EWAM profile (and optionally
precomputes the offline lookup table); ``predict`` maps sensed angles to IRS
reflection vectors.  Angles are passed as an ``(n_samples, 1 or 2)`` array of
azimuth[, elevation] in radians.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import ConfigError
from .geometry import AnglePair, SurfaceLayout, surface_responses
from .harness import build_lookup_table
from .optimizer import MODES, SolverOptions, baseline_reflection
from .surface import EwamProfile, build_echo_coefficients


def _check_angles(X):
    X = check_array(X, dtype=float)
    if X.shape[1] not in (1, 2):
        raise ConfigError(f"expected 1 or 2 angle columns (azimuth[, elevation]), got {X.shape[1]}")
    if X.shape[1] == 1:
        X = np.hstack([X, np.zeros_like(X)])
    return X


class ReflectionDesigner(TransformerMixin, BaseEstimator):
    """Design IRS reflections that cancel the residual EWAM echo.

    Parameters
    ----------
    n_irs, n_ewam : int
        Tunable and absorbing element counts; ``n_ewam`` must be even.
    absorb_p : float
        Common absorbing efficiency used when ``ewam`` is not given.
    mode : str
        ``full`` (proposed), ``phase_only``, ``amplitude_only``,
        ``random_phase`` or ``none``.
    ewam : EwamProfile, optional
        Measured EWAM profile; drawn from ``random_state`` otherwise.
    use_table : bool
        Precompute the lookup table in ``fit`` and answer ``predict`` from the
        nearest stored azimuth (``full`` mode only).
    """

    def __init__(self, n_irs=20, n_ewam=50, absorb_p=0.7, mode="full", ewam=None,
                 random_state=None, use_table=False, angle_step_deg=1.0, gap_tol=1e-8):
        self.n_irs = n_irs
        self.n_ewam = n_ewam
        self.absorb_p = absorb_p
        self.mode = mode
        self.ewam = ewam
        self.random_state = random_state
        self.use_table = use_table
        self.angle_step_deg = angle_step_deg
        self.gap_tol = gap_tol

    def fit(self, X=None, y=None):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {MODES}")
        if X is not None:
            _check_angles(X)
        self.layout_ = SurfaceLayout.from_counts(self.n_irs, self.n_ewam)
        rng = np.random.default_rng(self.random_state)
        if self.ewam is None:
            self.ewam_ = EwamProfile.uniform(self.n_ewam, self.absorb_p, rng)
        else:
            if len(self.ewam) != self.n_ewam:
                raise ConfigError(f"ewam profile has {len(self.ewam)} elements, expected {self.n_ewam}")
            self.ewam_ = self.ewam
        self.opts_ = SolverOptions(gap_tol=self.gap_tol, mode=self.mode)
        self._phase_rng = rng
        self.table_ = None
        if self.use_table:
            if self.mode != "full":
                raise ConfigError("use_table requires mode='full'")
            self.table_ = build_lookup_table(self.layout_, self.ewam_, self.angle_step_deg, 0.0, self.opts_)
        return self

    def _coeffs(self, row):
        a_irs, a_ewam = surface_responses(AnglePair(row[0], row[1]), self.layout_)
        return build_echo_coefficients(a_irs, a_ewam, self.ewam_)

    def predict(self, X):
        """Reflection vectors, shape ``(n_samples, n_irs)``."""
        check_is_fitted(self, "layout_")
        X = _check_angles(X)
        out = np.empty((X.shape[0], self.layout_.n_irs), dtype=complex)
        for i, row in enumerate(X):
            if self.table_ is not None:
                out[i] = self.table_.lookup(AnglePair(row[0], row[1]))[1]
            else:
                out[i] = baseline_reflection(self._coeffs(row), self.mode, self._phase_rng, self.opts_).theta
        return out

    def transform(self, X):
        """Residual normalised echo power ``|d^H theta + c|^2`` per sample, shape ``(n, 1)``."""
        X = _check_angles(X)
        thetas = self.predict(X)
        power = [self._coeffs(row).objective(th) for row, th in zip(X, thetas)]
        return np.asarray(power).reshape(-1, 1)

    def score(self, X, y=None):
        """Negative mean residual echo power (higher is stealthier)."""
        return -float(np.mean(self.transform(X)))
