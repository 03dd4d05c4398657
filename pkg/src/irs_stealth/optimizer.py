"""IRS reflection design: minimise ``|d^H theta + c|^2`` s.t. ``|theta_n| <= 1``.

The proposed design goes through the KKT system.  For fixed multipliers the
stationarity condition gives ``theta = -c Q^{-1} d`` with
``Q = d d^H + diag(lam)``; Sherman-Morrison reduces this to

    theta_n = -c d_n / (lam_n (1 + s)),    s = sum_k |d_k|^2 / lam_k

and the dual function to ``g(lam) = |c|^2 / (1 + s) - sum(lam)``.  The
multipliers come from maximising ``g`` directly, which replaces the generic
SDP formulation of the dual.
"""

from dataclasses import dataclass, field, replace
import logging
import math

import numpy as np
from scipy.optimize import lsq_linear

from .exceptions import ConfigError, SolverError
from .surface import THETA_SLACK, EchoCoefficients, IrsState

logger = logging.getLogger(__name__)

MODES = ("full", "phase_only", "amplitude_only", "random_phase", "none")

_UNIFORM_RTOL = 1e-12


@dataclass(frozen=True)
class SolverOptions:
    gap_tol: float = 1e-8
    max_iter: int = 10_000
    pg_tol: float = 1e-14
    ascent_grad_tol: float = 1e-12
    mode: str = "full"
    amplitude_phase: float = 0.0

    def __post_init__(self):
        if not self.gap_tol > 0:
            raise ConfigError(f"gap_tol must be positive, got {self.gap_tol}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; choose from {MODES}")


@dataclass
class SolveReport:
    theta: np.ndarray
    lam: np.ndarray
    primal_value: float
    dual_value: float
    residuals: dict = field(default_factory=dict)
    iterations: int = 0
    method: str = "kkt"

    @property
    def state(self):
        return IrsState(self.theta)

    @property
    def duality_gap(self):
        return self.primal_value - self.dual_value

    def to_dict(self):
        return {
            "theta": [[float(z.real), float(z.imag)] for z in self.theta],
            "lambda": [float(v) for v in self.lam],
            "primal": float(self.primal_value),
            "dual": float(self.dual_value),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "method": self.method,
            "iterations": int(self.iterations),
        }


def _as_coeffs(coeffs):
    if not isinstance(coeffs, EchoCoefficients):
        raise TypeError(f"expected EchoCoefficients, got {type(coeffs).__name__}")
    return coeffs


def _uniform_modulus(mod):
    return mod.size == 0 or np.ptp(mod) <= _UNIFORM_RTOL * max(mod.max(), 1.0)


def closed_form_optimum(coeffs):
    """Optimal objective ``max(0, |c| - sum_n |d_n|)^2`` of the convex program."""
    return max(0.0, coeffs.abs_c - float(np.sum(np.abs(coeffs.d)))) ** 2


def dual_function(coeffs, lam):
    """Evaluate ``g(lam) = inf_theta L(theta, lam)``."""
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        return -np.inf
    mod2 = np.abs(coeffs.d) ** 2
    active = mod2 > 0
    if np.any(active & (lam == 0)):
        # an unpenalised coordinate with d_n != 0 cancels the echo for free
        return -float(np.sum(lam))
    s = float(np.sum(mod2[active] / lam[active]))
    return coeffs.abs_c ** 2 / (1.0 + s) - float(np.sum(lam))


def _dual_gradient(mod2, lam, abs_c):
    s = np.sum(mod2 / lam)
    return abs_c ** 2 * mod2 / (lam ** 2 * (1.0 + s) ** 2) - 1.0


def kkt_residuals(coeffs, theta, lam):
    """Stationarity, complementarity and feasibility residuals of the KKT system."""
    d, c = coeffs.d, coeffs.c
    theta = np.asarray(theta, dtype=complex)
    lam = np.asarray(lam, dtype=float)
    if d.size == 0:
        return {"stationarity": 0.0, "complementarity": 0.0, "feasibility": 0.0}
    grad = d * (np.vdot(d, theta) + c) + lam * theta
    excess = np.abs(theta) ** 2 - 1.0
    return {
        "stationarity": float(np.linalg.norm(grad)),
        "complementarity": float(np.max(np.abs(lam * excess))),
        "feasibility": float(max(0.0, np.max(excess))),
    }


def _newton_direction(mod2, lam, abs_c, grad):
    """Ascent direction ``-H^{-1} grad`` for the dual Hessian.

    ``H = -diag(a) + u u^T`` is diagonal plus rank one, so the solve is O(N)
    by Sherman-Morrison; ``u^T diag(a)^{-1} u = s / (1 + s) < 1`` keeps the
    denominator positive.
    """
    s = np.sum(mod2 / lam)
    a = 2.0 * abs_c ** 2 * mod2 / (lam ** 3 * (1.0 + s) ** 2)
    u = math.sqrt(2.0 * abs_c ** 2 / (1.0 + s) ** 3) * mod2 / lam ** 2
    a_inv_g = grad / a
    a_inv_u = u / a
    denom = 1.0 - s / (1.0 + s)
    # -(H^{-1}) g = A^{-1} g + A^{-1} u (u^T A^{-1} g) / (1 - u^T A^{-1} u)
    return a_inv_g + a_inv_u * (np.dot(u, a_inv_g) / denom)


def _projected_ascent(coeffs, opts):
    """Maximise ``g`` over ``lam > 0`` with damped Newton steps kept inside the orthant."""
    mod2 = np.abs(coeffs.d) ** 2
    abs_c = coeffs.abs_c

    def g(lam):
        return abs_c ** 2 / (1.0 + np.sum(mod2 / lam)) - np.sum(lam)

    lam = np.sqrt(mod2) * abs_c
    value = g(lam)
    grad = _dual_gradient(mod2, lam, abs_c)
    for it in range(1, opts.max_iter + 1):
        if np.max(np.abs(grad)) <= opts.ascent_grad_tol:
            return lam, it - 1
        direction = _newton_direction(mod2, lam, abs_c, grad)
        if not np.dot(direction, grad) > 0:
            direction = grad
        # fraction-to-boundary rule, then Armijo backtracking
        shrink = direction < 0
        step = min(1.0, 0.99 * float(np.min(-lam[shrink] / direction[shrink]))) if np.any(shrink) else 1.0
        slope = float(np.dot(grad, direction))
        noise = 1e-14 * (abs(value) + abs_c ** 2)
        while True:
            trial = lam + step * direction
            trial_value = g(trial)
            if trial_value >= value + 1e-4 * step * slope - noise:
                break
            step *= 0.5
            if step < 1e-20:
                raise SolverError("dual line search failed", {"dual_gradient": float(np.max(np.abs(grad)))})
        lam, value = trial, trial_value
        grad = _dual_gradient(mod2, lam, abs_c)
    raise SolverError(
        f"dual ascent did not converge in {opts.max_iter} iterations",
        {"dual_gradient": float(np.max(np.abs(grad)))},
    )


def solve_dual(coeffs, opts=None):
    """Maximise the dual function; return ``(lam, dual_value, iterations)``.

    When ``|c| <= sum |d_n|`` the supremum sits on the ``lam -> 0`` boundary
    with value 0 and ``lam = 0`` is returned.  Equal moduli ``|d_n| = r`` give
    a common multiplier ``r (|c| - N r)`` by symmetry; anything else goes
    through projected ascent.
    """
    coeffs = _as_coeffs(coeffs)
    opts = opts or SolverOptions()
    n = coeffs.n_irs
    if n == 0:
        return np.zeros(0), coeffs.abs_c ** 2, 0
    mod = np.abs(coeffs.d)
    excess = coeffs.abs_c - float(np.sum(mod))
    if excess <= 0:
        return np.zeros(n), 0.0, 0
    if np.any(mod == 0):
        # zero entries carry no constraint pressure; solve on the support
        support = mod > 0
        sub = EchoCoefficients(coeffs.d[support], coeffs.c)
        lam_sub, value, iters = solve_dual(sub, opts)
        lam = np.zeros(n)
        lam[support] = lam_sub
        return lam, value, iters
    if _uniform_modulus(mod):
        lam = mod * excess
        iters = 0
    else:
        lam, iters = _projected_ascent(coeffs, opts)
    return lam, dual_function(coeffs, lam), iters


def _theta_from_multipliers(coeffs, lam):
    d, c = coeffs.d, coeffs.c
    if np.all(lam > 0):
        w = d / lam
        s = float(np.sum((np.abs(d) ** 2) / lam))
        return -c * w / (1.0 + s)
    # boundary branch: exact cancellation; minimum-norm when it is feasible
    norm2 = float(np.sum(np.abs(d) ** 2))
    if norm2 == 0:
        return np.zeros_like(d)
    theta = -c * d / norm2
    if np.max(np.abs(theta)) > 1 + THETA_SLACK:
        mod = np.abs(d)
        unit = np.divide(d, mod, out=np.zeros_like(d), where=mod > 0)
        theta = -(c / float(np.sum(mod))) * unit
    return theta


def solve_kkt(coeffs, opts=None):
    """Proposed design: multipliers from the dual, reflection from stationarity."""
    coeffs = _as_coeffs(coeffs)
    opts = opts or SolverOptions()
    lam, dual_value, iters = solve_dual(coeffs, opts)
    theta = _theta_from_multipliers(coeffs, lam) if coeffs.n_irs else np.zeros(0, dtype=complex)
    primal = coeffs.objective(theta)
    res = kkt_residuals(coeffs, theta, lam)
    res["duality_gap"] = abs(primal - dual_value)
    scale = max(1.0, primal)
    bad = {k: v for k, v in res.items() if v > opts.gap_tol * (scale if k == "duality_gap" else 1.0)}
    if bad:
        raise SolverError(f"KKT solution misses tolerance {opts.gap_tol:g}: {bad}", res)
    return SolveReport(theta, lam, primal, dual_value, res, iters, "kkt")


def _project_disk(theta):
    mod = np.abs(theta)
    return np.where(mod > 1.0, theta / np.maximum(mod, 1e-300), theta)


def projected_gradient(objective_grad, project, x0, step, max_iter, tol):
    """Generic projected gradient loop; returns ``(x, value, iterations)``.

    ``objective_grad(x)`` must return ``(value, grad)``.  Raises
    :class:`SolverError` if the objective ever increases beyond rounding.
    """
    x = project(x0)
    value, grad = objective_grad(x)
    # rounding slack for the monotonicity check, relative to the starting value
    slack = 1e-12 * max(value, np.finfo(float).tiny)
    for it in range(1, max_iter + 1):
        x_new = project(x - step * grad)
        new_value, new_grad = objective_grad(x_new)
        if new_value > value + slack:
            raise SolverError(
                "projected gradient objective increased",
                {"previous": float(value), "current": float(new_value)},
            )
        moved = np.linalg.norm(x_new - x)
        x, value, grad = x_new, new_value, new_grad
        if moved <= tol * max(1.0, np.linalg.norm(x)) or value == 0.0:
            return x, value, it
    return x, value, max_iter


def solve_projected_gradient(coeffs, opts=None, x0=None):
    """Independent first-order solver over the product of unit disks.

    The gradient of ``|d^H theta + c|^2`` with respect to ``conj(theta)`` is
    ``d (d^H theta + c)``; with step ``1 / ||d||^2`` the iteration has the
    standard ``1 / L`` step on the real-valued problem.
    """
    coeffs = _as_coeffs(coeffs)
    opts = opts or SolverOptions()
    n = coeffs.n_irs
    if n == 0:
        return SolveReport(np.zeros(0, dtype=complex), np.zeros(0), coeffs.abs_c ** 2,
                           float("nan"), {}, 0, "projected_gradient")
    d, c = coeffs.d, coeffs.c

    def f(theta):
        r = np.vdot(d, theta) + c
        return abs(r) ** 2, d * r

    start = np.zeros(n, dtype=complex) if x0 is None else np.asarray(x0, dtype=complex)
    step = 1.0 / float(np.sum(np.abs(d) ** 2))
    theta, value, iters = projected_gradient(f, _project_disk, start, step, opts.max_iter, opts.pg_tol)
    res = {"feasibility": float(max(0.0, np.max(np.abs(theta)) ** 2 - 1.0))}
    return SolveReport(theta, np.full(n, np.nan), value, float("nan"), res, iters, "projected_gradient")


def _amplitude_only(coeffs, phase):
    """Best real amplitudes in [0, 1] under a common fixed phase (bounded least squares)."""
    w = np.conj(coeffs.d) * np.exp(1j * phase)
    a = np.vstack([w.real, w.imag])
    b = -np.array([coeffs.c.real, coeffs.c.imag])
    sol = lsq_linear(a, b, bounds=(0.0, 1.0), method="bvls", tol=1e-15)
    beta = np.clip(sol.x, 0.0, 1.0)
    return beta * np.exp(1j * phase)


def _phase_only_fan(coeffs):
    d, c = coeffs.d, coeffs.c
    n = d.shape[0]
    abs_c = abs(c)
    u = -c / abs_c if abs_c > 0 else 1.0 + 0j
    if abs_c >= n or n == 1:
        return u * d
    signs = np.ones(n)
    if n % 2 == 0:
        delta = np.arccos(abs_c / n)
        signs[n // 2:] = -1.0
        offsets = signs * delta
    else:
        k = n - 1
        # last element adds +1 or -1 along u; the balanced pairs fill the rest
        if abs_c >= 1.0:
            last, target = 0.0, abs_c - 1.0
        else:
            last, target = np.pi, abs_c + 1.0
        delta = np.arccos(min(1.0, target / k))
        signs[k // 2:k] = -1.0
        offsets = signs * delta
        offsets[-1] = last
    return u * d * np.exp(1j * offsets)


def _phase_only_descent(coeffs, max_iter):
    """Fallback for non-unit ``d``: exact per-element phase updates (coordinate descent).

    Each sweep sets every phase to the minimiser given the others, so the
    objective never increases.  Starts from an alternating fan so that the
    aligned (stationary) configuration is avoided.
    """
    d, c = coeffs.d, coeffs.c
    n = d.shape[0]
    mod = np.abs(d)
    unit = np.divide(d, mod, out=np.ones_like(d), where=mod > 0)
    u = -c / abs(c) if c else 1.0 + 0j
    delta = np.arccos(min(1.0, abs(c) / max(float(mod.sum()), 1e-300)))
    offsets = np.where(np.arange(n) % 2 == 0, delta, -delta)
    theta = u * unit * np.exp(1j * offsets)
    contrib = np.conj(d) * theta
    total = contrib.sum() + c
    for _ in range(max_iter):
        before = abs(total)
        for k in range(n):
            rest = total - contrib[k]
            if mod[k] == 0:
                continue
            # best unit-modulus contribution points against the rest
            new = -mod[k] * (rest / abs(rest)) if abs(rest) > 0 else contrib[k]
            theta[k] = new / np.conj(d[k])
            contrib[k] = new
            total = rest + new
        if before - abs(total) <= 1e-15 * (1 + before):
            break
    return theta


def baseline_reflection(coeffs, mode, rng_seed=None, opts=None):
    """Reflection vector for one of the benchmark designs (or ``full``)."""
    coeffs = _as_coeffs(coeffs)
    opts = opts or SolverOptions()
    n = coeffs.n_irs
    if mode not in MODES:
        raise ConfigError(f"unknown mode {mode!r}; choose from {MODES}")
    if mode == "none" or n == 0:
        return IrsState(np.zeros(n, dtype=complex))
    if mode == "random_phase":
        rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
        return IrsState(np.exp(1j * rng.uniform(0.0, 2 * np.pi, size=n)))
    if mode == "amplitude_only":
        return IrsState(_amplitude_only(coeffs, opts.amplitude_phase))
    if mode == "phase_only":
        if np.allclose(np.abs(coeffs.d), 1.0, rtol=0, atol=1e-9):
            theta = _phase_only_fan(coeffs)
        else:
            logger.debug("phase_only: non-unit cascaded response, using coordinate descent")
            theta = _phase_only_descent(coeffs, opts.max_iter)
        # unit modulus exactly, not just within rounding
        return IrsState(np.exp(1j * np.angle(theta)))
    return solve_kkt(coeffs, replace(opts, mode="full")).state


def design_reflection(coeffs, mode="full", rng_seed=None, opts=None):
    """``(theta, objective)`` for ``mode``; ``full`` is the KKT design."""
    state = baseline_reflection(coeffs, mode, rng_seed, opts)
    return state.theta, coeffs.objective(state.theta)
