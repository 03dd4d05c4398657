"""Oracle cross-checks behind the ``validate`` command.

Each check returns ``(name, passed, detail)``.  The oracles are independent
of the code path they check: closed forms, a first-order solver, quadrature.
"""

import math

import numpy as np
from scipy import integrate, special

from .channel import ScenarioGeometry, build_channels
from .detection import detection_probability, marcum_q1, snr_factored, snr_full
from .geometry import AnglePair, RadarArrayShape, SurfaceLayout, surface_responses
from .optimizer import closed_form_optimum, solve_kkt, solve_projected_gradient
from .surface import EwamProfile, IrsState, build_echo_coefficients


def marcum_q1_quadrature(a, b):
    """``Q1(a, b)`` by adaptive quadrature of its defining integral."""
    if b == 0:
        return 1.0

    def integrand(x):
        # x exp(-(x^2 + a^2)/2) I0(a x), with I0 scaled for stability
        return x * math.exp(-0.5 * (x - a) ** 2) * special.i0e(a * x)

    upper = max(a, b) + 40.0
    val, _ = integrate.quad(integrand, b, upper, epsabs=1e-14, epsrel=1e-13, limit=500,
                            points=[a] if b < a < upper else None)
    return val


def random_instance(rng, max_irs=128):
    n_irs = int(rng.integers(1, max_irs + 1))
    n_ewam = 2 * int(rng.integers(0, 65))
    layout = SurfaceLayout.from_counts(n_irs, n_ewam)
    angles = AnglePair(rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(-np.pi / 2, np.pi / 2))
    a_irs, a_ewam = surface_responses(angles, layout)
    ewam = EwamProfile(rng.uniform(0, 1, n_ewam), rng.uniform(0, 2 * np.pi, n_ewam))
    return build_echo_coefficients(a_irs, a_ewam, ewam)


def check_solvers(n_instances=500, seed=0):
    rng = np.random.default_rng(seed)
    worst = {"closed_form": 0.0, "projected_gradient": 0.0, "gap": 0.0, "kkt": 0.0}
    for _ in range(n_instances):
        coeffs = random_instance(rng)
        kkt = solve_kkt(coeffs)
        pg = solve_projected_gradient(coeffs)
        ref = closed_form_optimum(coeffs)
        worst["closed_form"] = max(worst["closed_form"], abs(kkt.primal_value - ref) / max(1.0, ref))
        worst["projected_gradient"] = max(worst["projected_gradient"], abs(kkt.primal_value - pg.primal_value))
        worst["gap"] = max(worst["gap"], abs(kkt.primal_value - kkt.dual_value))
        worst["kkt"] = max(worst["kkt"], kkt.residuals["stationarity"], kkt.residuals["complementarity"])
    ok = (worst["closed_form"] <= 1e-9 and worst["projected_gradient"] <= 1e-6
          and worst["gap"] <= 1e-8 and worst["kkt"] <= 1e-8)
    return "solver oracle triangle", ok, ", ".join(f"{k}={v:.2e}" for k, v in worst.items())


def check_snr_identity(n_instances=200, seed=1):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        n_irs = int(rng.integers(1, 30))
        n_ewam = 2 * int(rng.integers(0, 20))
        layout = SurfaceLayout.from_counts(n_irs, n_ewam)
        radar = RadarArrayShape(int(rng.integers(1, 5)), int(rng.integers(1, 5)))
        ang = AnglePair(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
        geom = ScenarioGeometry(distance=rng.uniform(10, 1000), surface_angles=ang,
                                radar_angles=AnglePair(rng.uniform(-1.5, 1.5), 0.0))
        ch = build_channels(geom, layout, radar)
        ewam = EwamProfile(rng.uniform(0, 1, n_ewam), rng.uniform(0, 2 * np.pi, n_ewam))
        theta = IrsState(rng.uniform(0, 1, n_irs) * np.exp(2j * np.pi * rng.uniform(size=n_irs)))
        coeffs = build_echo_coefficients(ch.a_irs, ch.a_ewam, ewam)
        full = snr_full(ch, theta, ewam, 1e-12)
        fact = snr_factored(coeffs, theta, ch.radar_norm, 1e-12)
        worst = max(worst, abs(full - fact) / max(full, 1e-300))
    return "full vs factored SNR", worst <= 1e-10, f"max rel err={worst:.2e}"


def check_marcum(seed=2):
    worst = 0.0
    for a in np.linspace(0.0, 8.0, 9):
        for b in np.linspace(0.0, 8.0, 9):
            worst = max(worst, abs(marcum_q1(a, b) - marcum_q1_quadrature(a, b)))
    pfa = abs(detection_probability(0.0, 1e-3) - 1e-3)
    return "Marcum Q vs quadrature", worst <= 1e-9 and pfa <= 1e-12, f"max abs err={worst:.2e}"


def run_all():
    return [check_solvers(), check_snr_identity(), check_marcum()]
