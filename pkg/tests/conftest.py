import sys

import numpy as np
import pytest

from irs_stealth.geometry import AnglePair, SurfaceLayout, surface_responses
from irs_stealth.surface import EwamProfile, build_echo_coefficients


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_coeffs(rng, n_irs, n_ewam, p=None):
    layout = SurfaceLayout.from_counts(n_irs, n_ewam)
    angles = AnglePair(rng.uniform(-np.pi / 2, np.pi / 2), rng.uniform(-np.pi / 2, np.pi / 2))
    a_irs, a_ewam = surface_responses(angles, layout)
    absorb = rng.uniform(0, 1, n_ewam) if p is None else np.full(n_ewam, p)
    ewam = EwamProfile(absorb, rng.uniform(0, 2 * np.pi, n_ewam))
    return build_echo_coefficients(a_irs, a_ewam, ewam)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
