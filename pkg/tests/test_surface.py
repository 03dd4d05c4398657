import json

import numpy as np
import pytest

from irs_stealth.channel import ScenarioGeometry, build_channels
from irs_stealth.exceptions import ConfigError, InvalidDimensionError
from irs_stealth.geometry import AnglePair, RadarArrayShape, SurfaceLayout, surface_responses
from irs_stealth.surface import EwamProfile, IrsState, apply_reflection, build_echo_coefficients


def _ewam(n, p, rng):
    return EwamProfile.uniform(n, p, rng)


def test_full_absorption_kills_c(rng):
    a_irs, a_ewam = surface_responses(AnglePair(0.4, 0.0), SurfaceLayout.from_counts(20, 50))
    coeffs = build_echo_coefficients(a_irs, a_ewam, _ewam(50, 1.0, rng))
    assert coeffs.c == 0


def test_all_ones_sum():
    layout = SurfaceLayout.from_counts(20, 50)
    a_irs, a_ewam = surface_responses(AnglePair(0.0, np.pi / 2), layout)
    coeffs = build_echo_coefficients(a_irs, a_ewam, EwamProfile(np.zeros(50), np.zeros(50)))
    assert coeffs.c == pytest.approx(50.0, abs=1e-12)


def test_c_matches_loop(rng):
    layout = SurfaceLayout.from_counts(20, 50)
    a_irs, a_ewam = surface_responses(AnglePair(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)), layout)
    ewam = _ewam(50, 0.7, rng)
    coeffs = build_echo_coefficients(a_irs, a_ewam, ewam)
    want = 0j
    for a, psi in zip(a_ewam, ewam.phase):
        want += a * a * np.sqrt(0.3) * np.exp(1j * psi)
    assert abs(coeffs.c - want) < 1e-12
    # d^H theta reads sum a_n^2 theta_n
    theta = np.exp(1j * rng.uniform(0, 6, 20)) * 0.5
    assert abs(np.vdot(coeffs.d, theta) - np.sum(a_irs ** 2 * theta)) < 1e-12


def test_cascaded_response_unit_modulus(rng):
    for _ in range(20):
        layout = SurfaceLayout.from_counts(int(rng.integers(1, 40)), 2 * int(rng.integers(0, 20)))
        a_irs, a_ewam = surface_responses(AnglePair(rng.uniform(-3, 3), rng.uniform(-3, 3)), layout)
        coeffs = build_echo_coefficients(a_irs, a_ewam, _ewam(layout.n_ewam, 0.5, rng))
        assert np.max(np.abs(np.abs(coeffs.d) - 1)) < 1e-14
        assert coeffs.abs_c <= layout.n_ewam * np.sqrt(0.5) + 1e-12


def test_c_linear_in_gamma(rng):
    a_irs, a_ewam = surface_responses(AnglePair(0.3, 0.1), SurfaceLayout.from_counts(4, 6))
    e1, e2 = _ewam(6, 0.2, rng), _ewam(6, 0.6, rng)
    c1 = build_echo_coefficients(a_irs, a_ewam, e1).c
    c2 = build_echo_coefficients(a_irs, a_ewam, e2).c
    # c as a function of the coefficient vector is sum a^2 gamma
    combo = np.sum(a_ewam ** 2 * (2 * e1.coefficients - 3 * e2.coefficients))
    assert abs(combo - (2 * c1 - 3 * c2)) < 1e-12


def test_length_mismatch(rng):
    with pytest.raises(InvalidDimensionError):
        build_echo_coefficients(np.ones(3), np.ones(4), _ewam(5, 0.5, rng))


def test_profile_validation():
    with pytest.raises(ConfigError):
        EwamProfile(np.array([1.2]), np.array([0.0]))
    with pytest.raises(InvalidDimensionError):
        EwamProfile(np.array([0.1, 0.2]), np.array([0.0]))


def test_profile_json_roundtrip(tmp_path, rng):
    ewam = _ewam(8, 0.4, rng)
    path = tmp_path / "ewam.json"
    ewam.to_json(path)
    assert isinstance(json.loads(path.read_text()), list)
    back = EwamProfile.from_json(path)
    np.testing.assert_array_equal(back.absorb, ewam.absorb)
    np.testing.assert_array_equal(back.phase, ewam.phase)
    with pytest.raises(ConfigError):
        EwamProfile.from_records([{"p": 0.1}])


def test_irs_state_bounds():
    IrsState(np.array([1 + 1e-10]))
    with pytest.raises(ConfigError):
        IrsState(np.array([1.01]))


def _scenario(rng, n_irs=5, n_ewam=6, m=(2, 3)):
    layout = SurfaceLayout.from_counts(n_irs, n_ewam)
    geom = ScenarioGeometry(distance=rng.uniform(10, 100), surface_angles=AnglePair(0.4, 0.2),
                            radar_angles=AnglePair(-0.3, 0.0))
    return build_channels(geom, layout, RadarArrayShape(*m))


def test_dark_irs_gives_zero(rng):
    ch = _scenario(rng)
    out = apply_reflection(ch.g_ri, IrsState(np.zeros(5)), ch.g_ri.T)
    assert np.all(out == 0)


def test_single_element_chain():
    layout = SurfaceLayout(1, 1, 1)
    geom = ScenarioGeometry(distance=20.0, surface_angles=AnglePair(0.3, 0.0))
    ch = build_channels(geom, layout, RadarArrayShape(1, 1))
    theta = 0.5j
    out = apply_reflection(ch.g_ri, np.array([theta]), ch.g_ri.T)
    assert abs(out[0, 0] - ch.alpha ** 2 * ch.a_irs[0] ** 2 * theta) < 1e-20


def test_factorisation_norm(rng):
    ch = _scenario(rng, 8, 10, (3, 2))
    theta = rng.uniform(0, 1, 8) * np.exp(1j * rng.uniform(0, 6.3, 8))
    full = np.linalg.norm(apply_reflection(ch.g_ri, theta, ch.g_ri.T))
    scalar = abs(ch.a_irs @ (theta * ch.a_irs))
    a_r = ch.a_radar
    expect = scalar * np.linalg.norm(ch.alpha ** 2 * np.outer(a_r, a_r))
    assert abs(full - expect) <= 1e-10 * expect


def test_dimension_mismatch(rng):
    ch = _scenario(rng)
    with pytest.raises(InvalidDimensionError):
        apply_reflection(ch.g_ri, np.ones(4), ch.g_ri.T)
