import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionphase.atomic_response import (
    Transition,
    cross_section_ratio,
    detuning_from_gamma,
    lorentzian_kernel,
    max_phase_over_detuning,
    phase_from_mode_area,
    phase_j_equal,
    phase_two_level,
    resonant_cross_section,
    resonant_cross_section_two_level,
    scattering_rate,
)
from ionphase.errors import DomainError, SingularPointError

from conftest import GAMMA, LAMBDA

U = 1.66053906660e-27


def oracle_phase(strength, delta, gamma):
    """Reference: direct complex arithmetic, independent of the vectorised path."""
    x = 2.0 * delta / gamma
    return cmath.phase(1.0 - strength * complex(1.0, x) / (1.0 + x * x))


def yb(j_lower="1/2", j_upper="1/2"):
    return Transition.from_j(LAMBDA, GAMMA, j_lower, j_upper, 174 * U)


class TestCrossSections:
    def test_two_level_value(self):
        expected = 3.0 * (369.5e-9) ** 2 / (2.0 * math.pi)
        assert resonant_cross_section_two_level(LAMBDA) == pytest.approx(expected, rel=1e-15)
        assert resonant_cross_section_two_level(LAMBDA) == pytest.approx(6.519e-14, rel=1e-4)

    def test_quadratic_scaling(self):
        ratio = resonant_cross_section_two_level(2 * LAMBDA) / resonant_cross_section_two_level(LAMBDA)
        assert ratio == 4.0

    @pytest.mark.parametrize("bad", [0.0, -1e-9, float("nan")])
    def test_nonpositive_wavelength(self, bad):
        with pytest.raises(DomainError):
            resonant_cross_section_two_level(bad)

    def test_j_equal_is_one_third(self):
        t = yb()
        assert cross_section_ratio(t) == Fraction(1, 1)
        assert resonant_cross_section(t) == pytest.approx(2.173e-14, rel=2e-4)
        assert Fraction(cross_section_ratio(t)) / Fraction(3) == Fraction(1, 3)

    def test_j0_to_j1_restores_two_level(self):
        t = yb(0, 1)
        assert cross_section_ratio(t) == 3
        assert resonant_cross_section(t) == pytest.approx(
            resonant_cross_section_two_level(LAMBDA), rel=1e-15
        )

    def test_j1_to_j0(self):
        brute = LAMBDA**2 / (2 * math.pi) * (2 * 0 + 1) / (2 * 1 + 1)
        assert resonant_cross_section(yb(1, 0)) == pytest.approx(brute, rel=1e-15)
        assert resonant_cross_section(yb(1, 0)) == pytest.approx(7.243e-15, rel=1e-4)

    def test_transition_validation(self):
        with pytest.raises(DomainError):
            Transition(LAMBDA, GAMMA, -1, 1, 1.0)
        with pytest.raises(DomainError):
            Transition(LAMBDA, 0.0, 1, 1, 1.0)
        with pytest.raises(DomainError):
            Transition.from_j(LAMBDA, GAMMA, "1/3", 1, 1.0)
        assert yb().j_lower == Fraction(1, 2)


class TestScatteringRate:
    def test_examples(self):
        assert scattering_rate(1.0, 1.0, 1000.0) == 1000.0
        assert scattering_rate(2.0, 1.0, 100.0) == 200.0
        assert scattering_rate(0.0, 1.0, 100.0) == 0.0

    def test_bad_mode_area(self):
        with pytest.raises(DomainError):
            scattering_rate(1.0, 0.0, 1.0)


class TestKernel:
    def test_on_resonance(self):
        k = lorentzian_kernel(0.0, GAMMA)
        assert (k.re, k.im) == (1.0, 0.0)

    def test_half_linewidth(self):
        k = lorentzian_kernel(-GAMMA / 2, GAMMA)
        assert k.re == pytest.approx(0.5, abs=1e-15)
        assert k.im == pytest.approx(-0.5, abs=1e-15)

    def test_far_wings(self):
        # 2D/G = +-100: re = 1/10001, |im| = 100/10001
        for d in (50 * GAMMA, -50 * GAMMA):
            k = lorentzian_kernel(d, GAMMA)
            assert k.re == pytest.approx(1 / 10001, rel=1e-14)
            assert abs(k.im) == pytest.approx(100 / 10001, rel=1e-14)
        far = lorentzian_kernel(1e6 * GAMMA, GAMMA)
        assert abs(far.re) < 1e-12 and abs(far.im) < 1e-6

    def test_bad_gamma(self):
        with pytest.raises(DomainError):
            lorentzian_kernel(0.0, 0.0)

    @given(st.floats(-1e3, 1e3))
    def test_modulus(self, x):
        k = lorentzian_kernel(x * GAMMA / 2, GAMMA)
        assert k.modulus_squared == pytest.approx(1 / (1 + x * x), rel=1e-12)
        assert k.modulus_squared <= 1.0 + 1e-15
        if x * x > 1e-12:
            assert k.modulus_squared < 1.0


class TestPhases:
    def test_no_atom(self):
        assert phase_two_level(0.0, 0.3 * GAMMA, GAMMA) == 0.0

    def test_pi_above_half(self):
        assert phase_two_level(0.6, 0.0, GAMMA) == math.pi

    def test_quarter_coupling_half_linewidth(self):
        value = phase_two_level(0.25, -GAMMA / 2, GAMMA)
        assert value == pytest.approx(cmath.phase(0.75 + 0.25j), abs=1e-15)
        assert value == pytest.approx(0.32175, abs=5e-6)

    def test_singular_point(self):
        with pytest.raises(SingularPointError):
            phase_two_level(0.5, 0.0, GAMMA)

    @pytest.mark.parametrize("g", [-0.1, 1.1])
    def test_coupling_range(self, g):
        with pytest.raises(DomainError):
            phase_two_level(g, 0.0, GAMMA)

    def test_mode_area_examples(self):
        sigma = resonant_cross_section_two_level(LAMBDA)
        assert phase_from_mode_area(sigma, sigma, 0.0, GAMMA) == 0.0
        assert phase_from_mode_area(sigma, sigma / 3, 0.0, GAMMA) == math.pi
        assert phase_from_mode_area(sigma, sigma / 4, -GAMMA / 2, GAMMA) == pytest.approx(
            math.pi / 2, abs=1e-15
        )
        assert phase_from_mode_area(sigma, sigma / 4, -GAMMA / 2, GAMMA) == pytest.approx(
            phase_two_level(1.0, -GAMMA / 2, GAMMA), abs=1e-15
        )

    def test_mode_area_errors(self):
        sigma = 1.0
        with pytest.raises(DomainError):
            phase_from_mode_area(sigma, 0.24, 0.0, GAMMA)
        with pytest.raises(SingularPointError):
            phase_from_mode_area(sigma, 0.5, 0.0, GAMMA)

    def test_j_equal_half_linewidth(self):
        value = phase_j_equal(0.137, -GAMMA / 2, GAMMA)
        assert value == pytest.approx(oracle_phase(2 * 0.137 / 3, -GAMMA / 2, GAMMA), abs=1e-15)
        assert value == pytest.approx(0.04782, abs=5e-6)
        assert math.degrees(value) == pytest.approx(2.740, abs=5e-4)

    def test_j_equal_no_jump(self):
        assert phase_j_equal(1.0, 0.0, GAMMA) == 0.0

    def test_j_equal_400mhz(self):
        delta = -2 * math.pi * 400e6
        assert 2 * delta / GAMMA == pytest.approx(-40.816, abs=1e-3)
        value = phase_j_equal(0.137, delta, GAMMA)
        assert value == pytest.approx(oracle_phase(2 * 0.137 / 3, delta, GAMMA), abs=1e-16)
        assert value == pytest.approx(0.00224, abs=5e-6)
        assert math.degrees(value) == pytest.approx(0.128, abs=5e-4)

    def test_vectorised(self):
        deltas = np.linspace(-3, 3, 7) * GAMMA
        vec = phase_j_equal(0.2, deltas, GAMMA)
        assert vec.shape == (7,)
        for d, v in zip(deltas, vec):
            assert v == pytest.approx(oracle_phase(0.4 / 3, d, GAMMA), abs=1e-15)

    def test_detuning_helper(self):
        assert detuning_from_gamma(-0.5, GAMMA) == -GAMMA / 2


couplings = st.floats(0.0, 1.0)
multiples = st.floats(-100.0, 100.0)


@settings(max_examples=300)
@given(couplings, multiples, st.floats(1e6, 1e9))
def test_antisymmetry(g, x, gamma):
    d = x * gamma
    for fn in (phase_j_equal, phase_two_level):
        if fn is phase_two_level and x == 0.0 and g == 0.5:
            continue
        # compared modulo 2 pi: on the branch cut +pi and -pi are the same angle
        total = fn(g, d, gamma) + fn(g, -d, gamma)
        assert abs(math.remainder(total, 2 * math.pi)) < 1e-12


@settings(max_examples=300)
@given(couplings, multiples)
def test_reduction_identity(g, x):
    d = x * GAMMA
    assert phase_j_equal(g, d, GAMMA) == phase_two_level(g / 3, d, GAMMA)


def test_reduction_identity_bulk():
    rng = np.random.default_rng(7)
    g = rng.random(10_000)
    d = rng.uniform(-20, 20, 10_000) * GAMMA
    assert np.array_equal(phase_j_equal(g, d, GAMMA), phase_two_level(g / 3, d, GAMMA))


@settings(max_examples=300)
@given(st.floats(1e-16, 1e-12), st.floats(0.25, 100.0), multiples)
def test_mode_area_consistency(sigma, area_ratio, x):
    area = area_ratio * sigma
    d = x * GAMMA
    if area == sigma / 2 and x == 0:
        return
    g = sigma / (4 * area)
    assert phase_from_mode_area(sigma, area, d, GAMMA) == pytest.approx(
        phase_two_level(min(g, 1.0), d, GAMMA), abs=1e-12
    )


@pytest.mark.parametrize("g", [round(0.1 * k, 1) for k in range(11) if k != 5])
def test_on_resonance_dichotomy(g):
    expected = 0.0 if 1 - 2 * g > 0 else math.pi
    assert phase_two_level(g, 0.0, GAMMA) == expected


def closed_form_max(g):
    s = 2 * g / 3
    u = math.sqrt(1 - s)
    return u * GAMMA / 2, math.atan(s / (2 * u))


@pytest.mark.parametrize("g", [0.1, 0.3, 0.5, 0.7, 1.0])
def test_max_phase_matches_closed_form(g):
    detuning, phase = max_phase_over_detuning(g, "j_equal", GAMMA)
    d_ref, p_ref = closed_form_max(g)
    assert abs(phase - p_ref) < 1e-9
    assert detuning / GAMMA == pytest.approx(d_ref / GAMMA, abs=1e-6)


def test_max_phase_grid_cross_check():
    detuning, phase = max_phase_over_detuning(0.137, "j_equal", GAMMA)
    grid = np.linspace(0, 3, 300_001) * GAMMA
    values = np.abs([oracle_phase(2 * 0.137 / 3, -d, GAMMA) for d in grid[::100]])
    assert phase >= values.max()
    assert math.degrees(phase) == pytest.approx(2.743, abs=5e-4)
    assert detuning / GAMMA == pytest.approx(0.4766, abs=5e-5)


def test_max_phase_thirty_degrees():
    detuning, phase = max_phase_over_detuning(1.0, "j_equal", GAMMA)
    assert math.degrees(phase) == pytest.approx(30.0, abs=1e-9)
    assert detuning / GAMMA == pytest.approx(1 / (2 * math.sqrt(3)), abs=1e-8)


def test_max_phase_two_level_cases():
    assert max_phase_over_detuning(0.0, "two_level", GAMMA) == (0.0, 0.0)
    assert max_phase_over_detuning(0.6, "two_level", GAMMA) == (0.0, math.pi)
    assert max_phase_over_detuning(0.5, "two_level", GAMMA) == (0.0, math.pi / 2)
    d, p = max_phase_over_detuning(0.3, "two_level", GAMMA)
    s = 0.6
    assert p == pytest.approx(math.atan(s / (2 * math.sqrt(1 - s))), abs=1e-9)
    with pytest.raises(DomainError):
        max_phase_over_detuning(0.3, "three_level", GAMMA)
