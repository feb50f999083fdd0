import math

import numpy as np
import pytest

from frictionlab.core import Grid
from frictionlab.errors import RangeViolation
from frictionlab.profiles import (
    PROFILES, bump_profile, equilibrium_profile, profile_field,
    profile_line, vacuum_ramp_profile,
)


def test_equilibrium_profile_flat():
    prof = equilibrium_profile(1.5)
    x = np.linspace(*prof.domain, 101)
    np.testing.assert_allclose(prof.sigma0(x), 1.5)
    np.testing.assert_allclose(prof.cumulative(x), 0.0)
    assert prof.vacuum_set == ()


class TestBumpProfile:
    def test_mass_balance(self):
        prof = bump_profile(1.0)
        assert abs(prof.cumulative(np.array([prof.domain[1]]))[0]) <= 1e-10

    def test_cumulative_is_antiderivative(self):
        prof = bump_profile(1.0, amp=0.3)
        x = np.linspace(0.5, 5.5, 2001)
        F = prof.cumulative(x)
        dF = np.gradient(F, x)
        np.testing.assert_allclose(dF, prof.sigma0(x) - 1.0, atol=5e-5)

    def test_stays_positive(self):
        prof = bump_profile(1.0, amp=0.45)
        x = np.linspace(*prof.domain, 4001)
        assert prof.sigma0(x).min() > 0.0

    def test_rejects_vacuum_forming_amplitude(self):
        with pytest.raises(RangeViolation):
            bump_profile(1.0, amp=1.7)

    def test_first_derivative(self):
        prof = bump_profile(1.0, amp=0.3)
        x = np.linspace(2.0, 4.0, 7)
        h = 1e-6
        fd = (prof.sigma0(x + h) - prof.sigma0(x - h)) / (2 * h)
        np.testing.assert_allclose(prof.deriv(x, 1), fd, atol=1e-5)


class TestVacuumRamp:
    @pytest.mark.parametrize("touch", [1, 2, 3])
    def test_vacuum_on_unit_interval(self, touch):
        prof = vacuum_ramp_profile(1.0, touch=touch)
        assert prof.vacuum_set == ((0.0, 1.0),)
        x = np.linspace(0.0, 1.0, 50)
        np.testing.assert_allclose(prof.sigma0(x), 0.0, atol=1e-15)

    def test_nonnegative_everywhere(self):
        prof = vacuum_ramp_profile(1.0)
        x = np.linspace(*prof.domain, 8001)
        assert prof.sigma0(x).min() >= -1e-12

    def test_mass_balance(self):
        for M in (0.5, 1.0, 2.0):
            prof = vacuum_ramp_profile(M, touch=2)
            assert abs(prof.cumulative(np.array([prof.domain[1]]))[0]) \
                <= 1e-8 * M

    def test_default_f0_skips_left_bump(self):
        # with F0 = -(ramp deficit) the left compensating bump vanishes
        prof = vacuum_ramp_profile(1.0, width=0.5, touch=1)
        F0 = float(prof.cumulative(np.array([0.0]))[0])
        assert F0 == pytest.approx(-1.0 * 0.5 * 1.0 / 3.0, rel=1e-12)

    def test_requested_f0_reached(self):
        prof = vacuum_ramp_profile(1.0, F0=-0.3)
        assert float(prof.cumulative(np.array([0.0]))[0]) == \
            pytest.approx(-0.3, abs=1e-12)

    @pytest.mark.parametrize("touch", [1, 2, 3])
    def test_edge_derivatives_one_sided(self, touch):
        w = 0.5
        prof = vacuum_ramp_profile(1.0, width=w, touch=touch)
        # orders below the touch order vanish at the right edge
        for j in range(1, touch):
            assert float(np.atleast_1d(prof.deriv(1.0, j))[0]) == 0.0
        dk = float(np.atleast_1d(prof.deriv(1.0, touch))[0])
        expected = math.factorial(touch + 1) / w ** touch
        assert dk == pytest.approx(expected, rel=1e-12)

    def test_cumulative_matches_quadrature(self):
        prof = vacuum_ramp_profile(1.0, touch=2)
        a, b = prof.domain
        x = np.linspace(a, b, 40001)
        dev = prof.sigma0(x) - 1.0
        F_quad = np.concatenate([[0.0], np.cumsum(
            0.5 * (dev[1:] + dev[:-1]) * np.diff(x))])
        np.testing.assert_allclose(prof.cumulative(x), F_quad, atol=5e-8)

    def test_rejects_too_negative_f0(self):
        with pytest.raises(RangeViolation):
            vacuum_ramp_profile(1.0, F0=-5.0)


def test_registry_names():
    assert set(PROFILES) == {"equilibrium", "cosine", "bump", "vacuum-ramp"}


def test_profile_field_cosine():
    g = Grid.torus(64)
    f = profile_field("cosine", g, 1.0, amp=0.2, k=2)
    np.testing.assert_allclose(f.values, 1.0 + 0.2 * np.cos(2 * g.x))


def test_profile_field_unknown_name():
    g = Grid.torus(64)
    with pytest.raises(KeyError):
        profile_field("sawtooth", g, 1.0)


def test_profile_line_torus_only_profile():
    with pytest.raises(ValueError):
        profile_line("cosine", 1.0)
