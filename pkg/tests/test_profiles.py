"""Closed-form 1D profile: amplitude, phase, ODE residual, steepening limit.

The phase is validated against its defining derivative with an independent
fourth-order finite-difference stencil, and the full profile against the
stationary ODE via spectral differentiation (profile_residual_1d).
"""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dnls2d.profiles import (
    amplitude_1d,
    dnls_limit_profile,
    phase_1d,
    profile_1d,
    profile_residual_1d,
)

SIGMAS = (1.0, 2.0, 3.0)
EPSILONS = (0.0, 0.5, 1.0)
DELTAS = (0.0, 1.0)


def phase_derivative_target(x, sigma, epsilon, delta):
    # theta'(x) = -(2 sigma + 1) delta A^(2 sigma) / (2 (1 + eps^2)(sigma + 1))
    amp = amplitude_1d(x, sigma, epsilon, delta)
    return -(2 * sigma + 1) * delta * amp ** (2 * sigma) / (2 * (1 + epsilon**2) * (sigma + 1))


def fd4(f, x, h):
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


class TestAmplitude:
    def test_sigma1_free_case_is_sqrt2_sech(self):
        x = np.linspace(-5, 5, 101)
        got = amplitude_1d(x, 1.0, 0.0, 0.0)
        assert np.allclose(got, np.sqrt(2.0) / np.cosh(x), atol=1e-14)

    def test_even_and_peaked_at_origin(self):
        x = np.linspace(-8, 8, 201)
        for sigma, eps, delta in itertools.product(SIGMAS, EPSILONS, DELTAS):
            a = amplitude_1d(x, sigma, eps, delta)
            assert np.allclose(a, a[::-1], atol=1e-14)
            assert np.argmax(a) == len(x) // 2

    def test_peak_value_closed_form(self):
        for sigma, eps, delta in itertools.product(SIGMAS, EPSILONS, DELTAS):
            K = np.sqrt(1.0 + delta**2 / (1.0 + eps**2))
            want = (2.0 * (sigma + 1.0) / (1.0 + K)) ** (1.0 / (2.0 * sigma))
            assert np.isclose(amplitude_1d(0.0, sigma, eps, delta), want, rtol=1e-14)

    @given(
        x=st.floats(-20, 20),
        sigma=st.sampled_from(SIGMAS),
        eps=st.sampled_from(EPSILONS),
        delta=st.floats(0.0, 2.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_positive_and_bounded_by_peak(self, x, sigma, eps, delta):
        a = float(amplitude_1d(x, sigma, eps, delta))
        assert a > 0.0
        assert a <= float(amplitude_1d(0.0, sigma, eps, delta)) + 1e-15


class TestPhase:
    def test_zero_for_zero_steepening(self):
        x = np.linspace(-3, 3, 11)
        assert np.array_equal(phase_1d(x, 2.0, 1.0, 0.0), np.zeros_like(x))

    def test_derivative_identity(self):
        # acceptance-grade tolerance 1e-8; the FD-4 stencil at h=1e-3 resolves
        # well below that
        xs = np.linspace(-4.0, 4.0, 33)
        for sigma, eps, delta in itertools.product(SIGMAS, EPSILONS, (1.0,)):
            got = fd4(lambda x: phase_1d(x, sigma, eps, delta), xs, 1e-3)
            want = phase_derivative_target(xs, sigma, eps, delta)
            assert np.max(np.abs(got - want)) <= 1e-8

    def test_monotone_decreasing_for_positive_delta(self):
        # tanh saturates in float64 beyond |x| ~ 19/sigma, flattening the
        # tails exactly; strict decrease is only resolvable inside that
        x = np.linspace(-5, 5, 401)
        for sigma in SIGMAS:
            th = phase_1d(x, sigma, 0.5, 1.0)
            assert np.all(np.diff(th) < 0)

    def test_odd_symmetry_about_midrange(self):
        # theta(-inf) = 0 and theta(x) + theta(-x) = 2 theta(0)
        x = np.linspace(-6, 6, 25)
        for sigma, eps in itertools.product(SIGMAS, EPSILONS):
            th = phase_1d(x, sigma, eps, 1.0)
            mid = phase_1d(0.0, sigma, eps, 1.0)
            assert np.allclose(th + th[::-1], 2 * mid, atol=1e-13)

    def test_range_bound(self):
        x = np.array([-50.0, 50.0])
        for sigma in SIGMAS:
            th = phase_1d(x, sigma, 0.0, 1.0)
            assert abs(th[0]) <= 1e-12  # normalized to vanish far left
            assert th[1] > -(2 * sigma + 1) * np.pi / 2

    def test_sign_flip_mirrors_phase(self):
        x = np.linspace(-4, 4, 17)
        plus = phase_1d(x, 2.0, 0.5, 1.0)
        minus = phase_1d(x, 2.0, 0.5, -1.0)
        assert np.allclose(plus, -minus, atol=1e-14)


class TestProfileResidual:
    @pytest.mark.parametrize(
        "sigma,eps,delta", list(itertools.product(SIGMAS, EPSILONS, DELTAS))
    )
    def test_solves_stationary_ode(self, sigma, eps, delta):
        assert profile_residual_1d(sigma, eps, delta) <= 1e-8

    def test_profile_combines_amplitude_and_phase(self):
        x = np.linspace(-3, 3, 7)
        q = profile_1d(x, 2.0, 1.0, 1.0)
        assert np.allclose(np.abs(q), amplitude_1d(x, 2.0, 1.0, 1.0))
        assert np.allclose(np.angle(q), phase_1d(x, 2.0, 1.0, 1.0))

    def test_rejects_bad_width(self):
        with pytest.raises(ValueError, match="half_width"):
            profile_residual_1d(1.0, 0.0, 0.0, half_width=0.0)

    def test_residual_not_an_artifact_of_resolution(self):
        # doubling n leaves the residual at the same level: the closed form,
        # not truncation, sets the number
        r1 = profile_residual_1d(2.0, 0.5, 1.0, n=4096)
        r2 = profile_residual_1d(2.0, 0.5, 1.0, n=8192)
        assert r1 <= 1e-10 and r2 <= 1e-10


class TestSteepeningLimit:
    def test_rescaled_profile_approaches_limit(self):
        # delta^(1/(2 sigma)) Q(x; delta) -> limit profile as delta grows, up
        # to a constant gauge phase, at eps = 0
        x = np.linspace(-2.0, 2.0, 161)
        for sigma in SIGMAS:
            errs = []
            for delta in (1e3, 1e4):
                scaled = delta ** (1.0 / (2.0 * sigma)) * profile_1d(x, sigma, 0.0, delta)
                limit = dnls_limit_profile(x, sigma)
                k = len(x) // 2
                gauge = limit[k] / scaled[k] * abs(scaled[k]) / abs(limit[k])
                errs.append(np.max(np.abs(gauge * scaled - limit)))
            assert errs[1] <= 1e-3
            # first-order rate in 1/delta
            assert errs[1] <= 0.2 * errs[0]

    def test_limit_amplitude_closed_form(self):
        x = np.linspace(-1, 1, 41)
        for sigma in SIGMAS:
            amp = np.abs(dnls_limit_profile(x, sigma))
            want = (2.0 * (sigma + 1.0) / np.cosh(2.0 * sigma * x)) ** (1.0 / (2.0 * sigma))
            assert np.allclose(amp, want, atol=1e-13)
