"""Bump profiles: branch identities, Fourier data, Poisson summation."""

import numpy as np
import pytest

from fliptrace.bump import (
    DECAY_TOL,
    GaussianWindow,
    ProfileWindow,
    build_bump,
    build_h,
    coefficients_adaptive,
    periodize_coeffs,
    poisson_check,
)
from fliptrace.errors import ParameterError, ResolutionError

TS = (0.5, 0.55, 0.65, 0.8, 0.95)


class TestInterpolant:
    @pytest.mark.parametrize("t", TS)
    def test_endpoint_values(self, t):
        h = build_h(t)
        assert h(-0.5) == pytest.approx(0.0, abs=1e-15)
        assert h(-t / 2) == pytest.approx(0.5, abs=1e-12)
        mid = h((-0.5 - t / 2) / 2)
        assert 0.0 < mid < 0.5

    @pytest.mark.parametrize("t", (0.55, 0.8))
    def test_flat_endpoints_finite_differences(self, t):
        h = build_h(t)
        d = 1e-4
        for x0 in (-0.5, -t / 2):
            d1 = (h(x0 + d) - h(x0 - d)) / (2 * d)
            d2 = (h(x0 + d) - 2 * h(x0) + h(x0 - d)) / d**2
            assert abs(d1) < 1e-6
            assert abs(d2) < 1e-6

    def test_monotone(self):
        h = build_h(0.7)
        xs = np.linspace(-0.5, -0.35, 1000)
        vals = h(xs)
        assert np.all(np.diff(vals) >= -1e-15)

    def test_range_check(self):
        with pytest.raises(ParameterError):
            build_h(0.3)
        with pytest.raises(ParameterError):
            build_h(1.0)


class TestProfile:
    @pytest.mark.parametrize("t", TS)
    def test_boundary_values(self, t):
        pr = build_bump(t)
        assert pr.f_eval(0.0) == pytest.approx(1.0, abs=1e-12)
        assert pr.f_eval(0.5) == pytest.approx(0.0, abs=1e-15)
        assert pr.f_eval(-0.5) == pytest.approx(0.0, abs=1e-15)
        assert pr.f_eval(t / 2) == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("t", TS)
    def test_even_and_plateau(self, t):
        pr = build_bump(t)
        xs = np.linspace(-0.5, 0.5, 1001)
        assert np.allclose(pr.f_eval(xs), pr.f_eval(-xs), atol=1e-12)
        plateau = np.linspace(0.5 - t, t - 0.5, 101)
        assert np.allclose(pr.f_eval(plateau), 1.0, atol=1e-15)

    @pytest.mark.parametrize("t", TS)
    def test_step_identity(self, t):
        # f_t(x+t) = 1 - f_t(x) on [-1/2, 1/2-t]
        pr = build_bump(t)
        xs = np.linspace(-0.5, 0.5 - t, 500)
        assert np.allclose(pr.f_eval(xs + t), 1.0 - pr.f_eval(xs), atol=1e-9)

    @pytest.mark.parametrize("t", TS)
    def test_reflection_identity(self, t):
        # f_t(x) + f_t(t-x) = 1 on [0, 1/2]
        pr = build_bump(t)
        xs = np.linspace(0.0, 0.5, 500)
        assert np.allclose(pr.f_eval(xs) + pr.f_eval(t - xs), 1.0, atol=1e-9)

    @pytest.mark.parametrize("t", TS)
    def test_g_support_and_symmetry(self, t):
        pr = build_bump(t)
        xs = np.linspace(t - 0.5, 0.5, 400)
        assert np.allclose(pr.g_eval(xs), pr.g_eval(t - xs), atol=1e-12)
        # g^2 = f (1-f) (squared form: the sqrt magnifies round-off)
        assert np.allclose(
            pr.g_eval(xs) ** 2, pr.f_eval(xs) * (1.0 - pr.f_eval(xs)), atol=1e-12
        )
        left = np.linspace(-0.5, t - 0.5 - 1e-9, 100)
        assert np.all(pr.g_eval(left) == 0.0)
        assert pr.g_eval(0.75) == 0.0

    @pytest.mark.parametrize("t", TS)
    def test_projection_preconditions(self, t):
        # F = F^2 + G^2 + G(.-t)^2;  G (1 - F - F(.+t)) = 0;  G G(.+t) = 0
        # on the circle, sampled over one period
        pr = build_bump(t)
        xs = np.linspace(-0.5, 0.5, 1501)

        def per(fn, y):
            y = np.asarray(y)
            return sum(fn(y + k) for k in range(-2, 3))

        F = per(pr.f_eval, xs)
        G = per(pr.g_eval, xs)
        Gp = per(pr.g_eval, xs + t)
        Fm = per(pr.f_eval, xs - t)
        assert np.max(np.abs(F - (F**2 + G**2 + Gp**2))) < 1e-9
        assert np.max(np.abs(G * (1.0 - F - Fm))) < 1e-9
        assert np.max(np.abs(G * Gp)) < 1e-9

    @pytest.mark.parametrize("t", TS)
    def test_lattice_sums(self, t):
        # sum_n f_t(n) = 1, sum_n f_t(1/2+n) = 0,
        # sum_n g_t(t/2+n) = 1/2, sum_n g_t(t/2+1/2+n) = 0
        pr = build_bump(t)
        ns = np.arange(-3, 4)
        assert np.sum(pr.f_eval(ns)) == pytest.approx(1.0, abs=1e-12)
        assert np.sum(pr.f_eval(0.5 + ns)) == pytest.approx(0.0, abs=1e-12)
        assert np.sum(pr.g_eval(t / 2 + ns)) == pytest.approx(0.5, abs=1e-12)
        assert np.sum(pr.g_eval(t / 2 + 0.5 + ns)) == pytest.approx(0.0, abs=1e-12)


class TestCoefficients:
    @pytest.mark.parametrize("t", TS)
    def test_fhat0_is_t(self, t):
        pr, fh, gh = coefficients_adaptive(t)
        mid = (len(fh) - 1) // 2
        assert fh[mid].real == pytest.approx(t, abs=1e-10)
        assert abs(fh[mid].imag) < 1e-12

    def test_reconstruction_matches_periodization(self):
        pr, fh, gh = coefficients_adaptive(0.65)
        b = (len(fh) - 1) // 2
        ns = np.arange(-b, b + 1)
        xs = np.linspace(0.0, 1.0, 64, endpoint=False)
        for x in xs:
            rec = np.sum(fh * np.exp(2j * np.pi * ns * x))
            direct = sum(pr.f_eval(x + k) for k in range(-2, 3))
            assert abs(rec - direct) < 1e-9

    def test_ghat_conjugate_symmetric(self):
        pr, fh, gh = coefficients_adaptive(0.8)
        assert np.allclose(gh[::-1], np.conj(gh), atol=1e-13)

    def test_fhat_real_even(self):
        pr, fh, gh = coefficients_adaptive(0.8)
        assert np.max(np.abs(fh.imag)) < 1e-12
        assert np.allclose(fh[::-1], fh, atol=1e-12)

    def test_strict_bound_error(self):
        # ghat(256) at t=0.95 is ~4e-6: the strict contract must refuse
        pr = build_bump(0.95)
        with pytest.raises(ResolutionError):
            periodize_coeffs(pr, trunc=256, decay_tol=1e-14)

    def test_adaptive_decay_reached(self):
        pr, fh, gh = coefficients_adaptive(0.55)
        assert max(abs(fh[0]), abs(fh[-1]), abs(gh[0]), abs(gh[-1])) < DECAY_TOL


class TestPoisson:
    @pytest.mark.parametrize("x", (0.0, 0.3, 0.77))
    def test_gaussian(self, x):
        res = poisson_check(GaussianWindow(), x)
        for key in ("plain", "even", "odd"):
            lhs, rhs = res[key]
            assert abs(lhs - rhs) < 1e-10

    @pytest.mark.parametrize("x", (0.0, 0.3, 0.77, -0.41, 0.99))
    def test_bump_window(self, x):
        pr = build_bump(0.65)
        res = poisson_check(ProfileWindow(pr, trunc=600), x)
        for key in ("plain", "even", "odd"):
            lhs, rhs = res[key]
            assert abs(lhs - rhs) < 1e-9

    def test_even_window_odd_display_real_at_zero(self):
        res = poisson_check(GaussianWindow(), 0.0)
        lhs, rhs = res["odd"]
        assert abs(lhs.imag) < 1e-12
        assert abs(rhs.imag) < 1e-12
