"""Profile families: densities, Mellin closed forms against quadrature, moments."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from gflab.errors import DomainError
from gflab.model import (
    Dirac,
    LogGaussian,
    LogHeaviside,
    ModelParams,
    format_profile,
    mellin_U0,
    moment,
    parse_profile,
    profile_eval_x,
    profile_eval_y,
)

GAUSS = LogGaussian(mu=0.0, sigma=0.1, mass=1.0)
HEAVI = LogHeaviside(a=-0.2, b=0.0, height=1.0)
ATOM = Dirac(x0=0.5, weight=2.0)


def n0_quadrature(p, f=lambda y: 1.0):
    """Independent oracle: adaptive quadrature of f(y) n(0, y) over the support."""
    if isinstance(p, LogGaussian):
        lo, hi = p.mu - 14 * p.sigma, p.mu + 14 * p.sigma
    else:
        lo, hi = p.a, p.b
    val, _ = quad(lambda y: f(y) * profile_eval_y(p, y), lo, hi, epsabs=1e-13, epsrel=1e-12)
    return val


class TestValidation:
    def test_params_invariants(self):
        with pytest.raises(DomainError):
            ModelParams(alpha=1.0)
        with pytest.raises(DomainError):
            ModelParams(b=0.0)
        with pytest.raises(DomainError):
            ModelParams(g=-0.1)
        assert ModelParams(alpha=2.0).log_alpha == math.log(2.0)

    def test_profile_invariants(self):
        with pytest.raises(DomainError):
            LogGaussian(0.0, -0.1)
        with pytest.raises(DomainError):
            LogHeaviside(0.0, -1.0)
        with pytest.raises(DomainError):
            Dirac(-1.0)

    def test_dirac_has_no_density(self):
        with pytest.raises(DomainError, match="no pointwise density"):
            profile_eval_x(ATOM, 1.0)
        with pytest.raises(DomainError, match="no pointwise density"):
            profile_eval_y(ATOM, 0.0)


class TestDensities:
    def test_gaussian_peak(self):
        assert profile_eval_x(GAUSS, 1.0) == pytest.approx(3.989422804014327, rel=1e-12)
        assert profile_eval_y(GAUSS, 0.0) == pytest.approx(3.989422804014327, rel=1e-12)

    def test_gaussian_one_sigma(self):
        # gaussian pdf oracle at one sigma
        assert profile_eval_y(GAUSS, 0.1) == pytest.approx(2.4197072451914337, rel=1e-12)

    def test_heaviside_values(self):
        assert profile_eval_x(HEAVI, math.exp(-0.3)) == 0.0
        # x^-2 * height at x = e^{-0.1}, checked by hand
        assert profile_eval_x(HEAVI, math.exp(-0.1)) == pytest.approx(1.2214027581601699, rel=1e-12)
        assert profile_eval_y(HEAVI, -0.1) == 1.0
        assert profile_eval_y(HEAVI, 0.05) == 0.0

    def test_x_y_consistency(self):
        # n(0, y) = e^{2y} u0(e^y) pointwise on a thousand points
        ys = np.linspace(-3.0, 2.0, 1001)
        for p in (GAUSS, HEAVI):
            lhs = profile_eval_y(p, ys)
            rhs = np.exp(2.0 * ys) * profile_eval_x(p, np.exp(ys))
            assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-300)

    def test_positive_size_required(self):
        with pytest.raises(DomainError):
            profile_eval_x(GAUSS, -1.0)


class TestMellin:
    def test_initial_mass_is_transform_at_two(self):
        assert mellin_U0(GAUSS, 2.0) == pytest.approx(1.0, abs=1e-15)

    def test_heaviside_removable_singularity(self):
        assert mellin_U0(HEAVI, 2.0) == pytest.approx(0.2, rel=1e-12)
        # continuity across the expansion switch
        near = mellin_U0(HEAVI, 2.0 + 1e-6 * 1.0001)
        inside = mellin_U0(HEAVI, 2.0 + 1e-6 * 0.9999)
        assert near == pytest.approx(inside, rel=1e-9)

    def test_gaussian_third_moment_form(self):
        assert mellin_U0(GAUSS, 3.0) == pytest.approx(1.005012520859401, rel=1e-12)

    @pytest.mark.parametrize("p", [GAUSS, HEAVI], ids=["gaussian", "heaviside"])
    @pytest.mark.parametrize("re_s", [0.0, 1.0, 2.0, 3.0, 4.0])
    @pytest.mark.parametrize("im_s", [-20.0, -7.0, 0.0, 7.0, 20.0])
    def test_closed_form_matches_quadrature(self, p, re_s, im_s):
        s = complex(re_s, im_s)
        # U0(s) = int n(0, y) e^{y (s - 2)} dy after substituting y = log x
        val_re = n0_quadrature(p, lambda y: math.exp(y * (re_s - 2.0)) * math.cos(y * im_s))
        val_im = n0_quadrature(p, lambda y: math.exp(y * (re_s - 2.0)) * math.sin(y * im_s))
        closed = mellin_U0(p, s)
        scale = max(abs(closed), 1e-30)
        assert abs(closed - complex(val_re, val_im)) / scale < 1e-8

    def test_dirac_closed_form(self):
        s = complex(2.5, 3.0)
        expected = 2.0 * np.exp((s - 1.0) * math.log(0.5))
        assert mellin_U0(ATOM, s) == pytest.approx(expected, rel=1e-14)

    def test_array_input(self):
        s = np.array([2.0 + 0j, 3.0 + 1j])
        out = mellin_U0(GAUSS, s)
        assert out.shape == (2,)
        assert out[0] == pytest.approx(mellin_U0(GAUSS, 2.0 + 0j), rel=1e-15)


class TestMoments:
    def test_first_moment_is_mass(self):
        assert moment(GAUSS, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_dirac_first_moment(self):
        assert moment(ATOM, 1.0) == pytest.approx(1.0, rel=1e-15)

    def test_heaviside_zeroth_moment(self):
        # quadrature oracle gave e^{0.2} - 1
        assert moment(HEAVI, 0.0) == pytest.approx(0.22140275816016985, rel=1e-12)
        oracle, _ = quad(lambda x: profile_eval_x(HEAVI, x), math.exp(-0.25), 1.0,
                         epsabs=1e-14)
        assert moment(HEAVI, 0.0) == pytest.approx(oracle, rel=1e-10)

    def test_moment_agrees_with_transform(self):
        for p in (GAUSS, HEAVI, ATOM):
            for q in (0.0, 0.5, 1.0, 2.0):
                assert moment(p, q) == mellin_U0(p, complex(q + 1.0)).real

    @pytest.mark.parametrize("p", [GAUSS, HEAVI], ids=["gaussian", "heaviside"])
    def test_initial_mass_consistency(self, p):
        # int n(0, y) dy = moment(p, 1) = U0(2), all three to 1e-10
        mass = n0_quadrature(p)
        assert mass == pytest.approx(moment(p, 1.0), rel=1e-10)
        assert mass == pytest.approx(mellin_U0(p, 2.0).real, rel=1e-10)


class TestProfileSyntax:
    @pytest.mark.parametrize("p", [GAUSS, HEAVI, ATOM, LogGaussian(0.3, 0.25, 2.5)])
    def test_round_trip(self, p):
        assert parse_profile(format_profile(p)) == p

    def test_parse_examples(self):
        assert parse_profile("loggaussian mu=0 sigma=0.1 mass=1") == GAUSS
        assert parse_profile("dirac x0=0.5 weight=2") == ATOM

    @pytest.mark.parametrize("bad", [
        "gauss mu=0", "loggaussian mu=0 sigma=0.1 mass=1 extra=2",
        "loggaussian mu", "loggaussian sigma=0.1", "loggaussian mu=zz sigma=1",
    ])
    def test_parse_rejects(self, bad):
        with pytest.raises(DomainError):
            parse_profile(bad)
