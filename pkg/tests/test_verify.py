"""Tests for the analytic check suite: every check passes on its default
grid and the documented tight/loose regimes behave as expected."""

import math

import numpy as np
import pytest

from noncohmimo.channel import ChannelConfig, ChannelDraw, LinkExponents, xi_stats
from noncohmimo.errors import DomainError
from noncohmimo.numerics import EULER_GAMMA, LOG2E, MonteCarloConfig, substream
from noncohmimo.verify import (
    DEFAULT_GRID,
    K_FLOOR_BITS,
    check_appendix_k_floor,
    check_fact_chi_squared,
    check_fact_jensen_gap,
    check_fact_recip_exponential,
    check_inner_outer_match,
    check_lemma_isotropic_radial,
    check_lq_norm_preservation,
    run_default_suite,
)

MC = MonteCarloConfig(n_samples=100_000, seed=3)


class TestJensenGap:
    def test_lower_bound_tight_at_zero_offset(self):
        res = check_fact_jensen_gap(0.0, 1.0, 1.0, MC)
        assert res.passed
        exact = -EULER_GAMMA * LOG2E
        assert res.lhs == pytest.approx(exact, abs=0.02)

    def test_upper_bound_nearly_tight_for_large_offset(self):
        res = check_fact_jensen_gap(10.0, 1.0, 1.0, MC)
        assert res.passed
        upper = math.log2(10.0 + 1.0)
        assert upper - res.lhs < 0.07

    def test_generic_point(self):
        assert check_fact_jensen_gap(1.0, 5.0, 3.0, MC).passed

    def test_domain(self):
        with pytest.raises(DomainError):
            check_fact_jensen_gap(-1.0, 1.0, 1.0, MC)


class TestChiSquared:
    def test_two_degrees_against_closed_form(self):
        res = check_fact_chi_squared(0.0, 1.0, 2, MC)
        assert res.passed
        exact = 1.0 - EULER_GAMMA * LOG2E  # E[log2 chi2(2)] via exponential
        assert res.lhs == pytest.approx(exact, abs=0.02)

    def test_generic_point(self):
        assert check_fact_chi_squared(5.0, 1.0, 4, MC).passed

    def test_concentration_at_large_dof(self):
        res = check_fact_chi_squared(0.0, 1.0, 64, MC)
        assert res.passed
        assert res.rhs_upper - res.rhs_lower < 0.05 + 6 * 0.001
        assert abs(res.lhs - math.log2(64.0)) < 0.05


class TestRecipExponential:
    def test_unit_point(self):
        res = check_fact_recip_exponential(1.0, 1.0, MC)
        assert res.passed
        center = 0.5 * (res.rhs_lower + res.rhs_upper)
        assert center == pytest.approx(0.5963473623, abs=1e-9)

    def test_large_b_limit(self):
        res = check_fact_recip_exponential(100.0, 1.0, MC)
        assert res.passed
        center = 0.5 * (res.rhs_lower + res.rhs_upper)
        assert center == pytest.approx(0.990, abs=2e-3)
        assert center < 1.0

    def test_chain_holds_on_grid(self):
        for b in (0.01, 0.5, 3.0, 40.0):
            for mu in (0.1, 1.0, 10.0):
                assert check_fact_recip_exponential(b, mu, MC).passed


class TestIsotropicRadial:
    def test_scalar_case(self):
        res = check_lemma_isotropic_radial(1, 1.0)
        assert res.passed
        assert res.lhs == pytest.approx(math.log2(math.pi * math.e), abs=1e-12)
        assert res.lhs == pytest.approx(LOG2E + math.log2(math.pi), abs=1e-9)

    def test_dimension_four(self):
        res = check_lemma_isotropic_radial(4, 2.0)
        assert res.passed
        assert res.lhs == pytest.approx(4 * math.log2(2 * math.pi * math.e), abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_exact_across_dimensions(self, n):
        res = check_lemma_isotropic_radial(n, 1.7)
        assert res.passed
        assert abs(res.lhs - 0.5 * (res.rhs_lower + res.rhs_upper)) < 1e-9

    def test_spacing_estimator_cross_validation(self):
        res = check_lemma_isotropic_radial(
            2, 1.0, MonteCarloConfig(100_000, 5), use_spacing_estimator=True
        )
        assert res.passed
        assert res.rhs_upper - res.rhs_lower == pytest.approx(0.1, abs=1e-12)


class TestLqNormPreservation:
    def test_orthogonal_noise_rows_vanish_projection(self):
        draw = ChannelDraw(g=np.zeros((2, 2), complex), w=np.eye(2, dtype=complex))
        stats = xi_stats(0, 0, 0, draw)
        assert stats.xi21_sq <= 1e-12

    def test_random_draws(self):
        config = ChannelConfig(
            exponents=LinkExponents.symmetric(1.0, 0.5), t=3, snr=10.0
        )
        res = check_lq_norm_preservation(10_000, config, substream(61))
        assert res.passed
        assert res.lhs < 1e-9

    def test_scaling_homogeneity(self):
        rng = substream(62)
        g = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        w = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)))
        base = xi_stats(0.3, 0.1, 0.7, ChannelDraw(g=g, w=w))
        scaled = xi_stats(0.3, 0.1, 0.7, ChannelDraw(g=10 * g, w=10 * w))
        assert scaled.xi11_sq == pytest.approx(100 * base.xi11_sq, rel=1e-12)
        assert scaled.xi21_sq == pytest.approx(100 * base.xi21_sq, rel=1e-9)
        assert scaled.xi22_sq == pytest.approx(100 * base.xi22_sq, rel=1e-9)


class TestEntropyFloor:
    def test_pure_exponential_case(self):
        res = check_appendix_k_floor(1.0, 0.0, (), MC)
        assert res.passed
        assert res.lhs == pytest.approx(LOG2E, abs=0.05)
        assert res.lhs > K_FLOOR_BITS

    def test_large_shift(self):
        assert check_appendix_k_floor(1.0, 10.0, (), MC).passed

    def test_adversarial_cancellation(self):
        res = check_appendix_k_floor(1.0, 40.0, ((1.0, -40.0),), MC)
        assert res.passed
        # full cancellation leaves a pure exponential of mean 2
        assert res.lhs == pytest.approx(1.0 + LOG2E, abs=0.05)

    def test_domain(self):
        with pytest.raises(DomainError):
            check_appendix_k_floor(0.5, 0.0, (), MC)
        with pytest.raises(DomainError):
            check_appendix_k_floor(1.0, 0.0, ((2.0, 1.0),), MC)


class TestInnerOuterMatch:
    @pytest.mark.parametrize(
        "gd,gcl,t,value",
        [
            (1.0, 0.5, 2, 0.75),
            (1.0, 0.5, 5, 1.4),
            (1.0, 1.0, 2, 0.5),
        ],
    )
    def test_reference_points(self, gd, gcl, t, value):
        from noncohmimo.gdof import gdof_2x2_sym

        res = check_inner_outer_match(gd, gcl, t)
        assert res.passed
        assert gdof_2x2_sym(gd, gcl, t) == pytest.approx(value, abs=1e-12)


def test_default_suite_all_pass():
    results = run_default_suite(MC)
    names = {name for name, _, _ in results}
    assert names == set(DEFAULT_GRID)
    for name, params, res in results:
        assert res.passed, (name, params, res)
    # at least 5 grid points per check
    for name in DEFAULT_GRID:
        assert len(DEFAULT_GRID[name]) >= 5


def test_default_suite_subset_and_unknown():
    results = run_default_suite(MC, checks=["fact3"])
    assert all(name == "fact3" for name, _, _ in results)
    with pytest.raises(DomainError):
        run_default_suite(MC, checks=["nope"])
