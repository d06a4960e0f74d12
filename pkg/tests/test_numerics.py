"""Tests for special functions, Monte-Carlo engine, LQ factorization and
the spacing entropy estimator.

Derived expectations are computed by independent oracles (quadrature,
high-precision arithmetic, brute-force sampling) rather than by the code
under test.
"""

import math

import numpy as np
import pytest
import scipy.integrate
from scipy import stats

from noncohmimo.errors import (
    DomainError,
    EstimationError,
    InsufficientSamplesError,
    SingularMatrixError,
)
from noncohmimo.numerics import (
    EULER_GAMMA,
    LOG2E,
    MonteCarloEstimate,
    digamma,
    elog_one_plus_exponential,
    entropy_1d_spacing,
    exp_e1,
    log_gamma,
    lq_decompose,
    mc_expectation,
    sample_complex_gaussian,
    sample_isotropic_unitary,
    substream,
)


def quad_exp_e1(x):
    """Quadrature oracle for e^x E1(x) = integral_1^inf e^{x(1-t)}/t dt."""
    val, _ = scipy.integrate.quad(
        lambda t: math.exp(x * (1.0 - t)) / t, 1.0, np.inf, limit=400
    )
    return val


def series_digamma(x, terms=2_000_000):
    """Series oracle psi(x) = -gamma + sum_k (1/(k+1) - 1/(k+x))."""
    k = np.arange(terms, dtype=float)
    tail = (x - 1.0) / ((terms + 1.0) * (terms + x))  # integral tail estimate
    return -EULER_GAMMA + float(np.sum(1.0 / (k + 1.0) - 1.0 / (k + x))) + tail


class TestLogGamma:
    def test_integer_factorials(self):
        assert log_gamma(1.0) == pytest.approx(0.0, abs=1e-12)
        assert log_gamma(2.0) == pytest.approx(0.0, abs=1e-12)
        assert log_gamma(5.0) == pytest.approx(math.log(24.0), abs=1e-12)

    def test_accuracy_window(self):
        for x in np.linspace(0.5, 50, 57):
            assert log_gamma(float(x)) == pytest.approx(
                float(scipy.special.gammaln(x)), abs=1e-12
            )

    def test_domain(self):
        with pytest.raises(DomainError):
            log_gamma(0.0)
        with pytest.raises(DomainError):
            log_gamma(-2.5)


class TestDigamma:
    def test_euler_values(self):
        assert digamma(1.0) == pytest.approx(-EULER_GAMMA, abs=1e-10)
        assert digamma(2.0) == pytest.approx(1.0 - EULER_GAMMA, abs=1e-10)

    def test_half_against_series_oracle(self):
        oracle = series_digamma(0.5)
        frozen = -EULER_GAMMA - 2.0 * math.log(2.0)  # -1.9635100260
        assert oracle == pytest.approx(frozen, abs=1e-6)
        assert digamma(0.5) == pytest.approx(frozen, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            digamma(-1.0)


class TestExpE1:
    def test_unit_argument_against_quadrature(self):
        oracle = quad_exp_e1(1.0)
        assert oracle == pytest.approx(0.5963473624, abs=1e-9)
        assert exp_e1(1.0) == pytest.approx(oracle, rel=1e-9)

    def test_relative_error_across_domain(self):
        import mpmath

        for x in np.geomspace(1e-6, 1e3, 120):
            ref = float(mpmath.exp(x) * mpmath.e1(x))
            assert exp_e1(float(x)) == pytest.approx(ref, rel=1e-9)

    def test_upper_bound_and_decay(self):
        for x in (1.0, 10.0, 100.0):
            assert exp_e1(x) <= math.log1p(1.0 / x)
        assert exp_e1(1e3) < 1e-2

    def test_small_argument_expansion(self):
        approx = -math.log(1e-6) - EULER_GAMMA
        assert exp_e1(1e-6) == pytest.approx(approx, abs=1e-3)

    def test_positive_and_strictly_decreasing(self):
        grid = np.geomspace(1e-5, 1e3, 100)
        vals = exp_e1(grid)
        assert np.all(vals > 0)
        assert np.all(np.diff(vals) < 0)

    def test_domain(self):
        with pytest.raises(DomainError):
            exp_e1(0.0)
        with pytest.raises(DomainError):
            exp_e1(-1.0)


class TestElogOnePlusExponential:
    def test_monte_carlo_oracle(self):
        rng = substream(1234, (0,))
        x = rng.exponential(1.0, 10_000_000)
        sample = np.log1p(x)
        se = sample.std(ddof=1) / math.sqrt(sample.size)
        assert elog_one_plus_exponential(1.0) == pytest.approx(
            float(sample.mean()), abs=3 * se
        )

    def test_large_ratio_asymptote(self):
        assert elog_one_plus_exponential(100.0) == pytest.approx(0.01, rel=0.02)

    def test_training_rate_anchor(self):
        assert elog_one_plus_exponential(0.10275) == pytest.approx(1.993, abs=2e-3)

    def test_domain(self):
        with pytest.raises(DomainError):
            elog_one_plus_exponential(0.0)


class TestSampleComplexGaussian:
    def test_zero_variance_degenerate(self):
        rng = substream(0)
        assert sample_complex_gaussian(0.0, rng) == 0j
        assert np.all(sample_complex_gaussian(0.0, rng, 5) == 0)

    def test_second_moment(self):
        rng = substream(11)
        z = sample_complex_gaussian(1.0, rng, 1_000_000)
        assert 0.997 <= float(np.mean(np.abs(z) ** 2)) <= 1.003

    def test_zero_mean(self):
        rng = substream(12)
        z = sample_complex_gaussian(1.0, rng, 1_000_000)
        assert abs(complex(np.mean(z))) <= 0.004

    def test_domain(self):
        with pytest.raises(DomainError):
            sample_complex_gaussian(-1.0, substream(0))


class TestIsotropicUnitary:
    def test_unitarity(self):
        rng = substream(21)
        for n in (1, 2, 3, 5):
            q = sample_isotropic_unitary(n, rng)
            assert np.linalg.norm(q @ q.conj().T - np.eye(n)) <= 1e-10

    def test_scalar_case_uniform_phase(self):
        rng = substream(22)
        z = np.array([sample_isotropic_unitary(1, rng)[0, 0] for _ in range(100_000)])
        assert np.allclose(np.abs(z), 1.0, atol=1e-12)
        # mean of e^{i theta} should vanish; 3-sigma band at 1e5 draws
        assert abs(complex(np.mean(z))) <= 0.012

    def test_first_entry_marginal_uniform(self):
        rng = substream(23)
        q11_sq = np.array(
            [abs(sample_isotropic_unitary(2, rng)[0, 0]) ** 2 for _ in range(100_000)]
        )
        assert float(q11_sq.mean()) == pytest.approx(0.5, abs=0.005)
        assert stats.kstest(q11_sq, "uniform").pvalue > 1e-3

    def test_domain(self):
        with pytest.raises(DomainError):
            sample_isotropic_unitary(0, substream(0))


class TestLqDecompose:
    def test_identity(self):
        fac = lq_decompose(np.eye(2))
        assert np.allclose(fac.l, np.eye(2), atol=1e-12)
        assert np.allclose(fac.q, np.eye(2), atol=1e-12)

    def test_row_norm_on_diagonal(self):
        fac = lq_decompose(np.array([[3.0, 4.0], [0.0, 5.0]]))
        assert fac.l[0, 0] == pytest.approx(5.0, abs=1e-12)

    def test_roundtrip_many_random_inputs(self):
        rng = substream(31)
        for _ in range(10_000):
            rows = int(rng.integers(1, 4))
            cols = rows + int(rng.integers(0, 3))
            m = sample_complex_gaussian(1.0, rng, (rows, cols))
            fac = lq_decompose(m)
            scale = np.linalg.norm(m)
            assert np.linalg.norm(fac.l @ fac.q - m) <= 1e-10 * scale
            assert np.linalg.norm(fac.q @ fac.q.conj().T - np.eye(rows)) <= 1e-10
            assert np.all(np.abs(fac.l.diagonal().imag) == 0)
            assert np.all(fac.l.diagonal().real >= 0)

    def test_row_norms_preserved(self):
        rng = substream(32)
        m = sample_complex_gaussian(1.0, rng, (2, 4))
        fac = lq_decompose(m)
        for i in range(2):
            lhs = float(np.sum(np.abs(fac.l[i]) ** 2))
            rhs = float(np.sum(np.abs(m[i]) ** 2))
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_rank_deficient_names_row(self):
        m = np.array([[1.0, 2.0, 0.0], [2.0, 4.0, 0.0]])
        with pytest.raises(SingularMatrixError, match="row 1"):
            lq_decompose(m)

    def test_wide_requirement(self):
        with pytest.raises(DomainError):
            lq_decompose(np.ones((3, 2)))


class TestMcExpectation:
    def test_constant_integrand(self):
        est = mc_expectation(lambda rng, n: np.full(n, 7.0), 10_000, seed=1)
        assert est.mean == 7.0
        assert est.std_error == 0.0
        assert est.n_samples == 10_000

    def test_log_exponential_against_closed_form(self):
        est = mc_expectation(
            lambda rng, n: np.log1p(rng.exponential(1.0, n)), 10_000_000, seed=5
        )
        assert abs(est.mean - 0.5963473623231941) <= 3 * est.std_error

    def test_thread_count_does_not_change_bits(self):
        def integrand(rng, n):
            return np.log1p(rng.exponential(2.0, n))

        serial = mc_expectation(integrand, 300_000, seed=42, n_workers=1)
        threaded = mc_expectation(integrand, 300_000, seed=42, n_workers=8)
        assert serial.mean == threaded.mean
        assert serial.std_error == threaded.std_error

    def test_std_error_scaling(self):
        def integrand(rng, n):
            return np.log1p(rng.exponential(1.0, n))

        small = mc_expectation(integrand, 100_000, seed=9)
        large = mc_expectation(integrand, 400_000, seed=9)
        ratio = large.std_error / small.std_error
        assert 0.4 <= ratio <= 0.6

    def test_small_sample_domain(self):
        with pytest.raises(DomainError):
            mc_expectation(lambda rng, n: np.zeros(n), 1, seed=0)

    def test_nonfinite_counting_and_threshold(self):
        def rare_nan(rng, n):
            vals = rng.exponential(1.0, n)
            vals[rng.random(n) < 1e-5] = np.nan
            return vals

        est = mc_expectation(rare_nan, 1_000_000, seed=3)
        assert est.n_nonfinite > 0
        assert np.isfinite(est.mean)

        def many_nan(rng, n):
            vals = rng.exponential(1.0, n)
            vals[rng.random(n) < 0.01] = np.nan
            return vals

        with pytest.raises(EstimationError):
            mc_expectation(many_nan, 100_000, seed=3)


class TestEntropySpacing:
    def test_uniform(self):
        rng = substream(41)
        h = entropy_1d_spacing(rng.random(100_000))
        assert h == pytest.approx(0.0, abs=0.05)

    def test_exponential(self):
        rng = substream(42)
        h = entropy_1d_spacing(rng.exponential(1.0, 100_000))
        assert h == pytest.approx(LOG2E, abs=0.05)

    def test_real_gaussian(self):
        rng = substream(43)
        h = entropy_1d_spacing(rng.standard_normal(100_000))
        assert h == pytest.approx(0.5 * math.log2(2 * math.pi * math.e), abs=0.05)

    def test_too_few_samples(self):
        with pytest.raises(InsufficientSamplesError):
            entropy_1d_spacing(np.arange(50.0))


def test_estimate_is_frozen_record():
    est = MonteCarloEstimate(mean=1.0, std_error=0.1, n_samples=10, seed=3)
    with pytest.raises(AttributeError):
        est.mean = 2.0
