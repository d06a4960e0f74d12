"""Achievable-rate evaluation for the 2x2 block-fading channel at T = 2,
plus the Gaussian-codebook mutual-information lower bound for M x M.

Three schemes are compared in bits/symbol:

* noncoherent: lower-triangular input times an isotropic unitary, with
  fixed power split |a|^2 = 2, eta ~ CN(0, 1), |c|^2 = 1/rho_cross^2;
  evaluated by Monte Carlo of closed-form per-draw terms.
* siso_training: one antenna, one pilot symbol, MMSE channel estimate,
  Gaussian signaling against the estimate (exact closed form).
* parallel_training: both antennas trained by one pilot, crosslinks
  treated as noise (exact closed form).

Link powers map from physical units as rho^2 = 10**(snr_db/10) * mean_gain,
i.e. transmit SNR is per antenna and the quoted gains are the average
squared channel magnitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import LinkExponents, power_check
from .errors import ConfigurationError, DomainError
from .numerics import (
    LOG2E,
    MonteCarloConfig,
    MonteCarloEstimate,
    elog_one_plus_exponential,
    mc_expectation,
    substream,
)

_LN2 = math.log(2.0)

#: fixed noncoherent input powers: |a|^2, |b|^2 (|c|^2 is 1/rho_cross^2)
_A_SQ = 2.0
_B_SQ = 1.0

#: per-symbol average power must stay within 2% of the unit constraint
_POWER_TOL = 0.02


@dataclass(frozen=True)
class RateScenario:
    """Physical description of a 2x2 scenario: transmit SNR in dB and the
    mean squared gains of direct and cross links (linear units)."""

    snr_db: float
    direct_gain: float
    cross_gain: float
    t: int = 2

    def __post_init__(self):
        if not math.isfinite(self.snr_db):
            raise DomainError("snr_db must be finite")
        if self.direct_gain <= 0 or self.cross_gain <= 0:
            raise DomainError("link gains must be positive")
        if int(self.t) != self.t or self.t < 1:
            raise DomainError("t must be a positive integer")

    @property
    def snr_linear(self):
        return 10.0 ** (self.snr_db / 10.0)

    @property
    def rho_direct_sq(self):
        """Effective direct-link power rho^2 = P * gain."""
        return self.snr_linear * self.direct_gain

    @property
    def rho_cross_sq(self):
        """Effective crosslink power rho^2 = P * gain."""
        return self.snr_linear * self.cross_gain


@dataclass(frozen=True)
class RateReport:
    """The three schemes' rates plus the noncoherent-over-training gain."""

    noncoherent: MonteCarloEstimate
    siso_training: float
    parallel_training: float
    gain: float


def rate_siso_training(scenario):
    """Exact rate (bits/symbol) of the single-antenna pilot scheme.

    With rho^2 = P * direct_gain: the MMSE estimate has power
    rho^4/(1+rho^2), the residual-plus-thermal noise is
    rho^2/(1+rho^2) + 1, and the data symbol occupies half the block.
    """
    rho_sq = scenario.rho_direct_sq
    est_power = rho_sq * rho_sq / (1.0 + rho_sq)
    noise = rho_sq / (1.0 + rho_sq) + 1.0
    if est_power <= 0:
        return 0.0
    return 0.5 * elog_one_plus_exponential(noise / est_power) / _LN2


def rate_parallel_training(scenario):
    """Exact rate (bits/symbol) of the two-antenna pilot scheme that treats
    crosslinks as noise; symmetry doubles the per-antenna half-block rate."""
    rd = scenario.rho_direct_sq
    rc = scenario.rho_cross_sq
    denom = 1.0 + rd + rc
    est_power = rd * rd / denom
    noise = rd * (1.0 + rc) / denom + 1.0 + rc
    if est_power <= 0:
        return 0.0
    return elog_one_plus_exponential(noise / est_power) / _LN2


def _noncoherent_input_powers(scenario):
    # |c|^2 = 1/rho_cross^2, capped at 1 so the unit power constraint
    # (|a|^2 + |b|^2 + |c|^2)/4 <= 1 survives rho_cross^2 < 1
    a_sq, b_sq = _A_SQ, _B_SQ
    c_sq = 1.0 / max(scenario.rho_cross_sq, 1.0)
    return a_sq, b_sq, c_sq


def _assert_power_constraint(scenario, seed):
    """Sample the lower-triangular input factor and check the per-symbol
    average power; the unitary factor does not change the Frobenius norm."""
    a_sq, b_sq, c_sq = _noncoherent_input_powers(scenario)
    rng = substream(seed, (9,))
    eta = np.sqrt(b_sq / 2.0) * (
        rng.standard_normal(4096) + 1j * rng.standard_normal(4096)
    )
    mats = np.zeros((4096, 2, 2), dtype=complex)
    mats[:, 0, 0] = math.sqrt(a_sq)
    mats[:, 1, 0] = eta
    mats[:, 1, 1] = math.sqrt(c_sq)
    avg = power_check(mats)
    if avg > 1.0 + _POWER_TOL:
        raise ConfigurationError(
            f"input violates the unit power constraint: {avg:.4f} per symbol"
        )


def rate_noncoherent_t2(scenario, mc=MonteCarloConfig()):
    """Monte-Carlo lower bound (bits/symbol) on the noncoherent rate, T = 2.

    Per draw of the four independent squared magnitudes
    (|g11|^2, |g12|^2, |g22|^2, |eta|^2) the integrand accumulates, in bits:

    * the exponential-entropy surrogate for the first-row power given g12;
    * the exact phase-averaged expectation of log of the first-row power,
      log2((S + sqrt(S^2 - 4 Z^2)) / 2) with
      S = |a|^2|g11|^2 + (|eta|^2 + |c|^2)|g12|^2 and Z = |a eta g11 g12|;
    * the conditional Gaussian log-determinant of the second-row signal
      given the first row and g12, g22;
    * minus the two conditional-noise log terms given the input.

    Constants (unit-vector entropies and the Gaussian entropy of the
    isolated c g22 + noise symbol) are added outside the expectation and
    the total is halved (T = 2).  Negative means are reported as is;
    ``compare_rates`` floors them at zero.
    """
    if scenario.t != 2:
        raise DomainError("rate_noncoherent_t2 requires t = 2")
    if mc.n_samples < 100_000:
        raise DomainError("rate_noncoherent_t2 requires at least 1e5 samples")

    rd = scenario.rho_direct_sq
    rc = scenario.rho_cross_sq
    a_sq, b_sq, c_sq = _noncoherent_input_powers(scenario)
    _assert_power_constraint(scenario, mc.seed)

    def integrand(rng, count):
        x11 = rng.exponential(rd, count)  # |g11|^2
        x12 = rng.exponential(rc, count)  # |g12|^2
        x22 = rng.exponential(rd, count)  # |g22|^2
        e2 = rng.exponential(b_sq, count)  # |eta|^2

        row1_mean = a_sq * rd + b_sq * x12
        h_row1 = LOG2E + np.log2(row1_mean)

        s = a_sq * x11 + (e2 + c_sq) * x12
        z_sq = a_sq * e2 * x12 * x11
        elog_row1 = np.log2(0.5 * (s + np.sqrt(np.maximum(s * s - 4.0 * z_sq, 0.0))))

        det_k = (a_sq * rc + b_sq * x22) * row1_mean - b_sq * b_sq * x22 * x12
        h_cond = np.log2(det_k) - np.log2(row1_mean)

        noise1 = a_sq * rd + e2 * rc + c_sq * rc + a_sq * c_sq * rd * rc + 1.0
        noise2 = a_sq * rc + e2 * rd + c_sq * rd + a_sq * c_sq * rc * rd + 1.0
        h_noise = np.log2(noise1) + np.log2(noise2)

        return h_row1 + elog_row1 + h_cond - h_noise

    est = mc_expectation(
        integrand, mc.n_samples, mc.seed, key=(0,), n_workers=mc.n_workers
    )
    # remaining constants: 2 log2(pi) + log2(pi e (|c|^2 rho_d^2 + 1))
    # + log2(pi e) - 4 log2(pi e)  =  log2(|c|^2 rho_d^2 + 1) - 2 log2(e)
    constant = math.log2(c_sq * rd + 1.0) - 2.0 * LOG2E
    return MonteCarloEstimate(
        mean=0.5 * (est.mean + constant),
        std_error=0.5 * est.std_error,
        n_samples=est.n_samples,
        seed=est.seed,
        n_nonfinite=est.n_nonfinite,
    )


def compare_rates(scenario, mc=MonteCarloConfig()):
    """Evaluate all three schemes and the gain of the noncoherent one over
    the better training baseline; vacuous negative bounds floor at zero."""
    nc = rate_noncoherent_t2(scenario, mc)
    if nc.mean < 0.0:
        nc = MonteCarloEstimate(
            mean=0.0,
            std_error=nc.std_error,
            n_samples=nc.n_samples,
            seed=nc.seed,
            n_nonfinite=nc.n_nonfinite,
        )
    siso = rate_siso_training(scenario)
    parallel = rate_parallel_training(scenario)
    return RateReport(
        noncoherent=nc,
        siso_training=siso,
        parallel_training=parallel,
        gain=nc.mean - max(siso, parallel),
    )


def mi_lower_bound_gaussian(m, t, snr, exponents, mc=MonteCarloConfig()):
    """Monte-Carlo per-symbol lower bound (bits/symbol) on the mutual
    information of i.i.d. Gaussian signaling over an M x M channel.

    Per draw of the fading matrix G and the M x T codeword X:
    2 log2|det G| - (1/T) sum_n log2 det(I + D_n^(1/2) X X^+ D_n^(1/2)),
    where D_n is the diagonal of row-n link powers.  The Gaussian-entropy
    constants of the two terms cancel exactly.
    """
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    m = int(m)
    if int(t) != t or t <= m:
        raise DomainError("mi_lower_bound_gaussian requires integer t > m")
    t = int(t)
    if not (snr > 0 and math.isfinite(snr)):
        raise DomainError("snr must be finite and positive")
    if exponents.gamma.shape != (m, m):
        raise DomainError(f"exponents must be {m} x {m}")

    amp = np.sqrt(float(snr) ** exponents.gamma)  # (m, m) elementwise std scale
    d_sqrt = np.sqrt(float(snr) ** exponents.gamma)  # rows give D_n^(1/2)

    def integrand(rng, count):
        g = (
            rng.standard_normal((count, m, m)) + 1j * rng.standard_normal((count, m, m))
        ) * (amp / math.sqrt(2.0))
        x = (
            rng.standard_normal((count, m, t)) + 1j * rng.standard_normal((count, m, t))
        ) / math.sqrt(2.0)
        _, logabs_g = np.linalg.slogdet(g)
        gram = x @ np.conj(np.swapaxes(x, -1, -2))  # (count, m, m)
        total = 2.0 * logabs_g * LOG2E
        eye = np.eye(m)
        for n in range(m):
            scale = d_sqrt[n]
            scaled = gram * np.outer(scale, scale)
            sign, logdet = np.linalg.slogdet(eye + scaled)
            total -= (logdet * LOG2E) / t
        return total

    return mc_expectation(
        integrand, mc.n_samples, mc.seed, key=(1,), n_workers=mc.n_workers
    )
