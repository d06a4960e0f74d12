"""Block-fading MIMO channel with per-link SNR exponents.

Links are independent circularly symmetric complex Gaussians whose
variances scale as snr**gamma_ij; the fading matrix is redrawn every
coherence block of T symbols and the additive noise has unit variance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularMatrixError
from .numerics import lq_decompose, sample_complex_gaussian

#: first-row power below this is treated as a degenerate draw
DEGENERATE_ROW_POWER = 1e-300


@dataclass(frozen=True)
class LinkExponents:
    """SNR exponents gamma_ij of an n x m fading matrix (receive x transmit)."""

    m: int
    n: int
    gamma: np.ndarray

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise DomainError("antenna counts must be >= 1")
        g = np.asarray(self.gamma, dtype=float)
        if g.shape != (self.n, self.m):
            raise DomainError(f"gamma must have shape ({self.n}, {self.m})")
        if not np.all(np.isfinite(g)):
            raise DomainError("exponents must be finite")
        object.__setattr__(self, "gamma", g)

    @classmethod
    def from_matrix(cls, gamma):
        g = np.atleast_2d(np.asarray(gamma, dtype=float))
        return cls(m=g.shape[1], n=g.shape[0], gamma=g)

    @classmethod
    def symmetric(cls, gamma_d, gamma_cl, size=2):
        """Square M x M exponents: gamma_d on direct links, gamma_cl on
        crosslinks.  Labels are swapped if needed so gamma_d >= gamma_cl."""
        if gamma_d < gamma_cl:
            gamma_d, gamma_cl = gamma_cl, gamma_d
        g = np.full((size, size), float(gamma_cl))
        np.fill_diagonal(g, float(gamma_d))
        return cls(m=size, n=size, gamma=g)


@dataclass(frozen=True)
class ChannelConfig:
    """Exponent matrix plus coherence time T and linear SNR."""

    exponents: LinkExponents
    t: int
    snr: float

    def __post_init__(self):
        if int(self.t) != self.t or self.t < 1:
            raise DomainError("coherence time t must be a positive integer")
        if not (np.isfinite(self.snr) and self.snr > 0):
            raise DomainError("snr must be finite and positive")
        strengths = float(self.snr) ** self.exponents.gamma
        if not np.all(np.isfinite(strengths)) or np.any(strengths <= 0):
            raise DomainError("link strengths snr**gamma must be finite positive")


@dataclass(frozen=True)
class ChannelDraw:
    """One coherence block: fading matrix g (n x m) and noise w (n x T)."""

    g: np.ndarray
    w: np.ndarray


@dataclass(frozen=True)
class XiStats:
    """Squared magnitudes of the lower-triangular factor of the 2-row
    received-signal matrix after Gram-Schmidt on its rows."""

    xi11_sq: float
    xi21_sq: float
    xi22_sq: float


def link_strengths(config):
    """Elementwise link powers rho_ij^2 = snr ** gamma_ij."""
    return float(config.snr) ** config.exponents.gamma


def sample_channel(config, rng, size=None):
    """Draw fading and noise for one block (or ``size`` stacked blocks)."""
    n, m, t = config.exponents.n, config.exponents.m, int(config.t)
    amp = np.sqrt(link_strengths(config))
    if size is None:
        g = sample_complex_gaussian(1.0, rng, (n, m)) * amp
        w = sample_complex_gaussian(1.0, rng, (n, t))
    else:
        g = sample_complex_gaussian(1.0, rng, (size, n, m)) * amp
        w = sample_complex_gaussian(1.0, rng, (size, n, t))
    return ChannelDraw(g=g, w=w)


def pre_lq_matrix(a, b, c, draw):
    """The explicit 2 x T received-signal matrix for the lower-triangular
    input [[a, 0, ...], [b, c, 0, ...]] right-multiplied by a unitary.

    Row 1 is [a g11 + b g12 + w11, c g12 + w12, w13, ..., w1T]; row 2 is
    the same with the second receive antenna.
    """
    g, w = draw.g, draw.w
    if g.shape[0] != 2:
        raise DomainError("pre_lq_matrix requires a 2-receive-antenna draw")
    t = w.shape[1]
    if t < 2:
        raise DomainError("coherence time must be at least 2")
    out = np.array(w, dtype=complex, copy=True)
    out[0, 0] += a * g[0, 0] + b * g[0, 1]
    out[0, 1] += c * g[0, 1]
    out[1, 0] += a * g[1, 0] + b * g[1, 1]
    out[1, 1] += c * g[1, 1]
    return out


def xi_stats(a, b, c, draw):
    """Closed-form squared magnitudes of the triangular factor of the
    2 x T pre-rotation matrix.

    xi11_sq is the first-row power; xi21_sq the power of the projection of
    row 2 on row 1; xi22_sq the residual row-2 power.  Raises
    SingularMatrixError when the first row (numerically) vanishes.
    """
    mat = pre_lq_matrix(a, b, c, draw)
    r1, r2 = mat[0], mat[1]
    xi11_sq = float(np.sum(np.abs(r1) ** 2))
    if xi11_sq <= DEGENERATE_ROW_POWER:
        raise SingularMatrixError("first-row power vanished in xi_stats")
    inner = np.sum(r2 * np.conj(r1))
    xi21_sq = float(np.abs(inner) ** 2) / xi11_sq
    xi22_sq = float(np.sum(np.abs(r2) ** 2)) - xi21_sq
    return XiStats(xi11_sq=xi11_sq, xi21_sq=xi21_sq, xi22_sq=max(xi22_sq, 0.0))


def power_check(x_samples):
    """Empirical per-symbol average power (1/MT) E||X||_F^2 of a stack of
    M x T input matrices; input distributions must keep this <= 1."""
    arr = np.asarray(x_samples)
    if arr.size == 0:
        raise DomainError("power_check requires a nonempty sample set")
    if arr.ndim == 2:
        arr = arr[None, :, :]
    if arr.ndim != 3:
        raise DomainError("expected a stack of M x T matrices")
    return float(np.mean(np.abs(arr) ** 2))
