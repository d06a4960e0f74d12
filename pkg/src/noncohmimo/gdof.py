"""Generalized-degrees-of-freedom formulas and solvers.

The 2x2 outer bound is a piecewise-linear objective over input power
exponents (gamma_a, gamma_b, gamma_c): a combination of max-affine blocks.
For symmetric exponents (gamma_d on direct links, gamma_cl on crosslinks)
the maximization is solved exactly by enumerating the vertices of the
linearized feasible region; for general exponents a grid search with
coordinate refinement is provided.  Closed forms for SISO/SIMO/MISO,
parallel channels, the symmetric 2x2, Gaussian-codebook signaling and
pilot-based training live here as well.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channel import LinkExponents
from .errors import DomainError

#: numerical tolerances of the corner solver
_SINGULAR_DET = 1e-12
_FEASIBILITY_TOL = 1e-9
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class MaxAffine:
    """Max of affine functions of (gamma_a, gamma_b, gamma_c).

    ``terms`` is a tuple of (coefficient 3-vector, constant offset) pairs;
    evaluation takes the max of the affine values.
    """

    terms: tuple

    def __post_init__(self):
        if len(self.terms) == 0:
            raise DomainError("MaxAffine needs at least one term")
        norm = tuple(
            (tuple(float(c) for c in coeffs), float(offset))
            for coeffs, offset in self.terms
        )
        if any(len(c) != 3 for c, _ in norm):
            raise DomainError("coefficient vectors must have length 3")
        object.__setattr__(self, "terms", norm)

    def evaluate(self, points):
        """Evaluate at points of shape (..., 3); returns shape (...)."""
        pts = np.asarray(points, dtype=float)
        scalar = pts.ndim == 1
        pts = np.atleast_2d(pts)
        coeffs = np.array([c for c, _ in self.terms])  # (k, 3)
        offsets = np.array([o for _, o in self.terms])  # (k,)
        vals = pts @ coeffs.T + offsets
        out = vals.max(axis=-1)
        return float(out[0]) if scalar else out

    def __add__(self, other):
        """Sum of two max-affine functions (cross-product of terms)."""
        terms = tuple(
            (tuple(ca + cb for ca, cb in zip(c1, c2)), o1 + o2)
            for (c1, o1), (c2, o2) in itertools.product(self.terms, other.terms)
        )
        return MaxAffine(terms)

    def maximum(self, other):
        """Pointwise max of two max-affine functions (union of terms)."""
        return MaxAffine(self.terms + other.terms)


@dataclass(frozen=True)
class GdofSolution:
    """Optimizer output: argmax exponents plus per-block and per-symbol gDoF."""

    gamma_a: float
    gamma_b: float
    gamma_c: float
    per_block: float
    per_symbol: float


def _make_solution(gamma_a, gamma_b, gamma_c, per_block, t):
    # per_symbol is canonical so per_symbol * t == per_block holds exactly;
    # adding 0.0 normalizes negative zeros from the linear solves
    per_symbol = per_block / t
    return GdofSolution(
        gamma_a=float(gamma_a) + 0.0,
        gamma_b=float(gamma_b) + 0.0,
        gamma_c=float(gamma_c) + 0.0,
        per_block=per_symbol * t,
        per_symbol=per_symbol,
    )


def _check_t(t, minimum=1):
    if int(t) != t or t < minimum:
        raise DomainError(f"coherence time t must be an integer >= {minimum}")
    return int(t)


def gdof_siso(gamma, t):
    """Single-antenna gDoF (1 - 1/T) * gamma."""
    t = _check_t(t)
    return (1.0 - 1.0 / t) * gamma


def gdof_parallel(gammas, t):
    """gDoF of parallel channels: sum of per-branch SISO values."""
    gammas = list(gammas)
    if not gammas:
        raise DomainError("gdof_parallel requires at least one branch")
    t = _check_t(t)
    return sum((1.0 - 1.0 / t) * g for g in gammas)


def gdof_simo(gammas, t):
    """SIMO gDoF: the statistically best receive antenna alone is optimal."""
    gammas = list(gammas)
    if not gammas:
        raise DomainError("gdof_simo requires at least one antenna")
    t = _check_t(t)
    return (1.0 - 1.0 / t) * max(gammas)


def gdof_miso(gammas, t):
    """MISO gDoF: the statistically best transmit antenna alone is optimal
    (same closed form for T < M)."""
    gammas = list(gammas)
    if not gammas:
        raise DomainError("gdof_miso requires at least one antenna")
    t = _check_t(t)
    return (1.0 - 1.0 / t) * max(gammas)


def _objective_2x2(exponents, t):
    """Piecewise-linear per-block objective over (gamma_a, gamma_b, gamma_c)
    for a 2x2 exponent matrix, built from max-affine blocks.

    The coefficient on gamma_b in the (T-1) block is -1: input powers are
    snr**(-gamma), so every power exponent enters with a minus sign.
    """
    g = exponents.gamma
    g11, g12 = float(g[0, 0]), float(g[0, 1])
    g21, g22 = float(g[1, 0]), float(g[1, 1])
    zero = ((0.0, 0.0, 0.0), 0.0)

    a1 = MaxAffine((((-1, 0, 0), g11), ((0, -1, 0), g12), zero))
    a2 = MaxAffine((((-1, 0, 0), g21), ((0, -1, 0), g22), zero))
    a3 = MaxAffine((((0, 0, -1), g12), zero)) + MaxAffine((((0, 0, -1), g22), zero))
    block_a = (a1 + a2).maximum(a3)

    b1 = MaxAffine((((-1, 0, 0), g11), zero)) + MaxAffine((((0, 0, -1), g22), zero))
    b2 = MaxAffine((((0, -1, 0), max(g12, g22)),))
    b3 = MaxAffine((((-1, 0, 0), g21), zero)) + MaxAffine((((0, 0, -1), g12), zero))
    block_b = b1.maximum(b2).maximum(b3)

    c1 = MaxAffine(
        (
            ((-1, 0, 0), g11),
            ((0, -1, 0), g12),
            ((0, 0, -1), g12),
            ((-1, 0, -1), g11 + g12),
            zero,
        )
    )
    c2 = MaxAffine(
        (
            ((-1, 0, 0), g21),
            ((0, -1, 0), g22),
            ((0, 0, -1), g22),
            ((-1, 0, -1), g21 + g22),
            zero,
        )
    )

    def objective(points):
        return (
            block_a.evaluate(points)
            + (t - 1) * block_b.evaluate(points)
            - c1.evaluate(points)
            - c2.evaluate(points)
        )

    return objective


def f_gamma(ga, gb, gc, exponents, t):
    """Per-block outer-bound objective at (gamma_a, gamma_b, gamma_c) for
    general 2x2 exponents; requires T >= 2."""
    t = _check_t(t, minimum=2)
    if exponents.gamma.shape != (2, 2):
        raise DomainError("f_gamma requires 2x2 exponents")
    return float(_objective_2x2(exponents, t)((ga, gb, gc)))


@lru_cache(maxsize=8)
def _vertex_enumeration_cache(a_bytes, n_rows, n_vars):
    # all nonsingular n_vars-subsets of the constraint rows, cached on the
    # constraint matrix so repeated solves only rebuild the rhs
    a = np.frombuffer(a_bytes, dtype=float).reshape(n_rows, n_vars)
    subsets = np.array(list(itertools.combinations(range(n_rows), n_vars)))
    sub_a = a[subsets]
    keep = np.abs(np.linalg.det(sub_a)) >= _SINGULAR_DET
    return subsets[keep], sub_a[keep]


@dataclass(frozen=True)
class CornerPolytope:
    """Feasible region of the linearized symmetric objective in the
    variables (gamma_a, gamma_b, gamma_c, t1, t2): box bounds on the
    gammas plus lower bounds on the epigraph variables t1, t2, as rows of
    constraints  a @ x <= b."""

    a: np.ndarray
    b: np.ndarray

    VARIABLES = ("gamma_a", "gamma_b", "gamma_c", "t1", "t2")

    @classmethod
    def symmetric_region(cls, gamma_d, gamma_cl):
        a = np.array(
            [
                [-1, 0, 0, 0, 0],   # gamma_a >= 0
                [1, 0, 0, 0, 0],    # gamma_a <= gamma_d
                [0, -1, 0, 0, 0],   # gamma_b >= 0
                [0, 1, 0, 0, 0],    # gamma_b <= gamma_d
                [0, 0, -1, 0, 0],   # gamma_c >= 0
                [0, 0, 1, 0, 0],    # gamma_c <= gamma_d
                [-1, 0, 0, -1, 0],  # t1 >= gamma_d - gamma_a
                [0, -1, 0, -1, 0],  # t1 >= gamma_cl - gamma_b
                [-1, 0, -1, -1, 0], # t1 >= gamma_d + gamma_cl - gamma_a - gamma_c
                [0, -1, 0, 0, -1],  # t2 >= gamma_d - gamma_b
                [0, 0, -1, 0, -1],  # t2 >= gamma_d - gamma_c
                [-1, 0, -1, 0, -1], # t2 >= gamma_d + gamma_cl - gamma_a - gamma_c
            ],
            dtype=float,
        )
        b = np.array(
            [
                0.0, gamma_d, 0.0, gamma_d, 0.0, gamma_d,
                -gamma_d, -gamma_cl, -(gamma_d + gamma_cl),
                -gamma_d, -gamma_d, -(gamma_d + gamma_cl),
            ]
        )
        return cls(a=a, b=b)

    def vertices(self):
        """All feasible corner points: solve each nonsingular square
        subsystem of active constraints, keep solutions satisfying every
        inequality (tolerance 1e-9), dedupe within 1e-9."""
        n_rows, n_vars = self.a.shape
        subsets, sub_a = _vertex_enumeration_cache(
            self.a.tobytes(), n_rows, n_vars
        )
        sub_b = self.b[subsets]
        points = np.linalg.solve(sub_a, sub_b[:, :, None])[:, :, 0]
        feasible = np.all(points @ self.a.T <= self.b + _FEASIBILITY_TOL, axis=1)
        points = points[feasible]
        if points.size == 0:
            raise DomainError("empty corner set; constraints are inconsistent")
        # dedupe on rounded keys but keep unquantized coordinates
        keys = np.round(points / _TIE_TOL).astype(np.int64)
        _, first = np.unique(keys, axis=0, return_index=True)
        return points[np.sort(first)]


def solve_p9_corners(gamma_d, gamma_cl, t):
    """Exact symmetric-2x2 outer-bound gDoF by corner-point enumeration.

    Evaluates the piecewise-linear objective at the (gamma_a, gamma_b,
    gamma_c) coordinates of every vertex of the linearized region and
    returns the maximizer; ties break to the lexicographically smallest
    point.
    """
    if not (gamma_d >= gamma_cl >= 0):
        raise DomainError("solve_p9_corners requires gamma_d >= gamma_cl >= 0")
    t = _check_t(t, minimum=2)

    region = CornerPolytope.symmetric_region(float(gamma_d), float(gamma_cl))
    vertices = region.vertices()

    objective = _objective_2x2(LinkExponents.symmetric(gamma_d, gamma_cl), t)
    values = objective(vertices[:, :3])
    best = values.max()
    tied = vertices[values >= best - _TIE_TOL]
    order = np.lexsort((tied[:, 2], tied[:, 1], tied[:, 0]))
    ga, gb, gc = tied[order[0], :3]
    per_block = float(objective((ga, gb, gc)))
    return _make_solution(ga, gb, gc, per_block, t)


def gdof_2x2_sym(gamma_d, gamma_cl, t):
    """Closed-form per-symbol gDoF of the symmetric 2x2 channel.

    T=1 gives zero; T=2 gives gamma_d - gamma_cl/2; T>=3 gives
    2((1 - 1/T) gamma_d - gamma_cl/T).
    """
    t = _check_t(t)
    if gamma_d < gamma_cl:
        gamma_d, gamma_cl = gamma_cl, gamma_d
    if t == 1:
        return 0.0
    if t == 2:
        return gamma_d - 0.5 * gamma_cl
    return 2.0 * ((1.0 - 1.0 / t) * gamma_d - gamma_cl / t)


def gdof_2x2_inner(ga, gb, gc, exponents, t):
    """Per-symbol achievable gDoF of the lower-triangular-input scheme at
    power exponents (gamma_a, gamma_b, gamma_c) >= 0.

    Difference of the signal-entropy growth rate and the conditional-noise
    growth rate, divided by T.
    """
    if min(ga, gb, gc) < 0:
        raise DomainError("power exponents must be nonnegative")
    t = _check_t(t)
    if t == 1:
        return 0.0
    g = exponents.gamma
    g11, g12 = float(g[0, 0]), float(g[0, 1])
    g21, g22 = float(g[1, 0]), float(g[1, 1])

    h_signal = (
        2.0 * max(-ga + g11, -gb + g12, -gc + g12)
        + (t - 2) * (-ga - gc + max(g12 + g21, g11 + g22))
        + (-gc + g22)
        + max(-2 * ga + g11 + g21, -ga - gb + g12 + g21, -ga - gb + g11 + g22)
        - max(-ga + g11, -gb + g12)
    )
    h_given_input = max(
        -ga + g11, -gb + g12, -gc + g12, -ga - gc + g11 + g12, 0.0
    ) + max(-ga + g21, -gb + g22, -gc + g22, -ga - gc + g21 + g22, 0.0)
    return (h_signal - h_given_input) / t


def gdof_gaussian_codebook(m, gamma_d, gamma_cl, t):
    """Per-symbol gDoF achieved on the symmetric M x M channel by i.i.d.
    Gaussian codebooks across antennas and time: M((1-1/T)gd - (M-1)/T gcl)."""
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    t = _check_t(t)
    if t <= m:
        raise DomainError("gdof_gaussian_codebook requires t > m")
    m = int(m)
    return m * ((1.0 - 1.0 / t) * gamma_d - ((m - 1) / t) * gamma_cl)


def gdof_training(m, gamma_d, t):
    """Per-symbol gDoF ceiling of per-antenna pilot training followed by
    coherent signaling: M(1 - M/T) gamma_d."""
    if int(m) != m or m < 1:
        raise DomainError("m must be a positive integer")
    t = _check_t(t)
    if t < m:
        raise DomainError("gdof_training requires t >= m")
    m = int(m)
    return m * (1.0 - m / t) * gamma_d


def solve_p8_grid(exponents, t, grid_points=17, refine_iters=200):
    """Heuristic solver for general 2x2 exponents: dense grid over the box
    [0, max gamma]^3 plus compass coordinate refinement to step < 1e-6.

    Exact only in the cases where the exact corner solver agrees; symmetric
    instances double as its oracle.
    """
    if grid_points < 8:
        raise DomainError("grid_points must be >= 8 per axis")
    if exponents.gamma.shape != (2, 2):
        raise DomainError("solve_p8_grid requires 2x2 exponents")
    t = _check_t(t)
    if t == 1:
        return _make_solution(0.0, 0.0, 0.0, 0.0, 1)

    hi = float(np.max(exponents.gamma))
    objective = _objective_2x2(exponents, t)
    if hi <= 0:
        return _make_solution(0.0, 0.0, 0.0, float(objective((0.0, 0.0, 0.0))), t)

    axis = np.linspace(0.0, hi, int(grid_points))
    mesh = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    values = objective(mesh)
    best_idx = int(np.argmax(values))
    point = mesh[best_idx].copy()
    best = float(values[best_idx])

    step = float(axis[1] - axis[0])
    scans = 0
    while step >= 1e-6 and scans < refine_iters:
        scans += 1
        improved = False
        for dim in range(3):
            for sign in (1.0, -1.0):
                cand = point.copy()
                cand[dim] = min(hi, max(0.0, cand[dim] + sign * step))
                val = float(objective(cand))
                if val > best:
                    best, point, improved = val, cand, True
        if not improved:
            step *= 0.5
    return _make_solution(point[0], point[1], point[2], best, t)
