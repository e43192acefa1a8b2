"""Minimum-norm error analysis and the Lax-scheme CFL bound.

Everything here works with the cross operator switched off: the error
equation is treated as ``M1 E + E M2 = F``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import _values, band_matrices
from .denselin import frobenius_norm, svd
from .errors import DegeneratePairError, DimensionError, PreconditionError, ValidationError
from .scheme import SchemeId

__all__ = [
    "PaperSpectra",
    "MinNormSolution",
    "BoundReport",
    "NormalizedLax",
    "gram_blocks_paper",
    "singular_values_paper",
    "min_norm_pair",
    "min_norm_split",
    "error_bound",
    "lax_bound",
    "normalize_lax",
]

RANK_RTOL = 1e-12


def gram_blocks_paper(coefficients):
    """The 2x2 blocks claimed to tile M1 M1^T and M2 M2^T."""
    co = coefficients
    b, d, e = co.beta, co.delta, co.epsilon
    m1_block = np.array([[b * b + d * d, b * (d + e)],
                         [b * (d + e), e * e + b * b]])
    m2_block = np.diag([co.gamma ** 2, co.alpha ** 2])
    return m1_block, m2_block


@dataclass(frozen=True)
class PaperSpectra:
    """Closed-form values next to the computed singular values.

    The closed-form values are eigenvalues of the Gram blocks, i.e. squared
    singular values, so ``max_deviation_*`` compares them with ``sigma**2``.
    """

    m1_singular_pair: tuple  # (smaller, larger), each with multiplicity m1_multiplicity
    m1_multiplicity: int
    m2_singular_pair: tuple  # (alpha^2, gamma^2), each with multiplicity m2_multiplicity
    m2_multiplicity: int
    exact_m1: np.ndarray
    exact_m2: np.ndarray
    max_deviation_m1: float
    max_deviation_m2: float

    def paper_multiset(self, which):
        pair, mult = ((self.m1_singular_pair, self.m1_multiplicity) if which == "m1"
                      else (self.m2_singular_pair, self.m2_multiplicity))
        return np.sort(np.repeat(np.asarray(pair, dtype=float), mult))[::-1]


def _m1_pair(co):
    b, d, e = co.beta, co.delta, co.epsilon
    base = 2 * b * b + d * d + e * e
    root = math.sqrt(max(4 * b * b + d * d + e * e - 2 * d * e, 0.0))
    lo = 0.5 * (base - (d + e) * root)
    hi = 0.5 * (base + (d + e) * root)
    return tuple(sorted((lo, hi)))


def singular_values_paper(coefficients, grid):
    if not grid.is_even:
        raise DimensionError("n_x - 1 and n_t must be even")
    co = coefficients
    m1, m2 = band_matrices(co, grid)
    s1, s2 = svd(m1).sigma, svd(m2).sigma
    k1, k2 = (grid.n_x - 1) // 2, grid.n_t // 2
    pair1 = _m1_pair(co)
    pair2 = (co.alpha ** 2, co.gamma ** 2)
    paper1 = np.sort(np.repeat(pair1, k1))[::-1]
    paper2 = np.sort(np.repeat(pair2, k2))[::-1]
    dev1 = float(np.max(np.abs(paper1 - s1 ** 2)))
    dev2 = float(np.max(np.abs(paper2 - s2 ** 2)))
    return PaperSpectra(pair1, k1, pair2, k2, s1, s2, dev1, dev2)


def min_norm_pair(m1_ii, m2_jj, f_ij):
    """Closest point to the origin on the line ``m1_ii e + m2_jj ee = f_ij``."""
    den = m1_ii * m1_ii + m2_jj * m2_jj
    if den == 0.0:
        raise DegeneratePairError("both diagonal weights vanish")
    return m1_ii * f_ij / den, m2_jj * f_ij / den


@dataclass(frozen=True)
class MinNormSolution:
    """Block solution of ``S1 Et + Ett S2 = Ft`` with S1, S2 the singular-value matrices.

    ``e_tilde`` stands for V1^T E V2 and ``e_dtilde`` for U1^T E U2, both
    partitioned by the numerical ranks ``rank_m1`` (rows) and ``rank_m2``
    (columns). Unconstrained blocks are zero.
    """

    e_tilde: np.ndarray
    e_dtilde: np.ndarray
    f_tilde: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    rank_m1: int
    rank_m2: int
    achieved_norm: float
    inconsistency: float  # |F22|: the part of Ft no choice of E can reach

    def blocks(self, which):
        a = {"e": self.e_tilde, "ee": self.e_dtilde, "f": self.f_tilde}[which]
        r1, r2 = self.rank_m1, self.rank_m2
        return a[:r1, :r2], a[:r1, r2:], a[r1:, :r2], a[r1:, r2:]


def min_norm_split(m1, m2, f, rank_rtol=RANK_RTOL):
    m1, m2, f = np.asarray(m1, float), np.asarray(m2, float), _values(f)
    if f.shape != (m1.shape[0], m2.shape[0]):
        raise DimensionError(f"f must be {m1.shape[0]} x {m2.shape[0]}, got {f.shape}")
    svd1, svd2 = svd(m1), svd(m2)
    r1, r2 = svd1.rank(rank_rtol), svd2.rank(rank_rtol)
    s1, s2 = svd1.sigma[:r1], svd2.sigma[:r2]
    ft = svd1.u_left.T @ f @ svd2.v_right

    et = np.zeros_like(ft)
    ett = np.zeros_like(ft)
    f11 = ft[:r1, :r2]
    den = s1[:, None] ** 2 + s2[None, :] ** 2
    if np.any(den == 0.0):
        i, j = map(int, np.argwhere(den == 0.0)[0])
        raise DegeneratePairError(f"zero weights at cell ({i}, {j})", index=(i, j))
    et[:r1, :r2] = s1[:, None] * f11 / den
    ett[:r1, :r2] = s2[None, :] * f11 / den
    et[:r1, r2:] = ft[:r1, r2:] / s1[:, None]
    ett[r1:, :r2] = ft[r1:, :r2] / s2[None, :]
    norm = math.hypot(frobenius_norm(et), frobenius_norm(ett))
    return MinNormSolution(et, ett, ft, s1, s2, r1, r2, norm, frobenius_norm(ft[r1:, r2:]))


@dataclass(frozen=True)
class BoundReport:
    lhs: float                 # |F11~|
    f_tilde_norm: float        # |U1^T F V2|
    f_norm: float              # |F|
    u1_norm_sq: int            # n_x - 1
    v2_norm_sq: int            # n_t
    m1_norm_sq_paper: float
    m2_norm_sq_paper: float
    m1_norm_sq_exact: float
    m2_norm_sq_exact: float
    m0_norm: float
    u_exact_norm: float
    rhs: float

    @property
    def holds(self):
        return self.lhs <= self.rhs


def error_bound(system, u_exact, rank_rtol=RANK_RTOL):
    """Both sides of the bound on |F11~| in terms of the scheme weights.

    F = M1 U_exact + U_exact M2 - M0 is projected with the left singular
    vectors of M1 and the right singular vectors of M2; the right side uses
    the closed-form norms |M1|^2 = (n_x-1)/2 (2 beta^2 + delta^2 + epsilon^2)
    and |M2|^2 = n_t/2 (alpha^2 + gamma^2).
    """
    if system.has_cross:
        raise PreconditionError("the bound is stated for a vanishing cross operator")
    co, g = system.coefficients, system.grid
    ue = _values(u_exact)
    f = system.m1 @ ue + ue @ system.m2 - system.m0
    svd1, svd2 = svd(system.m1), svd(system.m2)
    r1, r2 = svd1.rank(rank_rtol), svd2.rank(rank_rtol)
    ft = svd1.u_left.T @ f @ svd2.v_right
    lhs = frobenius_norm(ft[:r1, :r2])

    n1, nt = g.n_x - 1, g.n_t
    m1_sq = n1 / 2 * (2 * co.beta ** 2 + co.delta ** 2 + co.epsilon ** 2)
    m2_sq = nt / 2 * (co.alpha ** 2 + co.gamma ** 2)
    m0n = frobenius_norm(system.m0)
    uen = frobenius_norm(ue)
    rhs = math.sqrt(nt * n1) * (uen * (math.sqrt(m1_sq) + math.sqrt(m2_sq)) + m0n)
    return BoundReport(
        lhs=lhs, f_tilde_norm=frobenius_norm(ft), f_norm=frobenius_norm(f),
        u1_norm_sq=n1, v2_norm_sq=nt,
        m1_norm_sq_paper=m1_sq, m2_norm_sq_paper=m2_sq,
        m1_norm_sq_exact=frobenius_norm(system.m1) ** 2,
        m2_norm_sq_exact=frobenius_norm(system.m2) ** 2,
        m0_norm=m0n, u_exact_norm=uen, rhs=rhs,
    )


def lax_bound(cfl, n_x, n_t, u0, uL):
    """Right side of the error bound for the normalised Lax scheme, as a function of the CFL number."""
    if not cfl > 0:
        raise ValidationError(f"cfl must be positive, got {cfl!r}")
    plus = 0.5 + 1 / (2 * cfl)
    minus = 0.5 - 1 / (2 * cfl)
    return (plus ** 2 * n_t ** 2 * u0 ** 2
            + minus ** 2 * n_t ** 2 * uL ** 2
            + math.sqrt((n_x - 1) / 2) * math.sqrt(plus ** 2 + minus ** 2)
            + math.sqrt(n_t) / (math.sqrt(2) * cfl))


@dataclass(frozen=True)
class NormalizedLax:
    alpha: float
    beta: float
    delta: float
    epsilon: float
    m0: np.ndarray
    m0_norm_sq: float          # |h M0|_F^2 computed from the matrix
    m0_norm_sq_formula: float  # delta^2 sum u_{n_x}^2 + epsilon^2 sum u_0^2


def normalize_lax(system, boundary):
    """Scale the Lax weights and M0 by h; check |h M0|^2 against the wall sums."""
    co, g = system.coefficients, system.grid
    if co.scheme_id is not SchemeId.LAX:
        raise PreconditionError("normalisation applies to the Lax scheme")
    h = g.h
    m0 = h * system.m0
    nd, ne = h * co.delta, h * co.epsilon
    right_sq = float(np.sum(boundary.right[1:] ** 2))
    left_sq = float(np.sum(boundary.left[1:] ** 2))
    formula = nd ** 2 * right_sq + ne ** 2 * left_sq
    return NormalizedLax(h * co.alpha, h * co.beta, nd, ne, m0, frobenius_norm(m0) ** 2, formula)
