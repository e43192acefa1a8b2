"""The stencil as a matrix equation ``M1 U + U M2 + L(U) = M0``.

``U`` holds interior values u_i^n for 1 <= i <= n_x - 1 (rows) and
1 <= n <= n_t (columns). Row i, column n of the equation is the stencil
centred on (i, n). Stencil terms that land on the walls (i = 0, n_x) or on
the initial level n = 0 are moved to the right-hand side ``M0``; terms on
level n_t + 1 have no column in ``U`` and are dropped, so the last column of
the equation is the stencil with its advanced level removed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .denselin import as_matrix, frobenius_norm, solve_linear, toeplitz_tridiag
from .errors import DimensionError, PreconditionError, SingularMatrixError, ValidationError
from .scheme import STENCIL_OFFSETS, Grid, SchemeCoefficients, SignalSpec, exact_field, sample_boundary

__all__ = [
    "FieldRole",
    "FieldMatrix",
    "SylvesterSystem",
    "ErrorDecomposition",
    "band_matrices",
    "assemble_system",
    "apply_operator",
    "apply_cross_operator",
    "residual",
    "residual_scale",
    "march",
    "reference_timestep",
    "exact_matrix",
    "error_and_truncation",
    "resolve_boundary",
]


class FieldRole(enum.Enum):
    NUMERIC = "U"
    EXACT = "U_exact"
    ERROR = "E"
    RESIDUAL = "F"


@dataclass(frozen=True)
class FieldMatrix:
    """Interior field values, (n_x - 1) x n_t, with a role tag."""

    values: np.ndarray
    role: FieldRole = FieldRole.NUMERIC

    def __post_init__(self):
        v = np.array(as_matrix(self.values, "field"), dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def shape(self):
        return self.values.shape

    def column(self, n):
        """Values at time level n (1-based, as in u_i^n)."""
        return self.values[:, n - 1]


def _values(u):
    return u.values if isinstance(u, FieldMatrix) else np.asarray(u, dtype=float)


@dataclass(frozen=True)
class SylvesterSystem:
    m1: np.ndarray
    m2: np.ndarray
    m0: np.ndarray
    cross: tuple  # (zeta, eta, theta, vartheta)
    grid: Grid
    coefficients: SchemeCoefficients

    @property
    def shape(self):
        return self.m0.shape

    @property
    def has_cross(self):
        return any(w != 0 for w in self.cross)


def band_matrices(coefficients, grid):
    """The Toeplitz matrices M1 ((n_x-1) square) and M2 (n_t square)."""
    co = coefficients
    m1 = toeplitz_tridiag(co.beta, co.delta, co.epsilon, grid.n_x - 1)
    m2 = toeplitz_tridiag(0.0, co.gamma, co.alpha, grid.n_t)
    return m1, m2


def _stencil(coefficients, full):
    """Evaluate every stencil at the interior points of a padded field.

    ``full`` is indexed [i, n] for i = 0..n_x and n = 0..n_t + 1.
    """
    nx, nt = full.shape[0] - 1, full.shape[1] - 2
    out = np.zeros((nx - 1, nt))
    for name, di, dn in STENCIL_OFFSETS:
        w = getattr(coefficients, name)
        if w != 0:
            out += w * full[1 + di:nx + di, 1 + dn:nt + 1 + dn]
    return out


def _padded(grid, interior=None, boundary=None):
    full = np.zeros((grid.n_x + 1, grid.n_t + 2))
    if boundary is not None:
        full[:, 0] = boundary.initial
        full[0, :grid.n_t + 1] = boundary.left
        full[grid.n_x, :grid.n_t + 1] = boundary.right
    if interior is not None:
        full[1:grid.n_x, 1:grid.n_t + 1] = interior
    return full


def assemble_system(coefficients, grid, boundary):
    """Build M1, M2, M0 and the cross weights for an even grid.

    Raises
    ------
    DimensionError
        If ``n_x - 1`` or ``n_t`` is odd.
    StartupError
        If the scheme reaches level n - 1 and ``boundary`` has no startup row.
    """
    if not grid.is_even:
        raise DimensionError(f"n_x - 1 = {grid.n_x - 1} and n_t = {grid.n_t} must both be even")
    boundary.check(grid, coefficients)
    m1, m2 = band_matrices(coefficients, grid)
    m0 = -_stencil(coefficients, _padded(grid, boundary=boundary))
    for a in (m1, m2, m0):
        a.setflags(write=False)
    return SylvesterSystem(m1=m1, m2=m2, m0=m0, cross=coefficients.cross,
                           grid=grid, coefficients=coefficients)


def apply_cross_operator(system, u):
    """L(U): zeta u_{i+1}^{n+1} + eta u_{i-1}^{n-1} + theta u_{i-1}^{n+1} + vartheta u_{i+1}^{n-1}.

    Terms whose index leaves the interior box are dropped.
    """
    u = _values(u)
    zeta, eta, theta, vartheta = system.cross
    out = np.zeros_like(u)
    if zeta:
        out[:-1, :-1] += zeta * u[1:, 1:]
    if eta:
        out[1:, 1:] += eta * u[:-1, :-1]
    if theta:
        out[1:, :-1] += theta * u[:-1, 1:]
    if vartheta:
        out[:-1, 1:] += vartheta * u[1:, :-1]
    return FieldMatrix(out, FieldRole.RESIDUAL)


def apply_operator(system, u):
    """M1 U + U M2 + L(U) as a plain array."""
    u = _values(u)
    if u.shape != system.shape:
        raise DimensionError(f"field shape {u.shape} does not match system {system.shape}")
    out = system.m1 @ u + u @ system.m2
    if system.has_cross:
        out = out + apply_cross_operator(system, u).values
    return out


def residual(system, u):
    """M1 U + U M2 + L(U) - M0."""
    return FieldMatrix(apply_operator(system, u) - system.m0, FieldRole.RESIDUAL)


def residual_scale(system, u):
    """Scale used for relative residual tolerances."""
    nu = frobenius_norm(_values(u))
    return frobenius_norm(system.m0) + nu * (frobenius_norm(system.m1) + frobenius_norm(system.m2))


def march(coefficients, grid, boundary):
    """Time-march the stencil; returns the full field, shape (n_x + 1, n_t + 1).

    Two-level schemes take u^1 from one step off the initial row; three-level
    schemes take it from ``boundary.startup``. Each later level is obtained
    by solving the stencil for its level-(n + 1) terms: a division by alpha
    for explicit schemes, a tridiagonal solve when zeta or theta is nonzero.
    """
    co = coefficients
    boundary.check(grid, co)
    nx, nt = grid.n_x, grid.n_t
    if not co.implicit and co.alpha == 0:
        raise PreconditionError("alpha = 0: the stencil has no level-(n+1) term to advance")

    u = np.zeros((nx + 1, nt + 1))
    u[:, 0] = boundary.initial
    u[0, :] = boundary.left
    u[nx, :] = boundary.right

    step = None
    if co.implicit:
        step = toeplitz_tridiag(co.alpha, co.zeta, co.theta, nx - 1)

    def advance(n):
        # stencil centred on level n, solved for level n + 1
        rhs = co.beta * u[1:nx, n] + co.delta * u[2:, n] + co.epsilon * u[:nx - 1, n]
        if n >= 1:
            rhs += co.gamma * u[1:nx, n - 1] + co.eta * u[:nx - 1, n - 1] + co.vartheta * u[2:, n - 1]
        rhs = -rhs
        if step is None:
            u[1:nx, n + 1] = rhs / co.alpha
            return
        rhs[0] -= co.theta * u[0, n + 1]
        rhs[-1] -= co.zeta * u[nx, n + 1]
        try:
            u[1:nx, n + 1] = solve_linear(step, rhs)
        except SingularMatrixError as exc:
            raise SingularMatrixError(f"implicit step matrix is singular: {exc}") from exc

    if co.three_level:
        u[1:nx, 1] = boundary.startup[1:nx]
    else:
        advance(0)
    for n in range(1, nt):
        advance(n)
    return u


def reference_timestep(coefficients, grid, boundary):
    """Interior part of :func:`march` as a FieldMatrix."""
    u = march(coefficients, grid, boundary)
    return FieldMatrix(u[1:grid.n_x, 1:], FieldRole.NUMERIC)


def exact_matrix(signal, grid):
    x = grid.x[1:grid.n_x, None]
    t = grid.t[None, 1:]
    return FieldMatrix(exact_field(signal, grid, x, t), FieldRole.EXACT)


@dataclass(frozen=True)
class ErrorDecomposition:
    """E = U - U_exact, the truncation residual F, and M1 E + E M2 + L(E) + F."""

    error: FieldMatrix
    truncation: FieldMatrix
    identity_residual: FieldMatrix

    def __iter__(self):
        return iter((self.error, self.truncation))


def error_and_truncation(system, u, u_exact):
    """Error matrix E and truncation residual F.

    The algebra gives ``M1 E + E M2 + L(E) = -F`` whenever U solves the
    system; ``identity_residual`` holds the left side plus F.
    """
    u, ue = _values(u), _values(u_exact)
    if u.shape != ue.shape or u.shape != system.shape:
        raise DimensionError("U, U_exact and the system must share one shape")
    e = u - ue
    f = residual(system, ue).values
    r = apply_operator(system, e) + f
    return ErrorDecomposition(FieldMatrix(e, FieldRole.ERROR), FieldMatrix(f, FieldRole.RESIDUAL),
                              FieldMatrix(r, FieldRole.RESIDUAL))


def resolve_boundary(grid, boundary=None, signal=None):
    """Explicit boundary data, or data sampled from ``signal`` (default: unit wavelength).

    Passing both is rejected rather than silently preferring one.
    """
    if boundary is not None and signal is not None:
        raise ValidationError("give either explicit boundary data or a signal to sample, not both")
    if boundary is not None:
        return boundary
    return sample_boundary(signal if signal is not None else SignalSpec(), grid)
