"""Grids, stencil coefficient sets, boundary data and the advected signal.

A scheme for ``u_t + c u_x = 0`` is the nine-point relation

    alpha u_i^{n+1} + beta u_i^n + gamma u_i^{n-1}
      + delta u_{i+1}^n + epsilon u_{i-1}^n
      + zeta u_{i+1}^{n+1} + eta u_{i-1}^{n-1}
      + theta u_{i-1}^{n+1} + vartheta u_{i+1}^{n-1} = 0

with ``u_l^m = u(l h, m tau)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import StartupError, ValidationError

__all__ = [
    "Grid",
    "SchemeId",
    "SchemeCoefficients",
    "BoundaryData",
    "SignalSpec",
    "STENCIL_OFFSETS",
    "build_coefficients",
    "exact_field",
    "sample_boundary",
]


# (weight name, space offset, time offset)
STENCIL_OFFSETS = (
    ("alpha", 0, 1),
    ("beta", 0, 0),
    ("gamma", 0, -1),
    ("delta", 1, 0),
    ("epsilon", -1, 0),
    ("zeta", 1, 1),
    ("eta", -1, -1),
    ("theta", -1, 1),
    ("vartheta", 1, -1),
)


@dataclass(frozen=True)
class Grid:
    """Uniform space-time grid on [0, L] x [0, T].

    Parity of ``n_x - 1`` and ``n_t`` is not enforced here; only the
    matrix assembly needs it (see :attr:`is_even`).
    """

    h: float
    tau: float
    c: float
    n_x: int
    n_t: int

    def __post_init__(self):
        for name in ("h", "tau", "c"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v!r}")
        if self.h <= 0 or self.tau <= 0:
            raise ValidationError(f"need h > 0 and tau > 0, got h={self.h}, tau={self.tau}")
        if int(self.n_x) != self.n_x or int(self.n_t) != self.n_t:
            raise ValidationError("n_x and n_t must be integers")
        if self.n_x < 3:
            raise ValidationError(f"n_x must be >= 3, got {self.n_x}")
        if self.n_t < 2:
            raise ValidationError(f"n_t must be >= 2, got {self.n_t}")

    @classmethod
    def from_cfl(cls, length, n_x, n_t, c, cfl):
        """h = length / n_x and tau = cfl * h / c."""
        if c == 0:
            raise ValidationError("cannot derive tau from a CFL number when c = 0")
        h = length / n_x
        return cls(h=h, tau=cfl * h / c, c=c, n_x=n_x, n_t=n_t)

    @classmethod
    def from_extent(cls, length, horizon, n_x, n_t, c):
        return cls(h=length / n_x, tau=horizon / n_t, c=c, n_x=n_x, n_t=n_t)

    @property
    def L(self):
        return self.n_x * self.h

    @property
    def T(self):
        return self.n_t * self.tau

    @property
    def sigma(self):
        return self.c * self.tau / self.h

    @property
    def is_even(self):
        return (self.n_x - 1) % 2 == 0 and self.n_t % 2 == 0

    @property
    def x(self):
        """Node abscissae x_i = i h, i = 0..n_x."""
        return np.arange(self.n_x + 1) * self.h

    @property
    def t(self):
        """Time levels t_n = n tau, n = 0..n_t."""
        return np.arange(self.n_t + 1) * self.tau

    def extended(self, extra=1):
        """Same spacing, ``extra`` more time levels."""
        return Grid(self.h, self.tau, self.c, self.n_x, self.n_t + extra)


class SchemeId(enum.Enum):
    LEAPFROG = "leapfrog"
    LAX = "lax"
    LAX_WENDROFF = "lax-wendroff"
    CRANK_NICOLSON = "crank-nicolson"
    CUSTOM = "custom"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower().replace("_", "-")
        aliases = {"laxwendroff": "lax-wendroff", "lw": "lax-wendroff",
                   "cranknicolson": "crank-nicolson", "cn": "crank-nicolson"}
        key = aliases.get(key, key)
        for member in cls:
            if member.value == key:
                return member
        raise ValidationError(f"unknown scheme {name!r}")


@dataclass(frozen=True)
class SchemeCoefficients:
    scheme_id: SchemeId
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0
    epsilon: float = 0.0
    zeta: float = 0.0
    eta: float = 0.0
    theta: float = 0.0
    vartheta: float = 0.0

    def __post_init__(self):
        w = self.weights()
        if not all(math.isfinite(v) for v in w.values()):
            raise ValidationError("stencil weights must be finite")
        if all(v == 0 for v in w.values()):
            raise ValidationError("at least one stencil weight must be nonzero")
        sid = self.scheme_id
        if sid in (SchemeId.LAX, SchemeId.LAX_WENDROFF, SchemeId.CRANK_NICOLSON) and self.gamma != 0:
            raise ValidationError(f"{sid.value} has gamma = 0")
        if sid not in (SchemeId.CRANK_NICOLSON, SchemeId.CUSTOM):
            if any(getattr(self, k) != 0 for k in ("zeta", "eta", "theta", "vartheta")):
                raise ValidationError(f"{sid.value} has no cross-stencil weights")

    @classmethod
    def custom(cls, **weights):
        return cls(SchemeId.CUSTOM, **weights)

    def weights(self):
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "scheme_id"}

    @property
    def cross(self):
        """(zeta, eta, theta, vartheta): the weights of the cross operator."""
        return (self.zeta, self.eta, self.theta, self.vartheta)

    @property
    def has_cross(self):
        return any(v != 0 for v in self.cross)

    @property
    def three_level(self):
        """True when the stencil reaches back to level n - 1."""
        return any(v != 0 for v in (self.gamma, self.eta, self.vartheta))

    @property
    def implicit(self):
        """True when the new level couples neighbouring nodes."""
        return self.zeta != 0 or self.theta != 0


def build_coefficients(scheme_id, grid):
    """Stencil weights of a named scheme evaluated on ``grid``.

    >>> g = Grid(h=0.1, tau=0.1, c=1.0, n_x=5, n_t=4)
    >>> build_coefficients("lax", g).alpha
    10.0
    """
    sid = SchemeId.parse(scheme_id)
    if not isinstance(grid, Grid):
        raise ValidationError("grid must be a Grid")
    h, tau, c = grid.h, grid.tau, grid.c
    sigma = grid.sigma
    if sid is SchemeId.LEAPFROG:
        return SchemeCoefficients(sid, alpha=1 / (2 * tau), gamma=-1 / (2 * tau),
                                  delta=c / (2 * h), epsilon=-c / (2 * h))
    if sid is SchemeId.LAX:
        return SchemeCoefficients(sid, alpha=1 / tau,
                                  delta=-1 / (2 * tau) + c / (2 * h),
                                  epsilon=-1 / (2 * tau) - c / (2 * h))
    if sid is SchemeId.LAX_WENDROFF:
        return SchemeCoefficients(sid, alpha=1 / tau,
                                  beta=-1 / tau + c * c * tau / (h * h),
                                  delta=(1 - sigma) * c / (2 * h),
                                  epsilon=-(1 + sigma) * c / (2 * h))
    if sid is SchemeId.CRANK_NICOLSON:
        # verbatim table row, including the c/h^2 terms
        k = c / (h * h)
        return SchemeCoefficients(sid, alpha=1 / tau + k, beta=-1 / tau + k,
                                  delta=-k, epsilon=-k, eta=-k, theta=-k)
    raise ValidationError("custom coefficients are constructed directly, not built from a grid")


@dataclass(frozen=True)
class SignalSpec:
    """Unit-amplitude cosine of the given wavelength."""

    wavelength: float = 1.0

    def __post_init__(self):
        if not (self.wavelength > 0 and math.isfinite(self.wavelength)):
            raise ValidationError(f"wavelength must be positive, got {self.wavelength!r}")


def exact_field(signal, grid, x, t):
    """cos(2 pi / lambda * (x - c t)); broadcasts over array arguments."""
    k = 2 * math.pi / signal.wavelength
    return np.cos(k * (np.asarray(x) - grid.c * np.asarray(t)))


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class BoundaryData:
    """Dirichlet data: left/right walls over n = 0..n_t, initial and startup rows over i = 0..n_x."""

    left: np.ndarray
    right: np.ndarray
    initial: np.ndarray
    startup: np.ndarray | None = field(default=None)

    def __post_init__(self):
        for name in ("left", "right", "initial", "startup"):
            v = getattr(self, name)
            if v is None:
                continue
            arr = _frozen(v)
            if arr.ndim != 1 or not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name} must be a finite 1-D sequence")
            object.__setattr__(self, name, arr)
        if not _close(self.left[0], self.initial[0]):
            raise ValidationError("corner mismatch: left[0] != initial[0]")
        if not _close(self.right[0], self.initial[-1]):
            raise ValidationError("corner mismatch: right[0] != initial[n_x]")
        if self.startup is not None and self.left.size > 1:
            if not (_close(self.startup[0], self.left[1]) and _close(self.startup[-1], self.right[1])):
                raise ValidationError("corner mismatch between startup row and walls at n = 1")

    def check(self, grid, coefficients=None):
        """Raise unless the sequence lengths fit ``grid`` (and the startup row is present when needed)."""
        if self.left.size != grid.n_t + 1 or self.right.size != grid.n_t + 1:
            raise ValidationError(
                f"wall sequences need n_t + 1 = {grid.n_t + 1} entries, "
                f"got {self.left.size} and {self.right.size}")
        if self.initial.size != grid.n_x + 1:
            raise ValidationError(f"initial row needs n_x + 1 = {grid.n_x + 1} entries, got {self.initial.size}")
        if self.startup is not None and self.startup.size != grid.n_x + 1:
            raise ValidationError(f"startup row needs n_x + 1 = {grid.n_x + 1} entries, got {self.startup.size}")
        if coefficients is not None and coefficients.three_level and self.startup is None:
            raise StartupError("three-level scheme needs a startup row u^1")


def _close(a, b):
    return abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))


def sample_boundary(signal, grid, startup=True):
    """Boundary, initial and (optionally) startup data sampled from the exact signal."""
    x, t = grid.x, grid.t
    return BoundaryData(
        left=exact_field(signal, grid, 0.0 * t, t),
        right=exact_field(signal, grid, grid.L + 0.0 * t, t),
        initial=exact_field(signal, grid, x, 0.0),
        startup=exact_field(signal, grid, x, grid.tau) if startup else None,
    )
