"""Dense real linear algebra kernels.

Matrices are plain 2-D ``float64`` numpy arrays; numpy is used for storage and
vectorised row/column updates only. The factorizations themselves
(Householder-Hessenberg, Francis double-shift QR, one-sided Jacobi SVD,
pivoted elimination) are written out here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DimensionError, SingularMatrixError, ValidationError

__all__ = [
    "SchurForm",
    "SvdForm",
    "as_matrix",
    "frobenius_norm",
    "hessenberg",
    "real_schur",
    "svd",
    "tridiag_det",
    "solve_linear",
    "toeplitz_tridiag",
]

EPS = np.finfo(float).eps


def as_matrix(a, name="matrix"):
    """Validate and return ``a`` as a finite 2-D float array (copy-free when possible)."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    return a


def frobenius_norm(a):
    a = np.asarray(a, dtype=float)
    # scaled sum of squares avoids overflow for large entries
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(scale * math.sqrt(np.sum((a / scale) ** 2)))


def toeplitz_tridiag(diag, upper, lower, n):
    a = np.zeros((n, n))
    idx = np.arange(n)
    a[idx, idx] = diag
    a[idx[:-1], idx[1:]] = upper
    a[idx[1:], idx[:-1]] = lower
    return a


def tridiag_det(diag, upper, lower, n):
    """Determinant of the n x n Toeplitz tridiagonal matrix (three-term recurrence)."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    d_prev, d = 1.0, float(diag)
    for _ in range(2, n + 1):
        d_prev, d = d, diag * d - upper * lower * d_prev
    return d


def solve_linear(a, b, pivot_tol=1e-12):
    """Solve ``a x = b`` by Gaussian elimination with partial pivoting.

    A pivot smaller than ``pivot_tol * max|a|`` is treated as zero and
    raises :class:`SingularMatrixError`. ``b`` may be a vector or a matrix;
    the result has the same shape.
    """
    a = as_matrix(a, "a")
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionError(f"a must be square, got {a.shape}")
    b_arr = np.asarray(b, dtype=float)
    vector = b_arr.ndim == 1
    if b_arr.ndim not in (1, 2) or b_arr.shape[0] != n:
        raise DimensionError(f"b has {b_arr.shape[0] if b_arr.ndim else 0} rows, a has {n}")
    rhs = b_arr.reshape(n, -1)
    if not np.all(np.isfinite(rhs)):
        raise ValidationError("b has non-finite entries")

    m = np.hstack([a, rhs]).astype(float, copy=True)
    threshold = pivot_tol * np.max(np.abs(a))
    for k in range(n):
        p = k + int(np.argmax(np.abs(m[k:, k])))
        if abs(m[p, k]) <= threshold:
            raise SingularMatrixError(f"pivot {abs(m[p, k]):.3e} at column {k} is below tolerance {threshold:.3e}")
        if p != k:
            m[[k, p]] = m[[p, k]]
        if k + 1 < n:
            factors = m[k + 1:, k] / m[k, k]
            m[k + 1:, k:] -= np.outer(factors, m[k, k:])
    x = np.empty_like(rhs)
    for k in range(n - 1, -1, -1):
        x[k] = (m[k, n:] - m[k, k + 1:n] @ x[k + 1:]) / m[k, k]
    return x.ravel() if vector else x


# ---------------------------------------------------------------- Schur

@dataclass(frozen=True)
class SchurForm:
    """``a = q @ t @ q.T`` with ``t`` quasi-upper-triangular."""

    q: np.ndarray
    t: np.ndarray
    eigenvalues: tuple  # of (re, im) pairs, in diagonal order

    @property
    def blocks(self):
        """Start index and size (1 or 2) of each diagonal block of ``t``."""
        out, i, n = [], 0, self.t.shape[0]
        while i < n:
            if i + 1 < n and self.t[i + 1, i] != 0.0:
                out.append((i, 2))
                i += 2
            else:
                out.append((i, 1))
                i += 1
        return out

    def complex_eigenvalues(self):
        return np.array([complex(re, im) for re, im in self.eigenvalues])


def _householder(x):
    """Return (v, beta) with (I - beta v v^T) x = -+|x| e_1."""
    v = np.array(x, dtype=float)
    alpha = np.linalg.norm(v)
    if alpha == 0.0:
        return v, 0.0
    v[0] += math.copysign(alpha, v[0])
    return v, 2.0 / float(v @ v)


def hessenberg(a):
    """Householder reduction ``a = q h q^T`` with ``h`` upper Hessenberg."""
    h = as_matrix(a).copy()
    n = h.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        v, beta = _householder(h[k + 1:, k])
        if beta == 0.0:
            continue
        h[k + 1:, k:] -= beta * np.outer(v, v @ h[k + 1:, k:])
        h[:, k + 1:] -= beta * np.outer(h[:, k + 1:] @ v, v)
        q[:, k + 1:] -= beta * np.outer(q[:, k + 1:] @ v, v)
        h[k + 2:, k] = 0.0
    return q, h


def _rotate(t, q, p, c, s, hi=None):
    """Apply the rotation G = [[c, -s], [s, c]] on indices p, p+1 as t <- G^T t G."""
    n = t.shape[0]
    rows = t[p:p + 2, p:].copy()
    t[p, p:] = c * rows[0] + s * rows[1]
    t[p + 1, p:] = -s * rows[0] + c * rows[1]
    top = n if hi is None else hi
    cols = t[:top, p:p + 2].copy()
    t[:top, p] = c * cols[:, 0] + s * cols[:, 1]
    t[:top, p + 1] = -s * cols[:, 0] + c * cols[:, 1]
    qc = q[:, p:p + 2].copy()
    q[:, p] = c * qc[:, 0] + s * qc[:, 1]
    q[:, p + 1] = -s * qc[:, 0] + c * qc[:, 1]


def _split_2x2(t, q, p):
    """Triangularize a 2x2 diagonal block with real eigenvalues; leave complex pairs alone."""
    a, b = t[p, p], t[p, p + 1]
    c, d = t[p + 1, p], t[p + 1, p + 1]
    if c == 0.0:
        return
    half = 0.5 * (a - d)
    disc = half * half + b * c
    if disc < 0.0:
        return
    # eigenvector (lam - d, c) with the larger |lam - d| for stability
    lam_minus_d = half + math.copysign(math.sqrt(disc), half)
    r = math.hypot(lam_minus_d, c)
    _rotate(t, q, p, lam_minus_d / r, c / r, hi=p + 2)
    t[p + 1, p] = 0.0


def _block_eigenvalues(t, p, size):
    if size == 1:
        return [(float(t[p, p]), 0.0)]
    a, b, c, d = t[p, p], t[p, p + 1], t[p + 1, p], t[p + 1, p + 1]
    re = 0.5 * (a + d)
    half = 0.5 * (a - d)
    im = math.sqrt(max(-(half * half + b * c), 0.0))
    return [(float(re), float(im)), (float(re), float(-im))]


def real_schur(a, max_iters=None, tol=EPS):
    """Real Schur decomposition by Hessenberg reduction and Francis double-shift QR.

    Parameters
    ----------
    a : (n, n) array_like
    max_iters : int, optional
        Cap on the total number of QR sweeps; defaults to ``100 * n``.
    tol : float
        Relative size below which a subdiagonal entry is set to zero.

    Returns
    -------
    SchurForm
        ``q`` orthogonal, ``t`` quasi-upper-triangular; every 2x2 diagonal
        block of ``t`` carries a complex-conjugate pair. Blocks are left in
        deflation order.
    """
    a = as_matrix(a, "a")
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionError(f"a must be square, got {a.shape}")
    if max_iters is None:
        max_iters = 100 * n
    # power-of-two scaling keeps entries away from under/overflow, exactly
    peak = float(np.max(np.abs(a)))
    shift = math.frexp(peak)[1] if peak > 0 else 0
    q, t = hessenberg(np.ldexp(a, -shift))
    anorm = frobenius_norm(t)
    small = np.finfo(float).tiny * n / EPS

    hi = n - 1
    sweeps = 0
    since_deflation = 0
    while hi >= 0:
        lo = hi
        while lo > 0:
            # local scale, floored so entries negligible against |H| still deflate
            s = max(abs(t[lo - 1, lo - 1]) + abs(t[lo, lo]), EPS * anorm)
            if abs(t[lo, lo - 1]) <= max(tol * s, small):
                t[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            since_deflation = 0
            continue
        if lo == hi - 1:
            _split_2x2(t, q, lo)
            hi -= 2
            since_deflation = 0
            continue

        sweeps += 1
        since_deflation += 1
        if sweeps > max_iters:
            raise ConvergenceError(
                f"Francis QR did not converge in {max_iters} sweeps",
                residual=float(abs(t[hi, hi - 1])))
        _francis_step(t, q, lo, hi, exceptional=since_deflation % 11 == 0)

    t[np.tril_indices(n, -2)] = 0.0
    eigs = []
    form = SchurForm(q=q, t=t, eigenvalues=())
    for p, size in form.blocks:
        eigs.extend((math.ldexp(re, shift), math.ldexp(im, shift)) for re, im in _block_eigenvalues(t, p, size))
    t = np.ldexp(t, shift)
    q.setflags(write=False)
    t.setflags(write=False)
    return SchurForm(q=q, t=t, eigenvalues=tuple(eigs))


def _francis_step(t, q, lo, hi, exceptional=False):
    n = t.shape[0]
    m = hi - 1
    if exceptional:
        w = abs(t[hi, hi - 1]) + abs(t[hi - 1, hi - 2])
        h11 = 0.75 * w + t[hi, hi]
        s = 2.0 * h11
        tt = h11 * h11 + 0.4375 * w * w
    else:
        s = t[m, m] + t[hi, hi]
        tt = t[m, m] * t[hi, hi] - t[m, hi] * t[hi, m]
    x = t[lo, lo] * t[lo, lo] + t[lo, lo + 1] * t[lo + 1, lo] - s * t[lo, lo] + tt
    y = t[lo + 1, lo] * (t[lo, lo] + t[lo + 1, lo + 1] - s)
    z = t[lo + 1, lo] * t[lo + 2, lo + 1]
    for k in range(lo, hi - 1):
        v, beta = _householder([x, y, z])
        if beta != 0.0:
            first = max(lo, k - 1)
            t[k:k + 3, first:] -= beta * np.outer(v, v @ t[k:k + 3, first:])
            last = min(k + 4, hi + 1)
            t[:last, k:k + 3] -= beta * np.outer(t[:last, k:k + 3] @ v, v)
            q[:, k:k + 3] -= beta * np.outer(q[:, k:k + 3] @ v, v)
        x = t[k + 1, k]
        y = t[k + 2, k]
        if k < hi - 2:
            z = t[k + 3, k]
    v, beta = _householder([x, y])
    if beta != 0.0:
        t[hi - 1:hi + 1, hi - 2:] -= beta * np.outer(v, v @ t[hi - 1:hi + 1, hi - 2:])
        t[:hi + 1, hi - 1:hi + 1] -= beta * np.outer(t[:hi + 1, hi - 1:hi + 1] @ v, v)
        q[:, hi - 1:hi + 1] -= beta * np.outer(q[:, hi - 1:hi + 1] @ v, v)
    # bulge-chasing leaves round-off below the subdiagonal
    for j in range(lo, hi - 1):
        t[j + 2:hi + 1, j] = 0.0


# ---------------------------------------------------------------- SVD

@dataclass(frozen=True)
class SvdForm:
    """``a = u_left @ diag(sigma) @ v_right.T`` (rectangular diag)."""

    u_left: np.ndarray
    sigma: np.ndarray
    v_right: np.ndarray

    def reconstruct(self):
        m, n = self.u_left.shape[0], self.v_right.shape[0]
        k = self.sigma.size
        return (self.u_left[:, :k] * self.sigma) @ self.v_right[:, :k].T if k else np.zeros((m, n))

    def rank(self, rtol=1e-12):
        if self.sigma.size == 0 or self.sigma[0] == 0.0:
            return 0
        return int(np.sum(self.sigma >= rtol * self.sigma[0]))


def _complete_basis(u, m):
    """Extend the orthonormal columns of ``u`` (m x r) to an m x m orthogonal matrix."""
    basis = [u[:, j] for j in range(u.shape[1])]
    for e in np.eye(m):
        if len(basis) == m:
            break
        w = e.copy()
        for _ in range(2):  # Gram-Schmidt twice for orthogonality
            for b in basis:
                w -= (b @ w) * b
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            basis.append(w / nrm)
    return np.column_stack(basis) if basis else np.zeros((m, 0))


def svd(a, tol=None, max_sweeps=60):
    """Singular value decomposition by one-sided (Hestenes) Jacobi rotations.

    Columns of ``a`` (or of ``a.T`` when ``a`` is wide) are rotated pairwise
    until mutually orthogonal to ``tol`` relative; their norms are the
    singular values. Raises :class:`ConvergenceError` after ``max_sweeps``.
    """
    a = as_matrix(a, "a")
    m, n = a.shape
    if m < n:
        f = svd(a.T, tol=tol, max_sweeps=max_sweeps)
        return SvdForm(u_left=f.v_right, sigma=f.sigma, v_right=f.u_left)
    if tol is None:
        tol = m * EPS
    peak = float(np.max(np.abs(a)))
    shift = math.frexp(peak)[1] if peak > 0 else 0
    a = np.ldexp(a, -shift)
    w = a.copy()
    v = np.eye(n)
    # columns below this squared norm are numerically zero and left alone
    floor = (EPS * frobenius_norm(a)) ** 2
    off = 0.0
    for _ in range(max_sweeps):
        off = 0.0
        rotated = False
        for p in range(n - 1):
            for r in range(p + 1, n):
                alpha = w[:, p] @ w[:, p]
                beta = w[:, r] @ w[:, r]
                gamma = w[:, p] @ w[:, r]
                if gamma == 0.0 or min(alpha, beta) <= floor:
                    continue
                scale = math.sqrt(alpha) * math.sqrt(beta)
                off = max(off, abs(gamma) / scale)
                if abs(gamma) <= tol * scale:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                tn = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + tn * tn)
                s = c * tn
                wp = w[:, p].copy()
                w[:, p] = c * wp - s * w[:, r]
                w[:, r] = s * wp + c * w[:, r]
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, r]
                v[:, r] = s * vp + c * v[:, r]
        if not rotated:
            break
    else:
        raise ConvergenceError(f"one-sided Jacobi did not converge in {max_sweeps} sweeps", residual=off)

    sigma = np.sqrt(np.sum(w * w, axis=0))
    order = np.argsort(-sigma, kind="stable")
    sigma, w, v = sigma[order], w[:, order], v[:, order]
    cutoff = max(m, n) * EPS * (sigma[0] if sigma.size else 0.0)
    r = int(np.sum(sigma > cutoff))
    u = _complete_basis(w[:, :r] / sigma[:r], m)
    sigma = np.ldexp(sigma, shift)
    sigma.setflags(write=False)
    u.setflags(write=False)
    v.setflags(write=False)
    return SvdForm(u_left=u, sigma=sigma, v_right=v)
