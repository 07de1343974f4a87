"""Small dense complex linear algebra used throughout the package.

All matrices here are tiny (at most a few tens of rows), so the routines
favour accuracy and simple, checkable behaviour over asymptotic speed.
"""

import numpy as np
from scipy import linalg as sla

__all__ = [
    "LinAlgError", "NotPositiveDefinite", "DimensionMismatch",
    "NoConvergence", "SingularUpdate",
    "hermitian_solve", "hermitian_inverse", "eig_hermitian",
    "sherman_morrison_inverse_apply", "fix_phase", "is_hermitian",
]


class LinAlgError(ArithmeticError):
    """Base class for errors raised by this module."""


class NotPositiveDefinite(LinAlgError):
    pass


class DimensionMismatch(LinAlgError, ValueError):
    pass


class NoConvergence(LinAlgError):
    pass


class SingularUpdate(LinAlgError):
    pass


PD_THRESHOLD = 1e-12


def is_hermitian(M, rtol=1e-12):
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    scale = np.max(np.abs(M)) if M.size else 0.0
    return np.max(np.abs(M - M.conj().T), initial=0.0) <= rtol * max(scale, 1e-300)


def _pd_factor(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    n = M.shape[0]
    tr = float(np.real(np.trace(M)))
    if not tr > 0:
        raise NotPositiveDefinite(f"trace {tr:.3e} is not positive")
    try:
        c, lower = sla.cho_factor(M, lower=True, check_finite=True)
    except sla.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    pivots = np.abs(np.diag(c)) ** 2
    if pivots.min() <= PD_THRESHOLD * tr / n:
        raise NotPositiveDefinite(
            f"smallest pivot {pivots.min():.3e} below {PD_THRESHOLD:g}*trace/n")
    return c, lower


def hermitian_solve(M, b):
    """Solve ``M x = b`` for Hermitian positive-definite ``M``.

    ``b`` may be a vector or a matrix of right-hand sides.
    """
    b = np.asarray(b, dtype=complex)
    M = np.asarray(M)
    if M.ndim != 2 or b.shape[0] != M.shape[0]:
        raise DimensionMismatch(f"cannot solve {M.shape} system with rhs {b.shape}")
    return sla.cho_solve(_pd_factor(M), b)


def hermitian_inverse(M):
    M = np.asarray(M)
    inv = hermitian_solve(M, np.eye(M.shape[0], dtype=complex))
    return 0.5 * (inv + inv.conj().T)


def fix_phase(v, tol=1e-12):
    """Rotate ``v`` so its first non-negligible entry is real and positive."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    big = np.flatnonzero(mags > tol * max(mags.max(initial=0.0), 1e-300))
    if big.size == 0:
        return v.copy()
    k = big[0]
    return v * (np.conj(v[k]) / mags[k])


def eig_hermitian(M, tol=1e-15, max_sweeps=60):
    """Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.

    Returns ``(w, V)`` with eigenvalues ``w`` sorted in descending order and
    the matching unit eigenvectors as the columns of ``V``.  Each eigenvector
    is phase-normalised with :func:`fix_phase`.

    Raises
    ------
    NoConvergence
        If the off-diagonal mass does not vanish within ``max_sweeps``.
    """
    A = np.array(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    A = 0.5 * (A + A.conj().T)
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(A)).copy(), V

    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A[offdiag])
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300 or mag <= 1e-18 * scale:
                    continue
                phase = apq / mag
                theta = (A[q, q].real - A[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # G = diag(1, conj(phase)) @ [[c, s], [-s, c]] zeroes A[p, q]
                G = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ G
                A[idx, :] = G.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ G
    else:
        off = np.linalg.norm(A[offdiag])
        raise NoConvergence(
            f"Jacobi sweeps exhausted: off-diagonal norm {off:.3e}, "
            f"Frobenius norm {scale:.3e}, n={n}")

    w = np.real(np.diag(A))
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    V /= np.linalg.norm(V, axis=0)
    for k in range(n):
        V[:, k] = fix_phase(V[:, k])
    return w, V


def sherman_morrison_inverse_apply(Binv, u, x):
    """Apply ``(B + u u^H)^{-1}`` to ``x`` given ``B^{-1}``.

    Uses ``Binv x - Binv u (u^H Binv x) / (1 + u^H Binv u)``.
    """
    Binv = np.asarray(Binv, dtype=complex)
    u = np.asarray(u, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if Binv.shape[0] != u.shape[0] or Binv.shape[1] != x.shape[0]:
        raise DimensionMismatch(
            f"shapes {Binv.shape}, {u.shape}, {x.shape} do not conform")
    Bu = Binv @ u
    denom = 1.0 + u.conj() @ Bu
    if abs(denom) < 1e-14:
        raise SingularUpdate(f"|1 + u^H B^-1 u| = {abs(denom):.3e}")
    Bx = Binv @ x
    coef = (u.conj() @ Bx) / denom
    return Bx - Bu.reshape((-1,) + (1,) * (x.ndim - 1)) * coef
