"""Closed-form SINRs, rates and constraint quantities of the FD relay network.

Every function works in linear units.  Beamformers may carry leading batch
dimensions (``wt[..., Nt]``, ``wr[..., Nr]``) and the powers in a
:class:`PowerAllocation` may be arrays; results broadcast accordingly.
This lets the brute-force search evaluate whole grids with the very same
formulas the optimizer is checked against.
"""

from dataclasses import dataclass

import numpy as np

from . import cxmat

__all__ = [
    "PowerAllocation", "Beamformers", "QBounds", "InfeasibleRate",
    "r_tilde_of", "gamma_12", "gamma_1", "gamma_R", "gamma_R2",
    "primary_interference", "rate_near", "rate_far", "far_sinr",
    "build_A", "build_B", "build_E", "ps_max", "q_bounds",
]

_TINY = 1e-300


class InfeasibleRate(ValueError):
    """The far-user target cannot be met by any power split (r~ >= a2/a1)."""


@dataclass(frozen=True)
class PowerAllocation:
    Ps: float
    Pr: float

    def __post_init__(self):
        if np.any(np.asarray(self.Ps) < 0) or np.any(np.asarray(self.Pr) < 0):
            raise ValueError(f"powers must be non-negative, got Ps={self.Ps}, Pr={self.Pr}")


@dataclass(frozen=True)
class Beamformers:
    wt: np.ndarray
    wr: np.ndarray

    def check_unit(self, tol=1e-10):
        return (abs(np.linalg.norm(self.wt) - 1.0) <= tol
                and abs(np.linalg.norm(self.wr) - 1.0) <= tol)


@dataclass(frozen=True)
class QBounds:
    """Per-``Ps`` thresholds of the reduced problem plus the ``Ps`` interval.

    ``q1`` caps the CU1 leakage ``tr(f1* f1^T W)``, ``q2`` the self-
    interference term at the relay, ``q3`` is the floor on the relay-CU2
    gain and ``q4`` caps the relay's interference at the primary receiver.
    The joint problem can only be feasible for ``Ps`` in ``[v, ps_max]``.
    """
    q1: float
    q2: float
    q3: float
    q4: float
    v: float
    ps_max: float
    u: float
    h2Binvh2: float
    h2Einvh2: float

    @property
    def sdr_eligible(self):
        return self.q1 >= 0 and self.q2 >= 0 and self.q4 >= 0


def _div(num, den, what):
    den = np.asarray(den, dtype=float)
    if np.any(np.abs(den) < _TINY):
        raise ZeroDivisionError(f"denominator of {what} below {_TINY:g}")
    return num / den


def r_tilde_of(rbar):
    """SINR threshold equivalent to a far-user rate target (bits/s/Hz)."""
    return np.exp2(rbar) - 1.0


def _abs2(x):
    return x.real ** 2 + x.imag ** 2


def _inner_conj(a, b):
    """``sum_i conj(a_i) b_i`` over the last axis, broadcasting leading axes."""
    ac = np.conj(a)
    if np.ndim(b) == 1:
        return ac @ b
    out = ac[..., 0] * b[..., 0]
    for i in range(1, ac.shape[-1]):
        out = out + ac[..., i] * b[..., i]
    return out


def _f1_gain(ch, wt):
    return _abs2(np.asarray(wt) @ ch.f1)


def gamma_12(p, ch, wt, pa):
    """SINR of the far user's symbol as seen by CU1 (before SIC)."""
    s = p.beta_h1 * pa.Ps * _abs2(ch.h1)
    den = s * p.a1 + p.beta_f1 * pa.Pr * _f1_gain(ch, wt) + p.sigma2_1
    return _div(s * p.a2, den, "gamma_12")


def gamma_1(p, ch, wt, pa):
    """SINR of CU1's own symbol after removing the far user's symbol."""
    den = p.beta_f1 * pa.Pr * _f1_gain(ch, wt) + p.sigma2_1
    return _div(p.beta_h1 * pa.Ps * p.a1 * _abs2(ch.h1), den, "gamma_1")


def gamma_R(p, ch, wt, wr, pa):
    """SINR at the relay when decoding the far user's symbol."""
    wr = np.asarray(wr)
    wt = np.asarray(wt)
    g_h2 = _abs2(_inner_conj(wr, ch.h2))
    g_si = _abs2(_inner_conj(wr, wt @ ch.H_RR.T))
    g_pr = _abs2(_inner_conj(wr, ch.h_PR))
    s = p.beta_h2 * pa.Ps * g_h2
    den = s * p.a1 + pa.Pr * g_si + p.beta_PR * p.P_U * g_pr + p.sigma2_R
    return _div(s * p.a2, den, "gamma_R")


def gamma_R2(p, ch, wt, pa):
    """SNR at the far user (relay -> CU2 link)."""
    return p.beta_f2 * pa.Pr * _abs2(np.asarray(wt) @ ch.f2) / p.sigma2_2


def primary_interference(p, ch, wt, pa):
    return (p.beta_BP * pa.Ps * _abs2(ch.h_BP)
            + p.beta_RP * pa.Pr * _abs2(np.asarray(wt) @ ch.h_RP))


def far_sinr(p, ch, wt, wr, pa):
    """Bottleneck SINR of the far user's decode-and-forward path."""
    return np.minimum(np.minimum(gamma_12(p, ch, wt, pa), gamma_R(p, ch, wt, wr, pa)),
                      gamma_R2(p, ch, wt, pa))


def rate_near(p, ch, wt, pa):
    return np.log2(1.0 + gamma_1(p, ch, wt, pa))


def rate_far(p, ch, wt, wr, pa):
    return np.log2(1.0 + far_sinr(p, ch, wt, wr, pa))


# ---------------------------------------------------------------------------
# relay receive covariance matrices
# ---------------------------------------------------------------------------

def build_E(p, ch):
    """Primary interference plus noise at the relay."""
    return (p.beta_PR * p.P_U * np.outer(ch.h_PR, ch.h_PR.conj())
            + p.sigma2_R * np.eye(ch.Nr))


def build_B(p, ch, Ps):
    """``E`` plus the CU1 symbol leaking into the relay's far-user decode."""
    return build_E(p, ch) + p.beta_h2 * Ps * p.a1 * np.outer(ch.h2, ch.h2.conj())


def build_A(p, ch, wt_bar, Ps):
    """``B`` plus the residual self-interference for ``wt_bar = sqrt(Pr) wt``."""
    si = ch.H_RR @ np.asarray(wt_bar, dtype=complex)
    return build_B(p, ch, Ps) + np.outer(si, si.conj())


def ps_max(p, ch):
    """Largest BS power the interference cap allows with a silent relay."""
    return _div(p.I_th, p.beta_BP * _abs2(ch.h_BP), "ps_max")


def _quad_inv(M, h):
    return float(np.real(np.vdot(h, cxmat.hermitian_solve(M, h))))


def q_bounds(p, ch, Ps, r_tilde):
    """Thresholds ``q1..q4`` at BS power ``Ps`` and the feasible ``Ps`` range.

    Raises
    ------
    InfeasibleRate
        If ``r_tilde >= a2/a1``; then no ``Ps`` lets CU1 decode the far
        user's symbol.
    """
    if r_tilde < 0:
        raise ValueError(f"r_tilde must be non-negative, got {r_tilde}")
    if r_tilde * p.a1 >= p.a2:
        raise InfeasibleRate(
            f"r_tilde={r_tilde:.6g} is not below a2/a1={p.a2 / p.a1:.6g}")
    g1 = p.beta_h1 * _abs2(ch.h1)
    e = _quad_inv(build_E(p, ch), ch.h2)
    b = _quad_inv(build_B(p, ch, Ps), ch.h2)
    u = e / (1.0 + p.beta_h2 * Ps * p.a1 * e)

    if r_tilde == 0.0:
        q1 = np.inf
        q2 = b
        v = 0.0
    else:
        num1 = Ps * g1 * (p.a2 - r_tilde * p.a1) - r_tilde * p.sigma2_1
        q1 = num1 / (r_tilde * p.beta_f1) if p.beta_f1 > 0 else (np.inf if num1 >= 0 else -np.inf)
        q2 = b - r_tilde / (p.beta_h2 * Ps * p.a2) if Ps > 0 else -np.inf
        lin = p.a2 - r_tilde * p.a1
        v = max(_div(r_tilde, lin * p.beta_h2 * e, "v (relay bound)"),
                _div(r_tilde * p.sigma2_1, lin * g1, "v (CU1 bound)"))
    q3 = p.sigma2_2 * r_tilde / p.beta_f2
    pmax = ps_max(p, ch)
    # written around ps_max so that q4 is exactly 0 there
    q4 = p.beta_BP * _abs2(ch.h_BP) * (pmax - Ps) / p.beta_RP
    return QBounds(q1=float(q1), q2=float(q2), q3=float(q3), q4=float(q4), v=float(v),
                   ps_max=float(pmax), u=float(u), h2Binvh2=b, h2Einvh2=e)
