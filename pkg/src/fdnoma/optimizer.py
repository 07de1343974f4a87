"""Joint beamforming and power allocation for the full-duplex relay.

For a fixed BS power the relay's receive beamformer has a closed form
(an MVDR-type filter), and what is left over the transmit beamformer is a
quadratically constrained problem in ``W = Pr wt wt^H``.  Dropping the
rank constraint gives a small SDP, solved on a descending grid of BS
powers.
"""

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import cxmat, sdp, sinr
from .sinr import Beamformers, PowerAllocation

log = logging.getLogger(__name__)

__all__ = [
    "Scheme", "SolutionPoint", "NegativeBound", "ZeroMatrix",
    "optimal_wr", "g_value", "build_sdr", "extract_rank_one", "algorithm1",
    "validate_point", "LINE_SEARCH_STEPS", "LINE_SEARCH_SIGMA",
]

LINE_SEARCH_STEPS = 200
VALIDATION_RTOL = 1e-7
# centering used inside the line search; these SDPs are tiny and well scaled
LINE_SEARCH_SIGMA = 0.2


class Scheme(str, enum.Enum):
    OPTIMUM_FD = "OptimumFD"
    FIXED_FD = "FixedFD"
    HALF_DUPLEX = "HalfDuplex"
    ORACLE = "Oracle"


class NegativeBound(ValueError):
    """A threshold of the relaxed problem is negative at this BS power."""


class ZeroMatrix(ValueError):
    pass


@dataclass
class SolutionPoint:
    scheme: Scheme
    rbar: float
    feasible: bool
    pa: PowerAllocation = None
    bf: Beamformers = None
    near_rate: float = math.nan
    far_rate: float = math.nan
    diag: dict = field(default_factory=dict)

    @classmethod
    def infeasible(cls, scheme, rbar, reason, **diag):
        return cls(scheme, float(rbar), False, diag={"reason": reason, **diag})


def optimal_wr(A, h2):
    """Unit receive beamformer maximising ``|wr^H h2|^2 / (wr^H A wr)``."""
    x = cxmat.hermitian_solve(A, h2)
    return x / np.linalg.norm(x)


def g_value(p, ch, wt_bar, Ps):
    """``h2^H A^{-1} h2`` via a rank-one update of ``B^{-1}``.

    ``A = B + (H_RR wt_bar)(H_RR wt_bar)^H``, so only ``B`` is inverted.
    """
    Binv = cxmat.hermitian_inverse(sinr.build_B(p, ch, Ps))
    s = ch.H_RR @ np.asarray(wt_bar, dtype=complex)
    Bh = Binv @ ch.h2
    cross = np.vdot(Bh, s)
    return float(np.real(np.vdot(ch.h2, Bh)) - abs(cross) ** 2 / (1.0 + np.real(np.vdot(s, Binv @ s))))


def _outer_conj(x):
    # matrix M with tr(M W) = |x^T w|^2 for W = w w^H
    return np.outer(x.conj(), x)


def _sdr_objective(p, ch):
    # a vanishing power penalty makes the minimiser unique when f1 leaves directions free
    F1 = _outer_conj(ch.f1)
    eps = 1e-6 * max(np.real(np.trace(F1)), 1e-12)
    return F1 + eps * np.eye(ch.Nt)


def build_sdr(p, ch, Ps, r_tilde, qb=None, check_bounds=True):
    """Relaxed transmit-covariance problem at BS power ``Ps``.

    Raises
    ------
    NegativeBound
        If ``q1``, ``q2`` or ``q4`` is negative, i.e. ``Ps`` is infeasible.
        ``check_bounds=False`` skips the check and builds the problem anyway.
    """
    qb = qb or sinr.q_bounds(p, ch, Ps, r_tilde)
    for name in ("q1", "q2", "q4") if check_bounds else ():
        if getattr(qb, name) < 0:
            raise NegativeBound(f"{name} = {getattr(qb, name):.6g} < 0 at Ps = {Ps:.6g}")
    Binv = cxmat.hermitian_inverse(sinr.build_B(p, ch, Ps))
    HBh = ch.H_RR.conj().T @ (Binv @ ch.h2)
    HBH = ch.H_RR.conj().T @ Binv @ ch.H_RR
    M2 = np.outer(HBh, HBh.conj()) - qb.q2 * HBH
    M2 = 0.5 * (M2 + M2.conj().T)
    cons = []
    if math.isfinite(qb.q1):
        cons.append(sdp.Constraint(_outer_conj(ch.f1), "<=", qb.q1))
    cons += [
        sdp.Constraint(M2, "<=", qb.q2),
        sdp.Constraint(_outer_conj(ch.f2), ">=", qb.q3),
        sdp.Constraint(_outer_conj(ch.h_RP), "<=", qb.q4),
    ]
    return sdp.SdpProblem(_sdr_objective(p, ch), cons)


def extract_rank_one(W):
    """Best rank-one factor ``wt_bar`` of ``W`` and the ratio ``lambda_2/lambda_1``."""
    W = np.asarray(W, dtype=complex)
    if np.real(np.trace(W)) < 1e-14:
        raise ZeroMatrix(f"trace {np.real(np.trace(W)):.3e} too small for a rank-one factor")
    lam, V = cxmat.eig_hermitian(W)
    lam1 = max(lam[0], 0.0)
    gap = max(lam[1], 0.0) / lam1 if lam.size > 1 else 0.0
    return math.sqrt(lam1) * V[:, 0], gap


def validate_point(p, ch, wt, wr, pa, r_tilde, rtol=VALIDATION_RTOL):
    """Check every constraint of the joint problem; returns ``(ok, details)``."""
    g12 = float(sinr.gamma_12(p, ch, wt, pa))
    gR = float(sinr.gamma_R(p, ch, wt, wr, pa))
    gR2 = float(sinr.gamma_R2(p, ch, wt, pa))
    intf = float(sinr.primary_interference(p, ch, wt, pa))
    floor = r_tilde * (1.0 - rtol)
    ok = (g12 >= floor and gR >= floor and gR2 >= floor and intf <= p.I_th * (1.0 + 1e-9))
    return ok, {"gamma_12": g12, "gamma_R": gR, "gamma_R2": gR2,
                "gamma_1": float(sinr.gamma_1(p, ch, wt, pa)), "interference": intf}


def _zero_target(p, ch, rbar):
    Ps = sinr.ps_max(p, ch)
    wt = ch.f2.conj() / np.linalg.norm(ch.f2)
    wr = optimal_wr(sinr.build_B(p, ch, Ps), ch.h2)
    pa = PowerAllocation(Ps, 0.0)
    _, d = validate_point(p, ch, wt, wr, pa, 0.0)
    return SolutionPoint(Scheme.OPTIMUM_FD, float(rbar), True, pa, Beamformers(wt, wr),
                         float(sinr.rate_near(p, ch, wt, pa)), float(sinr.rate_far(p, ch, wt, wr, pa)),
                         diag={"sinr": d, "steps": 0, "rank_gap": 0.0})


def _recover(p, ch, Ps, r_t, X):
    """Rank-one point from an SDR solution, with its constraint check."""
    wt_bar, gap = extract_rank_one(X)
    Pr = float(np.vdot(wt_bar, wt_bar).real)
    wt = wt_bar / math.sqrt(Pr)
    # absorb the SDP's small interference overshoot into the BS power
    leak = p.beta_RP * Pr * abs(wt @ ch.h_RP) ** 2
    Ps_used = min(Ps, max(p.I_th - leak, 0.0) / (p.beta_BP * abs(ch.h_BP) ** 2))
    pa = PowerAllocation(Ps_used, Pr)
    wr = optimal_wr(sinr.build_A(p, ch, math.sqrt(Pr) * wt, Ps_used), ch.h2)
    ok, details = validate_point(p, ch, wt, wr, pa, r_t)
    if gap > 1e-6:
        log.info("rank gap %.3e at Ps=%.6g; constraint check %s: %s", gap, Ps, ok, details)
    return ok, pa, Beamformers(wt, wr), gap, details


def algorithm1(p, ch, rbar, delta_ps=None, tol=1e-8, steps=LINE_SEARCH_STEPS, stop="best",
               trace=False):
    """Line search over the BS power with an SDR per grid point.

    The grid runs from the interference-limited maximum BS power down to
    the feasibility bound ``v`` in steps of ``delta_ps`` (default
    ``(ps_max - v) / steps``).  At each grid power the SDR minimises the
    relay's leakage into CU1; its rank-one recovery must pass every
    original constraint.

    ``stop="first"`` returns the first (largest) feasible grid power.
    ``stop="best"`` keeps the grid point with the highest near-user rate;
    the scan ends once the interference-free rate bound at the current
    power cannot beat the best point found.

    Returns
    -------
    SolutionPoint
        ``diag`` holds the q-bounds at the chosen power, the number of
        grid points visited, SDP iteration totals, the rank gap and
        separate counts of infeasible, failed and rejected grid points.
    """
    if stop not in ("first", "best"):
        raise ValueError(f"stop must be 'first' or 'best', got {stop!r}")
    if rbar < 0:
        raise ValueError(f"rbar must be non-negative, got {rbar}")
    r_t = float(sinr.r_tilde_of(rbar))
    if r_t * p.a1 >= p.a2:
        return SolutionPoint.infeasible(Scheme.OPTIMUM_FD, rbar, "r_tilde >= a2/a1")
    if r_t == 0.0:
        return _zero_target(p, ch, rbar)

    top = sinr.q_bounds(p, ch, sinr.ps_max(p, ch), r_t)
    v, pmax = top.v, top.ps_max
    if v > pmax:
        return SolutionPoint.infeasible(Scheme.OPTIMUM_FD, rbar, "v > ps_max", v=v, ps_max=pmax)
    if delta_ps is None:
        delta_ps = (pmax - v) / steps
    if delta_ps <= 0:
        if pmax - v > 0:
            raise ValueError(f"delta_ps must be positive, got {delta_ps}")
        delta_ps = math.inf
    n_points = int(math.floor((pmax - v) / delta_ps * (1 + 1e-12))) + 1 if math.isfinite(delta_ps) else 1
    snr1 = p.beta_h1 * p.a1 * abs(ch.h1) ** 2 / p.sigma2_1

    counts = {"infeasible": 0, "numerical_failure": 0, "negative_bound": 0, "rejected": 0}
    sdp_iters = 0
    lines = []
    best = None
    first_ps = None
    visited = 0
    for k in range(n_points):
        Ps = max(pmax - k * delta_ps, v)
        if best is not None and math.log2(1.0 + snr1 * Ps) <= best[0]:
            break
        visited = k + 1
        qb = sinr.q_bounds(p, ch, Ps, r_t)
        try:
            prob = build_sdr(p, ch, Ps, r_t, qb)
        except NegativeBound:
            counts["negative_bound"] += 1
            lines.append((Ps, "NegativeBound", math.nan))
            continue
        sol = sdp.solve(prob, tol=tol, sigma=LINE_SEARCH_SIGMA)
        sdp_iters += sol.iterations
        lines.append((Ps, sol.status.value, sol.objective))
        if trace:
            log.debug("line-search Ps=%.9g status=%s objective=%.9g iterations=%d",
                      Ps, sol.status.value, sol.objective, sol.iterations)
        if sol.status is sdp.Status.NUMERICAL_FAILURE:
            counts["numerical_failure"] += 1
            log.info("SDP numerical failure at Ps=%.6g: %s", Ps, sol.message)
            continue
        if sol.status is not sdp.Status.OPTIMAL:
            counts["infeasible"] += 1
            continue
        try:
            ok, pa, bf, gap, details = _recover(p, ch, Ps, r_t, sol.X)
        except ZeroMatrix:
            ok = False
        if not ok:
            counts["rejected"] += 1
            continue
        if first_ps is None:
            first_ps = Ps
        near = float(sinr.rate_near(p, ch, bf.wt, pa))
        if best is None or near > best[0]:
            best = (near, Ps, qb, pa, bf, gap, details, sol.objective)
        if stop == "first":
            break

    diag = {"v": v, "ps_max": pmax, "delta_ps": delta_ps, "steps": visited,
            "grid_points": n_points, "sdp_iterations": sdp_iters, "first_feasible_ps": first_ps,
            **counts}
    if trace:
        diag["trace"] = lines
    if best is None:
        return SolutionPoint.infeasible(Scheme.OPTIMUM_FD, rbar, "no feasible grid point", **diag)
    near, Ps, qb, pa, bf, gap, details, obj = best
    diag.update(qbounds=qb, grid_ps=Ps, rank_gap=gap, sdp_objective=obj, sinr=details)
    return SolutionPoint(Scheme.OPTIMUM_FD, float(rbar), True, pa, bf, near,
                         float(sinr.rate_far(p, ch, bf.wt, bf.wr, pa)), diag=diag)
