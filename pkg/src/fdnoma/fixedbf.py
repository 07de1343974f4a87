"""Fixed MRT/MRC beamformers with closed-form powers, and the half-duplex baseline."""

import math

import numpy as np

from . import sinr
from .model import ChannelRealization
from .optimizer import Scheme, SolutionPoint
from .sinr import Beamformers, PowerAllocation

__all__ = ["ZeroChannel", "mrt_mrc", "vtilde", "fixed_power_allocation", "hd_baseline",
           "hd_channels"]


class ZeroChannel(ValueError):
    pass


def _abs2(x):
    return float(abs(x) ** 2)


def mrt_mrc(ch):
    """MRT towards CU2 and MRC on the BS-relay channel."""
    nf, nh = np.linalg.norm(ch.f2), np.linalg.norm(ch.h2)
    if nf == 0 or nh == 0:
        raise ZeroChannel(f"|f2| = {nf}, |h2| = {nh}")
    return Beamformers(ch.f2.conj() / nf, ch.h2 / nh)


def vtilde(p, ch, bf, Pr, r_tilde):
    """Smallest BS power meeting the far-user SINR at CU1 and at the relay."""
    if r_tilde * p.a1 >= p.a2:
        raise sinr.InfeasibleRate(f"r_tilde={r_tilde:.6g} is not below a2/a1={p.a2 / p.a1:.6g}")
    if r_tilde == 0:
        return 0.0
    wt, wr = bf.wt, bf.wr
    scale = p.a2 / r_tilde - p.a1
    cu1 = (Pr * p.beta_f1 * _abs2(ch.f1 @ wt) + p.sigma2_1) / (p.beta_h1 * _abs2(ch.h1) * scale)
    mu1 = p.beta_PR * p.P_U * _abs2(np.vdot(wr, ch.h_PR)) + p.sigma2_R
    relay_gain = p.beta_h2 * _abs2(np.vdot(wr, ch.h2)) * scale
    if relay_gain <= 0:
        return math.inf
    relay = (Pr * _abs2(np.vdot(wr, ch.H_RR @ wt)) + mu1) / relay_gain
    return max(cu1, relay)


def fixed_power_allocation(p, ch, bf, rbar):
    """Closed-form powers for fixed beamformers.

    The relay power is the least that meets the far-user SNR; the BS takes
    whatever is left of the interference budget.  Both constraints are
    therefore tight at the returned point.
    """
    r_t = float(sinr.r_tilde_of(rbar))
    if r_t * p.a1 >= p.a2:
        return SolutionPoint.infeasible(Scheme.FIXED_FD, rbar, "r_tilde >= a2/a1")
    g_f2 = _abs2(ch.f2 @ bf.wt)
    g_rp = _abs2(ch.h_RP @ bf.wt)
    if r_t == 0:
        Pr = 0.0
    elif g_f2 == 0:
        return SolutionPoint.infeasible(Scheme.FIXED_FD, rbar, "wt orthogonal to f2")
    else:
        Pr = p.sigma2_2 * r_t / (p.beta_f2 * g_f2)
    pr_cap = p.I_th / (p.beta_RP * g_rp) if g_rp > 0 else math.inf
    diag = {"pr_cap": pr_cap}
    if Pr > pr_cap:
        return SolutionPoint.infeasible(Scheme.FIXED_FD, rbar, "Pr above interference cap", Pr=Pr, **diag)
    Ps = (p.I_th - Pr * p.beta_RP * g_rp) / (p.beta_BP * _abs2(ch.h_BP))
    vt = vtilde(p, ch, bf, Pr, r_t)
    diag.update(vtilde=vt, Ps=Ps, Pr=Pr)
    if vt > Ps:
        return SolutionPoint.infeasible(Scheme.FIXED_FD, rbar, "vtilde(Pr) > Ps", **diag)
    pa = PowerAllocation(Ps, Pr)
    diag["sinr"] = {
        "gamma_1": float(sinr.gamma_1(p, ch, bf.wt, pa)),
        "gamma_12": float(sinr.gamma_12(p, ch, bf.wt, pa)),
        "gamma_R": float(sinr.gamma_R(p, ch, bf.wt, bf.wr, pa)),
        "gamma_R2": float(sinr.gamma_R2(p, ch, bf.wt, pa)),
        "interference": float(sinr.primary_interference(p, ch, bf.wt, pa)),
    }
    return SolutionPoint(Scheme.FIXED_FD, float(rbar), True, pa, bf,
                         float(sinr.rate_near(p, ch, bf.wt, pa)),
                         float(sinr.rate_far(p, ch, bf.wt, bf.wr, pa)), diag=diag)


def hd_channels(ch):
    """Channel view of a relay that uses all ``Nr + Nt`` antennas, with no SI."""
    ne = ch.ext_h2.shape[0]
    return ChannelRealization(
        h1=ch.h1, h2=ch.ext_h2, f1=ch.ext_f1, f2=ch.ext_f2, H_RR=np.zeros((ne, ne), dtype=complex),
        h_BP=ch.h_BP, h_RP=ch.ext_h_RP, h_PR=ch.ext_h_PR,
        ext_h2=ch.ext_h2, ext_f1=ch.ext_f1, ext_f2=ch.ext_f2,
        ext_h_RP=ch.ext_h_RP, ext_h_PR=ch.ext_h_PR)


def hd_baseline(p, ch, rbar, bs_in_phase2=False):
    """Two-phase half-duplex relaying at the solo interference caps.

    Phase 1: the BS sends the superposed symbols at its cap while the relay
    listens (MRC).  Phase 2: the relay forwards the far user's symbol (MRT)
    at its own cap.  Each rate carries a factor 1/2.

    With ``bs_in_phase2`` the BS also sends CU1's symbol in phase 2; the
    two transmitters then split the interference budget equally in that
    phase and CU1 sees relay interference.
    """
    hd = hd_channels(ch)
    wr = hd.h2 / np.linalg.norm(hd.h2)
    wt = hd.f2.conj() / np.linalg.norm(hd.f2)
    g_bp = p.beta_BP * _abs2(hd.h_BP)
    g_rp = p.beta_RP * _abs2(hd.h_RP @ wt)
    Ps = p.I_th / g_bp
    budget2 = 0.5 * p.I_th if bs_in_phase2 else p.I_th
    Pr = budget2 / g_rp if g_rp > 0 else math.inf

    ph1 = PowerAllocation(Ps, 0.0)
    ph2 = PowerAllocation(0.0, Pr)
    g1 = float(sinr.gamma_1(p, hd, wt, ph1))
    g12 = float(sinr.gamma_12(p, hd, wt, ph1))
    gR = float(sinr.gamma_R(p, hd, wt, wr, ph1))
    gR2 = float(sinr.gamma_R2(p, hd, wt, ph2))
    near = 0.5 * math.log2(1.0 + g1)
    far = 0.5 * math.log2(1.0 + min(g12, gR, gR2))
    # each phase has the whole cap to itself; report the larger of the two
    intf = max(float(sinr.primary_interference(p, hd, wt, ph1)),
               float(sinr.primary_interference(p, hd, wt, ph2)))
    diag = {"Ps_phase1": Ps, "Pr_phase2": Pr,
            "sinr": {"gamma_1": g1, "gamma_12": g12, "gamma_R": gR, "gamma_R2": gR2,
                     "interference": intf}}
    if bs_in_phase2:
        Ps2 = budget2 / g_bp
        g1_ph2 = p.beta_h1 * Ps2 * _abs2(hd.h1) / (
            p.beta_f1 * Pr * _abs2(hd.f1 @ wt) + p.sigma2_1)
        near += 0.5 * math.log2(1.0 + g1_ph2)
        diag.update(Ps_phase2=Ps2, gamma_1_phase2=g1_ph2)
        both = float(sinr.primary_interference(p, hd, wt, PowerAllocation(Ps2, Pr)))
        diag["sinr"]["interference"] = max(intf, both)
    feasible = far >= rbar
    if not feasible:
        diag["reason"] = "far rate below target"
    return SolutionPoint(Scheme.HALF_DUPLEX, float(rbar), feasible, PowerAllocation(Ps, Pr),
                         Beamformers(wt, wr), near, far, diag=diag)
