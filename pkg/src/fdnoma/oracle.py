"""Brute-force reference for two transmit antennas.

The transmit beamformer is gridded over the unit sphere of C^2 modulo a
global phase, and both powers are gridded.  The receive beamformer is set
to its exact optimum for every grid point, so it is not gridded.  All SINRs
come from :mod:`fdnoma.sinr`; nothing is shared with the optimizer.

Power grids are laid over the part of the box that can be feasible:

* Pr runs from the least power meeting the far user's SNR up to the
  beamformer's interference cap (geometric spacing), plus ``Pr = 0``;
* Ps runs uniformly from 0 to whatever BS power the interference cap
  leaves at that (wt, Pr).

Every grid point is still evaluated and checked against all constraints.
"""

import math

import numpy as np

from . import sinr
from .optimizer import Scheme, SolutionPoint
from .sinr import Beamformers, PowerAllocation

__all__ = ["unit_vector_from_angles", "angle_grids", "relay_power_grid", "bs_power_grid",
           "receive_beamformers", "grid_search", "grid_search_many", "DEFAULT_GRID"]

DEFAULT_GRID = dict(n_theta=64, n_phi=64, n_ps=60, n_pr=60)
PR_DYNAMIC_RANGE = 1e-4
# rounding slack for points placed exactly on a constraint boundary
_SINR_RTOL = 1e-12
_INTF_RTOL = 1e-9


def unit_vector_from_angles(theta, phi):
    """``(cos theta, sin theta e^{i phi})``; broadcasts over array inputs."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    theta, phi = np.broadcast_arrays(theta, phi)
    return np.stack([np.cos(theta) + 0j, np.sin(theta) * np.exp(1j * phi)], axis=-1)


def angle_grids(n_theta, n_phi):
    """``theta`` on ``[0, pi/2]`` inclusive and ``phi`` on ``[0, 2 pi)``."""
    return np.linspace(0.0, 0.5 * math.pi, n_theta), 2.0 * math.pi * np.arange(n_phi) / n_phi


def relay_power_grid(p, ch, wt, r_tilde, n_pr):
    """Per-beamformer Pr grid, shape ``wt.shape[:-1] + (n_pr,)``."""
    wt = np.asarray(wt)
    g_rp = np.abs(wt @ ch.h_RP) ** 2
    g_f2 = np.abs(wt @ ch.f2) ** 2
    pr_max = p.I_th / (p.beta_RP * np.maximum(g_rp, 1e-300))
    pr_min = p.sigma2_2 * r_tilde / (p.beta_f2 * np.maximum(g_f2, 1e-300))
    lo = np.where((pr_min > 0) & (pr_min <= pr_max), pr_min, PR_DYNAMIC_RANGE * pr_max)
    zeros = np.zeros(pr_max.shape + (1,))
    if n_pr == 1:
        return zeros
    if n_pr == 2:
        return np.concatenate([zeros, lo[..., None]], axis=-1)
    t = np.linspace(0.0, 1.0, n_pr - 1)
    ladder = lo[..., None] * (pr_max / lo)[..., None] ** t
    ladder[..., 0] = lo
    ladder[..., -1] = pr_max
    return np.concatenate([zeros, ladder], axis=-1)


def bs_power_grid(p, ch, wt, pr, n_ps):
    """Ps grid for each (wt, Pr); shape ``pr.shape + (n_ps,)``."""
    g_rp = np.abs(np.asarray(wt) @ ch.h_RP) ** 2
    left = p.I_th - p.beta_RP * pr * g_rp[..., None]
    cap = np.maximum(left, 0.0) / (p.beta_BP * abs(ch.h_BP) ** 2)
    return cap[..., None] * np.linspace(0.0, 1.0, n_ps)


def receive_beamformers(p, ch, wt, pr):
    """Optimal unit ``wr`` for each (wt, Pr); shape ``pr.shape + (Nr,)``.

    The relay's covariance is ``E + Pr s s^H + c h2 h2^H`` with
    ``s = H_RR wt`` and ``c`` proportional to Ps.  The last term only
    rescales ``A^{-1} h2``, so the direction is independent of Ps and
    follows from one rank-one update of ``E^{-1}``.
    """
    Einv = np.linalg.inv(sinr.build_E(p, ch))
    Eh = Einv @ ch.h2                                     # (Nr,)
    s = np.asarray(wt) @ ch.H_RR.T                        # (k, Nr)
    Es = s @ Einv.T                                       # (k, Nr)
    sEh = s.conj() @ Eh                                   # (k,)
    sEs = np.einsum("ki,ki->k", s.conj(), Es).real        # (k,)
    coef = pr * sEh[:, None] / (1.0 + pr * sEs[:, None])  # (k, l)
    comps = [Eh[i] - coef * Es[:, None, i] for i in range(Eh.shape[0])]
    norm = np.sqrt(sum(c.real ** 2 + c.imag ** 2 for c in comps))
    return np.stack([c / norm for c in comps], axis=-1)


def _slice_eval(p, ch, wt, r_t, n_ps, n_pr):
    pr = relay_power_grid(p, ch, wt, r_t, n_pr)           # (k, l)
    ps = bs_power_grid(p, ch, wt, pr, n_ps)                # (k, l, m)
    wr = receive_beamformers(p, ch, wt, pr)[:, :, None, :]
    pa = PowerAllocation(ps, pr[:, :, None])
    wtb = wt[:, None, None, :]
    near = sinr.rate_near(p, ch, wtb, pa)
    far = sinr.far_sinr(p, ch, wtb, wr, pa)
    ok = sinr.primary_interference(p, ch, wtb, pa) <= p.I_th * (1.0 + _INTF_RTOL)
    ok = ok & (far >= r_t * (1.0 - _SINR_RTOL))
    near, ok = np.broadcast_arrays(near, ok)
    return ps, pr, wr, near, ok


def grid_search(p, ch, rbar, n_theta=64, n_phi=64, n_ps=60, n_pr=60):
    """Exhaustive search over (wt angles, Pr, Ps) for one far-rate target.

    Grid points are scanned in lexicographic (theta, phi, Pr, Ps) order
    and the first maximiser wins, so the result does not depend on how
    the theta slices are scheduled.
    """
    if ch.Nt != 2:
        raise ValueError(f"the oracle grids wt over C^2; got Nt = {ch.Nt}")
    r_t = float(sinr.r_tilde_of(rbar))
    grid = dict(n_theta=n_theta, n_phi=n_phi, n_ps=n_ps, n_pr=n_pr)
    if r_t * p.a1 >= p.a2:
        return SolutionPoint.infeasible(Scheme.ORACLE, rbar, "r_tilde >= a2/a1", grid=grid,
                                        n_feasible=0)
    thetas, phis = angle_grids(n_theta, n_phi)
    best = None
    n_ok = 0
    for it, th in enumerate(thetas):
        wt = unit_vector_from_angles(th, phis)
        ps, pr, wr, near, ok = _slice_eval(p, ch, wt, r_t, n_ps, n_pr)
        cnt = int(ok.sum())
        if cnt == 0:
            continue
        n_ok += cnt
        vals = np.where(ok, near, -np.inf)
        flat = int(np.argmax(vals))
        val = float(vals.flat[flat])
        if best is None or val > best[0]:
            j, l, m = np.unravel_index(flat, vals.shape)
            best = (val, (it, int(j), int(l), int(m)), wt[j], float(ps[j, l, m]),
                    float(pr[j, l]), wr[j, l, 0])
    if best is None:
        return SolutionPoint.infeasible(Scheme.ORACLE, rbar, "no feasible grid point",
                                        grid=grid, n_feasible=0)
    _, idx, wt, Ps, Pr, wr = best
    pa = PowerAllocation(Ps, Pr)
    diag = {"grid": grid, "index": idx, "n_feasible": n_ok,
            "theta": float(thetas[idx[0]]), "phi": float(phis[idx[1]])}
    return SolutionPoint(Scheme.ORACLE, float(rbar), True, pa, Beamformers(wt, wr),
                         float(sinr.rate_near(p, ch, wt, pa)),
                         float(sinr.rate_far(p, ch, wt, wr, pa)), diag=diag)


def grid_search_many(p, ch, rbars, **grid):
    return [grid_search(p, ch, r, **grid) for r in rbars]
