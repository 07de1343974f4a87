import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import draw, random_unit
from fdnoma import optimizer, oracle, sinr
from fdnoma.sinr import PowerAllocation

SMALL = dict(n_theta=9, n_phi=8, n_ps=11, n_pr=6)
# every SMALL grid point is also a FINE grid point
FINE = dict(n_theta=17, n_phi=16, n_ps=21, n_pr=10)


def test_unit_vectors():
    assert np.allclose(oracle.unit_vector_from_angles(0.0, 1.234), [1, 0])
    assert np.allclose(oracle.unit_vector_from_angles(math.pi / 2, math.pi), [0, -1])
    th, ph = oracle.angle_grids(33, 40)
    v = oracle.unit_vector_from_angles(th[:, None], ph[None, :])
    assert np.abs(np.linalg.norm(v, axis=-1) - 1).max() <= 1e-14


def test_zero_target_matches_algorithm1():
    p, ch = draw(0)
    o = oracle.grid_search(p, ch, 0.0, **SMALL)
    a = optimizer.algorithm1(p, ch, 0.0)
    assert o.feasible and o.pa.Pr == 0.0
    assert o.pa.Ps == pytest.approx(sinr.ps_max(p, ch), rel=1e-12)
    assert o.near_rate == pytest.approx(a.near_rate, rel=1e-12)


def test_unreachable_target_is_infeasible():
    p, ch = draw(1)
    for rbar in (math.log2(20), 6.0):
        assert not oracle.grid_search(p, ch, rbar, **SMALL).feasible
        assert not optimizer.algorithm1(p, ch, rbar).feasible


def test_requires_two_transmit_antennas():
    p, ch = draw(2, Nt=3)
    with pytest.raises(ValueError):
        oracle.grid_search(p, ch, 1.0, **SMALL)


@pytest.mark.parametrize("trial", range(4))
def test_refinement_is_monotone(trial):
    p, ch = draw(trial)
    for rbar in (0.5, 1.5):
        coarse = oracle.grid_search(p, ch, rbar, **SMALL)
        fine = oracle.grid_search(p, ch, rbar, **FINE)
        if coarse.feasible:
            assert fine.feasible and fine.near_rate >= coarse.near_rate - 1e-12


@pytest.mark.parametrize("trial", range(4))
def test_returned_point_revalidates(trial):
    p, ch = draw(trial)
    o = oracle.grid_search(p, ch, 1.0, **SMALL)
    if not o.feasible:
        return
    rt = 1.0
    A = sinr.build_A(p, ch, math.sqrt(o.pa.Pr) * o.bf.wt, o.pa.Ps)
    assert np.allclose(o.bf.wr, optimizer.optimal_wr(A, ch.h2), atol=1e-10)
    assert sinr.far_sinr(p, ch, o.bf.wt, o.bf.wr, o.pa) >= rt * (1 - 1e-12)
    assert sinr.primary_interference(p, ch, o.bf.wt, o.pa) <= p.I_th * (1 + 1e-9)
    assert o.far_rate >= 1.0 - 1e-12
    assert o.bf.check_unit()


@given(st.integers(0, 10 ** 6), st.floats(0.0, 80.0), st.floats(0.0, 200.0))
def test_receive_direction_does_not_depend_on_bs_power(trial, Pr, Ps):
    p, ch = draw(trial, sigma2_RR=0.05)
    wt = random_unit(np.random.default_rng(trial), 2, size=3)
    pr = np.full((3, 1), Pr)
    got = oracle.receive_beamformers(p, ch, wt, pr)[:, 0, :]
    for k in range(3):
        ref = optimizer.optimal_wr(sinr.build_A(p, ch, math.sqrt(Pr) * wt[k], Ps), ch.h2)
        assert abs(abs(np.vdot(ref, got[k])) - 1) <= 1e-10


def test_power_grids_stay_in_box():
    p, ch = draw(5)
    th, ph = oracle.angle_grids(5, 6)
    wt = oracle.unit_vector_from_angles(th[2], ph)
    pr = oracle.relay_power_grid(p, ch, wt, 1.0, 7)
    pr_max = p.I_th / (p.beta_RP * np.abs(wt @ ch.h_RP) ** 2)
    assert np.all(pr[:, 0] == 0) and np.all(pr >= 0)
    assert np.allclose(pr[:, -1], pr_max, rtol=1e-14)
    assert np.all(np.diff(pr, axis=-1) > 0)
    ps = oracle.bs_power_grid(p, ch, wt, pr, 5)
    assert ps.shape == (6, 7, 5)
    assert np.all(ps >= 0) and np.all(ps <= sinr.ps_max(p, ch) * (1 + 1e-12))
    intf = sinr.primary_interference(p, ch, wt[:, None, None, :], PowerAllocation(ps, pr[..., None]))
    assert np.all(intf <= p.I_th * (1 + 1e-12))


def test_deterministic():
    p, ch = draw(6)
    a = oracle.grid_search(p, ch, 1.0, **SMALL)
    b = oracle.grid_search(p, ch, 1.0, **SMALL)
    assert a.diag["index"] == b.diag["index"] and a.near_rate == b.near_rate


def test_default_grid_agrees_with_algorithm1():
    p, ch = draw(7)
    a = optimizer.algorithm1(p, ch, 1.0)
    o = oracle.grid_search(p, ch, 1.0)
    assert a.feasible == o.feasible
    if a.feasible:
        assert abs(o.near_rate - a.near_rate) <= 0.02 * a.near_rate
