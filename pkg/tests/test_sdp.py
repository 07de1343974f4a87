import numpy as np
import pytest
from hypothesis import given, strategies as st

import frozen
from conftest import draw, random_pd
from fdnoma import optimizer, sdp, sinr
from fdnoma.sdp import SdpProblem, Status

E1 = np.diag([1.0, 0.0]).astype(complex)


def test_analytic_optimum():
    sol = sdp.solve(SdpProblem(np.eye(2), [(E1, ">=", 1.0)]))
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(1.0, abs=1e-7)
    assert np.allclose(sol.X, E1, atol=1e-6)


def test_contradictory_constraints():
    prob = SdpProblem(np.eye(2), [(np.eye(2), "<=", 1.0), (np.eye(2), ">=", 2.0)])
    sol = sdp.solve(prob)
    assert sol.status is Status.INFEASIBLE
    assert not sdp.feasibility(prob)


def test_unbounded_objective():
    sol = sdp.solve(SdpProblem(-np.eye(2), [(E1, ">=", 1.0)]))
    assert sol.status is Status.UNBOUNDED


def test_against_cone_grid_oracle():
    sol = sdp.solve(SdpProblem(frozen.SDP_C, frozen.SDP_CONS))
    assert sol.status is Status.OPTIMAL
    assert sol.objective == pytest.approx(frozen.SDP_BRUTE_OBJECTIVE, rel=0.01)
    # the grid value is attained by a feasible point, so it bounds the optimum from above
    assert sol.objective <= frozen.SDP_BRUTE_OBJECTIVE * (1 + 1e-7)


def test_feasibility_examples():
    empty = sdp.feasibility(SdpProblem(np.zeros((2, 2)), []))
    assert empty and np.array_equal(empty.X, np.zeros((2, 2)))
    one = sdp.feasibility(SdpProblem(np.zeros((3, 3)), [(np.eye(3), ">=", 1.0)]))
    assert one and np.trace(one.X).real >= 1 - 1e-7


def test_tolerance_range():
    prob = SdpProblem(np.eye(2), [(E1, ">=", 1.0)])
    for tol in (1e-11, 1e-3):
        with pytest.raises(ValueError):
            sdp.solve(prob, tol=tol)


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        SdpProblem(np.array([[0, 1], [0, 0]]), [])
    with pytest.raises(ValueError):
        sdp.Constraint(np.eye(2), "==", 1.0)


def test_zero_bound_psd_constraint_restricts_to_null_space():
    h = np.array([1.0, 1j])
    f = np.array([1.0, 0.3])
    prob = SdpProblem(np.eye(2), [(np.outer(h.conj(), h), "<=", 0.0), (np.outer(f.conj(), f), ">=", 1.0)])
    sol = sdp.solve(prob)
    assert sol.status is Status.OPTIMAL
    assert abs(np.vdot(h.conj(), sol.X @ h.conj())) < 1e-12
    assert sol.max_constraint_violation <= 1e-7


def _random_problem(seed, n):
    rng = np.random.default_rng(seed)
    X0 = random_pd(rng, n, cond=10.0)
    X0 /= np.trace(X0).real
    C = random_pd(rng, n, cond=100.0)
    cons = [(np.eye(n), "<=", 10.0)]
    for k in range(3):
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        A = np.outer(v.conj(), v)
        if k == 2:
            G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            A = G + G.conj().T
        val = np.real(np.trace(A @ X0))
        # X0 is strictly feasible for every constraint
        if k == 0:
            cons.append((A, ">=", 0.5 * val))
        else:
            cons.append((A, "<=", val + 0.1 + 0.3 * abs(val)))
    return SdpProblem(C, cons)


def _check_optimal(prob, sol, tol=1e-8):
    assert sol.status is Status.OPTIMAL
    lam = np.linalg.eigvalsh(sol.X)
    assert lam.min() >= -1e-8 * max(np.trace(sol.X).real, 1e-300)
    assert sol.max_constraint_violation <= 1e-7
    assert np.all(prob.violations(sol.X) <= 1e-7)
    assert abs(sol.objective - sol.dual_objective) <= tol * (1 + abs(sol.objective) + abs(sol.dual_objective)) * 10


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([2, 3, 4]))
def test_optimal_solution_contract(seed, n):
    prob = _random_problem(seed, n)
    _check_optimal(prob, sdp.solve(prob))


@given(st.integers(0, 2 ** 32 - 1))
def test_unitary_invariance(seed):
    prob = _random_problem(seed, 3)
    rng = np.random.default_rng(seed + 1)
    U, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    rot = SdpProblem(U.conj().T @ prob.C @ U,
                     [(U.conj().T @ c.A @ U, c.sense, c.b) for c in prob.constraints])
    a, b = sdp.solve(prob), sdp.solve(rot)
    assert b.objective == pytest.approx(a.objective, rel=1e-6, abs=1e-9)


@given(st.integers(0, 2 ** 32 - 1), st.floats(0.01, 100.0))
def test_scaling_covariance(seed, c):
    prob = _random_problem(seed, 2)
    scaled = SdpProblem(c * prob.C, prob.constraints)
    a, b = sdp.solve(prob), sdp.solve(scaled)
    assert b.objective == pytest.approx(c * a.objective, rel=1e-6)
    assert np.linalg.norm(b.X - a.X) <= 1e-5 * max(np.linalg.norm(a.X), 1.0)


def test_embedding_round_trip():
    rng = np.random.default_rng(0)
    M = random_pd(rng, 3)
    assert np.allclose(sdp.fold_embedded(sdp.real_embed(M)), M)
    A = random_pd(rng, 3)
    assert np.trace(sdp.real_embed(A) @ sdp.real_embed(M)) == pytest.approx(2 * np.trace(A @ M).real)


def test_dump_load_round_trip():
    prob = SdpProblem(frozen.SDP_C, frozen.SDP_CONS)
    back = sdp.load_problem(sdp.dump_problem(prob))
    assert np.array_equal(back.C, prob.C)
    for a, b in zip(back.constraints, prob.constraints):
        assert np.array_equal(a.A, b.A) and a.sense == b.sense and a.b == b.b
    text = sdp.dump_solution(sdp.solve(prob))
    assert text.startswith("solution status=Optimal")


def _sdr_feasible(p, ch, Ps, rt):
    try:
        prob = optimizer.build_sdr(p, ch, Ps, rt)
    except optimizer.NegativeBound:
        return False
    return sdp.solve(prob).status is Status.OPTIMAL


def test_feasibility_edge_flips_once():
    # bisection on the SDR's feasibility edge, then a fine scan across it
    found = 0
    for t in range(40):
        p, ch = draw(t)
        rt = 2 ** 2.5 - 1
        top = sinr.q_bounds(p, ch, sinr.ps_max(p, ch), rt)
        if top.v > top.ps_max:
            continue
        grid = np.linspace(top.v, top.ps_max, 21)
        flags = [_sdr_feasible(p, ch, x, rt) for x in grid]
        flips = [k for k in range(20) if flags[k] != flags[k + 1]]
        if len(flips) != 1:
            continue
        k = flips[0]
        lo, hi = grid[k], grid[k + 1]
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            if _sdr_feasible(p, ch, mid, rt) == flags[k]:
                lo = mid
            else:
                hi = mid
        fine = np.linspace(lo - 1e-3 * (hi - lo + lo * 1e-6), hi + 1e-3 * (hi - lo + hi * 1e-6), 9)
        f = [_sdr_feasible(p, ch, x, rt) for x in fine]
        assert sum(f[i] != f[i + 1] for i in range(8)) == 1
        found += 1
        if found == 3:
            break
    assert found >= 1


def test_semidefinite_constraint_with_wrong_sign_bound():
    h = np.array([0.3, 1j])
    for A, sense, b in ((np.outer(h.conj(), h), "<=", -1e-12), (-np.eye(2), ">=", 1e-12)):
        sol = sdp.solve(SdpProblem(np.eye(2), [(np.eye(2), "<=", 5.0), (A, sense, b)]))
        assert sol.status is Status.INFEASIBLE
