import numpy as np
import pytest
from hypothesis import given, strategies as st

from fdnoma import cxmat
from conftest import random_pd


def test_solve_identity():
    b = np.array([1, 1j, -2])
    assert np.allclose(cxmat.hermitian_solve(np.eye(3), b), b)


def test_solve_scalar_matrix():
    assert np.allclose(cxmat.hermitian_solve(2 * np.eye(2), np.array([4, 0])), [2, 0])


def test_solve_residual_random():
    rng = np.random.default_rng(1)
    M = random_pd(rng, 4)
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    x = cxmat.hermitian_solve(M, b)
    assert np.linalg.norm(M @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_solve_rejects_indefinite_and_bad_shapes():
    with pytest.raises(cxmat.NotPositiveDefinite):
        cxmat.hermitian_solve(np.diag([1.0, -1.0]), np.ones(2))
    with pytest.raises(cxmat.NotPositiveDefinite):
        cxmat.hermitian_solve(np.diag([1.0, 1e-14]), np.ones(2))
    with pytest.raises(cxmat.DimensionMismatch):
        cxmat.hermitian_solve(np.eye(3), np.ones(2))


def test_eig_diagonal():
    w, V = cxmat.eig_hermitian(np.diag([1.0, 3.0]))
    assert np.allclose(w, [3, 1])
    assert np.allclose(V, [[0, 1], [1, 0]])


def test_eig_rank_one():
    v = np.array([1, 1j]) / np.sqrt(2)
    w, V = cxmat.eig_hermitian(np.outer(v, v.conj()))
    assert np.allclose(w, [1, 0], atol=1e-15)
    assert abs(abs(np.vdot(V[:, 0], v)) - 1) < 1e-12
    assert V[0, 0].imag == 0 and V[0, 0].real > 0


def test_eig_reconstruction_random():
    rng = np.random.default_rng(2)
    G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    M = G + G.conj().T
    w, V = cxmat.eig_hermitian(M)
    assert np.allclose((V * w) @ V.conj().T, M, atol=1e-9 * np.abs(w).max())


def test_eig_no_convergence():
    rng = np.random.default_rng(3)
    G = rng.standard_normal((5, 5))
    with pytest.raises(cxmat.NoConvergence):
        cxmat.eig_hermitian(G + G.T, max_sweeps=1)


herm = st.integers(2, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, 2 ** 32 - 1)))


@given(herm)
def test_eig_properties(arg):
    n, seed = arg
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    M = G + G.conj().T
    w, V = cxmat.eig_hermitian(M)
    scale = np.abs(w).max()
    assert np.all(np.diff(w) <= 0)
    assert np.linalg.norm(M @ V - V * w, axis=0).max() <= 1e-9 * scale
    assert np.allclose(V.conj().T @ V, np.eye(n), atol=1e-9)
    assert abs(w.sum() - np.trace(M).real) <= 1e-9 * max(np.abs(w).sum(), 1.0)
    if n <= 4:
        det = np.linalg.det(M).real
        assert abs(np.prod(w) - det) <= 1e-8 * max(abs(det), np.prod(np.abs(w)))


@given(herm)
def test_solve_property(arg):
    n, seed = arg
    rng = np.random.default_rng(seed)
    M = random_pd(rng, n)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x = cxmat.hermitian_solve(M, b)
    assert np.linalg.norm(M @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_sherman_morrison_examples():
    Binv = np.linalg.inv(random_pd(np.random.default_rng(4), 3))
    x = np.array([1, 2j, -1])
    assert np.allclose(cxmat.sherman_morrison_inverse_apply(Binv, np.zeros(3), x), Binv @ x)
    out = cxmat.sherman_morrison_inverse_apply(np.eye(2), np.array([1, 0]), np.array([1, 0]))
    assert np.allclose(out, [0.5, 0])


def test_sherman_morrison_singular():
    # B^-1 = -I with u = e1 makes 1 + u^H B^-1 u vanish
    with pytest.raises(cxmat.SingularUpdate):
        cxmat.sherman_morrison_inverse_apply(-np.eye(2), np.array([1, 0]), np.ones(2))


def test_sherman_morrison_vs_direct_inverse():
    rng = np.random.default_rng(5)
    worst = 0.0
    for n in (2, 3, 4, 8):
        for _ in range(250):
            B = random_pd(rng, n, cond=1e2)
            u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            ref = np.linalg.solve(B + np.outer(u, u.conj()), x)
            got = cxmat.sherman_morrison_inverse_apply(np.linalg.inv(B), u, x)
            worst = max(worst, np.linalg.norm(got - ref) / np.linalg.norm(ref))
    assert worst <= 1e-10


def test_fix_phase():
    v = np.array([0, -2j, 1])
    out = cxmat.fix_phase(v)
    assert out[1].real > 0 and out[1].imag == 0
    assert np.allclose(np.abs(out), np.abs(v))
