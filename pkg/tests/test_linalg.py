import numpy as np
import pytest

from evans.errors import (
    EigenConvergenceError,
    InvalidArgumentError,
    RankDeficientError,
)
from evans.linalg import cheb_grid, det_lu, eig_dense, lstsq


# ---------------------------------------------------------------- oracles


def det_cofactor(M):
    # Laplace expansion along the first row; independent of any LU code path.
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    if n == 1:
        return M[0, 0]
    total = 0.0 + 0.0j
    for j in range(n):
        minor = np.delete(np.delete(M, 0, axis=0), j, axis=1)
        total += (-1) ** j * M[0, j] * det_cofactor(minor)
    return total


def lstsq_normal_equations(A, b):
    return np.linalg.solve(A.conj().T @ A, A.conj().T @ b)


# -------------------------------------------------------------- eig_dense


def test_eig_diag():
    d = np.array([2.0, -1.0, 0.5j])
    dec = eig_dense(np.diag(d))
    assert sorted(dec.eigenvalues, key=lambda z: (z.real, z.imag)) == sorted(
        d, key=lambda z: (z.real, z.imag)
    )
    # eigenvectors are coordinate axes up to phase
    for j, nu in enumerate(dec.eigenvalues):
        v = dec.right_vectors[:, j]
        k = int(np.argmax(np.abs(v)))
        assert abs(d[k] - nu) < 1e-14
        assert abs(abs(v[k]) - 1.0) < 1e-12


def test_eig_swap():
    dec = eig_dense(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(sorted(dec.eigenvalues.real), [-1.0, 1.0], atol=1e-14)


def test_eig_companion_cubic():
    # companion matrix of nu^3 - 5 nu (roots 0, +-sqrt(5))
    C = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 5.0, 0.0]])
    got = np.sort_complex(eig_dense(C).eigenvalues)
    want = np.sort_complex(np.array([-np.sqrt(5), 0.0, np.sqrt(5)], dtype=complex))
    assert np.allclose(got, want, atol=1e-12)


def test_eig_residuals_random():
    rng = np.random.default_rng(5)
    for n in (2, 4, 6):
        M = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        dec = eig_dense(M)
        resid = np.linalg.norm(
            M @ dec.right_vectors - dec.right_vectors * dec.eigenvalues, axis=0
        )
        assert resid.max() <= 1e-9 * np.linalg.norm(M, 2)
        assert np.allclose(np.linalg.norm(dec.right_vectors, axis=0), 1.0, atol=1e-12)


def test_eig_rejects_bad_input():
    with pytest.raises(InvalidArgumentError):
        eig_dense(np.ones((2, 3)))
    with pytest.raises(InvalidArgumentError):
        eig_dense(np.array([[np.nan, 0.0], [0.0, 1.0]]))


def test_eig_residual_gate_reachable():
    rng = np.random.default_rng(8)
    M = rng.standard_normal((5, 5))
    with pytest.raises(EigenConvergenceError):
        eig_dense(M, residual_tol=0.0)


# ----------------------------------------------------------------- det_lu


def test_det_identity_and_triangular():
    assert det_lu(np.eye(4)) == pytest.approx(1.0)
    T = np.array([[1.0, 5.0, -2.0], [0.0, 2.0j, 7.0], [0.0, 0.0, -3.0]])
    assert det_lu(T) == pytest.approx(1.0 * 2.0j * -3.0, rel=1e-12)


def test_det_seeded_vs_cofactor():
    rng = np.random.default_rng(1234)
    A3 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    # frozen from the cofactor oracle
    assert det_cofactor(A3) == pytest.approx(3.196301399255157 + 3.2984337822215486j)
    assert det_lu(A3) == pytest.approx(3.196301399255157 + 3.2984337822215486j, rel=1e-12)


def test_det_multiplicative():
    rng = np.random.default_rng(99)
    for _ in range(6):
        A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        B = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        assert det_lu(A @ B) == pytest.approx(det_lu(A) * det_lu(B), rel=1e-10)


def test_det_permutation_parity():
    P = np.eye(4)[[1, 0, 2, 3]]  # one swap
    assert det_lu(P) == pytest.approx(-1.0, rel=1e-14)
    P = np.eye(4)[[1, 2, 0, 3]]  # 3-cycle, even
    assert det_lu(P) == pytest.approx(1.0, rel=1e-14)


def test_det_singular_is_zero():
    A = np.ones((3, 3))
    assert det_lu(A) == 0.0


# ------------------------------------------------------------------ lstsq


def test_lstsq_orthonormal_square():
    rng = np.random.default_rng(3)
    Q, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    B = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    assert np.allclose(lstsq(Q, B), Q.conj().T @ B, atol=1e-12)


def test_lstsq_tall_identity_block():
    A = np.eye(5)[:, :3]
    b = np.arange(5.0)
    assert np.allclose(lstsq(A, b), b[:3], atol=1e-14)


def test_lstsq_seeded_vs_normal_equations():
    rng = np.random.default_rng(77)
    A = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    b = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    got = lstsq(A, b)
    assert np.allclose(got, lstsq_normal_equations(A, b), atol=1e-10)
    # frozen from the normal-equations oracle
    assert got[0] == pytest.approx(0.7627984971520856 - 0.17859538102175276j)
    assert got[1] == pytest.approx(0.4802271441596324 + 0.8617905338888682j)


def test_lstsq_rank_deficient():
    A = np.array([[1.0, 1.0], [1.0, 1.0], [1.0, 1.0]])
    with pytest.raises(RankDeficientError) as err:
        lstsq(A, np.ones(3))
    assert err.value.index == 1
    assert err.value.direction is not None
    # the collapsed direction is (1,-1)/sqrt(2) up to phase
    d = err.value.direction
    assert abs(abs(d @ np.array([1.0, -1.0]) / np.sqrt(2))) == pytest.approx(1.0, abs=1e-10)


# -------------------------------------------------------------- cheb_grid


def test_cheb_nodes_monotone_endpoints():
    g = cheb_grid(8, 0.0, 10.0)
    assert g.nodes[0] == pytest.approx(0.0, abs=1e-14)
    assert g.nodes[-1] == pytest.approx(10.0, abs=1e-14)
    assert np.all(np.diff(g.nodes) > 0)
    assert g.diff_matrix.shape == (9, 9)


def test_cheb_annihilates_constants():
    g = cheb_grid(16, -2.0, 5.0)
    assert np.abs(g.diff_matrix.sum(axis=1)).max() < 1e-12


def test_cheb_differentiates_square():
    g = cheb_grid(5, 0.0, 1.0)
    got = g.diff_matrix @ g.nodes**2
    assert np.allclose(got, 2.0 * g.nodes, atol=1e-12)


@pytest.mark.parametrize("N", [2, 5, 9, 16, 32])
def test_cheb_exact_on_monomials(N):
    g = cheb_grid(N, -1.0, 2.0)
    for p in range(N + 1):
        got = g.diff_matrix @ g.nodes**p
        want = p * g.nodes ** (p - 1) if p > 0 else np.zeros_like(g.nodes)
        scale = max(np.abs(want).max(), 1.0)
        assert np.abs(got - want).max() <= 1e-9 * scale


def test_cheb_sin_derivative():
    g = cheb_grid(30, 0.0, 1.0)
    err = np.abs(g.diff_matrix @ np.sin(g.nodes) - np.cos(g.nodes)).max()
    assert err <= 1e-10


def test_cheb_rejects_bad_args():
    with pytest.raises(InvalidArgumentError):
        cheb_grid(1, 0.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        cheb_grid(4, 1.0, 1.0)
