import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from prolate_fd.errors import DimensioningError, ValidationError
from prolate_fd.gep import (
    SPURIOUS, Gep, coincidence_check, eigen_residual, minmax_dominance, rayleigh,
    solve_gep, spectral_range_check, unitarity_defect,
)
from prolate_fd.verify import toy_gep


def random_hermitian(rng, n):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (X + X.conj().T)


def test_toy_problem():
    mu = solve_gep(toy_gep()).proper
    assert np.allclose(mu, [math.sqrt(2 / 3), -math.sqrt(2 / 3)], atol=1e-14)


def test_matches_qz_oracle():
    rng = np.random.default_rng(1)
    for _ in range(10):
        n, M = 9, 4
        H = random_hermitian(rng, n)
        V = rng.normal(size=(n, M)) + 1j * rng.normal(size=(n, M))
        g = Gep.from_vectors(H, V)
        ref = np.sort(linalg.eigvals(g.h_v, g.gram).real)[::-1]
        sol = solve_gep(g)
        assert sol.rank == M
        assert np.allclose(sol.proper, ref, rtol=1e-9, atol=1e-10)
        assert unitarity_defect(g, sol) < 1e-10
        assert eigen_residual(g, sol) < 1e-10


def test_rank_deficient_guess_space():
    rng = np.random.default_rng(2)
    H = random_hermitian(rng, 8)
    V = rng.normal(size=(8, 2)) + 0j
    V = np.hstack([V, V[:, :1] + V[:, 1:]])  # third column dependent
    g = Gep.from_vectors(H, V)
    sol = solve_gep(g, kernel_tol=1e-10)
    assert sol.rank == 2
    assert np.all(sol.mu[2:] == 0)
    # the kernel direction is spurious for the Rayleigh quotient
    assert rayleigh(g, [1, 1, -1], kernel_tol=1e-10) is SPURIOUS
    assert not SPURIOUS
    assert repr(SPURIOUS) == "SPURIOUS"


def test_rayleigh_of_eigenvector():
    g = toy_gep()
    sol = solve_gep(g)
    assert rayleigh(g, sol.phi[:, 0]) == pytest.approx(sol.proper[0], abs=1e-14)
    with pytest.raises(ValidationError):
        rayleigh(g, [1, 2, 3])


def test_spectral_range_and_coincidence():
    rng = np.random.default_rng(3)
    E = np.linspace(-2, 3, 7)
    Q = linalg.qr(rng.normal(size=(7, 7)))[0]
    H = (Q * E) @ Q.T
    V = rng.normal(size=(7, 3))
    g = Gep.from_vectors(H, V)
    assert spectral_range_check(g, -2, 3)
    assert not spectral_range_check(g, 0.5, 3) or solve_gep(g).proper.min() >= 0.5
    # guess vectors spanning an invariant subspace reproduce its eigenvalues
    g2 = Gep.from_vectors(H, Q[:, [1, 4, 6]] @ rng.normal(size=(3, 3)))
    assert coincidence_check(g2, E[[1, 4, 6]]) < 1e-12
    with pytest.raises(ValidationError):
        coincidence_check(g2, E[:2])


def test_minmax_dominance():
    rng = np.random.default_rng(4)
    H = random_hermitian(rng, 8)
    g = Gep.from_vectors(H, rng.normal(size=(8, 5)))
    for k in (1, 3, 5):
        sampled, mu_k = minmax_dominance(g, k, rng, samples=100)
        assert sampled <= mu_k + 1e-10
    with pytest.raises(ValidationError):
        minmax_dominance(g, 6, rng)


def test_validation():
    with pytest.raises(ValidationError):
        Gep(np.eye(2), np.eye(3))
    with pytest.raises(ValidationError):
        Gep(np.array([[0, 1], [0, 0]]), np.eye(2))
    with pytest.raises(ValidationError):
        Gep(np.eye(2), np.diag([1.0, -1.0]))
    with pytest.raises(DimensioningError):
        solve_gep(Gep(np.eye(2), np.zeros((2, 2))))
    with pytest.raises(ValidationError):
        solve_gep(toy_gep(), kernel_tol=-1)


def test_matrices_are_frozen():
    g = toy_gep()
    with pytest.raises(ValueError):
        g.gram[0, 0] = 5


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 31), n=st.integers(3, 10), M=st.integers(1, 3))
def test_eigenvalues_inside_operator_range(seed, n, M):
    rng = np.random.default_rng(seed)
    H = random_hermitian(rng, n)
    V = rng.normal(size=(n, M)) + 1j * rng.normal(size=(n, M))
    g = Gep.from_vectors(H, V)
    E = linalg.eigvalsh(H)
    mu = solve_gep(g).proper
    slack = 1e-9 * max(1.0, np.max(np.abs(E)))
    assert np.all(mu <= E[-1] + slack) and np.all(mu >= E[0] - slack)
    # Cauchy interlacing for the projected problem
    assert np.all(mu <= E[::-1][: mu.size] + slack)
