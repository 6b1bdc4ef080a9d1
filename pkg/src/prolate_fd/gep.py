"""Hermitian generalized eigenvalue problems  H_V x = mu V^2 x.

H_V = V^dagger H V and V^2 = V^dagger V.  The solver is the constructive
route: diagonalize the Gram matrix, drop its numerical kernel, whiten the
remaining block and diagonalize the whitened H_V.
"""
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DimensioningError, ValidationError

HERMITIAN_RTOL = 1e-12
PSD_RTOL = 1e-12


class _Spurious:
    """Marker returned by :func:`rayleigh` for vectors in the Gram kernel."""

    def __repr__(self):
        return "SPURIOUS"

    def __bool__(self):
        return False


SPURIOUS = _Spurious()


def _herm_defect(A):
    scale = max(np.max(np.abs(A)), np.finfo(float).tiny)
    return np.max(np.abs(A - A.conj().T)) / scale


@dataclass(frozen=True)
class Gep:
    """Left matrix ``h_v`` and Gram matrix ``gram``, both M x M hermitian."""

    h_v: np.ndarray
    gram: np.ndarray
    check: bool = True

    def __post_init__(self):
        h = np.array(self.h_v, dtype=complex)
        g = np.array(self.gram, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape != g.shape:
            raise ValidationError("h_v and gram must be square and of equal size")
        if self.check and h.size:
            if _herm_defect(h) > HERMITIAN_RTOL:
                raise ValidationError("h_v is not hermitian (defect %.2e)" % _herm_defect(h))
            if _herm_defect(g) > HERMITIAN_RTOL:
                raise ValidationError("gram is not hermitian (defect %.2e)" % _herm_defect(g))
            w = linalg.eigvalsh(0.5 * (g + g.conj().T))
            if w[0] < -PSD_RTOL * max(abs(w[-1]), np.finfo(float).tiny):
                raise ValidationError("gram is not positive semidefinite (min eig %.3e)" % w[0])
        h.flags.writeable = False
        g.flags.writeable = False
        object.__setattr__(self, "h_v", h)
        object.__setattr__(self, "gram", g)

    @property
    def M(self):
        return self.h_v.shape[0]

    @classmethod
    def from_vectors(cls, H, V):
        """Assemble (V^dagger H V, V^dagger V) from an operator and guess vectors."""
        V = np.asarray(V, dtype=complex)
        if V.ndim == 1:
            V = V[:, None]
        hv = V.conj().T @ np.asarray(H) @ V
        g = V.conj().T @ V
        return cls(0.5 * (hv + hv.conj().T), 0.5 * (g + g.conj().T))


@dataclass(frozen=True)
class GepSolution:
    mu: np.ndarray  # length M: proper eigenvalues descending, then zeros
    phi: np.ndarray  # M x m, gram-orthonormal
    rank: int
    gram_eigs: np.ndarray  # descending
    kernel_tol: float

    @property
    def proper(self):
        return self.mu[: self.rank]


def default_kernel_tol(gram_eigs_desc, M):
    top = max(float(gram_eigs_desc[0]), 0.0) if len(gram_eigs_desc) else 0.0
    return M * np.finfo(float).eps * top


def gram_eigh(gram):
    """Gram eigenpairs in descending order."""
    w, U = linalg.eigh(gram)
    return w[::-1], U[:, ::-1]


def _descending(values):
    # stable sort keeps ascending eigenvector index among ties
    order = np.argsort(-values, kind="stable")
    return order


def solve_gep(gep, kernel_tol=None):
    w, U = gram_eigh(gep.gram)
    tol = default_kernel_tol(w, gep.M) if kernel_tol is None else float(kernel_tol)
    if tol < 0:
        raise ValidationError("kernel_tol must be non-negative")
    keep = w > tol
    m = int(np.count_nonzero(keep))
    if m == 0:
        raise DimensioningError("gram has no eigenvalue above kernel_tol=%.3e" % tol)
    Y = U[:, keep] / np.sqrt(w[keep])
    A = Y.conj().T @ gep.h_v @ Y
    A = 0.5 * (A + A.conj().T)
    mu, X = linalg.eigh(A)
    order = _descending(mu)
    mu = mu[order]
    phi = Y @ X[:, order]
    full = np.zeros(gep.M)
    full[:m] = mu
    return GepSolution(mu=full, phi=phi, rank=m, gram_eigs=w, kernel_tol=tol)


def rayleigh(gep, x, kernel_tol=None):
    """<x, H_V x> / <x, V^2 x>, or SPURIOUS when x lies in the Gram kernel."""
    x = np.asarray(x, dtype=complex).ravel()
    if x.size != gep.M:
        raise ValidationError("vector length %d does not match M=%d" % (x.size, gep.M))
    den = np.vdot(x, gep.gram @ x).real
    if kernel_tol is None:
        w = linalg.eigvalsh(gep.gram)
        kernel_tol = default_kernel_tol(w[::-1], gep.M)
    if den <= kernel_tol * np.vdot(x, x).real:
        return SPURIOUS
    return float(np.vdot(x, gep.h_v @ x).real / den)


def spectral_range_check(gep, lambda_min, lambda_max, kernel_tol=None, rtol=1e-10):
    """True iff every proper eigenvalue lies in [lambda_min, lambda_max]."""
    sol = solve_gep(gep, kernel_tol)
    slack = rtol * max(1.0, abs(lambda_min), abs(lambda_max))
    mu = sol.proper
    return bool(np.all(mu >= lambda_min - slack) and np.all(mu <= lambda_max + slack))


def coincidence_check(gep, target_eigs, kernel_tol=None):
    """max |mu_i - lambda_i| matching both lists in descending order."""
    sol = solve_gep(gep, kernel_tol)
    t = np.sort(np.asarray(target_eigs, dtype=float))[::-1]
    if sol.rank != t.size:
        raise ValidationError("GEP rank %d does not match %d target eigenvalues" % (sol.rank, t.size))
    return float(np.max(np.abs(sol.proper - t)))


def unitarity_defect(gep, sol):
    """max |Phi^dagger V^2 Phi - I|."""
    G = sol.phi.conj().T @ gep.gram @ sol.phi
    return float(np.max(np.abs(G - np.eye(sol.rank))))


def eigen_residual(gep, sol):
    """max |H_V Phi - V^2 Phi diag(mu)| relative to ||H_V||."""
    R = gep.h_v @ sol.phi - gep.gram @ sol.phi * sol.proper[None, :]
    scale = max(np.linalg.norm(gep.h_v, 2), np.finfo(float).tiny)
    return float(np.max(np.abs(R)) / scale)


def minmax_dominance(gep, k, rng, samples=200, kernel_tol=None):
    """Largest min-Rayleigh value over ``samples`` random k-dim subspaces.

    By the min-max characterization this never exceeds mu_k; returns
    (sampled_max, mu_k).
    """
    sol = solve_gep(gep, kernel_tol)
    if not (1 <= k <= sol.rank):
        raise ValidationError("k must be in 1..rank")
    best = -np.inf
    M = gep.M
    for _ in range(samples):
        X = rng.normal(size=(M, k)) + 1j * rng.normal(size=(M, k))
        sub = Gep(X.conj().T @ gep.h_v @ X, X.conj().T @ gep.gram @ X, check=False)
        sub = Gep(0.5 * (sub.h_v + sub.h_v.conj().T), 0.5 * (sub.gram + sub.gram.conj().T),
                  check=False)
        try:
            s = solve_gep(sub, kernel_tol=0.0 if kernel_tol is None else kernel_tol)
        except DimensioningError:
            continue
        if s.rank == k:
            best = max(best, s.proper[-1])
    return float(best), float(sol.proper[k - 1])
