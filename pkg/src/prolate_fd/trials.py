"""Seeded construct-and-solve trials for the perturbation inequalities.

Each instance draws a random hermitian H, picks a contiguous block of its
eigenvectors as the signal subspace, mixes them into B and adds noise N
built from the orthogonal complement.  The exact GEP eigenvalues of
(H, V = B + N), (H, B) and (H, N) are then compared against each bound.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import CertificationError, DimensioningError
from .gep import Gep, solve_gep
from . import spectral as sb

FAMILIES = ("stability", "user_friendly", "weyl", "integrated", "detect")


@dataclass
class Instance:
    E: np.ndarray  # eigenvalues of H, ascending
    Phi: np.ndarray
    idx: np.ndarray  # signal eigen-indices (into E)
    B: np.ndarray
    N: np.ndarray

    @property
    def V(self):
        return self.B + self.N

    @property
    def H(self):
        return (self.Phi * self.E) @ self.Phi.conj().T


def random_instance(rng, n_range=(6, 12), m_max=4, noise_decades=(-3.0, 0.5),
                    M=None, interior=False):
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(1, min(m_max, n // 2) + 1))
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    E, Phi = np.linalg.eigh(0.5 * (X + X.conj().T))
    lo = 1 if interior and n - m > 1 else 0
    hi = n - m - 1 if interior and n - m > 1 else n - m
    start = int(rng.integers(lo, hi + 1))
    idx = np.arange(start, start + m)
    rest = np.setdiff1d(np.arange(n), idx)
    cols = m if M is None else M
    B = Phi[:, idx] @ (rng.normal(size=(m, cols)) + 1j * rng.normal(size=(m, cols)))
    scale = 10 ** rng.uniform(*noise_decades)
    N = Phi[:, rest] @ (rng.normal(size=(rest.size, cols)) + 1j * rng.normal(size=(rest.size, cols)))
    return Instance(E, Phi, idx, B, N * scale)


def _mu(H, V):
    return solve_gep(Gep.from_vectors(H, V), kernel_tol=1e-12 * max(
        1.0, float(np.linalg.norm(V) ** 2))).proper


def _desc_eigs(G):
    return np.sort(np.linalg.eigvalsh(G))[::-1]


@dataclass
class TrialReport:
    family: str
    trials: int
    checks: int = 0
    violations: int = 0
    skipped: int = 0
    worst_excess: float = 0.0
    details: list = field(default_factory=list)

    def ok(self):
        return self.violations == 0

    def to_dict(self):
        return {
            "family": self.family, "trials": self.trials, "checks": self.checks,
            "violations": self.violations, "skipped": self.skipped,
            "worst_excess": self.worst_excess, "details": self.details[:20],
        }


def _flag(rep, excess, info):
    rep.checks += 1
    if excess > 0:
        rep.violations += 1
        rep.worst_excess = max(rep.worst_excess, float(excess))
        rep.details.append(info)


def _tol(*vals):
    return 1e-9 * (1.0 + max(abs(v) for v in vals))


def run_family(family, trials, seed):
    """Run ``trials`` instances of one inequality family; counts violations."""
    if family not in FAMILIES:
        raise ValueError("unknown family %r" % family)
    rng = np.random.default_rng(seed)
    rep = TrialReport(family, trials)
    done = 0
    attempts = 0
    while done < trials:
        attempts += 1
        if attempts > 50 * trials:
            break
        if family == "integrated":
            inst = random_instance(rng, noise_decades=(-3.0, 0.0), interior=True)
            if not _integrated_trial(inst, rep):
                rep.skipped += 1
                continue
        elif family == "detect":
            _detect_trial(rng, rep)
        else:
            inst = random_instance(rng)
            _inequality_trial(family, inst, rep)
        done += 1
    rep.trials = done
    return rep


def _inequality_trial(family, inst, rep):
    H, V, B, N = inst.H, inst.V, inst.B, inst.N
    m = B.shape[1]
    muV, muB, muN = _mu(H, V), _mu(H, B), _mu(H, N)
    gV, gN = _desc_eigs(V.conj().T @ V), _desc_eigs(N.conj().T @ N)
    if family == "stability":
        for i in range(m):
            b = sb.stability_bound(gN[0], gV[-1], (muN.min(), muN.max()), muB[i], i=i + 1)
            t = _tol(b.lower, b.upper)
            _flag(rep, max(b.lower - t - muV[i], muV[i] - b.upper - t), ("stab", i))
    elif family == "user_friendly":
        for i in range(m):
            b = sb.user_friendly_bound(gN[0], gV[-1], inst.E.min(), inst.E.max(), i + 1, muV[i])
            dist = np.min(np.abs(muV[i] - inst.E))
            _flag(rep, dist - b.radius - _tol(b.radius), ("uf", i))
    elif family == "weyl":
        for i in range(1, m + 1):
            for j in range(1, m + 1):
                for l in range(1, m + 1):
                    for k in range(1, m + 1):
                        try:
                            up, lo = sb.weyl_gep_bound(muB, muN, gV, gN, i, j, l, k)
                        except IndexError:
                            continue
                        if up is not None:
                            _flag(rep, muV[j - 1] - up - _tol(up), ("up", i, j, l, k))
                        if lo is not None:
                            _flag(rep, lo - muV[j - 1] - _tol(lo), ("lo", i, j, l, k))


def _integrated_trial(inst, rep):
    E, Phi, idx = inst.E, inst.Phi, inst.idx
    n = E.size
    m = idx.size
    s0, s1 = idx[0], idx[-1]
    E_a = 0.5 * (E[s0 - 1] + E[s0]) if s0 > 0 else E[0] - 1.0
    E_b = 0.5 * (E[s1] + E[s1 + 1]) if s1 + 1 < n else E[-1] + 1.0
    V = inst.V
    C = Phi.conj().T @ V
    meas = sb.SpectralMeasure(E, np.sum(np.abs(C) ** 2, axis=1))
    G = V.conj().T @ V
    gV = _desc_eigs(G)
    up, lo = E >= E_b, E <= E_a
    l1up = _desc_eigs(C[up].conj().T @ C[up])[0] if up.any() else 0.0
    l1lo = _desc_eigs(C[lo].conj().T @ C[lo])[0] if lo.any() else 0.0
    if not sb.is_certifiable(meas, E_a, E_b, gV[-1], l1lo, l1up):
        return False
    H = inst.H
    muV, muB = _mu(H, V), _mu(H, inst.B)
    for i in range(m):
        try:
            b = sb.integrated_bound(meas, gV[-1], l1lo, l1up, muB[i], E_a, E_b, i=i + 1)
        except CertificationError:
            return False
        t = _tol(b.lower, b.upper)
        _flag(rep, max(b.lower - t - muV[i], muV[i] - b.upper - t), ("int", i))
    return True


def _detect_trial(rng, rep):
    m_true = int(rng.integers(1, 4))
    M = m_true + int(rng.integers(1, 4))
    n = int(rng.integers(M + m_true + 1, M + m_true + 8))
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    E, Phi = np.linalg.eigh(0.5 * (X + X.conj().T))
    idx = np.sort(rng.choice(n, m_true, replace=False))
    rest = np.setdiff1d(np.arange(n), idx)
    B = Phi[:, idx] @ (rng.normal(size=(m_true, M)) + 1j * rng.normal(size=(m_true, M)))
    N = Phi[:, rest] @ (rng.normal(size=(rest.size, M)) + 1j * rng.normal(size=(rest.size, M)))
    N = N * 10 ** rng.uniform(-6, 0)
    V = B + N
    gV = _desc_eigs(V.conj().T @ V)
    lam1N = _desc_eigs(N.conj().T @ N)[0]
    eps = lam1N * 10 ** rng.uniform(0, 1)
    try:
        md = sb.detect_dimension(gV, eps)
    except sb.IncreaseGuessDimension:
        md = M
    _flag(rep, md - m_true, ("detect>true", m_true, md))
    if gV[m_true - 1] >= 10 * eps:
        _flag(rep, abs(md - m_true), ("detect!=true", m_true, md))
