"""Perturbation bounds for projected eigenproblems with noisy guess vectors.

Setting: V = B + N where the columns of B lie in a spectral subspace of a
hermitian H and N is orthogonal to it.  Only V is available.  The bounds
here are calculators over scalar inputs (Gram eigenvalues, noise
estimates, spectral-measure tails) plus the dimension detection and
guess-space refinement steps that make the Gram well conditioned.

Eigenvalue indices are 1-based and eigenvalues are in descending order,
so lambda_1 is the largest.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import CertificationError, DimensioningError, ValidationError
from .gep import Gep, gram_eigh, solve_gep


class IncreaseGuessDimension(DimensioningError):
    """Every Gram eigenvalue is above the noise level: the guess space is too small."""


# ----------------------------------------------------------------------------
# spectral measure

@dataclass(frozen=True)
class SpectralMeasure:
    """Atomic energy measure: masses at locations E."""

    E: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        E = np.asarray(self.E, dtype=float).ravel()
        m = np.asarray(self.mass, dtype=float).ravel()
        if E.shape != m.shape:
            raise ValidationError("locations and masses differ in length")
        if np.any(m < 0):
            raise ValidationError("masses must be non-negative")
        order = np.argsort(E, kind="stable")
        object.__setattr__(self, "E", E[order])
        object.__setattr__(self, "mass", m[order])

    @property
    def atoms(self):
        return list(zip(self.E.tolist(), self.mass.tolist()))

    @property
    def total(self):
        return float(np.sum(self.mass))

    def upper_tail(self, E_b):
        """Mass on [E_b, inf); the endpoint atom counts."""
        return float(np.sum(self.mass[self.E >= E_b]))

    def lower_tail(self, E_a):
        """Mass on (-inf, E_a]."""
        return float(np.sum(self.mass[self.E <= E_a]))

    def integrate(self, a, b, closed=(True, True)):
        lo = self.E >= a if closed[0] else self.E > a
        hi = self.E <= b if closed[1] else self.E < b
        return float(np.sum(self.mass[lo & hi]))

    def upper_moment(self, E_b, ref):
        """sum over E >= E_b of (E - ref) mass."""
        sel = self.E >= E_b
        return float(np.sum((self.E[sel] - ref) * self.mass[sel]))

    def lower_moment(self, E_a, ref):
        """sum over E <= E_a of (E - ref) mass (non-positive when ref >= E_a)."""
        sel = self.E <= E_a
        return float(np.sum((self.E[sel] - ref) * self.mass[sel]))


def spectral_measure_from_model(frequencies, amplitudes, filter_env_at):
    """Atoms at omega_k with mass |a_k|^2 * F_env(omega_k)."""
    w = np.asarray(frequencies, dtype=float).ravel()
    a = np.asarray(amplitudes, dtype=float).ravel()
    if w.shape != a.shape:
        raise ValidationError("frequencies and amplitudes differ in length")
    if np.any(a < 0):
        raise ValidationError("amplitudes |a_k|^2 must be non-negative")
    env = np.array([float(filter_env_at(x)) for x in w])
    return SpectralMeasure(w, a * env)


def spectral_measure_from_vectors(eigvals, eigvecs, V):
    """Measure of guess vectors V against the eigen-decomposition of H."""
    C = np.asarray(eigvecs).conj().T @ np.asarray(V)
    return SpectralMeasure(np.asarray(eigvals, dtype=float), np.sum(np.abs(C) ** 2, axis=1))


# ----------------------------------------------------------------------------
# stability and Weyl-type inequalities

@dataclass(frozen=True)
class DecompositionBound:
    """Interval [lower, upper] containing mu_i(H, V)."""

    i: int
    lower: float
    upper: float
    regime: str

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValidationError("lower bound above upper bound")

    def contains(self, x, rtol=1e-9, atol=1e-12):
        slack = atol + rtol * max(abs(self.lower), abs(self.upper))
        return self.lower - slack <= x <= self.upper + slack

    @property
    def radius(self):
        return 0.5 * (self.upper - self.lower)


def _precision_factor(lam1_noise, lam_m_gram):
    if lam_m_gram <= 0:
        raise ValidationError("lambda_m(V^2) must be positive")
    if lam1_noise < 0:
        raise ValidationError("lambda_1(N^2) must be non-negative")
    return lam1_noise / lam_m_gram


def stability_bound(lam1_noise, lam_m_gram, mu_bounds_noise, mu_i_signal, i=1):
    """|mu_i(V) - mu_i(B)| <= (lam_1(N^2)/lam_m(V^2)) max_j |mu_j(H,N) - mu_i(B)|.

    ``mu_bounds_noise`` = (low, high) enclosing the noise GEP eigenvalues.
    """
    f = _precision_factor(lam1_noise, lam_m_gram)
    lo, hi = mu_bounds_noise
    if lo > hi:
        raise ValidationError("noise eigenvalue bounds reversed")
    r = f * max(abs(lo - mu_i_signal), abs(hi - mu_i_signal))
    return DecompositionBound(i, mu_i_signal - r, mu_i_signal + r, "stability")


def user_friendly_bound(lam1_noise, lam_m_gram, lambda_min, lambda_max, i=1, mu_i=0.0):
    """Radius (lam_1(N^2)/lam_m(V^2)) (lambda_max - lambda_min) for a bounded H.

    The interval is centred on ``mu_i`` (typically the computed mu_i(V)):
    some eigenvalue of H lies within the radius of it.
    """
    f = _precision_factor(lam1_noise, lam_m_gram)
    r = f * (lambda_max - lambda_min)
    return DecompositionBound(i, mu_i - r, mu_i + r, "user_friendly")


def weyl_gep_bound(eigs_B, eigs_N, gram_eigs_V, gram_eigs_N, i, j, l, k):
    """Upper and lower bounds on mu_j(H, V) from the Weyl-type inequalities.

    upper = mu_i(B) + lam_{k+s p}(N^2)/lam_k(V^2) (mu_l(N) - mu_i(B))
    lower = mu_i(B) + lam_{k-s q}(N^2)/lam_k(V^2) (mu_l(N) - mu_i(B))
    with p = j-i-l-m+2, q = -2m+1+i+l-j, s = sgn(mu_l(N) - mu_i(B)).
    A side whose shifted index falls outside 1..m comes back as None; if
    both do an IndexError names the violated constraints.
    """
    B = np.asarray(eigs_B, dtype=float)
    Nn = np.asarray(eigs_N, dtype=float)
    gV = np.asarray(gram_eigs_V, dtype=float)
    gN = np.asarray(gram_eigs_N, dtype=float)
    m = gV.size
    for name, v in (("i", i), ("j", j), ("l", l), ("k", k)):
        if not (1 <= v <= m):
            raise IndexError("index %s=%d outside 1..%d" % (name, v, m))
    if B.size < m or Nn.size < m or gN.size < m:
        raise ValidationError("eigenvalue lists shorter than m=%d" % m)
    if gV[k - 1] <= 0:
        raise ValidationError("lambda_k(V^2) must be positive")
    d = Nn[l - 1] - B[i - 1]
    # s = 0 makes both shifts vanish; +1 gives the same value since d = 0
    s = 1 if d >= 0 else -1
    p = j - i - l - m + 2
    q = -2 * m + 1 + i + l - j
    ku, kl = k + s * p, k - s * q
    upper = B[i - 1] + gN[ku - 1] / gV[k - 1] * d if 1 <= ku <= m else None
    lower = B[i - 1] + gN[kl - 1] / gV[k - 1] * d if 1 <= kl <= m else None
    if upper is None and lower is None:
        raise IndexError(
            "k+sp=%d and k-sq=%d both outside 1..%d (i=%d j=%d l=%d k=%d)" % (ku, kl, m, i, j, l, k)
        )
    return upper, lower


# ----------------------------------------------------------------------------
# integrated inequalities

def is_signal(measure, E_a, E_b, lam_up, lam_down):
    """Signal condition: both tails weighted by 1/lam_{m*} integrate to <= 1.

    ``lam_up(E)`` / ``lam_down(E)`` return the smallest nonzero eigenvalue of
    the Gram of the guess vectors cut to energies below / above E.
    """
    up = sum(m / lam_up(E) for E, m in measure.atoms if E >= E_b and m > 0)
    lo = sum(m / lam_down(E) for E, m in measure.atoms if E <= E_a and m > 0)
    return bool(up <= 1.0 and lo <= 1.0)


def certifiability_ratios(measure, E_a, E_b, lam_m, lam1_low, lam1_high):
    du, dl = lam_m - lam1_high, lam_m - lam1_low
    ru = measure.upper_tail(E_b) / du if du > 0 else math.inf
    rl = measure.lower_tail(E_a) / dl if dl > 0 else math.inf
    return ru, rl


def is_certifiable(measure, E_a, E_b, lam_m, lam1_low, lam1_high):
    ru, rl = certifiability_ratios(measure, E_a, E_b, lam_m, lam1_low, lam1_high)
    return bool(0 <= ru <= 1 and 0 <= rl <= 1)


def certifiable_by_noise_level(lam_m, lam1_noise, m):
    """Sufficient condition lam_m(V^2) >= (m + 1) lam_1(N^2)."""
    return bool(lam_m >= (m + 1) * lam1_noise)


def integrated_bound(measure, lam_m_gram, lam1_tail_low, lam1_tail_high, mu_i_signal,
                     E_a, E_b, i=1):
    """mu_i(V) - mu_i(B) between the denominator-scaled lower and upper tail moments."""
    if not is_certifiable(measure, E_a, E_b, lam_m_gram, lam1_tail_low, lam1_tail_high):
        ru, rl = certifiability_ratios(measure, E_a, E_b, lam_m_gram, lam1_tail_low,
                                       lam1_tail_high)
        raise CertificationError(
            "not certifiable: tail ratios upper=%.3g lower=%.3g must be in [0, 1]" % (ru, rl)
        )
    up = measure.upper_moment(E_b, mu_i_signal) / (lam_m_gram - lam1_tail_high)
    lo = measure.lower_moment(E_a, mu_i_signal) / (lam_m_gram - lam1_tail_low)
    return DecompositionBound(i, mu_i_signal + lo, mu_i_signal + up, "integrated")


# ----------------------------------------------------------------------------
# dimension detection and refinement

def detect_dimension(gram_eigs, epsilon_M):
    """Number of Gram eigenvalues at or above the noise level epsilon_M."""
    w = np.asarray(gram_eigs, dtype=float)
    if w.size and np.any(np.diff(w) > 1e-14 * max(1.0, abs(w[0]))):
        raise ValidationError("gram eigenvalues must be sorted descending")
    m = int(np.count_nonzero(w >= epsilon_M))
    if w.size and m == w.size:
        raise IncreaseGuessDimension(
            "all %d Gram eigenvalues exceed epsilon_M=%.3e; increase M" % (w.size, epsilon_M)
        )
    return m


@dataclass(frozen=True)
class Refinement:
    gep: Gep
    conditioning: float  # lambda_{m_detect}(V^2)
    m_detect: int
    rotation: np.ndarray  # M x m_detect leading Gram eigenvectors
    mu: np.ndarray  # eigenvalues of the refined problem, descending
    x: np.ndarray  # eigenvectors of the refined problem (Lambda-orthonormal)


def refine_guess_space(gep, epsilon_M):
    """Rotate onto the leading Gram eigenvectors and drop the epsilon-nullspace."""
    w, U = gram_eigh(gep.gram)
    m = detect_dimension(w, epsilon_M)
    if m == 0:
        raise DimensioningError("no Gram eigenvalue above epsilon_M=%.3e" % epsilon_M)
    Um = U[:, :m]
    H = Um.conj().T @ gep.h_v @ Um
    H = 0.5 * (H + H.conj().T)
    lam = w[:m]
    refined = Gep(H, np.diag(lam).astype(complex), check=False)
    s = np.sqrt(lam)
    A = H / s[:, None] / s[None, :]
    mu, Y = np.linalg.eigh(0.5 * (A + A.conj().T))
    order = np.argsort(-mu, kind="stable")
    mu, Y = mu[order], Y[:, order]
    x = Y / s[:, None]
    return Refinement(refined, float(lam[-1]), m, Um, mu, x)


# ----------------------------------------------------------------------------
# monotonicity over energy cutoffs

@dataclass(frozen=True)
class MonotonicityReport:
    gram_monotone: bool
    mu_monotone: bool
    weyl_gap_ok: bool
    violations: list


def _cut_gram(C, sel):
    Cs = C[sel]
    return Cs.conj().T @ Cs


def monotonicity_check(eigvals, coeffs, cutoffs, rtol=1e-10):
    """Check the cumulative Gram and GEP eigenvalues grow with the energy cutoff.

    ``coeffs`` holds the guess vectors in the eigenbasis of H (rows match
    ``eigvals``); V(E) keeps the rows with eigenvalue <= E.
    """
    E = np.asarray(eigvals, dtype=float)
    C = np.asarray(coeffs, dtype=complex)
    cuts = sorted(float(x) for x in cutoffs)
    M = C.shape[1]
    grams, mus = [], []
    for e in cuts:
        sel = E <= e
        G = _cut_gram(C, sel)
        grams.append(np.sort(np.linalg.eigvalsh(G))[::-1] if M else np.zeros(0))
        if np.any(sel):
            Hc = C[sel].conj().T @ (E[sel, None] * C[sel])
            try:
                sol = solve_gep(Gep(0.5 * (Hc + Hc.conj().T), 0.5 * (G + G.conj().T), check=False))
                mus.append(sol.proper)
            except DimensioningError:
                mus.append(np.zeros(0))
        else:
            mus.append(np.zeros(0))
    viol = []
    g_ok = mu_ok = w_ok = True
    scale = max(1.0, float(np.max(np.abs(E))) if E.size else 1.0)
    for a in range(len(cuts) - 1):
        g1, g2 = grams[a], grams[a + 1]
        gs = max(1.0, float(g2[0]) if g2.size else 1.0)
        if np.any(g2 < g1 - rtol * gs):
            g_ok = False
            viol.append(("gram", cuts[a], cuts[a + 1]))
        sl = (E > cuts[a]) & (E <= cuts[a + 1])
        lm = np.linalg.eigvalsh(_cut_gram(C, sl)).min() if M else 0.0
        if np.any(g2 - g1 < lm - rtol * gs):
            w_ok = False
            viol.append(("weyl", cuts[a], cuts[a + 1]))
        r = min(mus[a].size, mus[a + 1].size)
        if r and np.any(mus[a + 1][:r] < mus[a][:r] - rtol * scale):
            mu_ok = False
            viol.append(("mu", cuts[a], cuts[a + 1]))
    return MonotonicityReport(g_ok, mu_ok, w_ok, viol)
