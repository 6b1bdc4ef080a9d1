"""Nyquist-grid sampling: Shannon series, truncated prolate sampling and
their error bounds.

Samples always sit at t_k = k pi / W.  The Shannon kernel is
rho_W(t) = sin(W t) / (pi t), so (pi / W) rho_W(t - t_k) = sinc(W t/pi - k).
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensioningError, ValidationError
from .bounds import prefactors
from .pswf import eval_xi


@dataclass(frozen=True)
class SampleGrid:
    """Samples f(k pi / W) for k = k_min .. k_max."""

    W: float
    k_min: int
    k_max: int
    values: np.ndarray

    def __post_init__(self):
        if not (self.W > 0):
            raise ValidationError("W must be positive")
        vals = np.asarray(self.values, dtype=complex)
        if vals.ndim != 1 or vals.size != self.k_max - self.k_min + 1:
            raise ValidationError("values must have one entry per index in k_range")
        object.__setattr__(self, "values", vals)

    @property
    def k(self):
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def times(self):
        return self.k * (math.pi / self.W)

    @property
    def spacing(self):
        return math.pi / self.W

    @classmethod
    def from_function(cls, f, W, K):
        """Sample callable f on k = -K .. K."""
        k = np.arange(-K, K + 1)
        return cls(W=W, k_min=-K, k_max=K, values=np.asarray(f(k * math.pi / W), dtype=complex))

    def restrict(self, kmax):
        if kmax > min(-self.k_min, self.k_max):
            raise DimensioningError("grid does not cover |k| <= %d" % kmax)
        lo = -kmax - self.k_min
        return SampleGrid(self.W, -kmax, kmax, self.values[lo:lo + 2 * kmax + 1])


def _shannon_weights(W, k, t):
    u = W * np.asarray(t, dtype=float)[..., None] / math.pi - k
    wts = np.sinc(u)
    # exact interpolation at nodes: np.sinc leaves ~1e-17 at nonzero integers
    on_node = u == np.round(u)
    wts = np.where(on_node, (u == 0).astype(float), wts)
    return wts


def shannon_interpolate(grid, t):
    """Truncated Whittaker-Shannon series at t (scalar or array)."""
    if grid.values.size == 0:
        raise ValidationError("empty grid")
    arr = np.asarray(t, dtype=float)
    out = _shannon_weights(grid.W, grid.k, arr) @ grid.values
    return complex(out) if arr.ndim == 0 else out


def parseval_energy(grid):
    """(pi / W) sum |f(k pi/W)|^2, the sampled form of ||f||^2 on the real line."""
    return float(grid.spacing * np.sum(np.abs(grid.values) ** 2))


def interior_index(basis):
    """Largest k with k pi / W <= T."""
    return int(math.floor(basis.T * basis.W / math.pi + 1e-12))


def prolate_coefficients(basis, grid, N):
    """(pi / W) sum_{|k| <= [TW/pi]} f(t_k) xi_n(t_k) for n < N."""
    if N > basis.count:
        raise DimensioningError("N=%d exceeds basis of %d" % (N, basis.count))
    if abs(grid.W - basis.W) > 1e-14 * basis.W:
        raise ValidationError("grid bandwidth differs from basis bandwidth")
    kc = interior_index(basis)
    sub = grid.restrict(kc)
    tk = sub.times
    X = np.array([eval_xi(basis, n, tk) for n in range(N)])
    return sub.spacing * (X @ sub.values)


def prolate_sampling_truncated(basis, grid, N, t):
    """f_{N,c}(t) built from the 2[TW/pi] + 1 central samples only."""
    a = prolate_coefficients(basis, grid, N)
    arr = np.asarray(t, dtype=float)
    if N == 0:
        return np.zeros(arr.shape, dtype=complex) if arr.ndim else 0j
    X = np.array([eval_xi(basis, n, arr.ravel()) for n in range(N)])
    out = (a @ X).reshape(arr.shape)
    return complex(out) if arr.ndim == 0 else out


@dataclass(frozen=True)
class DiscreteOrthogonality:
    res_kl: float
    res_nm: float
    tail_kl: float
    tail_nm: float
    k_interior: int
    K: int

    def __iter__(self):
        yield self.res_kl
        yield self.res_nm


def discrete_orthogonality_residual(basis, K, nm_count=None):
    """Deviation of the two discrete orthogonality sums from (W/pi) delta.

    The n-sum runs over the whole basis at interior nodes |k|, |l| <= [TW/pi];
    the k-sum runs over |k| <= K for n, m < nm_count (default: the prolates
    with gamma > 1/2).  Each comes with an a-posteriori tail estimate from
    the last retained terms.
    """
    W = basis.W
    ref = W / math.pi
    kc = interior_index(basis)
    ti = np.arange(-kc, kc + 1) * (math.pi / W)
    Xi = np.array([eval_xi(basis, n, ti) for n in range(basis.count)])
    G = Xi.T @ Xi
    res_kl = float(np.max(np.abs(G - ref * np.eye(G.shape[0]))) / ref)
    tail_kl = float(np.max(Xi[-1] ** 2) / ref)

    if nm_count is None:
        nm_count = max(1, int(np.count_nonzero(basis.gamma > 0.5)))
    K = int(K)
    if K < kc:
        raise DimensioningError("K must reach the interior index %d" % kc)
    tk = np.arange(-K, K + 1) * (math.pi / W)
    Xk = np.array([eval_xi(basis, n, tk) for n in range(nm_count)])
    Gk = Xk @ Xk.T
    res_nm = float(np.max(np.abs(Gk - ref * np.eye(nm_count))) / ref)
    # terms decay like 1/k^2, so the tail past K is about K times the last term
    last = np.abs(Xk[:, [0, -1]])
    tail_nm = float(2 * K * np.max(last) ** 2 / ref)
    return DiscreteOrthogonality(res_kl, res_nm, tail_kl, tail_nm, kc, K)


def tail_sample_bound(f_out_energy, fprime_out_energy):
    """E + 2 sqrt(E E') bound on the sample energy outside the window."""
    if f_out_energy < 0 or fprime_out_energy < 0:
        raise ValidationError("energies must be non-negative")
    return f_out_energy + 2.0 * math.sqrt(f_out_energy * fprime_out_energy)


def sampling_prefactor(basis, n):
    """C_n = 1 + 2 C_extra,n, the per-prolate tail factor (see tail_sample_bound)."""
    return 1.0 + 2.0 * prefactors(basis, n)["c_extra"]


def _weighted_sum(basis, N):
    return sum(
        basis.gamma[n] * basis.one_minus_gamma[n] * sampling_prefactor(basis, n)
        for n in range(N)
    )


def truncation_error_bound(basis, f_out_energy, fprime_out_energy, tail_coeff_energy, N):
    """Bound on ||f - f_{N,c}||^2 over [-T, T].

    (pi/W) * tail_sample_bound * sum_{n<N} gamma_n (1-gamma_n) C_n
    + sum_{n>=N} gamma_n |a_n|^2 (the latter supplied by the caller).
    """
    if N > basis.count:
        raise DimensioningError("N=%d exceeds basis of %d" % (N, basis.count))
    if tail_coeff_energy < 0:
        raise ValidationError("tail coefficient energy must be non-negative")
    tail = tail_sample_bound(f_out_energy, fprime_out_energy)
    return (math.pi / basis.W) * tail * _weighted_sum(basis, N) + tail_coeff_energy


def span_truncation_bound(basis, N, f_norm):
    """Closed form for f in span{xi_0..xi_{N-1}} reconstructed with N+1 prolates:

    (pi ||f|| / W) (1 - gamma_N) C_N sum_{n<=N} gamma_n (1 - gamma_n) C_n.
    """
    if N + 1 > basis.count:
        raise DimensioningError("need %d prolates, basis has %d" % (N + 1, basis.count))
    return (math.pi * f_norm / basis.W) * basis.one_minus_gamma[N] * \
        sampling_prefactor(basis, N) * _weighted_sum(basis, N + 1)
