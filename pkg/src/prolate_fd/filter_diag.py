"""Prolate filter diagonalization of a finitely observed multi-tone signal.

The signal is C(t) = sum_k |a_k|^2 exp(i w_k t), known on [-2T, 2T].  The
filters are the time-limited prolates f_l = D_T xi_l, whose Fourier profiles
F_l(w) = int f_l exp(-i w t) dt = conj(mu_l) xi~_l(w) are known in closed
form.  Shifting the band to a centre w*, the GEP matrices are

    V^2_sl = sum_k |a_k|^2 conj(F_s(w_k - w*)) F_l(w_k - w*)
    H_sl   = sum_k |a_k|^2 w_k conj(F_s(w_k - w*)) F_l(w_k - w*)

and their time-domain double-integral forms, which only need C(t).
"""
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import linalg
from scipy.interpolate import FloaterHormannInterpolator

from .bounds import prefactors, asymptotic_sup_extra
from .errors import DimensioningError, ValidationError
from .gep import Gep, gram_eigh
from .pswf import eval_xi, eval_xi_deriv, eval_xi_freq, eval_xi_freq_deriv
from .quad import gauss_legendre
from .spectral import IncreaseGuessDimension, detect_dimension

HERMITIAN_WARN = 1e-6
PSD_WARN = 1e-10
INTERP_DEGREE = 10
BAND_SLACK = 1e-12
# the interval theorems hold in exact arithmetic; computed eigenvalues and
# amplitudes carry a rounding floor scaled by the whitened conditioning
ROUNDING_FACTOR = 100 * np.finfo(float).eps


class DataConsistencyWarning(UserWarning):
    """Assembled matrices are further from hermitian/PSD than quadrature allows."""


# ----------------------------------------------------------------------------
# signals

@dataclass(frozen=True)
class DiscreteSignal:
    """Line spectrum: angular frequencies and non-negative weights |a_k|^2."""

    omegas: np.ndarray
    amps: np.ndarray

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.omegas, dtype=float))
        a = np.atleast_1d(np.asarray(self.amps, dtype=float))
        if w.shape != a.shape or w.ndim != 1:
            raise ValidationError("omegas and amps must be 1-d and of equal length")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(a))):
            raise ValidationError("omegas and amps must be finite")
        if np.any(a < 0):
            raise ValidationError("amplitudes |a_k|^2 must be non-negative")
        order = np.argsort(w, kind="stable")
        w, a = w[order], a[order]
        if w.size > 1 and np.any(np.diff(w) <= 0):
            raise ValidationError("frequencies must be distinct")
        object.__setattr__(self, "omegas", w)
        object.__setattr__(self, "amps", a)

    @property
    def size(self):
        return self.omegas.size

    @property
    def C0(self):
        return float(np.sum(self.amps))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * t[..., None] * self.omegas) @ self.amps.astype(complex)

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * t[..., None] * self.omegas) @ (1j * self.omegas * self.amps)

    def synthesize(self, T, dt):
        """Samples on a uniform grid through 0 covering [-2T, 2T]."""
        if not (dt > 0):
            raise ValidationError("dt must be positive")
        if not (T > 0):
            raise ValidationError("T must be positive")
        K = int(math.ceil(2 * T / dt - 1e-9))
        t = np.arange(-K, K + 1) * dt
        return SampledSignal(t, self(t))

    def select(self, lo, hi):
        keep = (self.omegas >= lo) & (self.omegas <= hi)
        return DiscreteSignal(self.omegas[keep], self.amps[keep])


@dataclass(frozen=True)
class SampledSignal:
    """Samples C(t_j) on sorted times; derivative samples are optional."""

    times: np.ndarray
    values: np.ndarray
    derivative: np.ndarray = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValidationError("times and values must be 1-d and of equal length")
        if t.size < 2 or np.any(np.diff(t) <= 0):
            raise ValidationError("times must be strictly increasing (at least two)")
        if not np.all(np.isfinite(v)):
            raise ValidationError("signal values must be finite")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if self.derivative is not None:
            d = np.asarray(self.derivative, dtype=complex)
            if d.shape != t.shape:
                raise ValidationError("derivative samples must match times")
            object.__setattr__(self, "derivative", d)
        object.__setattr__(self, "_interp", None)

    @property
    def derivative_available(self):
        return self.derivative is not None

    def covers(self, T):
        tol = 1e-12 * max(1.0, T)
        return self.times[0] <= -2 * T + tol and self.times[-1] >= 2 * T - tol

    def interpolate(self, t):
        """Barycentric rational (Floater-Hormann) interpolation of C."""
        f = self._interp
        if f is None:
            d = min(INTERP_DEGREE, self.times.size - 1)
            f = FloaterHormannInterpolator(self.times, self.values, d=d)
            object.__setattr__(self, "_interp", f)
        t = np.asarray(t, dtype=float)
        lo, hi = self.times[0], self.times[-1]
        return f(np.clip(t, lo, hi))

    def value_at_zero(self):
        """(C(0), measured) where measured is False if 0 is not a sample time."""
        j = np.flatnonzero(self.times == 0.0)
        if j.size:
            return complex(self.values[j[0]]), True
        return complex(self.interpolate(np.array([0.0]))[0]), False


# ----------------------------------------------------------------------------
# filters

@dataclass(frozen=True)
class FilterSystem:
    """The first M time-limited prolates of a basis, centred at ``center``."""

    basis: object
    M: int
    center: float = 0.0

    def __post_init__(self):
        if not (0 <= self.M <= self.basis.count):
            raise DimensioningError("M=%d outside 0..%d" % (self.M, self.basis.count))

    @property
    def T(self):
        return self.basis.T

    @property
    def W(self):
        return self.basis.W

    @property
    def band(self):
        return (self.center - self.W, self.center + self.W)

    def at(self, center):
        return replace(self, center=float(center))

    def norms_sq(self):
        """||f_l||^2 = gamma_l."""
        return np.asarray(self.basis.gamma[: self.M], dtype=float)

    def time(self, t):
        """f_l(t), shape (len(t), M); zero outside [-T, T]."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        inside = np.abs(t) <= self.T
        out = np.zeros((t.size, self.M))
        for l in range(self.M):
            out[inside, l] = eval_xi(self.basis, l, t[inside])
        return out

    def time_deriv(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        inside = np.abs(t) <= self.T
        out = np.zeros((t.size, self.M))
        for l in range(self.M):
            out[inside, l] = eval_xi_deriv(self.basis, l, t[inside])
        return out

    def response(self, omega):
        """Alternant rows F_l(w_k - w*), shape (len(omega), M)."""
        nu = np.atleast_1d(np.asarray(omega, dtype=float)) - self.center
        out = np.zeros((nu.size, self.M), dtype=complex)
        for l in range(self.M):
            out[:, l] = np.conj(self.basis.mu[l]) * eval_xi_freq(self.basis, l, nu)
        return out

    def response_deriv(self, omega):
        nu = np.atleast_1d(np.asarray(omega, dtype=float)) - self.center
        out = np.zeros((nu.size, self.M), dtype=complex)
        for l in range(self.M):
            out[:, l] = np.conj(self.basis.mu[l]) * eval_xi_freq_deriv(self.basis, l, nu)
        return out

    def envelope(self, omega):
        """sum_l |F_l(w - w*)|^2."""
        return np.sum(np.abs(self.response(omega)) ** 2, axis=1)


# ----------------------------------------------------------------------------
# assembly

def _hermitize(A, what):
    scale = max(float(np.max(np.abs(A))), np.finfo(float).tiny)
    defect = float(np.max(np.abs(A - A.conj().T))) / scale if A.size else 0.0
    if defect > HERMITIAN_WARN:
        warnings.warn("%s hermitian defect %.2e; data may be inconsistent" % (what, defect),
                      DataConsistencyWarning, stacklevel=3)
    return 0.5 * (A + A.conj().T)


def _check_psd(G):
    if not G.size:
        return
    w = linalg.eigvalsh(G)
    if w[0] < -PSD_WARN * max(abs(w[-1]), np.finfo(float).tiny):
        warnings.warn("assembled Gram matrix has eigenvalue %.3e" % w[0],
                      DataConsistencyWarning, stacklevel=3)


def _filters_for(filters, M):
    M = filters.M if M is None else int(M)
    if M > filters.M:
        raise DimensioningError("M=%d exceeds the filter system size %d" % (M, filters.M))
    return M


def assemble_gep_freq(signal, filters, M=None):
    """Exact GEP from a line spectrum via the closed-form filter responses."""
    M = _filters_for(filters, M)
    F = filters.response(signal.omegas)[:, :M]
    FA = F * signal.amps[:, None]
    V2 = F.conj().T @ FA
    H = F.conj().T @ (FA * signal.omegas[:, None])
    return Gep(0.5 * (H + H.conj().T), 0.5 * (V2 + V2.conj().T), check=False)


def time_quad_order(filters):
    return 2 * int(math.ceil(filters.W * filters.T)) + 60


def assemble_gep_time(signal, filters, M=None, order=None):
    """GEP from samples of C on [-2T, 2T] by tensor Gauss-Legendre quadrature.

    H uses the partially integrated form, so only C (never C') is needed:

        H_sl = int int e^{-i w*(tau - t)} f_s(tau) C(tau - t) (w* f_l(t) - i f_l'(t))
               + i int f_s(tau) [f_l(T) E(tau, T) - f_l(-T) E(tau, -T)] dtau

    with E(tau, t) = e^{-i w*(tau - t)} C(tau - t).  The boundary terms are
    there because f_l = D_T xi_l jumps at +-T.
    """
    M = _filters_for(filters, M)
    T, wc = filters.T, filters.center
    if not signal.covers(T):
        raise ValidationError(
            "signal covers [%.6g, %.6g] but [-2T, 2T] = [%.6g, %.6g] is required"
            % (signal.times[0], signal.times[-1], -2 * T, 2 * T))
    q = time_quad_order(filters) if order is None else int(order)
    x, w = gauss_legendre(-T, T, q)
    X = filters.time(x)[:, :M]
    dX = filters.time_deriv(x)[:, :M]
    D = x[:, None] - x[None, :]
    E = np.exp(-1j * wc * D) * signal.interpolate(D.ravel()).reshape(D.shape)
    K = (w[:, None] * w[None, :]) * E
    V2 = X.T @ K @ (X + 0j)
    H = X.T @ K @ (wc * X - 1j * dX)
    ends = filters.time(np.array([-T, T]))[:, :M]
    Ep = np.exp(-1j * wc * (x - T)) * signal.interpolate(x - T)
    Em = np.exp(-1j * wc * (x + T)) * signal.interpolate(x + T)
    H = H + 1j * ((X * w[:, None]).T @ (np.outer(Ep, ends[1]) - np.outer(Em, ends[0])))
    V2 = _hermitize(V2, "V^2")
    H = _hermitize(H, "H_V")
    _check_psd(V2)
    return Gep(H, V2, check=False)


# ----------------------------------------------------------------------------
# envelope

@dataclass(frozen=True)
class Envelope:
    """Out-of-band envelope bound eps~_M and its ingredients."""

    M: int
    eps_tilde: float
    terms: np.ndarray  # 2 pi (T/W) gamma_l (1 - gamma_l) C_extra,l
    coarse: float  # same with C_extra replaced by sqrt(W^2 + lam^2/4T^2) - lam/2T
    asymptotic: float  # large-c envelope; nan for M = 0

    def epsilon_M(self, C0):
        return float(abs(C0)) * self.eps_tilde

    def __iter__(self):
        yield self.eps_tilde
        yield self.epsilon_M


def prolate_envelope_sup(basis, M):
    """eps~_M = 2 pi (T/W) sum_{l<M} gamma_l (1 - gamma_l) C_extra,l.

    sup over |w| > W of sum_l |F_l(w)|^2 = 2 pi sum gamma_l xi~_l(w)^2, and
    xi~_l(w)^2 = (T/W) xi_l(T w/W)^2 is bounded termwise by the exterior
    supremum bound (1 - gamma_l) C_extra,l.
    """
    M = int(M)
    if not (0 <= M <= basis.count):
        raise DimensioningError("M=%d outside 0..%d" % (M, basis.count))
    T, W = basis.T, basis.W
    scale = 2 * math.pi * T / W
    terms, coarse = np.zeros(M), 0.0
    for l in range(M):
        p = prefactors(basis, l)
        g, omg, lam = p["gamma"], p["one_minus_gamma"], p["lam"]
        terms[l] = scale * g * omg * p["c_extra"]
        half = lam / (2 * T)
        coarse += scale * g * omg * (math.sqrt(W * W + half * half) - half)
    if M:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            # dual-side sup carries T where the time side carries W
            asym = 2 * math.pi * M * asymptotic_sup_extra(basis.c, M - 1, W=T)
    else:
        asym = float("nan")
    return Envelope(M, float(np.sum(terms)), terms, float(coarse), float(asym))


def envelope_grid_sup(filters, M=None, span=40.0, points=4001):
    """Grid supremum of the envelope on W <= |w - w*| <= W + span/T."""
    M = _filters_for(filters, M)
    W = filters.W
    nu = np.linspace(W, W + span / filters.T, points)
    f = replace(filters, M=M)
    vals = np.maximum(f.envelope(filters.center + nu), f.envelope(filters.center - nu))
    return float(np.max(vals))


# ----------------------------------------------------------------------------
# Algorithm: refine, diagonalize, extract

@dataclass(frozen=True)
class FdResult:
    band: tuple  # (w*, W)
    m_detect: int
    omegas_est: np.ndarray  # ascending
    amps_est: np.ndarray
    freq_bounds: list  # per frequency (lower, upper) interval for the true w_k, or None
    amp_bounds: list  # per frequency radius, or None
    detectability: np.ndarray
    epsilon_M: float
    lam_m_gram: float  # lambda_{m}(V^2) for m = m_detect (nan if m = 0)
    gram_eigs: np.ndarray = None
    increase_M: bool = False
    reason: str = None
    bound_form: list = field(default_factory=list)

    def to_dict(self):
        freqs = []
        for k in range(self.m_detect):
            fb = self.freq_bounds[k] if self.freq_bounds else None
            ab = self.amp_bounds[k] if self.amp_bounds else None
            freqs.append({
                "omega": float(self.omegas_est[k]),
                "amplitude": float(self.amps_est[k]),
                "lower": None if fb is None else float(fb[0]),
                "upper": None if fb is None else float(fb[1]),
                "amplitude_radius": None if ab is None else float(ab),
                "detectability": float(self.detectability[k]),
            })
        out = {
            "omega_center": float(self.band[0]),
            "half_width": float(self.band[1]),
            "m_detect": int(self.m_detect),
            "epsilon_M": float(self.epsilon_M),
            "lambda_m": None if not math.isfinite(self.lam_m_gram) else float(self.lam_m_gram),
            "increase_M": bool(self.increase_M),
            "frequencies": freqs,
        }
        if self.reason:
            out["reason"] = self.reason
        return out


def right_inverse(F):
    """F^dagger (F F^dagger)^{-1} for a full-row-rank F (via least squares)."""
    m = F.shape[0]
    X, _, rank, _ = linalg.lstsq(F @ F.conj().T, np.eye(m))
    return F.conj().T @ X, int(rank)


def extract_amplitudes(gram, alternant):
    """|a~_k|^2 = (F^{-dagger} V^2 F^{-1})_kk with F^{-1} the right inverse.

    Rows of a rank-deficient alternant are reported as nan.
    """
    F = np.asarray(alternant, dtype=complex)
    if F.ndim != 2 or F.shape[0] > F.shape[1]:
        raise ValidationError("alternant must be m x M with m <= M")
    if F.shape[0] == 0:
        return np.zeros(0)
    det = detectability(F)
    Finv, _ = right_inverse(F)
    A = Finv.conj().T @ np.asarray(gram) @ Finv
    out = np.real(np.diag(A)).copy()
    out[det <= 0] = np.nan
    return out


def detectability(alternant, rcond=1e-13):
    """1 / ((F F^dagger)^{-1})_kk; zero for rows lost to rank deficiency."""
    F = np.asarray(alternant, dtype=complex)
    m = F.shape[0]
    if m == 0:
        return np.zeros(0)
    G = F @ F.conj().T
    w, U = linalg.eigh(G)
    top = max(w[-1], np.finfo(float).tiny)
    good = w > rcond * top
    inv_diag = np.real(np.sum(np.abs(U[:, good]) ** 2 / w[good], axis=1))
    lost = np.sum(np.abs(U[:, ~good]) ** 2, axis=1) > 1e-8
    out = np.where(lost, 0.0, 1.0 / np.where(inv_diag > 0, inv_diag, np.inf))
    return out


def run_fd(gep, filters, epsilon_M):
    """Refine onto the leading Gram eigenvectors, diagonalize, extract amplitudes."""
    band = (float(filters.center), float(filters.W))
    w, U = gram_eigh(gep.gram)
    increase = False
    reason = None
    try:
        m = detect_dimension(w, epsilon_M)
    except IncreaseGuessDimension:
        m, increase, reason = gep.M, True, "all Gram eigenvalues exceed epsilon_M: increase M"
    if m == 0:
        return FdResult(band, 0, np.zeros(0), np.zeros(0), [], [], np.zeros(0),
                        float(epsilon_M), float("nan"), w, increase,
                        "no Gram eigenvalue at or above epsilon_M")
    Um = U[:, :m]
    lam = w[:m]
    A = Um.conj().T @ gep.h_v @ Um
    s = np.sqrt(lam)
    A = A / s[:, None] / s[None, :]
    omegas = np.sort(linalg.eigvalsh(0.5 * (A + A.conj().T)))
    F = filters.response(omegas)[:, : gep.M]
    amps = extract_amplitudes(gep.gram, F)
    det = detectability(F)
    return FdResult(band, m, omegas, amps, None, None, det, float(epsilon_M),
                    float(lam[-1]), w, increase, reason)


# ----------------------------------------------------------------------------
# certified error intervals

def _split_spectrum(spectrum, filters):
    lo, hi = filters.band
    below = spectrum.omegas < lo - BAND_SLACK * max(1.0, abs(lo))
    above = spectrum.omegas > hi + BAND_SLACK * max(1.0, abs(hi))
    return below, above


def noise_level_estimate(spectrum, filters, M=None):
    """Upper estimate of lambda_1(N^2): sum over out-of-band lines of |a|^2 F^env."""
    M = _filters_for(filters, M)
    below, above = _split_spectrum(spectrum, filters)
    out = below | above
    if not np.any(out):
        return 0.0
    env = replace(filters, M=M).envelope(spectrum.omegas[out])
    return float(np.sum(spectrum.amps[out] * env))


@dataclass(frozen=True)
class FrequencyBound:
    """lower <= w~_k - w_k <= upper, and the implied interval for w_k."""

    lower: float
    upper: float
    form: str  # "theorem", "corollary" or "coarse"

    def truth_interval(self, omega_est):
        return (omega_est - self.upper, omega_est - self.lower)


def frequency_error_bounds(result, spectrum, filters, eps_tilde, C0=None, M=None):
    """Per-frequency bounds on w~_k - w_k from a full-spectrum estimate.

    Two valid forms are evaluated:
      theorem:   eps~ sum_out (w_l - w_k)|a_l|^2 / (lambda_m - eps~ C(0))
      corollary: sum_out (w_l - w_k)|a_l|^2 F^env(w_l) / (lambda_m - lambda_1(N^2)),
                 usable when lambda_m > (m + 1) lambda_1(N^2),
    and the narrower one is kept.  Returns a list of FrequencyBound, or None
    when neither denominator condition holds.
    """
    m = result.m_detect
    if m == 0:
        return []
    M = _filters_for(filters, M)
    C0 = spectrum.C0 if C0 is None else float(abs(C0))
    lam_m = result.lam_m_gram
    below, above = _split_spectrum(spectrum, filters)
    wl, al = spectrum.omegas, spectrum.amps
    env = replace(filters, M=M).envelope(wl) if wl.size else np.zeros(0)
    lam1N = noise_level_estimate(spectrum, filters, M)

    den_thm = lam_m - eps_tilde * C0
    den_cor = lam_m - lam1N
    cor_ok = lam_m > (m + 1) * lam1N
    out = []
    for wk in result.omegas_est:
        cands = []
        if den_thm > 0:
            lo = eps_tilde * np.sum((wl[below] - wk) * al[below]) / den_thm
            up = eps_tilde * np.sum((wl[above] - wk) * al[above]) / den_thm
            cands.append(FrequencyBound(float(lo), float(up), "theorem"))
        if cor_ok and den_cor > 0:
            lo = np.sum((wl[below] - wk) * al[below] * env[below]) / den_cor
            up = np.sum((wl[above] - wk) * al[above] * env[above]) / den_cor
            cands.append(FrequencyBound(float(lo), float(up), "corollary"))
        if not cands:
            return None
        out.append(min(cands, key=lambda b: b.upper - b.lower))
    return out


def coarse_frequency_bounds(result, lam1N, omega_min, omega_max):
    """(lambda_1(N^2)/lambda_m)(w_min - w_k) <= w~_k - w_k <= (..)(w_max - w_k)."""
    r = lam1N / result.lam_m_gram
    return [FrequencyBound(float(r * (omega_min - wk)), float(r * (omega_max - wk)), "coarse")
            for wk in result.omegas_est]


def amplitude_bounds(result, filters, freq_bounds, lam1N, M=None):
    """Three-term radius on | |a_k|^2 - |a~_k|^2 | with the mean-value shifts at 0.

    lambda_1(N^2) (F^{-2})_kk + 2 |dw_k| |a_k|^2 |(F' F^{-1})_kk|
      + max_l(|a_l|^2 dw_l^2) ((F' F^{-1})^dagger (F' F^{-1}))_kk,
    evaluated at the estimates, with |dw_k| the larger side of its interval.
    """
    m = result.m_detect
    if m == 0:
        return []
    if freq_bounds is None:
        return None
    M = _filters_for(filters, M)
    w = result.omegas_est
    F = filters.response(w)[:, :M]
    dF = filters.response_deriv(w)[:, :M]
    Finv, rank = right_inverse(F)
    if rank < m:
        return None
    Finv2 = Finv.conj().T @ Finv
    A = dF @ Finv
    AA = A.conj().T @ A
    dw = np.array([max(abs(b.lower), abs(b.upper)) for b in freq_bounds])
    amps = np.abs(result.amps_est)
    top = float(np.max(amps * dw ** 2))
    rad = (lam1N * np.real(np.diag(Finv2))
           + 2 * dw * amps * np.abs(np.diag(A))
           + top * np.real(np.diag(AA)))
    return [float(r) for r in rad]


def certify(result, spectrum, filters, eps_tilde, C0=None):
    """Fill frequency intervals and amplitude radii into a result."""
    if result.m_detect == 0:
        return result
    fb = frequency_error_bounds(result, spectrum, filters, eps_tilde, C0)
    if fb is None:
        return replace(result, freq_bounds=None, amp_bounds=None,
                       reason="certifiability failed: bound denominators not positive")
    lam1N = noise_level_estimate(spectrum, filters)
    ab = amplitude_bounds(result, filters, fb, lam1N)
    g = result.gram_eigs
    kappa = float(g[0] / result.lam_m_gram) if g is not None and g.size else 1.0
    scale = max(np.max(np.abs(result.omegas_est)), filters.W)
    floor = ROUNDING_FACTOR * kappa * scale
    intervals = [(lo - floor, hi + floor) for lo, hi in
                 (b.truth_interval(wk) for b, wk in zip(fb, result.omegas_est))]
    if ab is not None:
        F = filters.response(result.omegas_est)
        Finv, _ = right_inverse(F)
        finv2 = np.real(np.diag(Finv.conj().T @ Finv))
        top = float(g[0]) if g is not None and g.size else 0.0
        ab = [r + ROUNDING_FACTOR * kappa * top * f2 for r, f2 in zip(ab, finv2)]
    return replace(result, freq_bounds=intervals, amp_bounds=ab,
                   bound_form=[b.form for b in fb],
                   reason=result.reason if ab is not None else "alternant rank deficient")


# ----------------------------------------------------------------------------
# band sweep

def thread_cap(requested=None):
    """Worker count: the request (or cpu count) capped by PROLATE_FD_THREADS."""
    n = int(requested) if requested else (os.cpu_count() or 1)
    env = os.environ.get("PROLATE_FD_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValidationError("PROLATE_FD_THREADS must be an integer") from None
        n = min(n, max(1, cap))
    return max(1, n)


def _pool(results):
    """Nearest-centre ownership merge of all per-band estimates."""
    centers = np.array([r.band[0] for r in results])
    om, am = [], []
    for j, r in enumerate(results):
        for wk, ak in zip(r.omegas_est, r.amps_est):
            owner = int(np.argmin(np.abs(centers - wk)))
            if owner == j:
                om.append(wk)
                am.append(ak if np.isfinite(ak) else 0.0)
    if not om:
        return DiscreteSignal(np.zeros(0), np.zeros(0))
    om, am = np.asarray(om), np.maximum(np.asarray(am), 0.0)
    order = np.argsort(om)
    om, am = om[order], am[order]
    keep = np.concatenate([[True], np.diff(om) > 0])
    return DiscreteSignal(om[keep], am[keep])


def band_sweep(signal, plan, basis, M, threads=None, order=None):
    """Run the algorithm on each band, pool the spectrum, then certify.

    ``plan`` is a list of centres w* (or (w*, W) pairs whose W must equal the
    basis half-width).  Returns (results, pooled_spectrum).
    """
    centers = []
    for item in plan:
        if np.ndim(item) == 0:
            centers.append(float(item))
        else:
            wc, hw = item
            if abs(hw - basis.W) > 1e-12 * basis.W:
                raise ValidationError("band half-width %g differs from basis W=%g" % (hw, basis.W))
            centers.append(float(wc))
    base = FilterSystem(basis, M)
    env = prolate_envelope_sup(basis, M)
    if isinstance(signal, DiscreteSignal):
        C0 = signal.C0
        assemble = lambda f: assemble_gep_freq(signal, f, M)
    else:
        C0 = abs(signal.value_at_zero()[0])
        assemble = lambda f: assemble_gep_time(signal, f, M, order=order)
    eps_M = env.epsilon_M(C0)

    def one(wc):
        f = base.at(wc)
        return run_fd(assemble(f), f, eps_M)

    n = min(len(centers), thread_cap(threads)) if centers else 1
    if n > 1:
        with ThreadPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(one, centers))
    else:
        results = [one(wc) for wc in centers]
    pooled = _pool(results)
    final = [certify(r, pooled, base.at(r.band[0]), env.eps_tilde, C0) for r in results]
    return final, pooled
