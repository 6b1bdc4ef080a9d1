"""Prolate spheroidal wave functions for a band-time pair (T, W).

The n-th prolate xi_n is band-limited to [-W, W], normalized to unit
energy on the real line, and carries a fraction gamma_n of that energy
inside [-T, T].  Inside the window we use a Legendre expansion of the
angular function S_n(x), x = t/T, solving the prolate ODE

    ((1 - x^2) S')' + (chi - c^2 x^2) S = 0,     c = W T,

as a symmetric tridiagonal eigenproblem in normalized Legendre
coefficients (even and odd blocks decouple).  Outside the window the
function is continued through its band-limiting integral relation.

Conventions
-----------
* ``lam = chi - c**2``; the ODE evaluated at x = 1 gives
  xi'(T) = lam / (2 T) * xi(T).
* coefficients are for P_k normalized as sqrt(k + 1/2) P_k, so that
  sum(d**2) = 1 is the unit norm of S_n on [-1, 1].
* the first Legendre coefficient above 1e-8 of the largest is positive.
* mu_n is the eigenvalue of the exponential kernel,
  int_{-T}^{T} exp(i W tau t / T) xi_n(t) dt = mu_n sqrt(T/W) xi_n(tau),
  and |mu_n|^2 = 2 pi gamma_n.
"""
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.linalg import eigh_tridiagonal

from . import jsonio
from .errors import ConsistencyError, DimensioningError, ValidationError
from .quad import composite_gauss, gauss_laguerre, gauss_legendre, symmetric_nodes

# below this the probe ratio has lost too many digits; chain instead
GAMMA_CHAIN_SWITCH = 1e-6
# below this the exterior is continued with the exponential kernel, which
# does not divide by gamma
GAMMA_EXP_CONTINUATION = 1e-4
SIGN_THRESHOLD = 1e-8
MAX_COEFFS = 20000


@dataclass(frozen=True)
class BandTimeSpec:
    """Half time window T and half bandwidth W (angular)."""

    T: float
    W: float
    c: float = field(init=False)
    c_tilde: float = field(init=False)

    def __post_init__(self):
        T, W = float(self.T), float(self.W)
        if not (math.isfinite(T) and T > 0):
            raise ValidationError("T must be positive and finite, got %r" % self.T)
        if not (math.isfinite(W) and W > 0):
            raise ValidationError("W must be positive and finite, got %r" % self.W)
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "c", W * T)
        object.__setattr__(self, "c_tilde", 2.0 * (W * T) / math.pi)

    @classmethod
    def from_any(cls, c=None, T=None, W=None):
        """Build from exactly two of (c, T, W)."""
        given = [v is not None for v in (c, T, W)]
        if sum(given) != 2:
            raise ValidationError("give exactly two of c, T, W")
        for name, v in (("c", c), ("T", T), ("W", W)):
            if v is not None and not (math.isfinite(v) and v > 0):
                raise ValidationError("%s must be positive, got %r" % (name, v))
        if c is None:
            return cls(T=T, W=W)
        if T is None:
            return cls(T=c / W, W=W)
        return cls(T=T, W=c / T)


@dataclass(frozen=True, eq=False)
class PswfBasis:
    """First ``count`` prolates for ``spec``.  Immutable after construction."""

    spec: BandTimeSpec
    count: int
    coeffs: np.ndarray  # (count, K) normalized Legendre coefficients
    chi: np.ndarray
    lam: np.ndarray
    gamma: np.ndarray
    one_minus_gamma: np.ndarray
    mu: np.ndarray
    scale: np.ndarray  # sqrt(gamma / T): stored coefficients -> unit-R-norm xi
    quad_order: int
    diagnostics: dict = field(default_factory=dict, repr=False)
    # quadrature data on [-T, T] used by the integral continuations
    nodes: np.ndarray = field(default=None, repr=False)
    weights: np.ndarray = field(default=None, repr=False)
    xi_nodes: np.ndarray = field(default=None, repr=False)
    dxi_nodes: np.ndarray = field(default=None, repr=False)
    _leg: np.ndarray = field(default=None, repr=False)
    _dleg: np.ndarray = field(default=None, repr=False)
    _d2leg: np.ndarray = field(default=None, repr=False)

    @property
    def T(self):
        return self.spec.T

    @property
    def W(self):
        return self.spec.W

    @property
    def c(self):
        return self.spec.c

    def xi_at_T(self, n):
        return float(self.scale[n] * np.sum(self._leg[n]))


# ----------------------------------------------------------------------------
# Legendre eigenproblem

def _parity_block(c, parity, m):
    """Tridiagonal PSWEq matrix on k = parity, parity + 2, ... (m entries)."""
    k = parity + 2.0 * np.arange(m)
    c2 = c * c
    diag = k * (k + 1) + c2 * (2 * k * (k + 1) - 1) / ((2 * k + 3) * (2 * k - 1))
    kk = k[:-1]
    off = c2 * (kk + 1) * (kk + 2) / ((2 * kk + 3) * np.sqrt((2 * kk + 1) * (2 * kk + 5)))
    return diag, off


def _fix_sign(v):
    amax = np.max(np.abs(v))
    lead = np.flatnonzero(np.abs(v) > SIGN_THRESHOLD * amax)[0]
    return v if v[lead] > 0 else -v


def _legendre_coefficients(c, N, ncoef=None):
    """chi_n and coefficient vectors for n < N, growing the truncation as needed."""
    K = max(2 * N + 30, int(ncoef or 0))
    while True:
        ne, no = (N + 1) // 2, N // 2
        chi = np.empty(N)
        d = np.zeros((N, K))
        tails_ok = True
        worst = None
        for parity, cnt in ((0, ne), (1, no)):
            if cnt == 0:
                continue
            m = (K - parity + 1) // 2
            diag, off = _parity_block(c, parity, m)
            w, v = eigh_tridiagonal(diag, off, select="i", select_range=(0, cnt - 1))
            for j in range(cnt):
                n = 2 * j + parity
                vec = _fix_sign(v[:, j])
                chi[n] = w[j]
                d[n, parity::2] = vec
                amax = np.max(np.abs(vec))
                if np.max(np.abs(vec[-2:])) > 1e-16 * amax:
                    tails_ok = False
                    worst = n
        if tails_ok:
            return chi, d, K
        if K >= MAX_COEFFS:
            raise DimensioningError(
                "Legendre coefficient tail of n=%d did not converge with %d terms" % (worst, K),
                index=worst,
            )
        K = min(MAX_COEFFS, int(1.5 * K) + 2)


def _series(d):
    """Convert normalized-Legendre coefficients to numpy legendre-series ones."""
    k = np.arange(d.shape[-1])
    return d * np.sqrt(k + 0.5)


def _rho(W, x):
    return (W / math.pi) * np.sinc(W * x / math.pi)


# ----------------------------------------------------------------------------
# eigenvalues of the integral operators

def _probe_ratio(spec, u_nodes, u_T, s, w, n):
    """r = int exp(i W tau t/T) u(t) dt / u(tau) at the max-|u| probe."""
    T, W = spec.T, spec.W
    cand = np.concatenate([s, [T]])
    vals = np.concatenate([u_nodes, [u_T]])
    j = int(np.argmax(np.abs(vals)))
    tau, utau = cand[j], vals[j]
    integral = np.dot(w, np.exp(1j * W * tau * s / T) * u_nodes)
    return integral / utau


def _chain_step(c, S_next, dS_next, S_cur, x, wx):
    """alpha_{n+1} / alpha_n for the kernel exp(i c x z) on [-1, 1].

    Follows from differentiating the Fourier eigenrelation in x and pairing
    with the previous eigenfunction; both integrals are polynomial and
    free of cancellation.
    """
    A = np.dot(wx, x * S_next * S_cur)
    B = np.dot(wx, dS_next * S_cur)
    return 1j * c * A / B


def _exterior_by_sinc(spec, t, xi_s, w, s, gamma):
    K = _rho(spec.W, t[:, None] - s[None, :])
    return (K @ (w * xi_s)) / gamma


def _ext_G(spec, z, xi_s, w, s, power=1):
    """int exp(-i W s) xi(s) / (z - s)**power ds for complex z off [-T, T]."""
    ph = np.exp(-1j * spec.W * s) * xi_s * w
    return (1.0 / (z[:, None] - s[None, :]) ** power) @ ph


def _exterior_energy(spec, gamma, xi_s, dxi_s, w, s, xi_T, panel_order=24):
    """Energy of xi and xi' on (T, inf), computed without 1 - gamma.

    Finite part on (T, a] by composite Gauss on the sinc continuation; the
    tail (a, inf) through xi(t) = Im[exp(iWt) G(t)] / (pi gamma) with
    G(t) = int exp(-iWs) xi(s) / (t - s) ds, splitting |.|^2 into a smooth
    part (mapped to u = a/t) and an oscillatory part whose contour is
    rotated to t = a + i y.
    """
    T, W = spec.T, spec.W
    a = 40.0 / W + 3.0 * T
    x, wx = composite_gauss(T, a, math.pi / W, panel_order)
    ext = _exterior_by_sinc(spec, x, xi_s, w, s, gamma)
    dext = _exterior_deriv_sinc(spec, x, xi_s, dxi_s, w, s, xi_T, gamma)
    e_fin = np.dot(wx, ext ** 2)
    d_fin = np.dot(wx, dext ** 2)

    pref = 1.0 / (math.pi * gamma)
    # smooth part: t = a/u on u in (0, 1]
    uu, wu = gauss_legendre(0.0, 1.0, 40)
    ph = np.exp(-1j * W * s) * xi_s * w
    den = 1.0 - s[None, :] * uu[:, None] / a
    H1 = (1.0 / den) @ ph
    H2 = (1.0 / den ** 2) @ ph
    smooth_e = np.dot(wu, np.abs(H1) ** 2) / a
    # K(t) = iW G + G', G' = -int .../(t-s)^2 ; at t = a/u: K = (u/a)(iW H1 - (u/a) H2)
    smooth_d = np.dot(wu, np.abs(1j * W * H1 - (uu / a) * H2) ** 2) / a
    # oscillatory part
    xl, wl = gauss_laguerre(60)
    z = a + 1j * xl / (2 * W)
    G = _ext_G(spec, z, xi_s, w, s, 1)
    Gp = -_ext_G(spec, z, xi_s, w, s, 2)
    rot = (1j / (2 * W)) * np.exp(2j * W * a)
    osc_e = (rot * np.dot(wl, G ** 2)).real
    osc_d = (rot * np.dot(wl, (1j * W * G + Gp) ** 2)).real
    tail_e = pref ** 2 * 0.5 * (smooth_e - osc_e)
    tail_d = pref ** 2 * 0.5 * (smooth_d - osc_d)
    crude = 4.0 * T / (gamma * math.pi ** 2 * (a - T))
    return {
        "out_energy": 2.0 * (e_fin + tail_e),
        "out_deriv_energy": 2.0 * (d_fin + tail_d),
        "tail_energy": 2.0 * tail_e,
        "tail_crude_bound": 2.0 * crude,
        "T_cut": a,
    }


def _exterior_deriv_sinc(spec, t, xi_s, dxi_s, w, s, xi_T, gamma):
    """xi'(t) for |t| > T, by parts so the kernel is never differentiated."""
    T, W = spec.T, spec.W
    xi_Tp, xi_Tm = xi_T
    K = _rho(W, t[:, None] - s[None, :])
    val = K @ (w * dxi_s) - _rho(W, t - T) * xi_Tp + _rho(W, t + T) * xi_Tm
    return val / gamma


def build_basis(spec, N, quad_order=200, ncoef=None):
    """Compute the first N prolates for ``spec``.

    ``quad_order`` is the Gauss order per half interval used by the integral
    relations; it is doubled until gamma from two successive orders agrees
    to 1e-12 relative.
    """
    if not isinstance(spec, BandTimeSpec):
        raise ValidationError("spec must be a BandTimeSpec")
    N = int(N)
    if N < 1:
        raise ValidationError("N must be >= 1")
    if quad_order < 8:
        raise ValidationError("quad_order must be >= 8")
    T, W, c = spec.T, spec.W, spec.c
    chi, d, K = _legendre_coefficients(c, N, ncoef)
    lam = chi - c * c
    leg = _series(d)
    if np.any(np.diff(lam) <= 0):
        bad = int(np.flatnonzero(np.diff(lam) <= 0)[0])
        raise ConsistencyError("lambda ordering violated at n=%d" % (bad + 1))

    # exact-degree rule for the polynomial chain integrals
    xg, wg = gauss_legendre(-1.0, 1.0, K + 2)
    S_g = np.array([npleg.legval(xg, leg[n]) for n in range(N)])
    dleg = np.array([npleg.legder(leg[n]) for n in range(N)])
    dS_g = np.array([npleg.legval(xg, dleg[n]) for n in range(N)])
    S_one = leg.sum(axis=1)  # S_n(1)

    q = int(quad_order)
    prev = None
    for _ in range(4):
        s, w = symmetric_nodes(T, q)
        u_nodes = np.array([npleg.legval(s / T, leg[n]) for n in range(N)]) / math.sqrt(T)
        r = np.array([
            _probe_ratio(spec, u_nodes[n], S_one[n] / math.sqrt(T), s, w, n) for n in range(N)
        ])
        g = np.abs(r) ** 2 * W / (2 * math.pi * T)
        if prev is not None:
            sel = g >= GAMMA_CHAIN_SWITCH
            if np.all(np.abs(g[sel] - prev[sel]) <= 1e-12 * g[sel]):
                break
        prev = g
        q *= 2
    else:
        q //= 2
    gamma_probe = g

    # probe route for well-concentrated n, chained ratios after
    mu = np.empty(N, dtype=complex)
    route = []
    gamma = np.empty(N)
    sqrt_c = math.sqrt(c)
    switch = N
    for n in range(N):
        if gamma_probe[n] < GAMMA_CHAIN_SWITCH and n > 0:
            switch = n
            break
        gamma[n] = gamma_probe[n]
        phase = 1j ** n
        sgn = 1.0 if (r[n] / phase).real >= 0 else -1.0
        mu[n] = sgn * phase * math.sqrt(2 * math.pi * gamma[n])
        route.append("probe")
    for n in range(switch, N):
        ratio = _chain_step(c, S_g[n], dS_g[n], S_g[n - 1], xg, wg)
        mu[n] = mu[n - 1] * ratio
        # snap to the exact phase i^n; the ratio is purely imaginary
        phase = 1j ** n
        mag = abs(mu[n])
        sgn = 1.0 if (mu[n] / phase).real >= 0 else -1.0
        mu[n] = sgn * phase * mag
        gamma[n] = mag ** 2 / (2 * math.pi)
        route.append("chain")

    scale = np.sqrt(gamma / T)
    xi_nodes = scale[:, None] * u_nodes * math.sqrt(T)
    dxi_nodes = np.array([
        scale[n] / T * npleg.legval(s / T, dleg[n]) for n in range(N)
    ])

    # eigenrelation check on the probe-route phases
    resid_mu = np.full(N, np.nan)
    probes = np.linspace(-T, T, 7)
    for n in range(switch):
        lhs = np.exp(1j * W * probes[:, None] * s[None, :] / T) @ (w * xi_nodes[n])
        xi_p = scale[n] * npleg.legval(probes / T, leg[n])
        rhs = mu[n] * math.sqrt(T / W) * xi_p
        ref = abs(mu[n]) * math.sqrt(T / W) * np.max(np.abs(xi_nodes[n]))
        res = np.max(np.abs(lhs - rhs)) / ref
        if res > 1e-6:
            rhs_f = -rhs
            res_f = np.max(np.abs(lhs - rhs_f)) / ref
            if res_f < res:
                mu[n] = -mu[n]
                res = res_f
        resid_mu[n] = res

    omg = np.empty(N)
    ext_info = [None] * N
    for n in range(N):
        if gamma[n] > 0.5:
            xT = scale[n] * S_one[n]
            info = _exterior_energy(
                spec, gamma[n], xi_nodes[n], dxi_nodes[n], w, s, (xT, (-1) ** n * xT)
            )
            omg[n] = info["out_energy"]
            # exterior energy inherits O(1) relative error from gamma itself;
            # it is then carried into gamma so that gamma + omg = 1
            gamma[n] = 1.0 - omg[n]
            ext_info[n] = {k: float(v) for k, v in info.items()}
        else:
            omg[n] = 1.0 - gamma[n]
    if np.any(omg <= 0) or np.any(gamma <= 0):
        raise ConsistencyError("concentration eigenvalue outside (0, 1)")

    # gamma strictly decreasing; compare 1-gamma where gamma is close to 1
    hi = gamma > 0.5
    ok = True
    for n in range(N - 1):
        if hi[n] and hi[n + 1]:
            ok &= omg[n + 1] > omg[n]
        else:
            ok &= gamma[n + 1] < gamma[n]
    if not ok:
        raise ConsistencyError("gamma ordering violated; increase quad_order")

    scale = np.sqrt(gamma / T)
    xi_nodes = scale[:, None] * u_nodes * math.sqrt(T)
    dxi_nodes = np.array([scale[n] / T * npleg.legval(s / T, dleg[n]) for n in range(N)])
    d2leg = np.array([npleg.legder(leg[n], 2) for n in range(N)])

    diag = {
        "n_coeffs": K,
        "quad_order_used": q,
        "gamma_route": route,
        "gamma_probe": gamma_probe.tolist(),
        "mu_residual": [None if np.isnan(v) else float(v) for v in resid_mu],
        "exterior": ext_info,
    }
    for arr in (d, chi, lam, gamma, omg, mu, scale, s, w, xi_nodes, dxi_nodes, leg, dleg, d2leg):
        arr.flags.writeable = False
    return PswfBasis(
        spec=spec, count=N, coeffs=d, chi=chi, lam=lam, gamma=gamma,
        one_minus_gamma=omg, mu=mu, scale=scale, quad_order=q, diagnostics=diag,
        nodes=s, weights=w, xi_nodes=xi_nodes, dxi_nodes=dxi_nodes,
        _leg=leg, _dleg=dleg, _d2leg=d2leg,
    )


def build_until(spec, gamma_floor=1e-14, quad_order=200, start=None):
    """Extend N until gamma_{N-1} drops below ``gamma_floor``."""
    N = start or max(4, int(spec.c_tilde) + 8)
    while True:
        b = build_basis(spec, N, quad_order)
        if b.gamma[-1] < gamma_floor:
            return b
        N += max(4, N // 2)


# ----------------------------------------------------------------------------
# evaluation

def _check_index(basis, n):
    if not (0 <= n < basis.count):
        raise ValidationError("index %d outside basis of %d prolates" % (n, basis.count))


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


def _exterior_exp(basis, n, t, deriv=False):
    """Continuation through the exponential kernel (valid for all t)."""
    T, W = basis.T, basis.W
    s, w = basis.nodes, basis.weights
    ker = np.exp(1j * W * t[:, None] * s[None, :] / T)
    f = w * basis.xi_nodes[n]
    if deriv:
        f = f * (1j * W * s / T)
    val = (ker @ f) * math.sqrt(W / T) / basis.mu[n]
    return val.real


def _xi_exterior(basis, n, t):
    g = basis.gamma[n]
    if g < GAMMA_EXP_CONTINUATION:
        return _exterior_exp(basis, n, t)
    return _exterior_by_sinc(basis.spec, t, basis.xi_nodes[n], basis.weights, basis.nodes, g)


def _dxi_exterior(basis, n, t):
    g = basis.gamma[n]
    if g < GAMMA_EXP_CONTINUATION:
        return _exterior_exp(basis, n, t, deriv=True)
    xT = basis.xi_at_T(n)
    return _exterior_deriv_sinc(
        basis.spec, t, basis.xi_nodes[n], basis.dxi_nodes[n], basis.weights, basis.nodes,
        (xT, (-1) ** n * xT), g,
    )


def eval_xi(basis, n, t):
    """xi_n(t) with unit energy on the real line."""
    _check_index(basis, n)
    arr, scalar = _as_array(t)
    flat = arr.ravel()
    out = np.empty_like(flat)
    inside = np.abs(flat) <= basis.T
    if np.any(inside):
        out[inside] = basis.scale[n] * npleg.legval(flat[inside] / basis.T, basis._leg[n])
    if np.any(~inside):
        out[~inside] = _xi_exterior(basis, n, flat[~inside])
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


def eval_xi_deriv(basis, n, t):
    """xi_n'(t); interior series for |t| <= T, continuation beyond."""
    _check_index(basis, n)
    arr, scalar = _as_array(t)
    flat = arr.ravel()
    out = np.empty_like(flat)
    inside = np.abs(flat) <= basis.T
    if np.any(inside):
        out[inside] = (basis.scale[n] / basis.T) * npleg.legval(
            flat[inside] / basis.T, basis._dleg[n]
        )
    if np.any(~inside):
        out[~inside] = _dxi_exterior(basis, n, flat[~inside])
    out = out.reshape(arr.shape)
    return float(out) if scalar else out


def eval_xi_freq(basis, n, omega):
    """Dual prolate xi~_n(omega) = sqrt(T/W) xi_n(T omega / W)."""
    arr, scalar = _as_array(omega)
    val = math.sqrt(basis.T / basis.W) * eval_xi(basis, n, arr * (basis.T / basis.W))
    return float(val) if scalar else val


def eval_xi_freq_deriv(basis, n, omega):
    arr, scalar = _as_array(omega)
    r = basis.T / basis.W
    val = math.sqrt(r) * r * eval_xi_deriv(basis, n, arr * r)
    return float(val) if scalar else val


def gamma_pair(basis, n):
    _check_index(basis, n)
    return float(basis.gamma[n]), float(basis.one_minus_gamma[n])


def derivative_energy(basis, n):
    """Total derivative energy ||xi_n'||^2 on the real line.

    By Plancherel it is (1/2pi) int omega^2 |xi^|^2; the Fourier side of a
    prolate is its own interior profile, which reduces to
    (W^2 / T^2) int_{-T}^{T} t^2 u_n(t)^2 dt with u_n = xi_n / sqrt(gamma_n).
    """
    _check_index(basis, n)
    s, w = basis.nodes, basis.weights
    u2 = basis.xi_nodes[n] ** 2 / basis.gamma[n]
    return float((basis.W / basis.T) ** 2 * np.dot(w, s ** 2 * u2))


def fuchs_asymptotic(c, n):
    """Two-term large-c asymptotic of 1 - gamma_n."""
    if c <= 0:
        raise ValidationError("c must be positive")
    n = int(n)
    logv = (math.log(4 * math.sqrt(math.pi)) + 3 * n * math.log(2.0)
            + (n + 0.5) * math.log(c) - 2 * c - math.lgamma(n + 1))
    return math.exp(logv) * (1.0 - (6 * n * n - 2 * n + 3) / (32.0 * c))


def residual_integral_eigenrelation(basis, n, probe_points):
    """max |int rho_W(s - t) xi_n(t) dt - gamma_n xi_n(s)| / (gamma_n max|xi_n|).

    The max runs over the interior nodes and the probe points.
    """
    _check_index(basis, n)
    p = np.atleast_1d(np.asarray(probe_points, dtype=float))
    if np.any(np.abs(p) > 2 * basis.T + 1e-12):
        raise ValidationError("probe points must lie in [-2T, 2T]")
    s, w = basis.nodes, basis.weights
    lhs = _rho(basis.W, p[:, None] - s[None, :]) @ (w * basis.xi_nodes[n])
    xp = eval_xi(basis, n, p)
    rhs = basis.gamma[n] * xp
    ref = basis.gamma[n] * max(np.max(np.abs(basis.xi_nodes[n])), np.max(np.abs(xp)))
    return float(np.max(np.abs(lhs - rhs)) / ref)


def residual_fourier_eigenrelation(basis, n, probe_points):
    """Relative residual of the exponential-kernel eigenrelation."""
    _check_index(basis, n)
    p = np.atleast_1d(np.asarray(probe_points, dtype=float))
    T, W = basis.T, basis.W
    s, w = basis.nodes, basis.weights
    lhs = np.exp(1j * W * p[:, None] * s[None, :] / T) @ (w * basis.xi_nodes[n])
    xp = eval_xi(basis, n, p)
    rhs = basis.mu[n] * math.sqrt(T / W) * xp
    # for tiny gamma the exterior dominates, so scale by the larger side
    ref = abs(basis.mu[n]) * math.sqrt(T / W) * max(np.max(np.abs(basis.xi_nodes[n])),
                                                    np.max(np.abs(xp)))
    return float(np.max(np.abs(lhs - rhs)) / ref)


def residual_ode(basis, n, probe_points):
    """Relative residual of the prolate ODE in x = t/T on [-1, 1]."""
    _check_index(basis, n)
    x = np.atleast_1d(np.asarray(probe_points, dtype=float)) / basis.T
    if np.any(np.abs(x) > 1 + 1e-12):
        raise ValidationError("ODE residual is evaluated inside [-T, T]")
    S = npleg.legval(x, basis._leg[n])
    dS = npleg.legval(x, basis._dleg[n])
    d2S = npleg.legval(x, basis._d2leg[n])
    c2 = basis.c ** 2
    res = (1 - x * x) * d2S - 2 * x * dS + (basis.chi[n] - c2 * x * x) * S
    ref = (abs(basis.chi[n]) + c2 + 1.0) * np.max(np.abs(npleg.legval(
        np.linspace(-1, 1, 201), basis._leg[n])))
    return float(np.max(np.abs(res)) / ref)


def sign_changes(basis, n, samples=4001):
    """Number of sign changes of xi_n on (-T, T)."""
    _check_index(basis, n)
    x = np.linspace(-1, 1, samples)[1:-1]
    v = npleg.legval(x, basis._leg[n])
    v = v[np.abs(v) > 1e-13 * np.max(np.abs(v))]
    return int(np.count_nonzero(np.diff(np.sign(v)) != 0))


@dataclass(frozen=True)
class TransitionSignature:
    index: int
    lambda_below: Optional[float]
    lambda_above: float
    holds: bool
    degenerate: bool


def transition_signature(basis):
    """Check lam_{k-1} <= 0 <= lam_{k+1} at k = floor(2c/pi).  Never raises on failure."""
    k = int(math.floor(basis.spec.c_tilde))
    if k + 1 >= basis.count:
        raise DimensioningError(
            "need more than %d prolates for the transition check" % (k + 1), index=k + 1
        )
    above = float(basis.lam[k + 1])
    tiny = 1e-12 * max(1.0, basis.c ** 2)
    if k - 1 < 0:
        return TransitionSignature(k, None, above, above >= 0, True)
    below = float(basis.lam[k - 1])
    degenerate = abs(below) <= tiny or abs(above) <= tiny
    return TransitionSignature(k, below, above, below <= 0 <= above, degenerate)


# ----------------------------------------------------------------------------
# serialization

def basis_to_dict(basis):
    return {
        "c": basis.c,
        "T": basis.T,
        "W": basis.W,
        "N": basis.count,
        "quad_order": basis.quad_order,
        "chi": basis.chi,
        "lambda": basis.lam,
        "gamma": basis.gamma,
        "one_minus_gamma": basis.one_minus_gamma,
        "mu_re": basis.mu.real,
        "mu_im": basis.mu.imag,
        "coeffs": [list(row) for row in basis.coeffs],
        "scale": basis.scale,
    }


def basis_to_json(basis):
    return jsonio.dumps(basis_to_dict(basis))


def basis_from_dict(data):
    """Rebuild a basis from its serialized form.

    Eigenvalues come from the file; the quadrature data are regenerated
    from the stored coefficients.
    """
    try:
        spec = BandTimeSpec(T=float(data["T"]), W=float(data["W"]))
        N = int(data["N"])
        d = np.array(data["coeffs"], dtype=float)
        chi = np.array(data["chi"], dtype=float)
        lam = np.array(data["lambda"], dtype=float)
        gamma = np.array(data["gamma"], dtype=float)
        omg = np.array(data["one_minus_gamma"], dtype=float)
        mu = np.array(data["mu_re"], dtype=float) + 1j * np.array(data["mu_im"], dtype=float)
        scale = np.array(data["scale"], dtype=float)
        q = int(data.get("quad_order", 200))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError("malformed basis record: %s" % exc) from exc
    if d.shape[0] != N or any(len(a) != N for a in (chi, lam, gamma, omg, mu, scale)):
        raise ValidationError("basis record has inconsistent lengths")
    T = spec.T
    leg = _series(d)
    dleg = np.array([npleg.legder(leg[n]) for n in range(N)])
    d2leg = np.array([npleg.legder(leg[n], 2) for n in range(N)])
    s, w = symmetric_nodes(T, q)
    xi_nodes = np.array([scale[n] * npleg.legval(s / T, leg[n]) for n in range(N)])
    dxi_nodes = np.array([scale[n] / T * npleg.legval(s / T, dleg[n]) for n in range(N)])
    for arr in (d, chi, lam, gamma, omg, mu, scale, s, w, xi_nodes, dxi_nodes, leg, dleg, d2leg):
        arr.flags.writeable = False
    return PswfBasis(
        spec=spec, count=N, coeffs=d, chi=chi, lam=lam, gamma=gamma, one_minus_gamma=omg,
        mu=mu, scale=scale, quad_order=q, diagnostics={"loaded": True},
        nodes=s, weights=w, xi_nodes=xi_nodes, dxi_nodes=dxi_nodes,
        _leg=leg, _dleg=dleg, _d2leg=d2leg,
    )


def basis_from_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("basis file is not valid JSON: %s" % exc) from exc
    return basis_from_dict(data)


def exterior_energies(basis, n):
    """Energy of xi_n and xi_n' on |t| > T by direct quadrature plus tail.

    Independent of the stored 1 - gamma_n; loses relative accuracy like
    eps / gamma_n^2, so it is intended for gamma_n above ~1e-4.
    """
    _check_index(basis, n)
    xT = basis.xi_at_T(n)
    return _exterior_energy(
        basis.spec, float(basis.gamma[n]), basis.xi_nodes[n], basis.dxi_nodes[n],
        basis.weights, basis.nodes, (xT, (-1) ** n * xT),
    )
