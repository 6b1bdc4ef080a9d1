"""Supremum and derivative-energy bounds for prolates.

For a unit-energy prolate xi_n with concentration gamma_n the derivative
energy splits exactly as

    ||xi'||^2_{|t|<=T} = gamma_n D + (lam_n / T) xi_n(T)^2
    ||xi'||^2_{|t|>T}  = (1 - gamma_n) D - (lam_n / T) xi_n(T)^2

with D = ||xi'||^2 on the real line.  Writing the right-hand sides as
gamma C_intra^2 and (1 - gamma) C_extra^2 gives the prefactors, and the
Cauchy-Schwarz estimate xi(t)^2 <= 2 ||xi|| ||xi'|| on a half line turns
them into supremum bounds.
"""
import math
import warnings
from dataclasses import dataclass, asdict

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import UnderflowError, ValidationError
from .pswf import (
    _check_index,
    derivative_energy,
    eval_xi,
    eval_xi_deriv,
)


@dataclass(frozen=True)
class BoundReport:
    n: int
    gamma: float
    one_minus_gamma: float
    lam: float
    c_extra: float
    c_intra: float
    c_intra_tilde: float
    c_n: float
    xi_T_sq: float
    deriv_total_sq: float
    deriv_T_sq: float
    deriv_out_sq: float
    sup_out_numeric: float
    sup_in_numeric: float
    sup_out_bound: float
    sup_in_bound: float
    # the two readings of the interior derivative identity
    deriv_T_printed: float  # gamma * C_intra
    deriv_T_squared: float  # gamma * C_intra^2

    def to_dict(self):
        return asdict(self)


def prefactors(basis, n):
    """(C_extra, C_intra, C_intra_tilde, C_n) and the pieces they are built from."""
    _check_index(basis, n)
    T = basis.T
    g = float(basis.gamma[n])
    omg = float(basis.one_minus_gamma[n])
    lam = float(basis.lam[n])
    xT2 = basis.xi_at_T(n) ** 2
    D = derivative_energy(basis, n)
    extra_sq = max(D - (lam / T) * xT2 / omg, 0.0)
    intra_sq = max(D + (lam / T) * xT2 / g, 0.0)
    c_extra = math.sqrt(extra_sq)
    c_intra = math.sqrt(intra_sq)
    # the n = 0 correction; its symbol is read as lam_0 / T
    c_intra_t = c_intra + (xT2 / g if n == 0 else 0.0)
    c_n = math.sqrt(D + lam * lam / (4 * T * T))
    return {
        "c_extra": c_extra, "c_intra": c_intra, "c_intra_tilde": c_intra_t, "c_n": c_n,
        "D": D, "xi_T_sq": xT2, "gamma": g, "one_minus_gamma": omg, "lam": lam,
    }


def _golden_max(f, a, b, x0, h):
    lo, hi = max(a, x0 - h), min(b, x0 + h)
    if hi <= lo:
        return float(f(x0))
    res = minimize_scalar(lambda x: -f(x), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12 * max(1.0, abs(x0))})
    return float(max(f(x0), -res.fun))


def sup_exterior(basis, n, window=None, step=None):
    """Grid supremum of xi_n^2 on [T, T + 40/W], refined at the grid maximum."""
    T, W = basis.T, basis.W
    L = window if window is not None else 40.0 / W
    h = step if step is not None else math.pi / (8 * W)
    grid = np.arange(T, T + L + 0.5 * h, h)
    v = eval_xi(basis, n, grid) ** 2
    j = int(np.argmax(v))
    f = lambda x: eval_xi(basis, n, np.array([x]))[0] ** 2
    return max(float(v[j]), _golden_max(f, T, T + L, grid[j], h))


def sup_interior(basis, n, step=None):
    """Grid supremum of xi_n^2 on [0, T] (parity makes [0, T] enough)."""
    T, W = basis.T, basis.W
    h = step if step is not None else min(math.pi / (8 * W), T / 200.0)
    grid = np.linspace(0.0, T, max(int(math.ceil(T / h)), 2) + 1)
    v = eval_xi(basis, n, grid) ** 2
    j = int(np.argmax(v))
    f = lambda x: eval_xi(basis, n, np.array([x]))[0] ** 2
    return max(float(v[j]), _golden_max(f, 0.0, T, grid[j], grid[1] - grid[0]))


def bound_report(basis, n):
    _check_index(basis, n)
    omg = float(basis.one_minus_gamma[n])
    if omg < 1e-300:
        raise UnderflowError("1 - gamma_%d underflows; use asymptotic_sup_extra" % n)
    p = prefactors(basis, n)
    T = basis.T
    g, lam, xT2, D = p["gamma"], p["lam"], p["xi_T_sq"], p["D"]
    dT = g * D + (lam / T) * xT2
    dout = omg * D - (lam / T) * xT2
    return BoundReport(
        n=n, gamma=g, one_minus_gamma=omg, lam=lam,
        c_extra=p["c_extra"], c_intra=p["c_intra"], c_intra_tilde=p["c_intra_tilde"],
        c_n=p["c_n"], xi_T_sq=xT2, deriv_total_sq=D, deriv_T_sq=dT, deriv_out_sq=dout,
        sup_out_numeric=sup_exterior(basis, n), sup_in_numeric=sup_interior(basis, n),
        sup_out_bound=omg * p["c_extra"], sup_in_bound=g * p["c_intra_tilde"],
        deriv_T_printed=g * p["c_intra"], deriv_T_squared=g * p["c_intra"] ** 2,
    )


def edge_bounds(basis, n):
    """Upper bounds on xi_n(T)^2 from outside and (n > 0) from inside.

    The inside bound only holds for n > 0; for n = 0 it is returned as None.
    """
    p = prefactors(basis, n)
    half = p["lam"] / (2 * basis.T)
    extra = p["one_minus_gamma"] * (p["c_n"] - half)
    intra = p["gamma"] * (p["c_n"] + half) if n > 0 else None
    return extra, intra


def asymptotic_sup_extra(c, n, W=1.0):
    """Large-c two-term asymptotic of (1 - gamma_n) C_extra,n."""
    if c <= 0:
        raise ValidationError("c must be positive")
    if c < 5:
        warnings.warn("asymptotic_sup_extra is a large-c form; c=%g < 5" % c, stacklevel=2)
    n = int(n)
    logv = (math.log(4 * math.sqrt(math.pi)) + 3 * n * math.log(2.0)
            + (n + 1.5) * math.log(c) - 2 * c - math.lgamma(n + 1))
    return W * math.exp(logv) * (1.0 - (6 * n * n + 62 * n + 35) / (32.0 * c))


def c_extra_coarse(c, W=1.0):
    """W (sqrt(1 + c^2/4) + c/2) with its small/large-c expansion.

    Returns (exact, expansion).
    """
    if c < 0:
        raise ValidationError("c must be non-negative")
    exact = W * (math.sqrt(1.0 + c * c / 4.0) + c / 2.0)
    if c >= 1:
        approx = W * (c + 1.0 / c) if c > 0 else W
    else:
        # first order is c/2: sqrt(1 + c^2/4) = 1 + O(c^2)
        approx = W * (1.0 + c / 2.0)
    return exact, approx
