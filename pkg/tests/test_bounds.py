import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from prolate_fd.bounds import (
    asymptotic_sup_extra, bound_report, c_extra_coarse, edge_bounds, prefactors,
    sup_exterior, sup_interior,
)
from prolate_fd.errors import ValidationError
from prolate_fd.pswf import (
    BandTimeSpec, build_basis, derivative_energy, eval_xi, eval_xi_deriv, exterior_energies,
)


def n_range(b):
    return range(int(math.ceil(b.spec.c_tilde)) + 3)


@pytest.mark.parametrize("fixture", ["basis5", "basis10"])
def test_supremum_bounds_hold(fixture, request):
    b = request.getfixturevalue(fixture)
    for n in n_range(b):
        r = bound_report(b, n)
        assert r.sup_out_numeric <= r.sup_out_bound
        assert r.sup_in_numeric <= r.sup_in_bound


def test_interior_sup_is_attained_value(basis5):
    # a fine uniform grid never beats the refined search
    for n in (0, 3):
        t = np.linspace(0, 1, 20001)
        assert np.max(eval_xi(basis5, n, t) ** 2) <= sup_interior(basis5, n) * (1 + 1e-12)
        t = np.linspace(1, 9, 40001)
        assert np.max(eval_xi(basis5, n, t) ** 2) <= sup_exterior(basis5, n) * (1 + 1e-9)


def test_derivative_split_sums_to_total(basis10):
    for n in n_range(basis10):
        r = bound_report(basis10, n)
        assert r.deriv_T_sq + r.deriv_out_sq == pytest.approx(r.deriv_total_sq, rel=1e-14)
        assert r.deriv_T_squared == pytest.approx(r.deriv_T_sq, rel=1e-12)


def test_interior_derivative_identity_scipy_quad(basis10):
    for n in (0, 2, 5, 8):
        f = lambda t: eval_xi_deriv(basis10, n, np.array([t]))[0] ** 2
        direct = integrate.quad(f, -1, 1, limit=400, epsabs=0, epsrel=1e-13)[0]
        r = bound_report(basis10, n)
        assert direct == pytest.approx(r.deriv_T_sq, rel=1e-9)


def test_exterior_derivative_identity(basis10):
    for n in n_range(basis10):
        r = bound_report(basis10, n)
        e = exterior_energies(basis10, n)
        assert e["out_deriv_energy"] == pytest.approx(r.deriv_out_sq, rel=1e-8)


def test_total_derivative_energy_plancherel(basis5):
    # int_R xi'^2 = (1/2pi) int w^2 |hat xi|^2 with |hat xi|^2 = 2 pi xi~^2 / ... on [-W, W]
    from prolate_fd.pswf import eval_xi_freq
    for n in (0, 1, 4):
        f = lambda w: w * w * eval_xi_freq(basis5, n, np.array([w]))[0] ** 2
        val = integrate.quad(f, -5, 5, limit=200)[0] / basis5.gamma[n]
        assert val == pytest.approx(derivative_energy(basis5, n), rel=1e-10)


def test_prefactor_positivity_and_edge(basis10):
    for n in n_range(basis10):
        p = prefactors(basis10, n)
        assert p["c_extra"] > 0 and p["c_intra"] > 0 and p["c_n"] > 0
        extra, intra = edge_bounds(basis10, n)
        assert p["xi_T_sq"] <= extra * (1 + 1e-12)
        if n == 0:
            assert intra is None
        else:
            assert p["xi_T_sq"] <= intra * (1 + 1e-12)


@pytest.mark.parametrize("c", [10.0, 20.0, 30.0])
def test_asymptotic_dominates_exact_bound(c):
    # the expansion runs through C_extra <= sqrt(W^2 + lam^2/4T^2) - lam/2T ~ W c,
    # so it overestimates the exact product, by a factor that grows slowly with c
    b = build_basis(BandTimeSpec.from_any(c=c, T=1), 3)
    for n in (0, 1, 2):
        r = bound_report(b, n)
        a = asymptotic_sup_extra(c, n, W=b.W)
        assert r.sup_out_bound <= a <= 10 * r.sup_out_bound


def test_asymptotic_warns_small_c():
    with pytest.warns(UserWarning):
        asymptotic_sup_extra(2.0, 0)
    with pytest.raises(ValidationError):
        asymptotic_sup_extra(0.0, 0)


def test_coarse_c_extra():
    exact, approx = c_extra_coarse(10.0, W=2.0)
    assert exact == pytest.approx(2 * (math.sqrt(26) + 5))
    assert approx == pytest.approx(exact, rel=1e-3)
    exact, approx = c_extra_coarse(0.01)
    assert approx == pytest.approx(exact, rel=1e-4)
    with pytest.raises(ValidationError):
        c_extra_coarse(-1.0)
