import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, linalg

from prolate_fd.errors import DimensioningError, ValidationError
from prolate_fd.pswf import (
    BandTimeSpec, basis_from_json, basis_to_json, build_basis, build_until,
    derivative_energy, eval_xi, eval_xi_deriv, eval_xi_freq, exterior_energies,
    fuchs_asymptotic, gamma_pair, residual_fourier_eigenrelation,
    residual_integral_eigenrelation, residual_ode, sign_changes, transition_signature,
)


def nystrom_gamma(T, W, n_nodes=400):
    """Eigenvalues of the time-band limiting operator by Gauss-Legendre Nystrom."""
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    x, w = T * x, T * w
    d = x[:, None] - x[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        K = np.sin(W * d) / (math.pi * d)
    K[np.arange(n_nodes), np.arange(n_nodes)] = W / math.pi
    sw = np.sqrt(w)
    return np.sort(linalg.eigvalsh(sw[:, None] * K * sw[None, :]))[::-1]


# -- construction -----------------------------------------------------------

def test_spec_from_any_derives_third():
    s = BandTimeSpec.from_any(c=10, T=2)
    assert s.W == pytest.approx(5.0)
    assert s.c_tilde == pytest.approx(20 / math.pi)


@pytest.mark.parametrize("kw", [dict(c=1), dict(c=1, T=1, W=1), dict(c=0, T=1), dict(T=-1, W=1)])
def test_spec_rejects_bad_input(kw):
    with pytest.raises(ValidationError):
        BandTimeSpec.from_any(**kw)


def test_gamma_matches_nystrom(basis10):
    ref = nystrom_gamma(1.0, 10.0)
    assert np.allclose(basis10.gamma, ref[: basis10.count], atol=1e-12)
    # exterior mass through the Nystrom complement, where it still has digits
    for n in range(basis10.count):
        if 1 - ref[n] > 1e-8:
            assert basis10.one_minus_gamma[n] == pytest.approx(1 - ref[n], rel=1e-6)


def test_gamma_plus_complement_is_one(basis10):
    g, o = basis10.gamma, basis10.one_minus_gamma
    assert np.all(np.abs(g + o - 1.0) < 1e-15)
    assert np.all(np.diff(g) < 0)


def test_chi_increasing_and_lambda_convention(basis5):
    assert np.all(np.diff(basis5.chi) > 0)
    assert np.allclose(basis5.lam, basis5.chi - basis5.c ** 2)


def test_eigenrelations(basis10):
    p = np.linspace(-2, 2, 41)
    for n in range(basis10.count):
        # the convolution cancels down to gamma_n xi_n: rounding grows like 1/gamma_n
        if basis10.gamma[n] > 1e-4:
            assert residual_integral_eigenrelation(basis10, n, p) < 1e-11 / basis10.gamma[n]
        assert residual_fourier_eigenrelation(basis10, n, p) < 1e-10
        assert residual_ode(basis10, n, np.linspace(-1, 1, 33)) < 1e-11


def test_sign_changes_equal_index(basis10):
    assert [sign_changes(basis10, n) for n in range(basis10.count)] == list(range(basis10.count))


def test_sign_convention_first_coefficient_positive(basis5):
    for row in basis5.coeffs:
        big = np.flatnonzero(np.abs(row) > 1e-8 * np.max(np.abs(row)))
        assert row[big[0]] > 0


def test_derivative_matches_finite_difference(basis10):
    t = np.array([-2.7, -1.3, -0.4, 0.0, 0.31, 0.99, 1.01, 1.8, 3.5])
    h = 1e-5
    for n in (0, 3, 7, 12):
        fd = (eval_xi(basis10, n, t + h) - eval_xi(basis10, n, t - h)) / (2 * h)
        assert np.allclose(eval_xi_deriv(basis10, n, t), fd, atol=1e-7)


def test_unit_real_line_norm_by_direct_quadrature(basis5):
    # interior by Gauss-Legendre, exterior by adaptive quad over panels
    for n in (0, 2, 5):
        f = lambda t: eval_xi(basis5, n, np.array([t]))[0] ** 2
        inner = integrate.quad(f, -1, 1, limit=200)[0]
        L = 400
        panels = [integrate.quad(f, a, a + 1, limit=200)[0] for a in range(1, L)]
        # xi^2 ~ A/t^2 far out; A from the last 100 panels, tail past L is A/L
        mids = np.arange(L - 100, L) + 0.5
        A = np.mean(np.array(panels[-100:]) * mids ** 2)
        outer = 2 * (sum(panels) + A / L)
        assert inner == pytest.approx(basis5.gamma[n], abs=1e-10)
        assert inner + outer == pytest.approx(1.0, abs=1e-5)
        assert outer == pytest.approx(basis5.one_minus_gamma[n], rel=1e-3)


def test_exterior_energy_route_agrees(basis10):
    for n in range(8):
        e = exterior_energies(basis10, n)
        assert e["out_energy"] == pytest.approx(basis10.one_minus_gamma[n], rel=1e-9)


def test_frequency_side_is_scaled_interior_profile(basis5):
    w = np.linspace(-4.9, 4.9, 7)
    n = 3
    lhs = eval_xi_freq(basis5, n, w)
    assert np.allclose(lhs, math.sqrt(1 / 5) * eval_xi(basis5, n, w / 5))


def test_derivative_energy_by_quadrature(basis5):
    for n in (0, 1, 4):
        f = lambda t: eval_xi_deriv(basis5, n, np.array([t]))[0] ** 2
        inner = integrate.quad(f, -1, 1, limit=200)[0]
        lam, g = basis5.lam[n], basis5.gamma[n]
        identity = g * derivative_energy(basis5, n) + lam * basis5.xi_at_T(n) ** 2
        assert inner == pytest.approx(identity, rel=1e-9)


def test_legendre_limit():
    b = build_basis(BandTimeSpec.from_any(c=1e-4, T=1), 6)
    assert np.allclose(b.lam, [n * (n + 1) for n in range(6)], atol=1e-3)


def test_hilbert_schmidt_sum_small_c():
    b = build_until(BandTimeSpec.from_any(c=2, T=1))
    assert np.sum(b.gamma) == pytest.approx(4 / math.pi, rel=1e-8)


def test_fuchs_n0_close():
    b = build_basis(BandTimeSpec.from_any(c=10, T=1), 3)
    assert b.one_minus_gamma[0] == pytest.approx(fuchs_asymptotic(10, 0), rel=0.05)


def test_tiny_gamma_continuation_finite():
    b = build_basis(BandTimeSpec.from_any(c=5, T=1), 24)
    assert b.gamma[-1] < 1e-12
    v = eval_xi(b, 23, np.array([0.5, 1.5, 4.0]))
    assert np.all(np.isfinite(v))
    p = np.linspace(-2, 2, 21)
    # rounding in the interior integral is eps/|mu_n| in xi units
    assert residual_fourier_eigenrelation(b, 23, p) < 1e-4
    assert residual_fourier_eigenrelation(b, 12, p) < 1e-10


def test_parity_and_gamma_pair(basis5):
    t = np.linspace(0.05, 3, 17)
    for n in range(6):
        assert np.allclose(eval_xi(basis5, n, -t), (-1) ** n * eval_xi(basis5, n, t))
    assert gamma_pair(basis5, 2) == (basis5.gamma[2], basis5.one_minus_gamma[2])


def test_index_errors(basis5):
    with pytest.raises(ValidationError):
        eval_xi(basis5, basis5.count, 0.0)
    with pytest.raises(ValidationError):
        build_basis(BandTimeSpec(1, 1), 0)


def test_serialization_roundtrip(basis5, tmp_path):
    text = basis_to_json(basis5)
    assert basis_to_json(basis5) == text
    back = basis_from_json(text)
    t = np.linspace(-3, 3, 13)
    for n in range(basis5.count):
        assert np.allclose(eval_xi(back, n, t), eval_xi(basis5, n, t), atol=1e-14)
    assert basis_to_json(back) == text


def test_serialization_rejects_garbage():
    with pytest.raises(ValidationError):
        basis_from_json("{not json")
    with pytest.raises(ValidationError):
        basis_from_json('{"T": 1}')


def test_transition_signature_reported():
    b = build_basis(BandTimeSpec.from_any(c=10, T=1), 12)
    s = transition_signature(b)
    assert s.index == 6
    assert s.holds
    with pytest.raises(DimensioningError):
        transition_signature(build_basis(BandTimeSpec.from_any(c=10, T=1), 5))


@settings(max_examples=15, deadline=None)
@given(c=st.floats(0.5, 12.0), n=st.integers(0, 5))
def test_concentration_in_unit_interval(c, n):
    b = build_basis(BandTimeSpec.from_any(c=c, T=1), 6)
    g, o = b.gamma[n], b.one_minus_gamma[n]
    assert 0 < g < 1 and 0 < o < 1
    assert abs(g + o - 1) < 1e-14
    assert abs(b.mu[n]) == pytest.approx(math.sqrt(2 * math.pi * g), rel=1e-12)
