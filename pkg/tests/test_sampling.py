import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prolate_fd.errors import DimensioningError, ValidationError
from prolate_fd.pswf import eval_xi
from prolate_fd.sampling import (
    SampleGrid, discrete_orthogonality_residual, interior_index, parseval_energy,
    prolate_coefficients, prolate_sampling_truncated, sampling_prefactor, shannon_interpolate,
    span_truncation_bound, tail_sample_bound, truncation_error_bound,
)


def test_grid_validation():
    with pytest.raises(ValidationError):
        SampleGrid(W=0.0, k_min=0, k_max=1, values=[1, 2])
    with pytest.raises(ValidationError):
        SampleGrid(W=1.0, k_min=0, k_max=2, values=[1, 2])
    g = SampleGrid(W=2.0, k_min=-1, k_max=1, values=[1, 2, 3])
    assert np.allclose(g.times, [-math.pi / 2, 0, math.pi / 2])
    with pytest.raises(DimensioningError):
        g.restrict(2)


def test_shannon_exact_at_nodes():
    rng = np.random.default_rng(0)
    g = SampleGrid(W=3.0, k_min=-5, k_max=5, values=rng.normal(size=11))
    assert np.allclose(shannon_interpolate(g, g.times), g.values, rtol=0, atol=1e-14)


def test_shannon_reconstructs_bandlimited():
    # sinc^2 is band-limited to 2a; W = 2a samples it at Nyquist
    a = 1.0
    f = lambda t: np.sinc(a * t / math.pi) ** 2
    g = SampleGrid.from_function(f, W=2 * a, K=4000)
    t = np.linspace(-5, 5, 37)
    assert np.allclose(shannon_interpolate(g, t).real, f(t), atol=1e-5)


def test_parseval_matches_norm(basis5):
    # ||xi_n||_R = 1, sampled at the basis bandwidth
    g = SampleGrid.from_function(lambda t: eval_xi(basis5, 2, t), basis5.W, 3000)
    assert parseval_energy(g) == pytest.approx(1.0, abs=1e-3)


def test_interior_index(basis10):
    assert interior_index(basis10) == int(10 / math.pi)


def test_truncated_sampling_of_single_prolate(basis10):
    # f = xi_0, reconstructed with one prolate from the interior samples only
    f = lambda t: eval_xi(basis10, 0, t)
    g = SampleGrid.from_function(f, basis10.W, 10)
    x, w = basis10.nodes, basis10.weights
    err = np.dot(w, np.abs(prolate_sampling_truncated(basis10, g, 1, x) - f(x)) ** 2)
    assert err < 1e-12


def test_span_bound_holds(basis10):
    rng = np.random.default_rng(4)
    N = int(basis10.spec.c_tilde) - 2
    for _ in range(5):
        coef = rng.normal(size=N)
        f = lambda t: coef @ np.array([eval_xi(basis10, n, t) for n in range(N)])
        g = SampleGrid.from_function(f, basis10.W, 10)
        x, w = basis10.nodes, basis10.weights
        err = np.dot(w, np.abs(prolate_sampling_truncated(basis10, g, N + 1, x) - f(x)) ** 2)
        assert err <= span_truncation_bound(basis10, N, np.linalg.norm(coef))


def test_coefficients_need_matching_bandwidth(basis10):
    g = SampleGrid.from_function(lambda t: 0 * t, 7.0, 10)
    with pytest.raises(ValidationError):
        prolate_coefficients(basis10, g, 2)
    with pytest.raises(DimensioningError):
        prolate_coefficients(basis10, SampleGrid.from_function(lambda t: 0 * t, 10.0, 10), 99)


def test_discrete_orthogonality(basis10):
    d = discrete_orthogonality_residual(basis10, 2000)
    assert d.res_kl < 1e-9 + d.tail_kl
    assert d.res_nm <= 2 * d.tail_nm
    res_kl, res_nm = d
    assert res_kl == d.res_kl
    # the k-sum converges: more terms, smaller residual
    assert discrete_orthogonality_residual(basis10, 8000).res_nm < d.res_nm
    with pytest.raises(DimensioningError):
        discrete_orthogonality_residual(basis10, 1)


@settings(max_examples=40)
@given(e=st.floats(0, 10), ep=st.floats(0, 10))
def test_tail_sample_bound_monotone(e, ep):
    b = tail_sample_bound(e, ep)
    assert b >= e
    assert tail_sample_bound(e + 1, ep) >= b


def test_tail_sample_bound_rejects_negative():
    with pytest.raises(ValidationError):
        tail_sample_bound(-1.0, 0.0)


def test_truncation_error_bound_components(basis10):
    base = truncation_error_bound(basis10, 0.0, 0.0, 0.0, 3)
    assert base == 0.0
    b1 = truncation_error_bound(basis10, 1e-3, 1e-1, 0.0, 3)
    b2 = truncation_error_bound(basis10, 1e-3, 1e-1, 0.5, 3)
    assert b2 == pytest.approx(b1 + 0.5)
    assert sampling_prefactor(basis10, 0) > 1.0
    with pytest.raises(ValidationError):
        truncation_error_bound(basis10, 0.0, 0.0, -1.0, 3)
