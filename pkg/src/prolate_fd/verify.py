"""Invariant suites driven by ``prolate-fd verify``.

Each suite returns a list of plain-dict records; a record with
``"violation": True`` counts against the exit status.
"""
import math

import numpy as np

from .bounds import bound_report
from .errors import DimensioningError, UnderflowError, ValidationError
from .gep import Gep, solve_gep
from .pswf import eval_xi, transition_signature
from .sampling import (
    SampleGrid, discrete_orthogonality_residual, prolate_sampling_truncated,
    span_truncation_bound,
)
from .trials import FAMILIES, run_family

SUITES = ("bounds", "orthogonality", "sampling", "gep", "signature")
GRAM_TOL = 1e-9


def bounds_suite(basis, n_max=None):
    if n_max is None:
        n_max = int(math.ceil(basis.spec.c_tilde)) + 2
    out = []
    for n in range(min(n_max, basis.count - 1) + 1):
        try:
            r = bound_report(basis, n)
        except UnderflowError as exc:
            out.append({"suite": "bounds", "n": n, "skipped": str(exc), "violation": False})
            continue
        bad = r.sup_out_numeric > r.sup_out_bound or r.sup_in_numeric > r.sup_in_bound
        out.append({
            "suite": "bounds", "n": n,
            "sup_out": r.sup_out_numeric, "sup_out_bound": r.sup_out_bound,
            "sup_in": r.sup_in_numeric, "sup_in_bound": r.sup_in_bound,
            "violation": bool(bad),
        })
    return out


def continuous_gram(basis):
    """(interior Gram - diag(gamma), real-line Gram - I) as max deviations.

    The real-line Gram goes through the Fourier side: the transform of xi_n
    is supported on [-W, W] with profile proportional to u_n = xi_n/sqrt(gamma_n),
    so int_R xi_n xi_m = <u_n, u_m>_T.
    """
    X = basis.xi_nodes
    G = (X * basis.weights) @ X.T
    interior = float(np.max(np.abs(G - np.diag(basis.gamma))))
    s = 1.0 / np.sqrt(basis.gamma)
    line = float(np.max(np.abs(G * s[:, None] * s[None, :] - np.eye(basis.count))))
    return interior, line


def orthogonality_suite(basis, K=None):
    interior, line = continuous_gram(basis)
    if K is None:
        K = 40 * max(1, int(math.ceil(basis.T * basis.W / math.pi))) + 200
    d = discrete_orthogonality_residual(basis, K)
    return [
        {"suite": "orthogonality", "check": "interior_gram", "residual": interior,
         "tol": GRAM_TOL, "violation": interior > GRAM_TOL},
        {"suite": "orthogonality", "check": "real_line_gram", "residual": line,
         "tol": GRAM_TOL, "violation": line > GRAM_TOL},
        # the n-sum is truncated at the basis size: its tail is the last row's weight
        {"suite": "orthogonality", "check": "discrete_n_sum", "residual": d.res_kl,
         "tail": d.tail_kl, "violation": False},
        {"suite": "orthogonality", "check": "discrete_k_sum", "residual": d.res_nm,
         "tail": d.tail_nm, "K": d.K, "violation": d.res_nm > 2 * d.tail_nm + 1e-10},
    ]


def sampling_suite(basis, seed=0, N=None, K=None):
    if N is None:
        N = max(1, int(math.floor(basis.spec.c_tilde)) - 2)
    if N + 1 > basis.count:
        raise DimensioningError("sampling suite needs %d prolates" % (N + 1))
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=N)
    f = lambda t: coef @ np.array([eval_xi(basis, n, t) for n in range(N)])
    if K is None:
        K = int(math.floor(basis.T * basis.W / math.pi)) + 1
    grid = SampleGrid.from_function(f, basis.W, K)
    x, w = basis.nodes, basis.weights
    err = np.abs(prolate_sampling_truncated(basis, grid, N + 1, x) - f(x)) ** 2
    err = float(np.dot(w, err))
    fnorm = float(np.linalg.norm(coef))
    bound = span_truncation_bound(basis, N, fnorm)
    return [{"suite": "sampling", "N": N, "error_sq": err, "bound": bound,
             "f_norm_sq": fnorm ** 2, "violation": bool(err > bound)}]


def gep_suite(seed=0, trials=500):
    out = []
    toy = toy_gep()
    mu = solve_gep(toy).proper
    dev = float(np.max(np.abs(mu - np.array([1, -1]) * math.sqrt(2.0 / 3.0))))
    out.append({"suite": "gep", "check": "toy", "mu": list(mu), "deviation": dev,
                "violation": dev > 1e-12})
    for k, fam in enumerate(FAMILIES):
        rep = run_family(fam, trials, seed + k)
        d = rep.to_dict()
        d.update({"suite": "gep", "check": fam, "violation": not rep.ok()})
        out.append(d)
    return out


def toy_gep():
    """H = diag(-1, 0, 1) with guess vectors (1, 1, 1) and (1, 0, -1)."""
    H = np.diag([-1.0, 0.0, 1.0])
    V = np.array([[1.0, 1.0], [1.0, 0.0], [1.0, -1.0]])
    return Gep.from_vectors(H, V)


def signature_suite(basis):
    s = transition_signature(basis)
    return [{"suite": "signature", "index": s.index, "lambda_below": s.lambda_below,
             "lambda_above": s.lambda_above, "holds": s.holds, "degenerate": s.degenerate,
             "violation": False}]


def run_suite(name, basis=None, seed=0, trials=500):
    if name not in SUITES:
        raise ValidationError("unknown suite %r (choose from %s)" % (name, ", ".join(SUITES)))
    if name == "gep":
        return gep_suite(seed, trials)
    if basis is None:
        raise ValidationError("suite %r needs a basis" % name)
    if name == "bounds":
        return bounds_suite(basis)
    if name == "orthogonality":
        return orthogonality_suite(basis)
    if name == "sampling":
        return sampling_suite(basis, seed)
    return signature_suite(basis)
