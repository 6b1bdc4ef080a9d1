"""Gauss-Legendre helpers.

Nodes come from numpy's ``leggauss``; everything here is thin plumbing
around it (scaling, panelling, caching).
"""
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.polynomial.laguerre import laggauss


@lru_cache(maxsize=64)
def _gl_ref(n):
    x, w = leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


@lru_cache(maxsize=16)
def _glag_ref(n):
    x, w = laggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre(a, b, n):
    """n-point Gauss-Legendre rule on [a, b]."""
    x, w = _gl_ref(int(n))
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * x, half * w


def gauss_laguerre(n):
    """n-point Gauss-Laguerre rule for weight exp(-x) on [0, inf)."""
    return _glag_ref(int(n))


def composite_gauss(a, b, width, order):
    """Split [a, b] into panels no wider than ``width``, ``order`` nodes each."""
    npan = max(1, int(np.ceil((b - a) / width)))
    edges = np.linspace(a, b, npan + 1)
    x0, w0 = _gl_ref(int(order))
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    w = (half[:, None] * w0[None, :]).ravel()
    return x, w


def symmetric_nodes(T, order):
    """Gauss nodes on [-T, 0] and [0, T], ``order`` nodes per half."""
    x, w = gauss_legendre(0.0, T, order)
    return np.concatenate([-x[::-1], x]), np.concatenate([w[::-1], w])


def integrate_adaptive(f, a, b, order=200, rtol=1e-12, max_doublings=6):
    """Integrate a smooth f, doubling the order until successive values agree.

    Returns (value, order_used).  f must accept a vector of nodes.
    """
    prev = None
    n = int(order)
    for _ in range(max_doublings + 1):
        x, w = gauss_legendre(a, b, n)
        val = np.dot(w, f(x))
        if prev is not None:
            scale = max(abs(val), abs(prev), np.finfo(float).tiny)
            if abs(val - prev) <= rtol * scale:
                return val, n
        prev = val
        n *= 2
    return val, n // 2
