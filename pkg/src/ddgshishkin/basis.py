"""Legendre polynomials, Gauss-Legendre rules and Gauss-Lobatto nodes on [-1, 1]."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre as npleg


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.points)))


def legendre_table(k: int, xhat) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Values, first and second derivatives of P_0..P_k.

    Returns three arrays of shape ``(k + 1,) + np.shape(xhat)``. Uses the
    three-term recurrence together with
    P'_{n+1} = P'_{n-1} + (2n+1) P_n  and  P''_{n+1} = P''_{n-1} + (2n+1) P'_n,
    which keep P_l(+-1) = (+-1)^l exact in floating point.
    """
    x = np.asarray(xhat, dtype=float)
    P = np.zeros((k + 1,) + x.shape)
    dP = np.zeros_like(P)
    d2P = np.zeros_like(P)
    P[0] = 1.0
    if k >= 1:
        P[1] = x
        dP[1] = 1.0
    for n in range(1, k):
        P[n + 1] = ((2 * n + 1) * x * P[n] - n * P[n - 1]) / (n + 1)
        dP[n + 1] = dP[n - 1] + (2 * n + 1) * P[n]
        d2P[n + 1] = d2P[n - 1] + (2 * n + 1) * dP[n]
    return P, dP, d2P


def legendre_eval(l: int, xhat):
    """(P_l, P_l', P_l'') at ``xhat``."""
    if l < 0:
        raise ValueError("degree must be nonnegative")
    P, dP, d2P = legendre_table(l, xhat)
    return P[l], dP[l], d2P[l]


@lru_cache(maxsize=None)
def _gauss_legendre(n: int) -> QuadratureRule:
    pts, wts = npleg.leggauss(n)
    pts.setflags(write=False)
    wts.setflags(write=False)
    return QuadratureRule(points=pts, weights=wts, order=2 * n - 1)


def gauss_legendre_rule(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule, exact through degree 2n - 1."""
    if n < 1:
        raise ValueError("need at least one point")
    return _gauss_legendre(int(n))


@lru_cache(maxsize=None)
def _lobatto(k: int) -> tuple:
    nodes = np.empty(k + 1)
    nodes[0], nodes[-1] = -1.0, 1.0
    if k >= 2:
        s = np.arange(1, k)
        y = -np.cos(np.pi * s / k)
        for _ in range(100):
            _, dP, d2P = legendre_eval(k, y)
            step = dP / d2P
            y = y - step
            if np.max(np.abs(step)) < 1e-14:
                break
        # enforce exact symmetry about 0
        y = 0.5 * (y - y[::-1])
        nodes[1:-1] = y
    return tuple(nodes)


def gauss_lobatto_nodes(k: int) -> np.ndarray:
    """The k+1 Gauss-Lobatto points: +-1 and the roots of P_k'."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return np.array(_lobatto(int(k)))
