"""Boundary value problems -eps w'' + a w' + b w = f on (0, 1), w(0) = w(1) = 0."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

Func = Callable[[np.ndarray], np.ndarray]

_GRID = np.linspace(0.0, 1.0, 1001)
_FD_STEP = 1e-6


class ProblemError(ValueError):
    """Problem data outside the hypotheses a >= alpha > 0, b - a'/2 >= gamma > 0."""


def _central_difference(g: Func, x: np.ndarray, h: float = _FD_STEP) -> np.ndarray:
    return (g(x + h) - g(x - h)) / (2 * h)


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """One instance of the convection-diffusion problem.

    ``exact`` is an optional triple ``(w, w', w'')``. ``a_prime`` is used when
    given; otherwise a' is taken by central differences.
    """

    epsilon: float
    a: Func
    b: Func
    f: Func
    alpha: float
    gamma: float
    exact: Optional[tuple[Func, Func, Func]] = None
    a_prime: Optional[Func] = None
    name: str = "custom"

    def da(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.a_prime is not None:
            return np.broadcast_to(self.a_prime(x), x.shape).astype(float)
        return _central_difference(self.a, x)

    def validate(self) -> None:
        if not self.epsilon > 0:
            raise ProblemError("epsilon must be positive")
        a = np.broadcast_to(self.a(_GRID), _GRID.shape)
        if np.min(a) < self.alpha or not self.alpha > 0:
            raise ProblemError(f"a(x) >= alpha = {self.alpha} violated (min a = {np.min(a)})")
        if not self.gamma > 0 or coercivity_constant(self) < self.gamma - 1e-12:
            raise ProblemError(f"b - a'/2 >= gamma = {self.gamma} violated")


def coercivity_constant(spec: ProblemSpec) -> float:
    """min of b - a'/2 over a 1001-point grid; raises if it is not positive."""
    x = _GRID
    val = np.broadcast_to(spec.b(x), x.shape) - 0.5 * spec.da(x)
    g = float(np.min(val))
    if g <= 0:
        raise ProblemError(f"b - a'/2 has minimum {g:.6g} <= 0")
    return g


def make_test_problem(epsilon: float) -> ProblemSpec:
    """-eps w'' + (3 - x) w' + w = f with exact solution x (1 - exp(-2 (1 - x) / eps)).

    f is written so that no O(1/eps) terms cancel: with t = (1 - x)/eps and
    E = exp(-2 t), f = 3 + E - 2 x t E.
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    eps = float(epsilon)

    def layer(x):
        return np.exp(-2.0 * (1.0 - np.asarray(x, dtype=float)) / eps)

    def w(x):
        x = np.asarray(x, dtype=float)
        return x * (1.0 - layer(x))

    def dw(x):
        x = np.asarray(x, dtype=float)
        return 1.0 - layer(x) * (1.0 + 2.0 * x / eps)

    def d2w(x):
        x = np.asarray(x, dtype=float)
        return -4.0 * layer(x) / eps * (1.0 + x / eps)

    def f(x):
        x = np.asarray(x, dtype=float)
        t = (1.0 - x) / eps
        E = np.exp(-2.0 * t)
        return 3.0 + E - 2.0 * x * t * E

    def a(x):
        return 3.0 - np.asarray(x, dtype=float)

    def b(x):
        return np.ones_like(np.asarray(x, dtype=float))

    def da(x):
        return -np.ones_like(np.asarray(x, dtype=float))

    return ProblemSpec(
        epsilon=eps,
        a=a,
        b=b,
        f=f,
        alpha=2.0,
        gamma=1.5,
        exact=(w, dw, d2w),
        a_prime=da,
        name="outflow-layer",
    )


def make_polynomial_problem(
    epsilon: float, coeffs, a: float = 1.0, b: float = 1.0
) -> ProblemSpec:
    """Constant-coefficient problem whose exact solution is the polynomial
    ``sum(coeffs[i] * x**i)`` (must vanish at 0 and 1)."""
    poly = np.polynomial.Polynomial(coeffs)
    if abs(poly(0.0)) > 1e-14 or abs(poly(1.0)) > 1e-14:
        raise ValueError("polynomial must satisfy homogeneous boundary data")
    d1, d2 = poly.deriv(1), poly.deriv(2)

    def f(x):
        return -epsilon * d2(x) + a * d1(x) + b * poly(x)

    return ProblemSpec(
        epsilon=epsilon,
        a=lambda x: np.full_like(np.asarray(x, dtype=float), a),
        b=lambda x: np.full_like(np.asarray(x, dtype=float), b),
        f=f,
        alpha=a,
        gamma=b,
        exact=(poly, d1, d2),
        a_prime=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        name="polynomial",
    )


PROBLEMS = {"outflow-layer": make_test_problem}
