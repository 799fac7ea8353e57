"""Broken polynomial functions (modal Legendre) and smooth sampled functions.

Both expose the same small surface used by the flux and norm code:
``element_values(xhat, deriv)`` on every element at reference points and
``traces(deriv)`` giving one-sided limits at the mesh nodes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import legendre_table
from .mesh import Mesh


@dataclass(frozen=True, eq=False)
class DGFunction:
    """Member of the broken space V_h: row j of ``coeffs`` holds the
    Legendre coefficients on element I_{j+1} in the local variable
    xhat = 2 (x - x_mid) / h."""

    k: int
    mesh: Mesh
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.mesh.N, self.k + 1):
            raise ValueError(f"coeffs shape {c.shape} != {(self.mesh.N, self.k + 1)}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, k: int, mesh: Mesh) -> "DGFunction":
        return cls(k, mesh, np.zeros((mesh.N, k + 1)))

    @classmethod
    def random(cls, k: int, mesh: Mesh, rng: np.random.Generator) -> "DGFunction":
        return cls(k, mesh, rng.uniform(-1.0, 1.0, size=(mesh.N, k + 1)))

    def _check(self, other: "DGFunction") -> None:
        if other.mesh is not self.mesh or other.k != self.k:
            raise ValueError("DGFunctions live on different spaces")

    def __add__(self, other: "DGFunction") -> "DGFunction":
        self._check(other)
        return DGFunction(self.k, self.mesh, self.coeffs + other.coeffs)

    def __sub__(self, other: "DGFunction") -> "DGFunction":
        self._check(other)
        return DGFunction(self.k, self.mesh, self.coeffs - other.coeffs)

    def __mul__(self, c: float) -> "DGFunction":
        return DGFunction(self.k, self.mesh, c * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> "DGFunction":
        return DGFunction(self.k, self.mesh, -self.coeffs)

    def element_values(self, xhat, deriv: int = 0) -> np.ndarray:
        """Shape (N, len(xhat)): the derivative of order ``deriv`` on each element."""
        table = legendre_table(self.k, np.atleast_1d(xhat))[deriv]
        scale = (2.0 / self.mesh.widths) ** deriv
        return (self.coeffs @ table) * scale[:, None]

    def __call__(self, x, deriv: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        j = self.mesh.locate(x)
        xhat = 2.0 * (x - self.mesh.midpoints[j]) / self.mesh.widths[j]
        table = np.moveaxis(legendre_table(self.k, xhat)[deriv], 0, -1)
        vals = np.sum(self.coeffs[j] * table, axis=-1)
        return vals * (2.0 / self.mesh.widths[j]) ** deriv

    def traces(self, deriv: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """(v(x_j^-), v(x_j^+)) for j = 0..N; undefined sides are NaN."""
        ends = self.element_values(np.array([-1.0, 1.0]), deriv)
        N = self.mesh.N
        minus = np.full(N + 1, np.nan)
        plus = np.full(N + 1, np.nan)
        minus[1:] = ends[:, 1]
        plus[:-1] = ends[:, 0]
        return minus, plus


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """A smooth function given by callables; one-sided traces coincide."""

    value: Callable
    derivative: Optional[Callable] = None
    second: Optional[Callable] = None

    def _fn(self, deriv: int) -> Callable:
        fn = (self.value, self.derivative, self.second)[deriv]
        if fn is None:
            raise ValueError(f"derivative of order {deriv} not supplied")
        return fn

    def __call__(self, x, deriv: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self._fn(deriv)(x), x.shape).astype(float)

    def element_values(self, xhat, deriv: int = 0, mesh: Mesh = None) -> np.ndarray:
        x = mesh.midpoints[:, None] + 0.5 * mesh.widths[:, None] * np.atleast_1d(xhat)
        return self(x, deriv)

    def traces(self, deriv: int = 0, mesh: Mesh = None) -> tuple[np.ndarray, np.ndarray]:
        vals = self(mesh.nodes, deriv)
        minus, plus = vals.copy(), vals.copy()
        minus[0] = np.nan
        plus[-1] = np.nan
        return minus, plus

    @classmethod
    def from_exact(cls, exact) -> "SampledFunction":
        return cls(*exact)


def element_values(u, mesh: Mesh, xhat, deriv: int = 0) -> np.ndarray:
    if isinstance(u, DGFunction):
        return u.element_values(xhat, deriv)
    return u.element_values(xhat, deriv, mesh=mesh)


def traces(u, mesh: Mesh, deriv: int = 0) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(u, DGFunction):
        return u.traces(deriv)
    return u.traces(deriv, mesh=mesh)


def jumps(minus: np.ndarray, plus: np.ndarray) -> np.ndarray:
    """[v]_j = v(x_j^+) - v(x_j^-), with [v]_0 = v(x_0^+) and [v]_N = -v(x_N^-)."""
    out = np.empty_like(minus)
    out[1:-1] = plus[1:-1] - minus[1:-1]
    out[0] = plus[0]
    out[-1] = -minus[-1]
    return out


def averages(minus: np.ndarray, plus: np.ndarray) -> np.ndarray:
    """{v}_j, with {v}_0 = v(x_0^+) and {v}_N = v(x_N^-)."""
    out = np.empty_like(minus)
    out[1:-1] = 0.5 * (plus[1:-1] + minus[1:-1])
    out[0] = plus[0]
    out[-1] = minus[-1]
    return out
