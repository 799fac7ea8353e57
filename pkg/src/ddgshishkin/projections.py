"""Gauss-Radau projection, the global theta-projection, Gauss-Lobatto
interpolation and the composite interpolant built from them."""

from __future__ import annotations

import numpy as np

from .basis import gauss_legendre_rule, gauss_lobatto_nodes, legendre_table
from .functions import DGFunction, SampledFunction, element_values, traces
from .mesh import Mesh


def _as_function(w):
    if isinstance(w, (DGFunction, SampledFunction)):
        return w
    return SampledFunction(w)


def gauss_radau_project(w, mesh: Mesh, k: int, nquad: int | None = None) -> DGFunction:
    """Moments against P_0..P_{k-1} plus the value at each right endpoint."""
    if k < 1:
        raise ValueError("k must be >= 1")
    w = _as_function(w)
    rule = gauss_legendre_rule(nquad or 2 * k + 8)
    P = legendre_table(k - 1, rule.points)[0]
    vals = element_values(w, mesh, rule.points, 0)
    norm = (2 * np.arange(k) + 1) / 2.0
    coeffs = np.zeros((mesh.N, k + 1))
    coeffs[:, :k] = (vals * rule.weights) @ P.T * norm
    minus, _ = traces(w, mesh, 0)
    coeffs[:, k] = minus[1:] - coeffs[:, :k].sum(axis=1)
    return DGFunction(k, mesh, coeffs)


def theta_correction(eta, theta: float, k: int) -> np.ndarray:
    """Leading coefficients c_j of the correction E_j = c_j P_k.

    Solves theta c_j + (1 - theta) (-1)^k c_{j+1} = (1 - theta) eta_j for
    j = 1..N-1 with c_N = 0, by back substitution. ``eta`` has length N-1.
    """
    eta = np.asarray(eta, dtype=float)
    c = np.zeros(len(eta) + 1)
    sign = (-1.0) ** k
    for j in range(len(eta) - 1, -1, -1):
        c[j] = (1.0 - theta) * (eta[j] - sign * c[j + 1]) / theta
    return c


def global_theta_project(w, mesh: Mesh, k: int, theta: float, nquad: int | None = None) -> DGFunction:
    """Projection matching the moments up to degree k-1, the upwind-biased
    combination theta v(x_j^-) + (1-theta) v(x_j^+) at interior nodes and the
    value at x_N^-. Reduces to the Gauss-Radau projection for theta = 1."""
    if not 0.5 < theta <= 1.0:
        raise ValueError(f"theta must lie in (1/2, 1], got {theta}")
    w = _as_function(w)
    radau = gauss_radau_project(w, mesh, k, nquad)
    _, w_plus = traces(w, mesh, 0)
    _, r_plus = radau.traces(0)
    eta = (w_plus - r_plus)[1:-1]
    coeffs = radau.coeffs.copy()
    coeffs[:, k] += theta_correction(eta, theta, k)
    return DGFunction(k, mesh, coeffs)


def lobatto_points(mesh: Mesh, k: int) -> np.ndarray:
    """Mapped Gauss-Lobatto points, shape (N, k+1); endpoints are the mesh nodes."""
    z = gauss_lobatto_nodes(k)
    x = mesh.midpoints[:, None] + 0.5 * mesh.widths[:, None] * z
    x[:, 0] = mesh.nodes[:-1]
    x[:, -1] = mesh.nodes[1:]
    return x


def gauss_lobatto_interpolate(w, mesh: Mesh, k: int) -> DGFunction:
    """Elementwise Lagrange interpolant at the k+1 Gauss-Lobatto points."""
    w = _as_function(w)
    z = gauss_lobatto_nodes(k)
    V = legendre_table(k, z)[0]  # V[l, s] = P_l(z_s)
    vals = w(lobatto_points(mesh, k))
    coeffs = np.linalg.solve(V.T, vals.T).T
    return DGFunction(k, mesh, coeffs)


def composite_interpolant(w, mesh: Mesh, k: int, theta: float, nquad: int | None = None) -> DGFunction:
    """Theta-projection on the coarse elements 1..N/2, Gauss-Lobatto
    interpolant on the fine elements N/2+1..N."""
    half = mesh.N // 2
    coeffs = global_theta_project(w, mesh, k, theta, nquad).coeffs.copy()
    coeffs[half:] = gauss_lobatto_interpolate(w, mesh, k).coeffs[half:]
    return DGFunction(k, mesh, coeffs)


def projection_residuals(w, mesh: Mesh, k: int, theta: float, nquad: int | None = None) -> dict:
    """Largest violation of each defining condition of the theta-projection."""
    w = _as_function(w)
    proj = global_theta_project(w, mesh, k, theta, nquad)
    rule = gauss_legendre_rule(nquad or 2 * k + 8)
    P = legendre_table(k - 1, rule.points)[0]
    diff = element_values(w, mesh, rule.points, 0) - proj.element_values(rule.points)
    moments = (diff * rule.weights) @ P.T * (0.5 * mesh.widths[:, None])
    wm, wp = traces(w, mesh, 0)
    pm, pp = proj.traces(0)
    flux = (theta * (pm - wm) + (1 - theta) * (pp - wp))[1:-1]
    return {
        "moment": float(np.max(np.abs(moments))),
        "flux": float(np.max(np.abs(flux))) if len(flux) else 0.0,
        "endpoint": float(abs(pm[-1] - wm[-1])),
    }
