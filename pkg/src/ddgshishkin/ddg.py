"""Assembly and solution of the DDG scheme.

B(w, v) = sum_j int eps w' v' - a w v' - a' w v + b w v
          + sum_{j=0}^{N} eps (what_j [v]_j + [w]_j {v'}_j) - a(x_j) wtilde_j [v]_j,
F(v)    = sum_j int f v,

with the diffusive flux
    what_j = beta0_j / dh_j [w]_j + {w'}_j + beta1 dh_j [w'']_j     (interior)
and the upwind-biased convective flux
    wtilde_j = theta w(x_j^-) + (1 - theta) w(x_j^+)                (interior),
    wtilde_0 = 0,  wtilde_N = w(x_N^-).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .basis import gauss_legendre_rule, legendre_table
from .functions import DGFunction, SampledFunction, averages, element_values, jumps, traces
from .mesh import Mesh
from .problem import ProblemSpec

log = logging.getLogger(__name__)

SCHEDULES = ("half-order", "full-order", "k1-experiment", "constant")


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class FluxParams:
    """Numerical flux parameters.

    ``boundary_penalty`` adds beta0_j / dh_j [w]_j to the diffusive flux at
    x_0 and x_N as well; without it the boundary penalty entering the energy
    norm has no counterpart in B and Dirichlet data at the outflow end is not
    enforced.
    """

    theta: float = 2.0 / 3.0
    beta1: float = 0.0
    schedule: str = "k1-experiment"
    constant: float = 2.0
    boundary_penalty: bool = True

    def __post_init__(self):
        if not 0.5 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [1/2, 1], got {self.theta}")
        if self.beta1 < 0:
            raise ValueError("beta1 must be nonnegative")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"unknown schedule {self.schedule!r}; choose from {SCHEDULES}")
        if self.schedule == "constant" and self.constant < 0:
            raise ValueError("constant penalty must be nonnegative")


def beta0_values(params: FluxParams, mesh: Mesh, strict: bool = True) -> np.ndarray:
    """Penalty coefficients beta0_j for j = 0..N.

    With ``strict`` every value must be positive (a vanishing penalty makes
    the scheme unstable); ``strict=False`` lets diagnostics probe beta0 = 0.
    """
    N = mesh.N
    half = N // 2
    s = params.schedule
    b2 = params.beta1**2
    out = np.empty(N + 1)
    if s == "constant":
        out[:] = params.constant
    elif s == "half-order":
        eps = getattr(mesh, "epsilon", None)
        if eps is None:
            raise ValueError("half-order schedule needs a mesh that carries epsilon")
        out[:half] = b2 / (eps * N)
        out[half] = b2
        out[half + 1 :] = b2 * N
    elif s == "full-order":
        out[:half] = b2
        out[half] = b2 / N
        out[half + 1 :] = b2 * N**2
    else:
        out[:half] = 2.0
        out[half] = 1.0 / N
        out[half + 1 :] = float(N) ** 2
    if strict and not np.all(out > 0):
        raise ValueError(
            f"schedule {s!r} with beta1={params.beta1} gives a nonpositive penalty"
        )
    return out


def beta0_schedule(params: FluxParams, mesh: Mesh, j: int) -> float:
    if not 0 <= j <= mesh.N:
        raise IndexError(f"node index {j} outside 0..{mesh.N}")
    return float(beta0_values(params, mesh)[j])


def ddg_flux(jump, avg_d1, jump_d2, beta0, dh, beta1):
    """Interior diffusive flux beta0/dh [v] + {v'} + beta1 dh [v'']."""
    return beta0 / dh * jump + avg_d1 + beta1 * dh * jump_d2


def upwind_biased(minus, plus, theta):
    return theta * minus + (1.0 - theta) * plus


def hat_fluxes(v, params: FluxParams, mesh: Mesh, beta0=None) -> np.ndarray:
    """Diffusive flux at every node j = 0..N."""
    if beta0 is None:
        beta0 = beta0_values(params, mesh)
    dh = mesh.delta_h
    m0, p0 = traces(v, mesh, 0)
    m1, p1 = traces(v, mesh, 1)
    jump = jumps(m0, p0)
    out = np.empty(mesh.N + 1)
    if mesh.N > 1:
        m2, p2 = traces(v, mesh, 2) if params.beta1 else (m1 * 0, p1 * 0)
        out[1:-1] = ddg_flux(
            jump[1:-1],
            0.5 * (m1[1:-1] + p1[1:-1]),
            p2[1:-1] - m2[1:-1],
            beta0[1:-1],
            dh[1:-1],
            params.beta1,
        )
    out[0] = p1[0]
    out[-1] = m1[-1]
    if params.boundary_penalty:
        out[0] += beta0[0] / dh[0] * jump[0]
        out[-1] += beta0[-1] / dh[-1] * jump[-1]
    return out


def hat_flux(v, params: FluxParams, mesh: Mesh, j: int) -> float:
    if not 0 <= j <= mesh.N:
        raise IndexError(f"node index {j} outside 0..{mesh.N}")
    return float(hat_fluxes(v, params, mesh)[j])


def tilde_fluxes(v, theta: float, mesh: Mesh) -> np.ndarray:
    minus, plus = traces(v, mesh, 0)
    out = upwind_biased(minus, plus, theta)
    out[0] = 0.0
    out[-1] = minus[-1]
    return out


def tilde_flux(v, theta: float, mesh: Mesh, j: int) -> float:
    if not 0 <= j <= mesh.N:
        raise IndexError(f"node index {j} outside 0..{mesh.N}")
    return float(tilde_fluxes(v, theta, mesh)[j])


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    """Block-tridiagonal system. ``diag[j]`` couples element j to itself,
    ``upper[j]`` rows of element j to columns of element j+1 and
    ``lower[j]`` rows of element j+1 to columns of element j."""

    k: int
    mesh: Mesh
    diag: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    @property
    def block_size(self) -> int:
        return self.k + 1

    @property
    def size(self) -> int:
        return self.mesh.N * self.block_size

    def _blocks(self):
        N = self.mesh.N
        for j in range(N):
            yield j, j, self.diag[j]
        for j in range(N - 1):
            yield j, j + 1, self.upper[j]
            yield j + 1, j, self.lower[j]

    def to_dense(self) -> np.ndarray:
        p = self.block_size
        A = np.zeros((self.size, self.size))
        for r, c, blk in self._blocks():
            A[r * p : (r + 1) * p, c * p : (c + 1) * p] = blk
        return A

    @property
    def bandwidth(self) -> int:
        return 2 * self.block_size - 1

    def to_banded(self) -> np.ndarray:
        """LAPACK general band storage with equal lower/upper bandwidth."""
        p, bw = self.block_size, self.bandwidth
        ab = np.zeros((2 * bw + 1, self.size))
        loc = np.arange(p)
        for r, c, blk in self._blocks():
            rows = r * p + loc[:, None]
            cols = c * p + loc[None, :]
            ab[bw + rows - cols, np.broadcast_to(cols, (p, p))] = blk
        return ab

    def matvec(self, x: np.ndarray) -> np.ndarray:
        p = self.block_size
        X = x.reshape(self.mesh.N, p)
        Y = np.einsum("jim,jm->ji", self.diag, X)
        Y[:-1] += np.einsum("jim,jm->ji", self.upper, X[1:])
        Y[1:] += np.einsum("jim,jm->ji", self.lower, X[:-1])
        return Y.ravel()


def _endpoint_rows(k: int, widths: np.ndarray):
    """Right/left endpoint value, first and second derivative of each P_l,
    scaled to physical elements: arrays of shape (N, k+1)."""
    P, dP, d2P = legendre_table(k, np.array([-1.0, 1.0]))
    s = (2.0 / widths)[:, None]
    left = (np.broadcast_to(P[:, 0], (len(widths), k + 1)), dP[:, 0] * s, d2P[:, 0] * s**2)
    right = (np.broadcast_to(P[:, 1], (len(widths), k + 1)), dP[:, 1] * s, d2P[:, 1] * s**2)
    return left, right


def assemble(
    spec: ProblemSpec, mesh: Mesh, k: int, params: FluxParams, nquad: int | None = None
) -> AssembledSystem:
    """Matrix entries B(phi_m, phi_i) (row = test i, column = trial m) and F(phi_i)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    beta0 = beta0_values(params, mesh)
    N, p = mesh.N, k + 1
    eps, theta, beta1 = spec.epsilon, params.theta, params.beta1
    rule = gauss_legendre_rule(nquad or k + 3)
    P, dP, _ = legendre_table(k, rule.points)
    h = mesh.widths
    x = mesh.midpoints[:, None] + 0.5 * h[:, None] * rule.points
    W = 0.5 * h[:, None] * rule.weights
    a = np.broadcast_to(spec.a(x), x.shape)
    react = np.broadcast_to(spec.b(x), x.shape) - spec.da(x)
    g = (2.0 / h)[:, None]

    diag = (
        np.einsum("jq,iq,mq->jim", eps * W * g**2, dP, dP)
        - np.einsum("jq,iq,mq->jim", W * a * g, dP, P)
        + np.einsum("jq,iq,mq->jim", W * react, P, P)
    )
    rhs = np.einsum("jq,iq->ji", W * spec.f(x), P)
    upper = np.zeros((N - 1, p, p))
    lower = np.zeros((N - 1, p, p))

    (L0, L1, L2), (R0, R1, R2) = _endpoint_rows(k, h)
    dh = mesh.delta_h
    a_nodes = np.broadcast_to(spec.a(mesh.nodes), mesh.nodes.shape)

    for j in range(1, N):
        l, r = j - 1, j
        J = np.concatenate((-R0[l], L0[r]))
        avg1 = 0.5 * np.concatenate((R1[l], L1[r]))
        J2 = np.concatenate((-R2[l], L2[r]))
        T = np.concatenate((theta * R0[l], (1.0 - theta) * L0[r]))
        H = beta0[j] / dh[j] * J + avg1 + beta1 * dh[j] * J2
        M = eps * (np.outer(J, H) + np.outer(avg1, J)) - a_nodes[j] * np.outer(J, T)
        diag[l] += M[:p, :p]
        upper[l] += M[:p, p:]
        lower[l] += M[p:, :p]
        diag[r] += M[p:, p:]

    bp = 1.0 if params.boundary_penalty else 0.0
    J, avg1 = L0[0], L1[0]
    H = avg1 + bp * beta0[0] / dh[0] * J
    diag[0] += eps * (np.outer(J, H) + np.outer(avg1, J))
    J, avg1 = -R0[-1], R1[-1]
    H = avg1 + bp * beta0[-1] / dh[-1] * J
    diag[-1] += eps * (np.outer(J, H) + np.outer(avg1, J)) - a_nodes[-1] * np.outer(J, R0[-1])

    return AssembledSystem(k=k, mesh=mesh, diag=diag, lower=lower, upper=upper, rhs=rhs.ravel())


def solve(system: AssembledSystem, rtol: float = 1e-10) -> DGFunction:
    """Banded LU with partial pivoting (LAPACK gbsv).

    Raises SolverError when the matrix is singular or the solution fails
    the backward-error check ||A c - F|| <= rtol (||A|| ||c|| + ||F||).
    """
    bw = system.bandwidth
    try:
        c = linalg.solve_banded((bw, bw), system.to_banded(), system.rhs, check_finite=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"{exc}; {_condition_note(system)}") from exc
    resid = system.matvec(c) - system.rhs
    scale = _inf_norm(system) * np.max(np.abs(c)) + np.max(np.abs(system.rhs))
    berr = np.max(np.abs(resid)) / scale if scale > 0 else 0.0
    if not np.isfinite(berr) or berr > rtol:
        raise SolverError(f"backward error {berr:.3e} exceeds {rtol:g}; {_condition_note(system)}")
    log.debug("banded solve: n=%d backward error %.2e", system.size, berr)
    return DGFunction(system.k, system.mesh, c.reshape(system.mesh.N, system.block_size))


def _inf_norm(system: AssembledSystem) -> float:
    rows = np.abs(system.diag).sum(axis=2)
    rows[:-1] += np.abs(system.upper).sum(axis=2)
    rows[1:] += np.abs(system.lower).sum(axis=2)
    return float(rows.max())


def _condition_note(system: AssembledSystem) -> str:
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(system.to_dense(), 1)
    return f"1-norm condition number {cond:.3e}"


def bilinear_apply(
    spec: ProblemSpec,
    mesh: Mesh,
    k: int,
    params: FluxParams,
    u,
    v,
    nquad: int | None = None,
) -> float:
    """B(u, v) evaluated directly from element values and node traces.

    ``u`` and ``v`` may each be a DGFunction or a SampledFunction. This path
    shares no code with ``assemble`` beyond the quadrature rule.
    """
    rule = gauss_legendre_rule(nquad or k + 3)
    h = mesh.widths
    x = mesh.midpoints[:, None] + 0.5 * h[:, None] * rule.points
    W = 0.5 * h[:, None] * rule.weights
    u0, u1 = element_values(u, mesh, rule.points, 0), element_values(u, mesh, rule.points, 1)
    v0, v1 = element_values(v, mesh, rule.points, 0), element_values(v, mesh, rule.points, 1)
    a = np.broadcast_to(spec.a(x), x.shape)
    b = np.broadcast_to(spec.b(x), x.shape)
    volume = np.sum(W * (spec.epsilon * u1 * v1 - a * u0 * v1 - spec.da(x) * u0 * v0 + b * u0 * v0))

    vj = jumps(*traces(v, mesh, 0))
    vavg1 = averages(*traces(v, mesh, 1))
    uj = jumps(*traces(u, mesh, 0))
    uhat = hat_fluxes(u, params, mesh)
    utilde = tilde_fluxes(u, params.theta, mesh)
    a_nodes = np.broadcast_to(spec.a(mesh.nodes), mesh.nodes.shape)
    nodes = np.sum(spec.epsilon * (uhat * vj + uj * vavg1) - a_nodes * utilde * vj)
    return float(volume + nodes)


def load_functional(spec: ProblemSpec, v, mesh: Mesh, nquad: int) -> float:
    rule = gauss_legendre_rule(nquad)
    h = mesh.widths
    x = mesh.midpoints[:, None] + 0.5 * h[:, None] * rule.points
    W = 0.5 * h[:, None] * rule.weights
    return float(np.sum(W * spec.f(x) * element_values(v, mesh, rule.points, 0)))


def solve_problem(spec: ProblemSpec, mesh: Mesh, k: int, params: FluxParams) -> DGFunction:
    return solve(assemble(spec, mesh, k, params))


__all__ = [
    "SCHEDULES",
    "SolverError",
    "FluxParams",
    "DGFunction",
    "SampledFunction",
    "AssembledSystem",
    "beta0_values",
    "beta0_schedule",
    "ddg_flux",
    "upwind_biased",
    "hat_fluxes",
    "hat_flux",
    "tilde_fluxes",
    "tilde_flux",
    "assemble",
    "solve",
    "bilinear_apply",
    "load_functional",
    "solve_problem",
]
