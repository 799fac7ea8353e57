"""Penalty admissibility: Hilbert-matrix bound, integer penalty rule and
randomized checks of the admissibility and coercivity inequalities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import linalg

from .basis import gauss_legendre_rule, legendre_table
from .ddg import FluxParams, beta0_values, bilinear_apply, hat_fluxes
from .functions import DGFunction, averages, jumps
from .mesh import Mesh
from .problem import ProblemSpec, make_test_problem

MAX_HILBERT = 12


def inverse_hilbert(n: int) -> list[list[int]]:
    """Exact integer inverse of the n x n Hilbert matrix 1/(i+j-1)."""
    C = math.comb
    return [
        [
            (-1) ** (i + j) * (i + j - 1) * C(n + i - 1, n - j) * C(n + j - 1, n - i) * C(i + j - 2, i - 1) ** 2
            for j in range(1, n + 1)
        ]
        for i in range(1, n + 1)
    ]


def _lambda_exact(k: int) -> int:
    return sum(sum(row) for row in inverse_hilbert(k))


def hilbert_lambda_max(k: int) -> float:
    """Largest eigenvalue of H^{-1/2} O H^{-1/2} (O = all ones, size k).

    O = e e^T has rank one, so the eigenvalue is e^T H^{-1} e.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > MAX_HILBERT:
        raise ValueError(f"k > {MAX_HILBERT} not supported")
    return float(_lambda_exact(k))


def beta0_integer_rule(k: int) -> int:
    """[lambda_max / 2] + 1 with [y] the smallest integer >= y."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return math.ceil(Fraction(_lambda_exact(k), 2)) + 1


@dataclass(frozen=True)
class AdmissibilityReport:
    k: int
    lambda_max: float
    beta0_bound: float
    beta0_integer: int
    mu1: float
    mu2: float


def admissibility_report(k: int, mu1: float = 0.5, mu2: float = 1.0) -> AdmissibilityReport:
    lam = hilbert_lambda_max(k)
    return AdmissibilityReport(
        k=k,
        lambda_max=lam,
        beta0_bound=mu2 + lam / (4.0 * mu1),
        beta0_integer=beta0_integer_rule(k),
        mu1=mu1,
        mu2=mu2,
    )


def estimate_M(mesh: Mesh, k: int, beta1: float) -> float:
    """max over V_h of
        sum_{j=0}^{N} dh_j ({w'}_j + beta1/2 dh_j [w'']_j)^2 / sum_j int (w')^2.

    Constants carry no derivative and drop out of both forms, so the
    quotient is taken over the modes P_1..P_k of every element where the
    denominator is positive definite.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    N = mesh.N
    h = mesh.widths
    P, dP, d2P = legendre_table(k, np.array([-1.0, 1.0]))
    s = (2.0 / h)[:, None]
    L1, R1 = dP[1:, 0] * s, dP[1:, 1] * s
    L2, R2 = d2P[1:, 0] * s**2, d2P[1:, 1] * s**2
    dh = mesh.delta_h
    G = np.zeros((N + 1, N * k))

    def put(j, elem, vec):
        G[j, elem * k : (elem + 1) * k] += vec

    # node 0 and node N use {v}_0 = v(x_0^+), [v]_0 = v(x_0^+), {v}_N = v(x_N^-), [v]_N = -v(x_N^-)
    put(0, 0, L1[0] + 0.5 * beta1 * dh[0] * L2[0])
    put(N, N - 1, R1[-1] - 0.5 * beta1 * dh[N] * R2[-1])
    for j in range(1, N):
        put(j, j - 1, 0.5 * R1[j - 1] - 0.5 * beta1 * dh[j] * R2[j - 1])
        put(j, j, 0.5 * L1[j] + 0.5 * beta1 * dh[j] * L2[j])
    num = G.T @ (dh[:, None] * G)

    rule = gauss_legendre_rule(k + 1)
    dPq = legendre_table(k, rule.points)[1][1:]
    ref = (dPq * rule.weights) @ dPq.T
    den = linalg.block_diag(*[ref * (2.0 / hj) for hj in h])
    if not np.all(np.isfinite(den)) or np.linalg.matrix_rank(den) < den.shape[0]:
        raise ValueError("degenerate denominator")
    return float(linalg.eigh(num, den, eigvals_only=True)[-1])


@dataclass(frozen=True)
class AdmissibilityCheck:
    """Outcome of a randomized check.

    Slacks are relative: (lhs - rhs) / rhs-scale, minimized over trials.
    ``passed`` refers to the admissibility inequality; the coercivity
    inequality B(v, v) >= ||v||_E^2 is reported separately.
    """

    passed: bool
    admissibility_slack: float
    coercive: bool
    coercivity_slack: float
    trials: int


def admissibility_slack(
    v: DGFunction,
    params: FluxParams,
    mu1: float = 0.5,
    mu2: float = 1.0,
    symmetric: bool = False,
    boundary: bool = False,
) -> float:
    """Relative slack of
        mu1 sum int (v')^2 + sum_j vhat_j [v]_j >= mu2 sum_j [v]_j^2 / dh_j.

    By default j runs over the interior nodes, where the DDG flux is
    defined, and only the flux term enters the node sum; this is the form
    the Hilbert-matrix bound controls. ``symmetric`` adds [v]_j {v'}_j and
    ``boundary`` includes j = 0 and j = N.
    """
    mesh = v.mesh
    beta0 = beta0_values(params, mesh, strict=False)
    rule = gauss_legendre_rule(v.k + 1)
    W = 0.5 * mesh.widths[:, None] * rule.weights
    h1sq = float(np.sum(W * v.element_values(rule.points, 1) ** 2))
    jump = jumps(*v.traces(0))
    node = hat_fluxes(v, params, mesh, beta0=beta0) * jump
    if symmetric:
        node = node + jump * averages(*v.traces(1))
    pen = jump**2 / mesh.delta_h
    if not boundary:
        node, pen = node[1:-1], pen[1:-1]
    lhs = mu1 * h1sq + float(np.sum(node))
    rhs = mu2 * float(np.sum(pen))
    scale = mu1 * h1sq + rhs
    return 0.0 if scale == 0 else (lhs - rhs) / scale


def coercivity_slack(v: DGFunction, spec: ProblemSpec, params: FluxParams) -> float:
    """(B(v, v) - ||v||_E^2) / ||v||_E^2."""
    from .norms import energy_norm

    e2 = energy_norm(v, spec, params) ** 2
    if e2 == 0:
        return 0.0
    return (bilinear_apply(spec, v.mesh, v.k, params, v, v) - e2) / e2


def check_admissibility(
    mesh: Mesh,
    k: int,
    params: FluxParams,
    trials: int,
    rng: np.random.Generator | None = None,
    spec: ProblemSpec | None = None,
    mu1: float = 0.5,
    mu2: float = 1.0,
    tol: float = 1e-10,
) -> AdmissibilityCheck:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = rng if rng is not None else np.random.default_rng(0)
    if spec is None:
        spec = make_test_problem(getattr(mesh, "epsilon", 1.0))
    adm, coer = np.inf, np.inf
    for _ in range(trials):
        v = DGFunction.random(k, mesh, rng)
        adm = min(adm, admissibility_slack(v, params, mu1, mu2))
        try:
            coer = min(coer, coercivity_slack(v, spec, params))
        except ValueError:
            coer = np.nan
    return AdmissibilityCheck(
        passed=bool(adm >= -tol),
        admissibility_slack=float(adm),
        coercive=bool(coer >= -tol),
        coercivity_slack=float(coer),
        trials=trials,
    )
