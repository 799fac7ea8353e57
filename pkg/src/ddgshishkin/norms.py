"""Energy norm and broken error norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import gauss_legendre_rule
from .ddg import FluxParams, beta0_values
from .functions import DGFunction, averages, element_values, jumps, traces
from .mesh import Mesh
from .problem import ProblemSpec

REGIONS = ("all", "coarse", "fine")
LINF_SAMPLES = 50


@dataclass(frozen=True)
class ErrorBundle:
    l2: float
    linf: float
    h1_semi_broken: float
    energy: float
    jump_l2: float


def jump_and_average(v, j: int, mesh: Mesh | None = None) -> tuple[float, float]:
    mesh = mesh or v.mesh
    if not 0 <= j <= mesh.N:
        raise IndexError(f"node index {j} outside 0..{mesh.N}")
    minus, plus = traces(v, mesh, 0)
    return float(jumps(minus, plus)[j]), float(averages(minus, plus)[j])


def _region_slices(mesh: Mesh, region: str) -> tuple[slice, slice]:
    """(elements, nodes) for a region; coarse nodes are 0..N/2."""
    half = mesh.N // 2
    if region == "all":
        return slice(None), slice(None)
    if region == "coarse":
        return slice(0, half), slice(0, half + 1)
    if region == "fine":
        return slice(half, None), slice(half + 1, None)
    raise ValueError(f"region must be one of {REGIONS}")


def _pieces(e_vals, e_ders, e_jumps, mesh, spec, params, region, W):
    els, nds = _region_slices(mesh, region)
    l2sq = float(np.sum((W * e_vals**2)[els]))
    h1sq = float(np.sum((W * e_ders**2)[els]))
    beta0 = beta0_values(params, mesh)
    jsq = float(np.sum((spec.epsilon * beta0 / mesh.delta_h * e_jumps**2)[nds]))
    return l2sq, h1sq, jsq


def energy_norm(v, spec: ProblemSpec, params: FluxParams, region: str = "all",
                mesh: Mesh | None = None, nquad: int | None = None) -> float:
    """sqrt(eps |v|_1^2 + gamma ||v||^2 + eps sum beta0_j / dh_j [v]_j^2)."""
    mesh = mesh or v.mesh
    k = getattr(v, "k", 2)
    rule = gauss_legendre_rule(nquad or 2 * k + 8)
    W = 0.5 * mesh.widths[:, None] * rule.weights
    vals = element_values(v, mesh, rule.points, 0)
    ders = element_values(v, mesh, rule.points, 1)
    l2sq, h1sq, jsq = _pieces(vals, ders, jumps(*traces(v, mesh, 0)), mesh, spec, params, region, W)
    return float(np.sqrt(spec.epsilon * h1sq + spec.gamma * l2sq + jsq))


def error_bundle(v: DGFunction, w, spec: ProblemSpec, params: FluxParams,
                 region: str = "all", nquad: int | None = None) -> ErrorBundle:
    """Norms of v - w, where w is a DGFunction on the same space or a
    SampledFunction. The difference of two DGFunctions is integrated
    exactly."""
    mesh = v.mesh
    if isinstance(w, DGFunction):
        return _bundle_of(v - w, spec, params, region, nquad)
    rule = gauss_legendre_rule(nquad or 2 * v.k + 8)
    W = 0.5 * mesh.widths[:, None] * rule.weights
    e_vals = v.element_values(rule.points, 0) - element_values(w, mesh, rule.points, 0)
    if w.derivative is None:
        raise ValueError("w.derivative is required for the h1 and energy entries")
    e_ders = v.element_values(rule.points, 1) - element_values(w, mesh, rule.points, 1)
    e_jumps = jumps(*v.traces(0)) - jumps(*traces(w, mesh, 0))
    l2sq, h1sq, jsq = _pieces(e_vals, e_ders, e_jumps, mesh, spec, params, region, W)
    xs = np.linspace(-1.0, 1.0, LINF_SAMPLES)
    els, _ = _region_slices(mesh, region)
    diff = v.element_values(xs, 0) - element_values(w, mesh, xs, 0)
    return _finish(l2sq, h1sq, jsq, float(np.max(np.abs(diff[els]))), spec)


def _bundle_of(e: DGFunction, spec, params, region, nquad) -> ErrorBundle:
    mesh = e.mesh
    rule = gauss_legendre_rule(nquad or 2 * e.k + 8)
    W = 0.5 * mesh.widths[:, None] * rule.weights
    l2sq, h1sq, jsq = _pieces(
        e.element_values(rule.points, 0), e.element_values(rule.points, 1),
        jumps(*e.traces(0)), mesh, spec, params, region, W,
    )
    xs = np.linspace(-1.0, 1.0, LINF_SAMPLES)
    els, _ = _region_slices(mesh, region)
    return _finish(l2sq, h1sq, jsq, float(np.max(np.abs(e.element_values(xs, 0)[els]))), spec)


def _finish(l2sq, h1sq, jsq, linf, spec) -> ErrorBundle:
    energy = np.sqrt(spec.epsilon * h1sq + spec.gamma * l2sq + jsq)
    return ErrorBundle(
        l2=float(np.sqrt(l2sq)),
        linf=linf,
        h1_semi_broken=float(np.sqrt(h1sq)),
        energy=float(energy),
        jump_l2=float(np.sqrt(jsq)),
    )
