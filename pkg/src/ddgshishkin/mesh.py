"""Piecewise-uniform Shishkin meshes on [0, 1]."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Mesh:
    """A partition 0 = x_0 < x_1 < ... < x_N = 1.

    ``widths`` is stored separately from ``nodes`` so that subclasses can
    supply exact element widths instead of differences of nearly equal
    coordinates.
    """

    nodes: np.ndarray
    widths: np.ndarray

    @property
    def N(self) -> int:
        return len(self.widths)

    @property
    def left(self) -> np.ndarray:
        """Left endpoint of each element."""
        return self.nodes[:-1]

    @property
    def midpoints(self) -> np.ndarray:
        return self.nodes[:-1] + 0.5 * self.widths

    @property
    def delta_h(self) -> np.ndarray:
        """min(h_j, h_{j+1}) for j = 0..N with ghost widths h_0 = h_1, h_{N+1} = h_N."""
        padded = np.concatenate(([self.widths[0]], self.widths, [self.widths[-1]]))
        return np.minimum(padded[:-1], padded[1:])

    @property
    def transition_index(self) -> int:
        return self.N // 2

    def locate(self, x) -> np.ndarray:
        """Element index (0-based) containing each x; right endpoints go left."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.nodes, x, side="left") - 1
        return np.clip(idx, 0, self.N - 1)

    @classmethod
    def from_nodes(cls, nodes) -> "Mesh":
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or len(nodes) < 2:
            raise ValueError("need at least two nodes")
        widths = np.diff(nodes)
        if np.any(widths <= 0):
            raise ValueError("nodes must be strictly increasing")
        return cls(nodes=nodes, widths=widths)


@dataclass(frozen=True, eq=False)
class ShishkinMesh(Mesh):
    tau: float = 0.5
    sigma: float = 1.0
    alpha: float = 1.0
    epsilon: float = 1.0

    @property
    def coarse_width(self) -> float:
        return float(self.widths[0])

    @property
    def fine_width(self) -> float:
        return float(self.widths[-1])


def build_shishkin(N: int, epsilon: float, sigma: float, alpha: float) -> ShishkinMesh:
    """Shishkin mesh with N/2 uniform elements on each side of x = 1 - tau.

    The transition width is ``tau = min(1/2, sigma * epsilon / alpha * ln N)``.
    Fine-region nodes are measured back from x = 1 so that widths of order
    epsilon / N keep full relative accuracy.
    """
    if int(N) != N or N < 4 or N % 2:
        raise ValueError(f"N must be an even integer >= 4, got {N}")
    N = int(N)
    for name, val in (("epsilon", epsilon), ("sigma", sigma), ("alpha", alpha)):
        if not val > 0:
            raise ValueError(f"{name} must be positive, got {val}")
    tau = min(0.5, sigma * epsilon / alpha * math.log(N))
    half = N // 2
    j = np.arange(N + 1)
    nodes = np.empty(N + 1)
    nodes[: half + 1] = (1.0 - tau) * (2.0 * j[: half + 1] / N)
    nodes[half:] = 1.0 - tau * (2.0 * (N - j[half:]) / N)
    widths = np.empty(N)
    widths[:half] = 2.0 * (1.0 - tau) / N
    widths[half:] = 2.0 * tau / N
    return ShishkinMesh(
        nodes=nodes, widths=widths, tau=tau, sigma=sigma, alpha=alpha, epsilon=epsilon
    )


def uniform_mesh(N: int) -> Mesh:
    return Mesh(nodes=np.linspace(0.0, 1.0, N + 1), widths=np.full(N, 1.0 / N))


def delta_h(mesh: Mesh, j: int) -> float:
    if not 0 <= j <= mesh.N:
        raise IndexError(f"node index {j} outside 0..{mesh.N}")
    return float(mesh.delta_h[j])
