import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ddgshishkin.mesh import Mesh, build_shishkin, delta_h, uniform_mesh


def test_unclamped_nodes():
    m = build_shishkin(4, 0.01, 2.0, 2.0)
    tau = 0.01 * math.log(4)
    assert m.tau == pytest.approx(tau, rel=1e-15)
    assert m.tau == pytest.approx(0.0138629, abs=1e-7)
    np.testing.assert_allclose(m.nodes, [0, 0.4930686, 0.9861371, 0.9930686, 1], atol=1e-7)
    np.testing.assert_allclose(m.nodes, [0, (1 - tau) / 2, 1 - tau, 1 - tau / 2, 1], rtol=0, atol=1e-15)


def test_clamped_tau_gives_uniform():
    m = build_shishkin(4, 0.5, 2.0, 2.0)
    assert m.tau == 0.5
    np.testing.assert_array_equal(m.nodes, [0, 0.25, 0.5, 0.75, 1])


def test_widths_tiny_epsilon():
    m = build_shishkin(8, 1e-8, 3.0, 2.0)
    tau = 1.5e-8 * math.log(8)
    np.testing.assert_allclose(m.widths[:4], 2 * (1 - tau) / 8, rtol=1e-15)
    np.testing.assert_allclose(m.widths[4:], 2 * tau / 8, rtol=1e-14)
    assert m.coarse_width == pytest.approx(2 * (1 - tau) / 8, rel=1e-15)
    assert m.fine_width == pytest.approx(2 * tau / 8, rel=1e-14)


def test_delta_h_examples():
    m = build_shishkin(4, 0.01, 2.0, 2.0)
    assert delta_h(m, 2) == pytest.approx(0.0069314, abs=1e-7)
    assert delta_h(m, 2) == m.fine_width
    assert delta_h(m, 0) == m.widths[0]
    assert delta_h(m, 4) == m.widths[-1]
    u = uniform_mesh(10)
    np.testing.assert_allclose([delta_h(u, j) for j in range(11)], 0.1, rtol=1e-14)


@pytest.mark.parametrize("j", [-1, 5])
def test_delta_h_out_of_range(j):
    with pytest.raises(IndexError):
        delta_h(build_shishkin(4, 0.01, 2.0, 2.0), j)


@pytest.mark.parametrize(
    "args",
    [(5, 1e-3, 2, 2), (2, 1e-3, 2, 2), (8, 0.0, 2, 2), (8, 1e-3, -1, 2), (8, 1e-3, 2, 0)],
)
def test_build_rejects(args):
    with pytest.raises(ValueError):
        build_shishkin(*args)


def test_locate_assigns_nodes_to_left_element():
    m = uniform_mesh(4)
    np.testing.assert_array_equal(m.locate([0.0, 0.1, 0.25, 0.3, 1.0]), [0, 0, 0, 1, 3])


def test_from_nodes_rejects_unsorted():
    with pytest.raises(ValueError):
        Mesh.from_nodes([0.0, 0.6, 0.5, 1.0])


meshes = st.builds(
    build_shishkin,
    N=st.integers(2, 256).map(lambda n: 2 * n),
    epsilon=st.floats(1e-12, 1.0),
    sigma=st.floats(0.5, 6.0),
    alpha=st.floats(0.1, 4.0),
)


@given(meshes)
def test_mesh_invariants(m):
    N = m.N
    assert m.nodes[0] == 0.0 and m.nodes[-1] == 1.0
    assert np.all(np.diff(m.nodes) > 0)
    assert m.nodes[N // 2] == 1.0 - m.tau
    assert m.tau <= 0.5
    assert abs(m.widths.sum() - 1.0) <= 1e-14
    np.testing.assert_allclose(m.widths[: N // 2], m.coarse_width, rtol=1e-12)
    np.testing.assert_allclose(m.widths[N // 2 :], m.fine_width, rtol=1e-12)
    assert delta_h(m, N // 2) == min(m.coarse_width, m.fine_width)
    assert m.transition_index == N // 2


@given(st.integers(2, 256).map(lambda n: 2 * n), st.floats(1e-12, 1e-3))
def test_transition_point_unclamped(N, eps):
    sigma, alpha = 3.0, 2.0
    m = build_shishkin(N, eps, sigma, alpha)
    assert abs(m.nodes[N // 2] - (1 - sigma * eps / alpha * math.log(N))) <= 1e-14


@given(meshes, st.data())
def test_delta_h_is_min_of_neighbours(m, data):
    j = data.draw(st.integers(1, m.N - 1))
    assert delta_h(m, j) == min(m.widths[j - 1], m.widths[j])
