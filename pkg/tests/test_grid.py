import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vekua.errors import GridShapeError
from vekua.grid import (
    Grid1D,
    Grid2D,
    PathSpec,
    cumulative_integral,
    d_x,
    d_y,
    d_z,
    d_zbar,
    interior,
    interior_max,
    laplacian,
    lpath_complex,
    lpath_field,
    path_integral,
)


@pytest.fixture(scope="module")
def grid():
    return Grid2D.square(1.0, 201)


# ---------------------------------------------------------------- grids

def test_grid_requires_odd_node_count():
    with pytest.raises(ValueError):
        Grid1D(1.0, 200)
    with pytest.raises(ValueError):
        Grid1D(1.0, 1)
    with pytest.raises(ValueError):
        Grid1D(-1.0, 201)


def test_grid_nodes_symmetric_about_zero():
    g = Grid1D(1.5, 31)
    assert g.nodes[g.center] == 0.0
    np.testing.assert_array_equal(g.nodes + g.nodes[::-1], np.zeros(g.n))
    assert abs(g.h * (g.n - 1) - 2 * g.half_width) <= 1e-12 * g.half_width


def test_grid_index_of():
    g = Grid1D(1.0, 11)
    assert g.index_of(0.0) == 5
    assert g.index_of(-1.0) == 0
    with pytest.raises(ValueError):
        g.index_of(0.05)


# ---------------------------------------------------- cumulative integral

def test_cumulative_integral_constant_exact():
    g = Grid1D(0.5, 101)  # [-0.5, 0.5]
    f = np.ones(g.n)
    out = cumulative_integral(g, f, origin_index=g.center)
    np.testing.assert_allclose(out, g.nodes, rtol=0, atol=1e-15)


def test_cumulative_integral_affine_exact():
    g = Grid1D(1.0, 51)
    out = cumulative_integral(g, g.nodes, origin_index=g.center)
    np.testing.assert_allclose(out, g.nodes**2 / 2.0, rtol=0, atol=1e-15)


def test_cumulative_integral_exponential_oracle():
    # closed form: int_0^1 exp(-2s) ds = (1 - exp(-2)) / 2
    g = Grid1D(1.0, 201)
    f = np.exp(-2.0 * g.nodes)
    out = cumulative_integral(g, f, origin_index=g.center)
    oracle = (1.0 - math.exp(-2.0)) / 2.0
    assert oracle == pytest.approx(0.43233235838169365, abs=1e-16)
    assert out[-1] == pytest.approx(oracle, abs=1e-4)


def test_cumulative_integral_shape_error():
    g = Grid1D(1.0, 11)
    with pytest.raises(GridShapeError):
        cumulative_integral(g, np.ones(10))


@settings(max_examples=25, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=11, max_size=11),
    st.lists(st.floats(-10, 10), min_size=11, max_size=11),
    st.floats(-3, 3),
    st.floats(-3, 3),
)
def test_cumulative_integral_linear(fa, fb, alpha, beta):
    g = Grid1D(1.0, 11)
    fa, fb = np.asarray(fa), np.asarray(fb)
    lhs = cumulative_integral(g, alpha * fa + beta * fb)
    rhs = alpha * cumulative_integral(g, fa) + beta * cumulative_integral(g, fb)
    scale = max(1.0, np.max(np.abs(rhs)))
    assert np.max(np.abs(lhs - rhs)) <= 1e-13 * scale


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=21, max_size=21), st.integers(0, 20))
def test_cumulative_integral_additive_over_subintervals(samples, split):
    g = Grid1D(1.0, 21)
    f = np.asarray(samples)
    from_left = cumulative_integral(g, f, origin_index=0)
    from_split = cumulative_integral(g, f, origin_index=split)
    # F_0(x) - F_0(split) = F_split(x)
    recombined = from_left - from_left[split]
    scale = max(1.0, np.max(np.abs(from_left)))
    assert np.max(np.abs(recombined - from_split)) <= 1e-13 * scale


# ------------------------------------------------------------ derivatives

def test_dx_quadratic_exact(grid):
    x, _ = grid.meshes()
    out = d_x(grid, x**2)
    np.testing.assert_allclose(interior(out), interior(2 * x), atol=1e-12)


def test_dx_constant_zero(grid):
    out = d_x(grid, np.ones(grid.shape))
    np.testing.assert_array_equal(out, np.zeros(grid.shape))


def test_dx_sine_oracle(grid):
    x, _ = grid.meshes()
    err = interior_max(d_x(grid, np.sin(x)) - np.cos(x))
    assert err <= 2e-5


def test_dy_matches_dx_transposed(grid):
    x, y = grid.meshes()
    f = np.sin(x) * np.cos(y) + x * y**2
    np.testing.assert_allclose(d_y(grid, f), d_x(grid, f.T).T, atol=1e-14)


def test_wirtinger_on_holomorphic(grid):
    z = grid.zmesh()
    assert interior_max(d_zbar(grid, z)) <= 1e-13
    np.testing.assert_allclose(interior(d_z(grid, z)), np.ones(grid.shape)[1:-1, 1:-1], atol=1e-13)
    assert interior_max(d_zbar(grid, z**2)) <= 1e-12


def test_wirtinger_on_antiholomorphic(grid):
    z = grid.zmesh()
    np.testing.assert_allclose(interior(d_zbar(grid, np.conj(z))), np.ones(grid.shape)[1:-1, 1:-1], atol=1e-13)


def test_wirtinger_x_squared(grid):
    x, _ = grid.meshes()
    np.testing.assert_allclose(interior(d_zbar(grid, x**2 + 0j)), interior(x + 0j), atol=1e-12)


def test_laplacian_paraboloid_exact(grid):
    x, y = grid.meshes()
    out = laplacian(grid, x**2 + y**2)
    np.testing.assert_allclose(interior(out), 4.0 * np.ones(grid.shape)[1:-1, 1:-1], atol=1e-10)


def test_laplacian_harmonic_exact(grid):
    x, y = grid.meshes()
    assert interior_max(laplacian(grid, x**2 - y**2)) <= 1e-10


def test_laplacian_product_sine_oracle(grid):
    x, y = grid.meshes()
    f = np.sin(x) * np.sin(y)
    err = interior_max(laplacian(grid, f) + 2.0 * f)
    assert err <= 5e-5


@pytest.mark.parametrize("op", [d_x, d_z, laplacian])
def test_convergence_order(op):
    def residual(n):
        g = Grid2D.square(1.0, n)
        x, y = g.meshes()
        f = np.exp(x) * np.sin(2 * y) + x**3 * y
        if op is d_x:
            exact = np.exp(x) * np.sin(2 * y) + 3 * x**2 * y
        elif op is d_z:
            exact = 0.5 * (np.exp(x) * np.sin(2 * y) + 3 * x**2 * y) - 0.5j * (
                2 * np.exp(x) * np.cos(2 * y) + x**3
            )
        else:
            exact = np.exp(x) * np.sin(2 * y) + 6 * x * y - 4 * np.exp(x) * np.sin(2 * y)
        return interior_max(op(g, f) - exact, margin=2)

    coarse, fine = residual(101), residual(201)
    assert 3.5 <= coarse / fine <= 4.5


# ---------------------------------------------------------- path integrals

def test_lpath_gradient_reconstruction(grid):
    x, y = grid.meshes()
    phi = x**2 + y**2
    grad = d_zbar(grid, phi)
    rebuilt = lpath_field(grid, np.real(grad), np.imag(grad), sign=+1)
    assert np.max(np.abs(rebuilt - phi)) <= 1e-10


def test_lpath_zero_integrand(grid):
    zeros = np.zeros(grid.shape)
    np.testing.assert_array_equal(lpath_field(grid, zeros, zeros), zeros)


def test_lpath_exponential_oracle(grid):
    x, y = grid.meshes()
    phi = np.exp(x + y)
    grad = d_zbar(grid, phi)
    rebuilt = lpath_field(grid, np.real(grad), np.imag(grad), sign=+1)
    assert np.max(np.abs(rebuilt - (phi - 1.0))) <= 5e-4


def test_lpath_order_independence_for_gradients(grid):
    x, y = grid.meshes()
    phi = x**3 * y + x * y**2
    grad = d_zbar(grid, phi)
    xy = lpath_field(grid, np.real(grad), np.imag(grad), order="xy")
    yx = lpath_field(grid, np.real(grad), np.imag(grad), order="yx")
    # both reconstruct phi up to the trapezoid error of either leg
    bound = 10.0 * grid.hmax**2 * interior_max(laplacian(grid, phi))
    assert np.max(np.abs(xy - yx)) <= bound


def test_path_integral_endpoint(grid):
    x, y = grid.meshes()
    phi = x**2 + y**2
    grad = d_zbar(grid, phi)
    spec = PathSpec(start=(0.0, 0.0), end=(0.5, -0.5))
    val = path_integral(grid, np.real(grad), np.imag(grad), spec, sign=+1)
    assert val == pytest.approx(0.5, abs=1e-10)


def test_path_integral_rejects_off_grid(grid):
    zeros = np.zeros(grid.shape)
    with pytest.raises(ValueError):
        path_integral(grid, zeros, zeros, PathSpec((0.0, 0.0), (0.5003, 0.0)))


def test_lpath_complex_polynomial(grid):
    z = grid.zmesh()
    out = lpath_complex(grid, np.ones(grid.shape, dtype=complex))
    np.testing.assert_allclose(out, z, atol=1e-12)
    out2 = lpath_complex(grid, 2.0 * z)
    np.testing.assert_allclose(out2, z**2, atol=1e-10)
