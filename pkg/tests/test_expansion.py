import numpy as np
import pytest

from vekua.errors import KernelMembershipError
from vekua.expansion import (
    evaluate_fit,
    evaluate_series,
    fit_formal_polynomial,
    taylor_coefficients,
)
from vekua.formal_powers import assemble_formal_powers
from vekua.grid import Grid2D
from vekua.superpotential import make_superpotential


@pytest.fixture(scope="module")
def grid():
    return Grid2D.square(1.0, 201)


@pytest.fixture(scope="module")
def zero_sp(grid):
    return make_superpotential("zero", (), grid)


@pytest.fixture(scope="module")
def quad(grid):
    return make_superpotential("quadratic", (1.0, 1.0), grid)


@pytest.fixture(scope="module")
def table_zero(zero_sp):
    return assemble_formal_powers(zero_sp, 6)


@pytest.fixture(scope="module")
def table_quad(quad):
    return assemble_formal_powers(quad, 6)


H2 = 1e-4


# -------------------------------------------------------------- Taylor route

def test_taylor_of_plain_square(zero_sp, grid):
    z = grid.zmesh()
    coeffs = taylor_coefficients(zero_sp, z**2, degree=4)
    expected = np.zeros(5, dtype=complex)
    expected[2] = 1.0
    np.testing.assert_allclose(coeffs.values, expected, atol=1e-8)
    assert coeffs.values[0] == 0.0  # exact origin value


def test_taylor_origin_value_exact(quad, table_quad):
    w = 2.5 * table_quad.power(0, 1.0) + 0.5 * table_quad.power(0, 1j)
    coeffs = taylor_coefficients(quad, w, degree=2)
    assert coeffs.values[0] == w[quad.grid.center]


def test_taylor_of_formal_power_self_consistency(quad, table_quad):
    w = table_quad.power(3, 1.0)
    coeffs = taylor_coefficients(quad, w, degree=4)
    assert abs(coeffs.values[3] - 1.0) <= 1e-3
    for n in (0, 1, 2, 4):
        assert abs(coeffs.values[n]) <= max(2e-3, 2 * coeffs.uncertainty[n])


def test_taylor_of_generating_function(quad, table_quad):
    # the first pair member has coefficients (1, 0, 0, ...) since its
    # pair derivative vanishes identically
    w = table_quad.power(0, 1.0)
    coeffs = taylor_coefficients(quad, w, degree=3)
    assert abs(coeffs.values[0] - 1.0) <= 1e-12
    for n in (1, 2, 3):
        assert abs(coeffs.values[n]) <= max(1e-6, coeffs.uncertainty[n])


def test_taylor_degree_cap(zero_sp, grid):
    with pytest.raises(ValueError, match="maximum"):
        taylor_coefficients(zero_sp, grid.zmesh(), degree=7)


def test_taylor_noise_error_on_coarse_grid():
    g = Grid2D.square(1.0, 9)
    sp = make_superpotential("quadratic", (1.0, 1.0), g)
    table = assemble_formal_powers(sp, 6)
    with pytest.raises(ValueError, match="finer grid"):
        taylor_coefficients(sp, table.power(6, 1.0), degree=6)


def test_series_roundtrip_single_power(quad, table_quad):
    w = table_quad.power(2, 1.0 + 0.5j)
    coeffs = taylor_coefficients(quad, w, degree=4)
    rebuilt = evaluate_series(coeffs, table_quad)
    q = (quad.grid.gx.n - 1) // 4
    sub = (slice(q, -q), slice(q, -q))
    assert np.max(np.abs((rebuilt - w)[sub])) <= 5e-3


def test_series_zero_coefficients(table_quad):
    from vekua.expansion import TaylorCoefficients

    coeffs = TaylorCoefficients(np.zeros(3, dtype=complex), np.zeros(3), (0, 0))
    np.testing.assert_array_equal(evaluate_series(coeffs, table_quad), 0.0)


# ----------------------------------------------------------------- fit route

def test_fit_exact_harmonic_member(zero_sp, table_zero, grid):
    x, y = grid.meshes()
    target = x**2 - y**2  # equals Re z^2 = Im(i z^2): an exact basis member
    fit = fit_formal_polynomial(zero_sp, target, table_zero, "ker_h0", degree=3)
    assert fit.residual_max <= 1e-10
    assert fit.coefficient(2, "i") == pytest.approx(1.0, abs=1e-8)


def test_fit_self_consistency(quad, table_quad):
    target = np.imag(table_quad.z_i[3])
    fit = fit_formal_polynomial(quad, target, table_quad, "ker_h0", degree=4)
    assert fit.residual_max <= 10 * H2
    assert fit.coefficient(3, "i") == pytest.approx(1.0, abs=1e-6)
    coef = fit.coefficients.copy()
    coef[2 * 3 + 1] = 0.0
    assert np.max(np.abs(coef)) <= 1e-6


def test_fit_zero_mode_is_degree_zero(quad, table_quad):
    target = quad.exp_chi(-1.0)  # the imaginary part of the second pair member
    fit = fit_formal_polynomial(quad, target, table_quad, "ker_h0", degree=2)
    assert fit.coefficient(0, "i") == pytest.approx(1.0, abs=1e-8)
    assert fit.residual_max <= 1e-8


def test_fit_h2_branch(quad, table_quad):
    target = np.real(table_quad.z_one[2])
    fit = fit_formal_polynomial(quad, target, table_quad, "ker_h2", degree=3)
    assert fit.coefficient(2, "one") == pytest.approx(1.0, abs=1e-6)
    assert fit.residual_max <= 10 * H2


def test_fit_rejects_non_kernel_target(quad, table_quad, grid):
    x, y = grid.meshes()
    with pytest.raises(KernelMembershipError):
        fit_formal_polynomial(quad, np.sin(4 * x) * np.sin(4 * y), table_quad, "ker_h0", 3)


def test_fit_monotone_residual_in_degree(quad, table_quad):
    # smooth kernel member: residual decreases (non-strictly) with degree
    target = np.imag(table_quad.power(2, 1.0) + 0.3 * table_quad.power(4, 1j))
    resid = [
        fit_formal_polynomial(quad, target, table_quad, "ker_h0", degree=d).residual_rms
        for d in range(1, 6)
    ]
    for lo, hi in zip(resid[1:], resid[:-1]):
        assert lo <= hi + 1e-12


def test_fit_reconstruction_stays_in_kernel(quad, table_quad):
    from vekua.grid import interior_max
    from vekua.operators import h0

    target = np.imag(table_quad.z_one[2] + 0.5 * table_quad.z_i[1])
    fit = fit_formal_polynomial(quad, target, table_quad, "ker_h0", degree=3)
    recon = evaluate_fit(fit, table_quad)
    assert interior_max(h0(quad, recon), margin=2) <= 500 * H2
    assert fit.rank <= 2 * (3 + 1)


def test_fit_reports_structural_rank_deficiency(zero_sp, table_zero, grid):
    x, y = grid.meshes()
    fit = fit_formal_polynomial(zero_sp, 2 * x * y, table_zero, "ker_h0", degree=2)
    # Im Z^0(1) = Im 1 = 0 is a structurally zero column
    assert fit.rank < 2 * (2 + 1)
    assert fit.singular_values[-1] <= 1e-10 * fit.singular_values[0]
    assert fit.coefficient(2, "one") == pytest.approx(1.0, abs=1e-8)
