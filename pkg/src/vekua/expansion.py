"""Taylor coefficients in formal powers and formal-polynomial fitting.

Two approximation routes.  The collocation fit is the workhorse: linear
least squares over the real span of the imaginary (or real) parts of the
sampled formal powers, which are complete for the respective kernels.  The
Taylor route evaluates successive pair derivatives at the origin; repeated
numerical differentiation is ill-conditioned, so it is capped at degree 6
and every coefficient carries an explicit uncertainty estimate derived from
the stencil model.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import KernelMembershipError
from .grid import d_x, d_y, interior, interior_max
from .formal_powers import FormalPowerTable
from .operators import bers_derivative_seq, h0, h2
from .superpotential import Superpotential

__all__ = [
    "TaylorCoefficients",
    "FitResult",
    "taylor_coefficients",
    "evaluate_series",
    "fit_formal_polynomial",
    "evaluate_fit",
]

MAX_TAYLOR_DEGREE = 6
KERNEL_CAP = 1000.0  # units of h^2 * scale
# Safety factor on the propagated stencil-noise model; calibrated once
# against round trips of sampled formal powers.
NOISE_SAFETY = 5.0


@dataclass(eq=False)
class TaylorCoefficients:
    """Coefficients a_n = (n-th pair derivative at origin) / n! with noise bars."""

    values: np.ndarray  # complex, length degree+1
    uncertainty: np.ndarray  # real, same length
    origin: tuple[int, int]

    @property
    def degree(self) -> int:
        return len(self.values) - 1


def _third_derivative_scale(sp, w) -> float:
    # the coefficients are read at the origin, so the noise model samples a
    # centered window: one-sided boundary stencils leave kinks in iterated
    # derivative fields that would otherwise dominate the estimate
    grid = sp.grid
    margin = max(2, min(grid.gx.n, grid.gy.n) // 4)
    dx3 = d_x(grid, d_x(grid, d_x(grid, w)))
    dy3 = d_y(grid, d_y(grid, d_y(grid, w)))
    return interior_max(dx3, margin=margin) + interior_max(dy3, margin=margin)


def taylor_coefficients(sp: Superpotential, w, degree: int) -> TaylorCoefficients:
    """Origin-centered coefficients of a field in the formal-power basis.

    Applies the alternating pair derivatives of the period-two sequence and
    reads off the origin value at each level.  Raises when the propagated
    stencil-noise estimate drowns out every computed coefficient, which is
    the signal that the grid is too coarse for the requested degree.
    """
    if degree > MAX_TAYLOR_DEGREE:
        raise ValueError(f"degree {degree} exceeds the supported maximum {MAX_TAYLOR_DEGREE}")
    if degree < 0:
        raise ValueError("degree must be non-negative")
    grid = sp.grid
    w = grid.check(np.asarray(w, dtype=complex))
    i0, j0 = grid.center
    h = grid.hmax

    values = np.empty(degree + 1, dtype=complex)
    noise = np.empty(degree + 1)
    cur = w
    level_noise = 1e-14 * max(1.0, interior_max(w, margin=1))
    values[0] = cur[i0, j0]
    noise[0] = level_noise
    # per-level model: new truncation (h^2/6) * |third derivatives|, while
    # noise already present is re-scaled by the conjugate-term weight; the
    # safety factor absorbs the smooth growth of differentiated error fields
    carry = 1.0 + float(np.max(np.abs(sp.dz_chi())))
    for m in range(degree):
        trunc = (h**2 / 6.0) * _third_derivative_scale(sp, cur)
        level_noise = NOISE_SAFETY * trunc + carry * level_noise
        cur = bers_derivative_seq(sp, m, cur)
        values[m + 1] = cur[i0, j0] / factorial(m + 1)
        noise[m + 1] = level_noise / factorial(m + 1)

    biggest = float(np.max(np.abs(values)))
    if noise[degree] > max(biggest, 1e-12):
        raise ValueError(
            f"stencil noise {noise[degree]:.3e} exceeds every coefficient "
            f"({biggest:.3e}); use a finer grid for degree {degree}"
        )
    return TaylorCoefficients(values=values, uncertainty=noise, origin=(i0, j0))


def evaluate_series(coeffs: TaylorCoefficients, table: FormalPowerTable) -> np.ndarray:
    """Sum of formal powers with the given coefficients."""
    if coeffs.degree > table.n_max:
        raise ValueError("coefficient degree exceeds the table range")
    total = np.zeros(table.sp.grid.shape, dtype=complex)
    for n, a in enumerate(coeffs.values):
        total += table.power(n, a)
    return total


@dataclass(eq=False)
class FitResult:
    """Least-squares expansion over formal-power parts."""

    basis_kind: str
    degree: int
    coefficients: np.ndarray  # real, length 2*(degree+1): slots (n,1), (n,i)
    residual_max: float
    residual_rms: float
    singular_values: np.ndarray
    rank: int

    def coefficient(self, n: int, which: str) -> float:
        idx = 2 * n + (0 if which == "one" else 1)
        return float(self.coefficients[idx])


def _basis_part(basis_kind: str, field_c) -> np.ndarray:
    if basis_kind == "ker_h0":
        return np.imag(field_c)
    if basis_kind == "ker_h2":
        return np.real(field_c)
    raise ValueError("basis_kind must be 'ker_h0' or 'ker_h2'")


def fit_formal_polynomial(
    sp: Superpotential,
    target,
    table: FormalPowerTable,
    basis_kind: str,
    degree: int,
    margin: int = 2,
) -> FitResult:
    """Collocation fit of a kernel element in the degree-capped basis.

    The basis spans the imaginary (``ker_h0``) or real (``ker_h2``) parts of
    the formal powers with coefficients 1 and i, n = 0..degree.  Membership
    of the target in the corresponding kernel is checked first; rank
    deficiency is tolerated (one column is structurally zero) and reported
    through the singular values.
    """
    grid = sp.grid
    target = grid.check(np.asarray(target, dtype=float))
    if degree > table.n_max:
        raise ValueError("degree exceeds the table range")
    h2_unit = grid.hmax**2
    scale = max(1.0, float(np.max(np.abs(target))))
    op = h0 if basis_kind == "ker_h0" else h2 if basis_kind == "ker_h2" else None
    if op is None:
        raise ValueError("basis_kind must be 'ker_h0' or 'ker_h2'")
    kernel_resid = interior_max(op(sp, target), margin=2)
    if kernel_resid > KERNEL_CAP * h2_unit * scale:
        raise KernelMembershipError(
            f"target is not in {basis_kind}: residual {kernel_resid:.3e} exceeds "
            f"{KERNEL_CAP * h2_unit * scale:.3e}"
        )

    columns = []
    for n in range(degree + 1):
        columns.append(interior(_basis_part(basis_kind, table.z_one[n]), margin).ravel())
        columns.append(interior(_basis_part(basis_kind, table.z_i[n]), margin).ravel())
    design = np.column_stack(columns)
    rhs = interior(target, margin).ravel()
    coef, _, rank, sv = np.linalg.lstsq(design, rhs, rcond=None)
    resid = design @ coef - rhs
    return FitResult(
        basis_kind=basis_kind,
        degree=degree,
        coefficients=coef,
        residual_max=float(np.max(np.abs(resid))),
        residual_rms=float(np.sqrt(np.mean(resid**2))),
        singular_values=sv,
        rank=int(rank),
    )


def evaluate_fit(fit: FitResult, table: FormalPowerTable) -> np.ndarray:
    """Reconstruct the fitted field on the full grid."""
    total = np.zeros(table.sp.grid.shape)
    for n in range(fit.degree + 1):
        total += fit.coefficients[2 * n] * _basis_part(fit.basis_kind, table.z_one[n])
        total += fit.coefficients[2 * n + 1] * _basis_part(fit.basis_kind, table.z_i[n])
    return total
