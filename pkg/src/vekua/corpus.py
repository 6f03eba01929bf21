"""Deterministic smooth test fields for operator-identity checks.

Products of low-degree polynomials with a centered Gaussian: smooth enough
for the O(h^2) convergence story, rich enough in mixed derivatives that no
identity holds for a degenerate reason.  No randomness anywhere; the
verification reports must be reproducible byte for byte.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid2D, d_x, d_y, interior_max, laplacian

__all__ = ["smooth_corpus", "corpus_scale"]


def smooth_corpus(grid: Grid2D):
    """Named complex test fields on the grid."""
    x, y = grid.meshes()
    bump = np.exp(-(x**2 + y**2))
    fields = [
        ("poly_bump", (1.0 + x + 0.5 * x * y) * bump + 1j * (x**2 - y + 0.5) * bump),
        ("cubic_mix", (x**3 - 3.0 * x * y**2) + 1j * (3.0 * x**2 * y - y**3 + x)),
        ("gauss_shift", (x - 0.3 * y**2) * bump + 1j * (y + 0.25 * x**2 - x * y) * bump),
    ]
    return fields


def corpus_scale(grid: Grid2D, w, margin: int = 2) -> float:
    """Scale of a test field: sup of the field and its first two derivatives."""
    w = np.asarray(w)
    return max(
        1.0,
        interior_max(w, margin),
        interior_max(d_x(grid, w), margin),
        interior_max(d_y(grid, w), margin),
        interior_max(laplacian(grid, w), margin),
    )
