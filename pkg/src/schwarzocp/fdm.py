"""Finite-difference stencil operator -Lap_h + c*I on uniform grids.

The 3-point (1D) and 5-point (2D) stencils act on full grid functions and
return values at interior points only; boundary values enter the stencil as
given data.  ``interior_matrix`` assembles the interior-to-interior matrix
(an M-matrix) used by the direct solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .model import Grid, GridFunction, Subdomain, whole_domain


@dataclass(frozen=True)
class StencilOperator:
    """Constant-coefficient operator -Lap_h + shift_c * I."""

    grid: Grid
    shift_c: float = 0.0

    def __post_init__(self):
        if self.shift_c < 0:
            raise ValueError("shift_c must be nonnegative")


def _check_same_grid(op: StencilOperator, z: GridFunction):
    if z.grid != op.grid:
        raise ValueError("grid function does not live on the operator's grid")


def apply_on_subdomain(op: StencilOperator, z: GridFunction, sub: Subdomain) -> np.ndarray:
    """Stencil action at the interior points of ``sub``.

    Subdomain boundary values (physical and artificial alike) are read from
    ``z`` and treated as given data.  Returns an array shaped like the
    subdomain interior.
    """
    _check_same_grid(op, z)
    if sub.grid != op.grid:
        raise ValueError("subdomain does not live on the operator's grid")
    h2 = op.grid.h ** 2
    m = z.mesh
    if op.grid.dim == 1:
        lo, hi = sub.lo[0], sub.hi[0]
        c = m[lo + 1:hi]
        out = (2.0 * c - m[lo:hi - 1] - m[lo + 2:hi + 1]) / h2
    else:
        (xlo, ylo), (xhi, yhi) = sub.lo, sub.hi
        c = m[ylo + 1:yhi, xlo + 1:xhi]
        out = (
            4.0 * c
            - m[ylo + 1:yhi, xlo:xhi - 1]
            - m[ylo + 1:yhi, xlo + 2:xhi + 1]
            - m[ylo:yhi - 1, xlo + 1:xhi]
            - m[ylo + 2:yhi + 1, xlo + 1:xhi]
        ) / h2
    if op.shift_c:
        out = out + op.shift_c * c
    return out


def apply(op: StencilOperator, z: GridFunction) -> np.ndarray:
    """Stencil action at all interior points of the global grid."""
    return apply_on_subdomain(op, z, whole_domain(op.grid))


def _lap1d_interior(m: int, h: float) -> sp.spmatrix:
    # m interior unknowns of -d^2/dx^2 at spacing h
    e = np.ones(m)
    return sp.diags([-e[:-1], 2.0 * e, -e[:-1]], offsets=[-1, 0, 1]) / h ** 2


def interior_matrix(op: StencilOperator, region: Subdomain | None = None) -> sp.csc_matrix:
    """Interior-to-interior matrix of the operator restricted to ``region``.

    Unknowns are the region's interior points in lexicographic order with x
    fastest.  Diagonal 2*dim/h^2 + c, off-diagonals -1/h^2: positive diagonal,
    nonpositive off-diagonals and weak diagonal dominance (an M-matrix).
    """
    if region is None:
        region = whole_domain(op.grid)
    h = op.grid.h
    if op.grid.dim == 1:
        mx = region.hi[0] - region.lo[0] - 1
        a = _lap1d_interior(mx, h)
    else:
        mx = region.hi[0] - region.lo[0] - 1
        my = region.hi[1] - region.lo[1] - 1
        a = sp.kron(sp.identity(my), _lap1d_interior(mx, h)) + sp.kron(
            _lap1d_interior(my, h), sp.identity(mx)
        )
    if op.shift_c:
        a = a + op.shift_c * sp.identity(a.shape[0])
    return a.tocsc()


def boundary_contribution(op: StencilOperator, data_mesh: np.ndarray,
                          region: Subdomain) -> np.ndarray:
    """Known boundary terms moved to the right-hand side of a region solve.

    For each interior point adjacent to the region boundary the stencil
    couples to a known boundary value with weight -1/h^2; eliminating it adds
    value/h^2 on the right-hand side.  ``data_mesh`` is a full-grid array the
    boundary values are read from.  Returns an interior-shaped array.
    """
    h2 = op.grid.h ** 2
    g = np.zeros(region.interior_shape)
    if op.grid.dim == 1:
        lo, hi = region.lo[0], region.hi[0]
        g[0] += data_mesh[lo] / h2
        g[-1] += data_mesh[hi] / h2
        return g
    (xlo, ylo), (xhi, yhi) = region.lo, region.hi
    g[:, 0] += data_mesh[ylo + 1:yhi, xlo] / h2
    g[:, -1] += data_mesh[ylo + 1:yhi, xhi] / h2
    g[0, :] += data_mesh[ylo, xlo + 1:xhi] / h2
    g[-1, :] += data_mesh[yhi, xlo + 1:xhi] / h2
    return g
