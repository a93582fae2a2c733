"""Direct solvers for the single elliptic equation and the coupled
state/adjoint system, on the global domain and on subdomains.

All solvers eliminate the boundary rows: Dirichlet data is folded into the
right-hand side, so the factored interior matrix of a given (operator,
region[, alpha]) triple is fixed and reused across alternating sweeps.  The
sparse LU factorizations are cached; a dense Gaussian-elimination path with
independent matrix assembly serves as the test oracle on small grids.

Solutions are returned as full-grid functions: region interior gets the
solution, the region boundary gets the supplied data, points outside the
region are zero.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .fdm import StencilOperator, boundary_contribution, interior_matrix
from .model import GridFunction, Subdomain, whole_domain

#: max-norm residual bound, relative to the right-hand side scale
RESIDUAL_TOL = 1e-10

_factor_lock = threading.Lock()
_factor_cache: dict = {}


class SaddleSolverError(RuntimeError):
    """Factorization failure or residual contract violation (internal error)."""


def clear_factor_cache():
    with _factor_lock:
        _factor_cache.clear()


def _region_key(op: StencilOperator, region: Subdomain) -> tuple:
    return (op.grid.dim, op.grid.n, op.shift_c, region.lo, region.hi)


def _elliptic_factor(op: StencilOperator, region: Subdomain):
    key = ("elliptic",) + _region_key(op, region)
    with _factor_lock:
        hit = _factor_cache.get(key)
        if hit is not None:
            return hit
        a = interior_matrix(op, region)
        try:
            lu = splu(a)
        except RuntimeError as exc:  # pragma: no cover - M-matrices do not get here
            raise SaddleSolverError(f"elliptic factorization failed: {exc}") from exc
        _factor_cache[key] = (lu, a)
        return lu, a


def _coupled_matrix(op: StencilOperator, region: Subdomain, alpha: float) -> sp.csc_matrix:
    a = interior_matrix(op, region)
    m = a.shape[0]
    eye = sp.identity(m)
    return sp.bmat([[a, eye / alpha], [-eye, a]]).tocsc()


def _coupled_factor(op: StencilOperator, region: Subdomain, alpha: float):
    key = ("coupled",) + _region_key(op, region) + (alpha,)
    with _factor_lock:
        hit = _factor_cache.get(key)
        if hit is not None:
            return hit
        block = _coupled_matrix(op, region, alpha)
        try:
            lu = splu(block)
        except RuntimeError as exc:  # pragma: no cover
            raise SaddleSolverError(f"coupled factorization failed: {exc}") from exc
        _factor_cache[key] = (lu, block)
        return lu, block


def _as_mesh(data, grid) -> np.ndarray | None:
    if data is None:
        return None
    if isinstance(data, GridFunction):
        return data.mesh
    arr = np.asarray(data, dtype=float)
    if arr.shape != grid.shape:
        raise ValueError("boundary data must be a full-grid array")
    return arr


def _interior_rhs(rhs, region: Subdomain) -> np.ndarray:
    if rhs is None:
        return np.zeros(region.interior_shape)
    if isinstance(rhs, GridFunction):
        return rhs.mesh[region.interior_slices()].copy()
    arr = np.asarray(rhs, dtype=float)
    if arr.shape != region.interior_shape:
        raise ValueError(
            f"rhs shape {arr.shape} does not match region interior {region.interior_shape}"
        )
    return arr


def _check_residual(mat, x: np.ndarray, b: np.ndarray):
    res = np.abs(mat @ x - b).max()
    scale = np.abs(b).max()
    if scale == 0.0:
        scale = 1.0
    if res > RESIDUAL_TOL * scale:
        raise SaddleSolverError(
            f"solver residual {res:.3e} exceeds {RESIDUAL_TOL:.0e} * rhs scale {scale:.3e}"
        )


def _embed(region: Subdomain, interior: np.ndarray, boundary_mesh) -> GridFunction:
    grid = region.grid
    mesh = grid.zeros_mesh()
    if boundary_mesh is not None:
        mesh[region.box_slices()] = boundary_mesh[region.box_slices()]
    mesh[region.interior_slices()] = interior.reshape(region.interior_shape)
    return GridFunction(grid, mesh)


def solve_elliptic(op: StencilOperator, rhs=None, boundary=None,
                   region: Subdomain | None = None) -> GridFunction:
    """Solve L_h W = rhs on the region interior with Dirichlet data ``boundary``.

    ``rhs`` is an interior-shaped array or a full grid function (region
    interior used); ``boundary`` is a full-grid source for the region-boundary
    values (None means zero).  The residual is verified against
    ``RESIDUAL_TOL`` relative to the right-hand side scale.
    """
    if region is None:
        region = whole_domain(op.grid)
    lu, a = _elliptic_factor(op, region)
    b = _interior_rhs(rhs, region)
    bmesh = _as_mesh(boundary, op.grid)
    if bmesh is not None:
        b = b + boundary_contribution(op, bmesh, region)
    bf = b.reshape(-1)
    x = lu.solve(bf)
    _check_residual(a, x, bf)
    return _embed(region, x, bmesh)


@dataclass(frozen=True)
class CoupledSystem:
    """Assembled coupled system [L_h, I/alpha; -I, L_h] on a region.

    ``rhs_state``/``rhs_adjoint`` are interior-shaped arrays with all known
    boundary terms already moved to the right-hand side; the original
    boundary sources are kept so solutions can report their boundary values.
    """

    operator: StencilOperator
    alpha: float
    rhs_state: np.ndarray
    rhs_adjoint: np.ndarray
    region: Subdomain
    boundary_y: np.ndarray | None = None
    boundary_p: np.ndarray | None = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


def build_coupled_system(op: StencilOperator, alpha: float, f=None, y_d=None,
                         boundary_y=None, boundary_p=None,
                         region: Subdomain | None = None) -> CoupledSystem:
    """Coupled system for L_h Y = f - P/alpha, L_h P = Y - y_d on ``region``.

    Dirichlet data for Y and P is read from the full-grid sources
    ``boundary_y``/``boundary_p`` (None means zero on the region boundary).
    """
    if region is None:
        region = whole_domain(op.grid)
    by = _as_mesh(boundary_y, op.grid)
    bp = _as_mesh(boundary_p, op.grid)
    rhs_state = _interior_rhs(f, region)
    if by is not None:
        rhs_state = rhs_state + boundary_contribution(op, by, region)
    rhs_adjoint = -_interior_rhs(y_d, region)
    if bp is not None:
        rhs_adjoint = rhs_adjoint + boundary_contribution(op, bp, region)
    return CoupledSystem(op, alpha, rhs_state, rhs_adjoint, region, by, bp)


def solve_coupled(system: CoupledSystem) -> tuple:
    """Solve the coupled system exactly; returns (Y, P) grid functions."""
    region = system.region
    lu, block = _coupled_factor(system.operator, region, system.alpha)
    b = np.concatenate([system.rhs_state.reshape(-1), system.rhs_adjoint.reshape(-1)])
    x = lu.solve(b)
    _check_residual(block, x, b)
    m = x.size // 2
    y = _embed(region, x[:m], system.boundary_y)
    p = _embed(region, x[m:], system.boundary_p)
    return y, p


def solve_coupled_schur(system: CoupledSystem) -> tuple:
    """Alternative route via the reduced form (alpha*L_h^2 + I) Y = ... .

    Eliminates the adjoint instead of factoring the block system; used to
    cross-check :func:`solve_coupled`.
    """
    region = system.region
    a = interior_matrix(system.operator, region)
    alpha = system.alpha
    by = system.rhs_state.reshape(-1)
    bp = system.rhs_adjoint.reshape(-1)
    reduced = (alpha * (a @ a) + sp.identity(a.shape[0])).tocsc()
    yi = splu(reduced).solve(alpha * (a @ by) - bp)
    pi = alpha * (by - a @ yi)
    y = _embed(region, yi, system.boundary_y)
    p = _embed(region, pi, system.boundary_p)
    return y, p


def recover_control(ptilde: GridFunction, alpha: float) -> GridFunction:
    """Control from the adjoint: U = -P/alpha at interior points, 0 on the boundary."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    grid = ptilde.grid
    mesh = grid.zeros_mesh()
    sl = whole_domain(grid).interior_slices()
    mesh[sl] = -ptilde.mesh[sl] / alpha
    return GridFunction(grid, mesh)


# ---------------------------------------------------------------------------
# dense oracle path: independent assembly, LAPACK gaussian elimination
# ---------------------------------------------------------------------------

_DENSE_LIMIT = 5000  # unknowns; the oracle is for small grids only


def _interior_points(region: Subdomain) -> list:
    grid = region.grid
    if grid.dim == 1:
        return [(i,) for i in range(region.lo[0] + 1, region.hi[0])]
    return [
        (i, j)
        for j in range(region.lo[1] + 1, region.hi[1])
        for i in range(region.lo[0] + 1, region.hi[0])
    ]


def _dense_interior_matrix(op: StencilOperator, region: Subdomain) -> np.ndarray:
    pts = _interior_points(region)
    if len(pts) > _DENSE_LIMIT:
        raise ValueError("dense oracle limited to small regions")
    index = {p: k for k, p in enumerate(pts)}
    h2 = op.grid.h ** 2
    a = np.zeros((len(pts), len(pts)))
    for p, k in index.items():
        a[k, k] = 2.0 * op.grid.dim / h2 + op.shift_c
        for axis in range(op.grid.dim):
            for step in (-1, 1):
                q = list(p)
                q[axis] += step
                q = tuple(q)
                if q in index:
                    a[k, index[q]] = -1.0 / h2
    return a


def solve_elliptic_dense(op: StencilOperator, rhs=None, boundary=None,
                         region: Subdomain | None = None) -> GridFunction:
    """Dense-oracle twin of :func:`solve_elliptic`."""
    if region is None:
        region = whole_domain(op.grid)
    a = _dense_interior_matrix(op, region)
    b = _interior_rhs(rhs, region)
    bmesh = _as_mesh(boundary, op.grid)
    if bmesh is not None:
        b = b + boundary_contribution(op, bmesh, region)
    x = np.linalg.solve(a, b.reshape(-1))
    return _embed(region, x, bmesh)


def solve_coupled_dense(system: CoupledSystem) -> tuple:
    """Dense-oracle twin of :func:`solve_coupled`."""
    region = system.region
    a = _dense_interior_matrix(system.operator, region)
    m = a.shape[0]
    block = np.zeros((2 * m, 2 * m))
    block[:m, :m] = a
    block[m:, m:] = a
    block[:m, m:] = np.eye(m) / system.alpha
    block[m:, :m] = -np.eye(m)
    b = np.concatenate([system.rhs_state.reshape(-1), system.rhs_adjoint.reshape(-1)])
    x = np.linalg.solve(block, b)
    y = _embed(region, x[:m], system.boundary_y)
    p = _embed(region, x[m:], system.boundary_p)
    return y, p
