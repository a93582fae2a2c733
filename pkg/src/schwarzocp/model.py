"""Grids, grid functions, strip decompositions and problem specifications.

Everything downstream (stencils, solvers, sweep drivers) works on the types
defined here.  Conventions shared by the whole package:

* the unit interval/square is discretized with N cells per side, h = 1/N;
* grid values are stored on the full point set, shaped ``(N+1,)`` in 1D and
  ``(N+1, N+1)`` in 2D with ``mesh[j, i]`` = value at ``(x_i, y_j)``;
* the flattened vector view is lexicographic with x fastest;
* subdomains are axis-aligned index boxes; the two-subdomain decompositions
  used by the experiments are vertical strips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

# problem kinds
OCP = "ocp"
ELLIPTIC = "elliptic"
ALPHA_ELLIPTIC = "alpha-elliptic"
KINDS = (OCP, ELLIPTIC, ALPHA_ELLIPTIC)

# overlap conventions for build_decomposition
EXTEND_BOTH = "extend-both"
HALF_OVERLAP = "half-overlap"
CONVENTIONS = (EXTEND_BOTH, HALF_OVERLAP)

# initial-guess policies
INIT_ZERO = "zero"
INIT_ONES = "ones"
INIT_RANDOM = "random"
INIT_POLICIES = (INIT_ZERO, INIT_ONES, INIT_RANDOM)


class ModelError(ValueError):
    """Invalid grid, decomposition or problem specification."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid on the unit interval (dim=1) or unit square (dim=2)."""

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ModelError(f"dim must be 1 or 2, got {self.dim}")
        if self.n < 2:
            raise ModelError(f"need n >= 2 for an interior point, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple:
        return (self.n + 1,) * self.dim

    @property
    def npoints(self) -> int:
        return (self.n + 1) ** self.dim

    @property
    def ninterior(self) -> int:
        return (self.n - 1) ** self.dim

    def coords(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n + 1)

    def zeros_mesh(self) -> np.ndarray:
        return np.zeros(self.shape)


def build_grid(dim: int, n: int) -> Grid:
    """Grid with n cells per side; rejects n < 2 (no interior point)."""
    return Grid(dim, n)


@dataclass(frozen=True)
class GridFunction:
    """Real values at every grid point.

    ``mesh`` is the shaped array (``[i]`` in 1D, ``[j, i]`` in 2D); ``values``
    is the flat lexicographic view with x fastest.  Instances are treated as
    immutable: code that updates values copies the mesh first.
    """

    grid: Grid
    mesh: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mesh, dtype=float)
        if m.shape == (self.grid.npoints,):
            m = m.reshape(self.grid.shape)
        if m.shape != self.grid.shape:
            raise ModelError(
                f"mesh shape {m.shape} does not match grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "mesh", m)

    @property
    def values(self) -> np.ndarray:
        return self.mesh.reshape(-1)

    @property
    def interior(self) -> np.ndarray:
        if self.grid.dim == 1:
            return self.mesh[1:-1]
        return self.mesh[1:-1, 1:-1]

    def boundary_mask(self) -> np.ndarray:
        mask = np.ones(self.grid.shape, dtype=bool)
        if self.grid.dim == 1:
            mask[1:-1] = False
        else:
            mask[1:-1, 1:-1] = False
        return mask

    def copy_mesh(self) -> np.ndarray:
        return self.mesh.copy()

    @classmethod
    def zeros(cls, grid: Grid) -> "GridFunction":
        return cls(grid, grid.zeros_mesh())


@dataclass(frozen=True)
class Subdomain:
    """Axis-aligned index box; ``lo``/``hi`` are inclusive bounds per axis.

    Axis order is (x,) in 1D and (x, y) in 2D.  The decompositions used by
    the sweep drivers are x-strips (full range in y), but the type supports
    any box with at least one interior point.
    """

    grid: Grid
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(int(v) for v in self.lo)
        hi = tuple(int(v) for v in self.hi)
        if len(lo) != self.grid.dim or len(hi) != self.grid.dim:
            raise ModelError("lo/hi must have one bound per axis")
        for axis, (a, b) in enumerate(zip(lo, hi)):
            if not (0 <= a < b <= self.grid.n):
                raise ModelError(f"axis {axis}: need 0 <= lo < hi <= n, got {a}..{b}")
            if b - a < 2:
                raise ModelError(f"axis {axis}: box {a}..{b} has no interior point")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def is_full(self) -> bool:
        return all(a == 0 for a in self.lo) and all(b == self.grid.n for b in self.hi)

    def box_slices(self) -> tuple:
        """Mesh slices selecting the whole box (y-axis first in 2D)."""
        if self.grid.dim == 1:
            return (slice(self.lo[0], self.hi[0] + 1),)
        return (
            slice(self.lo[1], self.hi[1] + 1),
            slice(self.lo[0], self.hi[0] + 1),
        )

    def interior_slices(self) -> tuple:
        if self.grid.dim == 1:
            return (slice(self.lo[0] + 1, self.hi[0]),)
        return (
            slice(self.lo[1] + 1, self.hi[1]),
            slice(self.lo[0] + 1, self.hi[0]),
        )

    @property
    def interior_shape(self) -> tuple:
        if self.grid.dim == 1:
            return (self.hi[0] - self.lo[0] - 1,)
        return (self.hi[1] - self.lo[1] - 1, self.hi[0] - self.lo[0] - 1)

    @cached_property
    def artificial_boundary(self) -> tuple:
        """Box-boundary points interior to the global domain, as index tuples.

        Index tuples follow axis order: ``(i,)`` in 1D, ``(i, j)`` in 2D.
        """
        pts = []
        n = self.grid.n
        if self.grid.dim == 1:
            for i in (self.lo[0], self.hi[0]):
                if 0 < i < n:
                    pts.append((i,))
            return tuple(pts)
        xlo, ylo = self.lo
        xhi, yhi = self.hi
        for i in (xlo, xhi):
            if 0 < i < n:
                for j in range(max(ylo, 1), min(yhi, n - 1) + 1):
                    pts.append((i, j))
        for j in (ylo, yhi):
            if 0 < j < n:
                for i in range(max(xlo + 1, 1), min(xhi - 1, n - 1) + 1):
                    pts.append((i, j))
        return tuple(pts)

    def artificial_boundary_mask(self) -> np.ndarray:
        mask = np.zeros(self.grid.shape, dtype=bool)
        for idx in self.artificial_boundary:
            if self.grid.dim == 1:
                mask[idx[0]] = True
            else:
                mask[idx[1], idx[0]] = True
        return mask


def whole_domain(grid: Grid) -> Subdomain:
    return Subdomain(grid, (0,) * grid.dim, (grid.n,) * grid.dim)


@dataclass(frozen=True)
class Decomposition:
    """Two overlapping x-strips covering the domain."""

    left: Subdomain
    right: Subdomain
    delta: int
    split_index: int
    convention: str = ""

    def __post_init__(self):
        if self.left.grid != self.right.grid:
            raise ModelError("left and right strips live on different grids")
        if self.left.lo[0] != 0 or self.right.hi[0] != self.left.grid.n:
            raise ModelError("strips must reach the physical boundary on the outside")
        if self.right.lo[0] >= self.left.hi[0]:
            raise ModelError("strips do not overlap")

    @property
    def grid(self) -> Grid:
        return self.left.grid

    @property
    def overlap_cells(self) -> int:
        return self.left.hi[0] - self.right.lo[0]


def strip_decomposition(grid: Grid, right_lo: int, left_hi: int, delta: int = 0,
                        split_index: int | None = None,
                        convention: str = "") -> Decomposition:
    """Decomposition from explicit strip edges: left = 0..left_hi, right = right_lo..n."""
    if not (0 < right_lo < left_hi < grid.n):
        raise ModelError(
            f"need 0 < right_lo < left_hi < n, got {right_lo}, {left_hi} (n={grid.n})"
        )
    if grid.dim == 1:
        left = Subdomain(grid, (0,), (left_hi,))
        right = Subdomain(grid, (right_lo,), (grid.n,))
    else:
        left = Subdomain(grid, (0, 0), (left_hi, grid.n))
        right = Subdomain(grid, (right_lo, 0), (grid.n, grid.n))
    if split_index is None:
        split_index = (right_lo + left_hi) // 2
    return Decomposition(left, right, delta, split_index, convention)


def build_decomposition(grid: Grid, delta: int, convention: str = EXTEND_BOTH) -> Decomposition:
    """Split at n/2 and widen by ``delta`` layers according to ``convention``.

    ``extend-both`` widens both strips by delta layers (overlap 2*delta cells);
    ``half-overlap`` widens so the total overlap is exactly delta cells.  The
    repository default is ``extend-both``: it is the convention under which the
    bundled reference tables are reproduced (see README).
    """
    if grid.n % 2 != 0:
        raise ModelError(f"n must be even to split at the midline, got {grid.n}")
    if delta < 1:
        raise ModelError(f"delta must be >= 1, got {delta}")
    if convention not in CONVENTIONS:
        raise ModelError(f"unknown convention {convention!r}")
    half = grid.n // 2
    if convention == EXTEND_BOTH:
        ext_left, ext_right = delta, delta
    else:
        ext_left = (delta + 1) // 2
        ext_right = delta - ext_left
    left_hi = half + ext_left
    right_lo = half - ext_right
    if right_lo <= 0 or left_hi >= grid.n:
        raise ModelError(
            f"delta={delta} ({convention}) pushes the overlap onto the physical boundary"
        )
    return strip_decomposition(grid, right_lo, left_hi, delta=delta, split_index=half,
                               convention=convention)


def sample_function(grid: Grid, tag: str, rng: np.random.Generator | None = None) -> GridFunction:
    """Sample a named analytic function at the grid nodes.

    Tags: ``zero``; ``ones`` (1 at interior points, 0 on the boundary);
    ``sin-sin`` (product of sin(pi x_d), the target state); ``sin-sin-source``
    (dim * pi^2 times the product, its image under the negative Laplacian);
    ``random`` (uniform [0, 1) at interior points, needs ``rng``).
    """
    if tag == "zero":
        return GridFunction.zeros(grid)
    if tag == "ones":
        mesh = grid.zeros_mesh()
        mesh[whole_domain(grid).interior_slices()] = 1.0
        return GridFunction(grid, mesh)
    if tag == "random":
        if rng is None:
            raise ModelError("tag 'random' needs an rng")
        mesh = grid.zeros_mesh()
        sl = whole_domain(grid).interior_slices()
        mesh[sl] = rng.random(mesh[sl].shape)
        return GridFunction(grid, mesh)
    if tag in ("sin-sin", "sin-sin-source"):
        x = grid.coords()
        if grid.dim == 1:
            mesh = np.sin(np.pi * x)
        else:
            sx = np.sin(np.pi * x)
            mesh = np.outer(sx, sx)  # mesh[j, i] = sin(pi y_j) sin(pi x_i)
        if tag == "sin-sin-source":
            mesh = grid.dim * math.pi ** 2 * mesh
        return GridFunction(grid, mesh)
    raise ModelError(f"unknown analytic tag {tag!r}")


@dataclass(frozen=True)
class ProblemSpec:
    """Everything needed to run one alternating-sweep experiment."""

    grid: Grid
    kind: str
    decomposition: Decomposition
    alpha: float = 1.0
    shift_c: float = 0.0
    f: GridFunction | None = None
    y_d: GridFunction | None = None
    init: str = INIT_ZERO
    seed: int = 0
    tol: float = 1e-14
    max_sweeps: int = 5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ModelError(f"unknown problem kind {self.kind!r}")
        if self.init not in INIT_POLICIES:
            raise ModelError(f"unknown init policy {self.init!r}")
        if self.kind in (OCP, ALPHA_ELLIPTIC) and not self.alpha > 0:
            raise ModelError("alpha must be positive")
        if self.shift_c < 0:
            raise ModelError("shift_c must be nonnegative")
        if self.kind == ALPHA_ELLIPTIC:
            object.__setattr__(self, "shift_c", 2.0 * self.alpha ** -0.5)
        if self.decomposition.grid != self.grid:
            raise ModelError("decomposition grid does not match")
        for gf_name in ("f", "y_d"):
            gf = getattr(self, gf_name)
            if gf is not None and gf.grid != self.grid:
                raise ModelError(f"{gf_name} lives on a different grid")
        if self.max_sweeps < 1:
            raise ModelError("max_sweeps must be >= 1")

    def source(self) -> GridFunction:
        return self.f if self.f is not None else GridFunction.zeros(self.grid)

    def target(self) -> GridFunction:
        return self.y_d if self.y_d is not None else GridFunction.zeros(self.grid)


def standard_spec(kind: str, n: int = 64, alpha: float = 1e-2, delta: int = 1,
                  convention: str = EXTEND_BOTH, init: str = INIT_ONES,
                  seed: int = 0, tol: float = 1e-14, max_sweeps: int = 5,
                  dim: int = 2) -> ProblemSpec:
    """Spec for the reference experiments.

    The control problem uses the manufactured data f = dim*pi^2*prod(sin),
    y_d = prod(sin); the two equation kinds are run on the homogeneous
    equation, so the iterates coincide with the errors.  The default initial
    guess is 1 at interior points: this is the protocol under which the
    bundled reference tables are reproduced.
    """
    grid = build_grid(dim, n)
    deco = build_decomposition(grid, delta, convention)
    if kind == OCP:
        f = sample_function(grid, "sin-sin-source")
        y_d = sample_function(grid, "sin-sin")
        return ProblemSpec(grid, OCP, deco, alpha=alpha, f=f, y_d=y_d, init=init,
                           seed=seed, tol=tol, max_sweeps=max_sweeps)
    if kind == ELLIPTIC:
        return ProblemSpec(grid, ELLIPTIC, deco, init=init, seed=seed, tol=tol,
                           max_sweeps=max_sweeps)
    if kind == ALPHA_ELLIPTIC:
        return ProblemSpec(grid, ALPHA_ELLIPTIC, deco, alpha=alpha, init=init,
                           seed=seed, tol=tol, max_sweeps=max_sweeps)
    raise ModelError(f"unknown problem kind {kind!r}")


def initial_fields(spec: ProblemSpec) -> tuple:
    """Initial-guess fields per the spec's policy: (Y0, P0) or (W0, None)."""
    rng = np.random.default_rng(spec.seed)
    if spec.init == INIT_ZERO:
        tag = "zero"
        make = lambda: sample_function(spec.grid, tag)
    elif spec.init == INIT_ONES:
        make = lambda: sample_function(spec.grid, "ones")
    else:
        make = lambda: sample_function(spec.grid, "random", rng=rng)
    if spec.kind == OCP:
        return make(), make()
    return make(), None
