"""Randomized verification checks shared by the CLI ``verify`` subcommand
and the test suite: componentwise inequality of coupled pairs, discrete
maximum principle, pointwise domination, dense-oracle agreement, and the
half-step locality/fixed-point invariants.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import metrics, saddle, schwarz
from .fdm import StencilOperator
from .model import (
    INIT_RANDOM,
    OCP,
    GridFunction,
    build_decomposition,
    build_grid,
    sample_function,
    standard_spec,
)


@dataclass
class CheckSummary:
    name: str
    passed: int = 0
    failed: int = 0
    details: list = field(default_factory=list)

    def record(self, ok: bool, detail: str = ""):
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if detail:
                self.details.append(detail)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def __str__(self):
        mark = "ok" if self.ok else "FAIL"
        return f"{self.name}: {self.passed} passed, {self.failed} failed [{mark}]"


def _random_mesh(grid, rng, scale=1.0):
    return scale * rng.standard_normal(grid.shape)


def lemma_inequality_check(n: int, seed: int) -> metrics.Verdict:
    """Coupled pair from a random-boundary subdomain solve feeds the
    componentwise inequality checker."""
    rng = np.random.default_rng(seed)
    grid = build_grid(2, n)
    op = StencilOperator(grid, 0.0)
    deco = build_decomposition(grid, 1)
    region = deco.left if rng.integers(2) else deco.right
    alpha = float(10.0 ** rng.uniform(-1, 1))
    system = saddle.build_coupled_system(
        op, alpha,
        boundary_y=_random_mesh(grid, rng),
        boundary_p=_random_mesh(grid, rng),
        region=region,
    )
    psi, phi = saddle.solve_coupled(system)
    return metrics.check_lemma_inequality(op, psi, phi, 1.0 / alpha, region=region)


def max_principle_check(n: int, seed: int) -> metrics.Verdict:
    """Sign-definite stencil image by construction, then the bound check."""
    rng = np.random.default_rng(seed)
    grid = build_grid(2, n)
    op = StencilOperator(grid, float(rng.uniform(0.0, 2.0)))
    sign = 1.0 if rng.integers(2) else -1.0
    rhs = -sign * rng.random((n - 1, n - 1))
    boundary = _random_mesh(grid, rng)
    z = saddle.solve_elliptic(op, rhs=rhs, boundary=boundary)
    return metrics.check_max_principle(op, z)


def domination_check(n: int, seed: int, alpha: float = 1e-2) -> metrics.Verdict:
    """Pointwise merit-vs-comparison-iterate check on a random run."""
    spec = standard_spec(OCP, n=n, alpha=alpha, delta=1, init=INIT_RANDOM,
                         seed=seed, max_sweeps=3)
    ocp_hist, xi_hist = schwarz.run_domination_pair(spec)
    return metrics.check_domination(ocp_hist, xi_hist)


def dense_oracle_check(n: int, seed: int, tol: float = 1e-12) -> bool:
    """Sparse direct solves agree with the dense gaussian-elimination twin."""
    rng = np.random.default_rng(seed)
    grid = build_grid(2, n)
    op = StencilOperator(grid, float(rng.uniform(0.0, 1.0)))
    rhs = rng.standard_normal((n - 1, n - 1))
    boundary = _random_mesh(grid, rng)
    a = saddle.solve_elliptic(op, rhs=rhs, boundary=boundary)
    b = saddle.solve_elliptic_dense(op, rhs=rhs, boundary=boundary)
    if metrics.max_norm(a.mesh - b.mesh) > tol * max(1.0, metrics.max_norm(a)):
        return False
    alpha = float(10.0 ** rng.uniform(-2, 0))
    system = saddle.build_coupled_system(
        op, alpha,
        f=GridFunction(grid, _random_mesh(grid, rng)),
        y_d=GridFunction(grid, _random_mesh(grid, rng)),
        boundary_y=_random_mesh(grid, rng),
        boundary_p=_random_mesh(grid, rng),
    )
    ys, ps = saddle.solve_coupled(system)
    yd, pd = saddle.solve_coupled_dense(system)
    scale = max(1.0, metrics.max_norm(ys), metrics.max_norm(ps))
    return (metrics.max_norm(ys.mesh - yd.mesh) <= tol * scale
            and metrics.max_norm(ps.mesh - pd.mesh) <= tol * scale)


def fixed_point_check(n: int, seed: int, tol: float = 1e-10) -> bool:
    """The exact discrete solution is invariant under both half-steps."""
    rng = np.random.default_rng(seed)
    alpha = float(10.0 ** rng.uniform(-3, 0))
    spec = standard_spec(OCP, n=n, alpha=alpha, delta=1, max_sweeps=1)
    exact_y, exact_p = schwarz.exact_solution(spec)
    state = schwarz.IterateState(spec.kind, exact_y, exact_p)
    for sub in (spec.decomposition.left, spec.decomposition.right):
        state = schwarz.half_step(state, sub, spec, mode=schwarz.DIRECT_MODE)
    drift = max(metrics.max_norm(state.y.mesh - exact_y.mesh),
                metrics.max_norm(state.ptilde.mesh - exact_p.mesh))
    return drift <= tol * max(1.0, metrics.max_norm(exact_y))


def locality_check(n: int, seed: int) -> bool:
    """A half-step changes no value outside the target subdomain interior."""
    rng = np.random.default_rng(seed)
    spec = standard_spec(OCP, n=n, alpha=1e-2, delta=1, init=INIT_RANDOM,
                         seed=seed, max_sweeps=1)
    y0 = sample_function(spec.grid, "random", rng=rng)
    p0 = sample_function(spec.grid, "random", rng=rng)
    state = schwarz.IterateState(spec.kind, y0, p0)
    for sub in (spec.decomposition.left, spec.decomposition.right):
        new = schwarz.half_step(state, sub, spec, mode=schwarz.ERROR_MODE)
        outside = ~np.zeros(spec.grid.shape, dtype=bool)
        outside[sub.interior_slices()] = False
        if not (new.y.mesh[outside] == state.y.mesh[outside]).all():
            return False
        if not (new.ptilde.mesh[outside] == state.ptilde.mesh[outside]).all():
            return False
        state = new
    return True


def run_verification(ns=(4, 8, 16), n_seeds: int = 20, base_seed: int = 0,
                     n_domination: int = 10) -> list:
    """Full randomized check battery; returns one summary per family."""
    lemma = CheckSummary("coupled-pair inequality")
    dmp = CheckSummary("discrete maximum principle")
    dom = CheckSummary("pointwise domination")
    oracle = CheckSummary("dense-oracle agreement")
    fixed = CheckSummary("half-step fixed point")
    local = CheckSummary("half-step locality")
    for n in ns:
        for s in range(n_seeds):
            seed = base_seed + s
            v = lemma_inequality_check(n, seed)
            lemma.record(v.status == "pass", f"n={n} seed={seed}: {v.message}")
            v = max_principle_check(n, seed)
            dmp.record(v.status == "pass", f"n={n} seed={seed}: {v.message}")
        oracle_ns = [n] if n <= 8 else []
        for on in oracle_ns:
            for s in range(n_seeds):
                seed = base_seed + s
                oracle.record(dense_oracle_check(on, seed), f"n={on} seed={seed}")
    for s in range(n_seeds):
        seed = base_seed + s
        fixed.record(fixed_point_check(16, seed), f"seed={seed}")
        local.record(locality_check(16, seed), f"seed={seed}")
    for s in range(n_domination):
        seed = base_seed + s
        v = domination_check(16, seed)
        dom.record(v.status == "pass", f"seed={seed}: {v.message}")
    return [lemma, dmp, dom, oracle, fixed, local]
