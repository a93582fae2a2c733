import math

import numpy as np
import pytest

from schwarzocp import model


class TestGrid:
    def test_smallest_valid_grid(self):
        g = model.build_grid(1, 2)
        assert g.npoints == 3
        assert g.h == 0.5

    def test_reference_grid(self):
        g = model.build_grid(2, 64)
        assert g.npoints == 65 ** 2
        assert g.h == 1.0 / 64

    def test_interior_count(self):
        g = model.build_grid(2, 4)
        assert g.npoints == 25
        assert g.ninterior == 9

    @pytest.mark.parametrize("n", [0, 1])
    def test_rejects_no_interior(self, n):
        with pytest.raises(model.ModelError):
            model.build_grid(1, n)

    def test_rejects_bad_dim(self):
        with pytest.raises(model.ModelError):
            model.build_grid(3, 8)

    @pytest.mark.parametrize("dim,n", [(1, 5), (1, 16), (2, 4), (2, 9)])
    def test_partition_property(self, dim, n):
        g = model.build_grid(dim, n)
        gf = model.GridFunction.zeros(g)
        n_boundary = int(gf.boundary_mask().sum())
        assert g.ninterior + n_boundary == g.npoints
        if dim == 2:
            assert g.ninterior == (n - 1) ** 2


class TestGridFunction:
    def test_lexicographic_x_fastest(self):
        g = model.build_grid(2, 3)
        mesh = np.arange(16.0).reshape(4, 4)  # mesh[j, i] = 4j + i
        gf = model.GridFunction(g, mesh)
        assert (gf.values == np.arange(16.0)).all()

    def test_flat_roundtrip(self):
        g = model.build_grid(2, 4)
        rng = np.random.default_rng(0)
        flat = rng.random(g.npoints)
        gf = model.GridFunction(g, flat)
        assert (gf.values == flat).all()
        assert gf.mesh.shape == (5, 5)

    def test_interior_view(self):
        g = model.build_grid(2, 4)
        gf = model.sample_function(g, "ones")
        assert gf.interior.shape == (3, 3)
        assert (gf.interior == 1.0).all()
        assert gf.mesh[0].sum() == 0.0

    def test_shape_mismatch(self):
        g = model.build_grid(1, 4)
        with pytest.raises(model.ModelError):
            model.GridFunction(g, np.zeros(7))


class TestDecomposition:
    def test_figure_layout_n16_delta2(self):
        g = model.build_grid(2, 16)
        d = model.build_decomposition(g, 2, model.EXTEND_BOTH)
        assert (d.left.lo[0], d.left.hi[0]) == (0, 10)
        assert (d.right.lo[0], d.right.hi[0]) == (6, 16)
        assert d.overlap_cells == 4

    def test_minimal_case(self):
        g = model.build_grid(1, 4)
        d = model.build_decomposition(g, 1, model.EXTEND_BOTH)
        assert (d.left.lo[0], d.left.hi[0]) == (0, 3)
        assert (d.right.lo[0], d.right.hi[0]) == (1, 4)

    def test_half_overlap_single_cell(self):
        g = model.build_grid(2, 64)
        d = model.build_decomposition(g, 1, model.HALF_OVERLAP)
        assert d.overlap_cells == 1

    @pytest.mark.parametrize("delta", [1, 2, 3, 4])
    def test_coverage_and_overlap(self, delta):
        g = model.build_grid(2, 16)
        d = model.build_decomposition(g, delta)
        covered = np.zeros(g.shape, dtype=bool)
        for sub in (d.left, d.right):
            covered[sub.box_slices()] = True
        assert covered.all()
        both = np.zeros(g.shape, dtype=int)
        for sub in (d.left, d.right):
            interior_cols = np.zeros(g.shape, dtype=int)
            interior_cols[sub.interior_slices()] = 1
            both += interior_cols
        assert (both == 2).any()  # shared interior column

    def test_rejects_odd_n(self):
        g = model.build_grid(2, 9)
        with pytest.raises(model.ModelError):
            model.build_decomposition(g, 1)

    def test_rejects_overlap_reaching_boundary(self):
        g = model.build_grid(2, 4)
        with pytest.raises(model.ModelError):
            model.build_decomposition(g, 2, model.EXTEND_BOTH)

    def test_artificial_boundary_is_interior(self):
        g = model.build_grid(2, 8)
        d = model.build_decomposition(g, 1)
        phys = model.GridFunction.zeros(g).boundary_mask()
        for sub in (d.left, d.right):
            mask = sub.artificial_boundary_mask()
            assert mask.any()
            assert not (mask & phys).any()
        left = d.left.artificial_boundary_mask()
        right = d.right.artificial_boundary_mask()
        assert not (left & right).any()

    def test_artificial_boundary_on_box_edge(self):
        g = model.build_grid(2, 8)
        d = model.build_decomposition(g, 1)
        for idx in d.left.artificial_boundary:
            assert idx[0] == d.left.hi[0]
        for idx in d.right.artificial_boundary:
            assert idx[0] == d.right.lo[0]

    def test_1d_artificial_boundary(self):
        g = model.build_grid(1, 8)
        d = model.build_decomposition(g, 1)
        assert d.left.artificial_boundary == ((5,),)
        assert d.right.artificial_boundary == ((3,),)


class TestSampleFunction:
    def test_zero(self):
        g = model.build_grid(2, 5)
        assert (model.sample_function(g, "zero").mesh == 0).all()

    def test_target_center_value(self):
        g = model.build_grid(2, 64)
        gf = model.sample_function(g, "sin-sin")
        assert gf.mesh[32, 32] == pytest.approx(1.0, abs=1e-15)

    def test_source_value(self):
        g = model.build_grid(2, 4)
        gf = model.sample_function(g, "sin-sin-source")
        expected = 2 * math.pi ** 2 * math.sin(math.pi / 4) ** 2
        assert gf.mesh[1, 1] == pytest.approx(expected, rel=1e-14)
        assert expected == pytest.approx(math.pi ** 2, rel=1e-14)

    def test_random_is_seeded(self):
        g = model.build_grid(2, 6)
        a = model.sample_function(g, "random", rng=np.random.default_rng(3))
        b = model.sample_function(g, "random", rng=np.random.default_rng(3))
        assert (a.mesh == b.mesh).all()
        assert a.mesh[0].sum() == 0.0

    def test_unknown_tag(self):
        with pytest.raises(model.ModelError):
            model.sample_function(model.build_grid(1, 4), "nope")


class TestProblemSpec:
    def test_alpha_elliptic_forces_shift(self):
        spec = model.standard_spec(model.ALPHA_ELLIPTIC, n=8, alpha=1e-6)
        assert spec.shift_c == pytest.approx(2e3, rel=1e-15)

    def test_rejects_nonpositive_alpha(self):
        with pytest.raises(model.ModelError):
            model.standard_spec(model.OCP, n=8, alpha=0.0)

    def test_rejects_mismatched_fields(self):
        g = model.build_grid(2, 8)
        other = model.build_grid(2, 16)
        deco = model.build_decomposition(g, 1)
        with pytest.raises(model.ModelError):
            model.ProblemSpec(g, model.OCP, deco, alpha=1.0,
                              f=model.GridFunction.zeros(other))

    def test_initial_fields_policies(self):
        spec = model.standard_spec(model.OCP, n=8, alpha=1.0, init=model.INIT_ZERO)
        y0, p0 = model.initial_fields(spec)
        assert (y0.mesh == 0).all() and (p0.mesh == 0).all()
        spec = model.standard_spec(model.OCP, n=8, alpha=1.0, init=model.INIT_ONES)
        y0, p0 = model.initial_fields(spec)
        assert y0.interior.min() == 1.0 and p0.interior.max() == 1.0
        spec = model.standard_spec(model.ELLIPTIC, n=8, init=model.INIT_RANDOM, seed=5)
        w0, none = model.initial_fields(spec)
        assert none is None
        w0b, _ = model.initial_fields(spec)
        assert (w0.mesh == w0b.mesh).all()
