from fractions import Fraction as F

import pytest

from conewitness.geometry import (
    CapExceeded,
    ConeV,
    Q,
    canonical_ray,
    cone_contains,
    cone_equal,
    dd_convert,
    dual_cone,
    extreme_rays,
    format_rational,
    full_space,
    hull_vertices,
    nullspace,
    parse_rational,
    rank,
    rref,
    span_basis,
    subspace_equal,
    zonotope_vertices,
)

from oracles import in_cone_by_definition, planar_hull, subset_sums, sym_rank


def rays(vs):
    return {canonical_ray([F(x) for x in v]) for v in vs}


class TestRationals:
    def test_parse_and_format_round_trip(self):
        for text in ["0", "-3", "7/9", "-12/5"]:
            assert format_rational(parse_rational(text)) == text

    def test_parse_normalizes(self):
        assert parse_rational("4/6") == F(2, 3)
        assert format_rational(parse_rational("4/2")) == "2"

    @pytest.mark.parametrize("bad", ["1/0", "", "a/b", "1.5", "1/2/3"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_rational(bad)

    def test_floats_refused(self):
        with pytest.raises(TypeError):
            Q(0.5)
        with pytest.raises(TypeError):
            Q(True)


class TestLinearAlgebra:
    def test_rref_rank_matches_sympy(self):
        m = [[1, 2, 3], [2, 4, 6], [1, 0, 1]]
        _, r, piv = rref(m)
        assert r == sym_rank(m) == 2
        assert piv == (0, 1)

    def test_nullspace_is_annihilated(self):
        m = [[F(1), F(2), F(3)], [F(0), F(1), F(1)]]
        ns = nullspace(m, 3)
        assert len(ns) == 1
        assert all(sum(a * b for a, b in zip(row, ns[0])) == 0 for row in m)

    def test_span_coords_round_trip(self):
        s = span_basis([(1, 1, 0), (0, 1, 1)])
        v = (F(2), F(5), F(3))
        assert s.contains(v)
        assert s.lift(s.coords(v)) == v
        assert not s.contains((1, 0, 0))

    def test_subspace_equal(self):
        a = span_basis([(1, 1, 0), (0, 1, 1)])
        b = span_basis([(1, 2, 1), (1, 0, -1)])
        assert subspace_equal(a, b)
        assert not subspace_equal(a, full_space(3))
        with pytest.raises(ValueError):
            subspace_equal(a, full_space(2))


class TestCones:
    def test_orthant_facets(self):
        h = dd_convert(ConeV.of([(1, 0), (0, 1)]))
        assert rays(h.facet_normals) == {(1, 0), (0, 1)}

    def test_whole_plane_has_no_facets(self):
        h = dd_convert(ConeV.of([(1, 0), (-1, 0), (0, 1), (0, -1)]))
        assert h.facet_normals == ()
        assert h.contains((F(-7), F(3)))

    def test_self_dual_square_cone(self):
        c = ConeV.of([(1, 1), (1, -1)])
        assert rays(dual_cone(c).generators) == rays(c.generators)

    def test_gbit_effect_cone_facets_are_diamond_states(self):
        h = F(1, 2)
        effects = ConeV.of([(h, h, h), (h, -h, -h), (h, h, -h), (h, -h, h)])
        assert rays(dd_convert(effects).facet_normals) == rays([(1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1)])

    def test_dual_relative_to_a_subspace(self):
        # a ray inside the plane z = 0: its dual in that plane is a half-plane
        c = ConeV.of([(1, 0, 0)])
        d = dual_cone(c, span_basis([(1, 0, 0), (0, 1, 0)]))
        assert cone_contains(d, (0, 1, 0)) and cone_contains(d, (0, -1, 0))
        assert not cone_contains(d, (-1, 0, 0))
        assert all(g[2] == 0 for g in d.generators)

    def test_dual_generators_satisfy_definition(self):
        gens = [(1, 2, 0), (1, 0, 2), (1, -1, -1), (2, 1, 1)]
        d = dual_cone(ConeV.of(gens))
        for g in d.generators:
            assert in_cone_by_definition(gens, g)

    def test_cone_equal_examples(self):
        a = ConeV.of([(1, 0), (0, 1)])
        b = ConeV.of([(2, 0), (0, 3), (1, 1)])
        assert cone_equal(a, b)
        assert not cone_equal(a, ConeV.of([(1, 0), (1, 1)]))

    def test_membership_methods_agree(self):
        c = ConeV.of([(1, 1, 0), (1, -1, 0), (1, 0, 1), (1, 0, -1)])
        for v in [(1, 0, 0), (1, 1, 1), (2, 1, -1), (0, 0, 1), (1, F(1, 2), F(1, 2))]:
            assert cone_contains(c, v, "facets") == cone_contains(c, v, "lp")

    def test_extreme_rays_drop_interior_generators(self):
        c = ConeV.of([(1, 0), (0, 1), (1, 1)])
        assert rays(extreme_rays(c)) == {(1, 0), (0, 1)}


class TestPolytopes:
    def test_hexagon_zonotope(self):
        gens = [(1, 0), (0, 1), (1, 1)]
        assert len(zonotope_vertices(gens)) == 6

    def test_zonotope_against_planar_hull(self):
        gens = [(F(1), F(2)), (F(-1), F(1)), (F(3), F(-1)), (F(0), F(1, 2))]
        assert set(zonotope_vertices(gens)) == set(planar_hull(subset_sums(gens)))

    def test_zonotope_cap_and_empty(self):
        with pytest.raises(CapExceeded):
            zonotope_vertices([(1, 0)] * 5, cap=4)
        with pytest.raises(ValueError):
            zonotope_vertices([])

    def test_hull_vertices(self):
        pts = [(0, 0), (2, 0), (0, 2), (1, 1), (F(1, 2), F(1, 2))]
        assert set(hull_vertices(pts)) == {(0, 0), (2, 0), (0, 2)}

    def test_rank_helper(self):
        assert rank([[1, 0], [0, 0]]) == 1
