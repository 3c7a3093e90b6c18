from __future__ import annotations

import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sweepout_forge.filling import (
    OCTAHEDRON_FACES,
    ChainWeighting,
    FillingError,
    RTransformError,
    annulus_complex,
    annulus_core,
    circle_complex,
    circle_times_sphere,
    fh_bar,
    fh_profile,
    min_filling,
    octahedron_complex,
    octahedron_equator,
    r_transform,
    shortest_path_chain,
    waist_bounds,
)
from sweepout_forge.homology import ChainComplex, ChainVector, HomologyError
from sweepout_forge.lattice import AxisGrid, box_dim, grid_complex, single_cube

from oracles import brute_force_min_filling
from r_suite import nested_models, vertex_map_to_C3

OCT = octahedron_complex()


def test_equator_needs_four_triangles():
    r = min_filling(octahedron_equator(), OCT)
    assert r.weight == 4 and r.exact and r.solution_dim == 1
    assert OCT.boundary(r.chain).to_z2() == octahedron_equator().to_z2()


def test_zero_and_non_bounding():
    assert min_filling(ChainVector.zero(1), OCT).weight == 0
    core = min_filling(annulus_core(), annulus_complex())
    assert math.isinf(core.weight) and core.chain is None and not core.finite
    assert math.isinf(min_filling(ChainVector.from_cells(1, circle_complex(5).cells[1]), circle_complex(5)).weight)


def test_non_cycle_rejected():
    with pytest.raises(HomologyError):
        min_filling(ChainVector.from_cells(1, [(0, 2)]), OCT)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.sampled_from(OCTAHEDRON_FACES)))
def test_min_filling_matches_brute_force(faces):
    b = OCT.boundary(ChainVector.from_cells(2, sorted(faces))).to_z2()
    r = min_filling(b, OCT)
    assert r.weight == brute_force_min_filling(OCT, b)
    # a set of faces and its complement have the same boundary on a closed surface
    assert r.weight == min(len(faces), 8 - len(faces))


@settings(max_examples=30, deadline=None)
@given(st.dictionaries(st.sampled_from(OCTAHEDRON_FACES), st.integers(1, 5), min_size=1))
def test_weighted_filling_picks_the_lighter_side(w):
    weights = ChainWeighting({2: {f: F(v) for f, v in w.items()}})
    r = min_filling(octahedron_equator(), OCT, weights)
    upper = [f for f in OCTAHEDRON_FACES if f[2] == 4]
    lower = [f for f in OCTAHEDRON_FACES if f[2] == 5]
    assert r.weight == min(sum(weights.of(2, f) for f in upper), sum(weights.of(2, f) for f in lower))


def test_greedy_mode_is_flagged_inexact():
    r = min_filling(octahedron_equator(), OCT, exact_limit=0)
    assert not r.exact and r.weight >= 4


def test_fh_table_octahedron():
    t = fh_profile(OCT, 1, range(7))
    assert t.exact and t.is_nondecreasing()
    assert [r.value for r in t.rows] == [0, 0, 0, 1, 4, 4, 4]
    assert fh_bar(1, 1, t) == 4
    with pytest.raises(FillingError):
        fh_bar(2, 1, t)


@settings(max_examples=20, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=8, max_denominator=4), min_size=2, max_size=8))
def test_fh_is_monotone(grid):
    t = fh_profile(OCT, 1, grid)
    assert t.is_nondecreasing()


def test_sampled_profile_reports_lower_bounds():
    cx, w = circle_times_sphere(3, 3, F(1, 10))
    t = fh_profile(cx, 1, [1, 2, F(29, 10), 3, 4], w, mode="sampled", samples=50)
    assert t.mode == "sampled" and not t.exact
    assert any("lower bounds" in n for n in t.notes)
    values = {r.v: r.value for r in t.rows}
    assert math.isinf(values[3]) and not math.isinf(values[F(29, 10)])


def test_weights_must_be_positive():
    with pytest.raises(FillingError):
        ChainWeighting({1: {(0, 2): 0}})


def test_shortest_path():
    path = shortest_path_chain(OCT, ChainWeighting(), (0,), (1,))
    assert path is not None and len(path.support) == 2
    with pytest.raises(FillingError):
        shortest_path_chain(OCT, ChainWeighting(), 0, 1)


def test_r_transform_laws():
    C3, tables, models = nested_models()
    full = models[-1][1]
    res = r_transform(full, C3, vertex_map_to_C3(full, C3), tables=tables)
    assert res.within_bounds
    assert all(res.boundary_commutes(c, C3) for c in res.images)
    again = r_transform(full, C3, vertex_map_to_C3(full, C3), tables=tables, given=res.images)
    assert again.serialize() == res.serialize()


def test_r_transform_fails_without_fillings():
    hollow = ChainComplex.from_glued(grid_complex(3, AxisGrid.coarse(), lambda b: box_dim(b) < 3))
    cube = ChainComplex.from_glued(single_cube(3))
    with pytest.raises(RTransformError) as err:
        r_transform(cube, hollow, {v: v for v in hollow.cells[0]})
    assert err.value.stage == 3


def test_waist_bounds_constants():
    tb = waist_bounds(2, 1, F(1, 2))
    assert (tb.k, tb.prefactor, tb.waist_bound, tb.improved_bound) == (12, F(1, 12), F(1, 12), F(1, 3))
    assert tb.face_count_ok
    partial = waist_bounds(3, 2, F(1, 2))
    assert partial.partial and partial.waist_bound is None
    t = fh_profile(OCT, 1, range(7))
    full = waist_bounds(3, 2, F(1, 2), {1: t})
    assert full.k == 24 and full.prefactor == F(1, 24) and not full.partial
    with pytest.raises(FillingError):
        waist_bounds(2, 3, 1)
