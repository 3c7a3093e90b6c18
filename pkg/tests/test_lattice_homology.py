from __future__ import annotations

import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sweepout_forge.homology import (
    ChainComplex,
    ChainVector,
    HomologyError,
    bits_of,
    check_pseudomanifold,
    homologous,
    homology,
    smith_normal_form,
    z2_rank,
)
from sweepout_forge.lattice import (
    AxisGrid,
    Chart,
    CubicalCell,
    GluingError,
    LatticeError,
    box_dim,
    cube_box,
    enumerate_faces,
    face_count,
    glue,
    grid_complex,
    rational,
    single_cube,
)

from oracles import betti_rational, sympy_invariant_factors, z2_rank_naive

RP2 = [(1, 2, 3), (1, 3, 4), (1, 4, 5), (1, 5, 6), (1, 6, 2), (2, 3, 5), (3, 4, 6), (4, 5, 2), (5, 6, 3), (6, 2, 4)]


def torus():
    return glue([Chart.cube(2)], [
        {"a": [0, 1], "b": [0, 0], "perm": [0, 1], "signs": [-1, 1]},
        {"a": [0, 3], "b": [0, 2], "perm": [0, 1], "signs": [1, -1]},
    ])


def klein():
    return glue([Chart.cube(2)], [
        {"a": [0, 1], "b": [0, 0], "perm": [0, 1], "signs": [-1, 1]},
        {"a": [0, 3], "b": [0, 2], "perm": [0, 1], "signs": [-1, -1]},
    ])


def hollow_cube(dim=3):
    return grid_complex(dim, AxisGrid.coarse(), lambda b: any(lo == hi and abs(lo) == 1 for lo, hi in b))


def profile(cx, ring):
    return [(h.betti, h.torsion) for h in (homology(cx, k, ring) for k in range(3))]


# -- lattice --------------------------------------------------------------------------------------


def test_rational_parsing():
    assert rational("3/4") == F(3, 4)
    assert rational(0.25) == F(1, 4)
    assert rational(2) == 2
    with pytest.raises(LatticeError):
        rational("x")
    with pytest.raises(LatticeError):
        rational(True)


def test_grid_must_be_symmetric():
    with pytest.raises(LatticeError):
        AxisGrid((F(-1), F(0), F(1, 2), F(1)))
    assert AxisGrid.coarse().refine(["1/3"]).breakpoints == (-1, F(-1, 3), 0, F(1, 3), 1)


@pytest.mark.parametrize("d", range(1, 6))
def test_face_counts_match_enumeration(d):
    cell = CubicalCell(0, cube_box(d))
    for j in range(d + 1):
        assert len(enumerate_faces(cell, d - j)) == face_count(d, j)


def test_standard_cube_cell_counts():
    assert [single_cube(2).count(k) for k in range(3)] == [4, 4, 1]
    # 4 elementary intervals and 5 points per axis
    gc = grid_complex(2, AxisGrid.standard())
    assert [gc.count(k) for k in range(3)] == [25, 40, 16]
    assert gc.euler_characteristic() == 1


def test_gluing_rejects_bad_facet_index():
    with pytest.raises(GluingError):
        glue([Chart.cube(2)], [{"a": [0], "b": [0, 0], "perm": [0, 1]}])


# -- homology oracles --------------------------------------------------------------------------------


def test_torus_and_klein_bottle():
    assert profile(torus(), "Z") == [(1, []), (2, []), (1, [])]
    assert profile(klein(), "Z") == [(1, []), (1, [2]), (0, [])]
    assert profile(klein(), "Z2") == [(1, []), (2, []), (1, [])]
    assert check_pseudomanifold(torus()).orientable
    k = check_pseudomanifold(klein())
    assert k.closed and not k.orientable


def test_rp2_simplicial():
    cx = ChainComplex.from_simplices(RP2)
    assert profile(cx, "Z") == [(1, []), (0, [2]), (0, [])]
    assert profile(cx, "Z2") == [(1, []), (1, []), (1, [])]


def test_hollow_cube_is_a_sphere():
    s = hollow_cube()
    assert [homology(s, k).betti for k in range(3)] == [1, 0, 1]
    pm = check_pseudomanifold(s, 2)
    assert pm.closed and pm.orientable


def test_solid_cube_is_contractible_with_standard_grid():
    gc = grid_complex(3, AxisGrid.standard())
    assert [homology(gc, k).betti for k in range(4)] == [1, 0, 0, 0]


def test_homologous_witness_bounds_difference():
    cx = ChainComplex.from_glued(grid_complex(2, AxisGrid.coarse()))
    sq = CubicalCell(0, ((F(-1), F(0)), (F(-1), F(0))))
    b = cx.boundary(ChainVector.from_cells(2, [sq], "Z"))
    res = homologous(b, ChainVector.zero(1, "Z"), cx)
    assert res.homologous
    assert cx.boundary(res.witness) == b


def test_non_cycle_rejected():
    cx = ChainComplex.from_simplices([(0, 1, 2)])
    with pytest.raises(HomologyError):
        homologous(ChainVector.from_cells(1, [(0, 1)]), ChainVector.zero(1), cx)


# -- properties --------------------------------------------------------------------------------------


boxes_2d = [b for b in grid_complex(2, AxisGrid.standard()).charts[0].cells if box_dim(b) == 2]


@settings(max_examples=40, deadline=None)
@given(st.sets(st.sampled_from(sorted(boxes_2d)), min_size=1))
def test_boundary_squared_is_zero(tops):
    gc = grid_complex(2, AxisGrid.standard(), lambda b: any(all(lo >= a and hi <= c for (lo, hi), (a, c) in zip(b, t)) for t in tops))
    cx = ChainComplex.from_glued(gc)
    for k in (2,):
        for cell in cx.cells.get(k, []):
            assert cx.boundary(cx.boundary(ChainVector.from_cells(k, [cell], "Z"))).is_zero()
    # rational Betti numbers agree with the sympy rank oracle
    for k in range(3):
        assert homology(cx, k, "Z").betti == betti_rational(cx, k)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 5), st.integers(0, 10 ** 6))
def test_snf_matches_sympy(r, c, seed):
    rng = random.Random(seed)
    A = [[rng.randint(-4, 4) for _ in range(c)] for _ in range(r)]
    snf = smith_normal_form(A)
    assert [abs(d) for d in snf.diagonal] == sympy_invariant_factors(A)
    # U A V = D
    UA = [[sum(snf.U[i][k] * A[k][j] for k in range(r)) for j in range(c)] for i in range(r)]
    UAV = [[sum(UA[i][k] * snf.V[k][j] for k in range(c)) for j in range(c)] for i in range(r)]
    assert UAV == snf.D


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 1), min_size=6, max_size=6), min_size=1, max_size=8))
def test_z2_rank_matches_naive(cols):
    assert z2_rank(bits_of({i: v for i, v in enumerate(c) if v}) for c in cols) == z2_rank_naive(cols)


@settings(max_examples=25, deadline=None)
@given(st.permutations(list(range(1, 7))))
def test_homology_invariant_under_relabeling(perm):
    relabel = {i + 1: v for i, v in enumerate(perm)}
    cx = ChainComplex.from_simplices([tuple(relabel[v] for v in s) for s in RP2])
    assert profile(cx, "Z") == [(1, []), (0, [2]), (0, [])]
