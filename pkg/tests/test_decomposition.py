from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sweepout_forge.decomposition import (
    STAR,
    DecompositionError,
    apply_signed_perm,
    big_theta,
    build_decomposition,
    cone_complex,
    expected_Y_top_cells,
    in_Y,
    in_Y_display,
    lam,
    lam_inverse,
    mod2_degree_rho_bar,
    mu,
    natural_sweepout,
    rho,
    sweepout_symmetry_check,
    theta,
    theta_fiber,
    x1_box,
    x1_box_display,
    _tube_boxes,
)
from sweepout_forge.lattice import LatticeError, box_dim, map_box

HALF = F(1, 2)
unit = st.fractions(min_value=-1, max_value=1, max_denominator=12)


def test_profile_maps_at_breakpoints():
    assert lam(HALF, HALF) == 0 and lam(1, HALF) == 1 and lam(F(3, 4), HALF) == HALF
    assert lam(F(-3, 4), HALF) == -HALF and lam(F(1, 5), HALF) == 0
    assert mu(F(1, 4), HALF) == HALF and mu(F(3, 4), HALF) == 1 and mu(-1, HALF) == -1
    with pytest.raises(DecompositionError):
        lam_inverse(0, HALF)
    with pytest.raises(LatticeError):
        lam(0, 1)


@given(unit.filter(lambda v: v != 0))
def test_lam_inverse_roundtrip(z):
    assert lam(lam_inverse(z, HALF), HALF) == z


def test_cone_level_worked_example():
    pt, level = big_theta((F(1, 4), F(1, 8)), 1)
    assert level == F(1, 4)
    assert big_theta((1, 1), 1) == STAR
    assert big_theta((0, 0, F(1, 3)), 1)[1] == 0


def test_theta_and_rho_domains():
    assert theta((0, HALF, 1), HALF, 1) == (0, 0, 1)
    with pytest.raises(DecompositionError):
        theta((0, 0, 1), HALF, 1)  # two coordinates strictly inside: not in X1 for p=1
    with pytest.raises(DecompositionError):
        rho((0, F(1, 4), 1), HALF, 1)


@pytest.mark.parametrize("n,p", [(n, p) for n in range(1, 4) for p in range(1, n + 1)])
def test_decomposition_invariants(n, p):
    D = build_decomposition(n, p)
    assert all(D.check_invariants().values())


@pytest.mark.parametrize("n,p", [(n, p) for n in range(1, 5) for p in range(1, n + 1)])
def test_Y_top_cell_count(n, p):
    assert build_decomposition(n, p).Y.count(n) == expected_Y_top_cells(n, p)


@pytest.mark.parametrize("n,p", [(n, p) for n in range(1, 5) for p in range(1, n + 1)])
def test_x1_display_form_matches_prose(n, p):
    for b in _tube_boxes(n + 1, HALF):
        assert x1_box(b, HALF, p) == x1_box_display(b, HALF, p)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(st.just(n), st.lists(unit, min_size=n + 1, max_size=n + 1))),
       st.integers(1, 4))
def test_Y_display_matches_definition(case, p):
    n, x = case
    if p > n:
        return
    assert in_Y(tuple(x), HALF, p) == in_Y_display(tuple(x), HALF, p)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_rho_bar_has_odd_degree(n):
    assert mod2_degree_rho_bar(n) == 1


@pytest.mark.parametrize("n,p", [(2, 1), (3, 1), (3, 2)])
def test_natural_sweepout_symmetry(n, p):
    assert sweepout_symmetry_check(n, p)
    kinds = {f.description for f in natural_sweepout(n, p)}
    assert f"{p}-skeleton of the {n}-cube" in kinds
    assert cone_complex(n, p).euler_characteristic() == 1


def _z_point(n, p, draw_vals, zeros):
    x = list(draw_vals)
    for i in zeros:
        x[i] = F(0)
    return tuple(x)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_fiber_equivariant_under_signed_permutations(data):
    n = data.draw(st.integers(2, 3))
    p = data.draw(st.integers(1, n - 1))
    dim = n + 1
    zeros = data.draw(st.sets(st.integers(0, n), min_size=p + 1, max_size=dim))
    vals = data.draw(st.lists(st.sampled_from([F(-1), F(-1, 2), F(1, 3), F(1)]), min_size=dim, max_size=dim))
    z = _z_point(n, p, vals, zeros)
    perm = tuple(data.draw(st.permutations(list(range(dim)))))
    signs = tuple(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=dim, max_size=dim)))
    f = theta_fiber(z, HALF, p)
    g = theta_fiber(apply_signed_perm(z, perm, signs), HALF, p)
    assert frozenset(map_box(b, perm, signs)[0] for b in f.cells) == g.cells
    assert f.k == len(zeros) and max(box_dim(b) for b in f.cells) == p


def test_theta_fiber_rejects_points_outside_Z():
    with pytest.raises(DecompositionError):
        theta_fiber((0, F(1, 3), 1), HALF, 1)
