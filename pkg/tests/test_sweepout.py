from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sweepout_forge.io import cube_filling_json, filling_from_json, prism_filling_json
from sweepout_forge.sweepout import (
    GenericityError,
    SubdivisionRequired,
    SweepoutError,
    boundary_pairing,
    build_bundle,
    check_generic,
    classify_boundary_point,
    collar_extend,
    hbar_fiber,
    homology_audit,
    loop_count_enumerated,
    loop_count_formula,
    simplex_quotient,
    urysohn_upper_bound,
    waist_certificate,
    waist_upper_bound,
)


@pytest.fixture(scope="module")
def c3():
    return build_bundle(filling_from_json(cube_filling_json(3)))


@pytest.fixture(scope="module")
def c4():
    return build_bundle(filling_from_json(cube_filling_json(4)))


def scaled_metric(data, factor):
    data = dict(data)
    D = data["metric"]["distances"]
    data["metric"] = dict(data["metric"], distances=[[F(v) * factor for v in row] for row in D])
    return data


def test_unit_metric_attains_waist_bound(c3, c4):
    for b in (c3, c4):
        cert = waist_certificate(b)
        assert cert["holds"] and cert["waist_upper"] == cert["bound"] == (b.n + 1) * 2 ** b.n
        assert cert["max_edges"] == (b.n + 1) * 2 ** b.n
    # the fiber image lies in X, so its diameter is at most diam X
    assert urysohn_upper_bound(c3) <= c3.input.metric.diameter


def test_bundle_summary_counts(c3):
    assert c3.n == 2 and c3.delta == 1
    assert len(c3.boundary_faces) == 6
    assert c3.N.dimension == 2


@settings(max_examples=10, deadline=None)
@given(st.fractions(min_value=F(1, 10), max_value=10, max_denominator=10))
def test_waist_bound_scales_linearly(factor):
    base = build_bundle(filling_from_json(cube_filling_json(3)))
    scaled = build_bundle(filling_from_json(scaled_metric(cube_filling_json(3), factor)))
    assert waist_upper_bound(scaled) == factor * waist_upper_bound(base)
    assert scaled.delta == factor * base.delta


@settings(max_examples=10, deadline=None)
@given(st.permutations(list(range(8))))
def test_relabeling_metric_points_changes_nothing(perm):
    data = cube_filling_json(3)
    D = data["metric"]["distances"]
    inv = {old: new for new, old in enumerate(perm)}
    data["metric"]["distances"] = [[D[perm[i]][perm[j]] for j in range(8)] for i in range(8)]
    for v in data["vertex_images"]:
        v["image"] = inv[v["image"]]
    b = build_bundle(filling_from_json(data))
    assert waist_upper_bound(b) == 12 and b.delta == 1


def test_homology_audit_on_glued_cubes():
    for d in (3, 4):
        b = build_bundle(filling_from_json(prism_filling_json(d, 2)))
        a = homology_audit(b)
        assert a.N_closed and a.homologous and a.witness_verified


def test_strict_mode_requires_subdivision():
    with pytest.raises(SubdivisionRequired):
        build_bundle(filling_from_json(cube_filling_json(3)), strict=True)


def test_hbar_counts_follow_enumeration(c3, c4):
    for b in (c3, c4):
        r = hbar_fiber(b)
        faces = len(b.boundary_faces)
        assert r.count == loop_count_enumerated(b.n, 1, faces)
        assert r.formula_count == loop_count_formula(b.n, 1, faces)
        assert r.mismatch
        assert r.disjoint and r.simple
        assert r.max_length <= 4 * b.delta


def test_hbar_on_glued_cubes():
    b = build_bundle(filling_from_json(prism_filling_json(3, 2)))
    r = hbar_fiber(b, (F(2, 7),))
    assert r.count == loop_count_enumerated(2, 2, 10) == 22
    assert r.disjoint and r.simple


def test_non_generic_samples_rejected():
    with pytest.raises(GenericityError):
        check_generic(3, (F(1, 2), F(1, 2)))
    with pytest.raises(GenericityError):
        check_generic(3, (F(0), F(1, 2)))
    with pytest.raises(GenericityError):
        check_generic(2, (F(1, 2), F(1, 3)))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_simplex_quotient_invariant_under_signed_permutations(data):
    n1 = data.draw(st.integers(3, 6))
    vals = data.draw(st.lists(st.fractions(min_value=-1, max_value=1, max_denominator=9), min_size=n1 - 2, max_size=n1 - 2))
    t = [F(0), F(0)] + vals
    perm = data.draw(st.permutations(t))
    signs = data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n1, max_size=n1))
    moved = [s * v for s, v in zip(signs, perm)]
    assert simplex_quotient(t) == simplex_quotient(moved)


def test_simplex_quotient_needs_two_zeros():
    with pytest.raises(SweepoutError):
        simplex_quotient((0, F(1, 2), 1))


@pytest.mark.parametrize("x0,case", [((1, 1), 3), ((F(1, 3), 1), 1), ((0, F(1, 2)), 2), ((0, 0), 2), ((F(1, 2), F(1, 2)), 3)])
def test_classify_boundary_points(x0, case):
    assert classify_boundary_point(3, x0) == case


def test_interior_point_is_not_a_boundary_point():
    with pytest.raises(SweepoutError):
        classify_boundary_point(3, (F(1, 3), F(2, 3)))


@pytest.mark.parametrize("x0", [(F(1, 3), 1), (0, F(1, 2)), (F(1, 2), F(1, 2)), (0, 0), (1, 1), (0, 1)])
def test_pairing_cancels_on_C4(c4, x0):
    cert = boundary_pairing(c4, x0)
    assert cert.zero
    assert all(g.group_sum_zero for g in cert.groups)


def test_pairing_on_glued_cubes():
    b = build_bundle(filling_from_json(prism_filling_json(3, 2)))
    for x0 in ((1,), (0,)):
        assert boundary_pairing(b, x0).zero


def test_collar_halves_each_edge(c3):
    cert = boundary_pairing(c3, (1,))
    fib = cert.limit_fiber(c3)
    ext = collar_extend(fib, F(1, 2))
    assert len(ext.edges) == 2 * len(fib.edges)
    assert sum(e.length for e in ext.edges) == sum(e.length for e in fib.edges) / 2
    assert sum(e.length for e in collar_extend(fib, 0).edges) == sum(e.length for e in fib.edges)
    assert sum(e.length for e in collar_extend(fib, 1).edges) == 0


def test_collar_needs_cancellation(c3):
    fib = c3.fiber(c3.T[0])
    with pytest.raises(SweepoutError):
        collar_extend(fib, F(1, 2))
