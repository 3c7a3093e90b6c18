from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sweepout_forge.fillrad import (
    BudgetError,
    FiniteMetricSpace,
    MetricError,
    circle_sweep,
    cycle_space,
    fillrad_estimate,
    fillrad_estimate_adaptive,
    graph_space,
    inequality_audit,
    reference_constants,
    rips_persistence,
)
from sweepout_forge.homology import ChainComplex, homology
from sweepout_forge.starfish import StarfishError, hexapodize, make_starfish, theta_graph_check


def flag_betti(space: FiniteMetricSpace, r, k: int) -> int:
    """Z2 Betti number of the flag complex at threshold r, built from scratch."""
    pts = range(space.size)
    simplices = [(i,) for i in pts]
    for size in range(2, k + 3):
        for s in itertools.combinations(pts, size):
            if all(space.d(a, b) <= r for a, b in itertools.combinations(s, 2)):
                simplices.append(s)
    return homology(ChainComplex.from_simplices(simplices), k, "Z2").betti


def alive(pairs, k, r) -> int:
    return sum(1 for p in pairs if p.degree == k and p.birth <= r and (p.death is None or p.death > r))


def random_plane_space(seed: int, k: int) -> FiniteMetricSpace:
    rng = random.Random(seed)
    pts = [(F(rng.randint(0, 8)), F(rng.randint(0, 8))) for _ in range(k)]
    # L1 distances stay rational
    return FiniteMetricSpace([[abs(a[0] - b[0]) + abs(a[1] - b[1]) for b in pts] for a in pts])


# -- persistence oracle ---------------------------------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(4, 7))
def test_rips_barcode_matches_flag_homology(seed, k):
    space = random_plane_space(seed, k)
    pairs = rips_persistence(space, 1, representatives=False)
    for r in sorted({v for row in space.distances for v in row}):
        for deg in (0, 1):
            assert alive(pairs, deg, r) == flag_betti(space, r, deg)


@pytest.mark.parametrize("m", [4, 5, 6, 7, 8, 9, 12, 15])
def test_cycle_graph_fillrad(m):
    # the loop dies once triangles with ceil(m/3)-step sides appear
    for L in (F(1), F(7, 2)):
        value = fillrad_estimate(cycle_space(m, L), 1).value
        assert value == math.ceil(m / 3) * L / (2 * m)
        if m % 3 == 0:
            assert value == L / 6


@settings(max_examples=20, deadline=None)
@given(st.fractions(min_value=F(1, 20), max_value=20, max_denominator=20), st.sampled_from([6, 9]))
def test_fillrad_scales_linearly(c, m):
    space = cycle_space(m)
    assert fillrad_estimate(space.scaled(c), 1).value == c * fillrad_estimate(space, 1).value


@settings(max_examples=20, deadline=None)
@given(st.permutations(list(range(9))))
def test_fillrad_invariant_under_relabeling(order):
    space = cycle_space(9)
    assert fillrad_estimate(space.relabeled(order), 1).value == F(1, 6)


def test_truncated_threshold_refuses_undecided_estimate():
    with pytest.raises(MetricError):
        fillrad_estimate(cycle_space(12), 1, max_threshold=F(1, 6))
    assert fillrad_estimate_adaptive(cycle_space(12), 1).value == F(1, 6)


def test_invalid_metrics_rejected():
    with pytest.raises(MetricError):
        FiniteMetricSpace([[0, 1], [2, 0]])
    with pytest.raises(MetricError):
        FiniteMetricSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]])


def test_budget_guard():
    big = cycle_space(60)
    with pytest.raises(BudgetError):
        rips_persistence(big, 3)


def test_graph_space_shortest_paths():
    g = graph_space(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)])
    assert g.d(0, 2) == 2 and g.diameter == 2


def test_reference_constants():
    c = reference_constants(2)
    assert c["c_n"] == F(1, 24)
    assert math.isclose(c["sphere_fillrad"], 0.5 * math.acos(-1 / 3))


def test_circle_audit_is_tight_for_katz():
    space = cycle_space(9)
    ar = inequality_audit(space, circle_sweep(space), fillrad_estimate(space, 1).value, 1e-9, 1)
    katz = ar.clause("katz")
    assert katz.passed and katz.rhs == F(1, 6)  # diam of the circle is L/2
    assert ar.clause("waist").passed and ar.clause("urysohn").passed


# -- starfish --------------------------------------------------------------------------------------------


@pytest.fixture(scope="module")
def starfish():
    return make_starfish(F(1), F(1, 2), 8)


def test_starfish_tripod_structure(starfish):
    tri = starfish.tripod
    theta = theta_graph_check(tri.center)
    assert theta["is_theta"] and sorted(theta["branch_degrees"]) == [3, 3]
    for leg, ray in tri.rays.items():
        assert all(f.is_simple_loop for f in ray if f.edges), leg
    assert tri.max_length == 16 * starfish.r


def test_starfish_metric_is_the_surface_graph(starfish):
    assert starfish.metric.size == len(starfish.vertices)
    assert all(starfish.metric.d(a, b) == starfish.h for a, b in starfish.edges)


def test_hexapod(starfish):
    hx = hexapodize(starfish)
    assert all(f.is_cycle for f in hx.fibers())
    assert hx.ratio == 2
    assert len(hx.digons()) == 3
    assert hx.continuity_proxy()["holds"]


def test_longer_legs_do_not_lengthen_fibers():
    a = make_starfish(F(1), F(1, 2), 8)
    b = make_starfish(F(2), F(1, 2), 8)
    assert a.tripod.max_length == b.tripod.max_length


@pytest.mark.parametrize("L,r,m", [(F(1), F(1, 2), 12), (F(1), F(1, 2), 4), (F(1, 3), F(1, 2), 8)])
def test_starfish_rejects_bad_resolution(L, r, m):
    with pytest.raises(StarfishError):
        make_starfish(L, r, m)


def test_hexapodize_needs_a_starfish():
    with pytest.raises(StarfishError):
        hexapodize(cycle_space(4))
