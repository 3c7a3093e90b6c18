"""The one-cycle sweepout built from a cubical filling (p = 1).

Given a filling P of M (a cubical (n+1)-pseudomanifold with boundary, one
cube per chart) and images of its vertices in a finite metric model of M,
this module assembles

* N: the Y pieces of every cube plus the X2 pieces of every boundary face,
* T: the Z^{n-1} pieces of every cube (T') and Z^{n-2} x [0, 1/2] per
  boundary face (T''), glued along level 1/2,
* h: theta on Y pieces and Theta on X2 pieces,

and measures fibers of h, the loops of the map to the simplex Delta, and the
cancellation of limit loops over the boundary of Delta.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Mapping, Sequence

from .decomposition import _tube_boxes, lam_inverse, mu, x1_box, x2_box, z_boxes
from .fillrad import FiniteMetricSpace, Number, SweepSummary
from .homology import (
    ChainComplex,
    ChainVector,
    HomologyError,
    check_pseudomanifold,
    degree as cellular_degree,
    homologous,
)
from .lattice import (
    ONE,
    ZERO,
    AxisGrid,
    Box,
    Chart,
    CubicalCell,
    Facet,
    GluedComplex,
    LatticeError,
    Point,
    box_barycenter,
    box_closure,
    box_corners,
    box_dim,
    cube_box,
    facet_box,
    free_axes,
    permutation_sign,
    rational,
)

EPS = Fraction(1, 2)


class SweepoutError(ValueError):
    pass


class SubdivisionRequired(SweepoutError):
    pass


class GenericityError(SweepoutError):
    pass


# -- input -----------------------------------------------------------------------------------


@dataclass
class FillingInput:
    P: GluedComplex
    metric: FiniteMetricSpace
    vertex_images: dict[CubicalCell, int]
    nu: Fraction = ZERO
    name: str = ""

    @property
    def n(self) -> int:
        return self.P.charts[0].dim - 1

    def image(self, vertex: CubicalCell) -> int:
        canon = self.P.canonical(vertex)[0]
        try:
            return self.vertex_images[canon]
        except KeyError as exc:
            raise SweepoutError(f"vertex {canon} has no image") from exc


def make_filling(
    P: GluedComplex,
    metric: FiniteMetricSpace,
    images: Mapping[tuple[int, Point], int] | Mapping[CubicalCell, int],
    nu: object = 0,
    name: str = "",
) -> FillingInput:
    """Normalize vertex images given per chart point or per cell."""
    out: dict[CubicalCell, int] = {}
    for key, idx in images.items():
        if isinstance(key, CubicalCell):
            cell = key
        else:
            chart, pt = key
            cell = CubicalCell(chart, tuple((rational(v), rational(v)) for v in pt))
        canon = P.canonical(cell)[0]
        if canon in out and out[canon] != idx:
            raise SweepoutError(f"vertex {canon} has two different images")
        out[canon] = int(idx)
    return FillingInput(P, metric, out, rational(nu), name)


@dataclass
class FillingReport:
    n: int
    top_cells: int
    boundary_faces: list[tuple[int, Facet]]
    orientable: bool
    orientation: dict[int, int]
    edge_lengths: dict[CubicalCell, Number]
    delta: Number


def _boundary_faces(P: GluedComplex, boundary: set[CubicalCell]) -> list[tuple[int, Facet]]:
    out = []
    n1 = P.charts[0].dim
    for c in range(len(P.charts)):
        for axis in range(n1):
            for side in (-1, 1):
                f = CubicalCell(c, facet_box(n1, (axis, side)))
                if P.canonical(f)[0] in boundary:
                    out.append((c, (axis, side)))
    return out


def validate_filling(inp: FillingInput, strict: bool = False) -> FillingReport:
    P = inp.P
    n1 = P.charts[0].dim
    for c, chart in enumerate(P.charts):
        if chart.dim != n1:
            raise SweepoutError("charts of different dimension")
        if chart.cells != frozenset(box_closure(cube_box(n1))):
            raise SweepoutError(f"chart {c} must be the single cube [-1,1]^{n1}")
    rep = check_pseudomanifold(P)
    if not rep.is_pseudomanifold or rep.dimension != n1:
        raise SweepoutError(f"P is not an {n1}-pseudomanifold: {rep.notes}")
    if not rep.boundary:
        raise SweepoutError("P has empty boundary")
    bset = set(rep.boundary)
    dP = P.with_cells(
        [[b for b in ch.cells if any(P.canonical(CubicalCell(ci, f))[0] in bset for f in [b] if box_dim(b) == n1 - 1)]
         for ci, ch in enumerate(P.charts)]
    )
    brep = check_pseudomanifold(dP)
    if not brep.closed:
        raise SweepoutError(f"boundary of P is not a closed pseudomanifold: {brep.notes}")
    faces = _boundary_faces(P, bset)
    if strict:
        per_chart: dict[int, int] = {}
        for c, _ in faces:
            per_chart[c] = per_chart.get(c, 0) + 1
        bad = sorted(c for c, k in per_chart.items() if k > 1)
        if bad:
            raise SubdivisionRequired(
                f"top cells {bad} have more than one boundary face; subdivide P so every "
                "cube meets the boundary in at most one face"
            )
    edge_lengths: dict[CubicalCell, Number] = {}
    k = inp.metric.size
    for e in P.cells(1):
        u, v = (P.canonical_point(e.chart, p) for p in box_corners(e.intervals))
        iu, iv = inp.image(u), inp.image(v)
        if not (0 <= iu < k and 0 <= iv < k):
            raise SweepoutError(f"image index out of range on edge {e}")
        edge_lengths[e] = inp.metric.d(iu, iv)
    delta = max(edge_lengths.values(), default=Fraction(0))
    orientation = {}
    if rep.orientable:
        for c in range(len(P.charts)):
            top = P.canonical(CubicalCell(c, cube_box(n1)))
            orientation[c] = rep.orientation[top[0]] * top[1]
    return FillingReport(n1 - 1, len(P.charts), faces, rep.orientable, orientation, edge_lengths, delta)


# -- the bundle ------------------------------------------------------------------------------


@dataclass(frozen=True)
class TCell:
    piece: str  # "T'" or "T''"
    chart: int
    box: Box
    face: Facet | None = None
    level: str | None = None  # "bottom" or "open" for T''

    @property
    def dim(self) -> int:
        return box_dim(self.box) + (1 if self.level == "open" else 0)

    def __repr__(self) -> str:
        core = " x ".join(str(lo) if lo == hi else f"[{lo},{hi}]" for lo, hi in self.box)
        extra = "" if self.face is None else f" face{self.face} {self.level}"
        return f"{self.piece}<c{self.chart} {core}{extra}>"


@dataclass
class FiberEdge:
    chart: int
    start: Point
    end: Point
    coeff: int
    length: Number
    length_sup: Number

    @property
    def box(self) -> Box:
        return tuple((min(a, b), max(a, b)) for a, b in zip(self.start, self.end))


@dataclass
class FiberRecord:
    base: object
    edges: list[FiberEdge]
    vertices: int
    loops: list[list[int]] = field(default_factory=list)
    diameter_upper: Number = ZERO

    @property
    def length(self) -> Number:
        return sum((abs(e.coeff) * e.length for e in self.edges), Fraction(0))

    @property
    def length_sup(self) -> Number:
        return sum((abs(e.coeff) * e.length_sup for e in self.edges), Fraction(0))

    @property
    def max_component_length(self) -> Number:
        if not self.loops:
            return self.length
        return max(sum((self.edges[i].length for i in loop), Fraction(0)) for loop in self.loops)


@dataclass
class SweepoutBundle:
    input: FillingInput
    filling: FillingReport
    N: GluedComplex
    T_prime: GluedComplex
    T: list[TCell]
    epsilon: Fraction = EPS
    _fibers: dict[TCell, FiberRecord] = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.filling.n

    @property
    def P(self) -> GluedComplex:
        return self.input.P

    @property
    def edge_lengths(self) -> dict[CubicalCell, Number]:
        return self.filling.edge_lengths

    @property
    def delta(self) -> Number:
        return self.filling.delta

    @property
    def boundary_faces(self) -> list[tuple[int, Facet]]:
        return self.filling.boundary_faces

    def fiber(self, t: TCell) -> FiberRecord:
        if t not in self._fibers:
            self._fibers[t] = fiber(self, t)
        return self._fibers[t]

    def fibers(self) -> list[FiberRecord]:
        return [self.fiber(t) for t in self.T]

    def summary(self) -> SweepSummary:
        return SweepSummary(waist_upper_bound(self), urysohn_upper_bound(self), "cubical sweepout bundle")


def _n_boxes(n1: int, eps: Fraction, faces: Sequence[Facet]) -> list[Box]:
    boxes = [b for b in _tube_boxes(n1, eps) if box_dim(b) == n1 - 1 and x1_box(b, eps, 1) and x2_box(b, eps, 1)]
    for axis, side in faces:
        for b in _tube_boxes(n1, eps):
            if b[axis] == (side, side) and box_dim(b) == n1 - 1 and _facet_x2(b, axis, eps):
                boxes.append(b)
    return boxes


def _facet_x2(box: Box, axis: int, eps: Fraction) -> bool:
    return sum(1 for i, (lo, hi) in enumerate(box) if i != axis and -eps <= lo and hi <= eps) >= 2


def build_bundle(inp: FillingInput, strict: bool = False) -> SweepoutBundle:
    rep = validate_filling(inp, strict)
    P = inp.P
    n1 = rep.n + 1
    e = EPS
    grid = AxisGrid.standard(e)
    faces_of: dict[int, list[Facet]] = {}
    for c, f in rep.boundary_faces:
        faces_of.setdefault(c, []).append(f)
    n_charts = []
    t_charts = []
    zb = z_boxes(n1, 1)
    for c, chart in enumerate(P.charts):
        tops = _n_boxes(n1, e, faces_of.get(c, []))
        n_charts.append(Chart.from_top_cells(n1, grid, tops, origin=chart.origin, scale=chart.scale))
        t_charts.append(Chart(n1, grid, frozenset(zb), chart.origin, chart.scale))
    N = GluedComplex(tuple(n_charts), P.identifications, e)
    Tp = GluedComplex(tuple(t_charts), P.identifications, e)
    tcells = [TCell("T'", c.chart, c.intervals) for c in Tp.cells()]
    for c, (axis, side) in rep.boundary_faces:
        for b in z_boxes(n1 - 1, 1):
            box = b[:axis] + ((Fraction(side), Fraction(side)),) + b[axis:]
            for level in ("bottom", "open"):
                tcells.append(TCell("T''", c, box, (axis, side), level))
    return SweepoutBundle(inp, rep, N, Tp, tcells, e)


# -- fibers and lengths -------------------------------------------------------------------------


def edge_image_length(bundle: SweepoutBundle, chart: int, start: Point, end: Point) -> tuple[Number, Number]:
    """Length of the image of a straight edge under f-bar, and its sup over nearby levels.

    Coordinates are pushed through mu; the result interpolates the lengths of
    the parallel P-edges multilinearly and scales by the fraction of the edge
    covered.
    """
    e = bundle.epsilon
    P = bundle.P
    diff = [i for i, (a, b) in enumerate(zip(start, end)) if a != b]
    if len(diff) != 1:
        raise SweepoutError("fiber edges must be axis parallel")
    i = diff[0]
    lo, hi = sorted((start[i], end[i]))
    factor = (mu(hi, e) - mu(lo, e)) / 2
    others = [j for j in range(len(start)) if j != i]
    coords = {j: mu(start[j], e) for j in others}
    total: Number = Fraction(0)
    sup: Number = Fraction(0)
    for signs in itertools.product((-1, 1), repeat=len(others)):
        w = Fraction(1)
        for j, s in zip(others, signs):
            w *= (1 + s * coords[j]) / 2
        box = [(Fraction(s), Fraction(s)) for s in [0] * len(start)]
        box[i] = (-ONE, ONE)
        for j, s in zip(others, signs):
            box[j] = (Fraction(s), Fraction(s))
        canon = P.canonical(CubicalCell(chart, tuple(box)))[0]
        length = bundle.edge_lengths[canon]
        # the edge can only move within the face spanned by coordinates not at +-1
        if all(abs(coords[j]) != 1 or s == coords[j] for j, s in zip(others, signs)):
            if length > sup:
                sup = length
        if w:
            total += w * length
    return factor * total, sup


def _make_edges(bundle: SweepoutBundle, chart: int, boxes: Iterable[Box]) -> list[FiberEdge]:
    out = []
    for b in sorted(boxes):
        lo = tuple(x for x, _ in b)
        hi = tuple(y for _, y in b)
        length, sup = edge_image_length(bundle, chart, lo, hi)
        if lo == hi:
            continue
        out.append(FiberEdge(chart, lo, hi, 1, length, sup))
    return out


def _skeleton_edges(zero_axes: Sequence[int], half: Fraction, pinned: Mapping[int, Fraction], dim: int) -> list[Box]:
    boxes = []
    for i in zero_axes:
        rest = [b for b in zero_axes if b != i]
        for signs in itertools.product((-1, 1), repeat=len(rest)):
            box: list[tuple[Fraction, Fraction]] = [(ZERO, ZERO)] * dim
            for j, v in pinned.items():
                box[j] = (v, v)
            box[i] = (-half, half)
            for b, s in zip(rest, signs):
                box[b] = (s * half, s * half)
            boxes.append(tuple(box))
    return boxes


def fiber(bundle: SweepoutBundle, t: TCell, level: Fraction = Fraction(1, 4)) -> FiberRecord:
    """h^{-1}(t) over a generic point of the open cell t; T'' cells use ``level``."""
    e = bundle.epsilon
    n1 = bundle.n + 1
    z = box_barycenter(t.box)
    if t.piece == "T'":
        zero = [i for i, v in enumerate(z) if v == 0]
        pinned = {i: lam_inverse(v, e) for i, v in enumerate(z) if v != 0}
        edges = _make_edges(bundle, t.chart, _skeleton_edges(zero, e, pinned, n1))
        verts = 2 ** len(zero)
        # vertex images are P-vertices here, so distances bound the diameter
        pts = set()
        for fe in edges:
            for p in (fe.start, fe.end):
                pv = tuple(mu(x, e) for x in p)
                pts.add(bundle.input.image(bundle.P.canonical_point(t.chart, pv)))
        maxpair = max((bundle.input.metric.d(a, b) for a in pts for b in pts), default=Fraction(0))
        maxedge = max((fe.length_sup for fe in edges), default=Fraction(0))
        rec = FiberRecord(t, edges, verts)
        rec.diameter_upper = min(rec.length_sup / 2, maxpair + maxedge)
        return rec
    axis, side = t.face  # type: ignore[misc]
    if t.level == "bottom":
        return FiberRecord(t, [], 1)
    s = level
    if not 0 < s < e:
        raise SweepoutError(f"level {s} outside (0, {e})")
    zero = [i for i, v in enumerate(z) if v == 0 and i != axis]
    pinned = {i: lam_inverse(v, s) for i, v in enumerate(z) if v != 0 and i != axis}
    pinned[axis] = Fraction(side)
    edges = _make_edges(bundle, t.chart, _skeleton_edges(zero, s, pinned, n1))
    rec = FiberRecord(t, edges, 2 ** len(zero))
    rec.diameter_upper = rec.length_sup / 2
    return rec


def waist_upper_bound(bundle: SweepoutBundle) -> Number:
    """Max over T of the fiber length (sup over each open cell)."""
    return max((f.length_sup for f in bundle.fibers()), default=Fraction(0))


def urysohn_upper_bound(bundle: SweepoutBundle) -> Number:
    """Max fiber diameter bound, capped by diam X since every fiber image lies in X."""
    best = max((f.diameter_upper for f in bundle.fibers()), default=Fraction(0))
    return min(best, bundle.input.metric.diameter)


def waist_certificate(bundle: SweepoutBundle) -> dict[str, object]:
    n = bundle.n
    bound = (n + 1) * 2 ** n * bundle.delta
    w = waist_upper_bound(bundle)
    return {"waist_upper": w, "bound": bound, "holds": w <= bound, "max_edges": max(len(f.edges) for f in bundle.fibers())}


# -- homology audit ----------------------------------------------------------------------------


@dataclass
class HomologyAudit:
    N_closed: bool
    homologous: bool
    witness_cells: int
    witness_verified: bool
    witness_is_Q: bool
    degree_mod2: int | None = None
    notes: list[str] = field(default_factory=list)


def q_union_boundary(bundle: SweepoutBundle) -> GluedComplex:
    e = bundle.epsilon
    n1 = bundle.n + 1
    grid = AxisGrid.standard(e)
    faces_of: dict[int, list[Facet]] = {}
    for c, f in bundle.boundary_faces:
        faces_of.setdefault(c, []).append(f)
    charts = []
    tube = _tube_boxes(n1, e)
    for c, chart in enumerate(bundle.P.charts):
        cells = {b for b in tube if x1_box(b, e, 1)}
        for axis, side in faces_of.get(c, []):
            cells |= {b for b in tube if b[axis] == (side, side)}
        charts.append(Chart(n1, grid, frozenset(cells), chart.origin, chart.scale))
    return GluedComplex(tuple(charts), bundle.P.identifications, e)


def n_cycle(bundle: SweepoutBundle, complex_: GluedComplex, drop: int = 0) -> ChainVector:
    """[N] as a Z2 chain of ``complex_``; ``drop`` removes that many cells (for tests)."""
    n = bundle.n
    cells = []
    for c, chart in enumerate(bundle.N.charts):
        for b in sorted(chart.cells):
            if box_dim(b) == n:
                cells.append(complex_.canonical(CubicalCell(c, b))[0])
    cells = sorted(set(cells))[drop:]
    return ChainVector.from_cells(n, cells, "Z2")


def boundary_cycle(bundle: SweepoutBundle, complex_: GluedComplex) -> ChainVector:
    n = bundle.n
    cells = set()
    for c, (axis, side) in bundle.boundary_faces:
        for b in complex_.charts[c].cells:
            if box_dim(b) == n and b[axis] == (side, side):
                cells.add(complex_.canonical(CubicalCell(c, b))[0])
    return ChainVector.from_cells(n, cells, "Z2")


def homology_audit(
    bundle: SweepoutBundle,
    n_chain: ChainVector | None = None,
    target: GluedComplex | None = None,
    point_to_target: Mapping[int, CubicalCell] | None = None,
) -> HomologyAudit:
    """[N] - [dP] bounds in Q u dP over Z2, with an explicit witness."""
    QP = q_union_boundary(bundle)
    cx = ChainComplex.from_glued(QP)
    a = n_chain if n_chain is not None else n_cycle(bundle, QP)
    b = boundary_cycle(bundle, QP)
    if not cx.is_cycle(a):
        raise HomologyError("the N chain is not a cycle")
    res = homologous(a, b, cx)
    rep = check_pseudomanifold(bundle.N)
    audit = HomologyAudit(rep.closed, res.homologous, 0, False, False)
    if res.witness is not None:
        w = res.witness
        audit.witness_cells = len(w.coeffs)
        audit.witness_verified = cx.boundary(w) == (a - b)
        n1 = bundle.n + 1
        q = set()
        for c, chart in enumerate(QP.charts):
            for box in chart.cells:
                if box_dim(box) == n1:
                    q.add(QP.canonical(CubicalCell(c, box))[0])
        audit.witness_is_Q = set(w.coeffs) == q
    if target is not None and point_to_target is not None:
        e = bundle.epsilon
        vmap = {}
        for v in bundle.N.cells(0):
            pv = tuple(mu(x, e) for x, _ in v.intervals)
            idx = bundle.input.image(bundle.P.canonical_point(v.chart, pv))
            vmap[v] = point_to_target[idx]
        audit.degree_mod2 = cellular_degree(bundle.N, target, vmap, ring="Z2").degree
    return audit


# -- the simplex Delta and hbar fibers -------------------------------------------------------------


@dataclass(frozen=True)
class SimplexQuotient:
    coordinates: tuple[Fraction, ...]

    @property
    def generic(self) -> bool:
        c = self.coordinates
        return all(0 < a < b < 1 for a, b in zip(c, c[1:])) and (not c or 0 < c[0] < 1) and (not c or c[-1] < 1)


def simplex_quotient(t: Sequence[object]) -> SimplexQuotient:
    """j(t): sorted absolute values with the two forced zeros dropped."""
    pt = tuple(abs(rational(v)) for v in t)
    if sum(1 for v in pt if v == 0) < 2:
        raise SweepoutError(f"{pt} is not in T (needs two zero coordinates)")
    if any(v > 1 for v in pt):
        raise SweepoutError(f"{pt} is outside the cube")
    return SimplexQuotient(tuple(sorted(pt)[2:]))


def default_sample(n: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(k, n + 3) for k in range(1, n))


def check_generic(n: int, x: Sequence[object]) -> tuple[Fraction, ...]:
    xs = tuple(rational(v) for v in x)
    if len(xs) != n - 1:
        raise GenericityError(f"a point of Delta has {n - 1} coordinates, got {len(xs)}")
    ok = all(a < b for a, b in zip(xs, xs[1:])) and (not xs or (0 < xs[0] and xs[-1] < 1))
    if not ok:
        raise GenericityError(
            f"{xs} is not generic (need 0 < x1 < ... < x{n - 1} < 1); try {default_sample(n)}"
        )
    return xs


@dataclass(frozen=True)
class Arrangement:
    """A preimage of a Delta point: which axis (and sign) carries each coordinate."""

    piece: str
    chart: int
    zero_axes: tuple[int, int]
    slots: tuple[tuple[int, int], ...]  # Delta index -> (axis, sign)
    face: Facet | None = None
    level_slot: int | None = None  # T'': Delta index embedded on the face normal

    def point(self, x: Sequence[Fraction], n1: int) -> Point:
        p = [ZERO] * n1
        for k, (axis, sign) in enumerate(self.slots):
            p[axis] = sign * x[k]
        return tuple(p)


def arrangements(bundle: SweepoutBundle) -> list[Arrangement]:
    n = bundle.n
    n1 = n + 1
    out = []
    for c in range(len(bundle.P.charts)):
        for zero in itertools.combinations(range(n1), 2):
            rest = [i for i in range(n1) if i not in zero]
            for perm in itertools.permutations(rest):
                for signs in itertools.product((-1, 1), repeat=len(rest)):
                    out.append(Arrangement("T'", c, zero, tuple(zip(perm, signs))))
    for c, (axis, side) in bundle.boundary_faces:
        facet_axes = [i for i in range(n1) if i != axis]
        for zero in itertools.combinations(facet_axes, 2):
            rest = [i for i in facet_axes if i not in zero]
            for k_a in range(n - 1):
                for perm in itertools.permutations(rest):
                    for signs in itertools.product((-1, 1), repeat=len(rest)):
                        slots = list(zip(perm, signs))
                        slots.insert(k_a, (axis, side))
                        out.append(Arrangement("T''", c, zero, tuple(slots), (axis, side), k_a))
    return out


def loop_edges(bundle: SweepoutBundle, arr: Arrangement, x: Sequence[Fraction]) -> list[tuple[Box, int]]:
    """Oriented edges of h^{-1}(t) for the preimage ``arr`` of x (x may lie on the boundary of Delta).

    The orientation makes (lift of the Delta frame, loop tangent) positive in
    N, where N carries the boundary orientation of the X2 region.
    """
    e = bundle.epsilon
    n1 = bundle.n + 1
    o_c = bundle.filling.orientation.get(arr.chart, 1)
    out: list[tuple[Box, int]] = []
    if arr.piece == "T'":
        half = e
        pinned = {axis: sign * (e + x[k] * (1 - e)) for k, (axis, sign) in enumerate(arr.slots)}
        normal_sign_of = None
    else:
        axis_a, side = arr.face  # type: ignore[misc]
        s = x[arr.level_slot] / 2  # type: ignore[index]
        if s == 0:
            return []  # the fiber collapses to a point
        half = s
        pinned = {
            axis: sign * (s + x[k] * (1 - s))
            for k, (axis, sign) in enumerate(arr.slots)
            if k != arr.level_slot
        }
        pinned[axis_a] = Fraction(side)
        normal_sign_of = side
    b1, b2 = arr.zero_axes
    for i, b in ((b1, b2), (b2, b1)):
        for sb in (-1, 1):
            box: list[tuple[Fraction, Fraction]] = [(ZERO, ZERO)] * n1
            for j, v in pinned.items():
                box[j] = (v, v)
            box[i] = (-half, half)
            box[b] = (sb * half, sb * half)
            if arr.piece == "T'":
                frame = [b] + [axis for axis, _ in arr.slots] + [i]
                sign = o_c * sb
                for _, sg in arr.slots:
                    sign *= sg
            else:
                frame = [arr.face[0]]  # type: ignore[index]
                sign = o_c * normal_sign_of * sb  # type: ignore[operator]
                for k, (axis, sg) in enumerate(arr.slots):
                    if k == arr.level_slot:
                        frame.append(b)
                    else:
                        frame.append(axis)
                        sign *= sg
                frame.append(i)
            sign *= permutation_sign(frame)
            out.append((tuple(box), sign))
    return out


def canonical_chain(bundle: SweepoutBundle, chart: int, edges: Iterable[tuple[Box, int]]) -> dict[CubicalCell, int]:
    acc: dict[CubicalCell, int] = {}
    for box, coeff in edges:
        canon, sign = bundle.P.canonical(CubicalCell(chart, box))
        acc[canon] = acc.get(canon, 0) + coeff * sign
    return {k: v for k, v in acc.items() if v}


def _chain_boundary(bundle: SweepoutBundle, chain: Mapping[CubicalCell, int]) -> dict[CubicalCell, int]:
    acc: dict[CubicalCell, int] = {}
    for cell, coeff in chain.items():
        lo, hi = box_corners(cell.intervals)
        for p, s in ((hi, 1), (lo, -1)):
            v = bundle.P.canonical_point(cell.chart, p)
            acc[v] = acc.get(v, 0) + s * coeff
    return {k: v for k, v in acc.items() if v}


@dataclass
class HbarLoop:
    arrangement: Arrangement
    t: Point
    chain: dict[CubicalCell, int]
    length: Number

    def is_simple_cycle(self, bundle: SweepoutBundle) -> bool:
        if _chain_boundary(bundle, self.chain):
            return False
        deg: dict[CubicalCell, int] = {}
        for cell in self.chain:
            for p in box_corners(cell.intervals):
                v = bundle.P.canonical_point(cell.chart, p)
                deg[v] = deg.get(v, 0) + 1
        return all(d == 2 for d in deg.values()) and len(deg) == len(self.chain)


@dataclass
class HbarResult:
    x: tuple[Fraction, ...]
    loops: list[HbarLoop]
    formula_count: int
    per_piece: dict[str, int]
    disjoint: bool
    simple: bool

    @property
    def count(self) -> int:
        return len(self.loops)

    @property
    def mismatch(self) -> bool:
        return self.count != self.formula_count

    @property
    def max_length(self) -> Number:
        return max((lp.length for lp in self.loops), default=Fraction(0))


def loop_count_formula(n: int, top_cells: int, boundary_faces: int) -> int:
    return 2 ** n * factorial(n + 1) * top_cells + 2 ** (n - 1) * factorial(n) * boundary_faces


def loop_count_enumerated(n: int, top_cells: int, boundary_faces: int) -> int:
    per_cube = comb(n + 1, 2) * factorial(n - 1) * 2 ** (n - 1)
    per_face = comb(n, 2) * factorial(n - 1) * 2 ** (n - 2) if n >= 2 else 0
    return per_cube * top_cells + per_face * boundary_faces


def _loop_length(bundle: SweepoutBundle, chart: int, edges: Sequence[tuple[Box, int]]) -> Number:
    total: Number = Fraction(0)
    for box, _ in edges:
        lo = tuple(a for a, _ in box)
        hi = tuple(b for _, b in box)
        total += edge_image_length(bundle, chart, lo, hi)[0]
    return total


def hbar_fiber(bundle: SweepoutBundle, x: Sequence[object] | None = None) -> HbarResult:
    n = bundle.n
    xs = check_generic(n, x if x is not None else default_sample(n))
    n1 = n + 1
    loops = []
    per_piece = {"T'": 0, "T''": 0}
    for arr in arrangements(bundle):
        edges = loop_edges(bundle, arr, xs)
        chain = canonical_chain(bundle, arr.chart, edges)
        loops.append(HbarLoop(arr, arr.point(xs, n1), chain, _loop_length(bundle, arr.chart, edges)))
        per_piece[arr.piece] += 1
    seen_edges: set[CubicalCell] = set()
    seen_vertices: set[CubicalCell] = set()
    disjoint = True
    for lp in loops:
        verts = {bundle.P.canonical_point(c.chart, p) for c in lp.chain for p in box_corners(c.intervals)}
        if seen_edges & set(lp.chain) or seen_vertices & verts:
            disjoint = False
        seen_edges |= set(lp.chain)
        seen_vertices |= verts
    simple = all(lp.is_simple_cycle(bundle) for lp in loops)
    formula = loop_count_formula(n, len(bundle.P.charts), len(bundle.boundary_faces))
    return HbarResult(xs, loops, formula, per_piece, disjoint, simple)


# -- boundary pairing and collar ------------------------------------------------------------------


@dataclass
class PairingGroup:
    key: tuple
    members: list[int]
    pairs: list[tuple[int, int]]
    zero_members: list[int]
    group_sum_zero: bool


@dataclass
class PairingCertificate:
    x0: tuple[Fraction, ...]
    case: int
    limit_chains: list[dict[CubicalCell, int]]
    groups: list[PairingGroup]
    total: dict[CubicalCell, int]

    @property
    def zero(self) -> bool:
        return not self.total and all(g.group_sum_zero for g in self.groups)

    def limit_fiber(self, bundle: SweepoutBundle) -> FiberRecord:
        """All limit loops, unsummed, as one fiber record."""
        edges = []
        for chain in self.limit_chains:
            for cell, coeff in sorted(chain.items()):
                lo = tuple(a for a, _ in cell.intervals)
                hi = tuple(b for _, b in cell.intervals)
                length, sup = edge_image_length(bundle, cell.chart, lo, hi)
                edges.append(FiberEdge(cell.chart, lo, hi, coeff, length, sup))
        return FiberRecord(("limit", self.x0), edges, 0)


def classify_boundary_point(n: int, x0: Sequence[object]) -> int:
    xs = tuple(rational(v) for v in x0)
    if len(xs) != n - 1:
        raise SweepoutError(f"a point of Delta has {n - 1} coordinates")
    if not all(a <= b for a, b in zip(xs, xs[1:])) or (xs and (xs[0] < 0 or xs[-1] > 1)):
        raise SweepoutError(f"{xs} is not in Delta")
    if xs and xs[0] == 0:
        return 2
    distinct = all(a < b for a, b in zip(xs, xs[1:]))
    if xs and xs[-1] == 1 and distinct:
        return 1
    if not distinct:
        return 3
    raise SweepoutError(f"{xs} lies in the interior of Delta; boundary pairing needs a boundary point")


def _t0_key(bundle: SweepoutBundle, arr: Arrangement, x0: Sequence[Fraction]) -> tuple:
    """Limit fibers are grouped by half-width and canonical center in P.

    A Delta coordinate tending to 0 frees its axis, so that coordinate of the
    center is taken to be 0: the loops sharing it bound a small cube together.
    """
    e = bundle.epsilon
    n1 = bundle.n + 1
    center = [ZERO] * n1
    if arr.piece == "T'":
        half = e
        for k, (axis, sign) in enumerate(arr.slots):
            if x0[k]:
                center[axis] = sign * (e + x0[k] * (1 - e))
    else:
        half = x0[arr.level_slot] / 2  # type: ignore[index]
        if half == 0:
            return ("point", arr.chart, arr.face, arr.point(x0, n1))
        for k, (axis, sign) in enumerate(arr.slots):
            if k != arr.level_slot and x0[k]:
                center[axis] = sign * (half + x0[k] * (1 - half))
        axis_a, side = arr.face  # type: ignore[misc]
        center[axis_a] = Fraction(side)
    return ("fiber", half, bundle.P.canonical_point(arr.chart, tuple(center)))


def boundary_pairing(
    bundle: SweepoutBundle, x0: Sequence[object], approach: Sequence[object] | None = None
) -> PairingCertificate:
    """Limit loops over a boundary point of Delta and their cancellation.

    ``approach`` is the generic point the sample x = (1-eta) x0 + eta*approach
    moves along; it fixes which preimage arrangement each limit loop comes from.
    """
    if not bundle.filling.orientable:
        raise SweepoutError("boundary pairing over Z needs an orientable filling")
    n = bundle.n
    case = classify_boundary_point(n, x0)
    x0s = tuple(rational(v) for v in x0)
    gen = check_generic(n, approach if approach is not None else default_sample(n))
    eta = Fraction(1, 1000)
    sample = tuple((1 - eta) * a + eta * b for a, b in zip(x0s, gen))
    check_generic(n, sample)
    chains: list[dict[CubicalCell, int]] = []
    groups: dict[tuple, list[int]] = {}
    for arr in arrangements(bundle):
        chain = canonical_chain(bundle, arr.chart, loop_edges(bundle, arr, x0s))
        groups.setdefault(_t0_key(bundle, arr, x0s), []).append(len(chains))
        chains.append(chain)
    out_groups = []
    total: dict[CubicalCell, int] = {}
    for key, members in groups.items():
        gsum: dict[CubicalCell, int] = {}
        for m in members:
            for c, v in chains[m].items():
                gsum[c] = gsum.get(c, 0) + v
                total[c] = total.get(c, 0) + v
        gsum = {c: v for c, v in gsum.items() if v}
        zero_members = [m for m in members if not chains[m]]
        free = [m for m in members if chains[m]]
        pairs = []
        used: set[int] = set()
        for a in free:
            if a in used:
                continue
            neg = {c: -v for c, v in chains[a].items()}
            partner = next((b for b in free if b != a and b not in used and chains[b] == neg), None)
            if partner is not None:
                used |= {a, partner}
                pairs.append((a, partner))
        out_groups.append(PairingGroup(key, members, pairs, zero_members, not gsum))
    total = {c: v for c, v in total.items() if v}
    return PairingCertificate(x0s, case, chains, out_groups, total)


def collar_extend(fib: FiberRecord, s: object) -> FiberRecord:
    """Replace each edge [a,b] by [a, a_s] and [b_s, b], a_s = s a + (1-s) m."""
    s = rational(s)
    if not 0 <= s <= 1:
        raise SweepoutError("collar parameter must lie in [0, 1]")
    acc: dict[tuple, int] = {}
    for e in fib.edges:
        key = (e.chart, e.start, e.end)
        acc[key] = acc.get(key, 0) + e.coeff
    if any(acc.values()):
        raise SweepoutError("fiber does not cancel edgewise; collar extension needs a pairing certificate")
    edges = []
    for e in fib.edges:
        m = tuple((a + b) / 2 for a, b in zip(e.start, e.end))
        a_s = tuple(s * a + (1 - s) * c for a, c in zip(e.start, m))
        b_s = tuple(s * b + (1 - s) * c for b, c in zip(e.end, m))
        half = (1 - s) / 2
        edges.append(FiberEdge(e.chart, e.start, a_s, e.coeff, e.length * half, e.length_sup * half))
        edges.append(FiberEdge(e.chart, b_s, e.end, e.coeff, e.length * half, e.length_sup * half))
    return FiberRecord(("collar", fib.base, s), edges, fib.vertices)
