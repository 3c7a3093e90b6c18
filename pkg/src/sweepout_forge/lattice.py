"""Exact cubical cells, single-chart complexes and glued multi-chart complexes.

Coordinates are :class:`fractions.Fraction` throughout.  A cell is a box
whose intervals have endpoints on the chart grid; it need not be an
elementary grid cell, so ``[-1, 1]`` is a valid interval of the coarse cube.
Charts are glued along facets by signed coordinate permutations.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Sequence

Interval = tuple[Fraction, Fraction]
Box = tuple[Interval, ...]
Point = tuple[Fraction, ...]

DEFAULT_EPSILON = Fraction(1, 2)
ONE = Fraction(1)
ZERO = Fraction(0)


class LatticeError(ValueError):
    """Domain error raised by cube-lattice operations."""


class GluingError(LatticeError):
    """An identification is not a grid-preserving facet bijection."""

    def __init__(self, message: str, index: int, pair: tuple[int, int] | None = None):
        where = f"identification {index}"
        if pair is not None:
            where += f" (chart {pair[0]} -> chart {pair[1]})"
        super().__init__(f"{where}: {message}")
        self.index = index
        self.pair = pair


def rational(value: object) -> Fraction:
    """Parse an exact rational from an int, Fraction, or "p/q" / decimal string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise LatticeError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise LatticeError(f"not a rational: {value!r}") from exc
    if isinstance(value, float):
        # floats are accepted only when they are exact short decimals
        return Fraction(repr(value))
    raise LatticeError(f"not a rational: {value!r}")


def check_epsilon(eps: object) -> Fraction:
    e = rational(eps)
    if not 0 < e < 1:
        raise LatticeError(f"epsilon must lie in (0, 1), got {e}")
    return e


# -- grids --------------------------------------------------------------------


@dataclass(frozen=True)
class AxisGrid:
    """Breakpoints shared by every axis of a chart."""

    breakpoints: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        pts = tuple(rational(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise LatticeError(f"grid not strictly increasing: {pts}")
        for req in (-ONE, ZERO, ONE):
            if req not in pts:
                raise LatticeError(f"grid must contain {req}: {pts}")
        if pts[0] != -ONE or pts[-1] != ONE:
            raise LatticeError("grid must live in [-1, 1]")
        if tuple(-b for b in reversed(pts)) != pts:
            raise LatticeError(f"grid not symmetric: {pts}")

    @classmethod
    def standard(cls, eps: object = DEFAULT_EPSILON) -> "AxisGrid":
        e = check_epsilon(eps)
        return cls((-ONE, -e, ZERO, e, ONE))

    @classmethod
    def coarse(cls) -> "AxisGrid":
        return cls((-ONE, ZERO, ONE))

    def refine(self, values: Iterable[object]) -> "AxisGrid":
        pts = set(self.breakpoints)
        for v in values:
            r = abs(rational(v))
            if r > 1:
                raise LatticeError(f"breakpoint {r} outside [-1, 1]")
            pts.update((r, -r))
        return AxisGrid(tuple(sorted(pts)))

    def __contains__(self, x: object) -> bool:
        return x in self._set

    @property
    def _set(self) -> frozenset[Fraction]:
        return frozenset(self.breakpoints)

    def elementary(self) -> list[Interval]:
        """Grid points and elementary intervals, ordered left to right."""
        out: list[Interval] = []
        pts = self.breakpoints
        for i, b in enumerate(pts):
            out.append((b, b))
            if i + 1 < len(pts):
                out.append((b, pts[i + 1]))
        return out


# -- cells --------------------------------------------------------------------


def box_dim(box: Box) -> int:
    return sum(1 for lo, hi in box if lo != hi)


def free_axes(box: Box) -> tuple[int, ...]:
    return tuple(i for i, (lo, hi) in enumerate(box) if lo != hi)


def box_faces(box: Box, codim: int) -> list[Box]:
    axes = free_axes(box)
    if codim < 0 or codim > len(axes):
        raise LatticeError(f"codim {codim} outside [0, {len(axes)}]")
    out: list[Box] = []
    for chosen in itertools.combinations(axes, codim):
        for ends in itertools.product((0, 1), repeat=codim):
            face = list(box)
            for axis, end in zip(chosen, ends):
                v = box[axis][end]
                face[axis] = (v, v)
            out.append(tuple(face))
    return out


def box_closure(box: Box) -> set[Box]:
    out: set[Box] = set()
    for codim in range(box_dim(box) + 1):
        out.update(box_faces(box, codim))
    return out


def box_corners(box: Box) -> list[Point]:
    return [tuple(p) for p in itertools.product(*(sorted({lo, hi}) for lo, hi in box))]


def box_barycenter(box: Box) -> Point:
    return tuple((lo + hi) / 2 for lo, hi in box)


def box_contains(box: Box, point: Sequence[Fraction]) -> bool:
    return all(lo <= x <= hi for (lo, hi), x in zip(box, point))


def box_subset(inner: Box, outer: Box) -> bool:
    return all(o[0] <= i[0] and i[1] <= o[1] for i, o in zip(inner, outer))


def box_boundary(box: Box) -> list[tuple[Box, int]]:
    """Codimension-one faces with their incidence numbers.

    Setting free interval i to its lower (upper) endpoint has incidence
    -(-1)^m (+(-1)^m), m the number of free intervals before i.
    """
    out: list[tuple[Box, int]] = []
    m = 0
    for i, (lo, hi) in enumerate(box):
        if lo == hi:
            continue
        sign = -1 if m % 2 else 1
        low = list(box)
        low[i] = (lo, lo)
        high = list(box)
        high[i] = (hi, hi)
        out.append((tuple(low), -sign))
        out.append((tuple(high), sign))
        m += 1
    return out


def cube_box(dim: int) -> Box:
    return tuple((-ONE, ONE) for _ in range(dim))


@dataclass(frozen=True, order=True)
class CubicalCell:
    """A box in chart ``chart``; ordering is (chart, intervals)."""

    chart: int
    intervals: Box

    @property
    def dim(self) -> int:
        return box_dim(self.intervals)

    @property
    def ambient_dim(self) -> int:
        return len(self.intervals)

    def faces(self, codim: int = 1) -> list["CubicalCell"]:
        return [CubicalCell(self.chart, f) for f in box_faces(self.intervals, codim)]

    def corners(self) -> list[Point]:
        return box_corners(self.intervals)

    def barycenter(self) -> Point:
        return box_barycenter(self.intervals)

    def __repr__(self) -> str:
        parts = []
        for lo, hi in self.intervals:
            parts.append(str(lo) if lo == hi else f"[{lo},{hi}]")
        return f"c{self.chart}<" + " x ".join(parts) + ">"


def enumerate_faces(cell: CubicalCell, codim: int) -> list[CubicalCell]:
    """All faces of ``cell`` of the given codimension (2^codim * C(dim, codim))."""
    if codim > cell.dim:
        raise LatticeError(f"codim {codim} exceeds cell dimension {cell.dim}")
    return cell.faces(codim)


def face_count(d: int, j: int) -> int:
    """Number of j-faces of a d-cube."""
    return 2 ** (d - j) * comb(d, j)


# -- charts and identifications ------------------------------------------------


@dataclass(frozen=True)
class Chart:
    dim: int
    grid: AxisGrid
    cells: frozenset[Box]
    # axis-aligned placement used only for geometry export
    origin: Point | None = None
    scale: Fraction | None = None

    def __post_init__(self) -> None:
        for box in self.cells:
            if len(box) != self.dim:
                raise LatticeError(f"cell {box} has wrong ambient dimension")
            for lo, hi in box:
                if lo > hi or lo not in self.grid or hi not in self.grid:
                    raise LatticeError(f"cell {box} not on grid {self.grid.breakpoints}")

    @classmethod
    def from_top_cells(
        cls, dim: int, grid: AxisGrid, tops: Iterable[Box], **placement: object
    ) -> "Chart":
        cells: set[Box] = set()
        for box in tops:
            cells |= box_closure(box)
        return cls(dim, grid, frozenset(cells), **placement)  # type: ignore[arg-type]

    @classmethod
    def cube(cls, dim: int, grid: AxisGrid | None = None, **placement: object) -> "Chart":
        return cls.from_top_cells(dim, grid or AxisGrid.coarse(), [cube_box(dim)], **placement)

    def embed(self, point: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if self.origin is None:
            return tuple(point)
        s = self.scale if self.scale is not None else ONE
        return tuple(o + (x + 1) / 2 * s for o, x in zip(self.origin, point))

    def closed(self) -> bool:
        return all(f in self.cells for box in self.cells for f in box_faces(box, 1) if box_dim(box))


Facet = tuple[int, int]  # (axis, side) with side in {-1, +1}


def facet_index(facet: Facet) -> int:
    axis, side = facet
    return 2 * axis + (1 if side > 0 else 0)


def facet_from_index(index: int) -> Facet:
    return (index // 2, 1 if index % 2 else -1)


def facet_box(dim: int, facet: Facet) -> Box:
    axis, side = facet
    box = list(cube_box(dim))
    box[axis] = (Fraction(side), Fraction(side))
    return tuple(box)


@dataclass(frozen=True)
class Identification:
    """x on facet ``facet_a`` of chart a  <->  y on facet ``facet_b`` of chart b,
    with y[perm[i]] = signs[i] * x[i]."""

    a: int
    facet_a: Facet
    b: int
    facet_b: Facet
    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def forward_point(self, x: Sequence[Fraction]) -> Point:
        y: list[Fraction] = [ZERO] * len(x)
        for i, v in enumerate(x):
            y[self.perm[i]] = v if self.signs[i] > 0 else -v
        return tuple(y)

    def inverse(self) -> "Identification":
        n = len(self.perm)
        perm = [0] * n
        signs = [1] * n
        for i, j in enumerate(self.perm):
            perm[j] = i
            signs[j] = self.signs[i]
        return Identification(self.b, self.facet_b, self.a, self.facet_a, tuple(perm), tuple(signs))


def map_box(box: Box, perm: Sequence[int], signs: Sequence[int]) -> tuple[Box, int]:
    """Image of a box under a signed permutation and the orientation sign on it."""
    out: list[Interval] = [(ZERO, ZERO)] * len(box)
    for i, (lo, hi) in enumerate(box):
        out[perm[i]] = (lo, hi) if signs[i] > 0 else (-hi, -lo)
    axes = free_axes(box)
    targets = [perm[i] for i in axes]
    sign = permutation_sign(targets)
    for i in axes:
        sign *= 1 if signs[i] > 0 else -1
    return tuple(out), sign


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation that sorts ``seq`` (distinct entries)."""
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class UnionFind:
    def __init__(self) -> None:
        self.parent: dict[Hashable, Hashable] = {}

    def add(self, x: Hashable) -> None:
        self.parent.setdefault(x, x)

    def find(self, x: Hashable) -> Hashable:
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: Hashable, y: Hashable) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            # smaller key becomes the root, so classes do not depend on order
            if ry < rx:  # type: ignore[operator]
                rx, ry = ry, rx
            self.parent[ry] = rx

    def classes(self) -> list[frozenset]:
        groups: dict[Hashable, set] = {}
        for x in self.parent:
            groups.setdefault(self.find(x), set()).add(x)
        return sorted((frozenset(g) for g in groups.values()), key=lambda g: min(g))


# -- sparse matrices -----------------------------------------------------------

RINGS = ("Z", "Z2")


def check_ring(ring: str) -> str:
    if ring not in RINGS:
        raise LatticeError(f"unknown ring {ring!r}; expected one of {RINGS}")
    return ring


@dataclass
class SparseMatrix:
    """Column-sparse integer matrix; over Z2 entries are reduced mod 2."""

    rows: list[Hashable]
    cols: list[Hashable]
    columns: list[dict[int, int]]
    ring: str = "Z"

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.cols))

    def to_dense(self) -> list[list[int]]:
        out = [[0] * len(self.cols) for _ in self.rows]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        if len(self.cols) != len(other.rows):
            raise LatticeError("shape mismatch")
        out: list[dict[int, int]] = []
        for col in other.columns:
            acc: dict[int, int] = {}
            for k, v in col.items():
                for i, w in self.columns[k].items():
                    acc[i] = acc.get(i, 0) + v * w
            out.append(_normalize(acc, self.ring))
        return SparseMatrix(self.rows, other.cols, out, self.ring)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)


def _normalize(col: Mapping[int, int], ring: str) -> dict[int, int]:
    if ring == "Z2":
        return {i: 1 for i, v in col.items() if v % 2}
    return {i: v for i, v in col.items() if v}


# -- glued complexes -------------------------------------------------------------


@dataclass
class GluedComplex:
    """Charts glued along facets; cells are identified through their orbits.

    A cell's canonical representative is the least (chart, intervals) pair in
    its orbit under the identifications; ``canonical`` also returns the sign of
    the orientation change from the given representative to the canonical one.
    """

    charts: tuple[Chart, ...]
    identifications: tuple[Identification, ...] = ()
    epsilon: Fraction = DEFAULT_EPSILON
    _by_facet: dict[tuple[int, Facet], list[Identification]] = field(
        default_factory=dict, init=False, repr=False
    )
    _canon: dict[tuple[int, Box], tuple[CubicalCell, int]] = field(
        default_factory=dict, init=False, repr=False
    )
    _cells: dict[int, list[CubicalCell]] | None = field(default=None, init=False, repr=False)

    def __post_init__(self) -> None:
        self.charts = tuple(self.charts)
        self.identifications = tuple(self.identifications)
        for k, ident in enumerate(self.identifications):
            _validate_identification(self.charts, ident, k)
            self._by_facet.setdefault((ident.a, ident.facet_a), []).append(ident)
            inv = ident.inverse()
            self._by_facet.setdefault((inv.a, inv.facet_a), []).append(inv)

    # construction helpers
    def with_cells(
        self, cells: Sequence[Iterable[Box]], grid: AxisGrid | None = None, close: bool = True
    ) -> "GluedComplex":
        """Same gluing pattern with new per-chart cell sets (optionally a new grid)."""
        charts = []
        for chart, boxes in zip(self.charts, cells):
            g = grid or chart.grid
            if close:
                charts.append(
                    Chart.from_top_cells(chart.dim, g, boxes, origin=chart.origin, scale=chart.scale)
                )
            else:
                charts.append(Chart(chart.dim, g, frozenset(boxes), chart.origin, chart.scale))
        return GluedComplex(tuple(charts), self.identifications, self.epsilon)

    @property
    def dimension(self) -> int:
        return max((box_dim(b) for c in self.charts for b in c.cells), default=-1)

    # identity of cells
    def canonical(self, cell: CubicalCell) -> tuple[CubicalCell, int]:
        key = (cell.chart, cell.intervals)
        hit = self._canon.get(key)
        if hit is not None:
            return hit
        orbit = self._orbit(cell.chart, cell.intervals)
        best = min(orbit)
        canon = CubicalCell(best[0], best[1])
        for state, sign in orbit.items():
            # sign of state relative to the start; canonical relative to state
            self._canon[state] = (canon, sign * orbit[best])
        return self._canon[key]

    def _orbit(self, chart: int, box: Box) -> dict[tuple[int, Box], int]:
        start = (chart, box)
        orbit = {start: 1}
        if not self.identifications:
            return orbit
        queue = deque([start])
        while queue:
            c, b = queue.popleft()
            s = orbit[(c, b)]
            for axis, (lo, hi) in enumerate(b):
                if lo != hi or abs(lo) != 1:
                    continue
                for ident in self._by_facet.get((c, (axis, int(lo))), ()):
                    image, sign = map_box(b, ident.perm, ident.signs)
                    state = (ident.b, image)
                    if state not in orbit:
                        orbit[state] = s * sign
                        queue.append(state)
        return orbit

    def canonical_point(self, chart: int, point: Sequence[Fraction]) -> CubicalCell:
        return self.canonical(CubicalCell(chart, tuple((x, x) for x in point)))[0]

    def cells(self, k: int | None = None) -> list[CubicalCell]:
        if self._cells is None:
            seen: set[CubicalCell] = set()
            for ci, chart in enumerate(self.charts):
                for box in chart.cells:
                    seen.add(self.canonical(CubicalCell(ci, box))[0])
            by_dim: dict[int, list[CubicalCell]] = {}
            for cell in seen:
                by_dim.setdefault(cell.dim, []).append(cell)
            self._cells = {d: sorted(v) for d, v in by_dim.items()}
        if k is None:
            return [c for d in sorted(self._cells) for c in self._cells[d]]
        return list(self._cells.get(k, []))

    def count(self, k: int) -> int:
        return len(self.cells(k))

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * self.count(k) for k in range(self.dimension + 1))

    def merged_cells(self) -> int:
        """How many chart cells were merged away by the identifications."""
        return sum(len(c.cells) for c in self.charts) - len(self.cells())

    def boundary(self, cell: CubicalCell) -> list[tuple[CubicalCell, int]]:
        out: dict[CubicalCell, int] = {}
        for face, inc in box_boundary(cell.intervals):
            canon, sign = self.canonical(CubicalCell(cell.chart, face))
            out[canon] = out.get(canon, 0) + inc * sign
        return [(c, v) for c, v in out.items() if v]

    def boundary_matrix(self, k: int, ring: str = "Z") -> SparseMatrix:
        """Matrix of the boundary map from k-cells to (k-1)-cells."""
        check_ring(ring)
        cols = self.cells(k)
        rows = self.cells(k - 1) if k > 0 else []
        index = {c: i for i, c in enumerate(rows)}
        columns = []
        for cell in cols:
            col: dict[int, int] = {}
            if k > 0:
                for face, v in self.boundary(cell):
                    if face not in index:
                        raise LatticeError(f"face {face} of {cell} missing from complex")
                    col[index[face]] = col.get(index[face], 0) + v
            columns.append(_normalize(col, ring))
        return SparseMatrix(list(rows), list(cols), columns, ring)

    def skeleton(self, p: int) -> "GluedComplex":
        if p < 0 or p > max(self.dimension, 0):
            raise LatticeError(f"skeleton degree {p} outside [0, {self.dimension}]")
        return self.with_cells(
            [[b for b in c.cells if box_dim(b) <= p] for c in self.charts], close=False
        )

    def vertex_classes(self) -> list[frozenset]:
        """Partition of chart vertices into glued classes (union-find)."""
        uf = UnionFind()
        for ci, chart in enumerate(self.charts):
            for box in chart.cells:
                if box_dim(box) == 0:
                    uf.add((ci, tuple(lo for lo, _ in box)))
        for ident in self.identifications:
            axis, side = ident.facet_a
            for box in self.charts[ident.a].cells:
                if box_dim(box) == 0 and box[axis][0] == side:
                    x = tuple(lo for lo, _ in box)
                    uf.union((ident.a, x), (ident.b, ident.forward_point(x)))
        return uf.classes()

    def cell_vertex_classes(self, cell: CubicalCell) -> frozenset[CubicalCell]:
        return frozenset(self.canonical_point(cell.chart, p) for p in cell.corners())

    def point_to_world(self, chart: int, point: Sequence[Fraction]) -> tuple[Fraction, ...]:
        c = self.charts[chart]
        if c.origin is not None:
            return c.embed(point)
        if len(self.charts) == 1:
            return tuple(point)
        # charts without placement are laid out side by side
        return (point[0] + 3 * chart,) + tuple(point[1:])


def _validate_identification(charts: Sequence[Chart], ident: Identification, k: int) -> None:
    pair = (ident.a, ident.b)
    for c in (ident.a, ident.b):
        if not 0 <= c < len(charts):
            raise GluingError(f"chart {c} does not exist", k, pair)
    ca, cb = charts[ident.a], charts[ident.b]
    n = ca.dim
    if cb.dim != n:
        raise GluingError("charts of different dimension", k, pair)
    if sorted(ident.perm) != list(range(n)) or len(ident.signs) != n:
        raise GluingError(f"perm {ident.perm} is not a permutation of {n} axes", k, pair)
    if any(s not in (-1, 1) for s in ident.signs):
        raise GluingError(f"signs {ident.signs} must be +-1", k, pair)
    for facet in (ident.facet_a, ident.facet_b):
        if not (0 <= facet[0] < n and facet[1] in (-1, 1)):
            raise GluingError(f"bad facet {facet}", k, pair)
    axis, side = ident.facet_a
    if ident.perm[axis] != ident.facet_b[0] or ident.signs[axis] * side != ident.facet_b[1]:
        raise GluingError(
            f"facet {ident.facet_a} of chart {ident.a} is not carried onto facet "
            f"{ident.facet_b} of chart {ident.b}",
            k,
            pair,
        )
    if set(ca.grid.breakpoints) != set(cb.grid.breakpoints):
        raise GluingError("charts have incompatible grids", k, pair)
    if ident.a == ident.b and ident.facet_a == ident.facet_b:
        x = facet_box(n, ident.facet_a)
        if map_box(x, ident.perm, ident.signs)[0] != x:
            raise GluingError("facet glued to itself", k, pair)


def glue(
    charts: Sequence[Chart],
    identifications: Iterable[Identification | Mapping[str, object]],
    epsilon: object = DEFAULT_EPSILON,
) -> GluedComplex:
    """Glue charts; dict identifications use the complex.json layout."""
    idents: list[Identification] = []
    for k, raw in enumerate(identifications):
        if isinstance(raw, Identification):
            idents.append(raw)
            continue
        try:
            a, fa = raw["a"]  # type: ignore[index,misc]
            b, fb = raw["b"]  # type: ignore[index,misc]
            perm = tuple(int(v) for v in raw["perm"])  # type: ignore[union-attr]
            signs = tuple(int(v) for v in raw.get("signs", [1] * len(perm)))  # type: ignore[union-attr]
        except (KeyError, TypeError, ValueError) as exc:
            raise GluingError(f"malformed identification {raw!r}", k) from exc
        idents.append(
            Identification(int(a), facet_from_index(int(fa)), int(b), facet_from_index(int(fb)), perm, signs)
        )
    gc = GluedComplex(tuple(charts), tuple(idents), check_epsilon(epsilon))
    for k, ident in enumerate(gc.identifications):
        _check_bijective(gc, ident, k)
    return gc


def _check_bijective(gc: GluedComplex, ident: Identification, k: int) -> None:
    """Cells of the source facet must land on cells of the target chart."""
    axis, side = ident.facet_a
    src = gc.charts[ident.a].cells
    dst = gc.charts[ident.b].cells
    on_a = {b for b in src if b[axis] == (side, side)}
    baxis, bside = ident.facet_b
    on_b = {b for b in dst if b[baxis] == (bside, bside)}
    image = {map_box(b, ident.perm, ident.signs)[0] for b in on_a}
    if image != on_b:
        raise GluingError(
            f"facet cells of chart {ident.a} do not match facet cells of chart {ident.b}",
            k,
            (ident.a, ident.b),
        )


def single_cube(dim: int, grid: AxisGrid | None = None, epsilon: object = DEFAULT_EPSILON) -> GluedComplex:
    return GluedComplex((Chart.cube(dim, grid),), (), check_epsilon(epsilon))


def grid_complex(dim: int, grid: AxisGrid, predicate: Callable[[Box], bool] | None = None,
                 epsilon: object = DEFAULT_EPSILON) -> GluedComplex:
    """Single-chart complex of elementary grid cells satisfying ``predicate``.

    The predicate must be closed under taking faces for the result to be a
    complex; cells failing it are simply dropped.
    """
    elems = grid.elementary()
    cells = frozenset(
        box for box in itertools.product(elems, repeat=dim) if predicate is None or predicate(box)
    )
    return GluedComplex((Chart(dim, grid, cells),), (), check_epsilon(epsilon))


def elementary_subdivision(box: Box, grid: AxisGrid) -> list[Box]:
    """Elementary grid cells of the same dimension tiling ``box``."""
    per_axis = []
    for lo, hi in box:
        if lo == hi:
            per_axis.append([(lo, hi)])
        else:
            pts = [b for b in grid.breakpoints if lo <= b <= hi]
            per_axis.append(list(zip(pts, pts[1:])))
    return [tuple(p) for p in itertools.product(*per_axis)]


def iter_boxes(cells: Iterable[CubicalCell]) -> Iterator[Box]:
    for c in cells:
        yield c.intervals
