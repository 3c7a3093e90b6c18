"""The three-legged starfish sphere, its tripod sweepout and the hexapod fix.

The solid starfish is a union of lattice cubes of side h: a center block
[0,w]^3 with legs along +x, -x and +y of length L, where w = 2r is the tube
width. Its boundary surface M is a 2-sphere whose lattice edges carry the
intrinsic shortest-path metric. Fibers are multisets of surface edges.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .fillrad import FiniteMetricSpace, SweepSummary, graph_space
from .lattice import AxisGrid, Chart, GluedComplex, Identification, rational
from .sweepout import FillingInput, SweepoutError, make_filling

IPoint = tuple[int, int, int]
Edge = tuple[int, int]


class StarfishError(SweepoutError):
    pass


@dataclass
class SurfaceFiber:
    label: str
    edges: list[Edge]
    length: Fraction
    point: int | None = None

    def degrees(self) -> Counter:
        deg: Counter = Counter()
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    @property
    def is_cycle(self) -> bool:
        return all(d % 2 == 0 for d in self.degrees().values())

    @property
    def is_simple_loop(self) -> bool:
        deg = self.degrees()
        if not deg or any(d != 2 for d in deg.values()) or len(set(self.edges)) != len(self.edges):
            return False
        adj: dict[int, list[int]] = {}
        for a, b in self.edges:
            adj.setdefault(a, []).append(b)
            adj.setdefault(b, []).append(a)
        start = next(iter(adj))
        seen, stack = {start}, [start]
        while stack:
            for y in adj[stack.pop()]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(adj)


@dataclass
class Leg:
    name: str
    axis: int
    direction: int
    levels: list[int]  # lattice coordinates along the axis, base to tip
    cross: tuple[int, int]


@dataclass
class TripodMap:
    center: SurfaceFiber
    arcs: list[list[int]]  # vertex sequences of the theta arcs A1, A2, A3
    rays: dict[str, list[SurfaceFiber]]
    pair_of_leg: dict[str, tuple[int, int]]

    def fibers(self) -> list[SurfaceFiber]:
        return [self.center] + [f for ray in self.rays.values() for f in ray]

    @property
    def max_length(self) -> Fraction:
        return max(f.length for f in self.fibers())

    @property
    def max_ray_length(self) -> Fraction:
        return max(f.length for ray in self.rays.values() for f in ray)


@dataclass
class Starfish:
    L: Fraction
    r: Fraction
    m: int
    h: Fraction
    steps: int  # lattice steps across the tube width
    leg_steps: int
    vertices: list[IPoint]
    edges: list[Edge]
    metric: FiniteMetricSpace
    filling: FillingInput
    tripod: TripodMap
    index: dict[IPoint, int] = field(repr=False, default_factory=dict)

    @property
    def width(self) -> Fraction:
        return 2 * self.r

    def sweep_summary(self) -> SweepSummary:
        uw = max(_fiber_diameter(self, f) for f in self.tripod.fibers())
        return SweepSummary(self.tripod.max_length, uw, "starfish tripod sweepout")


def _solid_cubes(S: int, Ls: int) -> set[IPoint]:
    cubes: set[IPoint] = set()
    block = range(S)
    for x in block:
        for y in block:
            for z in block:
                cubes.add((x, y, z))
    for t in range(Ls):
        for u in block:
            for v in block:
                cubes.add((S + t, u, v))
                cubes.add((-1 - t, u, v))
                cubes.add((u, S + t, v))
    return cubes


def _boundary_squares(cubes: set[IPoint]) -> list[tuple[IPoint, ...]]:
    out = []
    for c in cubes:
        for axis in range(3):
            for side in (0, 1):
                nb = list(c)
                nb[axis] += 1 if side else -1
                if tuple(nb) in cubes:
                    continue
                others = [a for a in range(3) if a != axis]
                corners = []
                for du, dv in ((0, 0), (1, 0), (1, 1), (0, 1)):
                    p = list(c)
                    p[axis] += side
                    p[others[0]] += du
                    p[others[1]] += dv
                    corners.append(tuple(p))
                out.append(tuple(corners))
    return out


def _segment(a: IPoint, b: IPoint) -> list[IPoint]:
    diff = [i for i in range(3) if a[i] != b[i]]
    if len(diff) != 1:
        raise StarfishError(f"path segment {a} -> {b} is not axis parallel")
    i = diff[0]
    step = 1 if b[i] > a[i] else -1
    pts = []
    for t in range(a[i], b[i] + step, step):
        p = list(a)
        p[i] = t
        pts.append(tuple(p))
    return pts


def _polyline(corners: Sequence[IPoint]) -> list[IPoint]:
    pts = [corners[0]]
    for a, b in zip(corners, corners[1:]):
        pts.extend(_segment(a, b)[1:])
    return pts


def _path_edges(sf_index: dict[IPoint, int], edge_set: set[Edge], pts: Sequence[IPoint]) -> list[Edge]:
    out = []
    for a, b in zip(pts, pts[1:]):
        e = tuple(sorted((sf_index[a], sf_index[b])))
        if e not in edge_set:
            raise StarfishError(f"segment {a}-{b} does not lie on the surface")
        out.append(e)  # type: ignore[arg-type]
    return out  # type: ignore[return-value]


def _ring(leg: Leg, level: int, lo: int, hi: int) -> list[IPoint]:
    c1, c2 = leg.cross

    def pt(u: int, v: int) -> IPoint:
        p = [0, 0, 0]
        p[leg.axis] = level
        p[c1] = u
        p[c2] = v
        return tuple(p)  # type: ignore[return-value]

    return _polyline([pt(lo, lo), pt(hi, lo), pt(hi, hi), pt(lo, hi), pt(lo, lo)])


def make_starfish(L: object, r: object, m: int) -> Starfish:
    """Cubulated starfish sphere with its filling and the tripod sweepout."""
    L, r = rational(L), rational(r)
    if L <= 0 or r <= 0:
        raise StarfishError("leg length and tube radius must be positive")
    if m < 8 or m % 8:
        raise StarfishError(
            f"resolution too small to cubulate: m={m}; the square tube cross-section needs m a multiple of 8, m >= 8"
        )
    S = m // 4
    h = 2 * r / S
    if (L / h).denominator != 1:
        raise StarfishError(f"leg length {L} is incompatible with lattice step {h}")
    Ls = int(L / h)
    cubes = _solid_cubes(S, Ls)
    squares = _boundary_squares(cubes)
    vertices = sorted({p for sq in squares for p in sq})
    index = {p: i for i, p in enumerate(vertices)}
    edge_set: set[Edge] = set()
    for sq in squares:
        for a, b in zip(sq, sq[1:] + sq[:1]):
            edge_set.add(tuple(sorted((index[a], index[b]))))  # type: ignore[arg-type]
    edges = sorted(edge_set)
    metric = graph_space(len(vertices), [(a, b, h) for a, b in edges], name=f"starfish(L={L},r={r},m={m})")
    filling = _filling(cubes, vertices, index, h, metric)
    legs = [
        Leg("+x", 0, 1, list(range(S, S + Ls + 1)), (1, 2)),
        Leg("-x", 0, -1, list(range(0, -Ls - 1, -1)), (1, 2)),
        Leg("+y", 1, 1, list(range(S, S + Ls + 1)), (0, 2)),
    ]
    half = S // 2
    u, v = (half, half, S), (half, half, 0)
    arcs_pts = [
        _polyline([u, (S, half, S), (S, S, S), (S, S, 0), (S, half, 0), v]),
        _polyline([u, (0, half, S), (0, S, S), (0, S, 0), (0, half, 0), v]),
        _polyline([u, (half, 0, S), (half, 0, 0), v]),
    ]
    arcs = [[index[p] for p in a] for a in arcs_pts]
    arc_edges = [_path_edges(index, edge_set, a) for a in arcs_pts]
    center = SurfaceFiber("center", [e for a in arc_edges for e in a], h * sum(len(a) for a in arc_edges))
    pair_of_leg = {"+x": (0, 2), "-x": (1, 2), "+y": (0, 1)}
    rays: dict[str, list[SurfaceFiber]] = {}
    for leg in legs:
        i, j = pair_of_leg[leg.name]
        first = arc_edges[i] + arc_edges[j]
        ray = [SurfaceFiber(f"{leg.name}:pair", first, h * len(first))]
        for level in leg.levels:
            ring = _path_edges(index, edge_set, _ring(leg, level, 0, S))
            ray.append(SurfaceFiber(f"{leg.name}:ring{level}", ring, h * len(ring)))
        tip = leg.levels[-1]
        for k in range(1, half):
            ring = _path_edges(index, edge_set, _ring(leg, tip, k, S - k))
            ray.append(SurfaceFiber(f"{leg.name}:cap{k}", ring, h * len(ring)))
        p = [half, half, half]
        p[leg.axis] = tip
        ray.append(SurfaceFiber(f"{leg.name}:tip", [], Fraction(0), index[tuple(p)]))  # type: ignore[index]
        rays[leg.name] = ray
    tripod = TripodMap(center, arcs, rays, pair_of_leg)
    return Starfish(L, r, m, h, S, Ls, vertices, edges, metric, filling, tripod, index)


def _filling(
    cubes: set[IPoint], vertices: list[IPoint], index: dict[IPoint, int], h: Fraction, metric: FiniteMetricSpace
) -> FillingInput:
    order = sorted(cubes)
    chart_of = {c: k for k, c in enumerate(order)}
    charts = [Chart.cube(3, origin=tuple(h * x for x in c), scale=h) for c in order]
    idents = []
    for c in order:
        for axis in range(3):
            nb = list(c)
            nb[axis] += 1
            if tuple(nb) in chart_of:
                signs = [1, 1, 1]
                signs[axis] = -1
                idents.append(Identification(chart_of[c], (axis, 1), chart_of[tuple(nb)], (axis, -1), (0, 1, 2), tuple(signs)))  # type: ignore[index]
    P = GluedComplex(tuple(charts), tuple(idents), Fraction(1, 2))
    images: dict[tuple[int, tuple[int, ...]], int] = {}
    for c in order:
        for corner in ((a, b, d) for a in (0, 1) for b in (0, 1) for d in (0, 1)):
            p = tuple(x + dx for x, dx in zip(c, corner))
            if p in index:
                img = index[p]
            else:
                # nearest surface vertex, lowest index on ties
                img = min(range(len(vertices)), key=lambda i: (sum((a - b) ** 2 for a, b in zip(vertices[i], p)), i))
            images[(chart_of[c], tuple(2 * x - 1 for x in corner))] = img
    return make_filling(P, metric, images, name="starfish")


def _fiber_diameter(sf: Starfish, f: SurfaceFiber) -> Fraction:
    pts = {x for e in f.edges for x in e}
    if f.point is not None:
        pts.add(f.point)
    return max((sf.metric.d(a, b) for a in pts for b in pts), default=Fraction(0))


def theta_graph_check(f: SurfaceFiber) -> dict[str, object]:
    deg = f.degrees()
    branch = sorted(v for v, d in deg.items() if d != 2)
    return {
        "branch_vertices": len(branch),
        "branch_degrees": sorted(deg[v] for v in branch),
        "arcs": sum(deg[v] for v in branch) // 2 if branch else 0,
        "is_theta": len(branch) == 2 and all(deg[v] == 3 for v in branch),
    }


# -- hexapod ---------------------------------------------------------------------------------------


@dataclass
class Hexapod:
    source: Starfish
    center: SurfaceFiber
    small_rays: dict[str, list[SurfaceFiber]]
    big_rays: dict[str, list[SurfaceFiber]]

    def fibers(self) -> list[SurfaceFiber]:
        out = [self.center]
        for rays in (self.small_rays, self.big_rays):
            for ray in rays.values():
                out.extend(ray)
        return out

    @property
    def max_length(self) -> Fraction:
        return max(f.length for f in self.fibers())

    @property
    def ratio(self) -> Fraction:
        return self.max_length / self.source.tripod.max_length

    def digons(self) -> list[list[Edge]]:
        return [ray[0].edges for ray in self.small_rays.values()]

    def symmetric_differences(self) -> dict[str, list[Fraction]]:
        h = self.source.h
        out = {}
        for rays in (self.small_rays, self.big_rays):
            for name, ray in rays.items():
                seq = [self.center] + ray
                diffs = []
                for a, b in zip(seq, seq[1:]):
                    ca, cb = Counter(a.edges), Counter(b.edges)
                    diffs.append(h * (sum((ca - cb).values()) + sum((cb - ca).values())))
                out[name] = diffs
        return out

    def continuity_proxy(self) -> dict[str, object]:
        diffs = self.symmetric_differences()
        worst = max(d for ds in diffs.values() for d in ds)
        bound = 2 * max(f.length for f in self.fibers())
        return {"max_symmetric_difference": worst, "bound": bound, "holds": worst <= bound}


def _edges_of(seq: Sequence[int]) -> list[Edge]:
    return [tuple(sorted(p)) for p in zip(seq, seq[1:])]  # type: ignore[misc]


def hexapodize(sf: object) -> Hexapod:
    """Double the theta arcs into digons and split the tripod into a hexapod."""
    if not isinstance(sf, Starfish):
        raise StarfishError("hexapodize needs a starfish built by make_starfish")
    tri = sf.tripod
    h = sf.h
    doubled = [_edges_of(a) * 2 for a in tri.arcs]
    center = SurfaceFiber("hex:center", [e for d in doubled for e in d], h * sum(len(d) for d in doubled))
    small: dict[str, list[SurfaceFiber]] = {}
    for k, arc in enumerate(tri.arcs):
        ray = [SurfaceFiber(f"A{k + 1}:digon", doubled[k], h * len(doubled[k]))]
        ell = len(arc) - 1
        for j in range(1, ell // 2 + 1):
            sub = arc[j : ell - j + 1]
            es = _edges_of(sub) * 2
            if es:
                ray.append(SurfaceFiber(f"A{k + 1}:shrink{j}", es, h * len(es)))
            else:
                ray.append(SurfaceFiber(f"A{k + 1}:point", [], Fraction(0), sub[0]))
        small[f"A{k + 1}"] = ray
    big = {name: list(ray) for name, ray in tri.rays.items()}
    return Hexapod(sf, center, small, big)
