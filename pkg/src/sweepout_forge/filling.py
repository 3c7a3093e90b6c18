"""Homological filling functions, minimal Z2 fillings and the R-transformation.

Fillings are Z2 chains. ``min_filling`` solves d x = b and then searches
the coset x0 + Z_{k+1} for the lightest solution: exhaustively (numpy,
vectorized over blocks of 4096 kernel combinations) when the kernel has
dimension at most ``exact_limit``, greedily otherwise.
"""

from __future__ import annotations

import heapq
import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .homology import (
    ChainComplex,
    ChainVector,
    HomologyError,
    Z2Echelon,
    as_chain_complex,
    bit_indices,
    bits_of,
)
from .lattice import GluedComplex, face_count

Number = Fraction | float
INF = math.inf
EXACT_LIMIT = 24
EXHAUSTIVE_CYCLES = 10_000
_BLOCK_BITS = 12


class FillingError(ValueError):
    pass


class RTransformError(FillingError):
    def __init__(self, message: str, stage: int, cell: Hashable | None = None) -> None:
        super().__init__(message)
        self.stage = stage
        self.cell = cell


# -- weights ----------------------------------------------------------------------------------


@dataclass
class ChainWeighting:
    """Positive per-cell weights by degree; missing cells weigh ``default``."""

    weights: dict[int, dict[Hashable, Number]] = field(default_factory=dict)
    default: Number = Fraction(1)

    def __post_init__(self) -> None:
        for k, table in self.weights.items():
            for cell, w in table.items():
                if not w > 0:
                    raise FillingError(f"weight of {cell!r} in degree {k} must be positive, got {w}")
        if not self.default > 0:
            raise FillingError("default weight must be positive")

    def of(self, degree: int, cell: Hashable) -> Number:
        return self.weights.get(degree, {}).get(cell, self.default)

    def weight(self, chain: ChainVector) -> Number:
        total: Number = Fraction(0)
        for cell, c in chain.coeffs.items():
            total += abs(c) * self.of(chain.degree, cell)
        return total

    def vector(self, degree: int, cells: Sequence[Hashable]) -> list[Number]:
        return [self.of(degree, c) for c in cells]


def product_weighting(a: ChainComplex, wa: ChainWeighting, b: ChainComplex, wb: ChainWeighting) -> ChainWeighting:
    """Weights on a product complex: vertices weigh 1, cells multiply."""
    out: dict[int, dict[Hashable, Number]] = {}
    for p, cells_a in a.cells.items():
        for q, cells_b in b.cells.items():
            for x in cells_a:
                for y in cells_b:
                    w = (wa.of(p, x) if p else 1) * (wb.of(q, y) if q else 1)
                    out.setdefault(p + q, {})[(x, y)] = w
    return ChainWeighting(out)


# -- minimal fillings -------------------------------------------------------------------------


@dataclass
class MinFilling:
    chain: ChainVector | None
    weight: Number
    exact: bool
    solution_dim: int

    @property
    def finite(self) -> bool:
        return self.chain is not None


def _z2(chain: ChainVector) -> ChainVector:
    return chain if chain.ring == "Z2" else chain.to_z2()


def _solve_z2(cx: ChainComplex, b: ChainVector) -> tuple[int | None, list[int]]:
    """Particular solution and kernel basis of d_{k+1}, as bitsets over (k+1)-cells."""
    k = b.degree
    ech = Z2Echelon()
    for col in cx.columns(k + 1, "Z2"):
        ech.add(bits_of(col))
    ridx = cx.index(k)
    v = 0
    for c in b.coeffs:
        v |= 1 << ridx[c]
    residual, combo = ech.reduce(v)
    return (combo if residual == 0 else None), list(ech.kernel)


def _to_array(v: int, m: int) -> np.ndarray:
    return np.array([(v >> i) & 1 for i in range(m)], dtype=np.uint8)


def _exhaustive(x0: int, kernel: list[int], w: list[Number]) -> int:
    """Lightest x0 + span(kernel); ties go to the first combination in binary order."""
    m = len(w)
    d = len(kernel)
    wf = np.array([float(x) for x in w])
    base = _to_array(x0, m)
    K = np.array([_to_array(z, m) for z in kernel], dtype=np.uint8).reshape(d, m)
    lo = min(d, _BLOCK_BITS)
    codes = np.arange(1 << lo, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(lo)) & 1).astype(np.uint8)
    low = (bits.astype(np.int64) @ K[:lo].astype(np.int64)) % 2 if lo else np.zeros((1, m), dtype=np.int64)
    low = low.astype(np.uint8)
    best_code, best_exact = None, None
    scale = float(sum(wf)) or 1.0
    tol = 1e-9 * scale
    for hi in range(1 << (d - lo)):
        shift = base.copy()
        for j in range(d - lo):
            if (hi >> j) & 1:
                shift ^= K[lo + j]
        X = low ^ shift
        fw = X @ wf
        fmin = float(fw.min())
        if best_exact is not None and fmin > float(best_exact) + tol:
            continue
        for idx in np.nonzero(fw <= fmin + tol)[0]:
            exact = sum((w[i] for i in np.nonzero(X[idx])[0]), Fraction(0))
            if best_exact is None or exact < best_exact:
                best_exact = exact
                best_code = (hi << lo) | int(idx)
    assert best_code is not None
    x = x0
    for j in range(d):
        if (best_code >> j) & 1:
            x ^= kernel[j]
    return x


def _greedy(x0: int, kernel: list[int], w: list[Number]) -> int:
    def weight(v: int) -> Number:
        return sum((w[i] for i in bit_indices(v)), Fraction(0))

    x, cur = x0, weight(x0)
    improved = True
    while improved:
        improved = False
        for z in kernel:
            cand = weight(x ^ z)
            if cand < cur:
                x, cur, improved = x ^ z, cand, True
    return x


def min_filling(
    b: ChainVector,
    ambient: ChainComplex | GluedComplex,
    weights: ChainWeighting | None = None,
    exact_limit: int = EXACT_LIMIT,
) -> MinFilling:
    """Lightest Z2 chain x with d x = b, or an infinite result when b does not bound."""
    cx = as_chain_complex(ambient)
    b = _z2(b)
    weights = weights or ChainWeighting()
    ridx = cx.index(b.degree)
    for c in b.coeffs:
        if c not in ridx:
            raise HomologyError(f"{c!r} is not a {b.degree}-cell of the ambient complex")
    if not cx.is_cycle(b):
        raise HomologyError("the chain to fill is not a cycle")
    k1 = b.degree + 1
    cols = cx.cells.get(k1, [])
    x0, kernel = _solve_z2(cx, b)
    if x0 is None:
        return MinFilling(None, INF, True, len(kernel))
    w = weights.vector(k1, cols)
    exact = len(kernel) <= exact_limit
    if not kernel:
        x = x0
    elif exact:
        x = _exhaustive(x0, kernel, w)
    else:
        x = _greedy(x0, kernel, w)
    chain = ChainVector.from_cells(k1, [cols[i] for i in bit_indices(x)], "Z2")
    return MinFilling(chain, weights.weight(chain), exact, len(kernel))


# -- filling functions ------------------------------------------------------------------------


@dataclass
class FHRow:
    v: Number
    value: Number
    exact: bool


@dataclass
class FillingFunctionTable:
    degree: int
    mode: str  # "exhaustive" or "sampled"
    samples: list[tuple[Number, Number]]  # (cycle weight, min filling weight)
    rows: list[FHRow]
    notes: list[str] = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.mode == "exhaustive"

    def value(self, v: Number) -> Number:
        """sup of min fillings over sampled cycles of weight <= v (0 if none)."""
        if v == INF:
            return INF
        vals = [f for w, f in self.samples if w <= v]
        return max(vals, default=Fraction(0))

    def is_nondecreasing(self) -> bool:
        vals = [r.value for r in self.rows]
        return all(a <= b for a, b in zip(vals, vals[1:]))


def cycle_basis(cx: ChainComplex, k: int) -> list[int]:
    """Z2 basis of k-cycles as bitsets over k-cells."""
    ech = Z2Echelon()
    for col in cx.columns(k, "Z2"):
        ech.add(bits_of(col))
    if k == 0:
        return [1 << i for i in range(cx.count(0))]
    return list(ech.kernel)


def fh_profile(
    ambient: ChainComplex | GluedComplex,
    k: int,
    v_grid: Iterable[Number],
    weights: ChainWeighting | None = None,
    mode: str = "auto",
    samples: int = 200,
    seed: int = 0,
) -> FillingFunctionTable:
    """FH_k on a grid of volumes; exhaustive when the cycle space is small."""
    cx = as_chain_complex(ambient)
    weights = weights or ChainWeighting()
    cells = cx.cells.get(k, [])
    basis = cycle_basis(cx, k)
    n_cycles = 1 << len(basis)
    if mode == "auto":
        mode = "exhaustive" if n_cycles <= EXHAUSTIVE_CYCLES else "sampled"
    if mode not in ("exhaustive", "sampled"):
        raise FillingError(f"unknown mode {mode!r}")
    if mode == "exhaustive":
        if n_cycles > EXHAUSTIVE_CYCLES:
            raise FillingError(f"{n_cycles} cycles exceed the exhaustive limit {EXHAUSTIVE_CYCLES}")
        vecs = []
        for code in range(n_cycles):
            v = 0
            for j, z in enumerate(basis):
                if (code >> j) & 1:
                    v ^= z
            vecs.append(v)
    else:
        rng = random.Random(seed)
        found = {0, *basis}
        for _ in range(samples):
            r = rng.randint(2, min(4, max(2, len(basis))))
            v = 0
            for z in rng.sample(basis, min(r, len(basis))):
                v ^= z
            found.add(v)
        vecs = sorted(found)
    cache: dict[int, Number] = {}
    out: list[tuple[Number, Number]] = []
    for v in vecs:
        chain = ChainVector.from_cells(k, [cells[i] for i in bit_indices(v)], "Z2")
        if v not in cache:
            cache[v] = min_filling(chain, cx, weights).weight
        out.append((weights.weight(chain), cache[v]))
    table = FillingFunctionTable(k, mode, out, [])
    positive = [w for w, _ in out if w > 0]
    for v in sorted(v_grid):
        table.rows.append(FHRow(v, table.value(v), mode == "exhaustive"))
        if positive and v < min(positive):
            table.notes.append(f"v={v} is below the lightest nonzero cycle; FH reported as 0")
    if mode == "sampled":
        table.notes.append("sampled mode: values are lower bounds on FH")
    return table


def fh_bar(k: int, v: Number, table: FillingFunctionTable) -> Number:
    """FH-bar_k(v) = FH_k(2(k+1) v), with FH-bar_k(inf) = inf."""
    if table.degree != k:
        raise FillingError(f"table has degree {table.degree}, not {k}")
    if v == INF:
        return INF
    return table.value(2 * (k + 1) * v)


# -- R-transformation ---------------------------------------------------------------------------


@dataclass
class CellRecord:
    cell: Hashable
    degree: int
    source: str  # "path", "filling", "given" or "vertex"
    boundary_weight: Number
    volume: Number
    bound: Number
    within: bool


@dataclass
class RTransformResult:
    model: ChainComplex
    images: dict[Hashable, ChainVector]
    vertex_images: dict[Hashable, Hashable]
    records: dict[Hashable, CellRecord]
    bounds: dict[int, Number]
    delta: Number
    tolerance: Number

    def image(self, cell: Hashable) -> ChainVector:
        return self.images[cell]

    def face_sum(self, cell: Hashable) -> ChainVector:
        k = _degree(self.model, cell)
        out = ChainVector.zero(k - 1, "Z2")
        for i, _ in self.model.incidence[k][self.model.index(k)[cell]]:
            face = self.model.cells[k - 1][i]
            if k - 1 == 0:
                continue
            out = out + self.images[face]
        return out

    def boundary_commutes(self, cell: Hashable, ambient: ChainComplex) -> bool:
        k = _degree(self.model, cell)
        if k < 2:
            return True
        return ambient.boundary(self.images[cell]) == self.face_sum(cell)

    @property
    def within_bounds(self) -> bool:
        return all(r.within for r in self.records.values())

    def serialize(self) -> bytes:
        data = {
            repr(c): sorted(repr(x) for x in ch.coeffs) for c, ch in sorted(self.images.items(), key=lambda t: repr(t[0]))
        }
        return json.dumps(data, sort_keys=True).encode()


def _degree(cx: ChainComplex, cell: Hashable) -> int:
    for k, cells in cx.cells.items():
        if cell in cx.index(k):
            return k
    raise FillingError(f"{cell!r} is not a cell of the model")


def shortest_path_chain(cx: ChainComplex, weights: ChainWeighting, a: Hashable, b: Hashable) -> ChainVector | None:
    """Z2 edge chain of a lightest path from a to b (deterministic ties)."""
    verts = cx.cells.get(0, [])
    vidx = cx.index(0)
    adj: dict[int, list[tuple[int, int]]] = {}
    for j, entries in enumerate(cx.incidence.get(1, [])):
        ends = [i for i, _ in entries]
        if len(ends) == 2 and ends[0] != ends[1]:
            adj.setdefault(ends[0], []).append((ends[1], j))
            adj.setdefault(ends[1], []).append((ends[0], j))
    for v in (a, b):
        if v not in vidx:
            raise FillingError(f"{v!r} is not a vertex of the ambient complex")
    src, dst = vidx[a], vidx[b]
    dist: dict[int, Number] = {src: Fraction(0)}
    prev: dict[int, tuple[int, int]] = {}
    heap: list[tuple[Number, int]] = [(Fraction(0), src)]
    edges = cx.cells.get(1, [])
    done: set[int] = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        if x == dst:
            break
        for y, j in sorted(adj.get(x, [])):
            nd = d + weights.of(1, edges[j])
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                prev[y] = (x, j)
                heapq.heappush(heap, (nd, y))
    if dst not in dist:
        return None
    used = []
    x = dst
    while x != src:
        x, j = prev[x]
        used.append(edges[j])
    del verts
    return ChainVector.from_cells(1, used, "Z2")


def r_transform(
    model: ChainComplex | GluedComplex,
    ambient: ChainComplex | GluedComplex,
    vertex_map: Mapping[Hashable, Hashable],
    weights: ChainWeighting | None = None,
    tables: Mapping[int, FillingFunctionTable] | None = None,
    given: Mapping[Hashable, ChainVector] | None = None,
    delta: Number | None = None,
    tolerance: Number | None = None,
) -> RTransformResult:
    """Extend a vertex map on a cubical model to all cells by iterated minimal fillings.

    Edges go to lightest paths, and a j-cell (j >= 2) goes to a lightest
    filling of the sum of its facet images. ``given`` images are kept when
    they are consistent and within the volume bound of their degree.
    """
    K = as_chain_complex(model)
    A = as_chain_complex(ambient)
    weights = weights or ChainWeighting()
    given = dict(given or {})
    tables = dict(tables or {})
    if tolerance is None:
        total = sum((weights.of(k, c) for k, cs in A.cells.items() for c in cs), Fraction(0))
        tolerance = Fraction(1, 10**6) * total
    for v in K.cells.get(0, []):
        if v not in vertex_map:
            raise FillingError(f"model vertex {v!r} has no image")
        if vertex_map[v] not in A.index(0):
            raise FillingError(f"image {vertex_map[v]!r} is not a vertex of the ambient")
    images: dict[Hashable, ChainVector] = {}
    records: dict[Hashable, CellRecord] = {}
    # stage 1: edges
    lengths: dict[Hashable, Number] = {}
    for e in K.cells.get(1, []):
        ends = [K.cells[0][i] for i, _ in K.incidence[1][K.index(1)[e]]]
        a, b = (vertex_map[x] for x in ends)
        chain = shortest_path_chain(A, weights, a, b)
        if chain is None:
            raise RTransformError(f"edge {e!r}: endpoints map to different components", 1, e)
        lengths[e] = weights.weight(chain)
        images[e] = chain
    if delta is None:
        delta = max(lengths.values(), default=Fraction(0))
    bounds: dict[int, Number] = {1: delta}
    for e in K.cells.get(1, []):
        src = "path"
        if e in given:
            g = _z2(given[e])
            ends = [vertex_map[K.cells[0][i]] for i, _ in K.incidence[1][K.index(1)[e]]]
            expected = ChainVector.from_cells(0, [x for x in ends if ends.count(x) == 1], "Z2")
            if A.boundary(g) == expected and weights.weight(g) <= delta:
                images[e], src = g, "given"
        vol = weights.weight(images[e])
        records[e] = CellRecord(e, 1, src, Fraction(0), vol, delta, vol <= delta)
    # stages j >= 2: fill facet sums
    top = K.dimension
    for j in range(2, top + 1):
        prev_bound = bounds[j - 1]
        if prev_bound == INF:
            bounds[j] = INF
        elif j - 1 in tables:
            bounds[j] = fh_bar(j - 1, prev_bound, tables[j - 1]) + tolerance
        else:
            bounds[j] = INF
        for cell in K.cells.get(j, []):
            face_sum = ChainVector.zero(j - 1, "Z2")
            for i, _ in K.incidence[j][K.index(j)[cell]]:
                face_sum = face_sum + images[K.cells[j - 1][i]]
            src = "filling"
            chosen = None
            if cell in given:
                g = _z2(given[cell])
                if A.boundary(g) == face_sum and weights.weight(g) <= bounds[j]:
                    chosen, src = g, "given"
            if chosen is None:
                res = min_filling(face_sum, A, weights)
                if not res.finite:
                    raise RTransformError(
                        f"stage {j}: the image of the boundary of {cell!r} does not bound in the ambient "
                        "(infinite filling)",
                        j,
                        cell,
                    )
                chosen = res.chain
            images[cell] = chosen  # type: ignore[assignment]
            vol = weights.weight(chosen)  # type: ignore[arg-type]
            records[cell] = CellRecord(cell, j, src, weights.weight(face_sum), vol, bounds[j], vol <= bounds[j])
    vmap = {v: vertex_map[v] for v in K.cells.get(0, [])}
    return RTransformResult(K, images, vmap, records, bounds, delta, tolerance)


# -- waist bounds --------------------------------------------------------------------------------------


@dataclass
class WaistBounds:
    n: int
    p: int
    k: int
    k_enumerated: int
    prefactor: Fraction
    composition: Number | None
    waist_bound: Number | None
    waist_bound_times_k: Number | None
    improved_bound: Number | None
    partial: bool
    notes: list[str] = field(default_factory=list)

    @property
    def face_count_ok(self) -> bool:
        return self.k == self.k_enumerated


def waist_bounds(
    n: int, p: int, fillrad: Number, tables: Mapping[int, FillingFunctionTable] | None = None
) -> WaistBounds:
    """Evaluate the waist lower bound and the improved variant from FH tables of degrees 1..p-1."""
    if not 1 <= p <= n:
        raise FillingError(f"need 1 <= p <= n, got n={n}, p={p}")
    tables = dict(tables or {})
    from .lattice import CubicalCell, cube_box, enumerate_faces

    k = 2 ** (n - p + 1) * comb(n + 1, p)
    k_enum = len(enumerate_faces(CubicalCell(0, cube_box(n + 1)), n + 1 - p))
    if face_count(n + 1, p) != k_enum:
        raise FillingError(f"face enumeration disagrees with the closed form for n={n}, p={p}")
    prefactor = Fraction(1, 2 ** (n - p + 1) * comb(n + 1, p))
    notes: list[str] = []
    missing = [j for j in range(1, p) if j not in tables]
    if missing:
        notes.append(f"missing FH tables for degrees {missing}; composite bounds unavailable")
        return WaistBounds(n, p, k, k_enum, prefactor, None, None, None, None, True, notes)
    value: Number = 2 * fillrad
    for j in range(1, p):
        value = fh_bar(j, value, tables[j])
    improved: Number = 2 * fillrad
    for j in range(1, p):
        improved = INF if improved == INF else tables[j].value((j + 2) * improved)
    improved = improved / comb(n + 1, p) if improved != INF else INF
    wb = prefactor * value if value != INF else INF
    if any(not tables[j].exact for j in range(1, p)):
        notes.append("sampled FH tables: composite values are lower estimates")
    return WaistBounds(n, p, k, k_enum, prefactor, value, wb, wb * k if wb != INF else INF, improved, False, notes)


# -- fixtures -------------------------------------------------------------------------------------


OCTAHEDRON_FACES = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]


def octahedron_complex() -> ChainComplex:
    """Boundary of the octahedron; vertices 0..5 are +x, -x, +y, -y, +z, -z."""
    return ChainComplex.from_simplices(OCTAHEDRON_FACES)


def octahedron_equator() -> ChainVector:
    return ChainVector.from_cells(1, [(0, 2), (1, 2), (1, 3), (0, 3)], "Z2")


def annulus_complex() -> ChainComplex:
    """Triangulated annulus; the inner triangle 0-1-2 is the core circle."""
    tris = []
    for i in range(3):
        j = (i + 1) % 3
        tris.append((i, j, 3 + i))
        tris.append((j, 3 + i, 3 + j))
    return ChainComplex.from_simplices(tris)


def annulus_core() -> ChainVector:
    return ChainVector.from_cells(1, [(0, 1), (1, 2), (0, 2)], "Z2")


def circle_complex(m: int) -> ChainComplex:
    return ChainComplex.from_simplices([(i, (i + 1) % m) for i in range(m)])


def circle_times_sphere(m: int, L: Number, tiny: Number) -> tuple[ChainComplex, ChainWeighting]:
    """S^1 of length L (m edges) times the boundary of a tetrahedron with edge length ``tiny``."""
    circle = circle_complex(m)
    sphere = ChainComplex.from_simplices([s for s in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))])
    wc = ChainWeighting({1: {e: Fraction(L) / m for e in circle.cells[1]}})
    ws = ChainWeighting(
        {1: {e: tiny for e in sphere.cells[1]}, 2: {f: tiny * tiny for f in sphere.cells[2]}}
    )
    cx = circle.product(sphere)
    return cx, product_weighting(circle, wc, sphere, ws)
