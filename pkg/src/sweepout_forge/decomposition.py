"""Decompositions of the standard cube and the piecewise-linear maps on them.

All complexes live in the single chart C^{n+1} = [-1,1]^{n+1}.  The tubes
X1, X2 and their interface Y use boxes whose intervals are [-1,-e], [-e,e]
and [e,1] (e = epsilon); the dual complex Z uses [-1,0] and [0,1].
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence

from .homology import PseudomanifoldReport, check_pseudomanifold
from .lattice import (
    ONE,
    ZERO,
    AxisGrid,
    Box,
    Chart,
    CubicalCell,
    GluedComplex,
    LatticeError,
    Point,
    box_barycenter,
    box_closure,
    box_dim,
    box_subset,
    check_epsilon,
    cube_box,
    elementary_subdivision,
    map_box,
    rational,
)


class DecompositionError(LatticeError):
    pass


# -- profile maps ---------------------------------------------------------------


def _check_unit(t: Fraction) -> None:
    if not -ONE <= t <= ONE:
        raise DecompositionError(f"{t} outside [-1, 1]")


def lam(t: object, eps: object) -> Fraction:
    """lambda_eps: collapses [-e,e] to 0, stretches [e,1] onto [0,1]."""
    t, e = rational(t), check_epsilon(eps)
    _check_unit(t)
    if t >= e:
        return (t - e) / (1 - e)
    if t <= -e:
        return (t + e) / (1 - e)
    return ZERO


def lam_inverse(z: object, eps: object) -> Fraction:
    """Inverse of lambda_eps on the nonzero values."""
    z, e = rational(z), check_epsilon(eps)
    _check_unit(z)
    if z == 0:
        raise DecompositionError("lambda^-1(0) is an interval, not a point")
    return e + z * (1 - e) if z > 0 else -e + z * (1 - e)


def mu(t: object, eps: object) -> Fraction:
    """mu_eps: stretches [-e,e] onto [-1,1], collapses the rest to +-1."""
    t, e = rational(t), check_epsilon(eps)
    _check_unit(t)
    if t >= e:
        return ONE
    if t <= -e:
        return -ONE
    return t / e


def profile_maps(t: object, eps: object = Fraction(1, 2)) -> tuple[Fraction, Fraction]:
    return lam(t, eps), mu(t, eps)


# -- membership predicates on points ------------------------------------------------


def _point(x: Sequence[object]) -> Point:
    p = tuple(rational(v) for v in x)
    for v in p:
        _check_unit(v)
    return p


def in_X1(x: Point, eps: Fraction, p: int) -> bool:
    return sum(1 for v in x if abs(v) < eps) <= p


def in_X2(x: Point, eps: Fraction, p: int) -> bool:
    return sum(1 for v in x if abs(v) <= eps) >= p + 1


def in_Y(x: Point, eps: Fraction, p: int) -> bool:
    return in_X1(x, eps, p) and in_X2(x, eps, p)


def in_Z(x: Point, p: int) -> bool:
    return sum(1 for v in x if v == 0) >= p + 1


def in_skeleton(x: Point, p: int) -> bool:
    return sum(1 for v in x if abs(v) != 1) <= p


# -- the maps -----------------------------------------------------------------------------


def theta(x: Sequence[object], eps: object = Fraction(1, 2), p: int = 1) -> Point:
    e = check_epsilon(eps)
    pt = _point(x)
    if not in_Y(pt, e, p):
        raise DecompositionError(f"{pt} is not in Y (eps={e}, p={p})")
    return tuple(lam(v, e) for v in pt)


def rho(x: Sequence[object], eps: object = Fraction(1, 2), p: int = 1) -> Point:
    e = check_epsilon(eps)
    pt = _point(x)
    if not in_X1(pt, e, p):
        raise DecompositionError(f"{pt} is not in X1 (eps={e}, p={p})")
    return tuple(mu(v, e) for v in pt)


def rho_bar(x: Sequence[object], eps: object = Fraction(1, 2)) -> Point:
    e = check_epsilon(eps)
    return tuple(mu(v, e) for v in _point(x))


def rho_bar_preimages(y: Sequence[object], eps: object = Fraction(1, 2)) -> list[tuple[Point, int]]:
    """Preimages of a generic point under rho_bar with local orientation signs.

    Loops over the 3^{n+1} linear regions; regions where some coordinate is
    collapsed to +-1 cannot reach a point with all |y_i| < 1.
    """
    e = check_epsilon(eps)
    pt = _point(y)
    if any(abs(v) == 1 for v in pt):
        raise DecompositionError("target point must avoid the cube boundary")
    out = []
    for region in itertools.product((-1, 0, 1), repeat=len(pt)):
        if any(r != 0 for r in region):
            continue  # constant coordinate: image lies on the boundary
        x = tuple(v * e for v in pt)
        if all(-e < xi < e for xi in x):
            out.append((x, 1))  # slope 1/e > 0 on every axis
    return out


def mod2_degree_rho_bar(n: int, eps: object = Fraction(1, 2), sample: Sequence[object] | None = None) -> int:
    if sample is None:
        sample = [Fraction(k + 1, 2 * n + 5) for k in range(n + 1)]
    return len(rho_bar_preimages(sample, eps)) % 2


def cone_level(x: Point, p: int) -> Fraction:
    """The epsilon with x in Y_eps: the (p+1)-st smallest |x_i|."""
    return sorted(abs(v) for v in x)[p]


STAR = "*"


def big_theta(x: Sequence[object], p: int = 1) -> tuple[Point, Fraction] | str:
    """Theta: C^n -> Cone(Z^{n-p-1}); returns (theta_level(x), level) or STAR."""
    pt = _point(x)
    if p >= len(pt):
        raise DecompositionError("need p < n")
    level = cone_level(pt, p)
    if level == 1:
        return STAR
    if level == 0:
        return (pt, ZERO)  # theta_0 is the identity on Z
    return (tuple(lam(v, level) for v in pt), level)


# -- decompositions as complexes ----------------------------------------------------------



def _tube_boxes(dim: int, e: Fraction) -> list[Box]:
    """All boxes with endpoints in {-1,-e,e,1} using consecutive pieces."""
    pts = [-ONE, -e, e, ONE]
    pieces = [(a, a) for a in pts] + list(zip(pts, pts[1:]))
    return [tuple(b) for b in itertools.product(pieces, repeat=dim)]


def _open_mid(box: Box, e: Fraction) -> int:
    return sum(1 for iv in box if iv == (-e, e))


def _inside_mid(box: Box, e: Fraction) -> int:
    return sum(1 for lo, hi in box if -e <= lo and hi <= e)


def x1_box(box: Box, e: Fraction, p: int) -> bool:
    return _open_mid(box, e) <= p


def x1_box_display(box: Box, e: Fraction, p: int) -> bool:
    """Displayed set-builder form: n-p+1 coordinates with |x| >= e throughout."""
    n1 = len(box)
    far = sum(1 for lo, hi in box if lo >= e or hi <= -e)
    return far >= n1 - p


def x2_box(box: Box, e: Fraction, p: int) -> bool:
    return _inside_mid(box, e) >= p + 1


def z_boxes(dim: int, p: int) -> list[Box]:
    pieces = [(-ONE, -ONE), (ZERO, ZERO), (ONE, ONE), (-ONE, ZERO), (ZERO, ONE)]
    return [
        tuple(b)
        for b in itertools.product(pieces, repeat=dim)
        if sum(1 for iv in b if iv == (ZERO, ZERO)) >= p + 1
    ]


def _complex(dim: int, boxes: Sequence[Box], grid: AxisGrid, eps: Fraction) -> GluedComplex:
    return GluedComplex((Chart(dim, grid, frozenset(boxes)),), (), eps)


@dataclass
class DecompositionSet:
    n: int
    p: int
    epsilon: Fraction
    Z: GluedComplex
    X1: GluedComplex
    X2: GluedComplex
    Y: GluedComplex
    skeleton: GluedComplex
    grid: AxisGrid = field(repr=False, default=None)  # type: ignore[assignment]

    @property
    def ambient_dim(self) -> int:
        return self.n + 1

    def boxes(self, name: str) -> frozenset[Box]:
        return getattr(self, name).charts[0].cells

    def check_invariants(self) -> dict[str, bool]:
        e = self.epsilon
        allb = frozenset(_tube_boxes(self.ambient_dim, e))
        x1, x2, y = self.boxes("X1"), self.boxes("X2"), self.boxes("Y")

        def in_union(cells: frozenset[Box], box: Box) -> bool:
            return all(
                any(box_subset(f, c) for c in cells) for f in elementary_subdivision(box, self.grid)
            )

        return {
            "union_is_cube": (x1 | x2) == allb,
            "intersection_is_Y": (x1 & x2) == y,
            "Z_in_X2": all(in_union(x2, b) for b in self.boxes("Z")),
            "skeleton_in_X1": all(in_union(x1, b) for b in self.boxes("skeleton")),
        }


@lru_cache(maxsize=64)
def build_decomposition(n: int, p: int, eps: object = Fraction(1, 2)) -> DecompositionSet:
    e = check_epsilon(eps)
    if not 1 <= p <= n:
        raise DecompositionError(f"need 1 <= p <= n, got n={n}, p={p}")
    dim = n + 1
    grid = AxisGrid.standard(e)
    tube = _tube_boxes(dim, e)
    x1 = [b for b in tube if x1_box(b, e, p)]
    x2 = [b for b in tube if x2_box(b, e, p)]
    y = [b for b in x1 if x2_box(b, e, p)]
    skel: set[Box] = set()
    for face in box_closure(cube_box(dim)):
        if box_dim(face) <= p:
            skel.add(face)
    return DecompositionSet(
        n,
        p,
        e,
        Z=_complex(dim, z_boxes(dim, p), grid, e),
        X1=_complex(dim, x1, grid, e),
        X2=_complex(dim, x2, grid, e),
        Y=_complex(dim, y, grid, e),
        skeleton=_complex(dim, sorted(skel), grid, e),
        grid=grid,
    )


def expected_Y_top_cells(n: int, p: int) -> int:
    """Count from the product description [-e,e]^p x {+-e} x (+-[e,1])^{n-p}."""
    return comb(n + 1, p) * (n + 1 - p) * 2 * 2 ** (n - p)


def in_Y_display(x: Point, e: Fraction, p: int) -> bool:
    """Disjoint-union description of Y, evaluated pointwise."""
    inside = sum(1 for v in x if abs(v) < e)
    on = sum(1 for v in x if abs(v) == e)
    # p coordinates with |x| <= e, the remaining k-p of the first k equal to e
    return inside <= p and inside + on >= p + 1


# -- fibers -------------------------------------------------------------------------------


@dataclass
class ThetaFiber:
    z: Point
    zero_axes: tuple[int, ...]
    cells: frozenset[Box]
    complex: GluedComplex

    @property
    def k(self) -> int:
        return len(self.zero_axes)

    def count(self, d: int) -> int:
        return sum(1 for b in self.cells if box_dim(b) == d)

    def cube_coordinates(self) -> frozenset[Box]:
        """Cells rewritten as faces of [0,1]^k along the zero axes."""
        e = self.complex.epsilon
        conv = {(-e, -e): (ZERO, ZERO), (e, e): (ONE, ONE), (-e, e): (ZERO, ONE)}
        return frozenset(tuple(conv[b[i]] for i in self.zero_axes) for b in self.cells)


def cube_skeleton_faces(k: int, p: int) -> frozenset[Box]:
    unit = tuple((ZERO, ONE) for _ in range(k))
    return frozenset(b for b in box_closure(unit) if box_dim(b) <= p)


def theta_fiber(z: Sequence[object] | CubicalCell, eps: object = Fraction(1, 2), p: int = 1) -> ThetaFiber:
    """theta^{-1}(z) computed by intersecting Y cells with the preimage slab.

    A cell of Z is represented by its barycenter.
    """
    e = check_epsilon(eps)
    if isinstance(z, CubicalCell):
        z = box_barycenter(z.intervals)
    zp = _point(z)
    if not in_Z(zp, p):
        raise DecompositionError(f"{zp} is not in Z (p={p})")
    n = len(zp) - 1
    dec = build_decomposition(n, p, e)
    zero_axes = tuple(i for i, v in enumerate(zp) if v == 0)
    fixed = {i: lam_inverse(v, e) for i, v in enumerate(zp) if v != 0}
    cells: set[Box] = set()
    for box in dec.boxes("Y"):
        ok = True
        out = list(box)
        for i, (lo, hi) in enumerate(box):
            if i in fixed:
                t = fixed[i]
                if not lo <= t <= hi:
                    ok = False
                    break
                out[i] = (t, t)
            elif not (-e <= lo and hi <= e):
                ok = False
                break
        if ok:
            cells.add(tuple(out))
    grid = dec.grid.refine(fixed.values())
    cx = _complex(n + 1, sorted(cells), grid, e)
    return ThetaFiber(zp, zero_axes, frozenset(cells), cx)


def fiber_is_cube_skeleton(f: ThetaFiber, p: int) -> bool:
    return f.cube_coordinates() == cube_skeleton_faces(f.k, p) and len(f.cube_coordinates()) == len(f.cells)


# -- cone and natural sweepout ---------------------------------------------------------------


@dataclass(frozen=True)
class ConeCell:
    base: CubicalCell | None  # None for the apex
    kind: str  # "bottom", "open", "apex"

    @property
    def dim(self) -> int:
        if self.base is None:
            return 0
        return self.base.dim + (1 if self.kind == "open" else 0)


@dataclass
class ConeComplex:
    base: GluedComplex

    def cells(self) -> list[ConeCell]:
        out = []
        for c in self.base.cells():
            out.append(ConeCell(c, "bottom"))
            out.append(ConeCell(c, "open"))
        out.append(ConeCell(None, "apex"))
        return out

    def euler_characteristic(self) -> int:
        # base x {0} and base x (0,1) cancel; the apex remains
        return sum((-1) ** c.dim for c in self.cells())


@dataclass
class FiberType:
    cell: ConeCell
    level: Fraction | None
    zero_count: int
    vertices: int
    edges: int
    top_dim: int
    description: str


def cone_complex(n: int, p: int) -> ConeComplex:
    """Cone over Z^{n-p-1} inside C^n."""
    if not 1 <= p <= n - 1:
        raise DecompositionError(f"need 1 <= p <= n-1, got n={n}, p={p}")
    dim = n
    return ConeComplex(_complex(dim, z_boxes(dim, p), AxisGrid.standard(), Fraction(1, 2)))


def sweepout_fiber(n: int, p: int, cell: ConeCell, level: Fraction = Fraction(1, 2)) -> FiberType:
    """Combinatorial type of the Theta-fiber over a cone cell (generic point)."""
    if cell.kind == "apex":
        faces = cube_skeleton_faces(n, p)
        v = sum(1 for b in faces if box_dim(b) == 0)
        ed = sum(1 for b in faces if box_dim(b) == 1)
        return FiberType(cell, None, n, v, ed, p, f"{p}-skeleton of the {n}-cube")
    z = box_barycenter(cell.base.intervals)  # type: ignore[union-attr]
    k = sum(1 for v in z if v == 0)
    if cell.kind == "bottom":
        return FiberType(cell, ZERO, k, 1, 0, 0, "point")
    f = theta_fiber(z, level, p)
    return FiberType(cell, level, f.k, f.count(0), f.count(1), p, f"{p}-skeleton of the {f.k}-cube")


def natural_sweepout(n: int, p: int, level: Fraction = Fraction(1, 2)) -> list[FiberType]:
    return [sweepout_fiber(n, p, c, level) for c in cone_complex(n, p).cells()]


def symmetry_generators(dim: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Adjacent transpositions and the first-coordinate sign flip."""
    gens = []
    for i in range(dim - 1):
        perm = list(range(dim))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        gens.append((tuple(perm), (1,) * dim))
    gens.append((tuple(range(dim)), (-1,) + (1,) * (dim - 1)))
    return gens


def apply_signed_perm(x: Point, perm: Sequence[int], signs: Sequence[int]) -> Point:
    y = [ZERO] * len(x)
    for i, v in enumerate(x):
        y[perm[i]] = v if signs[i] > 0 else -v
    return tuple(y)


def sweepout_symmetry_check(n: int, p: int, level: Fraction = Fraction(1, 2)) -> bool:
    """Every generator maps the fiber over a cone cell onto the fiber over its image."""
    cone = cone_complex(n, p)
    for perm, signs in symmetry_generators(n):
        for cell in cone.cells():
            if cell.kind != "open":
                continue
            z = box_barycenter(cell.base.intervals)  # type: ignore[union-attr]
            f = theta_fiber(z, level, p)
            g = theta_fiber(apply_signed_perm(z, perm, signs), level, p)
            moved = frozenset(map_box(b, perm, signs)[0] for b in f.cells)
            if moved != g.cells:
                return False
    return True


# -- validation ------------------------------------------------------------------------------


@dataclass
class YValidation:
    n: int
    p: int
    report: PseudomanifoldReport
    boundary_in_cube_boundary: bool
    top_cells: int
    seconds: float

    @property
    def passed(self) -> bool:
        return self.report.is_pseudomanifold and self.boundary_in_cube_boundary


def validate_Y(n: int, p: int, eps: object = Fraction(1, 2)) -> YValidation:
    t0 = time.perf_counter()
    dec = build_decomposition(n, p, eps)
    rep = check_pseudomanifold(dec.Y)
    on_boundary = all(any(lo == hi and abs(lo) == 1 for lo, hi in c.intervals) for c in rep.boundary)
    return YValidation(n, p, rep, on_boundary, dec.Y.count(n), time.perf_counter() - t0)
