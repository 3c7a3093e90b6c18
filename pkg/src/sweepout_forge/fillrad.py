"""Filling-radius estimates on finite metric spaces and the inequality audits.

The nu-neighborhood of a sample in the sup-norm picture is modeled by the
flag (Rips) complex at threshold 2*nu, so an estimate is half the threshold at
which the fundamental class dies.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence, Union

Number = Union[Fraction, float, int]

BUDGET = 5_000_000
TRIANGLE_TOL = 1e-9  # relative; floats are serialized with 12 significant digits


class MetricError(ValueError):
    pass


class BudgetError(MetricError):
    pass


def _num(v: object) -> Number:
    if isinstance(v, (Fraction, float)):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            return float(v)
    raise MetricError(f"not a number: {v!r}")


@dataclass
class FiniteMetricSpace:
    distances: list[list[Number]]
    volume: Number | None = None
    degree: int | None = None
    name: str = ""
    labels: list[object] | None = None
    # diameter of the manifold this set samples, when known
    model_diameter: Number | None = None

    def __post_init__(self) -> None:
        self.distances = [[_num(v) for v in row] for row in self.distances]
        self.validate()

    @property
    def size(self) -> int:
        return len(self.distances)

    @property
    def diameter(self) -> Number:
        return max((v for row in self.distances for v in row), default=Fraction(0))

    @property
    def reference_diameter(self) -> Number:
        """diam(M) when the sampled manifold is known, else the sample diameter."""
        return self.model_diameter if self.model_diameter is not None else self.diameter

    def d(self, i: int, j: int) -> Number:
        return self.distances[i][j]

    def validate(self) -> None:
        D = self.distances
        k = len(D)
        for i, row in enumerate(D):
            if len(row) != k:
                raise MetricError(f"row {i} has length {len(row)}, expected {k}")
            if row[i] != 0:
                raise MetricError(f"nonzero diagonal entry at {i}")
            for j, v in enumerate(row):
                if v < 0:
                    raise MetricError(f"negative distance at ({i}, {j})")
                if v != D[j][i]:
                    raise MetricError(f"asymmetric distances at ({i}, {j})")
        scale = float(self.diameter) or 1.0
        for i, j, m in itertools.product(range(k), repeat=3):
            lhs, rhs = D[i][j], D[i][m] + D[m][j]
            if lhs > rhs and float(lhs - rhs) > TRIANGLE_TOL * scale:
                raise MetricError(f"triangle inequality fails for ({i}, {m}, {j})")

    def scaled(self, factor: Number) -> "FiniteMetricSpace":
        vol = None if self.volume is None else self.volume * factor ** (self.degree or 1)
        md = None if self.model_diameter is None else self.model_diameter * factor
        return FiniteMetricSpace(
            [[v * factor for v in row] for row in self.distances], vol, self.degree, self.name, self.labels, md
        )

    def relabeled(self, order: Sequence[int]) -> "FiniteMetricSpace":
        D = self.distances
        return FiniteMetricSpace(
            [[D[i][j] for j in order] for i in order], self.volume, self.degree, self.name,
            model_diameter=self.model_diameter,
        )


# -- space builders --------------------------------------------------------------------


def cycle_space(m: int, circumference: Number = Fraction(1)) -> FiniteMetricSpace:
    """m evenly spaced points on a circle with the intrinsic metric."""
    L = _num(circumference)
    D = [[L * Fraction(min(abs(i - j), m - abs(i - j)), m) for j in range(m)] for i in range(m)]
    return FiniteMetricSpace(D, volume=L, degree=1, name=f"C{m}", model_diameter=L / 2)


def sphere_space(points: Sequence[Sequence[float]], name: str = "") -> FiniteMetricSpace:
    """Points of the unit sphere with great-circle distances."""
    unit = []
    for p in points:
        r = math.sqrt(sum(c * c for c in p))
        unit.append([c / r for c in p])
    D = []
    for a in unit:
        row = []
        for b in unit:
            c = max(-1.0, min(1.0, sum(x * y for x, y in zip(a, b))))
            row.append(0.0 if a is b else math.acos(c))
        D.append(row)
    for i in range(len(D)):
        D[i][i] = 0.0
    n = len(unit[0]) - 1 if unit else 0
    return FiniteMetricSpace(D, volume=_sphere_volume(n), degree=n, name=name, model_diameter=math.pi)


def _sphere_volume(n: int) -> float:
    return 2 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def octahedron_space() -> FiniteMetricSpace:
    pts = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]]
    return sphere_space(pts, "octahedron")


def icosahedron_space() -> FiniteMetricSpace:
    g = (1 + math.sqrt(5)) / 2
    pts = []
    for a, b in itertools.product((-1, 1), repeat=2):
        pts += [[0, a, b * g], [a, b * g, 0], [b * g, 0, a]]
    return sphere_space(pts, "icosahedron")


def graph_space(n_vertices: int, edges: Iterable[tuple[int, int, Number]], name: str = "") -> FiniteMetricSpace:
    """Shortest-path metric of a weighted connected graph."""
    inf = None
    D: list[list[Number | None]] = [[inf] * n_vertices for _ in range(n_vertices)]
    for i in range(n_vertices):
        D[i][i] = Fraction(0)
    for a, b, w in edges:
        w = _num(w)
        if D[a][b] is None or w < D[a][b]:  # type: ignore[operator]
            D[a][b] = D[b][a] = w
    for m in range(n_vertices):
        Dm = D[m]
        for i in range(n_vertices):
            dim = D[i][m]
            if dim is None:
                continue
            Di = D[i]
            for j in range(n_vertices):
                if Dm[j] is None:
                    continue
                c = dim + Dm[j]
                if Di[j] is None or c < Di[j]:
                    Di[j] = c
    if any(v is None for row in D for v in row):
        raise MetricError("graph is disconnected")
    return FiniteMetricSpace(D, name=name)  # type: ignore[arg-type]


# -- persistence ---------------------------------------------------------------------------


@dataclass
class PersistencePair:
    degree: int
    birth: Number
    death: Number | None  # None means infinite
    representative: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def persistence(self) -> float:
        return math.inf if self.death is None else float(self.death - self.birth)


def flag_simplices(space: FiniteMetricSpace, max_dim: int, max_threshold: Number | None = None) -> list[tuple[Number, int, tuple[int, ...]]]:
    k = space.size
    D = space.distances
    thr = max_threshold
    nbrs = [
        [j for j in range(i + 1, k) if thr is None or D[i][j] <= thr] for i in range(k)
    ]
    out: list[tuple[Number, int, tuple[int, ...]]] = [(Fraction(0), 0, (i,)) for i in range(k)]

    def extend(simplex: tuple[int, ...], value: Number, cands: list[int]) -> None:
        for idx, j in enumerate(cands):
            v = value
            for i in simplex:
                if D[i][j] > v:
                    v = D[i][j]
            s = simplex + (j,)
            out.append((v, len(s) - 1, s))
            if len(s) - 1 < max_dim:
                rest = [c for c in cands[idx + 1:] if c in nbr_set[j]]
                if rest:
                    extend(s, v, rest)

    nbr_set = [set(v) for v in nbrs]
    if max_dim >= 1:
        for i in range(k):
            extend((i,), Fraction(0), nbrs[i])
    out.sort(key=lambda t: (t[0], t[1], t[2]))
    return out


def count_flag_simplices(space: FiniteMetricSpace, max_dim: int, max_threshold: Number) -> int:
    return len(flag_simplices(space, max_dim, max_threshold))


def rips_persistence(
    space: FiniteMetricSpace,
    max_degree: int,
    max_threshold: Number | None = None,
    representatives: bool = True,
) -> list[PersistencePair]:
    """Z2 persistence of the flag filtration up to homological degree ``max_degree``."""
    top = max_degree + 1
    if max_threshold is None:
        need = comb(space.size, max_degree + 2)
        if need > BUDGET:
            raise BudgetError(
                f"C({space.size}, {max_degree + 2}) = {need} simplices exceeds the budget "
                f"{BUDGET}; subsample the space or pass max_threshold"
            )
        simplices = flag_simplices(space, top)
    else:
        simplices = flag_simplices(space, top, max_threshold)
        if len(simplices) > BUDGET:
            raise BudgetError(
                f"{len(simplices)} simplices up to threshold {max_threshold} exceed the budget "
                f"{BUDGET}; subsample the space or lower the threshold"
            )
    index = {s: i for i, (_, _, s) in enumerate(simplices)}
    low_of: dict[int, int] = {}
    reduced: dict[int, int] = {}
    pairs: list[PersistencePair] = []
    killed: set[int] = set()
    for j, (value, dim, s) in enumerate(simplices):
        if dim == 0:
            continue
        col = 0
        for r in range(len(s)):
            col |= 1 << index[s[:r] + s[r + 1:]]
        while col:
            low = col.bit_length() - 1
            other = low_of.get(low)
            if other is None:
                break
            col ^= reduced[other]
        if col:
            low = col.bit_length() - 1
            low_of[low] = j
            reduced[j] = col
            killed.add(low)
            bval, bdim, _ = simplices[low]
            rep = []
            if representatives:
                rep = [simplices[i][2] for i in _bits(col)]
            pairs.append(PersistencePair(bdim, bval, value, rep))
    births_with_zero = [
        i for i, (_, dim, _) in enumerate(simplices) if dim <= max_degree and i not in reduced and i not in killed
    ]
    for i in births_with_zero:
        value, dim, s = simplices[i]
        pairs.append(PersistencePair(dim, value, None, [s]))
    pairs.sort(key=lambda p: (p.degree, p.birth, math.inf if p.death is None else p.death))
    return pairs


def _bits(v: int) -> list[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


@dataclass
class FillRadEstimate:
    value: Number
    degree: int
    pair: PersistencePair
    convention: str = "neighborhood radius nu = flag threshold / 2"


def fillrad_estimate(space: FiniteMetricSpace, degree: int | None = None, max_threshold: Number | None = None) -> FillRadEstimate:
    """Half the death threshold of the most persistent degree-n class.

    With ``max_threshold`` the filtration is truncated; a class still alive at
    the cutoff makes the estimate undecided and raises ``MetricError``.
    """
    n = degree if degree is not None else space.degree
    if n is None:
        raise MetricError("no fundamental degree given")
    pairs = rips_persistence(space, n, max_threshold, representatives=False)
    if max_threshold is not None and any(p.degree == n and p.death is None for p in pairs):
        raise MetricError(f"a degree-{n} class is still alive at threshold {max_threshold}")
    finite = [p for p in pairs if p.degree == n and p.death is not None and p.death > p.birth]
    if not finite:
        raise MetricError(f"no finite persistence pair in degree {n}")
    best = max(finite, key=lambda p: (p.persistence, -float(p.birth)))
    return FillRadEstimate(best.death / 2, n, best)  # type: ignore[operator]


def fillrad_estimate_adaptive(space: FiniteMetricSpace, degree: int, start: Number | None = None) -> FillRadEstimate:
    """Raise the threshold until every degree-n class has died, then estimate."""
    D = sorted({v for row in space.distances for v in row if v > 0})
    thr = start if start is not None else D[min(len(D) - 1, len(D) // 8)]
    while True:
        if thr >= D[-1]:
            return fillrad_estimate(space, degree, D[-1])
        try:
            return fillrad_estimate(space, degree, thr)
        except BudgetError:
            raise
        except MetricError:
            thr = min(D[-1], thr * 2)


# -- constants and audits -----------------------------------------------------------------


def reference_constants(n: int) -> dict[str, Number]:
    if n < 1:
        raise MetricError("n must be >= 1")
    return {
        "sphere_fillrad": 0.5 * math.acos(-1.0 / (n + 1)),
        "c_n": Fraction(1, (n + 1) * 2 ** (n + 1)),
    }


@dataclass
class SweepSummary:
    """Upper bounds for the waist (max fiber length) and Urysohn width (max fiber diameter)."""

    w_upper: Number
    uw_upper: Number
    source: str = ""


def circle_sweep(space: FiniteMetricSpace) -> SweepSummary:
    """Map of a circle to a point: one fiber, the whole circle."""
    return SweepSummary(space.volume if space.volume is not None else 0, space.diameter, "circle to point")


def round_sphere_latitude_sweep(radius: float = 1.0) -> SweepSummary:
    """Latitude circles of the round 2-sphere: longest is the equator."""
    return SweepSummary(2 * math.pi * radius, math.pi * radius, "latitude circles")


@dataclass
class AuditClause:
    name: str
    inequality: str
    lhs: Number | None
    rhs: Number | None
    passed: bool | None
    note: str = ""


@dataclass
class AuditReport:
    estimate: Number
    clauses: list[AuditClause]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses if c.passed is not None)

    def clause(self, name: str) -> AuditClause:
        return next(c for c in self.clauses if c.name == name)


def inequality_audit(
    space: FiniteMetricSpace,
    sweep: SweepSummary | None = None,
    estimate: Number | None = None,
    tol: float = 1e-9,
    degree: int | None = None,
) -> AuditReport:
    n = degree if degree is not None else space.degree
    if estimate is None:
        estimate = fillrad_estimate(space, n).value
    fr = estimate
    clauses = [
        AuditClause(
            "katz", "FillRad <= diam/3", fr, space.reference_diameter / 3,
            float(fr) <= float(space.reference_diameter) / 3 + tol,
            "" if space.model_diameter is None else f"diam of the sampled manifold; sample diameter {space.diameter}",
        )
    ]
    if space.volume is not None and n:
        rhs = n * float(space.volume) ** (1.0 / n)
        clauses.append(AuditClause("volume", "FillRad <= n vol^(1/n)", fr, rhs, float(fr) <= rhs + tol))
    else:
        clauses.append(AuditClause("volume", "FillRad <= n vol^(1/n)", fr, None, None, "no volume metadata"))
    if sweep is not None:
        clauses.append(
            AuditClause("urysohn", "FillRad <= UW/2", fr, sweep.uw_upper / 2,
                        float(fr) <= float(sweep.uw_upper) / 2 + tol)
        )
        clauses.append(
            AuditClause("waist", "FillRad <= W/2", fr, sweep.w_upper / 2,
                        float(fr) <= float(sweep.w_upper) / 2 + tol)
        )
        c = reference_constants(n or 1)["c_n"]
        lower = c * sweep.w_upper
        clauses.append(
            AuditClause("fr1_ledger", "c_n W_upper vs FillRad (informational)", lower, fr, None,
                        "consistent" if float(lower) <= float(fr) + tol else "c_n W_upper exceeds estimate")
        )
    else:
        for name, ineq in (("urysohn", "FillRad <= UW/2"), ("waist", "FillRad <= W/2")):
            clauses.append(AuditClause(name, ineq, fr, None, None, "no sweep summary"))
    return AuditReport(fr, clauses)
