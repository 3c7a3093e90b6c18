"""Chain complexes, homology over Z and Z2, pseudomanifold checks and degrees.

Everything here works on :class:`ChainComplex`, a finite based chain complex
whose basis elements are arbitrary sortable keys.  Cubical complexes enter
through :meth:`ChainComplex.from_glued`; small simplicial fixtures through
:meth:`ChainComplex.from_simplices`.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .lattice import (
    CubicalCell,
    GluedComplex,
    LatticeError,
    Point,
    box_boundary,
    check_ring,
    free_axes,
    permutation_sign,
)


class HomologyError(ValueError):
    """Structured failure of a homology-level operation."""


class DegreeError(HomologyError):
    pass


# -- chains ---------------------------------------------------------------------


def _norm(coeffs: Mapping[Hashable, int], ring: str) -> dict[Hashable, int]:
    if ring == "Z2":
        return {k: 1 for k, v in coeffs.items() if v % 2}
    return {k: v for k, v in coeffs.items() if v}


@dataclass(frozen=True)
class ChainVector:
    degree: int
    ring: str
    coeffs: Mapping[Hashable, int]

    def __post_init__(self) -> None:
        check_ring(self.ring)
        object.__setattr__(self, "coeffs", _norm(self.coeffs, self.ring))

    @classmethod
    def zero(cls, degree: int, ring: str = "Z2") -> "ChainVector":
        return cls(degree, ring, {})

    @classmethod
    def from_cells(cls, degree: int, cells: Iterable[Hashable], ring: str = "Z2") -> "ChainVector":
        acc: dict[Hashable, int] = {}
        for c in cells:
            acc[c] = acc.get(c, 0) + 1
        return cls(degree, ring, acc)

    def _check(self, other: "ChainVector") -> None:
        if other.degree != self.degree or other.ring != self.ring:
            raise HomologyError("chains of different degree or ring")

    def __add__(self, other: "ChainVector") -> "ChainVector":
        self._check(other)
        acc = dict(self.coeffs)
        for k, v in other.coeffs.items():
            acc[k] = acc.get(k, 0) + v
        return ChainVector(self.degree, self.ring, acc)

    def __neg__(self) -> "ChainVector":
        return ChainVector(self.degree, self.ring, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "ChainVector") -> "ChainVector":
        return self + (-other)

    def scale(self, c: int) -> "ChainVector":
        return ChainVector(self.degree, self.ring, {k: c * v for k, v in self.coeffs.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChainVector):
            return NotImplemented
        return (self.degree, self.ring, dict(self.coeffs)) == (other.degree, other.ring, dict(other.coeffs))

    def __hash__(self) -> int:
        return hash((self.degree, self.ring, frozenset(self.coeffs.items())))

    @property
    def support(self) -> list[Hashable]:
        return sorted(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def weight(self, weights: Mapping[Hashable, object] | None = None):
        if weights is None:
            return sum(abs(v) for v in self.coeffs.values())
        return sum(abs(v) * weights[k] for k, v in self.coeffs.items())  # type: ignore[operator]

    def to_z2(self) -> "ChainVector":
        return ChainVector(self.degree, "Z2", self.coeffs)


# -- chain complexes ---------------------------------------------------------------


@dataclass
class ChainComplex:
    """Based chain complex.  ``incidence[k][j]`` lists (face index, sign) pairs
    of the j-th k-cell without merging, so self-gluings stay visible."""

    cells: dict[int, list[Hashable]]
    incidence: dict[int, list[list[tuple[int, int]]]]
    _index: dict[int, dict[Hashable, int]] = field(default_factory=dict, init=False, repr=False)

    @property
    def dimension(self) -> int:
        return max((k for k, v in self.cells.items() if v), default=-1)

    def index(self, k: int) -> dict[Hashable, int]:
        if k not in self._index:
            self._index[k] = {c: i for i, c in enumerate(self.cells.get(k, []))}
        return self._index[k]

    def count(self, k: int) -> int:
        return len(self.cells.get(k, []))

    def columns(self, k: int, ring: str = "Z") -> list[dict[int, int]]:
        out = []
        for entries in self.incidence.get(k, [[] for _ in self.cells.get(k, [])]):
            col: dict[int, int] = {}
            for i, s in entries:
                col[i] = col.get(i, 0) + s
            out.append(_norm(col, ring))
        return out

    def boundary(self, chain: ChainVector) -> ChainVector:
        k = chain.degree
        if k == 0:
            return ChainVector.zero(-1, chain.ring)
        idx = self.index(k)
        rows = self.cells.get(k - 1, [])
        acc: dict[Hashable, int] = {}
        for cell, v in chain.coeffs.items():
            if cell not in idx:
                raise HomologyError(f"{cell!r} is not a {k}-cell of the complex")
            for i, s in self.incidence[k][idx[cell]]:
                acc[rows[i]] = acc.get(rows[i], 0) + s * v
        return ChainVector(k - 1, chain.ring, acc)

    def is_cycle(self, chain: ChainVector) -> bool:
        return chain.degree == 0 or self.boundary(chain).is_zero()

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * len(v) for k, v in self.cells.items())

    def dense(self, k: int) -> list[list[int]]:
        rows = self.count(k - 1)
        out = [[0] * self.count(k) for _ in range(rows)]
        for j, col in enumerate(self.columns(k)):
            for i, v in col.items():
                out[i][j] = v
        return out

    @classmethod
    def from_glued(cls, gc: GluedComplex) -> "ChainComplex":
        cells = {k: gc.cells(k) for k in range(gc.dimension + 1)}
        incidence: dict[int, list[list[tuple[int, int]]]] = {}
        for k in range(1, gc.dimension + 1):
            rows = {c: i for i, c in enumerate(cells[k - 1])}
            cols = []
            for cell in cells[k]:
                entries = []
                for face, inc in box_boundary(cell.intervals):
                    canon, sign = gc.canonical(CubicalCell(cell.chart, face))
                    if canon not in rows:
                        raise LatticeError(f"face {canon} of {cell} missing from complex")
                    entries.append((rows[canon], inc * sign))
                cols.append(entries)
            incidence[k] = cols
        return cls(cells, incidence)

    @classmethod
    def from_simplices(cls, simplices: Iterable[Sequence[Hashable]]) -> "ChainComplex":
        """Closure of the given simplices; orientation by sorted vertex order."""
        all_s: set[tuple] = set()
        for s in simplices:
            s = tuple(sorted(s))
            for r in range(1, len(s) + 1):
                all_s.update(itertools.combinations(s, r))
        cells: dict[int, list] = {}
        for s in all_s:
            cells.setdefault(len(s) - 1, []).append(s)
        for k in cells:
            cells[k].sort()
        incidence: dict[int, list[list[tuple[int, int]]]] = {}
        for k in range(1, max(cells, default=0) + 1):
            rows = {c: i for i, c in enumerate(cells[k - 1])}
            incidence[k] = [
                [(rows[s[:i] + s[i + 1:]], (-1) ** i) for i in range(len(s))] for s in cells[k]
            ]
        return cls(cells, incidence)

    def product(self, other: "ChainComplex") -> "ChainComplex":
        """Cellular product; cell keys are pairs (a, b)."""
        cells: dict[int, list] = {}
        for p, q in itertools.product(self.cells, other.cells):
            for a in self.cells[p]:
                for b in other.cells[q]:
                    cells.setdefault(p + q, []).append((a, b))
        for k in cells:
            cells[k].sort()
        incidence: dict[int, list[list[tuple[int, int]]]] = {}
        for k in range(1, max(cells, default=0) + 1):
            rows = {c: i for i, c in enumerate(cells.get(k - 1, []))}
            cols = []
            for a, b in cells[k]:
                p = _degree_of(self, a)
                q = k - p
                entries = []
                if p > 0:
                    ia = self.index(p)[a]
                    for i, s in self.incidence[p][ia]:
                        entries.append((rows[(self.cells[p - 1][i], b)], s))
                if q > 0:
                    ib = other.index(q)[b]
                    sign = -1 if p % 2 else 1
                    for i, s in other.incidence[q][ib]:
                        entries.append((rows[(a, other.cells[q - 1][i])], sign * s))
                cols.append(entries)
            incidence[k] = cols
        return ChainComplex(cells, incidence)

    def subcomplex(self, keep: Iterable[Hashable]) -> "ChainComplex":
        """Closure of ``keep`` under faces, as a new complex."""
        keep_set = set(keep)
        for k in sorted(self.cells, reverse=True):
            idx = self.index(k)
            for cell in list(keep_set):
                if cell in idx and k > 0:
                    for i, _ in self.incidence[k][idx[cell]]:
                        keep_set.add(self.cells[k - 1][i])
        cells = {k: [c for c in v if c in keep_set] for k, v in self.cells.items()}
        incidence: dict[int, list[list[tuple[int, int]]]] = {}
        for k in cells:
            if k == 0:
                continue
            rows = {c: i for i, c in enumerate(cells.get(k - 1, []))}
            idx = self.index(k)
            incidence[k] = [
                [(rows[self.cells[k - 1][i]], s) for i, s in self.incidence[k][idx[c]]] for c in cells[k]
            ]
        return ChainComplex({k: v for k, v in cells.items() if v}, incidence)


def _degree_of(cx: ChainComplex, key: Hashable) -> int:
    for k in cx.cells:
        if key in cx.index(k):
            return k
    raise HomologyError(f"{key!r} not in complex")


def as_chain_complex(obj: ChainComplex | GluedComplex) -> ChainComplex:
    if isinstance(obj, ChainComplex):
        return obj
    if isinstance(obj, GluedComplex):
        return ChainComplex.from_glued(obj)
    raise HomologyError(f"not a complex: {type(obj).__name__}")


# -- Z2 linear algebra on int bitsets ----------------------------------------------


def bits_of(col: Mapping[int, int]) -> int:
    v = 0
    for i in col:
        v |= 1 << i
    return v


def bit_indices(v: int) -> list[int]:
    out = []
    while v:
        low = v & -v
        out.append(low.bit_length() - 1)
        v ^= low
    return out


class Z2Echelon:
    """Incremental echelon form; remembers which inputs build each pivot."""

    def __init__(self) -> None:
        self.pivots: dict[int, int] = {}
        self.combos: dict[int, int] = {}
        self.kernel: list[int] = []
        self.count = 0

    def add(self, v: int) -> bool:
        combo = 1 << self.count
        self.count += 1
        while v:
            p = v.bit_length() - 1
            if p not in self.pivots:
                self.pivots[p] = v
                self.combos[p] = combo
                return True
            v ^= self.pivots[p]
            combo ^= self.combos[p]
        self.kernel.append(combo)
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, v: int) -> tuple[int, int]:
        """Residual of v and the input combination that was subtracted."""
        combo = 0
        while v:
            p = v.bit_length() - 1
            if p not in self.pivots:
                break
            v ^= self.pivots[p]
            combo ^= self.combos[p]
        # keep reducing lower pivots so the residual is canonical
        rest = v
        out = 0
        while rest:
            p = rest.bit_length() - 1
            if p in self.pivots:
                rest ^= self.pivots[p]
                combo ^= self.combos[p]
            else:
                out |= 1 << p
                rest ^= 1 << p
        return out, combo


def z2_rank(columns: Iterable[int]) -> int:
    ech = Z2Echelon()
    for c in columns:
        ech.add(c)
    return ech.rank


# -- integer Smith normal form -----------------------------------------------------------


@dataclass
class SmithForm:
    """U A V = D with U, V unimodular; inverses kept alongside."""

    D: list[list[int]]
    U: list[list[int]]
    V: list[list[int]]
    Uinv: list[list[int]]
    Vinv: list[list[int]]
    diagonal: list[int]

    @property
    def rank(self) -> int:
        return len(self.diagonal)


def _identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(A: Sequence[Sequence[int]], ncols: int | None = None) -> SmithForm:
    m = len(A)
    n = len(A[0]) if m else (ncols or 0)
    D = [list(r) for r in A]
    U, Uinv, V, Vinv = _identity(m), _identity(m), _identity(n), _identity(n)

    def row_add(dst: int, src: int, q: int) -> None:  # row dst += q * row src
        if q == 0:
            return
        for M in (D, U):
            r, s = M[dst], M[src]
            for j in range(len(r)):
                if s[j]:
                    r[j] += q * s[j]
        for row in Uinv:  # col src -= q * col dst
            row[src] -= q * row[dst]

    def col_add(dst: int, src: int, q: int) -> None:  # col dst += q * col src
        if q == 0:
            return
        for M in (D, V):
            for row in M:
                if row[src]:
                    row[dst] += q * row[src]
        r, s = Vinv[src], Vinv[dst]  # row src -= q * row dst
        for j in range(len(r)):
            if s[j]:
                r[j] -= q * s[j]

    def row_swap(i: int, j: int) -> None:
        if i == j:
            return
        for M in (D, U):
            M[i], M[j] = M[j], M[i]
        for row in Uinv:
            row[i], row[j] = row[j], row[i]

    def col_swap(i: int, j: int) -> None:
        if i == j:
            return
        for M in (D, V):
            for row in M:
                row[i], row[j] = row[j], row[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def row_neg(i: int) -> None:
        for M in (D, U):
            M[i] = [-x for x in M[i]]
        for row in Uinv:
            row[i] = -row[i]

    diag: list[int] = []
    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        row_swap(t, best[1])
        col_swap(t, best[2])
        while True:
            p = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    row_add(i, t, -(D[i][t] // p))
                    if D[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    col_add(j, t, -(D[t][j] // p))
                    if D[t][j]:
                        dirty = True
            if dirty:
                cand = [(abs(D[i][t]), i, t) for i in range(t + 1, m) if D[i][t]]
                cand += [(abs(D[t][j]), t, j) for j in range(t + 1, n) if D[t][j]]
                _, i, j = min(cand)
                if j == t:
                    row_swap(t, i)
                else:
                    col_swap(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is None:
                break
            row_add(t, bad, 1)
        if D[t][t] < 0:
            row_neg(t)
        diag.append(D[t][t])
        t += 1
    return SmithForm(D, U, V, Uinv, Vinv, diag)


def _matvec(M: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(a * b for a, b in zip(row, v) if a and b) for row in M]


# -- homology -------------------------------------------------------------------------------


@dataclass
class HomologyResult:
    degree: int
    ring: str
    betti: int
    torsion: list[int]
    representatives: list[ChainVector]


def homology(complex_: ChainComplex | GluedComplex, k: int, ring: str = "Z") -> HomologyResult:
    check_ring(ring)
    cx = as_chain_complex(complex_)
    if ring == "Z2":
        return _homology_z2(cx, k)
    return _homology_z(cx, k)


def _homology_z2(cx: ChainComplex, k: int) -> HomologyResult:
    cells = cx.cells.get(k, [])
    if k > 0:
        dk = Z2Echelon()
        for col in cx.columns(k, "Z2"):
            dk.add(bits_of(col))
        kernel = dk.kernel
    else:
        kernel = [1 << i for i in range(len(cells))]
    image = Z2Echelon()
    for col in cx.columns(k + 1, "Z2") if cx.count(k + 1) else []:
        image.add(bits_of(col))
    rank_next = image.rank
    reps: list[ChainVector] = []
    for z in kernel:
        residual, _ = image.reduce(z)
        if residual and image.add(residual):
            reps.append(ChainVector.from_cells(k, [cells[i] for i in bit_indices(z)], "Z2"))
    betti = len(kernel) - rank_next
    assert betti == len(reps)
    return HomologyResult(k, "Z2", betti, [], reps)


def _homology_z(cx: ChainComplex, k: int) -> HomologyResult:
    cells = cx.cells.get(k, [])
    mk = len(cells)
    if k > 0 and cx.count(k - 1) and mk:
        snf = smith_normal_form(cx.dense(k))
        r = snf.rank
        K = [[snf.V[i][j] for j in range(r, mk)] for i in range(mk)]
        Vinv = snf.Vinv
    else:
        r = 0
        K = _identity(mk)
        Vinv = _identity(mk)
    z = mk - r
    if z == 0:
        return HomologyResult(k, "Z", 0, [], [])
    if cx.count(k + 1):
        B = cx.dense(k + 1)
        VB = [[sum(Vinv[i][t] * B[t][j] for t in range(mk) if Vinv[i][t] and B[t][j])
               for j in range(len(B[0]))] for i in range(mk)]
        if any(any(VB[i]) for i in range(r)):
            raise HomologyError("boundary of boundary is not zero")
        Bk = VB[r:]
        snf2 = smith_normal_form(Bk, ncols=len(B[0]))
        diag = snf2.diagonal
        Uinv = snf2.Uinv
    else:
        diag = []
        Uinv = _identity(z)
    reps: list[ChainVector] = []
    torsion: list[int] = []
    for i in range(z):
        d = diag[i] if i < len(diag) else 0
        if d == 1:
            continue
        if d > 1:
            torsion.append(d)
        gen_kernel = [Uinv[t][i] for t in range(z)]
        coeffs = {}
        for row in range(mk):
            v = sum(K[row][t] * gen_kernel[t] for t in range(z) if K[row][t] and gen_kernel[t])
            if v:
                coeffs[cells[row]] = v
        reps.append(ChainVector(k, "Z", coeffs))
    betti = z - len(diag)
    return HomologyResult(k, "Z", betti, torsion, reps)


# -- pseudomanifolds ------------------------------------------------------------------------


@dataclass
class PseudomanifoldReport:
    dimension: int
    pure: bool
    facet_incidence_ok: bool
    strongly_connected: bool
    boundary: list[Hashable]
    orientable: bool
    orientation: dict[Hashable, int]
    orientation_witness: list[Hashable]
    notes: list[str] = field(default_factory=list)

    @property
    def is_pseudomanifold(self) -> bool:
        return self.pure and self.facet_incidence_ok and self.strongly_connected

    @property
    def closed(self) -> bool:
        return self.is_pseudomanifold and not self.boundary

    def fundamental_chain(self, ring: str = "Z2") -> ChainVector:
        if ring == "Z" and not self.orientable:
            raise HomologyError("non-orientable pseudomanifold has no integral fundamental chain")
        coeffs = self.orientation if ring == "Z" else {c: 1 for c in self.orientation}
        return ChainVector(self.dimension, ring, coeffs)


def check_pseudomanifold(complex_: ChainComplex | GluedComplex, dimension: int | None = None) -> PseudomanifoldReport:
    cx = as_chain_complex(complex_)
    n = cx.dimension if dimension is None else dimension
    tops = cx.cells.get(n, [])
    notes: list[str] = []
    # purity: every cell lies under some top cell
    covered: dict[int, set[int]] = {n: set(range(len(tops)))}
    for k in range(n, 0, -1):
        below: set[int] = set()
        for j in covered.get(k, ()):
            for i, _ in cx.incidence[k][j]:
                below.add(i)
        covered[k - 1] = below
    pure = bool(tops) and all(len(covered.get(k, ())) == cx.count(k) for k in range(n + 1))
    pure = pure and all(not cx.cells.get(k) for k in cx.cells if k > n)
    if not pure:
        notes.append("complex is not pure")
    # facet-coface incidence counts (with multiplicity)
    cofaces: dict[int, list[tuple[int, int]]] = {}
    if n > 0:
        for j, entries in enumerate(cx.incidence[n]):
            for i, s in entries:
                cofaces.setdefault(i, []).append((j, s))
    facets = cx.cells.get(n - 1, []) if n > 0 else []
    facet_ok = all(1 <= len(cofaces.get(i, ())) <= 2 for i in range(len(facets)))
    if not facet_ok:
        bad = [facets[i] for i in range(len(facets)) if not 1 <= len(cofaces.get(i, ())) <= 2]
        notes.append(f"{len(bad)} facets with 0 or >2 top cofaces, e.g. {bad[0]!r}")
    boundary = sorted(facets[i] for i in range(len(facets)) if len(cofaces.get(i, ())) == 1)
    # dual graph
    adj: dict[int, list[tuple[int, int, int, int]]] = {j: [] for j in range(len(tops))}
    for i, cf in cofaces.items():
        if len(cf) == 2:
            (a, sa), (b, sb) = cf
            adj[a].append((b, sa, sb, i))
            if a != b:
                adj[b].append((a, sb, sa, i))
    seen = {0: None} if tops else {}
    order = deque([0] if tops else [])
    while order:
        j = order.popleft()
        for b, _, _, _ in adj[j]:
            if b not in seen:
                seen[b] = j
                order.append(b)
    connected = bool(tops) and len(seen) == len(tops)
    if tops and not connected:
        notes.append("top-cell adjacency graph is disconnected")
    # orientation propagation per component
    orient: dict[int, int] = {}
    parent: dict[int, int | None] = {}
    witness: list[Hashable] = []
    orientable = facet_ok
    for root in range(len(tops)):
        if root in orient:
            continue
        orient[root] = 1
        parent[root] = None
        queue = deque([root])
        while queue and orientable:
            a = queue.popleft()
            for b, sa, sb, _ in adj[a]:
                want = -orient[a] * sa * sb  # o_a*sa + o_b*sb = 0
                if b == a:
                    if sa + sb != 0:
                        orientable = False
                        witness = [tops[a]]
                        break
                    continue
                if b not in orient:
                    orient[b] = want
                    parent[b] = a
                    queue.append(b)
                elif orient[b] != want:
                    orientable = False
                    witness = _cycle_witness(parent, a, b, tops)
                    break
        if not orientable:
            break
    orientation = {tops[j]: o for j, o in orient.items()} if orientable else {t: 1 for t in tops}
    return PseudomanifoldReport(n, pure, facet_ok, connected, boundary, orientable, orientation, witness, notes)


def _cycle_witness(parent: Mapping[int, int | None], a: int, b: int, tops: Sequence[Hashable]) -> list[Hashable]:
    def chain(x: int) -> list[int]:
        out = [x]
        while parent.get(out[-1]) is not None:
            out.append(parent[out[-1]])  # type: ignore[arg-type]
        return out

    pa, pb = chain(a), chain(b)
    common = set(pa) & set(pb)
    pa = pa[: next(i for i, x in enumerate(pa) if x in common) + 1]
    pb = pb[: next(i for i, x in enumerate(pb) if x in common)]
    return [tops[x] for x in pa + list(reversed(pb))]


def boundary_subcomplex(gc: GluedComplex, cells: Iterable[CubicalCell]) -> GluedComplex:
    """Closure of the given canonical cells, rebuilt as a glued complex."""
    per_chart: list[set] = [set() for _ in gc.charts]
    for c in cells:
        per_chart[c.chart].add(c.intervals)
    return gc.with_cells(per_chart)


# -- degree ----------------------------------------------------------------------------------------


VertexMap = Callable[[int, Point], tuple[int, Point]]


@dataclass
class DegreeResult:
    degree: int
    ring: str
    regular_cell: CubicalCell
    preimages: list[tuple[CubicalCell, int]]
    degenerate_cells: int


def degree(
    source: GluedComplex,
    target: GluedComplex,
    vertex_map: VertexMap | Mapping[CubicalCell, CubicalCell],
    regular_cell: CubicalCell | None = None,
    ring: str = "Z",
) -> DegreeResult:
    """Degree of a cellular vertex map between closed n-pseudomanifolds.

    The map is given on vertices; a top cell is mapped onto the target cell
    spanned by the images of its corners (degenerate images count zero).
    """
    check_ring(ring)
    rep_s = check_pseudomanifold(source)
    rep_t = check_pseudomanifold(target)
    if not (rep_s.closed and rep_t.closed):
        raise DegreeError("degree needs closed pseudomanifolds on both sides")
    if rep_s.dimension != rep_t.dimension:
        raise DegreeError("source and target dimensions differ")
    if ring == "Z" and not (rep_s.orientable and rep_t.orientable):
        raise DegreeError("integral degree needs orientable pseudomanifolds; use ring='Z2'")
    n = rep_s.dimension

    def image_vertex(chart: int, p: Point) -> CubicalCell:
        if callable(vertex_map):
            tc, tp = vertex_map(chart, p)
            return target.canonical_point(tc, tp)
        src = source.canonical_point(chart, p)
        try:
            return target.canonical(vertex_map[src])[0]
        except KeyError as exc:
            raise DegreeError(f"vertex {src!r} has no image") from exc

    by_vertices: dict[frozenset, CubicalCell] = {}
    for k in range(n + 1):
        for cell in target.cells(k):
            by_vertices[target.cell_vertex_classes(cell)] = cell

    counts: dict[CubicalCell, int] = {}
    pre: dict[CubicalCell, list[tuple[CubicalCell, int]]] = {}
    degenerate = 0
    for sigma in source.cells(n):
        axes = free_axes(sigma.intervals)
        imgs: dict[tuple[int, ...], CubicalCell] = {}
        for bits in itertools.product((0, 1), repeat=n):
            p = list(lo for lo, _ in sigma.intervals)
            for a, b in zip(axes, bits):
                p[a] = sigma.intervals[a][b]
            imgs[bits] = image_vertex(sigma.chart, tuple(p))
        vset = frozenset(imgs.values())
        tau = by_vertices.get(vset)
        if tau is None:
            raise DegreeError(
                f"image of {sigma!r} is not a cell of the target; no regular cell can be "
                "certified, subdivide the source so the map becomes cellular"
            )
        if tau.dim < n:
            degenerate += 1
            continue
        sign = _cube_map_sign(target, tau, imgs, n)
        o = rep_s.orientation[sigma] * sign * rep_t.orientation[tau] if ring == "Z" else 1
        counts[tau] = counts.get(tau, 0) + o
        pre.setdefault(tau, []).append((sigma, o))
    tops = target.cells(n)
    if regular_cell is None:
        regular_cell = tops[0]
    else:
        regular_cell = target.canonical(regular_cell)[0]
        if regular_cell not in tops:
            raise DegreeError(f"{regular_cell!r} is not a top cell of the target")
    value = counts.get(regular_cell, 0)
    if ring == "Z2":
        value %= 2
    for tau in tops:
        other = counts.get(tau, 0) % 2 if ring == "Z2" else counts.get(tau, 0)
        if other != value:
            raise DegreeError(
                f"preimage counts over {regular_cell!r} and {tau!r} disagree; the map is not "
                "cellular of constant degree, subdivide the source"
            )
    return DegreeResult(value, ring, regular_cell, pre.get(regular_cell, []), degenerate)


def _cube_map_sign(
    target: GluedComplex, tau: CubicalCell, imgs: Mapping[tuple[int, ...], CubicalCell], n: int
) -> int:
    axes = free_axes(tau.intervals)
    bits_of_vertex: dict[CubicalCell, tuple[int, ...]] = {}
    for bits in itertools.product((0, 1), repeat=n):
        p = list(lo for lo, _ in tau.intervals)
        for a, b in zip(axes, bits):
            p[a] = tau.intervals[a][b]
        bits_of_vertex[target.canonical_point(tau.chart, tuple(p))] = bits
    c0 = bits_of_vertex[imgs[(0,) * n]]
    perm = []
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        ci = bits_of_vertex[imgs[e]]
        diff = [x ^ y for x, y in zip(c0, ci)]
        if sum(diff) != 1:
            raise DegreeError("corner map is not a cube isomorphism")
        perm.append(diff.index(1))
    sign = permutation_sign(perm)
    for b in c0:
        if b:
            sign = -sign
    return sign


# -- homologous cycles -------------------------------------------------------------------------


@dataclass
class HomologousResult:
    homologous: bool
    witness: ChainVector | None
    obstruction: dict[Hashable, int] | None = None
    modulus: int | None = None


def solve_boundary(cx: ChainComplex, target: ChainVector) -> tuple[ChainVector | None, dict | None, int | None]:
    """Solve d x = target in degree target.degree + 1 over the target's ring."""
    k = target.degree
    rows = cx.cells.get(k, [])
    ridx = cx.index(k)
    for c in target.coeffs:
        if c not in ridx:
            raise HomologyError(f"{c!r} is not a {k}-cell of the ambient complex")
    cols = cx.cells.get(k + 1, [])
    if target.ring == "Z2":
        ech = Z2Echelon()
        for col in cx.columns(k + 1, "Z2"):
            ech.add(bits_of(col))
        v = bits_of({ridx[c]: 1 for c in target.coeffs})
        residual, combo = ech.reduce(v)
        if residual == 0:
            return ChainVector.from_cells(k + 1, [cols[i] for i in bit_indices(combo)], "Z2"), None, None
        return None, _z2_obstruction(cx, k, v), 2
    # integers
    c = [0] * len(rows)
    for cell, val in target.coeffs.items():
        c[ridx[cell]] = val
    if not cols:
        if any(c):
            return None, {rows[i]: 1 for i, x in enumerate(c) if x}, 0
        return ChainVector.zero(k + 1, "Z"), None, None
    snf = smith_normal_form(cx.dense(k + 1))
    y = _matvec(snf.U, c)
    z = [0] * len(cols)
    for i, yi in enumerate(y):
        d = snf.diagonal[i] if i < snf.rank else 0
        if d == 0:
            if yi:
                return None, {rows[j]: v for j, v in enumerate(snf.U[i]) if v}, 0
        elif yi % d:
            return None, {rows[j]: v for j, v in enumerate(snf.U[i]) if v}, d
        else:
            z[i] = yi // d
    x = _matvec(snf.V, z)
    return ChainVector(k + 1, "Z", {cols[j]: v for j, v in enumerate(x) if v}), None, None


def _z2_obstruction(cx: ChainComplex, k: int, v: int) -> dict[Hashable, int]:
    """A mod-2 cocycle vanishing on all boundaries but not on ``v``."""
    rows = cx.cells.get(k, [])
    # left kernel of d_{k+1}: kernel of its transpose
    tr: dict[int, int] = {i: 0 for i in range(len(rows))}
    for j, col in enumerate(cx.columns(k + 1, "Z2")):
        for i in col:
            tr[i] |= 1 << j
    ech = Z2Echelon()
    for i in range(len(rows)):
        ech.add(tr[i])
    for y in ech.kernel:
        if bin(y & v).count("1") % 2:
            return {rows[i]: 1 for i in bit_indices(y)}
    # the kernel basis spans the annihilator, so some element pairs oddly with v
    raise HomologyError("internal error: no obstruction found")


def homologous(
    a: ChainVector, b: ChainVector, ambient: ChainComplex | GluedComplex
) -> HomologousResult:
    """Decide whether a - b bounds in ``ambient`` (ring taken from the chains)."""
    if a.degree != b.degree or a.ring != b.ring:
        raise HomologyError("chains of different degree or ring")
    cx = as_chain_complex(ambient)
    for name, ch in (("a", a), ("b", b)):
        if not cx.is_cycle(ch):
            raise HomologyError(f"{name} is not a cycle")
    diff = a - b
    witness, obstruction, modulus = solve_boundary(cx, diff)
    if witness is not None:
        return HomologousResult(True, witness)
    return HomologousResult(False, None, obstruction, modulus)
