"""Independent slow oracles used by the tests."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import sympy

from sweepout_forge.homology import ChainComplex, ChainVector


def z2_boundary(cx: ChainComplex, cells) -> frozenset:
    out: set = set()
    for c in cells:
        for face, v in cx.boundary(ChainVector.from_cells(cx_degree(cx, c), [c])).coeffs.items():
            if v % 2:
                out ^= {face}
    return frozenset(out)


def cx_degree(cx: ChainComplex, cell) -> int:
    return next(k for k, cells in cx.cells.items() if cell in cx.index(k))


def brute_force_min_filling(cx: ChainComplex, b: ChainVector, max_exhaust: int = 20):
    """Smallest number of (k+1)-cells whose Z2 boundary is b, by increasing subset size.

    Non-bounding cycles are only decided when every subset can be enumerated.
    """
    target = frozenset(c for c, v in b.coeffs.items() if v % 2)
    cols = list(cx.cells.get(b.degree + 1, []))
    bnd = {c: z2_boundary(cx, [c]) for c in cols}
    for size in range(len(cols) + 1):
        if size > 6 and len(cols) > max_exhaust:
            raise ValueError("instance too large for the brute-force oracle")
        for subset in itertools.combinations(cols, size):
            acc: frozenset = frozenset()
            for c in subset:
                acc = acc ^ bnd[c]
            if acc == target:
                return Fraction(size)
    return math.inf


def sympy_invariant_factors(A) -> list[int]:
    """Nonzero diagonal of the Smith form over Z, via sympy."""
    from sympy.matrices.normalforms import smith_normal_form

    if not A or not A[0]:
        return []
    D = smith_normal_form(sympy.Matrix(A), domain=sympy.ZZ)
    return [abs(int(D[i, i])) for i in range(min(D.shape)) if D[i, i] != 0]


def z2_rank_naive(columns: list[list[int]]) -> int:
    """Gaussian elimination over GF(2) on explicit 0/1 rows."""
    rows = [list(c) for c in columns]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for j in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][j] % 2), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][j] % 2:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def betti_rational(cx: ChainComplex, k: int) -> int:
    """Rank of H_k with rational coefficients from sympy ranks."""
    def rank(d: int) -> int:
        if d <= 0 or cx.count(d) == 0 or cx.count(d - 1) == 0:
            return 0
        return sympy.Matrix(cx.dense(d)).rank()

    return cx.count(k) - rank(k) - rank(k + 1)
