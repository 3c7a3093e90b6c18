"""Command-line front end: ``sweepout-forge <subcommand>``.

Exit codes: 0 success, 1 input error, 2 a computation finished but an audit
or validation check failed.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from . import __version__
from .decomposition import (
    build_decomposition,
    expected_Y_top_cells,
    fiber_is_cube_skeleton,
    theta_fiber,
    validate_Y,
)
from .filling import (
    FHRow,
    FillingError,
    FillingFunctionTable,
    fh_profile,
    waist_bounds,
)
from .fillrad import (
    FiniteMetricSpace,
    MetricError,
    SweepSummary,
    circle_sweep,
    fillrad_estimate,
    fillrad_estimate_adaptive,
    inequality_audit,
    reference_constants,
    round_sphere_latitude_sweep,
)
from .homology import HomologyError, check_pseudomanifold
from .io import (
    SCHEMA,
    InputError,
    complex_from_json,
    complex_to_json,
    digest,
    dumps,
    export_geometry,
    filling_from_json,
    load_json,
    metric_from_json,
    ambient_from_json,
    to_jsonable,
    write_off,
)
from .lattice import GluedComplex, LatticeError, box_corners, box_dim, free_axes, rational
from .starfish import StarfishError, hexapodize, make_starfish, theta_graph_check
from .sweepout import (
    SubdivisionRequired,
    SweepoutError,
    boundary_pairing,
    build_bundle,
    default_sample,
    hbar_fiber,
    homology_audit,
    urysohn_upper_bound,
    waist_certificate,
    waist_upper_bound,
)

THREADS_ENV = "SWEEPOUT_FORGE_THREADS"


class AuditFailed(Exception):
    pass


# -- report plumbing ----------------------------------------------------------------------------


class Report:
    def __init__(self, command: str, params: dict[str, Any]) -> None:
        self.command = command
        self.params = params
        self.inputs: dict[str, str] = {}
        self.results: dict[str, Any] = {}
        self.audits: list[dict[str, Any]] = []
        self.start = time.perf_counter()

    def add_input(self, path: str) -> None:
        self.inputs[str(path)] = digest(path)

    def audit(self, name: str, inequality: str, lhs: Any, rhs: Any, passed: bool | None, note: str = "") -> None:
        self.audits.append(
            {"name": name, "inequality": inequality, "lhs": lhs, "rhs": rhs, "passed": passed, "note": note}
        )

    @property
    def passed(self) -> bool:
        return all(a["passed"] is not False for a in self.audits)

    def as_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "tool": {"name": "sweepout-forge", "version": __version__},
            "command": self.command,
            "parameters": self.params,
            "inputs": self.inputs,
            "threads": _threads(),
            "results": self.results,
            "audits": self.audits,
            "passed": self.passed,
            "timing": {"seconds": round(time.perf_counter() - self.start, 3)},
        }


def _threads() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError as exc:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise InputError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _emit(report: Report, path: str | None) -> None:
    text = dumps(report.as_dict())
    if path:
        try:
            Path(path).write_text(text + "\n")
        except OSError as exc:
            raise InputError(f"cannot write report {path}: {exc.strerror}") from exc
    else:
        print(text)


def _rat_arg(s: str) -> Fraction:
    try:
        return rational(s)
    except LatticeError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _point_arg(s: str) -> tuple[Fraction, ...]:
    if not s.strip():
        return ()
    return tuple(_rat_arg(v) for v in s.split(","))


def parse_grid(spec: str) -> list[Fraction]:
    """``start:stop:step`` (inclusive) or a comma list."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise InputError(f"grid {spec!r} must be start:stop:step")
        a, b, s = (rational(v) for v in parts)
        if s <= 0:
            raise InputError("grid step must be positive")
        out, v = [], a
        while v <= b:
            out.append(v)
            v += s
        return out
    return [rational(v) for v in spec.split(",") if v.strip()]


# -- geometry helpers ----------------------------------------------------------------------------


def _world(gc: GluedComplex, chart: int, p: Sequence[Fraction]) -> tuple[float, ...]:
    return tuple(float(x) for x in gc.point_to_world(chart, p))


def complex_surface_off(gc: GluedComplex, path: Path) -> tuple[int, int]:
    """OFF of the top cells of a complex of dimension <= 2 (edges as 2-vertex faces)."""
    index: dict[Any, int] = {}
    verts: list[tuple[float, ...]] = []

    def vid(chart: int, p: Sequence[Fraction]) -> int:
        canon = gc.canonical_point(chart, p)
        if canon not in index:
            index[canon] = len(verts)
            verts.append(_world(gc, canon.chart, tuple(a for a, _ in canon.intervals)))
        return index[canon]

    faces = []
    top = gc.dimension
    for cell in gc.cells(top):
        box = cell.intervals
        axes = free_axes(box)
        if len(axes) == 2:
            i, j = axes
            cyc = []
            for a, b in ((0, 0), (1, 0), (1, 1), (0, 1)):
                p = [lo for lo, _ in box]
                p[i] = box[i][a]
                p[j] = box[j][b]
                cyc.append(vid(cell.chart, p))
            faces.append(cyc)
        elif len(axes) == 1:
            lo, hi = box_corners(box)
            faces.append([vid(cell.chart, lo), vid(cell.chart, hi)])
    write_off(path, verts, faces)
    return len(verts), len(faces)


# -- subcommands ---------------------------------------------------------------------------------


def cmd_decompose(args: argparse.Namespace) -> Report:
    rep = Report("decompose", {"n": args.n, "p": args.p, "epsilon": args.epsilon})
    D = build_decomposition(args.n, args.p, args.epsilon)
    counts = {}
    for name in ("Z", "X1", "X2", "Y", "skeleton"):
        gc: GluedComplex = getattr(D, name)
        counts[name] = [gc.count(k) for k in range(gc.dimension + 1)]
    inv = D.check_invariants()
    rep.results["cells"] = counts
    rep.results["invariants"] = inv
    for k, v in inv.items():
        rep.audit(k, k.replace("_", " "), None, None, v)
    top = D.Y.count(args.n)
    rep.results["Y_top_cells"] = {"enumerated": top, "expected": expected_Y_top_cells(args.n, args.p)}
    rep.audit("Y_top_cells", "enumerated = C(n+1,p)(n+1-p) 2^(n-p+1)", top,
              expected_Y_top_cells(args.n, args.p), top == expected_Y_top_cells(args.n, args.p))
    fibers = []
    records = []
    for z in D.Z.cells():
        f = theta_fiber(z, args.epsilon, args.p)
        iso = fiber_is_cube_skeleton(f, args.p)
        fibers.append({"z": z, "k": f.k, "edges": f.count(1), "vertices": f.count(0), "cube_skeleton": iso})
        if args.export_fibers is not None:
            segs = [
                tuple(tuple(float(x) for x in c) for c in box_corners(b))
                for b in sorted(f.cells)
                if box_dim(b) == 1
            ]
            records.append((f"fiber_{_zname(z.intervals)}", segs))
    rep.results["fibers"] = {
        "count": len(fibers),
        "all_cube_skeleta": all(f["cube_skeleton"] for f in fibers),
        "max_edges": max((f["edges"] for f in fibers), default=0),
        "cells": fibers,
    }
    rep.audit("fiber_isomorphism", "theta fiber = p-skeleton of the k-cube", None, None,
              all(f["cube_skeleton"] for f in fibers))
    if args.p == 1:
        bound = (args.n + 1) * 2 ** args.n
        rep.audit("fiber_edges", "max edges <= (n+1) 2^n", rep.results["fibers"]["max_edges"], bound,
                  rep.results["fibers"]["max_edges"] <= bound)
    if args.export_fibers is not None:
        export_geometry(records, args.export_fibers)
    if args.complex_out:
        Path(args.complex_out).write_text(dumps(complex_to_json(D.Y)) + "\n")
    return rep


def _zname(box: Sequence[tuple[Fraction, Fraction]]) -> str:
    return "_".join(str(a) if a == b else f"{a}..{b}" for a, b in box).replace("/", "o").replace("-", "m")


def cmd_validate(args: argparse.Namespace) -> Report:
    rep = Report("validate", {"complex": args.complex, "n": args.n, "p": args.p})
    if args.complex:
        rep.add_input(args.complex)
        gc = complex_from_json(load_json(args.complex))
        pm = check_pseudomanifold(gc)
        rep.results["pseudomanifold"] = pm.is_pseudomanifold
        rep.results["dimension"] = pm.dimension
        rep.results["closed"] = pm.closed
        rep.results["orientable"] = pm.orientable
        rep.results["boundary_cells"] = len(pm.boundary)
        rep.results["notes"] = pm.notes
        rep.audit("pseudomanifold", "pure, <= 2 cofaces per facet, strongly connected", None, None,
                  pm.is_pseudomanifold)
        return rep
    if args.n is None or args.p is None:
        raise InputError("validate needs --complex or both --n and --p")
    v = validate_Y(args.n, args.p, args.epsilon)
    rep.results.update({
        "pseudomanifold": v.report.is_pseudomanifold,
        "boundary_in_cube_boundary": v.boundary_in_cube_boundary,
        "top_cells": v.top_cells,
    })
    rep.audit("pseudomanifold", "Y is an n-pseudomanifold", None, None, v.report.is_pseudomanifold)
    rep.audit("boundary", "boundary of Y lies in the cube boundary", None, None, v.boundary_in_cube_boundary)
    return rep


def default_boundary_points(n: int) -> list[tuple[Fraction, ...]]:
    if n < 2:
        return []
    pts = [tuple(Fraction(k, n - 1) for k in range(1, n))]
    pts.append((Fraction(0),) + tuple(Fraction(k, n) for k in range(2, n)))
    if n >= 3:
        pts.append((Fraction(1, 2), Fraction(1, 2)) + tuple(Fraction(1, 2) + Fraction(k, 2 * n) for k in range(1, n - 2)))
    return pts


def cmd_sweep(args: argparse.Namespace) -> Report:
    rep = Report("sweep", {"input": args.input, "strict": args.strict})
    rep.add_input(args.input)
    inp = filling_from_json(load_json(args.input))
    bundle = build_bundle(inp, strict=args.strict)
    n = bundle.n
    cert = waist_certificate(bundle)
    w, uw = waist_upper_bound(bundle), urysohn_upper_bound(bundle)
    rep.results.update({
        "n": n,
        "top_cells": len(inp.P.charts),
        "boundary_faces": len(bundle.boundary_faces),
        "delta": bundle.delta,
        "N_cells": [bundle.N.count(k) for k in range(n + 1)],
        "T_cells": len(bundle.T),
        "w_upper": w,
        "uw_upper": uw,
        "max_fiber_edges": cert["max_edges"],
    })
    rep.audit("waist_certificate", "W_upper <= (n+1) 2^n delta", w, cert["bound"], cert["holds"])
    audit = homology_audit(bundle)
    rep.results["homology"] = {
        "N_closed": audit.N_closed,
        "homologous": audit.homologous,
        "witness_cells": audit.witness_cells,
        "witness_verified": audit.witness_verified,
    }
    rep.audit("N_closed", "N is a closed n-pseudomanifold", None, None, audit.N_closed)
    rep.audit("homologous", "[N] = [dP] in H_n(Q u dP; Z2)", None, None, audit.homologous and audit.witness_verified)
    if n >= 2:
        x = args.sample if args.sample is not None else default_sample(n)
        hb = hbar_fiber(bundle, x)
        rep.results["hbar"] = {
            "x": hb.x,
            "count": hb.count,
            "formula_count": hb.formula_count,
            "mismatch": hb.mismatch,
            "per_piece": hb.per_piece,
            "disjoint": hb.disjoint,
            "simple": hb.simple,
            "max_loop_length": hb.max_length,
        }
        rep.audit("loops", "loops disjoint and simple", None, None, hb.disjoint and hb.simple)
        rep.audit("loop_length", "each loop <= 4 delta", hb.max_length, 4 * bundle.delta,
                  hb.max_length <= 4 * bundle.delta)
        if bundle.filling.orientable:
            pairing = []
            for x0 in default_boundary_points(n):
                cert0 = boundary_pairing(bundle, x0)
                pairing.append({"x0": x0, "case": cert0.case, "zero": cert0.zero, "groups": len(cert0.groups)})
                rep.audit(f"pairing_{'_'.join(str(v) for v in x0)}", "limit 1-cycle is zero over Z", None, None,
                          cert0.zero)
            rep.results["pairing"] = pairing
    if args.export_fibers is not None:
        records = []
        for t in bundle.T:
            f = bundle.fiber(t)
            segs = [(_world(inp.P, e.chart, e.start), _world(inp.P, e.chart, e.end)) for e in f.edges]
            records.append((f"fiber_{t.piece.replace(chr(39), 'p')}_c{t.chart}_{_zname(t.box)}_{t.level or ''}", segs))
        paths = export_geometry(records, args.export_fibers)
        complex_surface_off(bundle.N, Path(args.export_fibers) / "N.off")
        rep.results["exported"] = len(paths) + 1
    return rep


def cmd_fillrad(args: argparse.Namespace) -> Report:
    rep = Report("fillrad", {"metric": args.metric, "degree": args.degree, "max_threshold": args.max_threshold})
    rep.add_input(args.metric)
    space = metric_from_json(load_json(args.metric))
    deg = args.degree if args.degree is not None else space.degree
    if deg is None:
        raise InputError("no degree: pass --degree or set 'degree' in the metric file")
    if args.max_threshold is not None:
        est = fillrad_estimate(space, deg, args.max_threshold)
    elif args.adaptive:
        est = fillrad_estimate_adaptive(space, deg)
    else:
        est = fillrad_estimate(space, deg)
    rep.results.update({
        "fillrad_estimate": est.value,
        "degree": deg,
        "birth": est.pair.birth,
        "death": est.pair.death,
        "convention": est.convention,
        "diameter": space.diameter,
        "reference": reference_constants(deg),
    })
    return rep


def cmd_fh(args: argparse.Namespace) -> Report:
    rep = Report("fh", {"complex": args.complex, "degree": args.degree, "grid": args.grid, "mode": args.mode})
    rep.add_input(args.complex)
    cx, weights = ambient_from_json(load_json(args.complex))
    table = fh_profile(cx, args.degree, parse_grid(args.grid), weights, args.mode, args.samples, args.seed)
    rep.results["table"] = table_to_json(table)
    rep.audit("nondecreasing", "FH_k nondecreasing in v", None, None, table.is_nondecreasing())
    return rep


def table_to_json(table: FillingFunctionTable) -> dict[str, Any]:
    return to_jsonable({
        "degree": table.degree,
        "mode": table.mode,
        "rows": [{"v": r.v, "value": r.value, "exact": r.exact} for r in table.rows],
        "samples": sorted(table.samples, key=lambda s: (float(s[0]), float(s[1]))),
        "notes": table.notes,
    })


def _value(v: Any) -> Fraction | float:
    if v == "inf":
        return float("inf")
    if isinstance(v, float):
        return v
    return rational(v)


def table_from_json(data: dict[str, Any]) -> FillingFunctionTable:
    try:
        samples = [(_value(a), _value(b)) for a, b in data["samples"]]
        rows = [FHRow(_value(r["v"]), _value(r["value"]), bool(r["exact"])) for r in data.get("rows", [])]
        return FillingFunctionTable(int(data["degree"]), str(data["mode"]), samples, rows, list(data.get("notes", [])))
    except (KeyError, TypeError, LatticeError) as exc:
        raise InputError(f"malformed FH table: {exc}") from exc


def _load_tables(path: str) -> dict[int, FillingFunctionTable]:
    data = load_json(path)
    out: dict[int, FillingFunctionTable] = {}
    entries = []
    if isinstance(data, dict) and "results" in data and "table" in data["results"]:
        entries = [data["results"]["table"]]
    elif isinstance(data, dict) and "tables" in data:
        entries = list(data["tables"])
    elif isinstance(data, list):
        entries = [d["results"]["table"] if "results" in d else d for d in data]
    else:
        raise InputError(f"{path}: expected an fh report or a list of tables")
    for e in entries:
        t = table_from_json(e)
        out[t.degree] = t
    return out


def cmd_bound(args: argparse.Namespace) -> Report:
    rep = Report("bound", {"n": args.n, "p": args.p, "fillrad": args.fillrad, "tables": args.tables})
    tables = {}
    if args.tables:
        rep.add_input(args.tables)
        tables = _load_tables(args.tables)
    tb = waist_bounds(args.n, args.p, args.fillrad, tables)
    rep.results.update({
        "k": tb.k,
        "k_enumerated": tb.k_enumerated,
        "prefactor": tb.prefactor,
        "composition": tb.composition,
        "waist_bound": tb.waist_bound,
        "waist_bound_times_k": tb.waist_bound_times_k,
        "improved_bound": tb.improved_bound,
        "partial": tb.partial,
        "notes": tb.notes,
    })
    rep.audit("face_count", "k = 2^(n-p+1) C(n+1,p) = enumerated p-faces", tb.k, tb.k_enumerated, tb.face_count_ok)
    return rep


def cmd_starfish(args: argparse.Namespace) -> Report:
    rep = Report("starfish", {"L": args.L, "r": args.r, "m": args.m})
    sf = make_starfish(args.L, args.r, args.m)
    tri = sf.tripod
    theta = theta_graph_check(tri.center)
    ray_simple = all(f.is_simple_loop for ray in tri.rays.values() for f in ray if f.edges)
    hx = hexapodize(sf)
    proxy = hx.continuity_proxy()
    rep.results.update({
        "surface": {"vertices": len(sf.vertices), "edges": len(sf.edges), "filling_cubes": len(sf.filling.P.charts)},
        "tripod": {"max_length": tri.max_length, "max_ray_length": tri.max_ray_length, "theta": theta},
        "hexapod": {"max_length": hx.max_length, "ratio": hx.ratio, "digons": len(hx.digons()), "proxy": proxy},
    })
    rep.audit("theta_graph", "center fiber is a theta graph", None, None, bool(theta["is_theta"]))
    rep.audit("ray_loops", "ray fibers are simple loops", None, None, ray_simple)
    rep.audit("hexapod_cycles", "every hexapod fiber is a 1-cycle", None, None, all(f.is_cycle for f in hx.fibers()))
    rep.audit("hexapod_length", "max hexapod fiber <= 2 x tripod max (5%)", hx.max_length,
              tri.max_length * 2, float(hx.max_length) <= 2 * float(tri.max_length) * 1.05)
    rep.audit("continuity_proxy", "symmetric difference <= 2 x max loop length", proxy["max_symmetric_difference"],
              proxy["bound"], bool(proxy["holds"]))
    if not args.skip_fillrad:
        est = fillrad_estimate_adaptive(sf.metric, 2)
        ar = inequality_audit(sf.metric, sf.sweep_summary(), est.value, args.tolerance, degree=2)
        rep.results["fillrad_estimate"] = est.value
        _audit_clauses(rep, ar)
    if args.export_fibers is not None:
        pts = [tuple(float(sf.h * x) for x in p) for p in sf.vertices]
        records = []
        for f in hx.fibers():
            records.append((f.label, [(pts[a], pts[b]) for a, b in f.edges]))
        export_geometry(records, args.export_fibers)
    return rep


def _audit_clauses(rep: Report, ar: Any) -> None:
    for c in ar.clauses:
        rep.audit(c.name, c.inequality, c.lhs, c.rhs, c.passed, c.note)


def cmd_audit(args: argparse.Namespace) -> Report:
    rep = Report("audit", {"metric": args.metric, "bundle": args.bundle, "sweep": args.sweep,
                           "tolerance": args.tolerance})
    rep.add_input(args.metric)
    space = metric_from_json(load_json(args.metric))
    deg = args.degree if args.degree is not None else space.degree
    if deg is None:
        raise InputError("no degree: pass --degree or set 'degree' in the metric file")
    summary: SweepSummary | None = None
    if args.bundle:
        rep.add_input(args.bundle)
        data = load_json(args.bundle)
        res = data.get("results", data)
        try:
            summary = SweepSummary(_value(res["w_upper"]), _value(res["uw_upper"]), args.bundle)
        except KeyError as exc:
            raise InputError(f"{args.bundle}: missing {exc.args[0]!r} (expected a sweep report)") from exc
    elif args.sweep == "circle":
        summary = circle_sweep(space)
    elif args.sweep == "sphere":
        summary = round_sphere_latitude_sweep()
    est = fillrad_estimate_adaptive(space, deg) if args.adaptive else fillrad_estimate(space, deg)
    ar = inequality_audit(space, summary, est.value, args.tolerance, degree=deg)
    rep.results["fillrad_estimate"] = est.value
    rep.results["diameter"] = space.diameter
    rep.results["reference_diameter"] = space.reference_diameter
    _audit_clauses(rep, ar)
    return rep


COMMANDS: dict[str, Callable[[argparse.Namespace], Report]] = {
    "decompose": cmd_decompose,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
    "fillrad": cmd_fillrad,
    "fh": cmd_fh,
    "bound": cmd_bound,
    "starfish": cmd_starfish,
    "audit": cmd_audit,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sweepout-forge", description="Cubical sweepouts, filling radius and filling functions.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--report", help="write the JSON report here instead of stdout")

    p = sub.add_parser("decompose", help="build the cube decomposition and its fibers")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--epsilon", type=_rat_arg, default=Fraction(1, 2))
    p.add_argument("--out", "--report", dest="report", help="write the JSON report here instead of stdout")
    p.add_argument("--export-fibers")
    p.add_argument("--complex-out", help="write Y as complex.json")

    p = sub.add_parser("validate", help="pseudomanifold check of a complex or of Y")
    common(p)
    p.add_argument("--complex")
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--epsilon", type=_rat_arg, default=Fraction(1, 2))

    p = sub.add_parser("sweep", help="build the sweepout bundle of a filling")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--export-fibers")
    p.add_argument("--strict", action="store_true", help="require at most one boundary face per top cell")
    p.add_argument("--sample", type=_point_arg, help="generic Delta point, comma separated")

    p = sub.add_parser("fillrad", help="filling radius estimate of a finite metric space")
    common(p)
    p.add_argument("--metric", required=True)
    p.add_argument("--degree", type=int)
    p.add_argument("--max-threshold", type=_rat_arg)
    p.add_argument("--adaptive", action="store_true")

    p = sub.add_parser("fh", help="homological filling function table")
    common(p)
    p.add_argument("--complex", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--mode", choices=("auto", "exhaustive", "sampled"), default="auto")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("bound", help="evaluate the waist lower bound and its improved form")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--fillrad", type=_rat_arg, required=True)
    p.add_argument("--tables")

    p = sub.add_parser("starfish", help="starfish sphere, tripod sweepout and hexapod")
    common(p)
    p.add_argument("--L", type=_rat_arg, default=Fraction(1))
    p.add_argument("--r", type=_rat_arg, default=Fraction(1, 2))
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--skip-fillrad", action="store_true")
    p.add_argument("--export-fibers")

    p = sub.add_parser("audit", help="filling radius inequality audit")
    common(p)
    p.add_argument("--metric", required=True)
    p.add_argument("--bundle", help="sweep report providing w_upper and uw_upper")
    p.add_argument("--sweep", choices=("circle", "sphere"))
    p.add_argument("--degree", type=int)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--adaptive", action="store_true")
    return ap


INPUT_ERRORS = (InputError, LatticeError, MetricError, HomologyError, SweepoutError, FillingError, StarfishError)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _threads()
        report = COMMANDS[args.command](args)
        _emit(report, args.report)
    except SubdivisionRequired as exc:
        print(f"error: subdivision required: {exc}", file=sys.stderr)
        return 1
    except INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if not report.passed:
        failed = [a["name"] for a in report.audits if a["passed"] is False]
        print(f"audit failed: {', '.join(failed)}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
