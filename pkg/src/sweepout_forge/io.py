"""JSON input formats and report serialization.

Rationals are written as "p/q" strings; floats with 12 significant digits;
infinity as the string "inf".
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

from .filling import ChainWeighting
from .fillrad import FiniteMetricSpace, MetricError
from .homology import ChainComplex
from .lattice import (
    AxisGrid,
    Chart,
    CubicalCell,
    GluedComplex,
    LatticeError,
    check_epsilon,
    cube_box,
    glue,
    rational,
)
from .sweepout import FillingInput, make_filling

SCHEMA = "report.v1"


class InputError(ValueError):
    pass


# -- serialization -----------------------------------------------------------------------------


def fmt_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def fmt_real(x: float) -> object:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(f"{x:.12g}")


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, Fraction):
        return fmt_rational(obj)
    if isinstance(obj, float):
        return fmt_real(obj)
    if isinstance(obj, CubicalCell):
        return {"chart": obj.chart, "cell": [[fmt_rational(a), fmt_rational(b)] for a, b in obj.intervals]}
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj) if not f.name.startswith("_")}
    if isinstance(obj, Mapping):
        return {(k if isinstance(k, str) else json.dumps(to_jsonable(k))): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = [to_jsonable(v) for v in obj]
        if isinstance(obj, (set, frozenset)):
            items.sort(key=lambda v: json.dumps(v, sort_keys=True))
        return items
    return repr(obj)


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2)


def digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# -- parsing ---------------------------------------------------------------------------------


def load_json(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {p}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc


def _check_schema(data: Mapping[str, Any], kind: str) -> None:
    schema = data.get("schema")
    if schema is not None and schema != kind:
        raise InputError(f"schema mismatch: expected {kind!r}, got {schema!r}")


def _rat(v: object, where: str) -> Fraction:
    try:
        return rational(v)
    except LatticeError as exc:
        raise InputError(f"{where}: {exc}") from exc


def _box(raw: Any, where: str) -> tuple[tuple[Fraction, Fraction], ...]:
    try:
        return tuple((_rat(a, where), _rat(b, where)) for a, b in raw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{where}: a cell is a list of [lo, hi] pairs") from exc


def chart_from_json(raw: Mapping[str, Any], dim: int, where: str) -> Chart:
    grid = AxisGrid(tuple(_rat(v, where) for v in raw["grid"])) if "grid" in raw else None
    placement: dict[str, Any] = {}
    if "origin" in raw:
        placement["origin"] = tuple(_rat(v, where) for v in raw["origin"])
    if "scale" in raw:
        placement["scale"] = _rat(raw["scale"], where)
    if "cells" in raw:
        cells = frozenset(_box(c, where) for c in raw["cells"])
        return Chart(dim, grid or AxisGrid.coarse(), cells, **placement)
    if "top_cells" in raw:
        return Chart.from_top_cells(dim, grid or AxisGrid.coarse(), [_box(c, where) for c in raw["top_cells"]], **placement)
    return Chart.cube(dim, grid, **placement)


def complex_from_json(data: Mapping[str, Any]) -> GluedComplex:
    _check_schema(data, "complex.v1")
    try:
        dim = int(data["dimension"])
        eps = check_epsilon(data.get("epsilon", "1/2"))
        charts = [chart_from_json(c, dim, f"charts[{i}]") for i, c in enumerate(data.get("charts", [{}]))]
        return glue(charts, data.get("identifications", []), eps)
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r}") from exc
    except LatticeError as exc:
        raise InputError(str(exc)) from exc


def complex_to_json(gc: GluedComplex) -> dict[str, Any]:
    charts = []
    for c in gc.charts:
        entry: dict[str, Any] = {
            "grid": [fmt_rational(v) for v in c.grid.breakpoints],
            "cells": [[[fmt_rational(a), fmt_rational(b)] for a, b in box] for box in sorted(c.cells)],
        }
        if c.origin is not None:
            entry["origin"] = [fmt_rational(v) for v in c.origin]
        if c.scale is not None:
            entry["scale"] = fmt_rational(c.scale)
        charts.append(entry)
    idents = [
        {
            "a": [i.a, 2 * i.facet_a[0] + (1 if i.facet_a[1] > 0 else 0)],
            "b": [i.b, 2 * i.facet_b[0] + (1 if i.facet_b[1] > 0 else 0)],
            "perm": list(i.perm),
            "signs": list(i.signs),
        }
        for i in gc.identifications
    ]
    return {
        "schema": "complex.v1",
        "dimension": gc.charts[0].dim,
        "epsilon": fmt_rational(gc.epsilon),
        "charts": charts,
        "identifications": idents,
    }


def metric_from_json(data: Mapping[str, Any]) -> FiniteMetricSpace:
    _check_schema(data, "space.v1")
    raw = data.get("distances")
    if raw is None and isinstance(data.get("metric"), Mapping):
        return metric_from_json(data["metric"])
    if raw is None:
        raise InputError("missing field 'distances'")

    def num(v: object) -> Fraction | float:
        if isinstance(v, float):
            return v
        return _rat(v, "distances")

    try:
        D = [[num(v) for v in row] for row in raw]
        if "points" in data and int(data["points"]) != len(D):
            raise InputError(f"'points' is {data['points']} but the matrix has {len(D)} rows")
        vol = data.get("volume")
        volume = None if vol is None else num(vol)
        deg = data.get("degree")
        md = data.get("model_diameter")
        return FiniteMetricSpace(
            D, volume, None if deg is None else int(deg), str(data.get("name", "")),
            model_diameter=None if md is None else num(md),
        )
    except MetricError as exc:
        raise InputError(f"invalid metric: {exc}") from exc


def metric_to_json(space: FiniteMetricSpace) -> dict[str, Any]:
    return to_jsonable(
        {
            "schema": "space.v1",
            "distances": space.distances,
            "volume": space.volume,
            "degree": space.degree,
            "name": space.name,
            "model_diameter": space.model_diameter,
        }
    )


def filling_from_json(data: Mapping[str, Any]) -> FillingInput:
    P = complex_from_json(data)
    if "metric" not in data:
        raise InputError("missing field 'metric'")
    metric = metric_from_json(data["metric"])
    raw = data.get("vertex_images")
    if raw is None:
        raise InputError("missing field 'vertex_images'")
    images: dict[tuple[int, tuple[Fraction, ...]], int] = {}
    if isinstance(raw, Mapping):
        for key, idx in raw.items():
            chart, _, coords = key.partition(":")
            images[(int(chart), tuple(_rat(v, "vertex_images") for v in coords.split(",")))] = int(idx)
    else:
        for entry in raw:
            images[(int(entry["chart"]), tuple(_rat(v, "vertex_images") for v in entry["point"]))] = int(entry["image"])
    try:
        return make_filling(P, metric, images, data.get("nu", 0), str(data.get("name", "")))
    except (LatticeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def filling_to_json(inp: FillingInput) -> dict[str, Any]:
    out = complex_to_json(inp.P)
    out["schema"] = "complex.v1"
    out["metric"] = metric_to_json(inp.metric)
    out["vertex_images"] = [
        {"chart": v.chart, "point": [fmt_rational(a) for a, _ in v.intervals], "image": idx}
        for v, idx in sorted(inp.vertex_images.items())
    ]
    out["nu"] = fmt_rational(inp.nu)
    return out


def _cell_key(raw: Any) -> Any:
    return tuple(raw) if isinstance(raw, list) else raw


def ambient_from_json(data: Mapping[str, Any]) -> tuple[ChainComplex, ChainWeighting]:
    """Simplicial ({"simplices": [...]}) or cubical (complex.json) ambient plus weights."""
    if "simplices" in data:
        cx = ChainComplex.from_simplices([tuple(s) for s in data["simplices"]])
    else:
        cx = ChainComplex.from_glued(complex_from_json(data))
    weights: dict[int, dict[Any, Any]] = {}
    for k, entries in (data.get("weights") or {}).items():
        table = {}
        for cell, w in entries:
            table[_cell_key(cell)] = _rat(w, "weights")
        weights[int(k)] = table
    try:
        return cx, ChainWeighting(weights)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def single_cube_json(dim: int) -> dict[str, Any]:
    return {"schema": "complex.v1", "dimension": dim, "epsilon": "1/2", "charts": [{}], "identifications": []}


def cube_cell(dim: int) -> CubicalCell:
    return CubicalCell(0, cube_box(dim))


def cube_filling_json(dim: int) -> dict[str, Any]:
    """The cube [-1,1]^dim filling its boundary, corners under the Hamming metric."""
    corners = list(itertools.product((-1, 1), repeat=dim))
    D = [[sum(a != b for a, b in zip(u, v)) for v in corners] for u in corners]
    out = single_cube_json(dim)
    out["metric"] = {"schema": "space.v1", "distances": D, "name": f"hamming{dim}"}
    out["vertex_images"] = [{"chart": 0, "point": list(c), "image": i} for i, c in enumerate(corners)]
    return out


def prism_filling_json(dim: int, cubes: int = 2) -> dict[str, Any]:
    """``cubes`` unit cubes in a row along axis 0, corners under the Hamming metric.

    Chart j sits at origin (j, 0, ...); its +x0 facet is glued to the -x0 facet of chart j+1.
    """
    world = sorted(set(itertools.product(range(cubes + 1), *[(0, 1)] * (dim - 1))))
    index = {w: i for i, w in enumerate(world)}
    D = [[sum(abs(a - b) for a, b in zip(u, v)) for v in world] for u in world]
    charts, images, idents = [], [], []
    for j in range(cubes):
        charts.append({"origin": [j] + [0] * (dim - 1), "scale": 1})
        for c in itertools.product((-1, 1), repeat=dim):
            w = (j + (c[0] + 1) // 2,) + tuple((x + 1) // 2 for x in c[1:])
            images.append({"chart": j, "point": list(c), "image": index[w]})
        if j + 1 < cubes:
            idents.append({"a": [j, 1], "b": [j + 1, 0], "perm": list(range(dim)), "signs": [-1] + [1] * (dim - 1)})
    return {
        "schema": "complex.v1",
        "dimension": dim,
        "epsilon": "1/2",
        "charts": charts,
        "identifications": idents,
        "metric": {"schema": "space.v1", "distances": D, "name": f"prism{dim}x{cubes}"},
        "vertex_images": images,
    }


# -- geometry export ----------------------------------------------------------------------------


def write_off(path: Path, vertices: list[tuple[float, ...]], faces: list[list[int]]) -> None:
    """OFF file; 3D coordinates (padded or truncated), edges as 2-vertex faces."""
    lines = ["OFF", f"{len(vertices)} {len(faces)} 0"]
    for v in vertices:
        xyz = list(v[:3]) + [0.0] * (3 - len(v[:3]))
        lines.append(" ".join(f"{float(x):.12g}" for x in xyz))
    for f in faces:
        lines.append(" ".join([str(len(f))] + [str(i) for i in f]))
    path.write_text("\n".join(lines) + "\n")


def segments_to_off(segments: list[tuple[tuple[float, ...], tuple[float, ...]]]) -> tuple[list, list]:
    index: dict[tuple, int] = {}
    verts: list[tuple[float, ...]] = []
    faces = []
    for a, b in segments:
        ids = []
        for p in (a, b):
            key = tuple(p)
            if key not in index:
                index[key] = len(verts)
                verts.append(key)
            ids.append(index[key])
        faces.append(ids)
    return verts, faces


def export_geometry(records: list[tuple[str, list]], directory: str | Path) -> list[Path]:
    """One OFF file per (name, segments) record; segments are point pairs.

    Names are sorted and zero-padded indices keep filenames stable.
    """
    d = Path(directory)
    try:
        d.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create {d}: {exc.strerror}") from exc
    out = []
    width = max(3, len(str(len(records))))
    for i, (name, segs) in enumerate(sorted(records, key=lambda r: r[0])):
        verts, faces = segments_to_off(segs)
        path = d / f"{i:0{width}d}_{_safe(name)}.off"
        try:
            write_off(path, verts, faces)
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc.strerror}") from exc
        out.append(path)
    return out


def _safe(name: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in name)[:80]
