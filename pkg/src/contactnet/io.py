"""Dataset ingestion and report persistence.

Vertex table columns: ``id,orientation,detection_mode,detection_date,
age_at_detection,region,declared_partners``; only ``id`` is mandatory.
Edge table columns: ``src,dst[,named_by]``.  Empty cells are missing values.
"""

from __future__ import annotations

import csv
import datetime as dt
import io as _io
import json
import logging
import math
import os
import tempfile
from typing import IO, Any, Iterable

from .errors import (
    DanglingEndpoint, DuplicateEdge, DuplicateVertexId, IoFailure, MalformedRow, SelfLoop,
)
from .graph import ContactGraph
from .records import DetectionMode, NamedBy, Orientation, VertexRecord

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
VERTEX_COLUMNS = (
    "id",
    "orientation",
    "detection_mode",
    "detection_date",
    "age_at_detection",
    "region",
    "declared_partners",
)
EDGE_COLUMNS = ("src", "dst", "named_by")
NONFINITE_SUFFIX = "__nonfinite"


def _enum(kind, text: str, row: int, column: str):
    text = text.strip()
    if not text:
        return kind("U")
    try:
        return kind(text.upper())
    except ValueError:
        log.warning("row %d: unknown %s label %r, using U", row, column, text)
        return kind("U")


def _count(text: str, row: int, column: str) -> int | None:
    text = text.strip()
    if not text:
        return None
    try:
        value = int(text)
    except ValueError:
        raise MalformedRow(f"{column} is not an integer: {text!r}", row) from None
    if value < 0:
        raise MalformedRow(f"{column} is negative: {value}", row)
    return value


def _date(text: str, row: int) -> dt.date | None:
    text = text.strip()
    if not text:
        return None
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise MalformedRow(f"detection_date is not YYYY-MM-DD: {text!r}", row) from None


def _rows(stream: IO[str], required: tuple[str, ...], known: tuple[str, ...]):
    reader = csv.reader(stream)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise MalformedRow("missing header row", 1) from None
    missing = [c for c in required if c not in header]
    if missing:
        raise MalformedRow(f"header lacks column(s) {missing}", 1)
    unknown = [c for c in header if c not in known]
    if unknown:
        raise MalformedRow(f"unexpected column(s) {unknown}", 1)
    for lineno, cells in enumerate(reader, start=2):
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise MalformedRow(f"expected {len(header)} cells, found {len(cells)}", lineno)
        yield lineno, dict(zip(header, cells)), header


def read_vertices(stream: IO[str]) -> tuple[list[VertexRecord], list[int]]:
    """Parse the vertex table; returns records and their file line numbers."""
    out, rows = [], []
    for row, rec, _ in _rows(stream, ("id",), VERTEX_COLUMNS):
        rows.append(row)
        vid = rec["id"].strip()
        if not vid:
            raise MalformedRow("empty vertex id", row)
        region = rec.get("region", "").strip() or None
        out.append(VertexRecord(
            id=vid,
            orientation=_enum(Orientation, rec.get("orientation", ""), row, "orientation"),
            detection_mode=_enum(DetectionMode, rec.get("detection_mode", ""), row, "detection_mode"),
            detection_date=_date(rec.get("detection_date", ""), row),
            age_at_detection=_count(rec.get("age_at_detection", ""), row, "age_at_detection"),
            region=region,
            declared_partners=_count(rec.get("declared_partners", ""), row, "declared_partners"),
        ))
    return out, rows


def read_edges(stream: IO[str]) -> tuple[list[tuple[str, str]], list[NamedBy], list[int]]:
    pairs, named, rows = [], [], []
    for row, rec, _ in _rows(stream, ("src", "dst"), EDGE_COLUMNS):
        a, b = rec["src"].strip(), rec["dst"].strip()
        if not a or not b:
            raise MalformedRow("empty endpoint", row)
        pairs.append((a, b))
        named.append(_enum(NamedBy, rec.get("named_by", ""), row, "named_by"))
        rows.append(row)
    return pairs, named, rows


def load_dataset(vertex_table: IO[str], edge_table: IO[str]) -> ContactGraph:
    """Read and validate a vertex table and an edge table.

    Row-level errors carry the line number of the offending row in its file.
    """
    vertices, vrows = read_vertices(vertex_table)
    seen_ids: set[str] = set()
    for v, row in zip(vertices, vrows):
        if v.id in seen_ids:
            raise DuplicateVertexId(f"duplicate vertex id {v.id!r}", row)
        seen_ids.add(v.id)
    pairs, named, erows = read_edges(edge_table)
    seen_edges: set[frozenset] = set()
    for (a, b), row in zip(pairs, erows):
        if a == b:
            raise SelfLoop(f"self-loop on {a!r}", row)
        for end in (a, b):
            if end not in seen_ids:
                raise DanglingEndpoint(f"unknown endpoint {end!r}", row)
        key = frozenset((a, b))
        if key in seen_edges:
            raise DuplicateEdge(f"duplicate edge {a!r}-{b!r}", row)
        seen_edges.add(key)
    return ContactGraph.build(vertices, pairs, named)


def load_dataset_files(vertices_path: str | os.PathLike, edges_path: str | os.PathLike) -> ContactGraph:
    with open(vertices_path, encoding="utf-8", newline="") as fv, \
            open(edges_path, encoding="utf-8", newline="") as fe:
        return load_dataset(fv, fe)


def present_columns(vertices_path: str | os.PathLike) -> set[str]:
    with open(vertices_path, encoding="utf-8", newline="") as fh:
        header = next(csv.reader(fh), [])
    return {h.strip() for h in header}


def dump_dataset(g: ContactGraph) -> tuple[str, str]:
    """Serialize a graph back to (vertices.csv, edges.csv) text."""
    vbuf, ebuf = _io.StringIO(), _io.StringIO()
    vw = csv.writer(vbuf, lineterminator="\n")
    vw.writerow(VERTEX_COLUMNS)
    for v in g.vertices:
        vw.writerow([
            v.id, v.orientation.value, v.detection_mode.value,
            v.detection_date.isoformat() if v.detection_date else "",
            "" if v.age_at_detection is None else v.age_at_detection,
            v.region or "",
            "" if v.declared_partners is None else v.declared_partners,
        ])
    ew = csv.writer(ebuf, lineterminator="\n")
    ew.writerow(EDGE_COLUMNS)
    ids = g.ids
    named = g.named_by or (NamedBy.UNKNOWN,) * g.m
    for (a, b), nb in zip(g.edges, named):
        ew.writerow([ids[a], ids[b], nb.value])
    return vbuf.getvalue(), ebuf.getvalue()


# -- reports -----------------------------------------------------------------


def encode(obj: Any) -> Any:
    """JSON-safe copy of a report: non-finite floats become ``null`` with a
    sibling ``<key>__nonfinite`` flag holding ``"nan"``, ``"inf"`` or ``"-inf"``."""
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            k = str(k)
            if isinstance(v, float) and not math.isfinite(v):
                out[k] = None
                out[k + NONFINITE_SUFFIX] = repr(v)
            else:
                out[k] = encode(v)
        return out
    if isinstance(obj, (list, tuple)):
        # list entries cannot carry a sibling flag; wrap them
        return [{"value": None, "nonfinite": repr(v)} if isinstance(v, float) and not math.isfinite(v)
                else encode(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalar
        return encode(obj.item())
    if isinstance(obj, (dt.date,)):
        return obj.isoformat()
    return obj


def decode(obj: Any) -> Any:
    if isinstance(obj, dict):
        if set(obj) == {"value", "nonfinite"} and obj["value"] is None:
            return float(obj["nonfinite"])
        out = {}
        for k, v in obj.items():
            if k.endswith(NONFINITE_SUFFIX):
                continue
            flag = obj.get(k + NONFINITE_SUFFIX)
            out[k] = float(flag) if v is None and flag is not None else decode(v)
        return out
    if isinstance(obj, list):
        return [decode(v) for v in obj]
    return obj


def dumps_report(report: dict) -> str:
    body = dict(report)
    body.setdefault("schema_version", SCHEMA_VERSION)
    return json.dumps(encode(body), indent=2, allow_nan=False) + "\n"


def _atomic_write(path: str | os.PathLike, text: str) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def write_report(report: dict, path: str | os.PathLike) -> None:
    """Write a report as JSON, atomically (temp file + rename)."""
    _atomic_write(path, dumps_report(report))


def read_report(path: str | os.PathLike) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return decode(json.load(fh))
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def write_text(path: str | os.PathLike, text: str) -> None:
    _atomic_write(path, text)


def csv_text(header: Iterable[str], rows: Iterable[Iterable[Any]]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(header))
    for r in rows:
        w.writerow(["" if x is None else x for x in r])
    return buf.getvalue()
