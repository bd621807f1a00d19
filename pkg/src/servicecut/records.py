"""Parsing of call-relationship logs, performance logs, and type catalogs.

Call log: CSV with columns
    caller_method,callee_method,caller_class,callee_class,caller_params,callee_params
where a params field is a ``;``-separated list of type names, each with an
optional ``[]`` suffix per array rank. Empty field means no params. Lines
starting with ``#`` are comments.

Perf log: CSV with columns ``class_id,cpu_time_ms,retained_bytes``.

Type catalog: an indented tree format, see :func:`parse_type_catalog`.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

_NAME_RE = re.compile(r"[A-Za-z_$][A-Za-z0-9_$.]*")

#: Primitive JVM types and their scalar sizes in bytes. A boolean declared
#: alone occupies 4 bytes; inside an array each element occupies 1 byte.
PRIMITIVE_SIZES = {
    "byte": 1,
    "short": 2,
    "int": 4,
    "long": 8,
    "char": 2,
    "float": 4,
    "double": 8,
    "boolean": 4,
}

BOOLEAN_ARRAY_ELEMENT_SIZE = 1


class LogParseError(ValueError):
    """Malformed log or catalog input; carries the file path and line number."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        prefix = ""
        if self.path is not None:
            prefix = f"{self.path}:"
            if line is not None:
                prefix += f"{line}:"
            prefix += " "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class TypeRef:
    """A type name plus array rank (0 = scalar)."""

    name: str
    array_rank: int = 0

    def __post_init__(self):
        if not self.name:
            raise ValueError("type name must be non-empty")
        if self.array_rank < 0:
            raise ValueError("array_rank must be >= 0")

    def __str__(self) -> str:
        return self.name + "[]" * self.array_rank

    @classmethod
    def parse(cls, token: str) -> "TypeRef":
        token = token.strip()
        rank = 0
        while token.endswith("[]"):
            token = token[:-2]
            rank += 1
        if not _NAME_RE.fullmatch(token):
            raise ValueError(f"invalid type name {token!r}")
        return cls(token, rank)


@dataclass(frozen=True)
class CallRecord:
    """One line of the call-relationship log."""

    caller_method: str
    callee_method: str
    caller_class: str
    callee_class: str
    caller_params: tuple[TypeRef, ...]
    callee_params: tuple[TypeRef, ...]

    @property
    def caller(self) -> str:
        """Globally unique qualified caller id."""
        return f"{self.caller_class}::{self.caller_method}"

    @property
    def callee(self) -> str:
        return f"{self.callee_class}::{self.callee_method}"

    @property
    def is_self_call(self) -> bool:
        return self.caller == self.callee


@dataclass(frozen=True)
class PerfRecord:
    """One line of the performance log: per-class CPU time and retained memory."""

    class_id: str
    cpu_time: float  # milliseconds
    retained_bytes: float


# --- type catalog -----------------------------------------------------------


@dataclass(frozen=True)
class PrimitiveLayout:
    kind: str


@dataclass(frozen=True)
class ObjectLayout:
    fields: tuple[TypeRef, ...]


@dataclass(frozen=True)
class OpaqueLayout:
    size_bytes: int


TypeLayout = PrimitiveLayout | ObjectLayout | OpaqueLayout


@dataclass
class TypeCatalog:
    """Declared type layouts; the eight JVM primitives are always present."""

    layouts: dict[str, TypeLayout] = field(default_factory=dict)

    def __post_init__(self):
        for kind in PRIMITIVE_SIZES:
            self.layouts.setdefault(kind, PrimitiveLayout(kind))

    def lookup(self, name: str) -> TypeLayout | None:
        return self.layouts.get(name)

    def declare(self, name: str, layout: TypeLayout) -> None:
        if name in PRIMITIVE_SIZES:
            raise LogParseError(f"cannot redefine primitive type {name!r}")
        self.layouts[name] = layout

    @classmethod
    def default(cls) -> "TypeCatalog":
        return cls()


# --- parsing ----------------------------------------------------------------

_CALL_COLUMNS = 6
_PERF_COLUMNS = 3


def _parse_params(text: str, path, lineno) -> tuple[TypeRef, ...]:
    text = text.strip()
    if not text:
        return ()
    refs = []
    for token in text.split(";"):
        try:
            refs.append(TypeRef.parse(token))
        except ValueError as exc:
            raise LogParseError(str(exc), path, lineno) from exc
    return tuple(refs)


def _iter_csv_lines(path: str | Path):
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped or stripped.startswith("#"):
                continue
            (row,) = csv.reader(io.StringIO(raw))
            yield lineno, row


def parse_call_log(path: str | Path) -> list[CallRecord]:
    """Parse a call-relationship log. Duplicate lines are preserved; their
    multiplicity matters when edge weights are aggregated."""
    records = []
    for lineno, row in _iter_csv_lines(path):
        if len(row) != _CALL_COLUMNS:
            raise LogParseError(
                f"expected {_CALL_COLUMNS} columns, got {len(row)}", path, lineno
            )
        m_caller, m_callee, c_caller, c_callee = (f.strip() for f in row[:4])
        for label, value in (
            ("caller_method", m_caller),
            ("callee_method", m_callee),
            ("caller_class", c_caller),
            ("callee_class", c_callee),
        ):
            if not value:
                raise LogParseError(f"empty {label}", path, lineno)
        records.append(
            CallRecord(
                caller_method=m_caller,
                callee_method=m_callee,
                caller_class=c_caller,
                callee_class=c_callee,
                caller_params=_parse_params(row[4], path, lineno),
                callee_params=_parse_params(row[5], path, lineno),
            )
        )
    return records


def parse_perf_log(path: str | Path) -> list[PerfRecord]:
    """Parse a performance log. Classes absent from the file are treated as
    having zero CPU time and zero retained memory downstream."""
    records = []
    seen: set[str] = set()
    for lineno, row in _iter_csv_lines(path):
        if len(row) != _PERF_COLUMNS:
            raise LogParseError(
                f"expected {_PERF_COLUMNS} columns, got {len(row)}", path, lineno
            )
        class_id = row[0].strip()
        if not class_id:
            raise LogParseError("empty class_id", path, lineno)
        if class_id in seen:
            raise LogParseError(f"duplicate class_id {class_id!r}", path, lineno)
        seen.add(class_id)
        try:
            cpu = float(row[1])
            retained = float(row[2])
        except ValueError as exc:
            raise LogParseError(f"non-numeric field: {exc}", path, lineno) from exc
        if not math.isfinite(cpu) or not math.isfinite(retained):
            raise LogParseError("non-finite cpu_time or retained_bytes", path, lineno)
        if cpu < 0:
            raise LogParseError(f"negative cpu_time at line {lineno}", path, lineno)
        if retained < 0:
            raise LogParseError(f"negative retained_bytes at line {lineno}", path, lineno)
        records.append(PerfRecord(class_id, cpu, retained))
    return records


def parse_type_catalog(path: str | Path | None) -> TypeCatalog:
    """Parse a type catalog file.

    Grammar (indentation-sensitive, ``#`` comments)::

        Account: object
            long
            int
            String[]
        Blob: opaque 128

    A top-level line declares a type as ``object`` or ``opaque N``; the
    indented lines under an object declaration list its field types, one
    TypeRef per line. Cyclic object definitions are accepted (the cost model
    bounds recursion). ``path=None`` yields the primitives-only catalog.
    """
    catalog = TypeCatalog.default()
    if path is None:
        return catalog
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()

    current_fields: list[TypeRef] | None = None
    current_name: str | None = None

    def flush():
        nonlocal current_fields, current_name
        if current_name is not None:
            catalog.declare(current_name, ObjectLayout(tuple(current_fields or ())))
        current_name, current_fields = None, None

    for lineno, raw in enumerate(lines, start=1):
        stripped = raw.split("#", 1)[0].rstrip()
        if not stripped.strip():
            continue
        indented = stripped[0] in (" ", "\t")
        if indented:
            if current_name is None:
                raise LogParseError("indented field outside an object declaration", path, lineno)
            try:
                current_fields.append(TypeRef.parse(stripped.strip()))
            except ValueError as exc:
                raise LogParseError(str(exc), path, lineno) from exc
            continue
        flush()
        if ":" not in stripped:
            raise LogParseError("expected 'Name: object' or 'Name: opaque N'", path, lineno)
        name, decl = (part.strip() for part in stripped.split(":", 1))
        if not _NAME_RE.fullmatch(name):
            raise LogParseError(f"invalid type name {name!r}", path, lineno)
        if name in PRIMITIVE_SIZES:
            raise LogParseError(f"cannot redefine primitive type {name!r}", path, lineno)
        if decl == "object":
            current_name, current_fields = name, []
        elif decl.startswith("opaque"):
            try:
                size = int(decl.split()[1])
            except (IndexError, ValueError) as exc:
                raise LogParseError("opaque declaration needs an integer size", path, lineno) from exc
            if size < 0:
                raise LogParseError("opaque size must be >= 0", path, lineno)
            catalog.declare(name, OpaqueLayout(size))
        else:
            raise LogParseError(f"unknown layout kind {decl!r}", path, lineno)
    flush()
    return catalog


# --- serialization (round-trip support, used by the synthetic generator) ----


def format_params(params: tuple[TypeRef, ...]) -> str:
    return ";".join(str(p) for p in params)


def write_call_log(records: list[CallRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for r in records:
            writer.writerow(
                [
                    r.caller_method,
                    r.callee_method,
                    r.caller_class,
                    r.callee_class,
                    format_params(r.caller_params),
                    format_params(r.callee_params),
                ]
            )


def write_perf_log(records: list[PerfRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for r in records:
            writer.writerow([r.class_id, repr(r.cpu_time), repr(r.retained_bytes)])
