"""Notebook documents: parsing, markdown insertion, serialization.

Only nbformat major version 4 is supported. Documents are immutable
values; every operation returns a new document. Unrecognized fields and
metadata are carried through verbatim so that parse -> serialize round
trips are structurally lossless.
"""

from __future__ import annotations

import copy
import json
import uuid
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Optional


class NotebookError(Exception):
    pass


class MalformedNotebook(NotebookError):
    pass


class UnsupportedVersion(NotebookError):
    pass


class UnknownCell(NotebookError):
    pass


class AnchorNotCode(NotebookError):
    pass


class CellKind(Enum):
    CODE = "code"
    MARKDOWN = "markdown"


class OutputKind(Enum):
    TABLE = "table"
    TEXT = "text"
    IMAGE = "image"
    ERROR = "error"
    NONE = "none"


class Placement(Enum):
    ABOVE = "above"
    BELOW = "below"


@dataclass(frozen=True)
class CellOutput:
    kind: OutputKind
    mime_hint: str = ""


@dataclass(frozen=True)
class Cell:
    id: str
    kind: CellKind
    source: str
    outputs: tuple[CellOutput, ...] = ()
    metadata: dict = field(default_factory=dict)
    # raw output records and any unrecognized cell keys, kept for round trips
    raw_outputs: tuple = ()
    extra: dict = field(default_factory=dict)

    @property
    def provenance(self) -> Optional[str]:
        tag = self.metadata.get("nbdoc", {}).get("provenance")
        return tag if tag in ("T", "C", "H") else None

    def with_provenance(self, tag: str) -> "Cell":
        meta = copy.deepcopy(self.metadata)
        meta.setdefault("nbdoc", {})["provenance"] = tag
        return replace(self, metadata=meta)


@dataclass(frozen=True)
class NotebookDocument:
    cells: tuple[Cell, ...]
    format_version: tuple[int, int] = (4, 5)
    metadata: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def cell_index(self, cell_id: str) -> int:
        for i, cell in enumerate(self.cells):
            if cell.id == cell_id:
                return i
        raise UnknownCell(cell_id)


_CELL_KEYS = {"cell_type", "source", "metadata", "outputs", "id"}
_DOC_KEYS = {"cells", "metadata", "nbformat", "nbformat_minor"}


def _join_source(source: Any) -> str:
    if isinstance(source, str):
        return source
    if isinstance(source, list):
        return "".join(source)
    raise MalformedNotebook("cell source must be a string or list of strings")


def classify_output(record: dict) -> CellOutput:
    """Map one raw nbformat output record to its coarse kind via mime type."""
    otype = record.get("output_type")
    if otype == "error":
        return CellOutput(OutputKind.ERROR, "error")
    if otype == "stream":
        return CellOutput(OutputKind.TEXT, "stream")
    data = record.get("data", {})
    if "text/html" in data:
        return CellOutput(OutputKind.TABLE, "text/html")
    for mime in data:
        if mime.startswith("image/"):
            return CellOutput(OutputKind.IMAGE, mime)
    return CellOutput(OutputKind.TEXT, next(iter(data), "text/plain"))


def _parse_cell(record: Any, index: int) -> Cell:
    if not isinstance(record, dict):
        raise MalformedNotebook("cell record must be an object")
    cell_type = record.get("cell_type")
    if cell_type == "code":
        kind = CellKind.CODE
    elif cell_type == "markdown":
        kind = CellKind.MARKDOWN
    else:
        raise MalformedNotebook(f"unsupported cell type: {cell_type!r}")
    raw_outputs = tuple(record.get("outputs", ())) if kind is CellKind.CODE else ()
    outputs = tuple(classify_output(o) for o in raw_outputs)
    extra = {k: v for k, v in record.items() if k not in _CELL_KEYS}
    return Cell(
        id=str(record.get("id", f"cell-{index}")),
        kind=kind,
        source=_join_source(record.get("source", "")),
        outputs=outputs,
        metadata=record.get("metadata", {}),
        raw_outputs=raw_outputs,
        extra=extra,
    )


def parse_notebook(data: bytes | str) -> NotebookDocument:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedNotebook(str(exc)) from exc
    if not isinstance(obj, dict) or not isinstance(obj.get("cells"), list):
        raise MalformedNotebook("missing cells array")
    major = obj.get("nbformat")
    if major != 4:
        raise UnsupportedVersion(f"nbformat {major} not supported (need 4)")
    minor = int(obj.get("nbformat_minor", 0))
    cells = tuple(_parse_cell(c, i) for i, c in enumerate(obj["cells"]))
    seen: set[str] = set()
    for cell in cells:
        if cell.id in seen:
            raise MalformedNotebook(f"duplicate cell id: {cell.id}")
        seen.add(cell.id)
    extra = {k: v for k, v in obj.items() if k not in _DOC_KEYS}
    return NotebookDocument(
        cells=cells,
        format_version=(major, minor),
        metadata=obj.get("metadata", {}),
        extra=extra,
    )


def fresh_cell_id() -> str:
    return f"md-{uuid.uuid4().hex[:12]}"


def insert_markdown(
    doc: NotebookDocument,
    anchor_cell_id: str,
    text: str,
    placement: Placement,
) -> NotebookDocument:
    """Insert a new markdown cell directly above or below the anchor cell."""
    index = doc.cell_index(anchor_cell_id)
    if doc.cells[index].kind is not CellKind.CODE:
        raise AnchorNotCode(anchor_cell_id)
    new_cell = Cell(id=fresh_cell_id(), kind=CellKind.MARKDOWN, source=text)
    at = index if placement is Placement.ABOVE else index + 1
    return replace(doc, cells=doc.cells[:at] + (new_cell,) + doc.cells[at:])


def _cell_to_json(cell: Cell) -> dict:
    record = dict(cell.extra)
    record["cell_type"] = cell.kind.value
    record["id"] = cell.id
    record["metadata"] = cell.metadata
    record["source"] = cell.source
    if cell.kind is CellKind.CODE:
        record["outputs"] = list(cell.raw_outputs)
        record.setdefault("execution_count", None)
    return record


def serialize_notebook(doc: NotebookDocument) -> bytes:
    obj = dict(doc.extra)
    obj["cells"] = [_cell_to_json(c) for c in doc.cells]
    obj["metadata"] = doc.metadata
    obj["nbformat"] = doc.format_version[0]
    obj["nbformat_minor"] = doc.format_version[1]
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False).encode("utf-8")
