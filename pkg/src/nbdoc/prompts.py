"""Prompt-based candidate generation: pick a fill-in-the-blank template
from the cell's output signature."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .corpus import DocCategory
from .notebook import CellOutput, OutputKind, Placement


class TemplateId(Enum):
    PROCESS = "Process"
    TABLE_RESULT = "TableResult"
    GENERIC_RESULT = "GenericResult"


@dataclass(frozen=True)
class PromptTemplate:
    id: TemplateId
    text: str
    placement: Placement
    category: DocCategory


PROCESS = PromptTemplate(
    TemplateId.PROCESS,
    "This code cell is for _ _ _ _ _",
    Placement.ABOVE,
    DocCategory.PROCESS,
)
TABLE_RESULT = PromptTemplate(
    TemplateId.TABLE_RESULT,
    "The table shows _ _ _ _ _",
    Placement.BELOW,
    DocCategory.RESULT,
)
GENERIC_RESULT = PromptTemplate(
    TemplateId.GENERIC_RESULT,
    "The result indicates that _ _ _ _ _",
    Placement.BELOW,
    DocCategory.RESULT,
)

TEMPLATES = (PROCESS, TABLE_RESULT, GENERIC_RESULT)


def prompt_candidate(output: Optional[CellOutput]) -> PromptTemplate:
    """Template for a cell given its (possibly absent) output record.
    Error outputs document intent, not the error, so they get Process."""
    if output is None or output.kind in (OutputKind.NONE, OutputKind.ERROR):
        return PROCESS
    if output.kind is OutputKind.TABLE:
        return TABLE_RESULT
    return GENERIC_RESULT


_TABLE_TAILS = ("head", "describe", "tail", "sample", "corr")
_TRAILING_EXPR = re.compile(r"^[\w\.\[\]'\"\s]*\.(\w+)\(.*\)\s*$")


def infer_output(source: str) -> Optional[CellOutput]:
    """Static stand-in for output detection on never-executed notebooks.

    Last statement a bare expression ending in a table-producing method ->
    Table; any other bare trailing expression or print -> Text; else no
    output. Documented as lossy.
    """
    lines = [l for l in source.splitlines() if l.strip() and not l.strip().startswith("#")]
    if not lines:
        return None
    last = lines[-1].strip()
    if "=" in last.split("(")[0] or last.startswith(("import ", "from ", "def ", "return", "for ", "if ")):
        return None
    match = _TRAILING_EXPR.match(last)
    if match and match.group(1) in _TABLE_TAILS:
        return CellOutput(OutputKind.TABLE, "inferred")
    if match or last.startswith("print("):
        return CellOutput(OutputKind.TEXT, "inferred")
    return None
