"""Query-based candidate generation: match code cells against a curated
API knowledge base and return the corresponding short descriptions."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional, Sequence

from .analysis.lexer import (
    KEYWORDS, LexError, NAME, NEWLINE, OP, Tok, clean_source, lex,
)


class KbError(Exception):
    pass


class MalformedRecord(KbError):
    pass


class DuplicateKey(KbError):
    pass


class MatchKind(Enum):
    CALL_NAME = "call"
    LIBRARY_IMPORT = "import"
    SLICE_SUBSCRIPT = "slice_subscript"
    # subscripting without a slice (column selection); needed to cover the
    # fixture notebooks' plain-indexing cells
    SELECT_SUBSCRIPT = "select_subscript"


@dataclass(frozen=True)
class MatchKey:
    kind: MatchKind
    value: str = ""


@dataclass(frozen=True)
class ApiEntry:
    library: str
    qualified_name: str
    match_key: MatchKey
    description: str


@dataclass(frozen=True)
class KnowledgeBase:
    entries: tuple[ApiEntry, ...]

    def __post_init__(self):
        index = {}
        for entry in self.entries:
            if entry.match_key in index:
                raise DuplicateKey(f"{entry.match_key.kind.value}:{entry.match_key.value}")
            index[entry.match_key] = entry
        object.__setattr__(self, "_index", index)

    def lookup(self, key: MatchKey) -> Optional[ApiEntry]:
        return self._index.get(key)

    def __len__(self) -> int:
        return len(self.entries)


def _parse_record(record: dict) -> ApiEntry:
    try:
        kind = MatchKind(record["match_key_kind"])
        entry = ApiEntry(
            library=record["library"],
            qualified_name=record["qualified_name"],
            match_key=MatchKey(kind, record.get("match_key_value", "")),
            description=record["description"],
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise MalformedRecord(str(exc)) from exc
    if not entry.description:
        raise MalformedRecord("empty description")
    return entry


def load_kb(path: str | Path) -> KnowledgeBase:
    entries = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(f"line {lineno}: {exc}") from exc
            entries.append(_parse_record(record))
    return KnowledgeBase(tuple(entries))


def kb_from_csv(path: str | Path, out_path: str | Path) -> int:
    """Build a KB file from a local CSV of (library, qualified_name,
    description); match key is the last path segment as a call name."""
    entries = []
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            entries.append({
                "library": row["library"],
                "qualified_name": row["qualified_name"],
                "match_key_kind": MatchKind.CALL_NAME.value,
                "match_key_value": row["qualified_name"].rsplit(".", 1)[-1],
                "description": row["description"],
            })
    with open(out_path, "w", encoding="utf-8") as handle:
        for record in entries:
            handle.write(json.dumps(record) + "\n")
    return len(entries)


# -- mention extraction ------------------------------------------------

def _statements(tokens: Sequence[Tok]) -> list[list[Tok]]:
    statements: list[list[Tok]] = []
    current: list[Tok] = []
    for tok in tokens:
        if tok.type == NEWLINE:
            if current:
                statements.append(current)
                current = []
        elif tok.type in (NAME, "NUMBER", "STRING", OP):
            current.append(tok)
    if current:
        statements.append(current)
    return statements


def _import_libraries(stmt: list[Tok]) -> list[str]:
    if stmt[0].text == "from":
        return [stmt[1].text] if len(stmt) > 1 and stmt[1].type == NAME else []
    libs = []
    expecting = True  # at position where a library name may start
    i = 1
    while i < len(stmt):
        tok = stmt[i]
        if expecting and tok.type == NAME:
            libs.append(tok.text)
            expecting = False
            # skip the rest of the dotted path / alias
            while i + 1 < len(stmt) and not (stmt[i + 1].type == OP and stmt[i + 1].text == ","):
                i += 1
        elif tok.type == OP and tok.text == ",":
            expecting = True
        i += 1
    return libs


def _subscript_kind(stmt: list[Tok], open_index: int) -> MatchKind:
    depth = 0
    for tok in stmt[open_index:]:
        if tok.type != OP:
            continue
        if tok.text in ("[", "(", "{"):
            depth += 1
        elif tok.text in ("]", ")", "}"):
            depth -= 1
            if depth == 0:
                break
        elif tok.text == ":" and depth == 1:
            return MatchKind.SLICE_SUBSCRIPT
    return MatchKind.SELECT_SUBSCRIPT


def extract_api_mentions(source: str) -> list[MatchKey]:
    """All API mentions of a cell in first-occurrence order: library
    imports, call names, and subscript forms. Duplicates collapse to the
    first position."""
    try:
        tokens = lex(clean_source(source))
    except LexError:
        return []
    mentions: list[MatchKey] = []
    seen: set[MatchKey] = set()

    def add(key: MatchKey) -> None:
        if key not in seen:
            seen.add(key)
            mentions.append(key)

    for stmt in _statements(tokens):
        if stmt[0].type == NAME and stmt[0].text in ("import", "from"):
            for lib in _import_libraries(stmt):
                add(MatchKey(MatchKind.LIBRARY_IMPORT, lib))
            continue
        for i, tok in enumerate(stmt):
            nxt = stmt[i + 1] if i + 1 < len(stmt) else None
            prev = stmt[i - 1] if i > 0 else None
            if (
                tok.type == NAME
                and tok.text not in KEYWORDS
                and nxt is not None and nxt.type == OP and nxt.text == "("
                and not (prev is not None and prev.type == NAME and prev.text == "def")
            ):
                add(MatchKey(MatchKind.CALL_NAME, tok.text))
            if (
                tok.type == OP and tok.text == "["
                and prev is not None
                and (prev.type == NAME and prev.text not in KEYWORDS
                     or prev.type == OP and prev.text in (")", "]"))
            ):
                add(MatchKey(_subscript_kind(stmt, i)))
    return mentions


def _is_import_only(source: str) -> bool:
    try:
        stmts = _statements(lex(clean_source(source)))
    except LexError:
        return False
    return bool(stmts) and all(
        s[0].type == NAME and s[0].text in ("import", "from") for s in stmts
    )


def query_candidate(kb: KnowledgeBase, source: str, max_items: int = 4) -> Optional[str]:
    """Documentation candidate for one cell, or None when nothing in the
    KB matches.

    Import-only cells concatenate the matched library blurbs in curated
    KB order. Other cells use the first matching call name; cells with no
    call match at all fall back to their first subscript form.
    """
    mentions = extract_api_mentions(source)
    if not mentions:
        return None
    if _is_import_only(source):
        libs = {m for m in mentions if m.kind is MatchKind.LIBRARY_IMPORT}
        hits = [e.description for e in kb.entries if e.match_key in libs]
        hits = hits[:max_items]
        return "; ".join(hits) if hits else None
    for mention in mentions:
        if mention.kind is MatchKind.CALL_NAME:
            entry = kb.lookup(mention)
            if entry is not None:
                return entry.description
    for mention in mentions:
        if mention.kind in (MatchKind.SLICE_SUBSCRIPT, MatchKind.SELECT_SUBSCRIPT):
            entry = kb.lookup(mention)
            return entry.description if entry is not None else None
    return None
