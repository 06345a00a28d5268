"""Notebook documentation assistant: candidate generation (learned
summarizer, API-description retrieval, output-aware prompts) behind an
HTTP service, plus corpus tooling and provenance tracking."""

from .notebook import (
    AnchorNotCode,
    Cell,
    CellKind,
    CellOutput,
    MalformedNotebook,
    NotebookDocument,
    NotebookError,
    OutputKind,
    Placement,
    UnknownCell,
    UnsupportedVersion,
    classify_output,
    insert_markdown,
    parse_notebook,
    serialize_notebook,
)
from .provenance import ProvenanceTag, classify_provenance, similarity
from .service import CandidateKind, ServiceConfig, SuggestionCandidate, SuggestionService

__all__ = [
    "AnchorNotCode",
    "Cell",
    "CellKind",
    "CellOutput",
    "MalformedNotebook",
    "NotebookDocument",
    "NotebookError",
    "OutputKind",
    "Placement",
    "UnknownCell",
    "UnsupportedVersion",
    "classify_output",
    "insert_markdown",
    "parse_notebook",
    "serialize_notebook",
    "ProvenanceTag",
    "classify_provenance",
    "similarity",
    "CandidateKind",
    "ServiceConfig",
    "SuggestionCandidate",
    "SuggestionService",
]
