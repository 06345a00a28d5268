"""HTTP suggestion service: run the three documentation generators over
a code cell and return ordered candidates, serve notebooks, and classify
accepted-edit provenance."""

from __future__ import annotations

import json
import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from collections import OrderedDict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from .corpus import DocCategory
from .analysis import build_code_graph
from .kb import KnowledgeBase, load_kb, query_candidate
from .notebook import (
    CellOutput,
    MalformedNotebook,
    NotebookError,
    OutputKind,
    Placement,
    parse_notebook,
    serialize_notebook,
)
from .prompts import prompt_candidate
from .provenance import ProvenanceTag, classify_provenance
from .summarizer import SummarizerModel, greedy_decode, load_model

logger = logging.getLogger("nbdoc.service")

CACHE_SIZE = 256
DEFAULT_PORT = 8600


class ServiceError(Exception):
    pass


class BindError(ServiceError):
    pass


class BadConfig(ServiceError):
    pass


class CandidateKind(Enum):
    DEEP = "Deep"
    QUERY = "Query"
    PROMPT = "Prompt"


@dataclass(frozen=True)
class SuggestionCandidate:
    kind: CandidateKind
    text: str
    placement: Placement
    category: DocCategory

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "text": self.text,
            "placement": self.placement.value,
            "category": self.category.value,
        }


@dataclass(frozen=True)
class ServiceConfig:
    notebook_root: str = "."
    model_path: Optional[str] = None
    kb_path: Optional[str] = None
    port: int = DEFAULT_PORT


def load_config(path: str | Path) -> ServiceConfig:
    path = Path(path)
    try:
        if path.suffix == ".toml":
            with open(path, "rb") as handle:
                raw = tomllib.load(handle)
        else:
            with open(path, encoding="utf-8") as handle:
                raw = json.load(handle)
    except (OSError, ValueError, tomllib.TOMLDecodeError) as exc:
        raise BadConfig(f"{path}: {exc}") from exc
    known = {"notebook_root", "model_path", "kb_path", "port"}
    unknown = set(raw) - known
    if unknown:
        raise BadConfig(f"{path}: unknown keys {sorted(unknown)}")
    config = ServiceConfig(**raw)
    env_port = os.environ.get("THEMISTO_PORT")
    if env_port:
        config = ServiceConfig(config.notebook_root, config.model_path, config.kb_path, int(env_port))
    return config


def _deep_text(tokens: list[str]) -> str:
    text = " ".join(tokens).rstrip(".")
    return text[:1].upper() + text[1:]


class SuggestionService:
    """Shared read-only model + KB behind an LRU response cache."""

    def __init__(self, kb: KnowledgeBase, model: Optional[SummarizerModel] = None):
        self.kb = kb
        self.model = model
        self._cache: OrderedDict = OrderedDict()

    def suggest(
        self, source: str, output: Optional[CellOutput] = None
    ) -> tuple[list[SuggestionCandidate], list[str]]:
        """Candidates in dropdown order Deep, Query, Prompt plus warnings.
        Deep is skipped when no model is loaded or the cell has no tokens;
        Query is skipped when nothing in the KB matches."""
        key = (source, output.kind if output else None)
        if key in self._cache:
            self._cache.move_to_end(key)
            return self._cache[key]
        candidates: list[SuggestionCandidate] = []
        warnings: list[str] = []
        graph = build_code_graph(source)
        if self.model is None:
            warnings.append("model not loaded; Deep candidate unavailable")
        elif graph.code_tokens:
            decoded = greedy_decode(self.model, graph)
            if decoded:
                candidates.append(SuggestionCandidate(
                    CandidateKind.DEEP, _deep_text(decoded), Placement.ABOVE, DocCategory.PROCESS,
                ))
        query_text = query_candidate(self.kb, source)
        if query_text is not None:
            candidates.append(SuggestionCandidate(
                CandidateKind.QUERY, query_text, Placement.ABOVE, DocCategory.PROCESS,
            ))
        template = prompt_candidate(output)
        candidates.append(SuggestionCandidate(
            CandidateKind.PROMPT, template.text, template.placement, template.category,
        ))
        result = (candidates, warnings)
        self._cache[key] = result
        if len(self._cache) > CACHE_SIZE:
            self._cache.popitem(last=False)
        return result


def _parse_output_field(body: dict) -> Optional[CellOutput]:
    kind = body.get("output_kind")
    if kind:
        return CellOutput(OutputKind(kind))
    if body.get("has_output"):
        return CellOutput(OutputKind.TEXT)
    return None


def build_app(service: SuggestionService, notebook_root: str | Path) -> FastAPI:
    app = FastAPI(title="nbdoc suggestion service")
    root = Path(notebook_root).resolve()

    def _resolve(rel: str) -> Optional[Path]:
        candidate = (root / rel).resolve()
        return candidate if candidate.is_relative_to(root) else None

    @app.middleware("http")
    async def log_requests(request: Request, call_next):
        response = await call_next(request)
        logger.info("%s %s -> %d", request.method, request.url.path, response.status_code)
        return response

    @app.get("/api/health")
    def health() -> dict:
        return {"status": "ok", "model_loaded": service.model is not None}

    @app.post("/api/suggest")
    async def suggest(request: Request) -> JSONResponse:
        try:
            body = await request.json()
            source = body["source"]
            output = _parse_output_field(body)
        except (ValueError, KeyError, TypeError) as exc:
            return JSONResponse({"error": f"bad request: {exc}"}, status_code=400)
        candidates, warnings = service.suggest(source, output)
        return JSONResponse({
            "candidates": [c.to_json() for c in candidates],
            "warnings": warnings,
        })

    @app.get("/api/notebook")
    def get_notebook(path: str) -> Response:
        target = _resolve(path)
        if target is None:
            return JSONResponse({"error": "path escapes notebook root"}, status_code=400)
        if not target.is_file():
            return JSONResponse({"error": f"no notebook at {path}"}, status_code=404)
        return Response(target.read_bytes(), media_type="application/json")

    @app.put("/api/notebook")
    async def put_notebook(path: str, request: Request) -> JSONResponse:
        target = _resolve(path)
        if target is None:
            return JSONResponse({"error": "path escapes notebook root"}, status_code=400)
        try:
            doc = parse_notebook(await request.body())
        except NotebookError as exc:
            return JSONResponse(
                {"error": f"{type(exc).__name__}: {exc}"}, status_code=400,
            )
        tmp = target.with_name(target.name + ".tmp")
        tmp.write_bytes(serialize_notebook(doc))
        tmp.replace(target)
        return JSONResponse({"ok": True})

    @app.post("/api/feedback")
    async def feedback(request: Request) -> JSONResponse:
        try:
            body = await request.json()
            tag = classify_provenance(body["suggested_text"], body["final_text"])
        except (ValueError, KeyError, TypeError) as exc:
            return JSONResponse({"error": f"bad request: {exc}"}, status_code=400)
        return JSONResponse({"provenance": tag.value, "similarity": tag.similarity})

    return app


def make_service(config: ServiceConfig) -> SuggestionService:
    """Load the KB and (if configured) the model; errors propagate so
    startup aborts on a corrupt artifact."""
    if config.kb_path is None:
        raise BadConfig("config needs kb_path")
    kb = load_kb(config.kb_path)
    model = load_model(config.model_path) if config.model_path else None
    return SuggestionService(kb, model)


def serve(config: ServiceConfig) -> None:
    import uvicorn

    app = build_app(make_service(config), config.notebook_root)
    try:
        uvicorn.run(app, host="127.0.0.1", port=config.port, log_level="info")
    except OSError as exc:
        raise BindError(f"cannot bind port {config.port}: {exc}") from exc
