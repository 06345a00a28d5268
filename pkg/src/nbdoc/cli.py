"""Command-line entry points: serve the suggestion service, annotate
notebooks offline, train and evaluate the summarizer, extract training
pairs, compute corpus statistics, and validate the knowledge base.

Exit codes: 0 success, 1 usage error, 2 input parse error, 3 missing
artifact, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from .corpus import (
    CorpusError,
    corpus_stats,
    extract_pairs,
    read_pairs,
    split_corpus,
    write_pairs,
)
from .kb import KbError, load_kb
from .notebook import (
    CellKind,
    CellOutput,
    NotebookError,
    OutputKind,
    insert_markdown,
    parse_notebook,
    serialize_notebook,
)
from .service import BadConfig, ServiceConfig, load_config
from .summarizer import (
    SummarizerError,
    TrainingConfig,
    bleu_a,
    evaluate_bleu,
    load_model,
    save_model,
    train,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_MISSING = 3
EXIT_INTERNAL = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would sys.exit(2)
        raise UsageError(message)


def _emit(args, payload: dict, plain: str) -> None:
    print(json.dumps(payload) if args.json else plain)


def _read_notebook(path: str):
    source = Path(path)
    if not source.is_file():
        raise FileNotFoundError(path)
    return parse_notebook(source.read_bytes())


def _atomic_write(path: str | Path, data: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


# -- annotate ----------------------------------------------------------

_OUTPUT_PRECEDENCE = (OutputKind.TABLE, OutputKind.IMAGE, OutputKind.TEXT, OutputKind.ERROR)


def _primary_output(cell) -> Optional[CellOutput]:
    for kind in _OUTPUT_PRECEDENCE:
        for output in cell.outputs:
            if output.kind is kind:
                return output
    return None


def cmd_annotate(args) -> int:
    from .service import SuggestionService

    if args.out == getattr(args, "in") and not args.overwrite:
        raise UsageError("refusing to overwrite input without --overwrite")
    doc = _read_notebook(getattr(args, "in"))
    kb = load_kb(args.kb)
    model = None
    if args.approach in ("deep", "all"):
        if not args.model:
            print("annotate: --model is required for the deep approach", file=sys.stderr)
            return EXIT_MISSING
        model = load_model(args.model)
    service = SuggestionService(kb, model)
    priority = {"deep": ["Deep"], "query": ["Query"], "prompt": ["Prompt"],
                "all": ["Deep", "Query", "Prompt"]}[args.approach]
    inserted = 0
    for cell in [c for c in doc.cells if c.kind is CellKind.CODE]:
        candidates, _ = service.suggest(cell.source, _primary_output(cell))
        by_kind = {c.kind.value: c for c in candidates}
        chosen = next((by_kind[k] for k in priority if k in by_kind), None)
        if chosen is None:
            continue
        doc = insert_markdown(doc, cell.id, chosen.text, chosen.placement)
        at = doc.cell_index(cell.id) + (1 if chosen.placement.value == "below" else -1)
        cells = list(doc.cells)
        cells[at] = cells[at].with_provenance("T")
        doc = replace(doc, cells=tuple(cells))
        inserted += 1
    _atomic_write(args.out, serialize_notebook(doc))
    _emit(args, {"inserted": inserted, "out": args.out},
          f"annotated {inserted} cells -> {args.out}")
    return EXIT_OK


# -- train / eval ------------------------------------------------------

def cmd_train(args) -> int:
    pairs = read_pairs(args.corpus)
    split = split_corpus(pairs, args.seed)
    config = TrainingConfig(
        d=args.d, hops=args.hops, learning_rate=args.lr, batch_size=args.batch,
        max_epochs=args.epochs, patience=args.patience, seed=args.seed,
    )
    model, report = train(split.train, split.valid, config)
    save_model(model, args.model_out)
    _atomic_write(args.report_out, json.dumps(report.to_json(), indent=1).encode())
    _emit(args, {"model": args.model_out, "report": args.report_out,
                 "best_epoch": report.best_epoch,
                 "best_valid_token_accuracy": report.best_valid_token_accuracy},
          f"model -> {args.model_out}, report -> {args.report_out} "
          f"(best epoch {report.best_epoch}, "
          f"valid token accuracy {report.best_valid_token_accuracy:.3f})")
    return EXIT_OK


def _read_token_lines(path: str) -> list[list[str]]:
    with open(path, encoding="utf-8") as handle:
        return [line.split() for line in handle.read().splitlines()]


def cmd_eval(args) -> int:
    if args.candidates or args.references:
        if not (args.candidates and args.references):
            raise UsageError("--candidates and --references go together")
        score = bleu_a(_read_token_lines(args.candidates), _read_token_lines(args.references))
    else:
        if not (args.corpus and args.model):
            raise UsageError("eval needs --corpus and --model (or --candidates/--references)")
        split = split_corpus(read_pairs(args.corpus), args.seed)
        score = evaluate_bleu(load_model(args.model), split.test)
    _emit(args, {"bleu_a": score}, f"{score:.1f}")
    return EXIT_OK


# -- corpus tooling ----------------------------------------------------

def _notebook_paths(paths: Sequence[str]) -> list[Path]:
    out: list[Path] = []
    for raw in paths:
        path = Path(raw)
        if path.is_dir():
            out.extend(sorted(path.glob("*.ipynb")))
        else:
            out.append(path)
    return out


def cmd_stats(args) -> int:
    paths = _notebook_paths(args.notebooks)
    docs = [_read_notebook(str(p)) for p in paths]
    stats = corpus_stats(docs, [p.name for p in paths])
    _atomic_write(args.out, json.dumps(stats.to_json(), indent=1).encode())
    _emit(args, stats.to_json(), f"stats for {len(docs)} notebooks -> {args.out}")
    return EXIT_OK


def cmd_extract_pairs(args) -> int:
    paths = _notebook_paths(args.notebooks)
    pairs = []
    for path in paths:
        pairs.extend(extract_pairs(_read_notebook(str(path)), notebook_id=path.stem))
    write_pairs(pairs, args.out)
    _emit(args, {"pairs": len(pairs), "out": args.out},
          f"extracted {len(pairs)} pairs -> {args.out}")
    return EXIT_OK


def cmd_kb_validate(args) -> int:
    kb = load_kb(args.kb)  # raises KbError on malformed/duplicate entries
    _emit(args, {"entries": len(kb), "ok": True}, f"{args.kb}: {len(kb)} entries, ok")
    return EXIT_OK


# -- serve -------------------------------------------------------------

def cmd_serve(args) -> int:
    from .service import serve

    config = load_config(args.config) if args.config else ServiceConfig()
    if args.kb:
        config = replace(config, kb_path=args.kb)
    if args.model:
        config = replace(config, model_path=args.model)
    if args.root:
        config = replace(config, notebook_root=args.root)
    if args.port:
        config = replace(config, port=args.port)
    serve(config)
    return EXIT_OK


# -- parser ------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="nbdoc", description="Notebook documentation assistant")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("serve", cmd_serve, help="run the suggestion service")
    p.add_argument("--config", help="TOML or JSON config file")
    p.add_argument("--kb", help="knowledge base JSONL")
    p.add_argument("--model", help="summarizer model file")
    p.add_argument("--root", help="notebook root directory")
    p.add_argument("--port", type=int)

    p = add("annotate", cmd_annotate, help="insert documentation cells offline")
    p.add_argument("--in", required=True, help="input notebook")
    p.add_argument("--out", required=True, help="output notebook")
    p.add_argument("--approach", choices=["deep", "query", "prompt", "all"], default="all")
    p.add_argument("--kb", required=True, help="knowledge base JSONL")
    p.add_argument("--model", help="summarizer model file")
    p.add_argument("--overwrite", action="store_true")

    p = add("train", cmd_train, help="train the summarizer")
    p.add_argument("--corpus", required=True, help="pairs.jsonl")
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--batch", type=int, default=30)
    p.add_argument("--patience", type=int, default=15)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--d", type=int, default=64)
    p.add_argument("--hops", type=int, default=2)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--model-out", default="model.bin")
    p.add_argument("--report-out", default="report.json")

    p = add("eval", cmd_eval, help="BLEU on the test split or token files")
    p.add_argument("--corpus", help="pairs.jsonl")
    p.add_argument("--model", help="summarizer model file")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--candidates", help="file of space-separated token lines")
    p.add_argument("--references", help="file of space-separated token lines")

    p = add("stats", cmd_stats, help="corpus statistics")
    p.add_argument("--notebooks", nargs="+", required=True)
    p.add_argument("--out", default="stats.json")

    p = add("extract-pairs", cmd_extract_pairs, help="extract training pairs")
    p.add_argument("--notebooks", nargs="+", required=True)
    p.add_argument("--out", default="pairs.jsonl")

    p = add("kb-validate", cmd_kb_validate, help="validate a knowledge base file")
    p.add_argument("--kb", required=True)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotebookError, KbError, CorpusError, json.JSONDecodeError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (FileNotFoundError, BadConfig) as exc:
        print(f"missing artifact: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (SummarizerError, OSError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
