import json

import pytest

from nbdoc.cli import (
    EXIT_INTERNAL,
    EXIT_MISSING,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_USAGE,
    main,
)
from nbdoc.notebook import CellKind, parse_notebook

from conftest import FIXTURES, KB_PATH


class TestExitCodes:
    def test_usage_error(self, capsys):
        assert main(["annotate"]) == EXIT_USAGE

    def test_unknown_command(self, capsys):
        assert main(["bogus"]) == EXIT_USAGE

    def test_missing_input_file(self, tmp_path, capsys):
        code = main(["annotate", "--in", "missing.ipynb",
                     "--out", str(tmp_path / "o.ipynb"), "--kb", str(KB_PATH),
                     "--approach", "query"])
        assert code == EXIT_MISSING

    def test_parse_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.ipynb"
        bad.write_text("{broken")
        code = main(["annotate", "--in", str(bad), "--out", str(tmp_path / "o.ipynb"),
                     "--kb", str(KB_PATH), "--approach", "query"])
        assert code == EXIT_PARSE

    def test_deep_without_model(self, tmp_path, capsys):
        code = main(["annotate", "--in", str(FIXTURES / "house.ipynb"),
                     "--out", str(tmp_path / "o.ipynb"), "--kb", str(KB_PATH),
                     "--approach", "deep"])
        assert code == EXIT_MISSING

    def test_corrupt_model_is_internal(self, tmp_path, capsys):
        junk = tmp_path / "model.bin"
        junk.write_bytes(b"not a model")
        code = main(["annotate", "--in", str(FIXTURES / "house.ipynb"),
                     "--out", str(tmp_path / "o.ipynb"), "--kb", str(KB_PATH),
                     "--approach", "deep", "--model", str(junk)])
        assert code == EXIT_INTERNAL


class TestAnnotate:
    def test_query_inserts_for_every_kb_hit(self, tmp_path, capsys):
        out = tmp_path / "annotated.ipynb"
        code = main(["annotate", "--in", str(FIXTURES / "house.ipynb"),
                     "--out", str(out), "--kb", str(KB_PATH),
                     "--approach", "query", "--json"])
        assert code == EXIT_OK
        assert json.loads(capsys.readouterr().out)["inserted"] == 9
        doc = parse_notebook(out.read_bytes())
        markdown = [c for c in doc.cells if c.kind is CellKind.MARKDOWN]
        assert len(markdown) == 9
        assert all(c.provenance == "T" for c in markdown)

    def test_prompt_strings_match_goldens(self, tmp_path, candidate_goldens):
        out = tmp_path / "annotated.ipynb"
        assert main(["annotate", "--in", str(FIXTURES / "house.ipynb"),
                     "--out", str(out), "--kb", str(KB_PATH),
                     "--approach", "prompt"]) == EXIT_OK
        doc = parse_notebook(out.read_bytes())
        texts = [c.source for c in doc.cells if c.kind is CellKind.MARKDOWN]
        assert texts == [g["prompt"] for g in candidate_goldens["house"]]

    def test_placement_below_for_result_prompts(self, tmp_path, candidate_goldens):
        out = tmp_path / "annotated.ipynb"
        main(["annotate", "--in", str(FIXTURES / "covid.ipynb"), "--out", str(out),
              "--kb", str(KB_PATH), "--approach", "prompt"])
        doc = parse_notebook(out.read_bytes())
        cells = list(doc.cells)
        for golden in candidate_goldens["covid"]:
            index = next(i for i, c in enumerate(cells)
                         if c.kind is CellKind.MARKDOWN and c.source == golden["prompt"])
            neighbor = cells[index + 1] if golden["placement"] == "above" else cells[index - 1]
            assert neighbor.kind is CellKind.CODE
            del cells[index]

    def test_empty_notebook(self, tmp_path, capsys):
        empty = tmp_path / "empty.ipynb"
        empty.write_text(json.dumps(
            {"cells": [], "metadata": {}, "nbformat": 4, "nbformat_minor": 5}))
        out = tmp_path / "out.ipynb"
        assert main(["annotate", "--in", str(empty), "--out", str(out),
                     "--kb", str(KB_PATH), "--approach", "query", "--json"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["inserted"] == 0

    def test_refuses_in_place_without_overwrite(self, tmp_path, capsys):
        src = tmp_path / "nb.ipynb"
        src.write_bytes((FIXTURES / "house.ipynb").read_bytes())
        assert main(["annotate", "--in", str(src), "--out", str(src),
                     "--kb", str(KB_PATH), "--approach", "query"]) == EXIT_USAGE
        assert main(["annotate", "--in", str(src), "--out", str(src), "--overwrite",
                     "--kb", str(KB_PATH), "--approach", "query"]) == EXIT_OK


class TestCorpusCommands:
    def test_stats_matches_snapshot(self, tmp_path, capsys):
        out = tmp_path / "stats.json"
        assert main(["stats", "--notebooks", str(FIXTURES / "mini_corpus"),
                     "--out", str(out)]) == EXIT_OK
        snapshot = json.loads((FIXTURES / "stats_snapshot.json").read_text())
        assert json.loads(out.read_text()) == snapshot

    def test_extract_pairs(self, tmp_path, capsys):
        out = tmp_path / "pairs.jsonl"
        assert main(["extract-pairs", "--notebooks", str(FIXTURES / "mini_corpus"),
                     "--out", str(out), "--json"]) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["pairs"] == 6
        assert len(out.read_text().splitlines()) == 6

    def test_kb_validate_ok(self, capsys):
        assert main(["kb-validate", "--kb", str(KB_PATH)]) == EXIT_OK

    def test_kb_validate_duplicate(self, tmp_path, capsys):
        record = {"library": "pandas", "qualified_name": "pandas.head",
                  "match_key_kind": "call", "match_key_value": "head",
                  "description": "dup"}
        path = tmp_path / "kb.jsonl"
        path.write_text(json.dumps(record) + "\n" + json.dumps(record) + "\n")
        assert main(["kb-validate", "--kb", str(path)]) == EXIT_PARSE


class TestEval:
    def test_identity_token_files_print_100(self, tmp_path, capsys):
        cand = tmp_path / "cand.txt"
        cand.write_text("read the data\nfit the model\n")
        assert main(["eval", "--candidates", str(cand),
                     "--references", str(cand)]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "100.0"

    def test_eval_needs_inputs(self, capsys):
        assert main(["eval"]) == EXIT_USAGE


class TestTrainCommand:
    def test_train_writes_model_and_report(self, tmp_path, capsys):
        pairs = tmp_path / "pairs.jsonl"
        rows = [{"source": f"x{i} = {i} + y{i % 3}", "target": f"set x{i} from y",
                 "notebook_id": "nb", "cell_index": i, "origin": "AdjacentMarkdown"}
                for i in range(12)]
        pairs.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
        model_out = tmp_path / "model.bin"
        report_out = tmp_path / "report.json"
        code = main(["train", "--corpus", str(pairs), "--epochs", "2", "--batch", "4",
                     "--patience", "2", "--seed", "1", "--d", "12",
                     "--model-out", str(model_out), "--report-out", str(report_out),
                     "--json"])
        assert code == EXIT_OK
        assert model_out.is_file() and report_out.is_file()
        report = json.loads(report_out.read_text())
        assert len(report["epochs"]) <= 2
        from nbdoc.summarizer import load_model
        assert load_model(model_out).d == 12
