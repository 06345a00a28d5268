"""Training-corpus tooling: pair extraction, splits, vocabularies, and
notebook corpus statistics, plus the documentation taxonomy schema."""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .analysis import tokenize_code, ast_to_tokens, parse_ast, clean_source
from .analysis.lexer import LexError
from .analysis.parser import ParseError
from .notebook import CellKind, NotebookDocument

L_MAX = 20
V_IN_MAX = 10_000
V_OUT_MAX = 5_000

RESERVED = ("<pad>", "<s>", "</s>", "<unk>", "<str>", "<num>")
PAD, BOS, EOS, UNK = 0, 1, 2, 3


class CorpusError(Exception):
    pass


class CorpusTooSmall(CorpusError):
    pass


class EmptyCorpus(CorpusError):
    pass


class DocCategory(Enum):
    PROCESS = "Process"
    HEADLINE = "Headline"
    RESULT = "Result"
    BACKGROUND_KNOWLEDGE = "BackgroundKnowledge"
    REASON = "Reason"
    TODO = "Todo"
    REFERENCE = "Reference"
    META_INFORMATION = "MetaInformation"
    SUMMARY = "Summary"


class Stage(Enum):
    ENVIRONMENT_CONFIGURATION = "EnvironmentConfiguration"
    DATA_PREPARATION_EXPLORATION = "DataPreparationExploration"
    FEATURE_ENGINEERING_SELECTION = "FeatureEngineeringSelection"
    MODEL_BUILDING_SELECTION = "ModelBuildingSelection"


class Task(Enum):
    LIBRARY_LOADING = "LibraryLoading"
    DATA_LOADING = "DataLoading"
    DATA_PREPARATION = "DataPreparation"
    EXPLORATORY_DATA_ANALYSIS = "ExploratoryDataAnalysis"
    DATA_CLEANING = "DataCleaning"
    FEATURE_ENGINEERING = "FeatureEngineering"
    FEATURE_TRANSFORMATION = "FeatureTransformation"
    FEATURE_SELECTION = "FeatureSelection"
    MODEL_BUILDING = "ModelBuilding"
    DATA_SUBSAMPLING_TRAIN_TEST_SPLITTING = "DataSubSamplingAndTrainTestSplitting"
    MODEL_TRAINING = "ModelTraining"
    MODEL_PARAMETER_TUNING = "ModelParameterTuning"
    MODEL_VALIDATION_ASSEMBLING = "ModelValidationAndAssembling"


STAGE_TASKS = {
    Stage.ENVIRONMENT_CONFIGURATION: {Task.LIBRARY_LOADING, Task.DATA_LOADING},
    Stage.DATA_PREPARATION_EXPLORATION: {
        Task.DATA_PREPARATION, Task.EXPLORATORY_DATA_ANALYSIS, Task.DATA_CLEANING,
    },
    Stage.FEATURE_ENGINEERING_SELECTION: {
        Task.FEATURE_ENGINEERING, Task.FEATURE_TRANSFORMATION, Task.FEATURE_SELECTION,
    },
    Stage.MODEL_BUILDING_SELECTION: {
        Task.MODEL_BUILDING, Task.DATA_SUBSAMPLING_TRAIN_TEST_SPLITTING,
        Task.MODEL_TRAINING, Task.MODEL_PARAMETER_TUNING,
        Task.MODEL_VALIDATION_ASSEMBLING,
    },
}


@dataclass(frozen=True)
class StageLabel:
    stage: Stage
    task: Task

    def __post_init__(self):
        if self.task not in STAGE_TASKS[self.stage]:
            raise ValueError(f"task {self.task.value} does not belong to stage {self.stage.value}")


class PairOrigin(Enum):
    ADJACENT_MARKDOWN = "AdjacentMarkdown"
    INLINE_COMMENT = "InlineComment"


@dataclass(frozen=True)
class TrainingPair:
    source: str
    target: tuple[str, ...]
    notebook_id: str
    cell_index: int
    origin: PairOrigin


@dataclass(frozen=True)
class CorpusSplit:
    train: tuple[TrainingPair, ...]
    valid: tuple[TrainingPair, ...]
    test: tuple[TrainingPair, ...]
    seed: int


# -- documentation text cleaning --------------------------------------

_MD_LINK = re.compile(r"\[([^\]]*)\]\([^)]*\)")
_MD_CODE = re.compile(r"`+")
_MD_EMPH = re.compile(r"[*_]{1,3}")
_MD_HEADING = re.compile(r"^\s{0,3}#{1,6}\s*", re.MULTILINE)
_SENTENCE_END = re.compile(r"(?<=[.!?])\s")
_WORD = re.compile(r"[A-Za-z0-9']+")


def markdown_to_plain(text: str) -> str:
    """Strip markdown decoration, keeping link text."""
    text = _MD_LINK.sub(r"\1", text)
    text = _MD_HEADING.sub("", text)
    text = _MD_CODE.sub("", text)
    text = _MD_EMPH.sub("", text)
    return text.strip()


def first_sentence(text: str) -> str:
    paragraph = next((p for p in text.split("\n\n") if p.strip()), "")
    paragraph = " ".join(paragraph.split())
    return _SENTENCE_END.split(paragraph, maxsplit=1)[0].strip()


def tokenize_doc(text: str, l_max: int = L_MAX) -> tuple[str, ...]:
    """Documentation-side tokens: lowercased words of the first sentence."""
    sentence = first_sentence(markdown_to_plain(text))
    return tuple(w.lower() for w in _WORD.findall(sentence))[:l_max]


# -- pair extraction ---------------------------------------------------

def _first_line_comment(source: str) -> Optional[str]:
    for line in source.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            return stripped.lstrip("#").strip()
        return None
    return None


def extract_pairs(doc: NotebookDocument, notebook_id: str = "", l_max: int = L_MAX) -> list[TrainingPair]:
    """One pair per code cell that has documentation: an inline comment on
    the first line wins over the markdown cell immediately above."""
    pairs = []
    for index, cell in enumerate(doc.cells):
        if cell.kind is not CellKind.CODE:
            continue
        comment = _first_line_comment(cell.source)
        if comment is not None:
            target = tuple(w.lower() for w in _WORD.findall(comment))[:l_max]
            if target:
                pairs.append(TrainingPair(cell.source, target, notebook_id, index, PairOrigin.INLINE_COMMENT))
            continue
        if index > 0 and doc.cells[index - 1].kind is CellKind.MARKDOWN:
            target = tokenize_doc(doc.cells[index - 1].source, l_max)
            if target:
                pairs.append(TrainingPair(cell.source, target, notebook_id, index, PairOrigin.ADJACENT_MARKDOWN))
    return pairs


def split_corpus(pairs: Sequence[TrainingPair], seed: int) -> CorpusSplit:
    """Deterministic seeded 8:1:1 split (valid and test each floor(n/10))."""
    if len(pairs) < 10:
        raise CorpusTooSmall(f"need at least 10 pairs, got {len(pairs)}")
    shuffled = list(pairs)
    random.Random(seed).shuffle(shuffled)
    tenth = len(shuffled) // 10
    train = shuffled[: len(shuffled) - 2 * tenth]
    valid = shuffled[len(train): len(train) + tenth]
    test = shuffled[len(train) + tenth:]
    return CorpusSplit(tuple(train), tuple(valid), tuple(test), seed)


# -- corpus statistics -------------------------------------------------

@dataclass(frozen=True)
class NotebookStats:
    notebook: str
    total_cells: int
    code_cells: int
    markdown_cells: int
    markdown_words: int


@dataclass(frozen=True)
class CorpusStats:
    notebooks: tuple[NotebookStats, ...]
    medians: dict

    def to_json(self) -> dict:
        return {
            "notebooks": [vars(n) for n in self.notebooks],
            "medians": dict(self.medians),
        }


def _median_low(values: list[int]) -> int:
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def corpus_stats(docs: Sequence[NotebookDocument], names: Optional[Sequence[str]] = None) -> CorpusStats:
    if not docs:
        raise EmptyCorpus("no notebooks given")
    names = list(names) if names else [f"notebook-{i}" for i in range(len(docs))]
    records = []
    for name, doc in zip(names, docs):
        code = sum(1 for c in doc.cells if c.kind is CellKind.CODE)
        md_cells = [c for c in doc.cells if c.kind is CellKind.MARKDOWN]
        words = sum(len(markdown_to_plain(c.source).split()) for c in md_cells)
        records.append(NotebookStats(name, len(doc.cells), code, len(md_cells), words))
    medians = {
        "total_cells": _median_low([r.total_cells for r in records]),
        "code_cells": _median_low([r.code_cells for r in records]),
        "markdown_cells": _median_low([r.markdown_cells for r in records]),
        "markdown_words": _median_low([r.markdown_words for r in records]),
    }
    return CorpusStats(tuple(records), medians)


# -- vocabularies ------------------------------------------------------

@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]
    index: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, token: str) -> int:
        return self.index.get(token, UNK)

    def decode(self, token_id: int) -> str:
        return self.tokens[token_id]


def _ranked_vocab(counts: dict, cap: int) -> Vocab:
    ranked = sorted(
        (t for t in counts if t not in RESERVED),
        key=lambda t: (-counts[t], t),
    )
    return Vocab(RESERVED + tuple(ranked[: max(0, cap - len(RESERVED))]))


def source_tokens(source: str) -> list[str]:
    """Code + AST tokens of one cell, as fed to the input dictionary."""
    cleaned = clean_source(source)
    try:
        tokens = tokenize_code(cleaned)
    except LexError:
        return []
    try:
        ast_toks, _ = ast_to_tokens(parse_ast(cleaned))
        tokens = tokens + ast_toks
    except (ParseError, LexError):
        pass
    return tokens


def build_vocab(
    pairs: Sequence[TrainingPair],
    v_in_max: int = V_IN_MAX,
    v_out_max: int = V_OUT_MAX,
) -> tuple[Vocab, Vocab]:
    in_counts: dict = {}
    out_counts: dict = {}
    for pair in pairs:
        for tok in source_tokens(pair.source):
            in_counts[tok] = in_counts.get(tok, 0) + 1
        for tok in pair.target:
            out_counts[tok] = out_counts.get(tok, 0) + 1
    return _ranked_vocab(in_counts, v_in_max), _ranked_vocab(out_counts, v_out_max)


# -- file formats ------------------------------------------------------

def write_pairs(pairs: Iterable[TrainingPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for pair in pairs:
            handle.write(json.dumps({
                "source": pair.source,
                "target": " ".join(pair.target),
                "notebook_id": pair.notebook_id,
                "cell_index": pair.cell_index,
                "origin": pair.origin.value,
            }) + "\n")


def read_pairs(path: str | Path) -> list[TrainingPair]:
    pairs = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            pairs.append(TrainingPair(
                source=record["source"],
                target=tuple(record["target"].split()),
                notebook_id=record.get("notebook_id", ""),
                cell_index=int(record.get("cell_index", 0)),
                origin=PairOrigin(record.get("origin", "AdjacentMarkdown")),
            ))
    return pairs


def write_vocab(vocab: Vocab, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(list(vocab.tokens), handle)


def read_vocab(path: str | Path) -> Vocab:
    with open(path, encoding="utf-8") as handle:
        return Vocab(tuple(json.load(handle)))
