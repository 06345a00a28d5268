"""Training and evaluation loop for the code summarizer.

Teacher-forced cross entropy with Adam, gradient-norm clipping, and
early stopping on validation token accuracy; the best-scoring epoch's
weights are the ones returned. Everything is seeded, so a given
configuration reproduces the same model.
"""

from __future__ import annotations

import copy
import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

import torch
from torch.nn import functional as F

from ..analysis import CodeGraph, build_code_graph
from ..corpus import BOS, EOS, TrainingPair, Vocab, build_vocab
from .bleu import bleu_a
from .model import DEFAULT_D, DEFAULT_HOPS, SummarizerError, SummarizerModel, greedy_decode


class NonFiniteLoss(SummarizerError):
    pass


class EmptySplit(SummarizerError):
    pass


@dataclass(frozen=True)
class TrainingConfig:
    d: int = DEFAULT_D
    hops: int = DEFAULT_HOPS
    learning_rate: float = 1e-3
    batch_size: int = 30
    max_epochs: int = 50
    patience: int = 3
    grad_clip: float = 5.0
    seed: int = 0


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    valid_loss: float
    valid_token_accuracy: float


@dataclass(frozen=True)
class TrainingReport:
    epochs: tuple[EpochRecord, ...]
    best_epoch: int
    best_valid_token_accuracy: float
    config: TrainingConfig

    def to_json(self) -> dict:
        return {
            "epochs": [vars(e) for e in self.epochs],
            "best_epoch": self.best_epoch,
            "best_valid_token_accuracy": self.best_valid_token_accuracy,
            "config": vars(self.config),
        }


@dataclass(frozen=True)
class Example:
    graph: CodeGraph
    prefix: tuple[int, ...]  # <s> + target ids
    labels: tuple[int, ...]  # target ids + </s>


def make_examples(pairs: Sequence[TrainingPair], out_vocab: Vocab) -> list[Example]:
    examples = []
    for pair in pairs:
        target = [out_vocab.encode(t) for t in pair.target]
        examples.append(Example(
            build_code_graph(pair.source),
            tuple([BOS] + target),
            tuple(target + [EOS]),
        ))
    return examples


def _batch_loss(model: SummarizerModel, batch: Sequence[Example]) -> tuple[torch.Tensor, int]:
    losses = []
    tokens = 0
    for example in batch:
        logits = model(example.graph, example.prefix)
        labels = torch.tensor(example.labels)
        losses.append(F.cross_entropy(logits, labels, reduction="sum"))
        tokens += len(example.labels)
    return torch.stack(losses).sum(), tokens


def token_accuracy(model: SummarizerModel, examples: Sequence[Example]) -> float:
    correct = 0
    total = 0
    with torch.no_grad():
        for example in examples:
            logits = model(example.graph, example.prefix)
            predicted = torch.argmax(logits, dim=1)
            labels = torch.tensor(example.labels)
            correct += int((predicted == labels).sum())
            total += len(example.labels)
    return correct / total if total else 0.0


def valid_loss(model: SummarizerModel, examples: Sequence[Example]) -> float:
    with torch.no_grad():
        loss, tokens = _batch_loss(model, examples)
    return float(loss) / tokens if tokens else 0.0


def train(
    train_pairs: Sequence[TrainingPair],
    valid_pairs: Sequence[TrainingPair],
    config: TrainingConfig = TrainingConfig(),
    vocabs: Optional[tuple[Vocab, Vocab]] = None,
) -> tuple[SummarizerModel, TrainingReport]:
    if not train_pairs:
        raise EmptySplit("no training pairs")
    if not valid_pairs:
        raise EmptySplit("no validation pairs")
    torch.set_num_threads(1)
    in_vocab, out_vocab = vocabs if vocabs else build_vocab(train_pairs)
    model = SummarizerModel(in_vocab, out_vocab, d=config.d, hops=config.hops)
    model.reset_parameters(seed=config.seed)
    train_examples = make_examples(train_pairs, out_vocab)
    valid_examples = make_examples(valid_pairs, out_vocab)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    rng = random.Random(config.seed)

    records: list[EpochRecord] = []
    best_accuracy = -1.0
    best_epoch = -1
    best_state = None
    stale = 0
    for epoch in range(config.max_epochs):
        model.train()
        rng.shuffle(train_examples)
        epoch_loss = 0.0
        epoch_tokens = 0
        for start in range(0, len(train_examples), config.batch_size):
            batch = train_examples[start : start + config.batch_size]
            optimizer.zero_grad()
            loss, tokens = _batch_loss(model, batch)
            mean_loss = loss / tokens
            if not math.isfinite(float(mean_loss.detach())):
                raise NonFiniteLoss(f"epoch {epoch}: loss {float(mean_loss.detach())}")
            mean_loss.backward()
            torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip)
            optimizer.step()
            epoch_loss += float(loss.detach())
            epoch_tokens += tokens
        model.eval()
        accuracy = token_accuracy(model, valid_examples)
        records.append(EpochRecord(
            epoch=epoch,
            train_loss=epoch_loss / epoch_tokens,
            valid_loss=valid_loss(model, valid_examples),
            valid_token_accuracy=accuracy,
        ))
        if accuracy > best_accuracy:
            best_accuracy = accuracy
            best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())
            stale = 0
        else:
            stale += 1
            if stale > config.patience:
                break
    model.load_state_dict(best_state)
    model.eval()
    report = TrainingReport(tuple(records), best_epoch, best_accuracy, config)
    return model, report


def evaluate_bleu(model: SummarizerModel, pairs: Sequence[TrainingPair]) -> float:
    """Corpus BLEU of greedy decodes against the reference targets."""
    if not pairs:
        raise EmptySplit("no evaluation pairs")
    candidates = [greedy_decode(model, build_code_graph(p.source)) for p in pairs]
    references = [list(p.target) for p in pairs]
    return bleu_a(candidates, references)
