from .bleu import LengthMismatch, bleu_a
from .io import CorruptModel, VersionMismatch, load_model, save_model
from .model import (
    DEFAULT_D,
    DEFAULT_HOPS,
    MAX_DECODE_LEN,
    MODEL_VERSION,
    DimensionMismatch,
    GruCell,
    SummarizerError,
    SummarizerModel,
    VocabOverflow,
    greedy_decode,
    normalized_adjacency,
)
from .train import (
    EmptySplit,
    EpochRecord,
    Example,
    NonFiniteLoss,
    TrainingConfig,
    TrainingReport,
    evaluate_bleu,
    make_examples,
    token_accuracy,
    train,
)

__all__ = [
    "LengthMismatch",
    "bleu_a",
    "CorruptModel",
    "VersionMismatch",
    "load_model",
    "save_model",
    "DEFAULT_D",
    "DEFAULT_HOPS",
    "MAX_DECODE_LEN",
    "MODEL_VERSION",
    "DimensionMismatch",
    "GruCell",
    "SummarizerError",
    "SummarizerModel",
    "VocabOverflow",
    "greedy_decode",
    "normalized_adjacency",
    "EmptySplit",
    "EpochRecord",
    "Example",
    "NonFiniteLoss",
    "TrainingConfig",
    "TrainingReport",
    "evaluate_bleu",
    "make_examples",
    "token_accuracy",
    "train",
]
