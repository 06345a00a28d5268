"""Corpus-level smoothed BLEU for short documentation strings.

The score is 100 * BP * mean(p1..p4), where each p_n is the add-one
smoothed modified n-gram precision aggregated over the whole corpus
((matched + 1) / (total + 1)), and BP is the usual brevity penalty
computed from corpus-total candidate and reference lengths. The
arithmetic mean (rather than the geometric mean) keeps the score
informative when higher-order n-grams have no matches, which is the
common case for single-sentence targets.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence

MAX_ORDER = 4


class LengthMismatch(Exception):
    pass


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_a(
    candidates: Sequence[Sequence[str]],
    references: Sequence[Sequence[str]],
    max_order: int = MAX_ORDER,
) -> float:
    if len(candidates) != len(references):
        raise LengthMismatch(
            f"{len(candidates)} candidates vs {len(references)} references"
        )
    if not candidates:
        raise LengthMismatch("empty corpus")
    matched = [0] * max_order
    total = [0] * max_order
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand_len += len(cand)
        ref_len += len(ref)
        for n in range(1, max_order + 1):
            cand_grams = _ngrams(cand, n)
            ref_grams = _ngrams(ref, n)
            matched[n - 1] += sum(
                min(count, ref_grams[gram]) for gram, count in cand_grams.items()
            )
            total[n - 1] += max(0, len(cand) - n + 1)
    precisions = [(m + 1) / (t + 1) for m, t in zip(matched, total)]
    if cand_len == 0:
        return 0.0
    brevity = 1.0 if cand_len >= ref_len else math.exp(1.0 - ref_len / cand_len)
    return 100.0 * brevity * sum(precisions) / max_order
