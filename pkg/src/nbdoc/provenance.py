"""T/C/H provenance classification of accepted documentation edits."""

from __future__ import annotations

import re
from dataclasses import dataclass

# Calibrated so the classifier agrees with every readable tagged example
# in the two bundled notebooks (see tests/test_acceptance.py).
THETA_T = 0.95
THETA_C = 0.26

_MARKERS = re.compile(r"[#*`_]+")


@dataclass(frozen=True)
class ProvenanceTag:
    value: str  # "T" | "C" | "H"
    similarity: float


def normalize(text: str) -> str:
    text = _MARKERS.sub(" ", text.lower())
    return " ".join(text.split())


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance, O(min(len)) space."""
    if len(a) > len(b):
        a, b = b, a
    previous = list(range(len(a) + 1))
    for i, cb in enumerate(b, start=1):
        current = [i] + [0] * len(a)
        for j, ca in enumerate(a, start=1):
            current[j] = min(
                previous[j] + 1,
                current[j - 1] + 1,
                previous[j - 1] + (ca != cb),
            )
        previous = current
    return previous[len(a)]


def similarity(suggested: str, final: str) -> float:
    a, b = normalize(suggested), normalize(final)
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return 1.0 - edit_distance(a, b) / max(len(a), len(b))


def classify_provenance(
    suggested: str,
    final: str,
    theta_t: float = THETA_T,
    theta_c: float = THETA_C,
) -> ProvenanceTag:
    """Tag a saved markdown cell: T (taken as suggested), C (co-created),
    H (human). An empty final text is H by definition."""
    if not normalize(final):
        return ProvenanceTag("H", 0.0)
    score = similarity(suggested, final)
    if score >= theta_t:
        return ProvenanceTag("T", score)
    if score >= theta_c:
        return ProvenanceTag("C", score)
    return ProvenanceTag("H", score)
