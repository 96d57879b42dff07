"""BLEU-2 variant: brevity factor times the plain product of unigram and
bigram precision, plus corpus-mean reporting.

The brevity factor is the uncapped exponential e^(1 - |ref|/|pred|) by
default, which rewards predictions longer than the reference; pass
``capped=True`` for the standard min(1, .) behavior. Precisions use
clipped counts, so repeating a matched token cannot push a precision
above 1.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .corpus import TokenSequence, surfaces

Tokens = "TokenSequence | Sequence[str]"


@dataclass(frozen=True)
class BleuReport:
    p1: float
    p2: float
    brevity: float
    score: float
    pred_len: int
    ref_len: int


def _ngrams(tokens: tuple[str, ...], n: int) -> Counter:
    return Counter(tokens[i : i + n] for i in range(len(tokens) - n + 1))


def ngram_precision(pred: Tokens, ref: Tokens, n: int) -> float:
    """Clipped n-gram precision: each predicted n-gram matches at most as
    many times as it occurs in the reference. Returns 0 when the
    prediction has no n-grams of this order."""
    if n < 1:
        raise ValueError("n must be >= 1")
    pred_tokens = surfaces(pred)
    denominator = max(0, len(pred_tokens) - n + 1)
    if denominator == 0:
        return 0.0
    pred_counts = _ngrams(pred_tokens, n)
    ref_counts = _ngrams(surfaces(ref), n)
    matched = sum(min(count, ref_counts[gram]) for gram, count in pred_counts.items())
    return matched / denominator


def bleu2(pred: Tokens, ref: Tokens, capped: bool = False) -> BleuReport:
    pred_tokens = surfaces(pred)
    ref_tokens = surfaces(ref)
    if not ref_tokens:
        raise ValueError("reference must be non-empty")
    if not pred_tokens:
        return BleuReport(0.0, 0.0, 0.0, 0.0, 0, len(ref_tokens))
    p1 = ngram_precision(pred_tokens, ref_tokens, 1)
    p2 = ngram_precision(pred_tokens, ref_tokens, 2)
    brevity = math.exp(1 - len(ref_tokens) / len(pred_tokens))
    if capped:
        brevity = min(1.0, brevity)
    return BleuReport(p1, p2, brevity, brevity * p1 * p2, len(pred_tokens), len(ref_tokens))


def corpus_mean_bleu(
    pairs: Sequence[tuple[Tokens, Tokens]], capped: bool = False
) -> float:
    """Arithmetic mean of per-sentence BLEU-2 scores."""
    if not pairs:
        raise ValueError("cannot average over an empty list of pairs")
    return sum(bleu2(pred, ref, capped).score for pred, ref in pairs) / len(pairs)
