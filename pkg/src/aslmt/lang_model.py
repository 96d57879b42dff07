"""Language models: English n-gram scoring and the ASL unigram model.

Both models expose the same two methods the decoder relies on:
``sequence_logprob`` for a complete sentence and ``extension_logprob``
for the change in score when one token is appended. Sequence scoring is
implemented as a fold over extensions, so the two are consistent to the
last bit.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import COMMA, Corpus, TokenSequence, surfaces
from .errors import EmptyCorpusError, NgramFormatError

# Reserved left-context padding token; never a surface token and never
# scored as a token itself.
PAD_TOKEN = "<null>"

DEFAULT_FLOOR_PROB = 1e-7
DEFAULT_COMMA_BOOST = 2.0

Window = tuple[str, ...]


class NgramModel:
    """Fixed-order n-gram model over padded windows.

    Probabilities are conditional: count(window) divided by the total
    count of windows sharing the same (n-1)-token prefix. Windows never
    seen in the counts score ``floor_prob``.
    """

    def __init__(
        self,
        order: int,
        counts: Mapping[Window, int],
        floor_prob: float = DEFAULT_FLOOR_PROB,
    ) -> None:
        if not 1 <= order <= 5:
            raise ValueError(f"order must be in 1..5, got {order}")
        if floor_prob <= 0:
            raise ValueError("floor_prob must be positive")
        self.order = order
        self.floor_prob = floor_prob
        self.counts: dict[Window, int] = {}
        prefix_totals: dict[Window, int] = {}
        for window, count in counts.items():
            window = tuple(window)
            if len(window) != order:
                raise ValueError(f"window {window!r} does not match order {order}")
            if count <= 0:
                raise ValueError(f"count for {window!r} must be positive")
            self.counts[window] = self.counts.get(window, 0) + count
        for window, count in self.counts.items():
            prefix = window[:-1]
            prefix_totals[prefix] = prefix_totals.get(prefix, 0) + count
        self.probs: dict[Window, float] = {
            window: count / prefix_totals[window[:-1]]
            for window, count in self.counts.items()
        }

    def extension_logprob(self, prefix: Sequence[str], token: str) -> float:
        context_len = self.order - 1
        tail = tuple(prefix[len(prefix) - context_len :]) if context_len else ()
        context = (PAD_TOKEN,) * (context_len - len(tail)) + tail
        return math.log(self.probs.get(context + (token,), self.floor_prob))

    def sequence_logprob(self, tokens: Sequence[str]) -> float:
        total = 0.0
        for i, token in enumerate(tokens):
            total += self.extension_logprob(tokens[:i], token)
        return total


def english_logprob(model: NgramModel, sentence: TokenSequence | Sequence[str]) -> float:
    """log P(sentence) under the n-gram model: one window per token, with
    n-1 leading padding tokens. An empty sentence scores 0.0."""
    return model.sequence_logprob(surfaces(sentence))


def ngram_counts(sentences: Iterable[Sequence[str]], order: int) -> dict[Window, int]:
    """Count padded windows over tokenized sentences."""
    counts: dict[Window, int] = {}
    pad = (PAD_TOKEN,) * (order - 1)
    for sentence in sentences:
        padded = pad + tuple(sentence)
        for i in range(len(sentence)):
            window = padded[i : i + order]
            counts[window] = counts.get(window, 0) + 1
    return counts


def build_english_model(
    corpus: Corpus, order: int, floor_prob: float = DEFAULT_FLOOR_PROB
) -> NgramModel:
    if not len(corpus):
        raise EmptyCorpusError("cannot build a language model from an empty corpus")
    counts = ngram_counts((p.english_side.surfaces for p in corpus), order)
    return NgramModel(order, counts, floor_prob)


def load_ngram_file(
    path: str | Path, order: int, floor_prob: float = DEFAULT_FLOOR_PROB
) -> NgramModel:
    """Read an n-gram frequency file: one record per line, a decimal count,
    a TAB, then the n space-separated tokens. Duplicate windows sum."""
    path = Path(path)
    counts: dict[Window, int] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise NgramFormatError(f"{path}:{lineno}: expected 'count<TAB>tokens'")
            try:
                count = int(fields[0])
            except ValueError:
                raise NgramFormatError(f"{path}:{lineno}: bad count {fields[0]!r}") from None
            if count <= 0:
                raise NgramFormatError(f"{path}:{lineno}: count must be positive")
            window = tuple(fields[1].split())
            if len(window) != order:
                raise NgramFormatError(
                    f"{path}:{lineno}: expected {order} tokens, got {len(window)}"
                )
            counts[window] = counts.get(window, 0) + count
    return NgramModel(order, counts, floor_prob)


def save_ngram_file(model: NgramModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for window in sorted(model.counts):
            handle.write(f"{model.counts[window]}\t{' '.join(window)}\n")


class AslUnigramModel:
    """Unigram model over signs with a comma-neighbor adjustment.

    Every sign-side token (including gestures and commas) gets a relative
    frequency. Around each comma the score is reweighted: the token just
    before the comma is damped by ``comma_boost`` and the token just after
    it is boosted by the same factor (capped at probability 1). This
    favors an uncommon sign before the comma and a common one after it.
    """

    def __init__(
        self,
        counts: Mapping[str, int],
        comma_boost: float = DEFAULT_COMMA_BOOST,
        floor_prob: float = DEFAULT_FLOOR_PROB,
    ) -> None:
        if not counts:
            raise EmptyCorpusError("ASL unigram model needs at least one sign")
        if not math.isfinite(comma_boost) or comma_boost < 1.0:
            raise ValueError("comma_boost must be finite and >= 1")
        if floor_prob <= 0:
            raise ValueError("floor_prob must be positive")
        self.counts = dict(counts)
        self.comma_boost = comma_boost
        self.floor_prob = floor_prob
        total = sum(self.counts.values())
        self.unigram: dict[str, float] = {s: c / total for s, c in self.counts.items()}

    def extension_logprob(self, prefix: Sequence[str], token: str) -> float:
        prob = self.unigram.get(token, self.floor_prob)
        if prefix and prefix[-1] == COMMA:
            prob = min(1.0, self.comma_boost * prob)
        delta = math.log(prob)
        if token == COMMA and prefix:
            # The token emitted just before this comma is retroactively
            # damped; dividing its probability by the boost shifts the
            # total score by exactly -log(boost).
            delta -= math.log(self.comma_boost)
        return delta

    def sequence_logprob(self, tokens: Sequence[str]) -> float:
        total = 0.0
        for i, token in enumerate(tokens):
            total += self.extension_logprob(tokens[:i], token)
        return total


def build_asl_model(
    corpus: Corpus,
    comma_boost: float = DEFAULT_COMMA_BOOST,
    floor_prob: float = DEFAULT_FLOOR_PROB,
) -> AslUnigramModel:
    if not len(corpus):
        raise EmptyCorpusError("cannot build a language model from an empty corpus")
    counts: dict[str, int] = {}
    for pair in corpus:
        for surface in pair.sign_side.surfaces:
            counts[surface] = counts.get(surface, 0) + 1
    return AslUnigramModel(counts, comma_boost, floor_prob)


def asl_logprob(model: AslUnigramModel, sentence: TokenSequence | Sequence[str]) -> float:
    return model.sequence_logprob(surfaces(sentence))


def save_asl_model(model: AslUnigramModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(
            f"asl_unigram comma_boost {model.comma_boost!r} floor_prob {model.floor_prob!r}\n"
        )
        for sign in sorted(model.counts):
            handle.write(f"{model.counts[sign]}\t{sign}\n")


def load_asl_model(path: str | Path) -> AslUnigramModel:
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n").split()
        if len(header) != 5 or header[0] != "asl_unigram" or header[1] != "comma_boost":
            raise NgramFormatError(f"{path}: bad ASL model header")
        comma_boost = float(header[2])
        floor_prob = float(header[4])
        counts: dict[str, int] = {}
        for lineno, raw in enumerate(handle, start=2):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise NgramFormatError(f"{path}:{lineno}: expected 'count<TAB>sign'")
            counts[fields[1]] = counts.get(fields[1], 0) + int(fields[0])
    return AslUnigramModel(counts, comma_boost, floor_prob)
