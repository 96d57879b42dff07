"""Word-level translation table and its EM trainer.

The table holds t(s, e) = p(source token s | target token e), column
normalized over s for every target token e including the virtual NULL
word. Training marginalizes over per-position alignment variables, where
each source position aligns to one target position or to NULL; with all
alignments of a given length equally likely the sentence likelihood is

    p(S | E) = epsilon / (1 + I)^J * prod_j sum_i t(s_j, e_i)

which the closed-form scorer below uses directly and the brute-force
scorer re-derives by enumerating alignment vectors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Corpus, SentencePair, TokenSequence, surfaces
from .errors import EmptyCorpusError, EnumerationSizeError, TableFormatError

SIGN_GIVEN_ENGLISH = "sign_given_english"
ENGLISH_GIVEN_SIGN = "english_given_sign"

# In-memory stand-in for the virtual NULL target word.
NULL = None

DEFAULT_TABLE_FLOOR = 1e-9

BRUTE_FORCE_LIMIT = 10**6

TableKey = tuple[str, "str | None"]


class TranslationTable:
    """Mapping (source token, target token or NULL) -> probability.

    Entries exist only for co-occurring pairs plus (s, NULL) for every
    source token. ``lookup`` never returns less than ``floor`` so scores
    built from it stay finite; EM itself works on the raw entries.
    """

    def __init__(
        self,
        t: dict[TableKey, float],
        direction: str,
        epsilon: float = 1.0,
        floor: float = DEFAULT_TABLE_FLOOR,
    ) -> None:
        if direction not in (SIGN_GIVEN_ENGLISH, ENGLISH_GIVEN_SIGN):
            raise ValueError(f"unknown direction {direction!r}")
        if floor <= 0:
            raise ValueError("floor must be positive")
        self.t = dict(t)
        self.direction = direction
        self.epsilon = epsilon
        self.floor = floor
        self.source_vocab = frozenset(s for s, _ in self.t)
        self.target_vocab = frozenset(e for _, e in self.t if e is not NULL)
        self._candidates: dict[str, tuple[tuple[str, float], ...]] | None = None

    def lookup(self, source: str, target: str | None) -> float:
        value = self.t.get((source, target))
        if value is None or value < self.floor:
            return self.floor
        return value

    def candidates(self, source: str) -> tuple[tuple[str, float], ...]:
        """Real target words that have an entry for this source token,
        best probability first (ties broken alphabetically)."""
        if self._candidates is None:
            by_source: dict[str, list[tuple[str, float]]] = {}
            for (s, e), prob in self.t.items():
                if e is not NULL:
                    by_source.setdefault(s, []).append((e, prob))
            for options in by_source.values():
                options.sort(key=lambda item: (-item[1], item[0]))
            self._candidates = {s: tuple(opts) for s, opts in by_source.items()}
        return self._candidates.get(source, ())

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(f"direction {self.direction} epsilon {self.epsilon!r}\n")
            records = sorted(
                self.t.items(), key=lambda item: (item[0][1] or "NULL", item[0][0])
            )
            for (source, target), prob in records:
                target_str = "NULL" if target is NULL else target
                handle.write(f"{source}\t{target_str}\t{prob:.17g}\n")

    @classmethod
    def load(cls, path: str | Path, floor: float = DEFAULT_TABLE_FLOOR) -> "TranslationTable":
        path = Path(path)
        with open(path, encoding="utf-8") as handle:
            header = handle.readline().rstrip("\n").split()
            if len(header) != 4 or header[0] != "direction" or header[2] != "epsilon":
                raise TableFormatError(f"{path}: bad table header")
            direction = header[1]
            epsilon = float(header[3])
            t: dict[TableKey, float] = {}
            for lineno, raw in enumerate(handle, start=2):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                fields = line.split("\t")
                if len(fields) != 3:
                    raise TableFormatError(
                        f"{path}:{lineno}: expected 'source<TAB>target<TAB>prob'"
                    )
                source, target_str, prob_str = fields
                target = NULL if target_str == "NULL" else target_str
                t[(source, target)] = float(prob_str)
        return cls(t, direction, epsilon, floor)


@dataclass(frozen=True)
class EmConfig:
    max_iterations: int = 100
    convergence_tol: float = 1e-4
    epsilon: float = 1.0

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.convergence_tol <= 0:
            raise ValueError("convergence_tol must be positive")
        if not 0 < self.epsilon <= 1:
            raise ValueError("epsilon must be in (0, 1]")


@dataclass(frozen=True)
class EmResult:
    table: TranslationTable
    iterations: int
    log_likelihoods: tuple[float, ...]

    @property
    def final_log_likelihood(self) -> float:
        return self.log_likelihoods[-1]


@dataclass(frozen=True)
class AlignmentPosterior:
    """P(a_j = i | S, E) for source positions j and target positions i,
    where column 0 is NULL. Each row sums to 1."""

    matrix: tuple[tuple[float, ...], ...]


def _pair_sides(pair: SentencePair, direction: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if direction == SIGN_GIVEN_ENGLISH:
        return pair.sign_side.surfaces, pair.english_side.surfaces
    return pair.english_side.surfaces, pair.sign_side.surfaces


def init_uniform(corpus: Corpus, direction: str, epsilon: float = 1.0) -> TranslationTable:
    """Uniform start: each target token's column is uniform over the
    source tokens it co-occurs with; the NULL column is uniform over the
    whole source vocabulary."""
    if not len(corpus):
        raise EmptyCorpusError("cannot initialize a table from an empty corpus")
    source_vocab: dict[str, None] = {}
    support: dict[str, dict[str, None]] = {}
    for pair in corpus:
        src, tgt = _pair_sides(pair, direction)
        for s in src:
            source_vocab[s] = None
        for e in tgt:
            bucket = support.setdefault(e, {})
            for s in src:
                bucket[s] = None
    t: dict[TableKey, float] = {}
    for e, bucket in support.items():
        prob = 1.0 / len(bucket)
        for s in bucket:
            t[(s, e)] = prob
    null_prob = 1.0 / len(source_vocab)
    for s in source_vocab:
        t[(s, NULL)] = null_prob
    return TranslationTable(t, direction, epsilon)


def alignment_posterior(
    source: TokenSequence | Sequence[str],
    target: TokenSequence | Sequence[str],
    table: TranslationTable,
) -> AlignmentPosterior:
    src = surfaces(source)
    tgt = surfaces(target)
    rows = []
    for s in src:
        values = [table.lookup(s, NULL)] + [table.lookup(s, e) for e in tgt]
        total = sum(values)
        rows.append(tuple(v / total for v in values))
    return AlignmentPosterior(tuple(rows))


def em_step(corpus: Corpus, table: TranslationTable) -> TranslationTable:
    """One expectation-maximization update; the input table is unchanged.

    E-step: per source position, distribute unit mass over the target
    positions (NULL first) proportionally to the current t values.
    M-step: renormalize the accumulated counts per target column.
    """
    counts: dict[TableKey, float] = {}
    column_totals: dict[str | None, float] = {}
    for pair in corpus:
        src, tgt = _pair_sides(pair, table.direction)
        targets: list[str | None] = [NULL, *tgt]
        for s in src:
            row = [table.t.get((s, e), 0.0) for e in targets]
            total = sum(row)
            for e, value in zip(targets, row):
                if value == 0.0:
                    continue
                weight = value / total
                key = (s, e)
                counts[key] = counts.get(key, 0.0) + weight
                column_totals[e] = column_totals.get(e, 0.0) + weight
    new_t = {key: c / column_totals[key[1]] for key, c in counts.items()}
    return TranslationTable(new_t, table.direction, table.epsilon, table.floor)


def _raw_row_sum(table: TranslationTable, s: str, targets: Sequence[str]) -> float:
    total = table.t.get((s, NULL), 0.0)
    for e in targets:
        total += table.t.get((s, e), 0.0)
    return total


def _corpus_log_likelihood(corpus: Corpus, table: TranslationTable, epsilon: float) -> float:
    """Training-data log-likelihood under the raw (unfloored) table."""
    total = 0.0
    for pair in corpus:
        src, tgt = _pair_sides(pair, table.direction)
        total += math.log(epsilon) - len(src) * math.log(1 + len(tgt))
        for s in src:
            total += math.log(_raw_row_sum(table, s, tgt))
    return total


def em_train(corpus: Corpus, config: EmConfig, direction: str) -> EmResult:
    """Initialize uniformly once, then iterate em_step until the largest
    absolute change in any t entry drops below the tolerance or the
    iteration cap is hit."""
    table = init_uniform(corpus, direction, config.epsilon)
    log_likelihoods = [_corpus_log_likelihood(corpus, table, config.epsilon)]
    iterations = 0
    for _ in range(config.max_iterations):
        updated = em_step(corpus, table)
        iterations += 1
        delta = max(
            abs(updated.t.get(key, 0.0) - table.t.get(key, 0.0))
            for key in set(table.t) | set(updated.t)
        )
        log_likelihoods.append(_corpus_log_likelihood(corpus, updated, config.epsilon))
        table = updated
        if delta < config.convergence_tol:
            break
    return EmResult(table, iterations, tuple(log_likelihoods))


def translation_logprob(
    source: TokenSequence | Sequence[str],
    target: TokenSequence | Sequence[str],
    table: TranslationTable,
    epsilon: float = 1.0,
) -> float:
    """log p(S | E) in closed form, equal to the sum over all alignment
    vectors. Unknown pairs contribute the table floor."""
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must be in (0, 1]")
    src = surfaces(source)
    tgt = surfaces(target)
    total = math.log(epsilon) - len(src) * math.log(1 + len(tgt))
    for s in src:
        row = table.lookup(s, NULL)
        for e in tgt:
            row += table.lookup(s, e)
        total += math.log(row)
    return total


def brute_force_logprob(
    source: TokenSequence | Sequence[str],
    target: TokenSequence | Sequence[str],
    table: TranslationTable,
    epsilon: float = 1.0,
) -> float:
    """log p(S | E) by explicit enumeration of all (1 + I)^J alignment
    vectors. Guarded against blowup; used as the oracle for the closed
    form."""
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must be in (0, 1]")
    src = surfaces(source)
    tgt = surfaces(target)
    j, i = len(src), len(tgt)
    if (1 + i) ** j > BRUTE_FORCE_LIMIT:
        raise EnumerationSizeError(
            f"(1+{i})^{j} alignments exceed the {BRUTE_FORCE_LIMIT} enumeration guard"
        )
    base = epsilon / (1 + i) ** j
    total = 0.0
    for alignment in itertools.product(range(i + 1), repeat=j):
        prob = base
        for pos, a in enumerate(alignment):
            target_token = NULL if a == 0 else tgt[a - 1]
            prob *= table.lookup(src[pos], target_token)
        total += prob
    return math.log(total)
