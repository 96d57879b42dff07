"""Bidirectional ASL-gloss / English statistical translation toolkit.

A word-level translation table trained with expectation-maximization is
composed with direction-specific language models and decoded by a beam
search over coverage-indexed priority queues; translations are scored
with a BLEU-2 variant and compared against rule-based baselines.
"""

__version__ = "0.1.0"

from .align_model import (
    ENGLISH_GIVEN_SIGN,
    NULL,
    SIGN_GIVEN_ENGLISH,
    AlignmentPosterior,
    EmConfig,
    EmResult,
    TranslationTable,
    alignment_posterior,
    brute_force_logprob,
    em_step,
    em_train,
    init_uniform,
    translation_logprob,
)
from .baselines import (
    DEFAULT_HELPERS,
    BilingualLexicon,
    UnigramCost,
    baseline_asl_to_eng,
    baseline_eng_to_asl,
)
from .bleu_eval import BleuReport, bleu2, corpus_mean_bleu, ngram_precision
from .corpus import (
    Corpus,
    DatasetSplit,
    SentencePair,
    Token,
    TokenKind,
    TokenSequence,
    filter_subset,
    load_corpus,
    mini_corpus_path,
    save_corpus,
    split_dataset,
    tokenize_asl,
    tokenize_english,
)
from .decoder import (
    ASL_TO_ENG,
    ENG_TO_ASL,
    DecodeResult,
    DecoderConfig,
    Hypothesis,
    Step,
    decode,
    expand,
    priority,
    translate_corpus,
)
from .errors import AslmtError
from .lang_model import (
    PAD_TOKEN,
    AslUnigramModel,
    NgramModel,
    asl_logprob,
    build_asl_model,
    build_english_model,
    english_logprob,
    load_ngram_file,
)
