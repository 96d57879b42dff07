"""Command-line harness: split, train, translate, evaluate, sweep, baseline.

Every command is deterministic given its inputs and flags. Numeric results
are printed twice: a short human-readable section and line-oriented
``record=...`` key=value lines meant for scripts and tests.

Exit codes: 0 success, 1 usage error, 2 data or model error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .align_model import (
    ENGLISH_GIVEN_SIGN,
    SIGN_GIVEN_ENGLISH,
    EmConfig,
    TranslationTable,
    em_train,
)
from .baselines import (
    DEFAULT_HELPERS,
    BilingualLexicon,
    UnigramCost,
    baseline_asl_to_eng,
    baseline_eng_to_asl,
    load_helper_words,
)
from .bleu_eval import bleu2
from .corpus import (
    Corpus,
    TokenSequence,
    filter_subset,
    load_corpus,
    save_corpus,
    split_dataset,
    tokenize_asl,
    tokenize_english,
)
from .decoder import ASL_TO_ENG, ENG_TO_ASL, DecoderConfig, decode, translate_corpus
from .errors import AslmtError, EmptyCorpusError, UsageError
from .lang_model import (
    AslUnigramModel,
    NgramModel,
    build_asl_model,
    build_english_model,
    load_asl_model,
    load_ngram_file,
    save_asl_model,
    save_ngram_file,
)

LM_ORDERS = {"unigram": 1, "bigram": 2, "trigram": 3}
SUBSETS = ("all", "comma", "gesture")
DIRECTIONS = (ASL_TO_ENG, ENG_TO_ASL)

TABLE_FILES = {
    SIGN_GIVEN_ENGLISH: "tm_sign_given_english.tsv",
    ENGLISH_GIVEN_SIGN: "tm_english_given_sign.tsv",
}
ASL_MODEL_FILE = "lm_asl.tsv"
TRAIN_CONFIG_FILE = "train_config.txt"

DEFAULT_SWEEP = {
    ASL_TO_ENG: {"lm_kinds": ["bigram", "trigram"], "queue_sizes": [8, 10, 20], "lm_weights": [0.1, 0.2, 0.3]},
    ENG_TO_ASL: {"lm_kinds": ["unigram"], "queue_sizes": [13, 15, 20], "lm_weights": [0.1, 0.2, 0.3]},
}


def _english_lm_file(order: int) -> str:
    return f"lm_english.{order}.ngrams"


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"expected a boolean, got {text!r}")


def _choice(allowed: Sequence[str]) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in allowed:
            raise UsageError(f"expected one of {', '.join(allowed)}; got {text!r}")
        return text

    return parse


def _int_list(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise UsageError("list flag needs at least one value")
    return values


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise UsageError("list flag needs at least one value")
    return values


def _str_list(allowed: Sequence[str]) -> Callable[[str], list[str]]:
    def parse(text: str) -> list[str]:
        values = [part.strip() for part in text.split(",") if part.strip()]
        if not values:
            raise UsageError("list flag needs at least one value")
        for value in values:
            if value not in allowed:
                raise UsageError(f"expected values from {', '.join(allowed)}; got {value!r}")
        return values

    return parse


# option name -> (default, parser for config-file values)
OPTIONS: dict[str, tuple[object, Callable[[str], object]]] = {
    "direction": (None, _choice(DIRECTIONS)),
    "lm_kind": (None, _choice(tuple(LM_ORDERS))),
    "lm_weight": (0.1, float),
    "queue_size": (20, int),
    "fanout": (5, int),
    "max_words_per_source": (3, int),
    "epsilon": (1.0, float),
    "seed": (0, int),
    "capped_brevity": (False, _parse_bool),
    "subset": ("all", _choice(SUBSETS)),
    "comma_boost": (2.0, float),
    "em_iterations": (100, int),
    "em_tol": (1e-4, float),
    "literal_log_sum": (False, _parse_bool),
    "queue_sizes": (None, _int_list),
    "lm_weights": (None, _float_list),
    "lm_kinds": (None, _str_list(tuple(LM_ORDERS))),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        raise UsageError(message)


def _shared_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value config file; flags override it")
    parser.add_argument("--direction", choices=DIRECTIONS)
    parser.add_argument("--lm-kind", dest="lm_kind", choices=tuple(LM_ORDERS))
    parser.add_argument("--lm-weight", dest="lm_weight", type=float)
    parser.add_argument("--queue-size", dest="queue_size", type=int)
    parser.add_argument("--fanout", type=int)
    parser.add_argument("--max-words-per-source", dest="max_words_per_source", type=int)
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--capped-brevity", dest="capped_brevity", action="store_const", const=True)
    parser.add_argument("--literal-log-sum", dest="literal_log_sum", action="store_const", const=True)
    parser.add_argument("--subset", choices=SUBSETS)
    parser.add_argument("--comma-boost", dest="comma_boost", type=float)


def build_parser() -> _Parser:
    parser = _Parser(prog="aslmt", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    split = commands.add_parser("split", help="write train/dev/test corpus files")
    split.add_argument("corpus")
    split.add_argument("--out", required=True, help="output directory")
    _shared_flags(split)
    split.set_defaults(func=cmd_split)

    train = commands.add_parser("train", help="train translation tables and language models")
    train.add_argument("corpus")
    train.add_argument("--out", required=True, help="model directory")
    train.add_argument("--em-iterations", dest="em_iterations", type=int)
    train.add_argument("--em-tol", dest="em_tol", type=float)
    _shared_flags(train)
    train.set_defaults(func=cmd_train)

    translate = commands.add_parser("translate", help="translate sentences, one per line")
    translate.add_argument("input", nargs="?", help="input file (default: stdin)")
    translate.add_argument("--models", required=True)
    translate.add_argument("--english-ngrams", dest="english_ngrams", help="external n-gram count file for the English LM")
    _shared_flags(translate)
    translate.set_defaults(func=cmd_translate)

    evaluate = commands.add_parser("evaluate", help="translate a test corpus and score with BLEU-2")
    evaluate.add_argument("corpus")
    evaluate.add_argument("--models", required=True)
    evaluate.add_argument("--english-ngrams", dest="english_ngrams")
    _shared_flags(evaluate)
    evaluate.set_defaults(func=cmd_evaluate)

    sweep = commands.add_parser("sweep", help="grid-evaluate queue sizes, weights, and LM kinds")
    sweep.add_argument("corpus", help="development corpus")
    sweep.add_argument("--models", required=True)
    sweep.add_argument("--queue-sizes", dest="queue_sizes", type=_int_list)
    sweep.add_argument("--lm-weights", dest="lm_weights", type=_float_list)
    sweep.add_argument("--lm-kinds", dest="lm_kinds", type=_str_list(tuple(LM_ORDERS)))
    _shared_flags(sweep)
    sweep.set_defaults(func=cmd_sweep)

    baseline = commands.add_parser("baseline", help="score the rule-based baseline on a corpus")
    baseline.add_argument("corpus")
    baseline.add_argument("--models", required=True)
    baseline.add_argument("--helpers", help="helper-word list, one word per line")
    _shared_flags(baseline)
    baseline.set_defaults(func=cmd_baseline)

    return parser


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    return values


def resolve_options(args: argparse.Namespace) -> dict[str, object]:
    opts = {name: default for name, (default, _) in OPTIONS.items()}
    config_path = getattr(args, "config", None)
    if config_path:
        for key, value in _load_config_file(config_path).items():
            if key not in OPTIONS:
                raise UsageError(f"unknown config key {key!r}")
            opts[key] = OPTIONS[key][1](value)
    for name in OPTIONS:
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            opts[name] = flag_value
    return opts


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _record(name: str, fields: Sequence[tuple[str, object]]) -> str:
    return " ".join([f"record={name}"] + [f"{key}={_fmt(value)}" for key, value in fields])


@dataclass
class ModelSet:
    tables: dict[str, TranslationTable]
    english: dict[int, NgramModel]
    asl: AslUnigramModel
    config: dict[str, str]

    @classmethod
    def load(cls, directory: str | Path) -> "ModelSet":
        directory = Path(directory)

        def require(name: str) -> Path:
            path = directory / name
            if not path.exists():
                raise AslmtError(f"missing model file {path}; run 'aslmt train' first")
            return path

        tables = {tag: TranslationTable.load(require(name)) for tag, name in TABLE_FILES.items()}
        english = {order: load_ngram_file(require(_english_lm_file(order)), order) for order in (1, 2, 3)}
        asl = load_asl_model(require(ASL_MODEL_FILE))
        config: dict[str, str] = {}
        for line in require(TRAIN_CONFIG_FILE).read_text(encoding="utf-8").splitlines():
            if line.strip():
                key, _, value = line.partition("=")
                config[key.strip()] = value.strip()
        return cls(tables, english, asl, config)


def _require_direction(opts: dict[str, object]) -> str:
    direction = opts["direction"]
    if direction is None:
        raise UsageError("--direction is required for this command")
    return str(direction)


def _resolve_lm_kind(direction: str, opts: dict[str, object]) -> str:
    lm_kind = opts["lm_kind"]
    if direction == ENG_TO_ASL:
        if lm_kind not in (None, "unigram"):
            raise UsageError("eng_to_asl always scores with the ASL unigram model")
        return "unigram"
    return str(lm_kind) if lm_kind is not None else "trigram"


def _decoder_config(opts: dict[str, object]) -> DecoderConfig:
    return DecoderConfig(
        lm_weight=float(opts["lm_weight"]),
        max_queue_size=int(opts["queue_size"]),
        fanout=int(opts["fanout"]),
        max_words_per_source=int(opts["max_words_per_source"]),
        epsilon=float(opts["epsilon"]),
        literal_log_sum=bool(opts["literal_log_sum"]),
    )


def _select_models(
    models: ModelSet, direction: str, lm_kind: str, english_ngrams: str | None
):
    if direction == ASL_TO_ENG:
        table = models.tables[SIGN_GIVEN_ENGLISH]
        order = LM_ORDERS[lm_kind]
        lm = load_ngram_file(english_ngrams, order) if english_ngrams else models.english[order]
    else:
        table = models.tables[ENGLISH_GIVEN_SIGN]
        lm = models.asl
    return table, lm


def _apply_subset(corpus: Corpus, subset: str) -> Corpus:
    if subset == "all":
        return corpus
    filtered = filter_subset(corpus, f"has_{subset}")
    if not len(filtered):
        raise AslmtError(f"no matching pairs for subset {subset!r}")
    return filtered


def _print_scored(
    scored: Sequence[tuple[int, TokenSequence, TokenSequence]],
    capped: bool,
    summary_fields: Sequence[tuple[str, object]],
) -> float:
    reports = [(pair_id, bleu2(pred, ref, capped), pred, ref) for pair_id, pred, ref in scored]
    for pair_id, report, pred, ref in reports:
        print(f"  {pair_id:>4}  {report.score:.6f}  pred: {pred.render()}")
        print(f"        {'':8}  ref:  {ref.render()}")
    mean = sum(r.score for _, r, _, _ in reports) / len(reports)
    print(f"mean BLEU-2 = {mean:.6f} over {len(reports)} pairs")
    for pair_id, report, _, _ in reports:
        print(
            _record(
                "pair",
                [
                    ("id", pair_id),
                    ("bleu2", report.score),
                    ("p1", report.p1),
                    ("p2", report.p2),
                    ("brevity", report.brevity),
                    ("pred_len", report.pred_len),
                    ("ref_len", report.ref_len),
                ],
            )
        )
    print(_record("summary", list(summary_fields) + [("pairs", len(reports)), ("mean_bleu2", mean)]))
    return mean


def cmd_split(args: argparse.Namespace, opts: dict[str, object]) -> int:
    corpus = load_corpus(args.corpus)
    split = split_dataset(corpus, int(opts["seed"]))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(
        f"split {len(corpus)} pairs with seed {split.seed}: "
        f"train={len(split.train)} dev={len(split.dev)} test={len(split.test)}"
    )
    for name, part in (("train", split.train), ("dev", split.dev), ("test", split.test)):
        path = out / f"{name}.txt"
        save_corpus(part, path)
        print(_record("split", [("part", name), ("pairs", len(part)), ("path", path)]))
    return 0


def cmd_train(args: argparse.Namespace, opts: dict[str, object]) -> int:
    corpus = load_corpus(args.corpus)
    if not len(corpus):
        raise EmptyCorpusError(f"no pairs in {args.corpus}")
    em_config = EmConfig(
        max_iterations=int(opts["em_iterations"]),
        convergence_tol=float(opts["em_tol"]),
        epsilon=float(opts["epsilon"]),
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    print(f"training on {len(corpus)} pairs from {args.corpus}")
    for tag in (SIGN_GIVEN_ENGLISH, ENGLISH_GIVEN_SIGN):
        result = em_train(corpus, em_config, tag)
        result.table.save(out / TABLE_FILES[tag])
        print(
            _record(
                "train",
                [
                    ("table", tag),
                    ("iterations", result.iterations),
                    ("log_likelihood", result.final_log_likelihood),
                ],
            )
        )
    for order in (1, 2, 3):
        save_ngram_file(build_english_model(corpus, order), out / _english_lm_file(order))
    asl_model = build_asl_model(corpus, comma_boost=float(opts["comma_boost"]))
    save_asl_model(asl_model, out / ASL_MODEL_FILE)
    cost = UnigramCost.from_corpus(corpus, build_english_model(corpus, 1))
    echo = [
        ("corpus", args.corpus),
        ("train_pairs", len(corpus)),
        ("em_max_iterations", em_config.max_iterations),
        ("em_convergence_tol", em_config.convergence_tol),
        ("epsilon", em_config.epsilon),
        ("comma_boost", float(opts["comma_boost"])),
        ("unigram_cost_threshold", cost.threshold),
    ]
    with open(out / TRAIN_CONFIG_FILE, "w", encoding="utf-8") as handle:
        for key, value in echo:
            handle.write(f"{key}={_fmt(value)}\n")
    print(f"wrote models to {out}")
    return 0


def cmd_translate(args: argparse.Namespace, opts: dict[str, object]) -> int:
    direction = _require_direction(opts)
    lm_kind = _resolve_lm_kind(direction, opts)
    models = ModelSet.load(args.models)
    table, lm = _select_models(models, direction, lm_kind, args.english_ngrams)
    config = _decoder_config(opts)
    tokenize = tokenize_asl if direction == ASL_TO_ENG else tokenize_english
    if args.input:
        with open(args.input, encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    else:
        lines = sys.stdin.read().splitlines()
    for line in lines:
        result = decode(tokenize(line), table, lm, config)
        print(result.output.render())
    return 0


def cmd_evaluate(args: argparse.Namespace, opts: dict[str, object]) -> int:
    direction = _require_direction(opts)
    lm_kind = _resolve_lm_kind(direction, opts)
    models = ModelSet.load(args.models)
    table, lm = _select_models(models, direction, lm_kind, args.english_ngrams)
    config = _decoder_config(opts)
    corpus = _apply_subset(load_corpus(args.corpus), str(opts["subset"]))
    if not len(corpus):
        raise AslmtError("no pairs to evaluate")
    outputs = dict(translate_corpus(corpus, direction, table, lm, config))
    scored = [
        (
            pair.pair_id,
            outputs[pair.pair_id],
            pair.english_side if direction == ASL_TO_ENG else pair.sign_side,
        )
        for pair in corpus
    ]
    print(f"evaluating direction={direction} subset={opts['subset']} pairs={len(scored)}")
    _print_scored(
        scored,
        bool(opts["capped_brevity"]),
        [
            ("command", "evaluate"),
            ("direction", direction),
            ("lm_kind", lm_kind),
            ("lm_weight", config.lm_weight),
            ("queue_size", config.max_queue_size),
            ("fanout", config.fanout),
            ("epsilon", config.epsilon),
            ("capped", bool(opts["capped_brevity"])),
            ("subset", str(opts["subset"])),
        ],
    )
    return 0


def cmd_sweep(args: argparse.Namespace, opts: dict[str, object]) -> int:
    direction = _require_direction(opts)
    defaults = DEFAULT_SWEEP[direction]
    kinds = opts["lm_kinds"] or defaults["lm_kinds"]
    queues = opts["queue_sizes"] or defaults["queue_sizes"]
    weights = opts["lm_weights"] or defaults["lm_weights"]
    if direction == ENG_TO_ASL and any(kind != "unigram" for kind in kinds):
        raise UsageError("eng_to_asl always scores with the ASL unigram model")
    models = ModelSet.load(args.models)
    corpus = load_corpus(args.corpus)
    if not len(corpus):
        raise AslmtError("no pairs in the development corpus")
    capped = bool(opts["capped_brevity"])
    base = _decoder_config(opts)
    print(
        f"sweep direction={direction} dev_pairs={len(corpus)} "
        f"cells={len(kinds) * len(queues) * len(weights)}"
    )
    rows = []
    for kind in sorted(kinds):
        table, lm = _select_models(models, direction, kind, None)
        for queue_size in sorted(queues):
            for weight in sorted(weights):
                config = DecoderConfig(
                    lm_weight=weight,
                    max_queue_size=queue_size,
                    fanout=base.fanout,
                    max_words_per_source=base.max_words_per_source,
                    epsilon=base.epsilon,
                    literal_log_sum=base.literal_log_sum,
                )
                outputs = dict(translate_corpus(corpus, direction, table, lm, config))
                total = 0.0
                for pair in corpus:
                    ref = pair.english_side if direction == ASL_TO_ENG else pair.sign_side
                    total += bleu2(outputs[pair.pair_id], ref, capped).score
                mean = total / len(corpus)
                rows.append((kind, queue_size, weight, mean))
                print(
                    _record(
                        "sweep",
                        [
                            ("lm_kind", kind),
                            ("queue_size", queue_size),
                            ("lm_weight", weight),
                            ("mean_bleu2", mean),
                        ],
                    )
                )
    best = rows[0]
    for row in rows[1:]:
        if row[3] > best[3]:
            best = row
    print(
        _record(
            "best",
            [
                ("lm_kind", best[0]),
                ("queue_size", best[1]),
                ("lm_weight", best[2]),
                ("mean_bleu2", best[3]),
            ],
        )
    )
    return 0


def cmd_baseline(args: argparse.Namespace, opts: dict[str, object]) -> int:
    direction = _require_direction(opts)
    models = ModelSet.load(args.models)
    corpus = _apply_subset(load_corpus(args.corpus), str(opts["subset"]))
    if not len(corpus):
        raise AslmtError("no pairs to evaluate")
    lexicon = BilingualLexicon.from_table(models.tables[SIGN_GIVEN_ENGLISH])
    scored = []
    if direction == ASL_TO_ENG:
        helpers = load_helper_words(args.helpers) if args.helpers else DEFAULT_HELPERS
        for pair in corpus:
            pred = baseline_asl_to_eng(pair.sign_side, lexicon, models.english[2], helpers)
            scored.append((pair.pair_id, pred, pair.english_side))
    else:
        try:
            threshold = float(models.config["unigram_cost_threshold"])
        except (KeyError, ValueError):
            raise AslmtError("model directory lacks a usable unigram_cost_threshold") from None
        cost = UnigramCost(models.english[1], threshold)
        for pair in corpus:
            pred = baseline_eng_to_asl(pair.english_side, cost, lexicon)
            scored.append((pair.pair_id, pred, pair.sign_side))
    print(f"baseline direction={direction} subset={opts['subset']} pairs={len(scored)}")
    _print_scored(
        scored,
        bool(opts["capped_brevity"]),
        [
            ("command", "baseline"),
            ("direction", direction),
            ("capped", bool(opts["capped_brevity"])),
            ("subset", str(opts["subset"])),
        ],
    )
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opts = resolve_options(args)
        return args.func(args, opts)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (AslmtError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())
