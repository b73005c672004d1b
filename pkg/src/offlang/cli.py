"""Command-line entry point: train, predict, evaluate, select, baseline.

Every run is driven by a RunConfig assembled from defaults, then any
--config files or presets (in order), then individual --key flags.  All
errors exit with code 1 and a message naming the config key involved.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Mapping, Sequence, TypeVar

from .config import CONFIG_KEYS, PRESET_NAMES, RunConfig, apply_pairs, resolve_config
from .corpus import (
    CLASS_ORDER,
    Corpus,
    Instance,
    parse_olid,
    read_predictions,
    write_predictions,
)
from .errors import OfflangError
from .features import (
    DEFAULT_CONNECTIVES,
    GROUP_SLOTS,
    EmojiLexicon,
    EntityAnnotation,
    FeatureConfig,
    assemble,
    aux_features,
    char_ngrams,
    load_connectives,
    load_emoji_lexicon,
    load_entity_annotations,
    normalize,
    stack_vectors,
)
from .metrics import (
    constant_baseline,
    evaluate,
    permute_labels,
    render_report,
    render_structured,
    report_from_confusion,
)
from .selection import (
    FeatureSpace,
    rank_ngrams,
    read_space,
    select_top_k,
    write_space,
)
from .selection import escape_payload
from .svm import SvmConfig, predict_labels, read_model, train_ovr, write_model

T = TypeVar("T")


def _require(cfg: RunConfig, key: str) -> str:
    value = getattr(cfg, key)
    if not value:
        raise OfflangError(f"config key {key!r} is required for this command")
    return value


def _with_key(key: str, fn: Callable[..., T], *args, **kwargs) -> T:
    """Attach the config key to any error raised while using its value."""
    try:
        return fn(*args, **kwargs)
    except OfflangError as exc:
        raise OfflangError(f"config key {key!r}: {exc}") from None


def _resolve_threads(cfg: RunConfig) -> int:
    if cfg.threads > 0:
        return cfg.threads
    env = os.environ.get("OFFLANG_THREADS", "").strip()
    if env:
        try:
            threads = int(env)
        except ValueError:
            raise OfflangError(
                f"environment variable OFFLANG_THREADS: expected an integer, got {env!r}"
            ) from None
        if threads < 1:
            raise OfflangError(
                f"environment variable OFFLANG_THREADS: must be >= 1, got {threads}"
            )
        return threads
    return os.cpu_count() or 1


def _feature_config(cfg: RunConfig) -> FeatureConfig:
    fc = FeatureConfig(
        use_ngrams=cfg.use_ngrams,
        use_linguistic=cfg.use_linguistic,
        use_emoticon=cfg.use_emoticon,
        use_emoji=cfg.use_emoji,
        use_entity=cfg.use_entity,
        n_min=cfg.n_min,
        n_max=cfg.n_max,
    )
    if not fc.use_ngrams and not fc.active_groups:
        raise OfflangError(
            "no feature groups are active; enable use_ngrams or an auxiliary group"
        )
    return fc


def _feature_config_from_space(space: FeatureSpace) -> FeatureConfig:
    """Reconstruct the featurization settings a frozen space encodes."""
    active: list[str] = []
    for slot in space.aux_slots:
        group = slot.split(":", 1)[0]
        if group not in GROUP_SLOTS:
            raise OfflangError(f"feature-space aux slot {slot!r} names no known group")
        if group not in active:
            active.append(group)
    expected = tuple(
        f"{group}:{name}" for group in GROUP_SLOTS if group in active
        for name in GROUP_SLOTS[group]
    )
    if tuple(space.aux_slots) != expected:
        raise OfflangError(
            "feature-space aux slots are not the complete groups in canonical order; "
            f"got {space.aux_slots}"
        )
    lengths = {len(ng) for ng in space.ngram_slots}
    return FeatureConfig(
        use_ngrams=bool(space.ngram_slots),
        use_linguistic="linguistic" in active,
        use_emoticon="emoticon" in active,
        use_emoji="emoji" in active,
        use_entity="entity" in active,
        n_min=min(lengths) if lengths else 2,
        n_max=max(lengths) if lengths else 7,
    )


def _load_aux_resources(
    cfg: RunConfig, fc: FeatureConfig
) -> tuple[tuple[str, ...], EmojiLexicon | None, Mapping[str, EntityAnnotation]]:
    connectives = (
        _with_key("connectives", load_connectives, cfg.connectives)
        if cfg.connectives
        else DEFAULT_CONNECTIVES
    )
    lexicon = None
    if fc.use_emoji:
        lexicon = _with_key(
            "emoji_lexicon", load_emoji_lexicon, _require(cfg, "emoji_lexicon")
        )
    annotations: Mapping[str, EntityAnnotation] = {}
    if fc.use_entity:
        annotations = _with_key(
            "entities", load_entity_annotations, _require(cfg, "entities")
        )
    return tuple(connectives), lexicon, annotations


def _featurize(
    instances: Sequence[Instance],
    space: FeatureSpace,
    fc: FeatureConfig,
    connectives: tuple[str, ...],
    lexicon: EmojiLexicon | None,
    annotations: Mapping[str, EntityAnnotation],
    threads: int,
):
    def one(inst: Instance):
        aux = aux_features(
            inst.text,
            connectives=connectives,
            emoji_lexicon=lexicon if fc.use_emoji else None,
            annotation=annotations.get(inst.id) if fc.use_entity else None,
        )
        return assemble(inst.text, space, aux, fc)

    if threads > 1 and len(instances) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            vectors = list(pool.map(one, instances))
    else:
        vectors = [one(inst) for inst in instances]
    return stack_vectors(vectors)


def _labeled_corpus(cfg: RunConfig, key: str) -> Corpus:
    path = _require(cfg, key)
    corpus = _with_key(key, parse_olid, path, cfg.task)
    labeled = corpus.filter_labeled()
    if len(labeled) == 0:
        raise OfflangError(
            f"config key {key!r}: {path} has no rows labeled for task {cfg.task}"
        )
    return labeled


def _ranked_candidates(cfg: RunConfig, labeled: Corpus):
    bags = [
        char_ngrams(normalize(inst.text), cfg.n_min, cfg.n_max) for inst in labeled
    ]
    return rank_ngrams(bags, labeled.labels(), cfg.min_df)


def _task_for_classes(classes: Sequence[str]) -> str | None:
    for task, order in CLASS_ORDER.items():
        if tuple(classes) == order:
            return task
    return None


def cmd_train(cfg: RunConfig) -> None:
    model_path = _require(cfg, "model")
    space_path = cfg.space or model_path + ".space"
    labeled = _labeled_corpus(cfg, "train")
    fc = _feature_config(cfg)

    if fc.use_ngrams:
        ngram_slots = select_top_k(_ranked_candidates(cfg, labeled), cfg.k).ngram_slots
    else:
        ngram_slots = ()
    space = FeatureSpace(ngram_slots, fc.aux_slot_names())

    connectives, lexicon, annotations = _load_aux_resources(cfg, fc)
    X = _featurize(
        labeled.instances, space, fc, connectives, lexicon, annotations,
        _resolve_threads(cfg),
    )
    svm_cfg = SvmConfig(
        C=cfg.C, tolerance=cfg.tolerance, max_epochs=cfg.max_epochs, seed=cfg.seed
    )
    model = train_ovr(X, labeled.labels(), labeled.classes, svm_cfg, space.fingerprint)
    write_space(space, space_path)
    write_model(model, model_path)
    print(
        f"wrote space {space_path} "
        f"({len(space.ngram_slots)} n-gram slots, {len(space.aux_slots)} aux slots)"
    )
    print(f"wrote model {model_path} ({len(model.classes)} classes, dimension {model.dimension})")


def cmd_predict(cfg: RunConfig) -> None:
    model_path = _require(cfg, "model")
    space_path = cfg.space or model_path + ".space"
    input_path = _require(cfg, "input")
    out_path = _require(cfg, "predictions")

    model = _with_key("model", read_model, model_path)
    space = _with_key("space", read_space, space_path)
    if space.fingerprint != model.space_fingerprint:
        raise OfflangError(
            f"feature space {space_path} does not match the space the model was "
            f"trained on (fingerprint mismatch)"
        )
    fc = _feature_config_from_space(space)
    task = _task_for_classes(model.classes) or cfg.task
    corpus = _with_key("input", parse_olid, input_path, task)
    if len(corpus) == 0:
        write_predictions([], out_path)
        print(f"wrote predictions {out_path} (0 rows)")
        return
    connectives, lexicon, annotations = _load_aux_resources(cfg, fc)
    X = _featurize(
        corpus.instances, space, fc, connectives, lexicon, annotations,
        _resolve_threads(cfg),
    )
    labels = predict_labels(model, X)
    write_predictions([(inst.id, lab) for inst, lab in zip(corpus, labels)], out_path)
    print(f"wrote predictions {out_path} ({len(labels)} rows)")


def _parse_permutation(spec_str: str, classes: Sequence[str]) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for part in spec_str.split(","):
        src, sep, dst = part.partition("=")
        if not sep or not src.strip() or not dst.strip():
            raise OfflangError(
                f"--permute expects OLD=NEW pairs separated by commas, got {spec_str!r}"
            )
        mapping[src.strip()] = dst.strip()
    for cls in classes:
        mapping.setdefault(cls, cls)
    return mapping


def cmd_evaluate(cfg: RunConfig, baseline: str | None, permute: str | None) -> None:
    gold = _labeled_corpus(cfg, "eval")
    if baseline is not None:
        report = constant_baseline(gold, baseline)
    else:
        pred_path = _require(cfg, "predictions")
        predictions = _with_key("predictions", read_predictions, pred_path)
        report = evaluate(gold, predictions)
        if permute is not None:
            mapping = _parse_permutation(permute, gold.classes)
            report = report_from_confusion(permute_labels(report.confusion, mapping))
    sys.stdout.write(render_report(report))
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_structured(report))


def cmd_select(cfg: RunConfig) -> None:
    labeled = _labeled_corpus(cfg, "train")
    ranked = _ranked_candidates(cfg, labeled)
    lines = ["rank\tngram\tgain\tdf"]
    for rank, score in enumerate(ranked, start=1):
        lines.append(
            f"{rank}\t{escape_payload(score.feature)}\t{score.gain!r}\t{score.document_frequency}"
        )
    text = "\n".join(lines) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        print(f"wrote ranking {cfg.output} ({len(ranked)} candidates)")
    else:
        sys.stdout.write(text)


def cmd_baseline(cfg: RunConfig, cls: str) -> None:
    gold = _labeled_corpus(cfg, "eval")
    report = constant_baseline(gold, cls)
    sys.stdout.write(render_report(report))
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8", newline="") as fh:
            fh.write(render_structured(report))


def _add_config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--config",
        action="append",
        default=[],
        metavar="PATH|PRESET",
        help=(
            "config file of key = value lines, or a shipped preset "
            f"({', '.join(PRESET_NAMES)}); repeatable, later files win"
        ),
    )
    for key in CONFIG_KEYS:
        parser.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="offlang",
        description="Offensive-language classification: char n-gram + linear SVM pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="select features, train, write model + space files")
    _add_config_arguments(p_train)

    p_predict = sub.add_parser("predict", help="apply a trained model to a TSV of tweets")
    _add_config_arguments(p_predict)

    p_eval = sub.add_parser("evaluate", help="score a prediction file against gold labels")
    _add_config_arguments(p_eval)
    p_eval.add_argument("--baseline", metavar="CLASS", help="score the constant-CLASS predictor instead")
    p_eval.add_argument("--permute", metavar="OLD=NEW,...", help="re-score after relabeling predictions")

    p_select = sub.add_parser("select", help="emit the IG-ranked n-gram list as TSV")
    _add_config_arguments(p_select)

    p_baseline = sub.add_parser("baseline", help="score a constant-class predictor")
    p_baseline.add_argument("cls", metavar="CLASS")
    _add_config_arguments(p_baseline)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    for source in args.config:
        cfg = apply_pairs(cfg, resolve_config(source))
    flag_pairs = {
        key: value
        for key in CONFIG_KEYS
        if (value := getattr(args, key, None)) is not None
    }
    return apply_pairs(cfg, flag_pairs)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "train":
            cmd_train(cfg)
        elif args.command == "predict":
            cmd_predict(cfg)
        elif args.command == "evaluate":
            cmd_evaluate(cfg, args.baseline, args.permute)
        elif args.command == "select":
            cmd_select(cfg)
        elif args.command == "baseline":
            cmd_baseline(cfg, args.cls)
        else:  # pragma: no cover - argparse enforces the choices
            parser.error(f"unknown command {args.command!r}")
        return 0
    except OfflangError as exc:
        print(f"offlang: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"offlang: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
