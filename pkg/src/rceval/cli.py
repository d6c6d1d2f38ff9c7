"""Command-line entry point.

Subcommands: ingest, stats, score, train (pretrain|finetune),
eval (corr|pairs|per-source|ood|ad|diverge), serve.

Every command resolves its parameters from defaults, then an optional
JSON config file (``--config``), then explicit flags (flags win), and
emits a manifest recording all three plus the hash that reports embed.
Exit codes: 0 success, 1 usage/config error, 2 data validation error,
3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    apply_split,
    build_pretrain_examples,
    corpus_statistics,
    score_histogram,
    filter_exact_match,
    filter_numeric_pairs,
    read_judged,
    read_mc,
    read_minimal_pairs,
    split_by_passage,
    write_judged,
    write_mc,
    write_minimal_pairs,
)
from .errors import DataError, RcevalError, UsageError
from .learned import (
    CorrectnessModel,
    RegressionHead,
    TinyTransformerEncoder,
    TrainConfig,
    finetune,
    load_checkpoint,
    pretrain,
    save_checkpoint,
    training_lock,
)
from .metaeval import (
    TrainRecipe,
    evaluate_correlation,
    evaluate_minimal_pairs,
    import_external_scores,
    learned_metric,
    lexical_metric,
    per_source_correlation,
    run_ad,
    run_ood,
    top_divergences,
    write_score_file,
)
from .util import canonical_json, file_sha256, manifest_hash, subseed

log = logging.getLogger(__name__)

LEXICAL_NAMES = ("bleu1", "rouge_l", "meteor")
METRIC_SPEC_HELP = "bleu1 | rouge_l | meteor | learned:<checkpoint-dir> | import:<score-file>"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def resolve_metric(spec: str):
    if spec in LEXICAL_NAMES:
        return lexical_metric(spec)
    if spec.startswith("learned:"):
        path = spec.split(":", 1)[1]
        if not path:
            raise UsageError("learned metric requires a checkpoint path: learned:<dir>")
        model, _ = load_checkpoint(path)
        if not isinstance(model, CorrectnessModel):
            raise UsageError(f"{path}: checkpoint holds a pre-training head, not a scorer")
        return learned_metric(model, name=f"learned:{path}")
    if spec.startswith("import:"):
        path = spec.split(":", 1)[1]
        if not path:
            raise UsageError("imported metric requires a file path: import:<file>")
        return import_external_scores(path)
    raise UsageError(f"unknown metric {spec!r}; valid: {METRIC_SPEC_HELP}")


def _check_score_coverage(metric, needed_ids) -> None:
    """Imported score files must cover the corpus exactly."""
    mapping = getattr(metric, "mapping", None)
    if mapping is None:
        return
    missing = sorted(set(needed_ids) - set(mapping))
    if missing:
        shown = ", ".join(missing[:10])
        raise DataError(
            f"score file is missing {len(missing)} instance ids "
            f"(first 10: {shown})"
        )


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as f:
            config = json.load(f)
    except FileNotFoundError:
        raise UsageError(f"config file {path} does not exist") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"config file {path}: invalid JSON: {e.msg}") from None
    if not isinstance(config, dict):
        raise UsageError(f"config file {path}: expected a JSON object")
    return config


def _resolve(args: argparse.Namespace, config: dict, defaults: dict) -> dict:
    """defaults <- config file <- explicit flags (None means 'not given')."""
    resolved = dict(defaults)
    for key in defaults:
        if key in config:
            resolved[key] = config[key]
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            resolved[key] = flag_value
    return resolved


def _emit_manifest(out_dir: Path, command: str, args, config, resolved) -> str:
    out_dir.mkdir(parents=True, exist_ok=True)
    flags = {
        k: v
        for k, v in vars(args).items()
        if v is not None and k not in ("func", "command", "subcommand")
    }
    manifest = {
        "tool": f"rceval {__version__}",
        "command": command,
        "config_file": config,
        "flags": flags,
        "resolved": resolved,
    }
    digest = manifest_hash(manifest)
    manifest["manifest_hash"] = digest
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=1, sort_keys=True, default=str) + "\n",
        encoding="utf-8",
    )
    return digest


def _write_report(out_dir: Path, name: str, report) -> None:
    (out_dir / f"{name}.json").write_text(
        json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    text = report.render_text()
    (out_dir / f"{name}.txt").write_text(text + "\n", encoding="utf-8")
    print(text)


# ---------------------------------------------------------------- ingest

def cmd_ingest(args, config) -> int:
    defaults = {
        "kind": "judged",
        "filter_exact": False,
        "filter_numeric": False,
        "assign_splits": None,
        "seed": 0,
        "strict": False,
        "out_dir": "out",
        "out": None,
    }
    r = _resolve(args, config, defaults)
    if not args.inputs:
        raise UsageError("ingest: at least one input file required")
    if r["out"] is None:
        raise UsageError("ingest: --out is required")
    out_dir = Path(r["out_dir"])
    digest = _emit_manifest(out_dir, "ingest", args, config, r)

    dropped = []
    if r["kind"] == "judged":
        records = []
        for path in args.inputs:
            loaded, problems = read_judged(path, strict=r["strict"], require_gold=False)
            records.extend(loaded)
            dropped.extend({"id": str(p), "reason": "validation"} for p in problems)
        if r["filter_exact"]:
            kept = filter_exact_match(records)
            removed = {i.instance_id for i in records} - {i.instance_id for i in kept}
            dropped.extend({"id": i, "reason": "exact match"} for i in sorted(removed))
            records = kept
        if r["filter_numeric"]:
            kept = filter_numeric_pairs(records)
            removed = {i.instance_id for i in records} - {i.instance_id for i in kept}
            dropped.extend({"id": i, "reason": "numeric pair"} for i in sorted(removed))
            records = kept
        if r["assign_splits"]:
            ratios = tuple(float(x) for x in str(r["assign_splits"]).split(","))
            assignment = split_by_passage(records, ratios, seed=r["seed"])
            records = apply_split(records, assignment)
        write_judged(records, r["out"])
    elif r["kind"] == "minimal_pairs":
        records = []
        for path in args.inputs:
            loaded, problems = read_minimal_pairs(path, strict=r["strict"])
            records.extend(loaded)
            dropped.extend({"id": str(p), "reason": "validation"} for p in problems)
        write_minimal_pairs(records, r["out"])
    elif r["kind"] == "mc":
        records = []
        for path in args.inputs:
            loaded, problems = read_mc(path, strict=r["strict"])
            records.extend(loaded)
            dropped.extend({"id": str(p), "reason": "validation"} for p in problems)
        write_mc(records, r["out"])
    else:
        raise UsageError(f"ingest: unknown kind {r['kind']!r}")

    report = {
        "manifest_hash": digest,
        "kept": len(records),
        "dropped": dropped,
    }
    (out_dir / "ingest_report.json").write_text(
        json.dumps(report, indent=1) + "\n", encoding="utf-8"
    )
    print(f"ingest: kept {len(records)}, dropped {len(dropped)} -> {r['out']}")
    for item in dropped:
        print(f"  dropped {item['id']}: {item['reason']}")
    return 0


# ---------------------------------------------------------------- stats

def cmd_stats(args, config) -> int:
    defaults = {"out_dir": "out", "strict": False}
    r = _resolve(args, config, defaults)
    instances, _ = read_judged(args.corpus, strict=r["strict"], require_gold=False)
    report = corpus_statistics(instances)
    out_dir = Path(r["out_dir"])
    _emit_manifest(out_dir, "stats", args, config, r)
    (out_dir / "stats.json").write_text(
        json.dumps(report.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    rows = score_histogram(instances)
    with open(out_dir / "score_histogram.csv", "w", encoding="utf-8") as f:
        f.write("dataset,split,score,count\n")
        for dataset, split, bucket, count in rows:
            f.write(f"{dataset},{split},{bucket},{count}\n")
    print(report.render_text())
    return 0


# ---------------------------------------------------------------- score

def cmd_score(args, config) -> int:
    defaults = {
        "metric": None,
        "corpus": None,
        "kind": "judged",
        "out": None,
        "strict": False,
        "out_dir": "out",
    }
    r = _resolve(args, config, defaults)
    for key in ("metric", "corpus", "out"):
        if r[key] is None:
            raise UsageError(f"score: --{key} is required")
    metric = resolve_metric(r["metric"])
    scores: dict[str, float] = {}
    if r["kind"] == "judged":
        instances, _ = read_judged(r["corpus"], strict=r["strict"], require_gold=False)
        _check_score_coverage(metric, [i.instance_id for i in instances])
        for inst in instances:
            scores[inst.instance_id] = metric.score(
                inst.passage, inst.question, inst.reference, inst.candidate,
                inst.instance_id,
            )
    elif r["kind"] == "minimal_pairs":
        pairs, _ = read_minimal_pairs(r["corpus"], strict=r["strict"])
        _check_score_coverage(
            metric,
            [f"{p.pair_id}::c{k}" for p in pairs for k in (1, 2)],
        )
        for pair in pairs:
            scores[f"{pair.pair_id}::c1"] = metric.score(
                pair.passage, pair.question, pair.reference, pair.candidate_1,
                f"{pair.pair_id}::c1",
            )
            scores[f"{pair.pair_id}::c2"] = metric.score(
                pair.passage, pair.question, pair.reference, pair.candidate_2,
                f"{pair.pair_id}::c2",
            )
    else:
        raise UsageError(f"score: unknown kind {r['kind']!r}")
    write_score_file(scores, r["out"])
    _emit_manifest(Path(r["out_dir"]), "score", args, config, r)
    print(f"score: wrote {len(scores)} scores ({metric.name}) -> {r['out']}")
    return 0


# ---------------------------------------------------------------- train

def _train_manifest(r) -> dict:
    path = r["manifest"]
    if path is None:
        raise UsageError("train: --manifest is required")
    try:
        with open(path, encoding="utf-8") as f:
            manifest = json.load(f)
    except FileNotFoundError:
        raise UsageError(f"train manifest {path} does not exist") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"train manifest {path}: invalid JSON: {e.msg}") from None
    return manifest


DEFAULT_ENCODER = {
    "type": "tiny_transformer",
    "vocab_size": 2048,
    "hidden_size": 32,
    "num_layers": 2,
    "num_heads": 4,
    "ffn_size": 64,
    "max_len": 128,
}


def _config_from_manifest(manifest, phase, seed_override) -> tuple[TrainConfig, list[float]]:
    seed = seed_override if seed_override is not None else manifest.get("seed", 0)
    config = TrainConfig(
        batch_size=manifest.get("batch_size", 32),
        epochs=manifest.get("epochs", 4 if phase == "pretrain" else 3),
        learning_rate=manifest.get("grid", [2e-5])[0],
        seed=seed,
        ablation=frozenset(
            manifest.get("ablation", ["passage", "question", "reference", "candidate"])
        ),
        selection_metric="accuracy" if phase == "pretrain" else "pearson",
        use_bias=manifest.get("use_bias", True),
        selection_pooling=manifest.get("selection_pooling", "pooled"),
    )
    grid = [float(x) for x in manifest.get("grid", [1e-5, 2e-5, 3e-5])]
    return config, grid


def cmd_train(args, config) -> int:
    defaults = {"manifest": None, "out_dir": "out", "seed": None, "strict": False}
    r = _resolve(args, config, defaults)
    manifest = _train_manifest(r)
    phase = args.phase
    out_dir = Path(r["out_dir"])
    ckpt_dir = out_dir / "checkpoint"
    train_config, grid = _config_from_manifest(manifest, phase, r["seed"])
    _emit_manifest(out_dir, f"train {phase}", args, config, dict(r, manifest=manifest))

    fingerprints = {}
    for key in ("corpus", "mc_file"):
        if manifest.get(key):
            fingerprints[key] = file_sha256(manifest[key])

    with training_lock(ckpt_dir):
        marker = ckpt_dir / "in_progress.json"
        marker.write_text(
            json.dumps({"phase": phase, "manifest": manifest.get("name", "unnamed")})
            + "\n",
            encoding="utf-8",
        )
        if phase == "pretrain":
            history = _do_pretrain(manifest, train_config, grid, ckpt_dir, fingerprints, r)
        else:
            history = _do_finetune(manifest, train_config, grid, ckpt_dir, fingerprints, r)
        (out_dir / "history.json").write_text(
            canonical_json(history.to_dict()) + "\n", encoding="utf-8"
        )
        marker.unlink()
    print(f"train {phase}: checkpoint -> {ckpt_dir}")
    print(f"selected: {history.selected}")
    return 0


def _do_pretrain(manifest, train_config, grid, ckpt_dir, fingerprints, r):
    if not manifest.get("mc_file"):
        raise UsageError("pretrain manifest requires 'mc_file'")
    mc_examples, _ = read_mc(manifest["mc_file"], strict=r["strict"])
    pair_rng = random.Random(subseed(train_config.seed, "pretrain-pairs"))
    examples = []
    for mc in mc_examples:
        examples.extend(build_pretrain_examples(mc, pair_rng))
    # global shuffle across source datasets, then held-out tail
    shuffle_rng = random.Random(subseed(train_config.seed, "pretrain-holdout"))
    shuffle_rng.shuffle(examples)
    frac = float(manifest.get("heldout_fraction", 0.1))
    n_held = int(len(examples) * frac)
    heldout = examples[len(examples) - n_held :]
    train = examples[: len(examples) - n_held]

    encoder_desc = dict(DEFAULT_ENCODER, **manifest.get("encoder", {}))
    encoder_desc["seed"] = subseed(train_config.seed, "encoder-init")
    encoder = TinyTransformerEncoder.from_description(encoder_desc)
    encoder, head, history = pretrain(encoder, train, train_config, heldout, lr_grid=grid)
    save_checkpoint(
        ckpt_dir, encoder, head, history, train_config,
        lr_grid=grid, data_fingerprints=fingerprints,
        extra={"phase": "pretrain", "n_train": len(train), "n_heldout": len(heldout)},
    )
    return history


def _do_finetune(manifest, train_config, grid, ckpt_dir, fingerprints, r):
    if not manifest.get("corpus"):
        raise UsageError("finetune manifest requires 'corpus'")
    instances, _ = read_judged(manifest["corpus"], strict=r["strict"])
    exclude = set(manifest.get("exclude_datasets", []))
    instances = [i for i in instances if i.dataset_id not in exclude]
    train = [i for i in instances if i.split == "train"]
    dev = [i for i in instances if i.split == "dev"]

    if manifest.get("init_checkpoint"):
        base, _ = load_checkpoint(manifest["init_checkpoint"])
        encoder = base.encoder
    else:
        encoder_desc = dict(DEFAULT_ENCODER, **manifest.get("encoder", {}))
        encoder_desc["seed"] = subseed(train_config.seed, "encoder-init")
        encoder = TinyTransformerEncoder.from_description(encoder_desc)
    head = RegressionHead(
        encoder.hidden_size,
        use_bias=train_config.use_bias,
        seed=subseed(train_config.seed, "reg-head"),
    )
    model = CorrectnessModel(encoder, head, ablation=train_config.ablation)
    model, history = finetune(model, train, train_config, dev, lr_grid=grid)
    save_checkpoint(
        ckpt_dir, model.encoder, model.head, history, train_config,
        lr_grid=grid, data_fingerprints=fingerprints,
        extra={
            "phase": "finetune",
            "training_datasets": sorted({i.dataset_id for i in train}),
            "selection_datasets": sorted({i.dataset_id for i in dev}),
            "excluded_datasets": sorted(exclude),
        },
    )
    return history


# ---------------------------------------------------------------- eval

def _recipe_from_file(path, seed_override) -> TrainRecipe:
    if path is None:
        raise UsageError("this eval kind requires --recipe")
    try:
        with open(path, encoding="utf-8") as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise UsageError(f"recipe file {path} does not exist") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"recipe file {path}: invalid JSON: {e.msg}") from None
    config_dict = dict(raw.get("config", {}))
    if seed_override is not None:
        config_dict["seed"] = seed_override
    config_dict.setdefault("selection_metric", "pearson")
    try:
        config = TrainConfig.from_dict(config_dict)
    except (TypeError, ValueError) as e:
        raise UsageError(f"recipe file {path}: bad config: {e}") from None
    return TrainRecipe(
        config=config,
        lr_grid=tuple(raw.get("lr_grid", [1e-5, 2e-5, 3e-5])),
        encoder=dict(DEFAULT_ENCODER, **raw.get("encoder", {})),
    )


def cmd_eval(args, config) -> int:
    defaults = {
        "metric": None,
        "corpus": None,
        "pairs": None,
        "splits": None,
        "held_out": None,
        "recipe": None,
        "scores_a": None,
        "scores_b": None,
        "k": 10,
        "tie_epsilon": 0.0,
        "seed": None,
        "strict": False,
        "out_dir": "out",
    }
    r = _resolve(args, config, defaults)
    kind = args.kind
    out_dir = Path(r["out_dir"])
    digest = _emit_manifest(out_dir, f"eval {kind}", args, config, r)

    if kind in ("corr", "per-source"):
        if r["metric"] is None or r["corpus"] is None:
            raise UsageError(f"eval {kind}: --metric and --corpus are required")
        metric = resolve_metric(r["metric"])
        instances, _ = read_judged(r["corpus"], strict=r["strict"])
        if kind == "corr":
            splits = tuple((r["splits"] or "dev,test").split(","))
            selected = [i for i in instances if i.split in splits]
            _check_score_coverage(metric, [i.instance_id for i in selected])
            report = evaluate_correlation(metric, instances, splits=splits)
        else:
            splits = tuple((r["splits"] or "dev").split(","))
            selected = [i for i in instances if i.split in splits]
            _check_score_coverage(metric, [i.instance_id for i in selected])
            report = per_source_correlation(metric, instances, splits=splits)
        report.metadata["manifest_hash"] = digest
        _write_report(out_dir, f"eval_{kind.replace('-', '_')}", report)
        return 0

    if kind == "pairs":
        if r["metric"] is None or r["pairs"] is None:
            raise UsageError("eval pairs: --metric and --pairs are required")
        metric = resolve_metric(r["metric"])
        pairs, _ = read_minimal_pairs(r["pairs"], strict=r["strict"])
        _check_score_coverage(
            metric, [f"{p.pair_id}::c{k}" for p in pairs for k in (1, 2)]
        )
        report = evaluate_minimal_pairs(metric, pairs, tie_epsilon=float(r["tie_epsilon"]))
        report.metadata["manifest_hash"] = digest
        _write_report(out_dir, "eval_pairs", report)
        return 0

    if kind == "ood":
        if r["corpus"] is None or r["held_out"] is None:
            raise UsageError("eval ood: --corpus and --held-out are required")
        recipe = _recipe_from_file(r["recipe"], r["seed"])
        instances, _ = read_judged(r["corpus"], strict=r["strict"])
        pairs = []
        if r["pairs"]:
            pairs, _ = read_minimal_pairs(r["pairs"], strict=r["strict"])
        info, corr, pref = run_ood(
            instances, pairs, recipe, held_out=r["held_out"],
            checkpoint_dir=out_dir / "checkpoint",
        )
        _write_report(out_dir, "eval_ood_corr", corr)
        if pref.per_dataset:
            _write_report(out_dir, "eval_ood_pairs", pref)
        print(f"checkpoint: {info.path}")
        return 0

    if kind == "ad":
        if r["corpus"] is None:
            raise UsageError("eval ad: --corpus is required")
        recipe = _recipe_from_file(r["recipe"], r["seed"])
        instances, _ = read_judged(r["corpus"], strict=r["strict"])
        info, corr = run_ad(instances, recipe, checkpoint_dir=out_dir / "checkpoint")
        _write_report(out_dir, "eval_ad_corr", corr)
        print(f"checkpoint: {info.path}")
        return 0

    if kind == "diverge":
        if r["scores_a"] is None or r["scores_b"] is None:
            raise UsageError("eval diverge: --scores-a and --scores-b are required")
        a = import_external_scores(r["scores_a"]).mapping
        b = import_external_scores(r["scores_b"]).mapping
        entries = top_divergences(a, b, int(r["k"]))
        payload = {
            "manifest_hash": digest,
            "entries": [e.to_dict() for e in entries],
        }
        (out_dir / "eval_diverge.json").write_text(
            json.dumps(payload, indent=1) + "\n", encoding="utf-8"
        )
        for e in entries:
            print(f"{e.rank:>3} {e.instance_id:20} a={e.score_a:.4f} b={e.score_b:.4f} Δ={e.delta:.4f}")
        return 0

    raise UsageError(f"unknown eval kind {kind!r}")


# ---------------------------------------------------------------- serve

def cmd_serve(args, config) -> int:
    defaults = {"models": None, "port": 8080, "host": "127.0.0.1", "out_dir": "out"}
    r = _resolve(args, config, defaults)
    if r["models"] is None:
        raise UsageError("serve: --models manifest is required")
    try:
        with open(r["models"], encoding="utf-8") as f:
            manifest = json.load(f)
    except FileNotFoundError:
        raise UsageError(f"models manifest {r['models']} does not exist") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"models manifest {r['models']}: invalid JSON: {e.msg}") from None
    if not isinstance(manifest, dict) or not manifest:
        raise UsageError("models manifest must map names to metric specs")
    registry = {name: resolve_metric(spec) for name, spec in manifest.items()}

    from .service import serve

    serve(registry, host=r["host"], port=int(r["port"]))
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> _Parser:
    parser = _Parser(prog="rceval", description=__doc__)
    parser.add_argument("--version", action="version", version=f"rceval {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--strict", action=argparse.BooleanOptionalAction, default=None,
                        help="abort on the first invalid record")
    common.add_argument("--out-dir", dest="out_dir", default=None)

    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", parents=[common], help="validate/filter/split corpora")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--kind", choices=("judged", "minimal_pairs", "mc"), default=None)
    p.add_argument("--out")
    p.add_argument("--filter-exact", dest="filter_exact",
                   action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--filter-numeric", dest="filter_numeric",
                   action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--assign-splits", dest="assign_splits",
                   help="train,dev,test ratios, e.g. 0.8,0.1,0.1")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", parents=[common], help="corpus statistics")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("score", parents=[common], help="write a score file")
    p.add_argument("--metric", help=METRIC_SPEC_HELP)
    p.add_argument("--corpus")
    p.add_argument("--kind", choices=("judged", "minimal_pairs"), default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("train", parents=[common], help="train the learned metric")
    p.add_argument("phase", choices=("pretrain", "finetune"))
    p.add_argument("--manifest", help="JSON training manifest")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", parents=[common], help="meta-evaluation reports")
    p.add_argument("kind", choices=("corr", "pairs", "per-source", "ood", "ad", "diverge"))
    p.add_argument("--metric", help=METRIC_SPEC_HELP)
    p.add_argument("--corpus")
    p.add_argument("--pairs")
    p.add_argument("--splits", help="comma-separated split names")
    p.add_argument("--held-out", dest="held_out")
    p.add_argument("--recipe", help="JSON train recipe for ood/ad")
    p.add_argument("--scores-a", dest="scores_a")
    p.add_argument("--scores-b", dest="scores_b")
    p.add_argument("-k", type=int, default=None)
    p.add_argument("--tie-epsilon", dest="tie_epsilon", type=float, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", parents=[common], help="HTTP scoring service")
    p.add_argument("--models", help="JSON manifest mapping names to metric specs")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_config_file(getattr(args, "config", None))
        return args.func(args, config)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except DataError as e:
        print(f"data error: {e}", file=sys.stderr)
        return 2
    except RcevalError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except KeyboardInterrupt:
        return 3


if __name__ == "__main__":
    sys.exit(main())
