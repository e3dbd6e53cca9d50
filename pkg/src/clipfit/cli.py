"""Command-line interface.

Subcommands: ``train``, ``eval classify|attributes|retrieve``,
``preprocess``, and ``format inspect``. Errors print a single
``error: ...`` line on stderr and map to exit codes: 2 configuration,
3 data, 4 numeric.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import checkpoint as ckpt_io
from . import embfile
from .encoder import DualEncoder, init_encoder
from .errors import ConfigError, DataError, EngineError, MissingTruthError
from .manifest import ImageTextPair, load_registry, write_manifest
from .metrics import attribute_recall, retrieval_recall, zero_shot_classify
from .optim import TrainConfig
from .prompts import FASHION_PROMPTS, FIXED_PROMPT_INDEX, build_class_embeddings, load_template, render_prompt
from .report import EvalReport, write_report
from .textprep import preprocess_caption
from .tokenizer import Tokenizer
from .train import DatasetCache, fit


def _parse_ks(spec: str) -> list[int]:
    ks: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            k = int(part)
        except ValueError as exc:
            raise ConfigError(f"bad k value {part!r} in {spec!r}") from exc
        if k < 1:
            raise ConfigError(f"k values must be positive, got {k}")
        if k not in ks:
            ks.append(k)
    if not ks:
        raise ConfigError(f"no k values in {spec!r}")
    return ks


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        lines = [line.strip() for line in fh if line.strip()]
    if not lines:
        raise DataError(f"{path} contains no entries")
    return lines


def _template(args) -> tuple[str, ...]:
    if getattr(args, "template_file", None):
        return load_template(args.template_file)
    return FASHION_PROMPTS


def _eval_pairs(args) -> tuple[list[ImageTextPair], DatasetCache]:
    manifests = load_registry(args.registry)
    cache = DatasetCache.for_manifests(manifests)
    pairs = [p for m in manifests for p in m.records]
    if getattr(args, "split", None):
        pairs = [p for p in pairs if p.split == args.split]
    if not pairs:
        raise DataError("no evaluation records after filtering")
    return pairs, cache


def _load_encoder(args) -> tuple[DualEncoder, Tokenizer]:
    if not args.checkpoint:
        raise ConfigError("this command needs --checkpoint (or embedding files)")
    encoder = ckpt_io.read_checkpoint(args.checkpoint)
    return encoder, Tokenizer(vocab_size=encoder.vocab_size)


def _class_matrix(encoder, tokenizer, labels, prompt_mode, template) -> np.ndarray:
    mode = "template-ensemble" if prompt_mode == "template" else "fixed"
    return build_class_embeddings(
        labels,
        lambda text: encoder.encode_text(tokenizer.encode(text)),
        mode=mode,
        template=template,
    )


def _query_text_matrix(encoder, tokenizer, pairs, cache, prompt_mode, template) -> np.ndarray:
    """Caption embeddings for retrieval; template mode averages all prompts."""
    rows = []
    for pair in pairs:
        caption = cache.caption(pair)
        if prompt_mode == "template":
            stack = [
                encoder.encode_text(tokenizer.encode(render_prompt(i, caption, template)))
                for i in range(len(template))
            ]
            mean = np.mean(stack, axis=0)
            rows.append(mean / np.linalg.norm(mean))
        else:
            rows.append(
                encoder.encode_text(
                    tokenizer.encode(render_prompt(FIXED_PROMPT_INDEX, caption, template))
                )
            )
    return np.stack(rows)


def _truth_indices(pairs, labels: list[str]) -> list[int]:
    index = {label: i for i, label in enumerate(labels)}
    truths = []
    for pair in pairs:
        if not pair.labels:
            raise MissingTruthError(f"record {pair.id!r} has no labels")
        name = pair.labels[0]
        if name not in index:
            raise MissingTruthError(f"record {pair.id!r} label {name!r} not in label file")
        truths.append(index[name])
    return truths


def _truth_sets(pairs, attributes: list[str]) -> list[list[int]]:
    index = {a: i for i, a in enumerate(attributes)}
    sets = []
    for pair in pairs:
        names = list(pair.labels[1:]) if pair.labels else []
        rows = []
        for name in names:
            if name not in index:
                raise MissingTruthError(
                    f"record {pair.id!r} attribute {name!r} not in attribute file"
                )
            rows.append(index[name])
        sets.append(rows)
    return sets


def _emit(report: EvalReport, report_path) -> None:
    sys.stdout.write(report.to_text())
    if report_path:
        write_report(report, report_path)


# --- subcommand bodies -----------------------------------------------------


def _cmd_train(args) -> int:
    manifests = load_registry(args.registry)
    template = _template(args)
    config = TrainConfig(
        learning_rate=args.learning_rate,
        beta1=args.beta1,
        beta2=args.beta2,
        eps=args.eps,
        weight_decay=args.weight_decay,
        epochs=args.epochs,
        batch_size=args.batch_size,
        seed=args.seed,
        prompt_mode=args.prompt_mode,
        max_steps=args.max_steps,
    )
    cache = DatasetCache.for_manifests(manifests)
    feature_dim = cache.feature_vector(manifests[0].records[0]).size
    encoder = init_encoder(
        feature_dim,
        args.embed_dim,
        vocab_size=args.vocab_size,
        token_dim=args.token_dim,
        seed=args.seed,
    )
    tokenizer = Tokenizer(vocab_size=args.vocab_size)

    def progress(stats) -> None:
        if args.log_every and stats.step % args.log_every == 0:
            print(
                f"step {stats.step} epoch {stats.epoch} loss {stats.loss:.6f} "
                f"t2i {stats.text_to_image:.6f} i2t {stats.image_to_text:.6f} "
                f"tau {stats.tau:.4f}"
            )

    result = fit(manifests, encoder, config, tokenizer, template=template, callback=progress)
    ckpt_io.write_checkpoint(args.out, encoder)
    final = result.history[-1]
    print(f"trained {result.steps} steps, final loss {final.loss:.6f}, wrote {args.out}")
    return 0


def _cmd_eval_classify(args) -> int:
    ks = _parse_ks(args.k)
    labels = _read_lines(args.labels)
    pairs, cache = _eval_pairs(args)
    truths = _truth_indices(pairs, labels)

    if args.image_emb:
        if not args.class_emb:
            raise ConfigError("--image-emb needs --class-emb with one row per label")
        image_embs = _rows_for_ids(embfile.read_embeddings(args.image_emb), [p.id for p in pairs])
        class_embs = _rows_for_ids(embfile.read_embeddings(args.class_emb), labels)
    else:
        encoder, tokenizer = _load_encoder(args)
        template = _template(args)
        class_embs = _class_matrix(encoder, tokenizer, labels, args.prompt_mode, template)
        feats = np.stack([cache.feature_vector(p) for p in pairs])
        image_embs = encoder.encode_image_batch(feats)

    result = zero_shot_classify(image_embs, class_embs, truths, ks)
    metrics = {f"accuracy@{k}": result.accuracy_at[k] for k in ks}
    metrics["weighted_f1"] = result.weighted_f1
    report = EvalReport(
        task="classify",
        prompt_mode=args.prompt_mode,
        metrics=metrics,
        counts={"queries": result.n_queries, "classes": result.n_classes},
    )
    _emit(report, args.report)
    return 0


def _cmd_eval_attributes(args) -> int:
    ks = _parse_ks(args.k)
    attributes = _read_lines(args.attributes)
    pairs, cache = _eval_pairs(args)
    truth_sets = _truth_sets(pairs, attributes)

    if args.image_emb:
        if not args.class_emb:
            raise ConfigError("--image-emb needs --class-emb with one row per attribute")
        image_embs = _rows_for_ids(embfile.read_embeddings(args.image_emb), [p.id for p in pairs])
        attr_embs = _rows_for_ids(embfile.read_embeddings(args.class_emb), attributes)
    else:
        encoder, tokenizer = _load_encoder(args)
        template = _template(args)
        attr_embs = _class_matrix(encoder, tokenizer, attributes, args.prompt_mode, template)
        feats = np.stack([cache.feature_vector(p) for p in pairs])
        image_embs = encoder.encode_image_batch(feats)

    result = attribute_recall(image_embs, attr_embs, truth_sets, ks)
    metrics: dict[str, float] = {}
    for k in ks:
        metrics[f"overall_recall@{k}"] = result.overall_at[k]
    for k in ks:
        metrics[f"per_class_recall@{k}"] = result.per_class_at[k]
    report = EvalReport(
        task="attributes",
        prompt_mode=args.prompt_mode,
        metrics=metrics,
        counts={
            "queries": result.n_queries,
            "attributes": result.n_attributes,
            "excluded": result.excluded,
        },
    )
    _emit(report, args.report)
    return 0


def _rows_for_ids(emb_set: embfile.EmbeddingSet, ids) -> np.ndarray:
    index = emb_set.index()
    missing = [i for i in ids if i not in index]
    if missing:
        raise DataError(f"embedding file lacks ids: {missing[:5]}")
    return emb_set.vectors[[index[i] for i in ids]].astype(np.float64)


def _cmd_eval_retrieve(args) -> int:
    ks = _parse_ks(args.k)
    pairs, cache = _eval_pairs(args)

    if args.text_emb or args.image_emb:
        if not (args.text_emb and args.image_emb):
            raise ConfigError("embedding-file retrieval needs both --text-emb and --image-emb")
        ids = [p.id for p in pairs]
        text_embs = _rows_for_ids(embfile.read_embeddings(args.text_emb), ids)
        image_embs = _rows_for_ids(embfile.read_embeddings(args.image_emb), ids)
    else:
        encoder, tokenizer = _load_encoder(args)
        template = _template(args)
        text_embs = _query_text_matrix(
            encoder, tokenizer, pairs, cache, args.prompt_mode, template
        )
        feats = np.stack([cache.feature_vector(p) for p in pairs])
        image_embs = encoder.encode_image_batch(feats)

    identity = [[i] for i in range(len(pairs))]
    metrics: dict[str, float] = {}
    if args.direction in ("t2i", "both"):
        t2i = retrieval_recall(text_embs, image_embs, identity, ks)
        for k in ks:
            metrics[f"t2i_recall@{k}"] = t2i.recall_at[k]
    if args.direction in ("i2t", "both"):
        i2t = retrieval_recall(image_embs, text_embs, identity, ks)
        for k in ks:
            metrics[f"i2t_recall@{k}"] = i2t.recall_at[k]
    report = EvalReport(
        task="retrieve",
        prompt_mode=args.prompt_mode,
        metrics=metrics,
        counts={"pairs": len(pairs)},
    )
    _emit(report, args.report)
    return 0


def _cmd_preprocess(args) -> int:
    if args.caption is None and args.manifest is None:
        raise ConfigError("preprocess needs --caption or --manifest")
    if args.caption is not None:
        print(preprocess_caption(args.caption))
        return 0
    from .manifest import load_manifest

    manifest = load_manifest(args.manifest)
    if args.out:
        rewritten = [
            ImageTextPair(
                id=p.id,
                source_id=p.source_id,
                caption=preprocess_caption(p.caption),
                image_path=p.image_path,
                features_path=p.features_path,
                labels=p.labels,
                split=p.split,
            )
            for p in manifest.records
        ]
        write_manifest(args.out, rewritten)
        print(f"wrote {len(rewritten)} records to {args.out}")
    else:
        for p in manifest.records:
            print(f"{p.id}\t{preprocess_caption(p.caption)}")
    return 0


def _cmd_format_inspect(args) -> int:
    path = Path(args.path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == embfile.MAGIC:
        info = embfile.describe_embeddings(path)
    elif magic == ckpt_io.MAGIC:
        info = ckpt_io.describe_checkpoint(path)
    else:
        raise DataError(f"unrecognized file magic {magic!r}")
    print(json.dumps(info))
    return 0


# --- argument wiring -------------------------------------------------------


def _add_eval_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--registry", required=True, help="JSONL registry of data sources")
    sub.add_argument("--checkpoint", help="encoder checkpoint to evaluate")
    sub.add_argument("--prompt-mode", choices=("fixed", "template"), default="fixed")
    sub.add_argument("--template-file", help="override prompt template, one per line")
    sub.add_argument("--k", default="1,5,10", help="comma-separated cutoffs")
    sub.add_argument("--report", help="write the text report here (JSON twin alongside)")
    sub.add_argument("--split", help="only evaluate records with this split tag")
    sub.add_argument("--image-emb", help="precomputed image embeddings (OFCE file)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clipfit",
        description="Contrastive image-text engine: train, evaluate, inspect.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    train = subs.add_parser("train", help="fit the dual encoder on a registry of sources")
    train.add_argument("--registry", required=True)
    train.add_argument("--out", required=True, help="checkpoint output path")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--prompt-mode", choices=("fixed", "template"), default="template")
    train.add_argument("--template-file")
    train.add_argument("--learning-rate", type=float, default=5e-7)
    train.add_argument("--beta1", type=float, default=0.9)
    train.add_argument("--beta2", type=float, default=0.98)
    train.add_argument("--eps", type=float, default=1e-6)
    train.add_argument("--weight-decay", type=float, default=0.2)
    train.add_argument("--epochs", type=int, default=60)
    train.add_argument("--batch-size", type=int, default=2048)
    train.add_argument("--max-steps", type=int, default=None)
    train.add_argument("--embed-dim", type=int, default=64)
    train.add_argument("--token-dim", type=int, default=16)
    train.add_argument("--vocab-size", type=int, default=16384)
    train.add_argument("--log-every", type=int, default=10)
    train.set_defaults(func=_cmd_train)

    ev = subs.add_parser("eval", help="evaluate a trained encoder")
    ev_subs = ev.add_subparsers(dest="task", required=True)

    cls = ev_subs.add_parser("classify", help="zero-shot single-label classification")
    _add_eval_common(cls)
    cls.add_argument("--labels", required=True, help="class names, one per line")
    cls.add_argument("--class-emb", help="precomputed class embeddings (OFCE file)")
    cls.set_defaults(func=_cmd_eval_classify)

    attr = ev_subs.add_parser("attributes", help="multi-label attribute recognition")
    _add_eval_common(attr)
    attr.add_argument("--attributes", required=True, help="attribute names, one per line")
    attr.add_argument("--class-emb", help="precomputed attribute embeddings (OFCE file)")
    attr.set_defaults(func=_cmd_eval_attributes)

    ret = ev_subs.add_parser("retrieve", help="cross-modal retrieval over caption pairs")
    _add_eval_common(ret)
    ret.add_argument("--text-emb", help="precomputed caption embeddings (OFCE file)")
    ret.add_argument("--direction", choices=("t2i", "i2t", "both"), default="both")
    ret.set_defaults(func=_cmd_eval_retrieve)

    prep = subs.add_parser("preprocess", help="reduce captions to noun chunks")
    prep.add_argument("--caption", help="single caption to preprocess")
    prep.add_argument("--manifest", help="JSONL manifest whose captions to preprocess")
    prep.add_argument("--out", help="write a rewritten manifest here")
    prep.set_defaults(func=_cmd_preprocess)

    fmt = subs.add_parser("format", help="binary file utilities")
    fmt_subs = fmt.add_subparsers(dest="action", required=True)
    inspect = fmt_subs.add_parser("inspect", help="print header info as JSON")
    inspect.add_argument("path")
    inspect.set_defaults(func=_cmd_format_inspect)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
