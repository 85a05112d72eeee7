"""Command-line entry points.

Exit codes: 0 on success, 2 for usage or data errors, 3 for numeric failures.
Every command emits one run manifest (command, config, seed, input and output
hashes, wall time). It goes next to the primary output file, to the path
given by ``--manifest``, or to stderr for commands that only print.
"""
import argparse
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import fields
from xml.sax.saxutils import escape

import numpy as np

from viddial import __version__
from viddial.baselines import BASELINE_NAMES, LmConfig, make_baseline_scorer
from viddial.corpus import PipelineConfig, build_dataset, corpus_stats, read_triples, write_triples
from viddial.corpus.synthetic import write_corpus
from viddial.encoders import RESERVED, build_vocab
from viddial.errors import ConfigError, DataError, NumericError, ViddialError
from viddial.evaluation import (
    bootstrap_significance,
    constant_scorer,
    evaluate_retrieval,
    meteor_lite,
    oracle_scorer,
    rouge_l,
    write_records,
)
from viddial.models import (
    MODEL_NAMES,
    DiscriminativeConfig,
    GenerativeConfig,
    TrainConfig,
    build_eval_lists,
    build_model,
    featurize,
    train,
)
from viddial.models.checkpoint import load_checkpoint, save_checkpoint
from viddial.models.config import DISCRIMINATIVE_VARIANTS

logger = logging.getLogger("viddial")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
SCORER_NAMES = ("oracle", "constant") + BASELINE_NAMES


# -- configuration ---------------------------------------------------------
def _defaults(cls, drop=()):
    return {f.name: f.default for f in fields(cls) if f.name not in drop}


def default_config():
    """Every tunable with its default value, grouped by section."""
    return {
        "pipeline": _defaults(PipelineConfig),
        "vocab": {"max_size": 27000, "embedding_file": None},
        "discriminative": _defaults(DiscriminativeConfig, drop=("variant",)),
        "generative": _defaults(GenerativeConfig, drop=("variant",)),
        "lm": _defaults(LmConfig),
        "train": _defaults(TrainConfig, drop=("seed",)),
        "eval": {"nearest_neighbor_k": 5, "bootstrap_samples": 100000},
    }


def load_config(path=None):
    cfg = default_config()
    if path is None:
        return cfg
    try:
        with open(path, encoding="utf-8") as fh:
            user = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(user, dict):
        raise ConfigError(f"{path}: top level must be an object")
    for section, values in user.items():
        if section not in cfg:
            raise ConfigError(f"{path}: unknown section {section!r}")
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: section {section!r} must be an object")
        unknown = set(values) - set(cfg[section])
        if unknown:
            raise ConfigError(f"{path}: unknown keys in {section!r}: {sorted(unknown)}")
        cfg[section].update(values)
    return cfg


def model_overrides(cfg, name):
    if name == "lm":
        return dict(cfg["lm"])
    section = "discriminative" if name in DISCRIMINATIVE_VARIANTS else "generative"
    return dict(cfg[section])


# -- manifests -------------------------------------------------------------
def content_hash(data: bytes):
    """Git blob hash of ``data``."""
    h = hashlib.sha1()
    h.update(b"blob %d\0" % len(data))
    h.update(data)
    return h.hexdigest()


def file_hash(path):
    with open(path, "rb") as fh:
        return content_hash(fh.read())


class Run:
    """Collects what a command read and wrote, then writes its manifest."""

    def __init__(self, command, args, config=None):
        self.command = command
        self.seed = getattr(args, "seed", None)
        self.config = config
        self.inputs = {}
        self.outputs = {}
        self.manifest_path = getattr(args, "manifest", None)
        self.started = time.perf_counter()

    def read(self, path):
        if path is not None and os.path.isfile(path):
            self.inputs[path] = file_hash(path)

    def wrote(self, path):
        self.outputs[path] = file_hash(path)

    def printed(self, text):
        self.outputs["<stdout>"] = content_hash(text.encode("utf-8"))

    def finish(self, default_path=None):
        manifest = {
            "command": self.command,
            "version": __version__,
            "config": self.config,
            "seed": self.seed,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "wall_time": round(time.perf_counter() - self.started, 3),
        }
        text = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
        path = self.manifest_path or default_path
        if path is None:
            sys.stderr.write(text)
        else:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(text)
        return manifest


def _emit(run, text):
    sys.stdout.write(text)
    sys.stdout.flush()
    run.printed(text)


# -- shared helpers --------------------------------------------------------
def _model_caps(model):
    c = model.cfg
    return {"video_cap": getattr(c, "video_cap", 60), "chat_cap": getattr(c, "chat_cap", 70),
            "response_cap": getattr(c, "response_cap", 10)}


def check_compatible(model, triples, path):
    """Reject datasets whose features or vocabulary do not fit ``model``."""
    feat_dim = getattr(model, "feat_dim", None)
    if feat_dim is not None:
        dims = {t.video.frames.shape[1] for t in triples if t.video.frames.ndim == 2 and t.video.frames.size}
        bad = dims - {feat_dim}
        if bad:
            raise DataError(f"{path}: frame dimension {sorted(bad)} does not match checkpoint ({feat_dim})")
    known = set(model.vocab.itos[len(RESERVED):])
    tokens = {tok for t in triples for u in t.chat for tok in u.tokens} | {tok for t in triples for tok in t.response}
    if known and tokens and not (tokens & known):
        raise DataError(f"{path}: vocabulary mismatch, no dataset token is in the checkpoint vocabulary")


def _find_instance(examples, instance_id):
    for i, ex in enumerate(examples):
        if ex.instance_id == instance_id:
            return i
    raise DataError(f"instance {instance_id!r} not in dataset")


def _generation_scores(model, examples, max_len=None):
    rouge, meteor, outputs = [], [], []
    for ex in examples:
        tokens, _ = model.generate(ex, max_len)
        refs = ex.references or [tuple(ex.response_tokens)]
        rouge.append(rouge_l(tokens, refs))
        meteor.append(meteor_lite(tokens, refs))
        outputs.append(tokens)
    return rouge, meteor, outputs


def _load_generative(path):
    model = load_checkpoint(path)
    if model.kind != "generative":
        raise DataError(f"{path}: {model.kind} checkpoint cannot generate; a generative model is required")
    return model


# -- commands --------------------------------------------------------------
def cmd_build_dataset(args):
    cfg = load_config(args.config)
    pipe = PipelineConfig(**cfg["pipeline"])
    run = Run("build-dataset", args, cfg["pipeline"])
    frequent = None
    if args.split == "train":
        if args.frequent is not None:
            raise ConfigError("--frequent is only for val/test splits; train derives its own set")
    else:
        if args.frequent is None:
            raise ConfigError(f"--split {args.split} needs --frequent from the train split build")
        run.read(args.frequent)
        with open(args.frequent, encoding="utf-8") as fh:
            frequent = set(json.load(fh))
    for d in (args.chat, args.features):
        if not os.path.isdir(d):
            raise DataError(f"{d}: not a directory")
    for name in sorted(os.listdir(args.chat)):
        run.read(os.path.join(args.chat, name))
    out_dir = os.path.dirname(os.path.abspath(args.out))
    triples, frequent = build_dataset(args.chat, args.features, pipe, frequent, relative_to=out_dir)
    for path in sorted({os.path.join(out_dir, t.video.features_path) for t in triples}):
        run.read(path)
    write_triples(args.out, triples)
    run.wrote(args.out)
    stats_path = args.out + ".stats.json"
    with open(stats_path, "w", encoding="utf-8") as fh:
        json.dump(corpus_stats(triples).to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    run.wrote(stats_path)
    if args.split == "train":
        freq_path = args.out + ".frequent.json"
        with open(freq_path, "w", encoding="utf-8") as fh:
            json.dump(sorted(frequent), fh, indent=1)
            fh.write("\n")
        run.wrote(freq_path)
    print(f"{len(triples)} triples -> {args.out}")
    run.finish(args.out + ".manifest.json")
    return EXIT_OK


def cmd_stats(args):
    run = Run("stats", args)
    run.read(args.dataset)
    report = corpus_stats(read_triples(args.dataset), n_top=args.top)
    _emit(run, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    run.finish()
    return EXIT_OK


def _selection_fn(model, val_examples, seed):
    if model.kind == "discriminative":
        lists = build_eval_lists(val_examples, seed)
        return lambda m: evaluate_retrieval(m, val_examples, seed, lists).recall[1]
    if model.kind == "generative":
        return lambda m: float(np.mean(_generation_scores(m, val_examples)[1]))
    return None


def cmd_train(args):
    cfg = load_config(args.config)
    if args.epochs is not None:
        cfg["train"]["epochs"] = args.epochs
    overrides = model_overrides(cfg, args.model)
    tcfg = TrainConfig(seed=args.seed, **cfg["train"])
    run = Run("train", args, {"model": args.model, "model_config": overrides, "train": tcfg.to_dict(),
                              "vocab": cfg["vocab"]})
    run.read(args.dataset)
    run.read(args.val)
    run.read(cfg["vocab"]["embedding_file"])
    triples = read_triples(args.dataset)
    if not triples:
        raise DataError(f"{args.dataset}: no triples")
    table = build_vocab(triples, cfg["vocab"]["max_size"], overrides["d_emb"], args.seed,
                        cfg["vocab"]["embedding_file"], overrides.get("init_scale", 0.08))
    feat_dim = int(triples[0].video.frames.shape[1])
    model = build_model(args.model, table.vocab, feat_dim, overrides, args.seed, table.weight)
    caps = _model_caps(model)
    examples = featurize(triples, table.vocab, **caps)
    select = None
    if args.val is not None:
        val_triples = read_triples(args.val)
        check_compatible(model, val_triples, args.val)
        select = _selection_fn(model, featurize(val_triples, table.vocab, **caps), args.seed)

    def log_epoch(epoch, loss, _model):
        logger.info("epoch %d/%d loss %.6f", epoch + 1, tcfg.epochs, loss)

    result = train(examples, model, tcfg, select=select, checkpoint_dir=args.checkpoint_dir, on_epoch=log_epoch)
    save_checkpoint(model, args.out, extra={"best_epoch": result.best_epoch})
    run.wrote(args.out)
    trace_path = args.out + ".trace.json"
    with open(trace_path, "w", encoding="utf-8") as fh:
        json.dump({"loss_trace": result.loss_trace, "selection_scores": result.selection_scores,
                   "selection_metric": model.selection_metric() if select else None,
                   "best_epoch": result.best_epoch, "steps": result.steps}, fh, indent=2)
        fh.write("\n")
    run.wrote(trace_path)
    final = result.loss_trace[-1] if result.loss_trace else float("nan")
    print(f"trained {args.model}: {tcfg.epochs} epochs, final loss {final:.6f} -> {args.out}")
    run.finish(args.out + ".manifest.json")
    return EXIT_OK


def _scorer_for(args, cfg, run):
    """Return ``(scorer, model)``; ``model`` is ``None`` for non-checkpoint scorers."""
    if args.ckpt is not None:
        run.read(args.ckpt)
        model = load_checkpoint(args.ckpt)
        if model.kind == "lm":
            raise DataError(f"{args.ckpt}: a language model is not a response ranker; use --scorer")
        return model, model
    if args.scorer == "oracle":
        return oracle_scorer, None
    if args.scorer == "constant":
        return constant_scorer, None
    if args.train_dataset is None:
        raise ConfigError(f"--scorer {args.scorer} needs --train-dataset")
    lm = None
    if args.scorer != "most_frequent":
        if args.lm is None:
            raise ConfigError(f"--scorer {args.scorer} needs --lm (a checkpoint trained with --model lm)")
        run.read(args.lm)
        lm = load_checkpoint(args.lm)
        if lm.kind != "lm":
            raise DataError(f"{args.lm}: expected a language-model checkpoint")
    run.read(args.train_dataset)
    from viddial.encoders import Vocab

    vocab = lm.vocab if lm is not None else Vocab()
    train_examples = featurize(read_triples(args.train_dataset), vocab)
    scorer = make_baseline_scorer(args.scorer, train_examples, lm, cfg["eval"]["nearest_neighbor_k"], args.seed)
    return scorer, None


def _eval_examples(args, model):
    triples = read_triples(args.dataset)
    if not triples:
        raise DataError(f"{args.dataset}: no triples")
    if model is not None:
        check_compatible(model, triples, args.dataset)
        return featurize(triples, model.vocab, **_model_caps(model))
    from viddial.encoders import Vocab

    return featurize(triples, Vocab())


def cmd_evaluate(args):
    cfg = load_config(args.config)
    run = Run("evaluate", args, {"eval": cfg["eval"], "scorer": args.scorer, "ckpt": args.ckpt})
    run.read(args.dataset)
    scorer, model = _scorer_for(args, cfg, run)
    examples = _eval_examples(args, model)
    report = evaluate_retrieval(scorer, examples, seed=args.seed)
    lines = [f"r@{k} {v:.4f}" for k, v in report.recall.items()]
    if model is not None and model.kind == "generative":
        rouge, meteor, outputs = _generation_scores(model, examples)
        for rec, r, m, out in zip(report.records, rouge, meteor, outputs):
            rec.update({"rouge_l": r, "meteor_lite": m, "generated": " ".join(out)})
        lines += [f"rouge_l {np.mean(rouge):.4f}", f"meteor_lite {np.mean(meteor):.4f}"]
    out = args.out or os.path.splitext(args.dataset)[0] + f".{args.scorer or 'model'}.eval.jsonl"
    write_records(out, report.records)
    run.wrote(out)
    _emit(run, "\n".join(lines) + f"\nlists {len(report.records)}\n")
    run.finish(out + ".manifest.json")
    return EXIT_OK


def cmd_rank(args):
    cfg = load_config(args.config)
    run = Run("rank", args, {"scorer": args.scorer, "ckpt": args.ckpt})
    run.read(args.dataset)
    scorer, model = _scorer_for(args, cfg, run)
    examples = _eval_examples(args, model)
    idx = _find_instance(examples, args.instance)
    lists = [cl for cl in build_eval_lists(examples, args.seed) if cl.instance == idx]
    report = evaluate_retrieval(scorer, examples, args.seed, lists)
    rl = report.lists[0]
    lines = [f"instance {rl.instance_id} seed {args.seed}"]
    for rank, i in enumerate(rl.ranking(), start=1):
        mark = "*" if i == rl.positive_index else " "
        lines.append(f"{rank:2d}{mark} {rl.scores[i]: .6f}  {' '.join(rl.candidates[i])}")
    _emit(run, "\n".join(lines) + "\n")
    run.finish()
    return EXIT_OK


def cmd_generate(args):
    run = Run("generate", args, {"ckpt": args.ckpt, "max_len": args.max_len})
    run.read(args.ckpt)
    run.read(args.dataset)
    model = _load_generative(args.ckpt)
    examples = _eval_examples(args, model)
    ex = examples[_find_instance(examples, args.instance)]
    tokens, _ = model.generate(ex, args.max_len)
    _emit(run, " ".join(tokens) + "\n")
    run.finish()
    return EXIT_OK


def _top(weights, k):
    return set(np.argsort(-np.asarray(weights), kind="stable")[:k].tolist())


def _write_tsv(path, labels, tokens, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("token\t" + "\t".join(labels) + "\n")
        for tok, row in zip(tokens, rows):
            fh.write(tok + "\t" + "\t".join(f"{w:.9f}" for w in row) + "\n")


def _svg_panel(x0, y0, title, labels, tokens, rows, top, cell=18):
    parts = [f'<text x="{x0}" y="{y0 - 6}" font-size="12" font-weight="bold">{escape(title)}</text>']
    for r, (tok, row) in enumerate(zip(tokens, rows)):
        y = y0 + r * cell
        parts.append(f'<text x="{x0 - 4}" y="{y + cell - 5}" font-size="11" text-anchor="end">{escape(tok)}</text>')
        peak = max(max(row), 1e-12)
        for c, w in enumerate(row):
            shade = int(255 * (1 - w / peak))
            parts.append(f'<rect x="{x0 + c * cell}" y="{y}" width="{cell}" height="{cell}" '
                         f'fill="rgb({shade},{shade},255)"><title>{w:.4f}</title></rect>')
    yl = y0 + len(rows) * cell + 4
    for c, lab in enumerate(labels):
        x = x0 + c * cell + cell / 2
        color = "#c00" if c in top else "#333"
        weight = "bold" if c in top else "normal"
        parts.append(f'<text x="{x}" y="{yl}" font-size="10" fill="{color}" font-weight="{weight}" '
                     f'transform="rotate(60 {x} {yl})">{escape(lab)}</text>')
        if c in top:
            parts.append(f'<rect x="{x0 + c * cell}" y="{y0}" width="{cell}" height="{len(rows) * cell}" '
                         f'fill="none" stroke="#c00" stroke-width="2"/>')
    return parts, len(labels) * cell, len(rows) * cell + 90


def render_svg(tokens, frame_rows, chat_labels, chat_rows, n_top_frames=3, n_top_words=10):
    """Heatmaps of decoder attention; top frames and words by mean weight are outlined."""
    x0, y, width = 90, 30, 200
    parts = []
    panels = []
    if frame_rows is not None:
        panels.append(("video frames", [str(i) for i in range(len(frame_rows[0]) if frame_rows else 0)],
                       frame_rows, n_top_frames))
    if chat_rows is not None:
        panels.append(("chat context", chat_labels, chat_rows, n_top_words))
    for title, labels, rows, k in panels:
        top = _top(np.mean(rows, axis=0), k) if rows else set()
        p, w, h = _svg_panel(x0, y, title, labels, tokens, rows, top)
        parts += p
        width = max(width, x0 + w + 40)
        y += h + 20
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{y}" '
            f'font-family="monospace">')
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>'] + parts + ["</svg>"]) + "\n"


def cmd_visualize_attention(args):
    run = Run("visualize-attention", args, {"ckpt": args.ckpt, "max_len": args.max_len})
    run.read(args.ckpt)
    run.read(args.dataset)
    model = _load_generative(args.ckpt)
    examples = _eval_examples(args, model)
    ex = examples[_find_instance(examples, args.instance)]
    tokens, steps = model.generate(ex, args.max_len)
    os.makedirs(args.out, exist_ok=True)
    frame_rows = chat_rows = None
    if model.uses_video:
        frame_rows = [s["video"].tolist() for s in steps]
        path = os.path.join(args.out, "video_attention.tsv")
        n = len(ex.frames[-model.cfg.video_cap:])
        _write_tsv(path, [f"frame{i}" for i in range(n)], tokens, frame_rows)
        run.wrote(path)
    chat_labels = list(ex.chat_tokens[-model.cfg.chat_cap:])
    if model.uses_chat:
        chat_rows = [s["chat"].tolist() for s in steps]
        path = os.path.join(args.out, "chat_attention.tsv")
        _write_tsv(path, [f"{i}:{t}" for i, t in enumerate(chat_labels)], tokens, chat_rows)
        run.wrote(path)
    svg_path = os.path.join(args.out, "attention.svg")
    with open(svg_path, "w", encoding="utf-8") as fh:
        fh.write(render_svg(tokens, frame_rows, chat_labels, chat_rows))
    run.wrote(svg_path)
    print(f"{' '.join(tokens)}\n-> {args.out}")
    run.finish(os.path.join(args.out, "manifest.json"))
    return EXIT_OK


def cmd_compare(args):
    run = Run("compare", args, {"samples": args.samples})
    per = []
    for path in (args.a, args.b):
        run.read(path)
        with open(path, encoding="utf-8") as fh:
            recs = {r["instance_id"]: r for r in map(json.loads, filter(str.strip, fh))}
        per.append(recs)
    ids = sorted(set(per[0]) & set(per[1]))
    if not ids:
        raise DataError("the two record files share no instances")
    key = args.metric
    a = [float(per[0][i][key]) for i in ids]
    b = [float(per[1][i][key]) for i in ids]
    p = bootstrap_significance(a, b, n=args.samples, seed=args.seed)
    _emit(run, f"{key} a={np.mean(a):.4f} b={np.mean(b):.4f} n={len(ids)} p={p:.5f}\n")
    run.finish()
    return EXIT_OK


def cmd_synth(args):
    run = Run("synth", args, {"videos": args.videos, "blocks": args.blocks, "feat_dim": args.feat_dim})
    write_corpus(args.out, n_videos=args.videos, n_blocks=args.blocks, feat_dim=args.feat_dim, seed=args.seed,
                 prefix=args.prefix)
    for sub in ("chat", "features"):
        d = os.path.join(args.out, sub)
        for name in sorted(os.listdir(d)):
            run.wrote(os.path.join(d, name))
    print(f"{args.videos} videos -> {args.out}")
    run.finish(os.path.join(args.out, "manifest.json"))
    return EXIT_OK


def cmd_default_config(args):
    sys.stdout.write(json.dumps(default_config(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------
def build_parser():
    p = argparse.ArgumentParser(prog="viddial", description="Video-context chat response ranking and generation.")
    p.add_argument("--version", action="version", version=f"viddial {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=fn)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--manifest", help="manifest path (default: next to the main output, else stderr)")
        return sp

    sp = add("build-dataset", cmd_build_dataset, "build dialogue triples from chat logs and frame features")
    sp.add_argument("--chat", required=True, help="directory of <video>.jsonl chat logs")
    sp.add_argument("--features", required=True, help="directory of <video>.vfea frame features")
    sp.add_argument("--out", required=True, help="output triples JSONL")
    sp.add_argument("--config")
    sp.add_argument("--split", choices=("train", "val", "test"), default="train")
    sp.add_argument("--frequent", help="frequent-utterance list written by the train split build")

    sp = add("stats", cmd_stats, "print dataset statistics")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--top", type=int, default=20)

    sp = add("train", cmd_train, "train a model")
    sp.add_argument("--dataset", required=True)
    sp.add_argument("--model", required=True, choices=MODEL_NAMES)
    sp.add_argument("--config")
    sp.add_argument("--out", required=True, help="checkpoint path")
    sp.add_argument("--val", help="validation triples for model selection")
    sp.add_argument("--epochs", type=int, help="override train.epochs")
    sp.add_argument("--checkpoint-dir", help="also write one checkpoint per epoch here")

    def scorer_args(sp):
        sp.add_argument("--dataset", required=True)
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--ckpt")
        src.add_argument("--scorer", choices=SCORER_NAMES)
        sp.add_argument("--train-dataset", help="training triples for baseline scorers")
        sp.add_argument("--lm", help="language-model checkpoint for representation baselines")
        sp.add_argument("--config")

    sp = add("evaluate", cmd_evaluate, "recall@k over seeded 10-candidate lists")
    scorer_args(sp)
    sp.add_argument("--out", help="per-instance records JSONL")

    sp = add("rank", cmd_rank, "show the scored candidate list of one instance")
    scorer_args(sp)
    sp.add_argument("--instance", required=True, help="instance id, <video>:<window>")

    for name, fn, text in (("generate", cmd_generate, "greedy response for one instance"),
                           ("visualize-attention", cmd_visualize_attention, "export decoder attention maps")):
        sp = add(name, fn, text)
        sp.add_argument("--dataset", required=True)
        sp.add_argument("--ckpt", required=True)
        sp.add_argument("--instance", required=True)
        sp.add_argument("--max-len", type=int, default=None, help="decode steps (default from checkpoint)")
        if name == "visualize-attention":
            sp.add_argument("--out", required=True, help="output directory")

    sp = add("compare", cmd_compare, "paired bootstrap test between two evaluation record files")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--metric", default="r1")
    sp.add_argument("--samples", type=int, default=100000)

    sp = add("synth", cmd_synth, "write a seeded synthetic corpus")
    sp.add_argument("--out", required=True)
    sp.add_argument("--videos", type=int, default=4)
    sp.add_argument("--blocks", type=int, default=2)
    sp.add_argument("--feat-dim", type=int, default=16)
    sp.add_argument("--prefix", default="vid")

    sub.add_parser("default-config", help="print the default configuration").set_defaults(func=cmd_default_config)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ViddialError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
