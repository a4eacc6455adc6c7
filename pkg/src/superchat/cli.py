"""Command-line entry point: prepare, train, eval, render, chat, serve.

Every subcommand is deterministic given the config and seed (serve
excepted for timing). Failures exit nonzero with a single-line
diagnostic on stderr.
"""

import argparse
import sys

from . import corpus as corpus_mod
from .checkpoint import load_checkpoint, save_checkpoint
from .config import resolve_config
from .decode import decode_beam, decode_greedy, format_trace
from .errors import SuperChatError
from .manifest import read_manifest, write_manifest
from .network import init_model
from .render import export_png, render
from .train import Hyperparams, RenderContext, evaluate, train, write_curve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superchat",
        description="Dialogue generation by rendering text into images and "
        "classifying the next response character.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--profile", default="paper", help="paper or desk")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--font", default=None, help="font file; switches the glyph source")
        for key, flag in (
            ("image_px", "--layout.image-px"),
            ("margin_px", "--layout.margin-px"),
            ("grid_rows", "--layout.grid-rows"),
            ("grid_cols", "--layout.grid-cols"),
            ("input_rows", "--layout.input-rows"),
            ("channels", "--layout.channels"),
        ):
            p.add_argument(flag, dest=key, type=int, default=None)

    p = sub.add_parser("prepare", help="corpus -> manifest + stats")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--format", dest="corpus_format", choices=("tsv", "conv"), default=None)
    p.add_argument("--out", required=True, help="manifest directory")
    p.add_argument("--min-frequency", dest="min_frequency", type=int, default=None)
    p.add_argument("--input-cut", dest="input_cut", type=int, default=None)
    p.add_argument("--response-cut", dest="response_cut", type=int, default=None)
    p.add_argument("--train-fraction", dest="train_fraction", type=float, default=None)

    p = sub.add_parser("train", help="train a model over a manifest")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--checkpoint", required=True, help="output checkpoint path")
    p.add_argument("--curve", default=None, help="learning-curve CSV path")
    p.add_argument("--resume", default=None, help="checkpoint to continue from")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p.add_argument("--learning-rate", dest="learning_rate", type=float, default=None)
    p.add_argument("--momentum", type=float, default=None)
    p.add_argument("--max-iterations", dest="max_iterations", type=int, default=None)
    p.add_argument("--eval-interval", dest="eval_interval", type=int, default=None)
    p.add_argument(
        "--stop-train-accuracy", dest="stop_train_accuracy", type=float, default=None
    )
    p.add_argument("--conv-filters", dest="conv_filters", default=None)
    p.add_argument("--fc-width", dest="fc_width", type=int, default=None)

    p = sub.add_parser("eval", help="accuracy over a manifest split")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", choices=("train", "test"), default="test")

    p = sub.add_parser("render", help="render one image to PNG")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--partial", default="")
    p.add_argument("--out", required=True)

    p = sub.add_parser("chat", help="interactive decode loop on stdin")
    common(p)
    p.add_argument("--manifest", required=True, help="manifest (for the vocabulary)")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--beam", type=int, default=None, help="beam width (default greedy)")
    p.add_argument("--trace", action="store_true", help="print the step trace")

    p = sub.add_parser("serve", help="run the HTTP service")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--bind", default="127.0.0.1:8787", help="host:port")
    p.add_argument("--ui", default=None, help="static UI directory to mount at /")

    return parser


_CONFIG_KEYS = (
    "image_px", "margin_px", "grid_rows", "grid_cols", "input_rows", "channels",
    "seed", "corpus", "corpus_format", "min_frequency", "input_cut",
    "response_cut", "train_fraction", "epochs", "batch_size", "learning_rate",
    "momentum", "max_iterations", "eval_interval", "stop_train_accuracy",
    "conv_filters", "fc_width", "checkpoint",
)


def _config_from_args(args) -> "RunConfig":
    overrides = {
        key: getattr(args, key) for key in _CONFIG_KEYS if hasattr(args, key)
    }
    if getattr(args, "font", None):
        overrides["glyph_source"] = f"font:{args.font}"
    return resolve_config(
        profile=args.profile, config_file=args.config, overrides=overrides
    )


def _prepare_corpus(cfg):
    pairs = corpus_mod.ingest(cfg.corpus, cfg.corpus_format)
    normalized = corpus_mod.normalize_pairs(pairs)
    vocab = corpus_mod.build_vocabulary(normalized, cfg.min_frequency)
    filtered = corpus_mod.filter_pairs(normalized, vocab, cfg.input_cut, cfg.response_cut)
    examples = corpus_mod.expand_pairs(filtered, vocab)
    if cfg.train_fraction >= 1.0:
        examples = corpus_mod.assign_all_train(examples)
    else:
        examples = corpus_mod.split_examples(examples, cfg.train_fraction, cfg.seed)
    stats = corpus_mod.compute_stats(pairs, normalized, vocab, filtered, examples)
    return pairs, normalized, vocab, filtered, examples, stats


def cmd_prepare(args) -> int:
    cfg = _config_from_args(args)
    cfg.layout()  # validate cuts against capacities before any work
    _, _, vocab, filtered, examples, stats = _prepare_corpus(cfg)
    write_manifest(examples, filtered, vocab, args.out)
    print(stats.report())
    return 0


def _load_runtime(cfg, manifest_dir, checkpoint_path):
    examples, pairs, vocab = read_manifest(manifest_dir)
    checkpoint = load_checkpoint(checkpoint_path, vocab=vocab)
    ctx = RenderContext(cfg.layout(), cfg.glyphs(), pairs, vocab)
    return examples, pairs, vocab, checkpoint, ctx


def cmd_train(args) -> int:
    cfg = _config_from_args(args)
    examples, pairs, vocab = read_manifest(args.manifest)
    layout = cfg.layout()
    ctx = RenderContext(layout, cfg.glyphs(), pairs, vocab)
    if args.resume:
        checkpoint = load_checkpoint(args.resume, vocab=vocab)
    else:
        checkpoint = init_model(
            cfg.model_config(vocab.size), vocab_fingerprint=vocab.fingerprint()
        )
    hyper = Hyperparams(
        batch_size=cfg.batch_size,
        learning_rate=cfg.learning_rate,
        momentum=cfg.momentum,
        epochs=cfg.epochs,
        seed=cfg.seed,
        max_iterations=cfg.max_iterations,
        eval_interval=cfg.eval_interval,
        stop_train_accuracy=cfg.stop_train_accuracy,
    )
    has_test = any(ex.split == "test" for ex in examples)
    trained, curve = train(
        checkpoint, examples, ctx, hyper, curve_split="test" if has_test else "train"
    )
    save_checkpoint(trained, args.checkpoint)
    if args.curve:
        write_curve(args.curve, curve)
    train_acc = evaluate(trained, examples, ctx, "train")
    print(f"trained_examples={trained.trained_examples}")
    print(f"train_accuracy={train_acc:.4f}")
    return 0


def cmd_eval(args) -> int:
    cfg = _config_from_args(args)
    examples, _, vocab, checkpoint, ctx = _load_runtime(
        cfg, args.manifest, args.checkpoint
    )
    acc = evaluate(checkpoint, examples, ctx, args.split)
    print(f"{acc:.4f}")
    return 0


def cmd_render(args) -> int:
    cfg = _config_from_args(args)
    image = render(cfg.layout(), cfg.glyphs(), args.input, args.partial)
    export_png(image, args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_chat(args) -> int:
    cfg = _config_from_args(args)
    examples, pairs, vocab, checkpoint, ctx = _load_runtime(
        cfg, args.manifest, args.checkpoint
    )
    layout, glyphs = ctx.layout, ctx.glyphs
    for line in sys.stdin:
        text = corpus_mod.normalize(line)
        if not text:
            continue
        try:
            if args.beam and args.beam > 1:
                response, _ = decode_beam(
                    checkpoint, vocab, layout, glyphs, text, args.beam
                )
                print(response)
            else:
                response, steps = decode_greedy(checkpoint, vocab, layout, glyphs, text)
                print(response)
                if args.trace:
                    print(format_trace(steps, vocab))
        except SuperChatError as exc:
            print(f"error: {exc}", file=sys.stderr)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceRuntime, create_app

    cfg = _config_from_args(args)
    _, pairs, vocab = read_manifest(args.manifest)
    checkpoint = load_checkpoint(args.checkpoint, vocab=vocab)
    runtime = ServiceRuntime.build(checkpoint, vocab, cfg.layout(), cfg.glyphs())
    app = create_app(runtime, ui_dir=args.ui)
    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        raise SuperChatError(f"--bind must be host:port, got {args.bind!r}")
    try:
        uvicorn.run(app, host=host, port=int(port), log_level="info")
    except (OSError, SystemExit) as exc:
        raise SuperChatError(f"cannot bind {args.bind}: {exc}") from exc
    return 0


_COMMANDS = {
    "prepare": cmd_prepare,
    "train": cmd_train,
    "eval": cmd_eval,
    "render": cmd_render,
    "chat": cmd_chat,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SuperChatError as exc:
        print(f"superchat: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"superchat: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
