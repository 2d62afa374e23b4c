"""Command-line entry point: ``dagn <subcommand> ...``.

Every subcommand writes JSON or JSON Lines to stdout. Failures exit non-zero
with a ``{"error": ..., "message": ...}`` object on stderr.
"""

import argparse
import json
import os
import sys

from dagn.encoder import Vocabulary
from dagn.graph import apply_variant, build_graph
from dagn.harness.config import ConfigError, load_config, resolve_data_path
from dagn.harness.data import IngestionError, QASample, load_dataset, write_jsonl
from dagn.harness.experiment import evaluate, load_model, run_ablation, save_model, train
from dagn.harness.synthetic import generate_synthetic
from dagn.predictor import DAGN, score_from_logits
from dagn.segmenter import Granularity, load_delimiter_library, segment, segment_sample


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        _fail("UsageError", message, code=2)


def _fail(kind, message, code=1):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    sys.exit(code)


def _emit(obj):
    sys.stdout.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _read_text(path):
    if path in (None, "-"):
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _read_sample(path):
    raw = json.loads(_read_text(path))
    if isinstance(raw, list):
        if len(raw) != 1:
            raise CLIError("expected a single sample object")
        raw = raw[0]
    options = raw.get("options", raw.get("answers"))
    if options is None:
        raise IngestionError("sample needs 'options' (or ReClor 'answers')")
    return QASample(
        id=str(raw.get("id", raw.get("id_string", "sample"))),
        context=raw["context"],
        question=raw.get("question", ""),
        options=tuple(options),
        label=raw.get("label"),
    )


def _overrides(pairs):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def cmd_segment(args):
    text = _read_text(args.input)
    edus, hits = segment(text, load_delimiter_library(), args.granularity)
    for edu in edus:
        rec = edu.to_json()
        rec["delimiters"] = [h.to_json() for h in hits if edu.id in (h.left_edu, h.right_edu)]
        _emit(rec)


def cmd_graph(args):
    sample = _read_sample(args.input)
    seg = segment_sample(sample, load_delimiter_library(), args.granularity)
    ks = range(len(sample.options)) if args.option is None else [args.option]
    graphs = []
    for k in ks:
        g = build_graph(seg.context.edus, seg.context.hits, seg.options[k].edus,
                        seg.options[k].hits, k)
        graphs.append(apply_variant(g, args.variant))
    if args.dot:
        sys.stdout.write("\n".join(g.to_dot() for g in graphs) + "\n")
    else:
        _emit({"id": sample.id, "graphs": [g.to_json() for g in graphs]})


def _model_for(args, sample):
    if args.model:
        model, _ = load_model(args.model)
        return model
    cfg = load_config(args.config, _overrides(args.set))
    return DAGN(cfg.model_config(), Vocabulary.from_samples([sample]), seed=cfg.seed)


def cmd_predict(args):
    sample = _read_sample(args.input)
    model = _model_for(args, sample)
    prepared = model.prepare(sample)
    traces = []
    logits = []
    for option in prepared:
        trace = []
        logits.append(model.score_option(option, trace=trace).item())
        traces.append([v.tolist() for v in trace])
    score = score_from_logits(logits)
    summaries = []
    for k, option in enumerate(prepared):
        g = option.graph
        summaries.append({
            "option": k,
            "option_edus": [e.text for e in g.nodes if e.source == "option"] if g else [],
            "nodes": len(g.nodes) if g else 0,
            "edges": len(g.edges) if g else 0,
        })
    if args.dump_node_states:
        with open(args.dump_node_states, "w", encoding="utf-8") as fh:
            json.dump({"id": sample.id, "options": traces}, fh)
    _emit({"id": sample.id, "logits": score.logits.tolist(),
           "probabilities": score.probabilities.tolist(), "predicted": score.predicted,
           "options": summaries})


def cmd_train(args):
    cfg = load_config(args.config, _overrides(args.set))
    progress = None
    if args.verbose:
        def progress(epoch, loss, acc):
            sys.stderr.write(f"epoch {epoch}: loss {loss:.4f} dev {acc:.4f}\n")
    result = train(cfg, progress=progress)
    out = {"config_hash": cfg.hash(), "seed": cfg.seed, "best_epoch": result.best_epoch,
           "dev_accuracy": result.report.accuracy, "dev_curve": result.dev_curve,
           "final_loss": result.losses[-1] if result.losses else None}
    if args.out:
        save_model(result.model, cfg.hash(), args.out)
        with open(os.path.join(args.out, "config.txt"), "w", encoding="utf-8") as fh:
            fh.write(cfg.to_text())
        with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
            json.dump(result.report.to_json(), fh, sort_keys=True)
        out["out"] = args.out
    _emit(out)


def cmd_eval(args):
    model, header = load_model(args.model)
    if args.data == "synthetic":
        samples = generate_synthetic(args.n, args.seed, split=args.split)
    else:
        samples = load_dataset(resolve_data_path(args.data), args.format)
    report = evaluate(model, samples, header.get("config_hash", ""))
    if args.predictions_out:
        report.write_leaderboard(args.predictions_out)
    _emit(report.to_json(with_predictions=args.with_predictions))


def cmd_ablate(args):
    cfg = load_config(args.config, _overrides(args.set))
    rows = run_ablation(cfg, progress=lambda row: _emit(row.to_json()))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row.to_json()) + "\n")


def cmd_gen_synthetic(args):
    samples = generate_synthetic(args.n, args.seed, split=args.split)
    if args.out:
        write_jsonl(samples, args.out)
    else:
        for s in samples:
            _emit(s.to_json())


def build_parser():
    parser = _Parser(prog="dagn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    granularities = [g.value for g in Granularity]
    variants = ["standard", "single_edge_type", "fully_connected"]

    p = sub.add_parser("segment", help="split text into EDUs (JSON Lines, one EDU per line)")
    p.add_argument("input", nargs="?", default="-", help="UTF-8 text file, or - for stdin")
    p.add_argument("--granularity", choices=granularities, default="edu")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("graph", help="build per-option discourse graphs for one sample")
    p.add_argument("input", nargs="?", default="-", help="sample JSON file, or - for stdin")
    p.add_argument("--option", type=int, default=None)
    p.add_argument("--granularity", choices=granularities, default="edu")
    p.add_argument("--variant", choices=variants, default="standard")
    p.add_argument("--dot", action="store_true", help="emit Graphviz DOT instead of JSON")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("predict", help="score the four options of one sample")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--model", help="directory written by `train --out`")
    p.add_argument("--config", help="key=value config used when no --model is given")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--dump-node-states", metavar="PATH",
                   help="write per-iteration node matrices as JSON")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("train", help="train a model and report dev accuracy")
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", help="directory for model.ckpt, vocab.txt, report.json")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a trained model on a dataset")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True, help="dataset path, or 'synthetic'")
    p.add_argument("--format", choices=["reclor", "logiqa"], default=None)
    p.add_argument("-n", type=int, default=64, help="synthetic sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", choices=["train", "dev", "test"], default="dev")
    p.add_argument("--predictions-out", help="leaderboard file: one index per line")
    p.add_argument("--with-predictions", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="run the six ablation rows")
    p.add_argument("--config")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", help="also write the rows as JSON Lines here")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("gen-synthetic", help="write synthetic samples as JSON Lines")
    p.add_argument("-n", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", choices=["train", "dev", "test"], default="train")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_synthetic)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (OSError, ValueError, KeyError, CLIError) as exc:
        _fail(type(exc).__name__, str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
