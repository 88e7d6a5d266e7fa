"""Command-line interface.

Subcommands: build-vocab, fit-zipf, noise-table, train, eval-sim,
eval-analogy, eval-syn, eval-completion. Every value can come from a
key=value config file (--config); explicit flags win over the file, and the
ZIPFVEC_SEED environment variable overrides the seed from either source.
Each run echoes its fully-resolved configuration: next to the output file
for file-producing commands, as '#'-prefixed lines for commands printing to
stdout.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import evaluation, kernels, noise, trainer, vectors, zipf
from .corpus import Vocabulary, build_vocabulary, encode_sentences, iter_sentences
from .errors import DataFormatError, TrainingDivergedError, ZipfvecError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit code 1, not argparse's 2
        raise UsageError(message)


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataFormatError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _resolve(args: argparse.Namespace, parser_defaults: dict) -> dict:
    """defaults < config file < explicit flags; ZIPFVEC_SEED on top."""
    explicit = vars(args)
    resolved = dict(parser_defaults)
    config_path = explicit.get("config")
    if config_path:
        file_values = _load_config_file(config_path)
        for key, raw in file_values.items():
            if key not in parser_defaults:
                raise UsageError(f"unknown config key {key!r} in {config_path}")
            default = parser_defaults[key]
            if isinstance(default, bool):
                resolved[key] = raw.lower() in ("1", "true", "yes")
            elif isinstance(default, int) and not isinstance(default, bool):
                resolved[key] = int(raw)
            elif isinstance(default, float):
                resolved[key] = float(raw)
            else:
                resolved[key] = raw
    for key, value in explicit.items():
        if key in ("command", "config", "func", "verbose", "_defaults"):
            continue
        if value is not None:
            resolved[key] = value
    env_seed = os.environ.get("ZIPFVEC_SEED")
    if env_seed is not None and "seed" in resolved:
        resolved["seed"] = int(env_seed)
    return resolved


def _config_echo_lines(resolved: dict) -> str:
    return "\n".join(f"{k}={v}" for k, v in sorted(resolved.items())) + "\n"


def _write_config_echo(out_path: str, resolved: dict) -> None:
    with open(out_path + ".config", "w", encoding="utf-8") as fh:
        fh.write(_config_echo_lines(resolved))


def _print_config_echo(resolved: dict) -> None:
    for line in _config_echo_lines(resolved).splitlines():
        print(f"# {line}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_build_vocab(cfg: dict) -> int:
    vocab = build_vocabulary(
        (tok for sent in iter_sentences(cfg["corpus"]) for tok in sent),
        min_count=cfg["min_count"],
    )
    vocab.save(cfg["out"])
    _write_config_echo(cfg["out"], cfg)
    print(f"vocabulary: {len(vocab)} words, {vocab.total_tokens} tokens -> {cfg['out']}")
    return EXIT_OK


def cmd_fit_zipf(cfg: dict) -> int:
    vocab = Vocabulary.load(cfg["vocab"])
    fit = zipf.fit(vocab, cfg["method"])
    if cfg["search"]:
        crit = zipf.derive_rate_by_search(vocab)
    else:
        crit = zipf.critical_word(fit, vocab.total_tokens)
    report = zipf.fit_report(fit, crit)
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8") as fh:
            fh.write(report)
        _write_config_echo(cfg["out"], cfg)
        print(f"fit report -> {cfg['out']}")
    else:
        _print_config_echo(cfg)
        sys.stdout.write(report)
    return EXIT_OK


def cmd_noise_table(cfg: dict) -> int:
    vocab = Vocabulary.load(cfg["vocab"])
    table = noise.build_noise_table(vocab, cfg["noise"])
    with open(cfg["out"], "w", encoding="utf-8") as fh:
        fh.write(table.dump(vocab))
    _write_config_echo(cfg["out"], cfg)
    print(f"noise table ({table.spec_string()}) -> {cfg['out']}")
    return EXIT_OK


def cmd_train(cfg: dict) -> int:
    if cfg["vocab"]:
        vocab = Vocabulary.load(cfg["vocab"])
    else:
        vocab = build_vocabulary(
            (tok for sent in iter_sentences(cfg["corpus"]) for tok in sent),
            min_count=cfg["min_count"],
        )
    stream = encode_sentences(iter_sentences(cfg["corpus"]), vocab)
    lr = cfg["lr"] if cfg["lr"] > 0 else None
    config = trainer.TrainConfig(
        model=cfg["model"],
        objective=cfg["objective"],
        dim=cfg["dim"],
        window=cfg["window"],
        negatives=cfg["negatives"],
        initial_lr=lr,
        epochs=cfg["epochs"],
        subsample_rate=cfg["subsample"],
        noise_spec=cfg["noise"],
        seed=cfg["seed"],
        workers=cfg["workers"],
    )
    emb = trainer.train(stream, vocab, config, kernel=kernels.get_kernel(cfg["kernel"]))
    save = vectors.save_binary if cfg["binary"] else vectors.save_text
    save(cfg["out"], vocab.words, emb.input)
    if cfg["output_vectors"]:
        save(cfg["output_vectors"], vocab.words, emb.output)
    cfg["lr"] = config.initial_lr  # echo the resolved model-dependent default
    _write_config_echo(cfg["out"], cfg)
    print(f"vectors: {len(vocab)} x {config.dim} -> {cfg['out']}")
    return EXIT_OK


def _load_vectors(cfg: dict) -> vectors.WordVectors:
    return vectors.load(cfg["vectors"], binary=cfg["binary"])


def cmd_eval_sim(cfg: dict) -> int:
    wv = _load_vectors(cfg)
    pairs = evaluation.load_similarity(cfg["dataset"])
    corr, used, skipped = evaluation.eval_similarity(pairs, wv, metric=cfg["metric"])
    _print_config_echo(cfg)
    sys.stdout.write(evaluation.results_lines(
        {cfg["metric"]: corr, "used": used, "skipped": skipped}))
    return EXIT_OK


def cmd_eval_analogy(cfg: dict) -> int:
    wv = _load_vectors(cfg)
    questions = evaluation.load_analogy(cfg["dataset"])
    res = evaluation.eval_analogy(questions, wv)
    _print_config_echo(cfg)
    sys.stdout.write(evaluation.results_lines({
        "semantic_accuracy": res.semantic_accuracy,
        "syntactic_accuracy": res.syntactic_accuracy,
        "total_accuracy": res.total_accuracy,
        "semantic_used": res.semantic_total,
        "syntactic_used": res.syntactic_total,
        "skipped": res.skipped,
    }))
    return EXIT_OK


def cmd_eval_syn(cfg: dict) -> int:
    wv = _load_vectors(cfg)
    questions = evaluation.load_synonym(cfg["dataset"])
    acc, used, skipped = evaluation.eval_synonym(questions, wv)
    _print_config_echo(cfg)
    sys.stdout.write(evaluation.results_lines(
        {"accuracy": acc, "used": used, "skipped": skipped}))
    return EXIT_OK


def cmd_eval_completion(cfg: dict) -> int:
    wv = _load_vectors(cfg)
    out_wv = vectors.load(cfg["output_vectors"], binary=cfg["binary"])
    vocab = Vocabulary.load(cfg["vocab"])
    if wv.words != vocab.words or out_wv.words != vocab.words:
        raise DataFormatError("vector files and vocabulary must list the same words in order")
    questions = evaluation.load_completion(cfg["dataset"])
    acc, used, skipped = evaluation.eval_completion(
        questions, wv.matrix, out_wv.matrix, vocab,
        mode=cfg["mode"], t=cfg["t"], repeats=cfg["repeats"], seed=cfg["seed"],
    )
    _print_config_echo(cfg)
    sys.stdout.write(evaluation.results_lines(
        {"accuracy": acc, "used": used, "skipped": skipped}))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="zipfvec", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, defaults, configure):
        p = sub.add_parser(name, argument_default=None)
        p.add_argument("--config", help="key=value config file; flags win")
        configure(p)
        p.set_defaults(func=func, _defaults=defaults)
        return p

    def p_build_vocab(p):
        p.add_argument("--corpus", help="text file or - for stdin")
        p.add_argument("--min-count", type=int, dest="min_count")
        p.add_argument("--out")
    add("build-vocab", cmd_build_vocab,
        {"corpus": "-", "min_count": 5, "out": "vocab.txt"}, p_build_vocab)

    def p_fit_zipf(p):
        p.add_argument("--vocab")
        p.add_argument("--method", choices=[zipf.WLSE1, zipf.WLSE2])
        p.add_argument("--search", action="store_true", default=None,
                       help="derive the rate from the scanned critical word instead of the fit")
        p.add_argument("--out")
    add("fit-zipf", cmd_fit_zipf,
        {"vocab": "vocab.txt", "method": zipf.WLSE2, "search": False, "out": ""}, p_fit_zipf)

    def p_noise_table(p):
        p.add_argument("--vocab")
        p.add_argument("--noise", help="uniform | unigram | smoothed:<p> | "
                       "subsampled:{wlse1,wlse2} | subsampled:manual:<t_c>")
        p.add_argument("--out")
    add("noise-table", cmd_noise_table,
        {"vocab": "vocab.txt", "noise": "subsampled:wlse2", "out": "noise.txt"}, p_noise_table)

    def p_train(p):
        p.add_argument("--corpus")
        p.add_argument("--vocab", help="prebuilt vocabulary file (else built from the corpus)")
        p.add_argument("--min-count", type=int, dest="min_count")
        p.add_argument("--out")
        p.add_argument("--output-vectors", dest="output_vectors",
                       help="also write the output-side matrix (needed by eval-completion)")
        p.add_argument("--binary", action="store_true", default=None)
        p.add_argument("--model", choices=[trainer.SG, trainer.CBOW])
        p.add_argument("--objective", choices=[trainer.NS, trainer.NCE])
        p.add_argument("--dim", type=int)
        p.add_argument("--window", type=int)
        p.add_argument("--negatives", type=int)
        p.add_argument("--lr", type=float, help="initial learning rate; 0 = model default")
        p.add_argument("--epochs", type=int)
        p.add_argument("--subsample", type=float, help="stream sub-sampling rate t; 0 disables")
        p.add_argument("--noise")
        p.add_argument("--seed", type=int)
        p.add_argument("--workers", type=int)
        p.add_argument("--kernel", choices=["auto", "cython", "numpy"])
    add("train", cmd_train,
        {"corpus": "-", "vocab": "", "min_count": 5, "out": "vectors.txt",
         "output_vectors": "", "binary": False, "model": trainer.SG,
         "objective": trainer.NS, "dim": 100, "window": 5, "negatives": 10,
         "lr": 0.0, "epochs": 2, "subsample": 1e-4, "noise": "smoothed:0.75",
         "seed": 1, "workers": 1, "kernel": "auto"}, p_train)

    def p_eval_common(p):
        p.add_argument("--vectors")
        p.add_argument("--binary", action="store_true", default=None)
        p.add_argument("--dataset")

    def p_eval_sim(p):
        p_eval_common(p)
        p.add_argument("--metric", choices=["pearson", "spearman"])
    add("eval-sim", cmd_eval_sim,
        {"vectors": "vectors.txt", "binary": False, "dataset": "", "metric": "pearson"},
        p_eval_sim)

    add("eval-analogy", cmd_eval_analogy,
        {"vectors": "vectors.txt", "binary": False, "dataset": ""}, p_eval_common)
    add("eval-syn", cmd_eval_syn,
        {"vectors": "vectors.txt", "binary": False, "dataset": ""}, p_eval_common)

    def p_eval_completion(p):
        p_eval_common(p)
        p.add_argument("--output-vectors", dest="output_vectors")
        p.add_argument("--vocab")
        p.add_argument("--mode", choices=[evaluation.CM, evaluation.CMS, evaluation.SWM])
        p.add_argument("--t", type=float)
        p.add_argument("--repeats", type=int)
        p.add_argument("--seed", type=int)
    add("eval-completion", cmd_eval_completion,
        {"vectors": "vectors.txt", "binary": False, "dataset": "",
         "output_vectors": "", "vocab": "vocab.txt", "mode": evaluation.CM,
         "t": 1e-4, "repeats": 10, "seed": 0}, p_eval_completion)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.INFO if getattr(args, "verbose", None) else logging.WARNING,
            format="%(asctime)s %(levelname)s %(message)s",
        )
        cfg = _resolve(args, dict(args._defaults))
        return args.func(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TrainingDivergedError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ZipfvecError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
