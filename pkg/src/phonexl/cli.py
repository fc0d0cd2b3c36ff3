"""Command-line interface.

Every subcommand is deterministic for a fixed seed: running it twice with
the same arguments produces byte-identical outputs.  Exit codes: 0 success,
2 validation error, 3 numerical failure.
"""

import argparse
import json
import sys

import numpy as np

from .config import make_run_config
from .corpus import Dataset, gather_ipa_charset, load_dataset, write_dataset
from .dictionary import BilingualDictionary, build_pivot_dictionary, code_switch
from .errors import PhonexlError
from .synthetic import make_synthetic_benchmark
from .training import (ablate, build_vocabulary, evaluate_checkpoint, train,
                       transfer_study)
from .transcribe import load_tables, transcribe_corpus
from .vocab import Vocabulary, extend_vocab


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value configuration file")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override any configuration key (repeatable)")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--out")
    parser.add_argument("--train-file", dest="train")
    parser.add_argument("--dev-file", dest="dev")
    parser.add_argument("--test-file", dest="test")


def _config_from(args: argparse.Namespace):
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise PhonexlError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    for key in ("seed", "epochs", "out", "train", "dev", "test"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return make_run_config(args.config, **overrides)


def cmd_transcribe(args) -> int:
    tables = load_tables(args.tables)
    n = transcribe_corpus(args.input, args.lang, args.mode, tables, args.output)
    print(f"transcribed {n} sentences -> {args.output}")
    return 0


def cmd_build_vocab(args) -> int:
    datasets = [load_dataset(p, default_lang="und") for p in args.inputs]
    config = make_run_config(None, vocab_size=args.size, no_extension=args.no_extension)
    vocab = build_vocabulary(config, datasets)
    vocab.save(args.output)
    print(f"vocabulary: {len(vocab)} entries ({vocab.base_size} base) -> {args.output}")
    return 0


def cmd_extend_vocab(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    if args.segments:
        charset = tuple(s for s in args.segments.split(",") if s)
    else:
        charset = gather_ipa_charset([load_dataset(args.from_corpus, default_lang="und")])
    extended = extend_vocab(vocab, charset)
    extended.save(args.output)
    print(f"extended {len(vocab)} -> {len(extended)} entries -> {args.output}")
    return 0


def cmd_inspect_dataset(args) -> int:
    dataset = load_dataset(args.input, default_lang="und")
    n_words = sum(len(ex.words) for ex in dataset.examples)
    tags = sorted({w.label for ex in dataset.examples for w in ex.words
                   if w.label is not None})
    langs = sorted({w.lang for ex in dataset.examples for w in ex.words})
    info = {"sentences": dataset.size, "words": n_words,
            "mean_words_per_sentence": round(n_words / dataset.size, 2) if dataset.size else 0,
            "tags": tags, "languages": langs,
            "transcribed": all(w.ipa for ex in dataset.examples for w in ex.words)}
    print(json.dumps(info, ensure_ascii=False, indent=2, sort_keys=True))
    return 0


def cmd_build_dict(args) -> int:
    tables = load_tables(args.tables)
    if args.target_lang not in tables:
        raise PhonexlError(f"no tables for target language {args.target_lang!r}")
    dictionary = build_pivot_dictionary(args.src_en, args.en_tgt,
                                        tables[args.target_lang], args.target_lang)
    dictionary.save(args.output)
    print(f"dictionary: {len(dictionary)} source words "
          f"({dictionary.dropped} pairs dropped) -> {args.output}")
    return 0


def cmd_augment(args) -> int:
    dataset = load_dataset(args.input, default_lang=args.lang)
    dictionary = BilingualDictionary.load(args.dictionary)
    rng = np.random.default_rng(np.random.SeedSequence([args.seed, 0xc5]))
    switched = []
    n_positions = 0
    for example in dataset.examples:
        out, plan = code_switch(example, dictionary, args.ratio, rng)
        switched.append(out)
        n_positions += len(plan.positions)
    write_dataset(Dataset(examples=switched, tag_set=dataset.tag_set), args.output)
    print(f"augmented {dataset.size} sentences, {n_positions} words switched "
          f"-> {args.output}")
    return 0


def cmd_train(args) -> int:
    result = train(_config_from(args))
    print(f"best dev F1 {result.best_dev_f1:.2f} at epoch {result.best_epoch}; "
          f"checkpoint {result.checkpoint}")
    return 0


def cmd_evaluate(args) -> int:
    result = evaluate_checkpoint(args.checkpoint, args.data, args.task,
                                 vocab_path=args.vocab, lang=args.lang)
    print(json.dumps(result.as_dict(), indent=2, sort_keys=True))
    return 0


def cmd_ablate(args) -> int:
    config = _config_from(args)
    axes = [a for a in (args.axes.split(",") if args.axes else []) if a]
    seeds = [int(s) for s in args.seeds.split(",")]
    report = ablate(config, axes, seeds)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_transfer_study(args) -> int:
    config = _config_from(args)
    variants = args.variants.split(",")
    seeds = [int(s) for s in args.seeds.split(",")]
    report = transfer_study(config, variants, seeds)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_gradcheck(args) -> int:
    from .acceptance import run_gradient_checks

    reports = run_gradient_checks(seed=args.seed, n_samples=args.samples)
    failed = [name for name, report in reports.items() if not report.passed]
    for name, report in reports.items():
        print(f"[{'PASS' if report.passed else 'FAIL'}] {name}: "
              f"max rel err {report.max_rel_error:.3e} over {report.n_coordinates} coords")
    if failed:
        for name in failed:
            print(reports[name].summary())
        return 3
    return 0


def cmd_make_synthetic(args) -> int:
    manifest = make_synthetic_benchmark(args.out, seed=args.seed, size=args.size)
    print(json.dumps(manifest, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phonexl",
        description="Cross-lingual token-level transfer with a phonemic input stream")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transcribe", help="fill the transcription column of a corpus")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--lang", required=True)
    p.add_argument("--mode", choices=("ipa", "romanized"), default="ipa")
    p.add_argument("--tables", required=True)
    p.set_defaults(func=cmd_transcribe)

    p = sub.add_parser("build-vocab", help="train a subword vocabulary")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--size", type=int, default=600)
    p.add_argument("--no-extension", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build_vocab)

    p = sub.add_parser("extend-vocab", help="append IPA segments to a vocabulary")
    p.add_argument("--vocab", required=True)
    p.add_argument("--segments", help="comma-separated segments to add")
    p.add_argument("--from-corpus", help="gather the segment set from this corpus")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_extend_vocab)

    p = sub.add_parser("inspect-dataset", help="corpus statistics")
    p.add_argument("input")
    p.set_defaults(func=cmd_inspect_dataset)

    p = sub.add_parser("build-dict", help="compose a bilingual dictionary via a pivot")
    p.add_argument("--src-en", required=True)
    p.add_argument("--en-tgt", required=True)
    p.add_argument("--tables", required=True)
    p.add_argument("--target-lang", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_build_dict)

    p = sub.add_parser("augment", help="code-switch a corpus against a dictionary")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--dictionary", required=True)
    p.add_argument("--ratio", type=float, default=0.4)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--lang")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("train", help="train a model")
    _add_config_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="zero-shot evaluation of a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--task", choices=("ner", "pos"), required=True)
    p.add_argument("--vocab")
    p.add_argument("--lang")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", help="train/evaluate ablation variants")
    _add_config_args(p)
    p.add_argument("--axes", default="", help="comma-separated ablation axes")
    p.add_argument("--seeds", default="1,2,3")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("transfer-study", help="run named variants across seeds")
    _add_config_args(p)
    p.add_argument("--variants", default="full,ortho_baseline")
    p.add_argument("--seeds", default="1,2,3")
    p.set_defaults(func=cmd_transfer_study)

    p = sub.add_parser("gradcheck", help="finite-difference gradient validation")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=200)
    p.set_defaults(func=cmd_gradcheck)

    p = sub.add_parser("make-synthetic", help="generate the synthetic benchmark")
    p.add_argument("--out", required=True)
    p.add_argument("--size", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.set_defaults(func=cmd_make_synthetic)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except PhonexlError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except (FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
