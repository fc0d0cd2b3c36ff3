"""Seeded training loop, zero-shot evaluation, and the variant study harness.

Training consumes source-language corpora only; target-language files are
touched exclusively by `evaluate`.  Every random draw descends from the run
seed through named SeedSequence children, so a (config, seed) pair fully
determines checkpoints and metrics logs byte for byte.
"""

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import autodiff as ad
from .checkpoint import load_checkpoint, save_checkpoint, vocab_hash
from .config import RunConfig
from .corpus import Dataset, gather_ipa_charset, load_dataset
from .dictionary import BilingualDictionary
from .errors import ConfigError, NumericalError
from .metrics import EvalResult, score_task
from .model import AblationFlags, EncoderConfig, Model, forward, new_model
from .objectives import LossWeights, crf_decode, sentence_emissions, total_loss
from .optim import Adam, clip_global_norm
from .synthetic import roman_sibling
from .vocab import (Vocabulary, collate, extend_vocab, tokenize,
                    train_subword_vocab)


def effective_path(path: str, romanized: bool) -> Path:
    """Romanized mode swaps every corpus file for its *_roman sibling."""
    p = Path(path)
    if not romanized:
        return p
    sibling = roman_sibling(p)
    if not sibling.exists():
        raise ConfigError(f"romanized mode needs {sibling}, which does not exist")
    return sibling


def _require(path: str, what: str) -> Path:
    if not path:
        raise ConfigError(f"missing required path: {what}")
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"{what} file not found: {p}")
    return p


def infer_tag_set(dataset: Dataset) -> tuple[str, ...]:
    tags = {w.label for ex in dataset.examples for w in ex.words if w.label is not None}
    ordered = (["O"] if "O" in tags else []) + sorted(tags - {"O"})
    return tuple(ordered)


def transcription_charset(config: RunConfig, datasets: list[Dataset]) -> tuple[str, ...]:
    """Segment inventory for vocabulary extension.

    Gathered from the corpora at hand plus, when available, the bilingual
    dictionary and the rule tables, so the target language's inventory is
    covered even though training data is source-only.
    """
    segments = set(gather_ipa_charset(datasets))
    if config.dictionary and Path(config.dictionary).exists():
        dict_path = effective_path(config.dictionary, config.romanized)
        dictionary = BilingualDictionary.load(dict_path)
        for translations in dictionary.entries.values():
            for tr in translations:
                segments.update(tr.ipa)
    if config.tables and Path(config.tables).exists():
        from .ipa import parse_segments
        from .transcribe import load_tables
        for table_set in load_tables(config.tables).values():
            for table in (table_set.ipa, table_set.latin):
                if table is not None:
                    for _, output in table.entries:
                        segments.update(parse_segments(output))
    return tuple(sorted(segments))


def build_vocabulary(config: RunConfig, datasets: list[Dataset]) -> Vocabulary:
    """Subword vocabulary over surface text, then IPA-charset extension."""
    vocab = train_subword_vocab(datasets, config.vocab_size, include_phonemic=False)
    if not config.no_extension:
        vocab = extend_vocab(vocab, transcription_charset(config, datasets))
    return vocab


def load_run_vocab(config: RunConfig, datasets: list[Dataset]) -> Vocabulary:
    if config.vocab:
        return Vocabulary.load(_require(config.vocab, "vocabulary"))
    return build_vocabulary(config, datasets)


def effective_weights(config: RunConfig) -> LossWeights:
    lam = 0.0 if config.no_pe else config.lambda_align
    return LossWeights(lambda_align=lam, beta_mlm=config.beta_mlm,
                       gamma_xmlm=config.gamma_xmlm, mu=config.mu, r=config.r)


@dataclass
class TrainResult:
    best_dev_f1: float
    best_epoch: int
    checkpoint: Path
    metrics_log: Path
    vocab_path: Path


def train(config: RunConfig) -> TrainResult:
    """Mini-batch Adam over the combined loss; best-dev checkpoint retained."""
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    train_path = effective_path(str(_require(config.train, "training corpus")),
                                config.romanized)
    dev_path = effective_path(str(_require(config.dev, "dev corpus")), config.romanized)

    train_data = load_dataset(train_path, default_lang=config.source_lang, role="train")
    dev_data = load_dataset(dev_path, default_lang=config.source_lang, role="dev")
    tag_set = tuple(config.tag_set) or infer_tag_set(train_data)

    dictionary = None
    weights = effective_weights(config)
    if weights.gamma_xmlm > 0:
        dict_path = _require(config.dictionary, "bilingual dictionary")
        if config.romanized:
            dict_path = effective_path(str(dict_path), True)
        dictionary = BilingualDictionary.load(dict_path)

    vocab_sources = [train_data]
    if config.unlabeled:
        unlabeled_path = effective_path(str(_require(config.unlabeled, "unlabeled corpus")),
                                        config.romanized)
        vocab_sources.append(load_dataset(unlabeled_path, default_lang=config.target_lang))
    vocab = load_run_vocab(config, vocab_sources)
    if dictionary is not None and not config.vocab:
        # words the dictionary can switch in become real vocabulary entries,
        # so the code-switched MLM predicts them instead of a blanket UNK
        switchable = sorted({tr.surface for translations in dictionary.entries.values()
                             for tr in translations})
        vocab = extend_vocab(vocab, switchable)
    vocab_path = out / "vocab.tsv"
    vocab.save(vocab_path)

    encoder = EncoderConfig(layers=config.layers, heads=config.heads,
                            hidden=config.hidden, ff_width=config.ff_width,
                            max_positions=config.max_positions,
                            languages=2)
    flags = AblationFlags(no_pe=config.no_pe, no_extension=config.no_extension,
                          no_lang_emb=config.no_lang_emb, romanized=config.romanized)
    model = new_model(encoder, vocab, tag_set, (config.source_lang, config.target_lang),
                      config.seed, flags)
    optimizer = Adam(model.params, lr=config.lr, beta1=config.beta1,
                     beta2=config.beta2, eps=config.eps)

    tag_to_id = model.tag_to_id
    clean_rows = [tokenize(ex, vocab, tag_to_id, model.use_phonemic)
                  for ex in train_data.examples]
    dev_gold = [ex.labels() for ex in dev_data.examples]

    metrics_path = out / "metrics.jsonl"
    meta_common = {"seed": config.seed, "task": config.task, "tag_set": list(tag_set),
                   "langs": [config.source_lang, config.target_lang]}
    best_f1, best_epoch = -1.0, -1
    order_rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0xda7a]))
    step = 0
    with metrics_path.open("w", encoding="utf-8") as log:
        for epoch in range(config.epochs):
            permutation = order_rng.permutation(len(clean_rows))
            for start in range(0, len(permutation), config.batch_size):
                chosen = permutation[start:start + config.batch_size]
                examples = [train_data.examples[i] for i in chosen]
                rows = [clean_rows[i] for i in chosen]
                streams = np.random.SeedSequence([config.seed, epoch, step]).spawn(3)
                rng_mask, rng_switch, rng_xmask = (np.random.default_rng(s)
                                                   for s in streams)
                ad.zero_grads(model.params)
                loss, parts = total_loss(model, examples, weights, dictionary,
                                         rng_mask, rng_switch, rng_xmask,
                                         clean_rows=rows)
                if not np.isfinite(loss.value):
                    raise NumericalError(
                        f"non-finite loss at epoch {epoch} step {step}; "
                        f"last good checkpoint: {out / 'last.ckpt'}")
                loss.backward()
                clip_global_norm(model.params, config.clip_norm)
                optimizer.step()
                record = {"epoch": epoch, "step": step,
                          "L_task": round(parts["L_task"], 6),
                          "L_align": round(parts["L_align"], 6),
                          "L_MLM": round(parts["L_MLM"], 6),
                          "L_XMLM": round(parts["L_XMLM"], 6),
                          "total": round(parts["total"], 6)}
                log.write(json.dumps(record) + "\n")
                step += 1
            dev_result = evaluate_model(model, dev_data, config.task)
            log.write(json.dumps({"epoch": epoch, "dev_f1": round(dev_result.f1, 4)}) + "\n")
            meta = dict(meta_common, epoch=epoch, dev_f1=round(dev_result.f1, 4))
            save_checkpoint(out / "last.ckpt", model.params, model.config,
                            vocab_hash(vocab), meta)
            # ties go to the later epoch: with a saturated dev set the most
            # trained of the equally scoring checkpoints is kept
            if dev_result.f1 >= best_f1:
                best_f1, best_epoch = dev_result.f1, epoch
                save_checkpoint(out / "best.ckpt", model.params, model.config,
                                vocab_hash(vocab), meta)
    return TrainResult(best_dev_f1=best_f1, best_epoch=best_epoch,
                       checkpoint=out / "best.ckpt", metrics_log=metrics_path,
                       vocab_path=vocab_path)


def predict(model: Model, dataset: Dataset, batch_size: int = 32) -> list[list[str]]:
    """Viterbi label sequences for every sentence."""
    out: list[list[str]] = []
    tag_of = dict(enumerate(model.tag_set))
    examples = dataset.examples
    for start in range(0, len(examples), batch_size):
        chunk = examples[start:start + batch_size]
        rows = [tokenize(ex, model.vocab, None, model.use_phonemic) for ex in chunk]
        batch = collate(rows, model.lang_to_id)
        hidden = forward(model, batch)
        states = ad.matmul(ad.constant(batch.pool_ortho), hidden)
        for b in range(batch.size):
            emissions = sentence_emissions(model, states, batch, b)
            path = crf_decode(emissions.value, model.params)
            out.append([tag_of[k] for k in path])
    return out


def evaluate_model(model: Model, dataset: Dataset, task: str) -> EvalResult:
    gold = [list(ex.labels()) for ex in dataset.examples]
    pred = predict(model, dataset)
    precision, recall, f1 = score_task(task, gold, pred)
    return EvalResult(precision=precision, recall=recall, f1=f1,
                      n_sentences=len(gold))


def model_from_checkpoint(checkpoint_path: str | Path,
                          vocab_path: str | Path | None = None,
                          flags: AblationFlags | None = None) -> tuple[Model, dict]:
    checkpoint_path = Path(checkpoint_path)
    params, encoder, sha, meta = load_checkpoint(checkpoint_path)
    if vocab_path is None:
        vocab_path = checkpoint_path.parent / "vocab.tsv"
    vocab = Vocabulary.load(vocab_path)
    if vocab_hash(vocab) != sha:
        raise ConfigError(f"vocabulary {vocab_path} does not match the checkpoint hash")
    model = Model(config=encoder, params=params, vocab=vocab,
                  tag_set=tuple(meta["tag_set"]), langs=tuple(meta["langs"]),
                  flags=flags or AblationFlags())
    return model, meta


def evaluate_checkpoint(checkpoint_path, data_path, task: str,
                        vocab_path=None, lang: str | None = None,
                        flags: AblationFlags | None = None) -> EvalResult:
    model, meta = model_from_checkpoint(checkpoint_path, vocab_path, flags)
    if meta["task"] != task:
        raise ConfigError(f"checkpoint was trained for task {meta['task']!r}, not {task!r}")
    dataset = load_dataset(data_path, tag_set=model.tag_set, default_lang=lang)
    return evaluate_model(model, dataset, task)


# ----------------------------------------------------------- variant studies

VARIANTS = {
    "full": {},
    "ortho_baseline": {"no_pe": True, "lambda_align": 0.0, "beta_mlm": 0.0,
                       "gamma_xmlm": 0.0},
    "no_pe": {"no_pe": True},
    "no_extension": {"no_extension": True},
    "no_lang_emb": {"no_lang_emb": True},
    "romanized": {"romanized": True},
    "drop_align": {"lambda_align": 0.0},
    "drop_mlm": {"beta_mlm": 0.0},
    "drop_xmlm": {"gamma_xmlm": 0.0},
}

AXIS_ALIASES = {"no-pe": "no_pe", "no-extension": "no_extension",
                "no-lang-emb": "no_lang_emb", "romanized-mode": "romanized",
                "drop-align": "drop_align", "drop-mlm": "drop_mlm",
                "drop-xmlm": "drop_xmlm", "ortho-baseline": "ortho_baseline"}


def run_variant(config: RunConfig, variant: str, seed: int) -> dict:
    """Train one variant with one seed; returns source-dev and target-test F1."""
    changes = dict(VARIANTS[variant])
    run_config = replace(config, seed=seed,
                         out=str(Path(config.out) / f"{variant}_seed{seed}"),
                         **changes)
    result = train(run_config)
    flags = AblationFlags(no_pe=run_config.no_pe, no_extension=run_config.no_extension,
                          no_lang_emb=run_config.no_lang_emb,
                          romanized=run_config.romanized)
    test_path = effective_path(str(_require(config.test, "test corpus")),
                               run_config.romanized)
    target = evaluate_checkpoint(result.checkpoint, test_path, config.task,
                                 lang=config.target_lang, flags=flags)
    return {"src_dev_f1": round(result.best_dev_f1, 4),
            "tgt_test_f1": round(target.f1, 4),
            "tgt_precision": round(target.precision, 4),
            "tgt_recall": round(target.recall, 4)}


def transfer_study(config: RunConfig, variants: list[str], seeds: list[int]) -> dict:
    """Train/evaluate each variant across seeds; writes study.json to the out dir."""
    report: dict = {"task": config.task, "seeds": seeds, "variants": {}}
    for variant in variants:
        per_seed = {str(seed): run_variant(config, variant, seed) for seed in seeds}
        f1s = [per_seed[str(s)]["tgt_test_f1"] for s in seeds]
        report["variants"][variant] = {
            "per_seed": per_seed,
            "tgt_mean_f1": round(float(np.mean(f1s)), 4),
            "tgt_stdev_f1": round(float(np.std(f1s, ddof=1)), 4) if len(f1s) > 1 else None,
        }
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "study.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n",
                                    encoding="utf-8")
    return report


def ablate(config: RunConfig, axes: list[str], seeds: list[int]) -> dict:
    variants = ["full"] + [AXIS_ALIASES.get(a, a) for a in axes]
    for variant in variants:
        if variant not in VARIANTS:
            raise ConfigError(f"unknown ablation axis {variant!r}; "
                              f"choose from {sorted(AXIS_ALIASES)}")
    return transfer_study(config, variants, seeds)
