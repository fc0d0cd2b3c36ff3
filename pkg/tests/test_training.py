import json

import numpy as np
import pytest

from phonexl.config import make_run_config
from phonexl.errors import ConfigError
from phonexl.synthetic import make_synthetic_benchmark
from phonexl.training import (effective_path, evaluate_checkpoint,
                              infer_tag_set, model_from_checkpoint, predict, train)


@pytest.fixture(scope="module")
def bench(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench")
    make_synthetic_benchmark(out, seed=9, size=200)
    return out


def run_config(bench, out, **kw):
    defaults = dict(
        task="ner", source_lang="src", target_lang="tgt",
        train=str(bench / "ner_src_train.tsv"),
        dev=str(bench / "ner_src_dev.tsv"),
        test=str(bench / "ner_tgt_test.tsv"),
        dictionary=str(bench / "dictionary.tsv"),
        unlabeled=str(bench / "tgt_unlabeled.tsv"),
        out=str(out), seed=1, epochs=1, batch_size=16, lr=1e-3,
        layers=1, hidden=16, ff_width=24, vocab_size=260,
        lambda_align=0.01, beta_mlm=0.01, gamma_xmlm=0.01, mu=0.2, r=0.4)
    defaults.update(kw)
    return make_run_config(None, **defaults)


def test_metrics_log_has_one_record_per_step_plus_epoch(bench, tmp_path):
    config = run_config(bench, tmp_path / "run")
    result = train(config)
    records = [json.loads(l) for l in result.metrics_log.read_text().splitlines()]
    step_records = [r for r in records if "step" in r]
    epoch_records = [r for r in records if "dev_f1" in r]
    assert len(step_records) == int(np.ceil(200 / 16))
    assert len(epoch_records) == 1
    assert set(step_records[0]) == {"epoch", "step", "L_task", "L_align",
                                    "L_MLM", "L_XMLM", "total"}
    assert all(np.isfinite(r["total"]) for r in step_records)


def test_same_seed_gives_identical_checkpoints_and_logs(bench, tmp_path):
    c1 = run_config(bench, tmp_path / "a")
    c2 = run_config(bench, tmp_path / "b")
    r1, r2 = train(c1), train(c2)
    assert r1.checkpoint.read_bytes() == r2.checkpoint.read_bytes()
    assert r1.metrics_log.read_text() == r2.metrics_log.read_text()


def test_different_seeds_diverge(bench, tmp_path):
    r1 = train(run_config(bench, tmp_path / "a", seed=1))
    r2 = train(run_config(bench, tmp_path / "b", seed=2))
    assert r1.checkpoint.read_bytes() != r2.checkpoint.read_bytes()


def test_training_never_reads_target_corpora(bench, tmp_path):
    # pointing the test/target fields at a nonexistent file must not matter
    config = run_config(bench, tmp_path / "run", test=str(bench / "missing.tsv"))
    train(config)  # no error: train consumes source corpora only


def test_evaluate_checkpoint_round_trip(bench, tmp_path):
    config = run_config(bench, tmp_path / "run", epochs=2)
    result = train(config)
    report = evaluate_checkpoint(result.checkpoint, bench / "ner_src_dev.tsv",
                                 "ner", lang="src")
    assert report.f1 == pytest.approx(result.best_dev_f1, abs=1e-9)
    assert report.n_sentences == 150


def test_evaluate_rejects_wrong_task_and_bad_vocab(bench, tmp_path):
    result = train(run_config(bench, tmp_path / "run"))
    with pytest.raises(ConfigError):
        evaluate_checkpoint(result.checkpoint, bench / "pos_src_dev.tsv", "pos",
                            lang="src")
    other = train(run_config(bench, tmp_path / "other", vocab_size=280))
    with pytest.raises(ConfigError, match="hash"):
        evaluate_checkpoint(result.checkpoint, bench / "ner_src_dev.tsv", "ner",
                            vocab_path=other.vocab_path, lang="src")


def test_predictions_align_with_sentences(bench, tmp_path):
    result = train(run_config(bench, tmp_path / "run"))
    model, _ = model_from_checkpoint(result.checkpoint)
    from phonexl.corpus import load_dataset
    data = load_dataset(bench / "ner_tgt_test.tsv", tag_set=model.tag_set,
                        default_lang="tgt")
    preds = predict(model, data)
    assert len(preds) == data.size
    for ex, tags in zip(data.examples, preds):
        assert len(tags) == len(ex.words)
        assert all(t in model.tag_set for t in tags)


def test_non_finite_loss_aborts_with_numerical_error(bench, tmp_path):
    config = run_config(bench, tmp_path / "run", lr=1e200, epochs=2)
    from phonexl.errors import NumericalError
    with pytest.raises(NumericalError):
        with np.errstate(all="ignore"):
            train(config)


def test_effective_path_romanized(bench):
    assert effective_path(str(bench / "ner_src_train.tsv"), False).name == \
        "ner_src_train.tsv"
    assert effective_path(str(bench / "ner_src_train.tsv"), True).name == \
        "ner_src_train_roman.tsv"
    with pytest.raises(ConfigError):
        effective_path(str(bench / "missing.tsv"), True)


def test_missing_training_file_is_config_error(bench, tmp_path):
    config = run_config(bench, tmp_path / "run", train=str(bench / "nope.tsv"))
    with pytest.raises(ConfigError):
        train(config)


def test_pos_task_end_to_end(bench, tmp_path):
    config = run_config(bench, tmp_path / "run", task="pos",
                        train=str(bench / "pos_src_train.tsv"),
                        dev=str(bench / "pos_src_dev.tsv"),
                        test=str(bench / "pos_tgt_test.tsv"))
    result = train(config)
    report = evaluate_checkpoint(result.checkpoint, bench / "pos_tgt_test.tsv",
                                 "pos", lang="tgt")
    assert 0.0 <= report.f1 <= 100.0
    assert report.precision == pytest.approx(report.recall)  # token micro scores


def test_ablate_full_axis_only(bench, tmp_path):
    from phonexl.training import ablate
    config = run_config(bench, tmp_path / "study")
    report = ablate(config, axes=[], seeds=[1])
    assert list(report["variants"]) == ["full"]
    assert (tmp_path / "study" / "study.json").exists()
    per_seed = report["variants"]["full"]["per_seed"]["1"]
    assert set(per_seed) == {"src_dev_f1", "tgt_test_f1", "tgt_precision",
                             "tgt_recall"}
    with pytest.raises(ConfigError):
        ablate(config, axes=["bogus-axis"], seeds=[1])


def test_ablate_axis_aliases_map_to_variants(bench, tmp_path):
    from phonexl.training import AXIS_ALIASES, VARIANTS
    for alias, variant in AXIS_ALIASES.items():
        assert variant in VARIANTS, alias


def test_infer_tag_set_puts_o_first(bench):
    from phonexl.corpus import load_dataset
    data = load_dataset(bench / "ner_src_train.tsv")
    tags = infer_tag_set(data)
    assert tags[0] == "O"
    assert set(tags) == {"O", "B-PER", "I-PER", "B-LOC", "I-LOC", "B-ORG", "I-ORG"}
