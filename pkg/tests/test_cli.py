import json
from pathlib import Path

from phonexl.cli import main
from phonexl.synthetic import make_synthetic_benchmark

TABLES_DIR = str(Path(__file__).resolve().parent.parent / "src" / "phonexl" / "tables")


def run(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def demo_corpus(tmp_path):
    path = tmp_path / "in.tsv"
    path.write_text("# lang = zh\n电子\t\tO\n行业\t\tO\n\n", encoding="utf-8")
    return path


def test_transcribe_and_determinism(tmp_path, capsys):
    src = demo_corpus(tmp_path)
    o1, o2 = tmp_path / "o1.tsv", tmp_path / "o2.tsv"
    code, out, _ = run(["transcribe", str(src), str(o1), "--lang", "zh",
                        "--tables", TABLES_DIR], capsys)
    assert code == 0 and "1 sentences" in out
    run(["transcribe", str(src), str(o2), "--lang", "zh", "--tables", TABLES_DIR],
        capsys)
    assert o1.read_bytes() == o2.read_bytes()


def test_transcribe_uncovered_input_exits_2(tmp_path, capsys):
    src = tmp_path / "bad.tsv"
    src.write_text("# lang = zh\nQQQ\t\tO\n\n", encoding="utf-8")
    code, _, err = run(["transcribe", str(src), str(tmp_path / "o.tsv"),
                        "--lang", "zh", "--tables", TABLES_DIR], capsys)
    assert code == 2
    assert "error" in err


def test_build_and_extend_vocab(tmp_path, capsys):
    src = demo_corpus(tmp_path)
    ipa = tmp_path / "ipa.tsv"
    run(["transcribe", str(src), str(ipa), "--lang", "zh", "--tables", TABLES_DIR],
        capsys)
    vocab_path = tmp_path / "v.tsv"
    code, out, _ = run(["build-vocab", str(ipa), "--size", "40",
                        "-o", str(vocab_path)], capsys)
    assert code == 0 and vocab_path.exists()
    extended = tmp_path / "v2.tsv"
    code, out, _ = run(["extend-vocab", "--vocab", str(vocab_path),
                        "--segments", "ʑ,ɕ", "-o", str(extended)], capsys)
    assert code == 0
    from phonexl.vocab import Vocabulary
    assert len(Vocabulary.load(extended)) == len(Vocabulary.load(vocab_path)) + 2


def test_inspect_dataset(tmp_path, capsys):
    src = demo_corpus(tmp_path)
    code, out, _ = run(["inspect-dataset", str(src)], capsys)
    assert code == 0
    info = json.loads(out)
    assert info["sentences"] == 1 and info["words"] == 2
    assert info["transcribed"] is False


def test_build_dict_cli(tmp_path, capsys):
    (tmp_path / "se.txt").write_text("电子 electronic\n", encoding="utf-8")
    (tmp_path / "et.txt").write_text("electronic điện tử\n", encoding="utf-8")
    out_path = tmp_path / "d.tsv"
    code, out, _ = run(["build-dict", "--src-en", str(tmp_path / "se.txt"),
                        "--en-tgt", str(tmp_path / "et.txt"),
                        "--tables", TABLES_DIR, "--target-lang", "vi",
                        "-o", str(out_path)], capsys)
    assert code == 0 and "1 source words" in out
    assert "điện-tử" in out_path.read_text(encoding="utf-8")


def test_augment_cli(tmp_path, capsys):
    bench = tmp_path / "bench"
    make_synthetic_benchmark(bench, seed=3, size=200)
    out_path = tmp_path / "aug.tsv"
    code, out, _ = run(["augment", str(bench / "ner_src_train.tsv"), str(out_path),
                        "--dictionary", str(bench / "dictionary.tsv"),
                        "--ratio", "0.5", "--seed", "7"], capsys)
    assert code == 0 and "switched" in out
    twin = tmp_path / "aug2.tsv"
    run(["augment", str(bench / "ner_src_train.tsv"), str(twin),
         "--dictionary", str(bench / "dictionary.tsv"),
         "--ratio", "0.5", "--seed", "7"], capsys)
    assert out_path.read_bytes() == twin.read_bytes()


def test_make_synthetic_train_evaluate_pipeline(tmp_path, capsys):
    bench = tmp_path / "bench"
    code, out, _ = run(["make-synthetic", "--out", str(bench), "--size", "200",
                        "--seed", "3"], capsys)
    assert code == 0
    assert json.loads(out)["size"] == 200

    run_dir = tmp_path / "run"
    code, out, _ = run([
        "train",
        "--set", f"train={bench / 'ner_src_train.tsv'}",
        "--set", f"dev={bench / 'ner_src_dev.tsv'}",
        "--set", f"dictionary={bench / 'dictionary.tsv'}",
        "--set", "epochs=1", "--set", "layers=1", "--set", "hidden=16",
        "--set", "ff_width=24", "--set", "vocab_size=260",
        "--set", "lambda_align=0.01", "--set", "beta_mlm=0.01",
        "--set", "gamma_xmlm=0.01", "--set", "lr=0.001",
        "--out", str(run_dir), "--seed", "1"], capsys)
    assert code == 0, out
    assert "best dev F1" in out

    code, out, _ = run(["evaluate", "--checkpoint", str(run_dir / "best.ckpt"),
                        "--data", str(bench / "ner_tgt_test.tsv"),
                        "--task", "ner", "--lang", "tgt"], capsys)
    assert code == 0
    assert "f1" in json.loads(out)


def test_gradcheck_cli(capsys):
    code, out, _ = run(["gradcheck", "--samples", "60", "--seed", "0"], capsys)
    assert code == 0
    assert out.count("[PASS]") == 5


def test_missing_config_key_exits_2(tmp_path, capsys):
    code, _, err = run(["train", "--set", "bogus_key=1", "--out",
                        str(tmp_path / "x")], capsys)
    assert code == 2 and "bogus_key" in err


def test_config_file_parsing(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("task = ner\nepochs = 3\nlambda_align = 0.01  # weight\n",
                   encoding="utf-8")
    from phonexl.config import make_run_config
    config = make_run_config(cfg, epochs=5)
    assert config.task == "ner"
    assert config.epochs == 5          # explicit override wins
    assert config.lambda_align == 0.01
