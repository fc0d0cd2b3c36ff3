import numpy as np
import pytest

from phonexl.corpus import AlignedExample, Dataset, Word
from phonexl.errors import ConfigError, DegenerateAlignment
from phonexl.vocab import (SPECIALS, UNK_ID, Vocabulary, collate, extend_vocab,
                           pool_subtokens, pooling_matrix, tokenize,
                           train_subword_vocab)


def one_word_dataset(*surfaces, ipa=()):
    words = tuple(Word(s, tuple(ipa), None, "x") for s in surfaces)
    return Dataset(examples=[AlignedExample(words=words, lang="x")])


def test_single_merge_corpus():
    vocab = train_subword_vocab([one_word_dataset("aa")], target_size=8)
    assert vocab.entries == SPECIALS + ("a", "aa")


def test_character_level_when_target_equals_alphabet():
    vocab = train_subword_vocab([one_word_dataset("ab", "ba")], target_size=7)
    assert vocab.entries == SPECIALS + ("a", "b")


def test_target_below_alphabet_rejected():
    with pytest.raises(ConfigError):
        train_subword_vocab([one_word_dataset("abc")], target_size=7)


def test_training_is_deterministic():
    data = [one_word_dataset("abab", "abba", "baba")]
    v1 = train_subword_vocab(data, target_size=12)
    v2 = train_subword_vocab(data, target_size=12)
    assert v1.entries == v2.entries


def test_phonemic_merges_keep_segment_boundaries():
    data = Dataset(examples=[AlignedExample(
        words=(Word("x", ("tʰ", "a"), None, "l"), Word("y", ("tʰ", "a"), None, "l")),
        lang="l")])
    vocab = train_subword_vocab([data], target_size=10)
    assert "tʰ·a" in vocab.entries


def test_extension_appends_only_and_is_idempotent():
    vocab = train_subword_vocab([one_word_dataset("ab")], target_size=8)
    extended = extend_vocab(vocab, ("ŋ", "ɕ", "ʑ"))
    assert len(extended) == len(vocab) + 3
    assert extended.entries[:len(vocab)] == vocab.entries
    assert extended.base_size == vocab.base_size
    again = extend_vocab(extended, ("ŋ", "ɕ", "ʑ"))
    assert again.entries == extended.entries
    assert extend_vocab(vocab, ("a",)).entries == vocab.entries  # already covered


def test_tokenize_whole_word_hit():
    vocab = Vocabulary(entries=SPECIALS + ("a", "b", "ab"), base_size=8)
    ex = AlignedExample(words=(Word("ab", ("a",), None, "x"),), lang="x")
    row = tokenize(ex, extend_vocab(vocab, ("a",)))
    assert row.ortho_ids == [vocab.id_of("ab")]
    assert row.ortho_word == [0]


def test_tokenize_three_piece_word_map():
    vocab = Vocabulary(entries=SPECIALS + ("a", "b", "c"), base_size=8)
    ex = AlignedExample(words=(Word("abc", ("a",), None, "x"),), lang="x")
    row = tokenize(ex, vocab)
    assert row.ortho_word == [0, 0, 0]


def test_unknown_run_collapses_to_single_unk():
    vocab = Vocabulary(entries=SPECIALS + ("a",), base_size=6)
    ex = AlignedExample(words=(Word("aXYa", ("a",), None, "x"),), lang="x")
    row = tokenize(ex, vocab)
    assert row.ortho_ids == [vocab.id_of("a"), UNK_ID, vocab.id_of("a")]


def test_zero_unk_on_training_corpus():
    data = one_word_dataset("alpha", "beta", "gamma")
    vocab = train_subword_vocab([data], target_size=30)
    for ex in data.examples:
        row = tokenize(ex, vocab)
        assert UNK_ID not in row.ortho_ids


def test_phonemic_stream_longer_than_orthographic_on_cjkv_demo():
    from pathlib import Path
    from phonexl.transcribe import load_tables, to_ipa

    tables = load_tables(Path(__file__).resolve().parent.parent / "src" / "phonexl" / "tables")
    tokens = ["电子", "行业", "越南", "通讯社"]
    words = tuple(Word(t, to_ipa(t, "zh", tables["zh"]), None, "zh") for t in tokens)
    data = Dataset(examples=[AlignedExample(words=words, lang="zh")])
    vocab = train_subword_vocab([data], target_size=60, include_phonemic=False)
    vocab = extend_vocab(vocab, {s for w in words for s in w.ipa})
    row = tokenize(data.examples[0], vocab)
    assert len(row.phone_ids) > len(row.ortho_ids)


def test_pool_subtokens_identity_and_mean():
    v = np.array([[1.0, 0.0], [0.0, 1.0], [3.0, 3.0]])
    np.testing.assert_allclose(pool_subtokens(v, [0, 1, 2]), v)
    pooled = pool_subtokens(v[:2], [0, 0])
    np.testing.assert_allclose(pooled, [[0.5, 0.5]])


def test_pool_subtokens_mean_of_identical_vectors():
    v = np.array([[2.0, 4.0], [2.0, 4.0]])
    np.testing.assert_allclose(pool_subtokens(v, [0, 0]), [[2.0, 4.0]])


def test_pooling_is_linear():
    rng = np.random.default_rng(3)
    a, b = rng.normal(size=(5, 4)), rng.normal(size=(5, 4))
    word_map = [0, 0, 1, 2, 2]
    lhs = pool_subtokens(2.0 * a + 3.0 * b, word_map)
    rhs = 2.0 * pool_subtokens(a, word_map) + 3.0 * pool_subtokens(b, word_map)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)


def test_degenerate_alignment_detected():
    with pytest.raises(DegenerateAlignment):
        pool_subtokens(np.ones((2, 2)), [0, 2])
    with pytest.raises(DegenerateAlignment):
        pooling_matrix([0, 0], n_words=2, length=2)


def test_collate_geometry():
    vocab = Vocabulary(entries=SPECIALS + ("a", "b"), base_size=7)
    ex1 = AlignedExample(words=(Word("ab", ("a",), None, "x"),
                                Word("a", ("b", "a"), None, "x")), lang="x")
    ex2 = AlignedExample(words=(Word("b", ("a",), None, "y"),), lang="y")
    vocab = extend_vocab(vocab, ("a", "b"))
    rows = [tokenize(ex1, vocab), tokenize(ex2, vocab)]
    batch = collate(rows, {"x": 1, "y": 2})
    assert batch.ortho_ids.shape[0] == 2
    assert batch.ortho_ids[0, 0] == vocab.id_of("<cls>")
    assert batch.ortho_word[0, 0] == -1
    assert batch.lang_ids[0, 1] == 1 and batch.lang_ids[1, 1] == 2
    assert batch.lang_ids[0, 0] == 0  # CLS is language-neutral
    # pad positions masked out
    assert batch.ortho_mask[1].sum() == 3  # CLS + 1 subtoken + SEP
    # pooling rows sum to one over each word's subtokens
    np.testing.assert_allclose(batch.pool_ortho[0].sum(axis=1), [1.0, 1.0])


def test_vocab_save_load_round_trip(tmp_path):
    vocab = train_subword_vocab([one_word_dataset("abc", "abd")], target_size=12)
    vocab = extend_vocab(vocab, ("ŋ",))
    path = tmp_path / "v.tsv"
    vocab.save(path)
    loaded = Vocabulary.load(path)
    assert loaded.entries == vocab.entries
    assert loaded.base_size == vocab.base_size
