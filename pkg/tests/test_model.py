import numpy as np
import pytest

from phonexl import autodiff as ad
from phonexl.corpus import AlignedExample, Word
from phonexl.errors import ConfigError
from phonexl.model import (AblationFlags, EncoderConfig, embed, encode,
                           forward, new_model, word_hidden)
from phonexl.vocab import SPECIALS, Vocabulary, collate, extend_vocab, tokenize

TAGS = ("O", "B-X")
LANGS = ("src", "tgt")


def small_vocab():
    base = Vocabulary(entries=SPECIALS + ("a", "b", "c"), base_size=8)
    return extend_vocab(base, ("ka", "to", "pu"))


def examples():
    return [
        AlignedExample(words=(Word("ab", ("ka", "to"), "O", "src"),
                              Word("c", ("pu",), "B-X", "src")), lang="src"),
        AlignedExample(words=(Word("ca", ("to",), "O", "tgt"),), lang="tgt"),
    ]


def build(seed=0, layers=2, flags=None):
    config = EncoderConfig(layers=layers, heads=2, hidden=8, ff_width=12,
                           max_positions=32)
    model = new_model(config, small_vocab(), TAGS, LANGS, seed, flags)
    rows = [tokenize(ex, model.vocab, model.tag_to_id, model.use_phonemic)
            for ex in examples()]
    return model, collate(rows, model.lang_to_id)


def test_config_validation():
    with pytest.raises(ConfigError):
        EncoderConfig(hidden=10, heads=3)
    with pytest.raises(ConfigError):
        EncoderConfig(hidden=0)
    EncoderConfig(layers=0)  # a zero-layer encoder is legal


def test_all_zero_tables_give_zero_embeddings():
    model, batch = build()
    for name in ("emb.word", "emb.phone", "emb.pos", "emb.seg", "emb.lang"):
        model.params[name].value[:] = 0.0
    x = embed(model, batch)
    np.testing.assert_array_equal(x.value, 0.0)


def test_ablation_flags_reduce_to_sub_sums():
    model, batch = build()
    full = embed(model, batch).value
    p = model.params

    def term(name, ids):
        return p[name].value[ids]

    B, T = batch.ortho_ids.shape
    pos = np.broadcast_to(np.arange(T), (B, T))
    three = term("emb.word", batch.ortho_ids) + term("emb.pos", pos) \
        + term("emb.seg", batch.seg_ids)
    lang = term("emb.lang", batch.lang_ids)

    model.flags = AblationFlags(no_pe=True, no_lang_emb=True)
    np.testing.assert_allclose(embed(model, batch).value, three, atol=1e-15)
    model.flags = AblationFlags(no_pe=True)
    np.testing.assert_allclose(embed(model, batch).value, three + lang, atol=1e-15)
    model.flags = AblationFlags(no_lang_emb=True)
    pe = full - three - lang
    np.testing.assert_allclose(embed(model, batch).value, three + pe, atol=1e-15)


def test_phonemic_broadcast_is_word_mean():
    # 1 word with two phonemic subtokens u, v: the broadcast term is (u+v)/2
    model, _ = build()
    p = model.params
    for name in ("emb.word", "emb.pos", "emb.seg", "emb.lang"):
        p[name].value[:] = 0.0
    ex = AlignedExample(words=(Word("ab", ("ka", "to"), "O", "src"),), lang="src")
    row = tokenize(ex, model.vocab, model.tag_to_id)
    batch = collate([row], model.lang_to_id)
    u = p["emb.phone"].value[model.vocab.id_of("ka")]
    v = p["emb.phone"].value[model.vocab.id_of("to")]
    x = embed(model, batch).value[0]
    np.testing.assert_allclose(x[1], (u + v) / 2.0, atol=1e-15)
    np.testing.assert_allclose(x[2], (u + v) / 2.0, atol=1e-15)
    np.testing.assert_array_equal(x[0], 0.0)  # CLS takes no phonemic term


def test_zero_layer_encoder_is_identity():
    model, batch = build(layers=0)
    x = embed(model, batch)
    h = encode(model, x, batch.ortho_mask)
    np.testing.assert_array_equal(h.value, x.value)


def test_batch_permutation_equivariance():
    model, batch = build()
    h = forward(model, batch).value
    rows = [tokenize(ex, model.vocab, model.tag_to_id) for ex in examples()]
    flipped = collate(rows[::-1], model.lang_to_id)
    h_flipped = forward(model, flipped).value
    # row 1 of the flipped batch is row 0 of the original (same padded width)
    np.testing.assert_array_equal(h_flipped[1], h[0])
    np.testing.assert_array_equal(h_flipped[0][:h[1].shape[0]], h[1])


def test_pad_positions_cannot_influence_real_ones():
    model, batch = build()
    h = forward(model, batch).value
    tampered = collate(batch.rows, model.lang_to_id)
    pad = tampered.ortho_mask == 0.0
    assert pad.any()
    tampered.ortho_ids[pad] = 3  # arbitrary real ids in pad slots
    h2 = forward(model, tampered).value
    real = batch.ortho_mask > 0
    np.testing.assert_array_equal(h2[real], h[real])


def test_sequence_length_guard():
    model, batch = build()
    long_ex = AlignedExample(
        words=tuple(Word("a", ("ka",), "O", "src") for _ in range(40)), lang="src")
    row = tokenize(long_ex, model.vocab, model.tag_to_id)
    with pytest.raises(ConfigError):
        embed(model, collate([row], model.lang_to_id))


def test_word_hidden_pools_subtokens():
    model, batch = build(layers=0)
    h = forward(model, batch)
    states = word_hidden(h, batch).value
    x = h.value
    np.testing.assert_allclose(states[0, 0], x[0, 1:3].mean(axis=0), atol=1e-12)
    np.testing.assert_allclose(states[0, 1], x[0, 3], atol=1e-12)


def test_same_seed_same_parameters():
    m1, _ = build(seed=5)
    m2, _ = build(seed=5)
    for name in m1.params:
        np.testing.assert_array_equal(m1.params[name].value, m2.params[name].value)


def test_temperature_initialised_to_clip_convention():
    model, _ = build()
    assert float(model.temperature().value) == pytest.approx(1.0 / 0.07, rel=1e-12)
