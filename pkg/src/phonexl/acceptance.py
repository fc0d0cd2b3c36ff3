"""Randomized small-configuration setups shared by the gradcheck CLI and tests.

Builds a miniature bilingual task (tiny vocabulary, 2-layer encoder, a few
sentences, a 2-entry dictionary) and exposes one deterministic loss closure
per training objective, each rebuilding its forward graph on every call.
"""

import numpy as np

from .corpus import AlignedExample, Dataset, Word
from .dictionary import BilingualDictionary, Translation
from .gradcheck import GradCheckReport, grad_check
from .model import EncoderConfig, forward, new_model
from .objectives import (LossWeights, batch_alignment_loss, mask_tokens,
                         mlm_loss, task_loss, total_loss, xmlm_loss)
from .vocab import collate, extend_vocab, tokenize, train_subword_vocab

_SRC_LETTERS = "abcdef"
_SEGMENTS = ("p", "t", "k", "a", "i", "u", "ʃ", "ŋ")
_TAGS = ("O", "B-X", "B-Y", "I-X")


def _random_example(rng: np.random.Generator, n_words: int, lang: str = "src",
                    letters: str = _SRC_LETTERS) -> AlignedExample:
    words = []
    for _ in range(n_words):
        surface = "".join(rng.choice(list(letters), size=int(rng.integers(1, 4))))
        ipa = tuple(rng.choice(_SEGMENTS, size=int(rng.integers(1, 4))))
        label = str(rng.choice(_TAGS))
        words.append(Word(surface, ipa, label, lang))
    return AlignedExample(words=tuple(words), lang=lang)


def build_toy_setup(seed: int = 0):
    """(model, examples, dictionary, weights) on a random desk-scale config."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x9c]))
    examples = [_random_example(rng, int(rng.integers(2, 6))) for _ in range(3)]
    vocab = train_subword_vocab([Dataset(examples=examples)], target_size=40)
    vocab = extend_vocab(vocab, _SEGMENTS)
    config = EncoderConfig(layers=int(rng.integers(1, 3)), heads=2,
                           hidden=int(rng.choice((8, 16))), ff_width=16,
                           max_positions=64, languages=2)
    model = new_model(config, vocab, _TAGS, ("src", "tgt"), seed=int(rng.integers(1000)))
    dictionary = BilingualDictionary(entries={
        examples[0].words[0].surface: (Translation("qq", ("ʃ", "a"), "tgt"),),
        examples[1].words[-1].surface: (Translation("zz", ("ŋ", "u"), "tgt"),
                                        Translation("zx", ("k", "i"), "tgt")),
    }, target_lang="tgt")
    weights = LossWeights(lambda_align=0.37, beta_mlm=0.53, gamma_xmlm=0.71,
                          mu=0.5, r=0.6)
    return model, examples, dictionary, weights


def loss_closures(model, examples, dictionary, weights) -> dict:
    """Deterministic scalar-loss closures, one per objective plus the total."""
    tag_to_id = model.tag_to_id

    def rows():
        return [tokenize(ex, model.vocab, tag_to_id, model.use_phonemic)
                for ex in examples]

    def loss_task():
        batch = collate(rows(), model.lang_to_id)
        return task_loss(model, forward(model, batch), batch)

    def loss_align():
        batch = collate(rows(), model.lang_to_id)
        return batch_alignment_loss(model, batch)

    def loss_mlm():
        rng = np.random.default_rng(41)
        masked = [mask_tokens(row, weights.mu, rng) for row in rows()]
        batch = collate([m for m, _ in masked], model.lang_to_id)
        return mlm_loss(model, forward(model, batch), [p for _, p in masked])

    def loss_xmlm():
        from .dictionary import code_switch
        rng_switch = np.random.default_rng(43)
        rng_mask = np.random.default_rng(44)
        switched = [code_switch(ex, dictionary, weights.r, rng_switch)[0]
                    for ex in examples]
        masked = [mask_tokens(tokenize(ex, model.vocab, tag_to_id, model.use_phonemic),
                              weights.mu, rng_mask) for ex in switched]
        batch = collate([m for m, _ in masked], model.lang_to_id)
        return xmlm_loss(model, forward(model, batch), [p for _, p in masked])

    def loss_total():
        return total_loss(model, examples, weights, dictionary,
                          np.random.default_rng(51), np.random.default_rng(52),
                          np.random.default_rng(53))[0]

    return {"L_task": loss_task, "L_align": loss_align, "L_MLM": loss_mlm,
            "L_XMLM": loss_xmlm, "total": loss_total}


def run_gradient_checks(seed: int = 0, n_samples: int = 200) -> dict[str, GradCheckReport]:
    """Finite-difference checks of every objective on a random small config."""
    model, examples, dictionary, weights = build_toy_setup(seed)
    closures = loss_closures(model, examples, dictionary, weights)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xfd]))
    return {name: grad_check(fn, model.params, n_samples=n_samples, rng=rng)
            for name, fn in closures.items()}
