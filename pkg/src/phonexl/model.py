"""Input composition and the transformer encoder.

Each orthographic subtoken position i is embedded as the sum of five terms:
token, position, segment, the word-pooled phonemic vector broadcast back to
the word's positions, and the word's language embedding.  Ablation flags
drop the phonemic and language terms, reducing the sum to the plain
three-term composition.

The encoder is a pre-norm transformer: per layer, multi-head self-attention
with an additive padding mask, then a position-wise feed-forward block, both
wrapped in residual connections.  With zero layers it is the identity.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .errors import ConfigError
from .vocab import SubtokenBatch, Vocabulary

LN_EPS = 1e-5
MASK_BIAS = -1e9
INIT_STD = 0.02
TEMPERATURE_INIT = float(np.log(1.0 / 0.07))
TEMPERATURE_MAX = 100.0
# language rows are max-norm constrained: their ids are sparsely exposed
# (code-switched positions only, for the target language), and an outsized
# row would swamp the other input components at zero-shot time
LANG_ROW_MAX_NORM = 0.05

# full-scale reference backbone is L=12, H=12, D=768; desk-scale defaults below


@dataclass(frozen=True)
class EncoderConfig:
    layers: int = 2
    heads: int = 2
    hidden: int = 64
    ff_width: int = 256
    max_positions: int = 128
    segments: int = 2
    languages: int = 2
    vocab_ortho: int = 0
    vocab_phone: int = 0

    def __post_init__(self):
        if self.layers < 0 or min(self.heads, self.hidden, self.ff_width,
                                  self.max_positions, self.segments, self.languages) < 1:
            raise ConfigError(f"non-positive encoder dimension in {self}")
        if self.hidden % self.heads:
            raise ConfigError(f"hidden {self.hidden} not divisible by heads {self.heads}")


@dataclass
class AblationFlags:
    no_pe: bool = False
    no_extension: bool = False
    no_lang_emb: bool = False
    romanized: bool = False


@dataclass
class Model:
    config: EncoderConfig
    params: dict[str, Tensor]
    vocab: Vocabulary
    tag_set: tuple[str, ...]
    langs: tuple[str, ...]
    flags: AblationFlags = field(default_factory=AblationFlags)

    @property
    def tag_to_id(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.tag_set)}

    @property
    def lang_to_id(self) -> dict[str, int]:
        # id 0 is reserved for positions outside any language (CLS/SEP/PAD)
        return {l: i + 1 for i, l in enumerate(self.langs)}

    @property
    def use_phonemic(self) -> bool:
        return not self.flags.no_pe

    @property
    def use_lang(self) -> bool:
        return not self.flags.no_lang_emb

    def temperature(self) -> Tensor:
        return ad.exp(self.params["temp.log_scale"])


def init_encoder_params(config: EncoderConfig, rng: np.random.Generator) -> dict[str, Tensor]:
    """BERT-style init: N(0, 0.02) matrices, zero biases, unit LN scales."""
    D, F = config.hidden, config.ff_width

    def normal(*shape):
        return rng.normal(0.0, INIT_STD, size=shape)

    params: dict[str, np.ndarray] = {
        "emb.word": normal(config.vocab_ortho, D),
        "emb.phone": normal(config.vocab_phone, D),
        "emb.pos": normal(config.max_positions, D),
        "emb.seg": normal(config.segments, D),
        # zero start: language identity only ever contributes trained signal,
        # so sparsely exposed language ids cannot inject init noise at test
        "emb.lang": np.zeros((config.languages, D)),
        "head.bias": np.zeros(config.vocab_ortho),
        "temp.log_scale": np.asarray(TEMPERATURE_INIT),
    }
    for i in range(config.layers):
        params[f"layer{i}.attn.wq"] = normal(D, D)
        params[f"layer{i}.attn.wk"] = normal(D, D)
        params[f"layer{i}.attn.wv"] = normal(D, D)
        params[f"layer{i}.attn.wo"] = normal(D, D)
        for name in ("bq", "bk", "bv", "bo"):
            params[f"layer{i}.attn.{name}"] = np.zeros(D)
        params[f"layer{i}.ln1.g"] = np.ones(D)
        params[f"layer{i}.ln1.b"] = np.zeros(D)
        params[f"layer{i}.ln2.g"] = np.ones(D)
        params[f"layer{i}.ln2.b"] = np.zeros(D)
        params[f"layer{i}.ff.w1"] = normal(D, F)
        params[f"layer{i}.ff.b1"] = np.zeros(F)
        params[f"layer{i}.ff.w2"] = normal(F, D)
        params[f"layer{i}.ff.b2"] = np.zeros(D)
    return {name: Tensor(value, name=name) for name, value in params.items()}


def new_model(config: EncoderConfig, vocab: Vocabulary, tag_set, langs, seed: int,
              flags: AblationFlags | None = None) -> Model:
    """Fresh model; encoder, embedding and CRF tensors share one seed."""
    from .objectives import init_crf_params

    config = replace(config, vocab_ortho=len(vocab), vocab_phone=len(vocab),
                     languages=len(langs) + 1)
    seq = np.random.SeedSequence([seed, 0x0e17])
    enc_rng, crf_rng = [np.random.default_rng(s) for s in seq.spawn(2)]
    params = init_encoder_params(config, enc_rng)
    params.update(init_crf_params(config.hidden, len(tag_set), crf_rng))
    return Model(config=config, params=params, vocab=vocab, tag_set=tuple(tag_set),
                 langs=tuple(langs), flags=flags or AblationFlags())


def parameter_names(params: dict[str, Tensor]) -> list[str]:
    """Flat enumeration used by the optimizer and the gradient checks."""
    return sorted(params)


def constrain_parameters(params: dict[str, Tensor]) -> None:
    """Post-update constraints: temperature cap and language-row max norm."""
    if "temp.log_scale" in params:
        cap = np.log(TEMPERATURE_MAX)
        params["temp.log_scale"].value = np.minimum(params["temp.log_scale"].value, cap)
    if "emb.lang" in params:
        rows = params["emb.lang"].value
        norms = np.linalg.norm(rows, axis=1, keepdims=True)
        scale = np.minimum(1.0, LANG_ROW_MAX_NORM / np.maximum(norms, 1e-12))
        params["emb.lang"].value = rows * scale


# ------------------------------------------------------------------- forward

def embed(model: Model, batch: SubtokenBatch) -> Tensor:
    """Five-term input composition, [B, T, D]."""
    p = model.params
    B, T = batch.ortho_ids.shape
    if T > model.config.max_positions:
        raise ConfigError(f"sequence length {T} exceeds max positions "
                          f"{model.config.max_positions}")
    positions = np.broadcast_to(np.arange(T), (B, T))
    x = ad.embedding(p["emb.word"], batch.ortho_ids)
    x = x + ad.embedding(p["emb.pos"], positions)
    x = x + ad.embedding(p["emb.seg"], batch.seg_ids)
    if model.use_phonemic:
        Bp, P = batch.phone_ids.shape
        phone_positions = np.broadcast_to(np.arange(P), (Bp, P))
        phone = ad.embedding(p["emb.phone"], batch.phone_ids)
        phone = phone + ad.embedding(p["emb.pos"], phone_positions)
        pe_word = ad.matmul(ad.constant(batch.pool_phone), phone)   # [B, M, D]
        x = x + ad.matmul(ad.constant(batch.bcast), pe_word)        # [B, T, D]
    if model.use_lang:
        x = x + ad.embedding(p["emb.lang"], batch.lang_ids)
    return x


def _layernorm(x: Tensor, gain: Tensor, bias: Tensor) -> Tensor:
    mu = ad.mean(x, axis=-1, keepdims=True)
    centered = x - mu
    var = ad.mean(centered * centered, axis=-1, keepdims=True)
    return centered / ad.sqrt(var + LN_EPS) * gain + bias


def _attention(params, x: Tensor, attn_bias: Tensor, layer: int,
               config: EncoderConfig) -> Tensor:
    B, T, D = x.shape
    H = config.heads
    dh = D // H

    def heads(name):
        proj = ad.matmul(x, params[f"layer{layer}.attn.w{name}"]) \
            + params[f"layer{layer}.attn.b{name}"]
        return ad.transpose(ad.reshape(proj, (B, T, H, dh)), (0, 2, 1, 3))

    q, k, v = heads("q"), heads("k"), heads("v")
    scores = ad.matmul(q, ad.transpose(k, (0, 1, 3, 2))) * (1.0 / np.sqrt(dh))
    scores = scores + attn_bias                                     # [B, H, T, T]
    attn = ad.softmax(scores, axis=-1)
    ctx = ad.reshape(ad.transpose(ad.matmul(attn, v), (0, 2, 1, 3)), (B, T, D))
    return ad.matmul(ctx, params[f"layer{layer}.attn.wo"]) + params[f"layer{layer}.attn.bo"]


def encode(model: Model, x: Tensor, ortho_mask: np.ndarray) -> Tensor:
    """Pre-norm transformer stack; identity when layers == 0."""
    p = model.params
    bias = ad.constant(np.where(ortho_mask > 0, 0.0, MASK_BIAS)[:, None, None, :])
    for i in range(model.config.layers):
        h = _layernorm(x, p[f"layer{i}.ln1.g"], p[f"layer{i}.ln1.b"])
        x = x + _attention(p, h, bias, i, model.config)
        h = _layernorm(x, p[f"layer{i}.ln2.g"], p[f"layer{i}.ln2.b"])
        ff = ad.matmul(h, p[f"layer{i}.ff.w1"]) + p[f"layer{i}.ff.b1"]
        ff = ad.matmul(ad.gelu(ff), p[f"layer{i}.ff.w2"]) + p[f"layer{i}.ff.b2"]
        x = x + ff
    return x


def forward(model: Model, batch: SubtokenBatch) -> Tensor:
    return encode(model, embed(model, batch), batch.ortho_mask)


def word_hidden(h: Tensor, batch: SubtokenBatch) -> Tensor:
    """Mean-pool encoder states over each word's ortho subtokens, [B, M, D]."""
    return ad.matmul(ad.constant(batch.pool_ortho), h)


def mlm_logits(model: Model, h: Tensor, rows: np.ndarray, cols: np.ndarray) -> Tensor:
    """Tied-head logits at the given batch positions, [n, V_o]."""
    picked = h[(rows, cols)]
    return ad.matmul(picked, ad.transpose(model.params["emb.word"], (1, 0))) \
        + model.params["head.bias"]


def align_inputs(model: Model, batch: SubtokenBatch) -> tuple[Tensor, Tensor]:
    """Word-pooled embedding-table outputs for the alignment loss, [B, M, D] each."""
    ortho = ad.embedding(model.params["emb.word"], batch.ortho_ids)
    phone = ad.embedding(model.params["emb.phone"], batch.phone_ids)
    pooled_o = ad.matmul(ad.constant(batch.pool_ortho), ortho)
    pooled_p = ad.matmul(ad.constant(batch.pool_phone), phone)
    return pooled_o, pooled_p
