"""Training objectives: CRF tagging, alignment, MLM and code-switched MLM.

The combined loss is

    total = task + lambda * align + beta * mlm + gamma * xmlm

with every component mean-reduced so the weights do not depend on batch
size.  Components with zero weight are skipped outright, which makes the
reduction identities exact: zero weights leave the task loss untouched and
mu = 0 gives an MLM loss of exactly 0.
"""

from dataclasses import dataclass, replace as dc_replace

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor
from .corpus import AlignedExample
from .dictionary import BilingualDictionary, code_switch
from .errors import ConfigError, DegenerateEmbedding
from .model import Model, align_inputs, forward, mlm_logits, word_hidden
from .vocab import MASK_ID, SubtokenBatch, TokenRow, collate, tokenize

INIT_STD = 0.02


@dataclass(frozen=True)
class LossWeights:
    lambda_align: float = 0.0   # written alpha in the combined-loss formula
    beta_mlm: float = 0.0
    gamma_xmlm: float = 0.0
    mu: float = 0.15            # masked word fraction
    r: float = 0.3              # code-switched word fraction

    def __post_init__(self):
        if min(self.lambda_align, self.beta_mlm, self.gamma_xmlm) < 0:
            raise ConfigError("loss weights must be non-negative")
        if not (0.0 <= self.mu <= 1.0 and 0.0 <= self.r <= 1.0):
            raise ConfigError("mu and r must lie in [0, 1]")


def init_crf_params(hidden: int, n_tags: int, rng: np.random.Generator) -> dict[str, Tensor]:
    values = {
        "crf.proj": rng.normal(0.0, INIT_STD, size=(hidden, n_tags)),
        "crf.proj_bias": np.zeros(n_tags),
        "crf.transitions": rng.normal(0.0, INIT_STD, size=(n_tags, n_tags)),
        "crf.start": rng.normal(0.0, INIT_STD, size=n_tags),
        "crf.stop": rng.normal(0.0, INIT_STD, size=n_tags),
    }
    return {name: Tensor(v, name=name) for name, v in values.items()}


# ----------------------------------------------------------------- masking

@dataclass(frozen=True)
class MaskPlan:
    words: tuple[int, ...]
    positions: tuple[int, ...]      # row-level ortho subtoken indices
    original_ids: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.positions)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def mask_tokens(row: TokenRow, mu: float, rng: np.random.Generator) -> tuple[TokenRow, MaskPlan]:
    """Whole-word masking of round(mu * M) words (at least one when mu > 0).

    Every orthographic subtoken of a selected word becomes MASK; the
    phonemic stream is left untouched.
    """
    if not 0.0 <= mu <= 1.0:
        raise ConfigError(f"mask fraction must be in [0, 1], got {mu}")
    n_words = row.n_words
    n_mask = _round_half_up(mu * n_words)
    if mu > 0 and n_words >= 1:
        n_mask = max(n_mask, 1)
    if n_mask == 0:
        return row, MaskPlan((), (), ())
    words = tuple(sorted(rng.choice(n_words, size=n_mask, replace=False).tolist()))
    chosen = set(words)
    positions = tuple(t for t, m in enumerate(row.ortho_word) if m in chosen)
    original = tuple(row.ortho_ids[t] for t in positions)
    masked_ids = list(row.ortho_ids)
    for t in positions:
        masked_ids[t] = MASK_ID
    masked = dc_replace(row, ortho_ids=masked_ids)
    return masked, MaskPlan(words, positions, original)


# ------------------------------------------------------------------ losses

def alignment_loss(ortho_words: Tensor, phone_words: Tensor, tau) -> Tensor:
    """Bidirectional contrastive loss over the in-sentence similarity matrix.

    S[i][j] = tau * cos(o_i, p_j); cross-entropy against the diagonal is
    averaged over rows and over columns, then halved.
    """
    M = ortho_words.shape[0]
    for side, name in ((ortho_words, "orthographic"), (phone_words, "phonemic")):
        if np.any(np.linalg.norm(side.value, axis=-1) == 0.0):
            raise DegenerateEmbedding(f"zero-norm {name} word embedding")
    o_norm = ad.sqrt(ad.sum_(ortho_words * ortho_words, axis=-1, keepdims=True))
    p_norm = ad.sqrt(ad.sum_(phone_words * phone_words, axis=-1, keepdims=True))
    sim = ad.matmul(ortho_words / o_norm, ad.transpose(phone_words / p_norm, (1, 0)))
    sim = sim * tau
    idx = np.arange(M)
    diagonal = sim[(idx, idx)]
    loss_o_to_p = ad.mean(ad.logsumexp(sim, axis=1) - diagonal)
    loss_p_to_o = ad.mean(ad.logsumexp(sim, axis=0) - diagonal)
    return (loss_o_to_p + loss_p_to_o) * 0.5


def _masked_positions(plans: list[MaskPlan]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols, targets = [], [], []
    for b, plan in enumerate(plans):
        for pos, original in zip(plan.positions, plan.original_ids):
            rows.append(b)
            cols.append(pos + SubtokenBatch.CLS_OFFSET)
            targets.append(original)
    return np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64), \
        np.array(targets, dtype=np.int64)


def mlm_loss(model: Model, hidden: Tensor, plans: list[MaskPlan]) -> Tensor:
    """Mean cross-entropy of the original ids at masked positions (0 if none)."""
    rows, cols, targets = _masked_positions(plans)
    if rows.size == 0:
        return ad.constant(0.0)
    logits = mlm_logits(model, hidden, rows, cols)
    picked = logits[(np.arange(rows.size), targets)]
    return ad.mean(ad.logsumexp(logits, axis=1) - picked)


def xmlm_loss(model: Model, hidden: Tensor, plans: list[MaskPlan]) -> Tensor:
    """MLM over a code-switched batch; targets are the pre-masking ids, which
    at switched positions are target-language subtokens."""
    return mlm_loss(model, hidden, plans)


def crf_nll(emissions: Tensor, labels: np.ndarray, params: dict[str, Tensor]) -> Tensor:
    """Negative log-likelihood of a label path under a linear-chain CRF.

    Score = start[y1] + sum emissions[m][y_m] + sum transitions[y_m][y_m+1]
    + stop[y_M]; the partition function comes from the forward algorithm in
    log space.
    """
    start, stop = params["crf.start"], params["crf.stop"]
    trans = params["crf.transitions"]
    M, K = emissions.shape
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (M,) or labels.min() < 0 or labels.max() >= K:
        raise ConfigError(f"labels out of range for emissions {emissions.shape}")
    alpha = start + emissions[0]
    score = start[int(labels[0])] + emissions[(0, int(labels[0]))]
    for m in range(1, M):
        step = ad.reshape(alpha, (K, 1)) + trans + ad.reshape(emissions[m], (1, K))
        alpha = ad.logsumexp(step, axis=0)
        score = score + trans[(int(labels[m - 1]), int(labels[m]))] \
            + emissions[(m, int(labels[m]))]
    log_z = ad.logsumexp(alpha + stop, axis=0)
    score = score + stop[int(labels[M - 1])]
    return log_z - score


def crf_decode(emissions: np.ndarray, params: dict[str, Tensor]) -> list[int]:
    """Viterbi decoding; ties break toward the lower label index."""
    start = params["crf.start"].value
    stop = params["crf.stop"].value
    trans = params["crf.transitions"].value
    M, K = emissions.shape
    delta = start + emissions[0]
    backptr = np.zeros((M, K), dtype=np.int64)
    for m in range(1, M):
        scores = delta[:, None] + trans + emissions[m][None, :]
        backptr[m] = np.argmax(scores, axis=0)
        delta = scores[backptr[m], np.arange(K)]
    delta = delta + stop
    best = [int(np.argmax(delta))]
    for m in range(M - 1, 0, -1):
        best.append(int(backptr[m, best[-1]]))
    best.reverse()
    return best


def sentence_emissions(model: Model, word_states: Tensor, batch: SubtokenBatch,
                       b: int) -> Tensor:
    """Emission scores of sentence b, [M_b, K]."""
    m_b = int(batch.n_words[b])
    states = word_states[(b, slice(0, m_b))]
    return ad.matmul(states, model.params["crf.proj"]) + model.params["crf.proj_bias"]


def task_loss(model: Model, hidden: Tensor, batch: SubtokenBatch) -> Tensor:
    """Mean per-sentence CRF negative log-likelihood."""
    if batch.labels is None:
        raise ConfigError("task loss needs labelled input")
    states = word_hidden(hidden, batch)
    losses = []
    for b in range(batch.size):
        m_b = int(batch.n_words[b])
        emissions = sentence_emissions(model, states, batch, b)
        losses.append(crf_nll(emissions, batch.labels[b, :m_b], model.params))
    total = losses[0]
    for piece in losses[1:]:
        total = total + piece
    return total * (1.0 / len(losses))


def batch_alignment_loss(model: Model, batch: SubtokenBatch) -> Tensor:
    """Mean in-sentence alignment loss over the batch (clean input)."""
    pooled_o, pooled_p = align_inputs(model, batch)
    tau = model.temperature()
    losses = []
    for b in range(batch.size):
        m_b = int(batch.n_words[b])
        losses.append(alignment_loss(pooled_o[(b, slice(0, m_b))],
                                     pooled_p[(b, slice(0, m_b))], tau))
    total = losses[0]
    for piece in losses[1:]:
        total = total + piece
    return total * (1.0 / len(losses))


# -------------------------------------------------------------- total loss

def total_loss(model: Model, examples: list[AlignedExample], weights: LossWeights,
               dictionary: BilingualDictionary | None,
               rng_mask: np.random.Generator,
               rng_switch: np.random.Generator,
               rng_xmask: np.random.Generator,
               clean_rows: list[TokenRow] | None = None) -> tuple[Tensor, dict]:
    """Weighted sum of the four objectives through shared parameters.

    Returns the scalar loss tensor and a float breakdown per component.
    """
    tag_to_id = model.tag_to_id
    if clean_rows is None:
        clean_rows = [tokenize(ex, model.vocab, tag_to_id, model.use_phonemic)
                      for ex in examples]
    batch = collate(clean_rows, model.lang_to_id)
    hidden = forward(model, batch)
    loss = task_loss(model, hidden, batch)
    parts = {"L_task": loss.item(), "L_align": 0.0, "L_MLM": 0.0, "L_XMLM": 0.0}

    if weights.lambda_align > 0 and model.use_phonemic:
        align = batch_alignment_loss(model, batch)
        parts["L_align"] = align.item()
        loss = loss + align * weights.lambda_align

    if weights.beta_mlm > 0:
        masked = [mask_tokens(row, weights.mu, rng_mask) for row in clean_rows]
        masked_batch = collate([m for m, _ in masked], model.lang_to_id)
        masked_hidden = forward(model, masked_batch)
        mlm = mlm_loss(model, masked_hidden, [p for _, p in masked])
        parts["L_MLM"] = mlm.item()
        loss = loss + mlm * weights.beta_mlm

    if weights.gamma_xmlm > 0:
        if dictionary is None:
            raise ConfigError("XMLM weight set but no bilingual dictionary given")
        switched_rows = []
        for ex in examples:
            switched, _ = code_switch(ex, dictionary, weights.r, rng_switch)
            switched_rows.append(tokenize(switched, model.vocab, tag_to_id,
                                          model.use_phonemic))
        masked = [mask_tokens(row, weights.mu, rng_xmask) for row in switched_rows]
        masked_batch = collate([m for m, _ in masked], model.lang_to_id)
        masked_hidden = forward(model, masked_batch)
        xmlm = xmlm_loss(model, masked_hidden, [p for _, p in masked])
        parts["L_XMLM"] = xmlm.item()
        loss = loss + xmlm * weights.gamma_xmlm

    parts["total"] = loss.item()
    return loss, parts
