"""Joint subword vocabulary over orthographic text and IPA segment sequences.

One id space serves both streams.  Orthographic entries are plain strings
built from codepoints; phonemic entries are middle-dot joined segment
sequences, so their unit boundaries stay explicit.  Subword training is
frequency-greedy pair merging restricted to word-internal pairs; extension
appends new IPA segments without disturbing existing ids.

Tokenization is greedy longest-match against the vocabulary, which makes it
total (single codepoints fall back to UNK) and deterministic.
"""

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import AlignedExample
from .errors import ConfigError, DegenerateAlignment
from .ipa import SEGMENT_SEPARATOR, join_segments, parse_segments

SPECIALS = ("<pad>", "<unk>", "<cls>", "<sep>", "<mask>")
PAD_ID, UNK_ID, CLS_ID, SEP_ID, MASK_ID = range(5)


@dataclass(frozen=True)
class Vocabulary:
    entries: tuple[str, ...]
    base_size: int
    _index: dict = field(init=False, repr=False, compare=False)
    _max_chars: int = field(init=False, repr=False, compare=False)
    _max_units: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.entries[:5] != SPECIALS:
            raise ConfigError("vocabulary must start with the five special tokens")
        index = {}
        for i, entry in enumerate(self.entries):
            if entry in index:
                raise ConfigError(f"duplicate vocabulary entry {entry!r}")
            index[entry] = i
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_max_chars", max(len(e) for e in self.entries))
        object.__setattr__(self, "_max_units",
                           max(len(parse_segments(e)) for e in self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def id_of(self, entry: str) -> int | None:
        return self._index.get(entry)

    def save(self, path: str | Path) -> None:
        lines = [f"{i}\t{s}" for i, s in enumerate(self.entries)]
        lines.append(f"# base_size = {self.base_size}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "Vocabulary":
        entries = []
        base_size = None
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            if raw.startswith("#"):
                body = raw[1:].strip()
                if body.startswith("base_size"):
                    base_size = int(body.partition("=")[2])
                continue
            i, _, entry = raw.partition("\t")
            if int(i) != len(entries):
                raise ConfigError(f"{path}: non-dense vocabulary ids at {raw!r}")
            entries.append(entry)
        if base_size is None:
            base_size = len(entries)
        return cls(entries=tuple(entries), base_size=base_size)


def _word_sequences(datasets) -> tuple[Counter, Counter]:
    """Symbol sequences per stream: (ortho word -> freq, phone segment tuple -> freq)."""
    ortho, phone = Counter(), Counter()
    for dataset in datasets:
        for example in dataset.examples:
            for word in example.words:
                if word.surface:
                    ortho[tuple(word.surface)] += 1
                if word.ipa:
                    phone[tuple(word.ipa)] += 1
    return ortho, phone


def _merge_symbols(left: str, right: str, stream: str) -> str:
    if stream == "phone":
        return left + SEGMENT_SEPARATOR + right
    return left + right


def train_subword_vocab(datasets, target_size: int,
                        include_phonemic: bool = True) -> Vocabulary:
    """Frequency-greedy pair merging up to `target_size` entries.

    Every single symbol seen in the corpus is kept, so tokenizing the
    training data never produces UNK.  Ties between pairs break toward the
    lexicographically smaller pair for determinism.
    """
    ortho_seqs, phone_seqs = _word_sequences(datasets)
    if not include_phonemic:
        phone_seqs = Counter()
    sequences = [[list(seq), freq, "ortho"] for seq, freq in sorted(ortho_seqs.items())]
    sequences += [[list(seq), freq, "phone"] for seq, freq in sorted(phone_seqs.items())]

    alphabet = sorted({sym for seq, _, _ in sequences for sym in seq})
    if target_size < len(SPECIALS) + len(alphabet):
        raise ConfigError(
            f"target size {target_size} below alphabet size {len(alphabet)} + specials")
    entries = list(SPECIALS) + alphabet
    known = set(entries)

    while len(entries) < target_size:
        pair_counts = Counter()
        for seq, freq, stream in sequences:
            for a, b in zip(seq, seq[1:]):
                pair_counts[(a, b, stream)] += freq
        candidates = [(count, pair) for pair, count in pair_counts.items()
                      if _merge_symbols(*pair) not in known]
        if not candidates:
            break
        best_count = max(count for count, _ in candidates)
        best_pair = min(pair for count, pair in candidates if count == best_count)
        merged = _merge_symbols(*best_pair)
        entries.append(merged)
        known.add(merged)
        a, b, stream = best_pair
        for seq, _, s in sequences:
            if s != stream:
                continue
            i = 0
            while i < len(seq) - 1:
                if seq[i] == a and seq[i + 1] == b:
                    seq[i:i + 2] = [merged]
                i += 1
    return Vocabulary(entries=tuple(entries), base_size=len(entries))


def extend_vocab(vocab: Vocabulary, ipa_charset) -> Vocabulary:
    """Append unseen IPA segments after the current entries; old ids are stable."""
    additions = [seg for seg in sorted(set(ipa_charset)) if vocab.id_of(seg) is None]
    if not additions:
        return vocab
    return Vocabulary(entries=vocab.entries + tuple(additions), base_size=vocab.base_size)


# --------------------------------------------------------------- tokenization

@dataclass
class TokenRow:
    """One tokenized sentence, without CLS/SEP or padding."""
    ortho_ids: list[int]
    phone_ids: list[int]
    ortho_word: list[int]
    phone_word: list[int]
    word_langs: list[str]
    labels: list[int] | None
    lang: str

    @property
    def n_words(self) -> int:
        return len(self.word_langs)


def _greedy_ortho(surface: str, vocab: Vocabulary, max_len: int) -> list[int]:
    # a run of unknown codepoints collapses into one UNK
    ids = []
    i = 0
    while i < len(surface):
        for length in range(min(max_len, len(surface) - i), 0, -1):
            candidate = vocab.id_of(surface[i:i + length])
            if candidate is not None:
                ids.append(candidate)
                i += length
                break
        else:
            if not ids or ids[-1] != UNK_ID:
                ids.append(UNK_ID)
            i += 1
    return ids


def _greedy_phone(segments: tuple[str, ...], vocab: Vocabulary, max_units: int) -> list[int]:
    ids = []
    i = 0
    while i < len(segments):
        for length in range(min(max_units, len(segments) - i), 0, -1):
            candidate = vocab.id_of(join_segments(segments[i:i + length]))
            if candidate is not None:
                ids.append(candidate)
                i += length
                break
        else:
            if not ids or ids[-1] != UNK_ID:
                ids.append(UNK_ID)
            i += 1
    return ids


def tokenize(example: AlignedExample, vocab: Vocabulary,
             tag_to_id: dict[str, int] | None = None,
             use_phonemic: bool = True) -> TokenRow:
    """Greedy longest-match subword ids for both streams, with word maps."""
    max_ortho = vocab._max_chars
    max_phone = vocab._max_units
    ortho_ids: list[int] = []
    phone_ids: list[int] = []
    ortho_word: list[int] = []
    phone_word: list[int] = []
    labels: list[int] | None = [] if example.labeled and tag_to_id is not None else None
    for m, word in enumerate(example.words):
        sub = _greedy_ortho(word.surface, vocab, max_ortho)
        ortho_ids.extend(sub)
        ortho_word.extend([m] * len(sub))
        if use_phonemic:
            psub = _greedy_phone(word.ipa, vocab, max_phone) if word.ipa else [UNK_ID]
            phone_ids.extend(psub)
            phone_word.extend([m] * len(psub))
        if labels is not None:
            if word.label not in tag_to_id:
                raise ConfigError(f"label {word.label!r} outside the task tag set")
            labels.append(tag_to_id[word.label])
    if not use_phonemic:
        # one placeholder per word keeps the pooling geometry well defined
        phone_ids = [PAD_ID] * len(example.words)
        phone_word = list(range(len(example.words)))
    return TokenRow(ortho_ids=ortho_ids, phone_ids=phone_ids,
                    ortho_word=ortho_word, phone_word=phone_word,
                    word_langs=[w.lang for w in example.words],
                    labels=labels, lang=example.lang)


@dataclass
class SubtokenBatch:
    """Padded id matrices plus the constant geometry the model needs.

    The orthographic stream is wrapped in CLS/SEP; the phonemic stream holds
    raw subtokens.  Word maps use -1 at CLS/SEP/PAD positions.  pool_* are
    mean-pooling matrices (matmul with them averages subtokens per word);
    bcast scatters word-level vectors back to that word's ortho positions.
    """
    ortho_ids: np.ndarray    # [B, T] int64
    phone_ids: np.ndarray    # [B, P] int64
    ortho_word: np.ndarray   # [B, T] int64
    phone_word: np.ndarray   # [B, P] int64
    ortho_mask: np.ndarray   # [B, T] float64
    phone_mask: np.ndarray   # [B, P] float64
    lang_ids: np.ndarray     # [B, T] int64
    seg_ids: np.ndarray      # [B, T] int64
    labels: np.ndarray | None  # [B, M] int64, -1 padded
    n_words: np.ndarray      # [B] int64
    pool_ortho: np.ndarray   # [B, M, T]
    pool_phone: np.ndarray   # [B, M, P]
    bcast: np.ndarray        # [B, T, M]
    rows: list

    @property
    def size(self) -> int:
        return self.ortho_ids.shape[0]

    CLS_OFFSET = 1  # ortho position of a row-level subtoken t is t + 1


def collate(rows: list[TokenRow], lang_to_id: dict[str, int]) -> SubtokenBatch:
    """Pad TokenRows into one batch; deterministic for a fixed row order."""
    B = len(rows)
    T = max(len(r.ortho_ids) for r in rows) + 2
    P = max(len(r.phone_ids) for r in rows)
    M = max(r.n_words for r in rows)
    labeled = all(r.labels is not None for r in rows)

    ortho_ids = np.full((B, T), PAD_ID, dtype=np.int64)
    phone_ids = np.full((B, P), PAD_ID, dtype=np.int64)
    ortho_word = np.full((B, T), -1, dtype=np.int64)
    phone_word = np.full((B, P), -1, dtype=np.int64)
    ortho_mask = np.zeros((B, T), dtype=np.float64)
    phone_mask = np.zeros((B, P), dtype=np.float64)
    lang_ids = np.zeros((B, T), dtype=np.int64)
    labels = np.full((B, M), -1, dtype=np.int64) if labeled else None
    n_words = np.zeros(B, dtype=np.int64)
    pool_ortho = np.zeros((B, M, T), dtype=np.float64)
    pool_phone = np.zeros((B, M, P), dtype=np.float64)
    bcast = np.zeros((B, T, M), dtype=np.float64)

    for b, row in enumerate(rows):
        n = len(row.ortho_ids)
        ortho_ids[b, 0] = CLS_ID
        ortho_ids[b, 1:n + 1] = row.ortho_ids
        ortho_ids[b, n + 1] = SEP_ID
        ortho_word[b, 1:n + 1] = row.ortho_word
        ortho_mask[b, :n + 2] = 1.0
        # word positions carry their word's language; CLS/SEP/PAD stay 0
        for t, m in enumerate(row.ortho_word):
            lang_ids[b, t + 1] = lang_to_id[row.word_langs[m]]
        p = len(row.phone_ids)
        phone_ids[b, :p] = row.phone_ids
        phone_word[b, :p] = row.phone_word
        phone_mask[b, :p] = 1.0
        n_words[b] = row.n_words
        if labeled:
            labels[b, :row.n_words] = row.labels
        pool_ortho[b] = _padded_pool(row.ortho_word, 1, row.n_words, M, T)
        pool_phone[b] = _padded_pool(row.phone_word, 0, row.n_words, M, P)
        for t, m in enumerate(row.ortho_word):
            bcast[b, t + 1, m] = 1.0
    return SubtokenBatch(ortho_ids=ortho_ids, phone_ids=phone_ids,
                         ortho_word=ortho_word, phone_word=phone_word,
                         ortho_mask=ortho_mask, phone_mask=phone_mask,
                         lang_ids=lang_ids, seg_ids=np.zeros((B, T), dtype=np.int64),
                         labels=labels, n_words=n_words, pool_ortho=pool_ortho,
                         pool_phone=pool_phone, bcast=bcast, rows=rows)


def _padded_pool(word_map, offset: int, n_words: int, max_words: int, length: int) -> np.ndarray:
    mat = np.zeros((max_words, length), dtype=np.float64)
    for t, m in enumerate(word_map):
        mat[m, t + offset] = 1.0
    counts = mat.sum(axis=1, keepdims=True)
    if np.any(counts[:n_words, 0] == 0):
        missing = int(np.argmin(counts[:n_words, 0]))
        raise DegenerateAlignment(f"word {missing} has no subtokens")
    counts[counts == 0.0] = 1.0
    return mat / counts


def pool_subtokens(vectors: np.ndarray, word_map) -> np.ndarray:
    """Mean-pool subtoken vectors [T, D] to word vectors [M, D]."""
    word_map = list(word_map)
    n_words = max(word_map) + 1 if word_map else 0
    out = np.zeros((n_words, vectors.shape[1]), dtype=vectors.dtype)
    counts = np.zeros(n_words, dtype=np.int64)
    for t, m in enumerate(word_map):
        out[m] += vectors[t]
        counts[m] += 1
    if np.any(counts == 0):
        missing = int(np.argmin(counts))
        raise DegenerateAlignment(f"word {missing} has no subtokens")
    return out / counts[:, None]


def pooling_matrix(word_map, n_words: int, length: int) -> np.ndarray:
    """Constant [n_words, length] matrix whose product with subtoken vectors mean-pools."""
    mat = np.zeros((n_words, length), dtype=np.float64)
    for t, m in enumerate(word_map):
        if m >= 0:
            mat[m, t] = 1.0
    counts = mat.sum(axis=1, keepdims=True)
    if np.any(counts[:, 0] == 0):
        missing = int(np.argmin(counts[:, 0]))
        raise DegenerateAlignment(f"word {missing} has no subtokens")
    return mat / counts
