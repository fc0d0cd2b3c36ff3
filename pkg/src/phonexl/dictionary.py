"""Bilingual dictionaries built through an English pivot, and code-switching.

Pivot files are MUSE-style: UTF-8 text, one `source target` pair per line,
whitespace separated.  A target of several words is collapsed into a single
word slot (hyphen-joined surface, concatenated IPA segments) so token-level
labels stay aligned after switching.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import AlignedExample, Word
from .errors import ConfigError
from .ipa import join_segments, parse_segments
from .transcribe import TableSet, to_ipa


@dataclass(frozen=True)
class Translation:
    surface: str
    ipa: tuple[str, ...]
    lang: str


@dataclass
class BilingualDictionary:
    entries: dict[str, tuple[Translation, ...]]
    target_lang: str
    dropped: int = 0  # pairs lost to transcription gaps

    def __contains__(self, surface: str) -> bool:
        return surface in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def save(self, path: str | Path) -> None:
        lines = []
        for source in self.entries:
            for tr in self.entries[source]:
                lines.append(f"{source}\t{tr.surface}\t{join_segments(tr.ipa)}\t{tr.lang}")
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "BilingualDictionary":
        entries: dict[str, list[Translation]] = {}
        target_lang = None
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            if not raw.strip() or raw.startswith("#"):
                continue
            fields = raw.split("\t")
            if len(fields) != 4:
                raise ConfigError(f"dictionary line needs 4 columns: {raw!r}")
            source, surface, ipa, lang = fields
            entries.setdefault(source, []).append(
                Translation(surface, parse_segments(ipa), lang))
            target_lang = lang
        if target_lang is None:
            raise ConfigError(f"empty dictionary file {path}")
        return cls(entries={k: tuple(v) for k, v in entries.items()},
                   target_lang=target_lang)


def _read_pairs(path: str | Path) -> list[tuple[str, str]]:
    pairs = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        fields = raw.split()
        if len(fields) < 2:
            continue
        # multi-word targets keep all trailing fields
        pairs.append((fields[0], " ".join(fields[1:])))
    return pairs


def build_pivot_dictionary(src_en_path, en_tgt_path, tables: TableSet,
                           target_lang: str) -> BilingualDictionary:
    """Compose src->en with en->tgt; target IPA filled from the rule tables.

    Target words the tables cannot transcribe are dropped and counted.
    """
    en_to_tgt: dict[str, list[str]] = {}
    for en, tgt in _read_pairs(en_tgt_path):
        en_to_tgt.setdefault(en, []).append(tgt)

    entries: dict[str, list[Translation]] = {}
    dropped = 0
    for src, en in _read_pairs(src_en_path):
        for tgt in en_to_tgt.get(en, ()):
            parts = tgt.split(" ")
            try:
                segments: list[str] = []
                for part in parts:
                    segments.extend(to_ipa(part, target_lang, tables))
            except Exception:
                dropped += 1
                continue
            if not segments:
                dropped += 1
                continue
            translation = Translation("-".join(parts), tuple(segments), target_lang)
            bucket = entries.setdefault(src, [])
            if translation not in bucket:
                bucket.append(translation)
    return BilingualDictionary(entries={k: tuple(v) for k, v in entries.items()},
                               target_lang=target_lang, dropped=dropped)


@dataclass(frozen=True)
class CodeSwitchPlan:
    positions: tuple[int, ...]          # word indices that were switched
    chosen: tuple[int, ...]             # translation index per switched position
    r_effective: float


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def code_switch(example: AlignedExample, dictionary: BilingualDictionary,
                r: float, rng: np.random.Generator) -> tuple[AlignedExample, CodeSwitchPlan]:
    """Replace round(r * covered) dictionary-covered words with translations.

    Switched words take the target surface, IPA and language id; labels are
    preserved verbatim.  With r = 0 or nothing covered, the input example is
    returned unchanged.
    """
    if not 0.0 <= r <= 1.0:
        raise ConfigError(f"code-switch ratio must be in [0, 1], got {r}")
    covered = [i for i, w in enumerate(example.words) if w.surface in dictionary]
    n_switch = _round_half_up(r * len(covered))
    if n_switch == 0:
        return example, CodeSwitchPlan((), (), 0.0)
    picked = sorted(rng.choice(len(covered), size=n_switch, replace=False).tolist())
    positions = tuple(covered[i] for i in picked)
    words = list(example.words)
    chosen = []
    for pos in positions:
        options = dictionary.entries[words[pos].surface]
        k = int(rng.integers(len(options)))
        chosen.append(k)
        tr = options[k]
        words[pos] = Word(tr.surface, tr.ipa, words[pos].label, tr.lang)
    plan = CodeSwitchPlan(positions, tuple(chosen), n_switch / len(covered))
    return AlignedExample(words=tuple(words), lang=example.lang), plan
