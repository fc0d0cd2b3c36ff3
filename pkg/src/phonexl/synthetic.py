"""Seeded synthetic bilingual benchmark.

Two artificial languages share phonology but write in disjoint scripts
(Greek vs Cyrillic letters, one letter per phoneme).  Target-language words
are cognates of source words: the same phoneme string up to a small seeded
per-word perturbation, with word class marked by a stable two-segment
suffix.  Entity names are spelled like common words but keep their own
pronunciation, so the written form plus context narrows an entity's type
without deciding it; the phonemic stream decides it.  Each language's
orthography transparently encodes its own phonology, so rule tables
regenerate the corpus transcriptions.

Sentences come from a templated grammar with NER and POS labels.  Each
language also gets its own romanization scheme; the schemes disagree on
exactly the phonemes that IPA keeps comparable.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import AlignedExample, Dataset, Word, write_dataset
from .rules import RuleTable, write_rule_table

PHONEMES = ("p", "t", "k", "b", "d", "g", "m", "n", "ŋ", "s", "ʃ", "z",
            "v", "l", "r", "j", "a", "e", "i", "o", "u", "ə", "æ", "ɔ")
SRC_LETTERS = tuple("αβγδεζηθικλμνξοπρστυφχψω")
TGT_LETTERS = tuple("абвгдежзиклмнопрстуфхцчш")

PERTURB_PROB = 0.08             # chance a cognate differs by one stem segment

ROMAN_SRC = {"ŋ": "ng", "ʃ": "sh", "ə": "e", "æ": "ae", "ɔ": "aw"}
ROMAN_TGT = {"ŋ": "nq", "ʃ": "x", "ə": "a", "æ": "ea", "ɔ": "oo", "j": "y"}

WORD_CLASSES = {
    "DET": 4, "ADJ": 10, "NOUN": 30, "VERB": 16, "PREP": 4,
    "PER": 18, "LOC": 18, "ORG": 14,
}
COMMON_CLASSES = ("NOUN", "VERB", "ADJ")
ENTITY_CLASSES = ("PER", "LOC", "ORG")
NER_TAGS = ("O", "B-PER", "I-PER", "B-LOC", "I-LOC", "B-ORG", "I-ORG")
POS_TAGS = ("ADJ", "ADP", "DET", "NOUN", "PROPN", "VERB")
POS_OF = {"DET": "DET", "ADJ": "ADJ", "NOUN": "NOUN", "VERB": "VERB",
          "PREP": "ADP", "PER": "PROPN", "LOC": "PROPN", "ORG": "PROPN"}

# Every entity slot admits several entity types, so written context narrows
# the label but cannot decide it.
TEMPLATES = (
    ("DET", "NOUN", "VERB", "PREP", "LOC"),
    ("DET", "NOUN", "VERB", "PREP", "ORG"),
    ("DET", "NOUN", "VERB", "PREP", "PER"),
    ("PER", "VERB", "DET", "NOUN"),
    ("ORG", "VERB", "PREP", "LOC"),
    ("DET", "ADJ", "NOUN", "VERB", "PER"),
    ("DET", "ADJ", "NOUN", "VERB", "ORG"),
    ("PER", "PREP", "ORG", "VERB", "DET", "NOUN"),
    ("LOC", "VERB", "DET", "ADJ", "NOUN"),
    ("DET", "NOUN", "PREP", "ORG", "VERB"),
    ("ORG", "PREP", "LOC", "VERB", "NOUN"),
)

# Word class is phonologically marked by a two-segment suffix, the way noun
# classes or declensions surface in many languages.  Markers survive in
# cognates, so the phonemic stream generalizes across the script boundary.
CLASS_MARKERS = {"DET": ("m", "ə"), "ADJ": ("l", "æ"), "NOUN": ("n", "e"),
                 "VERB": ("r", "i"), "PREP": ("j", "ɔ"), "PER": ("k", "a"),
                 "LOC": ("t", "o"), "ORG": ("p", "u")}

DICT_COVERAGE = 0.4


@dataclass(frozen=True)
class LexiconEntry:
    word_id: int
    word_class: str
    src_phonemes: tuple[str, ...]
    tgt_phonemes: tuple[str, ...]
    src_surface: str
    tgt_surface: str
    homograph_of: int | None = None   # word whose spelling this one shares

    def surface(self, lang: str) -> str:
        return self.src_surface if lang == "src" else self.tgt_surface

    def phonemes(self, lang: str) -> tuple[str, ...]:
        return self.src_phonemes if lang == "src" else self.tgt_phonemes

    def roman(self, lang: str) -> str:
        scheme = ROMAN_SRC if lang == "src" else ROMAN_TGT
        return "".join(scheme.get(ph, ph) for ph in self.phonemes(lang))


def _sample_phonemes(rng: np.random.Generator, word_class: str) -> tuple[str, ...]:
    length = int(rng.integers(4, 7))
    stem = tuple(rng.choice(PHONEMES, size=length - 2).tolist())
    return stem + CLASS_MARKERS[word_class]


def _perturb(phonemes: tuple[str, ...], rng: np.random.Generator) -> tuple[str, ...]:
    """Cognate phonology: an occasional one-segment stem substitution."""
    out = list(phonemes)
    if rng.random() >= PERTURB_PROB:
        return tuple(out)
    slot = int(rng.integers(len(out) - 2))  # the class-marking suffix is stable
    alternatives = [ph for ph in PHONEMES if ph != out[slot]]
    out[slot] = str(rng.choice(alternatives))
    return tuple(out)


def build_lexicon(rng: np.random.Generator,
                  letter_of: dict) -> list[LexiconEntry]:
    """Class-organized lexicon of cognate pairs with homographic entity names.

    Every entity word is written like some common word while keeping its own
    pronunciation (class-marked), the way proper names recruit ordinary
    vocabulary in logographic scripts.  Written form plus context therefore
    narrows an entity's class, but only the phonemic stream decides it.
    """
    entries: list[LexiconEntry] = []
    seen_src: set = set()
    seen_tgt: set = set()
    word_id = 0
    for word_class, count in WORD_CLASSES.items():
        for _ in range(count):
            while True:
                src = _sample_phonemes(rng, word_class)
                tgt = _perturb(src, rng)
                if src not in seen_src and tgt not in seen_tgt:
                    break
            seen_src.add(src)
            seen_tgt.add(tgt)
            entries.append(LexiconEntry(
                word_id, word_class, src, tgt,
                "".join(letter_of["src"][ph] for ph in src),
                "".join(letter_of["tgt"][ph] for ph in tgt)))
            word_id += 1

    donors = [i for i, e in enumerate(entries) if e.word_class in COMMON_CLASSES]
    order = rng.permutation(len(donors))
    next_donor = 0
    for i, entry in enumerate(entries):
        if entry.word_class not in ENTITY_CLASSES:
            continue
        donor = entries[donors[order[next_donor % len(donors)]]]
        next_donor += 1
        entries[i] = LexiconEntry(
            entry.word_id, entry.word_class, entry.src_phonemes, entry.tgt_phonemes,
            donor.src_surface, donor.tgt_surface, homograph_of=donor.word_id)
    return entries


def cognate_share(entry: LexiconEntry) -> float:
    counts: dict[str, int] = {}
    for ph in entry.src_phonemes:
        counts[ph] = counts.get(ph, 0) + 1
    common = 0
    for ph in entry.tgt_phonemes:
        if counts.get(ph, 0) > 0:
            counts[ph] -= 1
            common += 1
    return common / max(len(entry.src_phonemes), len(entry.tgt_phonemes))


def _letter_maps(rng: np.random.Generator) -> dict:
    src_perm = rng.permutation(len(PHONEMES))
    tgt_perm = rng.permutation(len(PHONEMES))
    return {"src": {ph: SRC_LETTERS[src_perm[i]] for i, ph in enumerate(PHONEMES)},
            "tgt": {ph: TGT_LETTERS[tgt_perm[i]] for i, ph in enumerate(PHONEMES)}}


def _sample_entry_sentence(lexicon_by_class, task, rng) -> list[tuple[LexiconEntry, str]]:
    """A sentence as (lexicon entry, label) pairs."""
    template = TEMPLATES[int(rng.integers(len(TEMPLATES)))]
    out = []
    for slot in template:
        picks = [lexicon_by_class[slot][int(rng.integers(len(lexicon_by_class[slot])))]]
        if slot in ENTITY_CLASSES and rng.random() < 0.3:
            picks.append(lexicon_by_class[slot][int(rng.integers(len(lexicon_by_class[slot])))])
        for i, entry in enumerate(picks):
            if task == "ner":
                label = "O" if slot not in ENTITY_CLASSES \
                    else ("B-" + slot if i == 0 else "I-" + slot)
            else:
                label = POS_OF[slot]
            out.append((entry, label))
    return out


def _materialize(sentence, lang: str, mode: str, labeled: bool = True) -> AlignedExample:
    words = []
    for entry, label in sentence:
        if mode == "ipa":
            column = tuple(entry.phonemes(lang))
        else:
            column = tuple(entry.roman(lang))
        words.append(Word(entry.surface(lang), column, label if labeled else None, lang))
    return AlignedExample(words=tuple(words), lang=lang)


def roman_sibling(path: Path) -> Path:
    return path.with_name(path.stem + "_roman" + path.suffix)


def make_synthetic_benchmark(out_dir: str | Path, seed: int, size: int = 1000) -> dict:
    """Generate corpora, rule tables and dictionary files; returns the manifest."""
    if size < 200:
        raise ValueError("synthetic benchmark needs at least 200 training sentences")
    out = Path(out_dir)
    (out / "tables").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5b]))

    letter_of = _letter_maps(rng)
    lexicon = build_lexicon(rng, letter_of)
    by_class = {}
    for entry in lexicon:
        by_class.setdefault(entry.word_class, []).append(entry)

    # rule tables: letter -> IPA segment and letter -> romanization unit
    for lang in ("src", "tgt"):
        inverse = {letter: ph for ph, letter in letter_of[lang].items()}
        ipa_rows = tuple(sorted((letter, ph) for letter, ph in inverse.items()))
        scheme = ROMAN_SRC if lang == "src" else ROMAN_TGT
        roman_rows = tuple(sorted((letter, scheme.get(ph, ph))
                                  for letter, ph in inverse.items()))
        write_rule_table(RuleTable(lang, "orthography_to_ipa", ipa_rows),
                         out / "tables" / f"{lang}_ipa.tsv")
        write_rule_table(RuleTable(lang, "orthography_to_roman", roman_rows),
                         out / "tables" / f"{lang}_roman.tsv")

    splits = {
        "ner_src_train": ("ner", "src", size),
        "ner_src_dev": ("ner", "src", max(150, size // 5)),
        "ner_tgt_test": ("ner", "tgt", max(300, size // 3)),
        "pos_src_train": ("pos", "src", size),
        "pos_src_dev": ("pos", "src", max(150, size // 5)),
        "pos_tgt_test": ("pos", "tgt", max(300, size // 3)),
    }
    files = {}
    for name, (task, lang, count) in splits.items():
        sentences = [_sample_entry_sentence(by_class, task, rng) for _ in range(count)]
        path = out / f"{name}.tsv"
        write_dataset(Dataset(examples=[_materialize(s, lang, "ipa") for s in sentences]),
                      path)
        write_dataset(Dataset(examples=[_materialize(s, lang, "roman") for s in sentences]),
                      roman_sibling(path))
        files[name] = path.name

    unlabeled = [_sample_entry_sentence(by_class, "ner", rng)
                 for _ in range(max(150, size // 4))]
    write_dataset(Dataset(examples=[_materialize(s, "tgt", "ipa", labeled=False)
                                    for s in unlabeled]), out / "tgt_unlabeled.tsv")
    write_dataset(Dataset(examples=[_materialize(s, "tgt", "roman", labeled=False)
                                    for s in unlabeled]), out / "tgt_unlabeled_roman.tsv")
    files["tgt_unlabeled"] = "tgt_unlabeled.tsv"

    # Pivot dictionary over ~40% of the lexicon types.  Like real-world
    # bilingual dictionaries, coverage is frequency-weighted (closed-class
    # words are always in) and an ambiguous spelling is listed under its
    # common reading, never under the names written like it.
    eligible = [i for i, e in enumerate(lexicon) if e.homograph_of is None]
    closed = [i for i in eligible if lexicon[i].word_class in ("DET", "PREP")]
    open_class = [i for i in eligible if i not in closed]
    n_covered = int(round(DICT_COVERAGE * len(lexicon)))
    n_open = max(0, min(n_covered - len(closed), len(open_class)))
    sampled = rng.choice(len(open_class), size=n_open, replace=False).tolist()
    covered_ids = sorted(closed + [open_class[i] for i in sampled])
    src_en, en_tgt, direct, direct_roman = [], [], [], []
    for i in covered_ids:
        entry = lexicon[i]
        pivot = f"w{entry.word_id:03d}"
        src_en.append(f"{entry.src_surface} {pivot}")
        en_tgt.append(f"{pivot} {entry.tgt_surface}")
        direct.append((entry.src_surface, entry.tgt_surface, entry.tgt_phonemes))
        direct_roman.append((entry.src_surface, entry.tgt_surface,
                             tuple(entry.roman("tgt"))))
    (out / "dict_src_en.txt").write_text("\n".join(src_en) + "\n", encoding="utf-8")
    (out / "dict_en_tgt.txt").write_text("\n".join(en_tgt) + "\n", encoding="utf-8")
    for fname, rows in (("dictionary.tsv", direct), ("dictionary_roman.tsv", direct_roman)):
        lines = [f"{s}\t{t}\t{'·'.join(ipa)}\ttgt" for s, t, ipa in rows]
        (out / fname).write_text("\n".join(lines) + "\n", encoding="utf-8")

    shares = [cognate_share(e) for e in lexicon]
    manifest = {
        "seed": seed,
        "size": size,
        "languages": ["src", "tgt"],
        "ner_tags": list(NER_TAGS),
        "pos_tags": list(POS_TAGS),
        "lexicon_size": len(lexicon),
        "homograph_words": sum(1 for e in lexicon if e.homograph_of is not None),
        "dictionary_entries": len(direct),
        "dictionary_coverage": round(len(direct) / len(lexicon), 4),
        "cognate_pairs_sharing_80pct": round(
            float(np.mean([s >= 0.8 for s in shares])), 4),
        "mean_cognate_share": round(float(np.mean(shares)), 4),
        "files": files,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                       encoding="utf-8")
    return manifest
