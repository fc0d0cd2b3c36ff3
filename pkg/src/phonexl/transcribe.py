"""Romanized and IPA transcription over rule tables.

Per-language pipelines:

    zh  orthography_to_roman gives tone-numbered pinyin; the IPA path splits
        it into (syllable, tone digit) pairs, converts syllables through the
        latin_to_ipa table and appends one tone segment per syllable.
    vi  romanization is the identity (already Latin); IPA comes from a direct
        orthography_to_ipa table keyed on casefolded words.
    ja/ko  two stages: romanize, then feed the romanization to latin_to_ipa.
        Hangul syllables decompose to conjoining jamo before table lookup.

Languages without tone digits in their roman output (synthetic benchmark
languages included) take whichever of the direct or two-stage paths their
tables provide.
"""

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, UncoveredGrapheme
from .hangul import decompose_hangul, is_hangul_syllable, jamo_characters
from .ipa import check_segments, parse_segments
from .rules import RuleTable, load_rule_table

TONE_DIGIT_SEGMENTS = {"1": "˥", "2": "˧˥", "3": "˨˩˦", "4": "˥˩", "5": ""}

_SYLLABLE_RE = re.compile(r"([a-z']+)([0-9])")
_ROMAN_OK_RE = re.compile(r"[a-z']*")


@dataclass
class TableSet:
    language: str
    roman: RuleTable | None = None
    ipa: RuleTable | None = None
    latin: RuleTable | None = None

    def add(self, table: RuleTable) -> None:
        slot = {"orthography_to_roman": "roman", "orthography_to_ipa": "ipa",
                "latin_to_ipa": "latin"}[table.stage]
        if getattr(self, slot) is not None:
            raise ConfigError(f"two {table.stage} tables for language {self.language!r}")
        setattr(self, slot, table)


def load_tables(directory: str | Path) -> dict[str, TableSet]:
    """Load every *.tsv rule table under `directory`, grouped by language."""
    directory = Path(directory)
    sets: dict[str, TableSet] = {}
    for path in sorted(directory.glob("*.tsv")):
        table = load_rule_table(path)
        sets.setdefault(table.language, TableSet(table.language)).add(table)
    if not sets:
        raise ConfigError(f"no rule tables found in {directory}")
    return sets


def _apply_orthography(table: RuleTable, token: str) -> list[str]:
    """Longest-match application with Hangul syllables decomposed on the fly."""
    outputs = []
    i = 0
    while i < len(token):
        hit = table.match_at(token, i)
        if hit is not None:
            outputs.append(hit[1])
            i += len(hit[0])
            continue
        ch = token[i]
        if is_hangul_syllable(ch):
            for jamo in jamo_characters(decompose_hangul(ch)):
                out = table.lookup(jamo)
                if out is None:
                    raise UncoveredGrapheme(ch, i)
                outputs.append(out)
            i += 1
            continue
        raise UncoveredGrapheme(ch, i)
    return outputs


def romanize(token: str, lang: str, table: RuleTable | None) -> str:
    """Romanized transcription of one token; identity for Latin-script vi."""
    if lang == "vi":
        return token
    if not token:
        return ""
    if table is None:
        raise ConfigError(f"no orthography_to_roman table for language {lang!r}")
    text = "".join(_apply_orthography(table, token))
    text = re.sub(r"[0-9]", "", text)  # tone digits are internal only
    if not _ROMAN_OK_RE.fullmatch(text):
        raise ConfigError(f"romanization of {token!r} is not plain Latin: {text!r}")
    return text


def latin_to_ipa(roman: str, table: RuleTable) -> tuple[str, ...]:
    """Greedy longest-match conversion of a Latin string to IPA segments."""
    if table.stage != "latin_to_ipa":
        raise ConfigError(f"latin_to_ipa needs a latin_to_ipa table, got {table.stage}")
    segments: list[str] = []
    for output in table.apply(roman.casefold()):
        segments.extend(parse_segments(output))
    return check_segments(tuple(segments))


def to_ipa(token: str, lang: str, tables: TableSet) -> tuple[str, ...]:
    """IPA transcription of one token, tones carried as trailing segments."""
    if not token:
        return ()
    if tables.ipa is not None:
        segments: list[str] = []
        for output in _apply_orthography(tables.ipa, token.casefold()):
            segments.extend(parse_segments(output))
        return check_segments(tuple(segments))
    if tables.roman is None or tables.latin is None:
        raise ConfigError(f"language {lang!r} needs either a direct IPA table or roman + latin tables")
    if lang == "vi":
        roman = token
    else:
        roman = "".join(_apply_orthography(tables.roman, token))
    segments = []
    if any(c.isdigit() for c in roman):
        consumed = 0
        for m in _SYLLABLE_RE.finditer(roman):
            if m.start() != consumed:
                raise UncoveredGrapheme(roman[consumed], consumed)
            segments.extend(latin_to_ipa(m.group(1), tables.latin))
            tone = TONE_DIGIT_SEGMENTS.get(m.group(2), "")
            if tone:
                segments.append(tone)
            consumed = m.end()
        if consumed != len(roman):
            raise UncoveredGrapheme(roman[consumed], consumed)
    else:
        segments.extend(latin_to_ipa(roman, tables.latin))
    return check_segments(tuple(segments))


def transcribe_example(example, tables_by_lang: dict[str, TableSet], mode: str,
                       sentence_index: int = 0):
    """One AlignedExample with its transcription column filled."""
    from .corpus import AlignedExample, Word

    words = []
    for t, word in enumerate(example.words):
        table_set = tables_by_lang.get(word.lang)
        if table_set is None:
            raise ConfigError(f"no tables for language {word.lang!r}")
        try:
            if mode == "ipa":
                segments = to_ipa(word.surface, word.lang, table_set)
            elif mode == "romanized":
                segments = tuple(romanize(word.surface, word.lang, table_set.roman))
            else:
                raise ConfigError(f"unknown transcription mode {mode!r}")
        except UncoveredGrapheme as err:
            raise UncoveredGrapheme(err.codepoint, err.position,
                                    sentence=sentence_index, token=t) from None
        words.append(Word(word.surface, segments, word.label, word.lang))
    return AlignedExample(words=tuple(words), lang=example.lang)


def transcribe_corpus(in_path, lang: str, mode: str, tables_by_lang, out_path) -> int:
    """Fill the transcription column of a corpus file; token counts are preserved.

    Returns the number of sentences written.
    """
    from .corpus import Dataset, load_dataset, write_dataset

    dataset = load_dataset(in_path, default_lang=lang)
    out = [transcribe_example(ex, tables_by_lang, mode, sentence_index=i)
           for i, ex in enumerate(dataset.examples)]
    write_dataset(Dataset(examples=out, tag_set=dataset.tag_set), out_path)
    return len(out)
