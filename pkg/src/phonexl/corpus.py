"""Token-level corpus reading and writing.

CoNLL-style TSV, one token per line, sentences separated by a blank line,
each sentence preceded by a `# lang = <id>` header.  Token lines carry one
of four layouts, constant within a file:

    SURFACE
    SURFACE<TAB>IPA
    SURFACE<TAB>IPA<TAB>LABEL
    SURFACE<TAB>IPA<TAB>LABEL<TAB>LANG

The IPA field holds middle-dot joined segments and may be empty before
transcription.  The LANG field appears only when a word's language differs
from the sentence header (code-switched output).
"""

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, LabelOutsideTagSet, RaggedSentence
from .ipa import join_segments, parse_segments


@dataclass(frozen=True)
class Word:
    surface: str
    ipa: tuple[str, ...]
    label: str | None
    lang: str


@dataclass(frozen=True)
class AlignedExample:
    words: tuple[Word, ...]
    lang: str

    def __post_init__(self):
        if not self.words:
            raise ConfigError("empty sentence")
        labelled = [w.label is not None for w in self.words]
        if any(labelled) and not all(labelled):
            raise ConfigError("labels must be all present or all absent in a sentence")

    @property
    def labeled(self) -> bool:
        return self.words[0].label is not None

    def surfaces(self) -> tuple[str, ...]:
        return tuple(w.surface for w in self.words)

    def labels(self) -> tuple[str, ...]:
        return tuple(w.label for w in self.words)


@dataclass
class Dataset:
    examples: list[AlignedExample] = field(default_factory=list)
    tag_set: tuple[str, ...] | None = None
    role: str | None = None

    @property
    def size(self) -> int:
        return len(self.examples)


def load_dataset(path: str | Path, tag_set: tuple[str, ...] | None = None,
                 default_lang: str | None = None, role: str | None = None) -> Dataset:
    """Parse a corpus file; malformed rows are reported with line numbers."""
    path = Path(path)
    tags = set(tag_set) if tag_set is not None else None
    examples: list[AlignedExample] = []
    pending: list[tuple[int, list[str]]] = []
    sentence_lang = default_lang
    n_columns: int | None = None

    def flush():
        nonlocal pending, sentence_lang
        if not pending:
            return
        if sentence_lang is None:
            raise ConfigError(f"{path}: sentence at line {pending[0][0]} has no language "
                              "header and no default language was given")
        words = []
        for line_no, fields in pending:
            surface = fields[0]
            ipa = parse_segments(fields[1]) if len(fields) > 1 else ()
            label = fields[2] if len(fields) > 2 else None
            lang = fields[3] if len(fields) > 3 and fields[3] else sentence_lang
            if label is not None and tags is not None and label not in tags:
                raise LabelOutsideTagSet(line_no, label)
            words.append(Word(surface, ipa, label, lang))
        examples.append(AlignedExample(words=tuple(words), lang=sentence_lang))
        pending = []
        sentence_lang = default_lang

    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if raw.startswith("#"):
            body = raw[1:].strip()
            if body.startswith("lang"):
                _, _, value = body.partition("=")
                sentence_lang = value.strip()
            continue
        if not raw.strip():
            flush()
            continue
        fields = raw.split("\t")
        if n_columns is None:
            n_columns = len(fields)
            if n_columns > 4:
                raise RaggedSentence(line_no, f"{n_columns} columns")
        elif len(fields) != n_columns:
            raise RaggedSentence(line_no, f"expected {n_columns}, got {len(fields)}")
        pending.append((line_no, fields))
    flush()
    return Dataset(examples=examples, tag_set=tag_set, role=role)


def write_dataset(dataset: Dataset, path: str | Path) -> None:
    """Canonical serialization; loading it back and re-writing is byte-identical."""
    mixed = any(w.lang != ex.lang for ex in dataset.examples for w in ex.words)
    lines: list[str] = []
    for example in dataset.examples:
        lines.append(f"# lang = {example.lang}")
        for w in example.words:
            fields = [w.surface, join_segments(w.ipa)]
            if w.label is not None:
                fields.append(w.label)
            elif mixed:
                raise ConfigError("cannot serialize mixed-language unlabeled sentences")
            if mixed:
                fields.append(w.lang)
            lines.append("\t".join(fields))
        lines.append("")
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def gather_ipa_charset(datasets) -> tuple[str, ...]:
    """Sorted set of every transcription segment appearing in the datasets."""
    segments = set()
    for dataset in datasets:
        for example in dataset.examples:
            for word in example.words:
                segments.update(word.ipa)
    return tuple(sorted(segments))
