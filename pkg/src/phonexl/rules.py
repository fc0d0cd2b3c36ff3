"""Rule tables: ordered pattern -> output maps applied greedily, longest match first.

Table files are UTF-8 TSV, one `pattern<TAB>output` entry per line, `#` for
comments.  Directive comments carry metadata:

    # lang = ko
    # stage = latin_to_ipa

Stages:
    orthography_to_roman   surface text -> romanization units
    orthography_to_ipa     surface text -> IPA segments (middle-dot joined)
    latin_to_ipa           romanized text -> IPA segments; must be total over
                           a-z plus apostrophe (checked at load)

A pattern that appears twice keeps its first-listed output; this is how
multi-reading entries in user lexica resolve.
"""

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError, UncoveredGrapheme
from .ipa import check_segments, parse_segments

STAGES = ("orthography_to_roman", "orthography_to_ipa", "latin_to_ipa")
LATIN_ALPHABET = tuple("abcdefghijklmnopqrstuvwxyz'")


@dataclass(frozen=True)
class RuleTable:
    language: str
    stage: str
    entries: tuple[tuple[str, str], ...]
    longest_match: bool = True
    duplicates_dropped: int = 0
    _map: dict = field(init=False, repr=False, compare=False)
    _max_len: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ConfigError(f"unknown rule-table stage {self.stage!r}")
        mapping = {}
        for pattern, output in self.entries:
            if not pattern:
                raise ConfigError("empty pattern in rule table")
            if pattern in mapping:
                raise ConfigError(f"duplicate pattern {pattern!r} survived loading")
            mapping[pattern] = output
        if self.stage == "latin_to_ipa":
            missing = [c for c in LATIN_ALPHABET if c not in mapping]
            if missing:
                raise ConfigError(
                    f"latin_to_ipa table for {self.language!r} not total: missing {missing}")
        if self.stage.endswith("_ipa"):
            for pattern, output in self.entries:
                check_segments(parse_segments(output))
        object.__setattr__(self, "_map", mapping)
        object.__setattr__(self, "_max_len", max(len(p) for p in mapping) if mapping else 0)

    def lookup(self, pattern: str) -> str | None:
        return self._map.get(pattern)

    def match_at(self, text: str, start: int) -> tuple[str, str] | None:
        """Longest (or first-listed) pattern matching `text` at `start`."""
        if self.longest_match:
            limit = min(self._max_len, len(text) - start)
            for length in range(limit, 0, -1):
                candidate = text[start:start + length]
                output = self._map.get(candidate)
                if output is not None:
                    return candidate, output
            return None
        for pattern, output in self.entries:
            if text.startswith(pattern, start):
                return pattern, output
        return None

    def apply(self, text: str) -> list[str]:
        """Consume `text` left to right, returning one output per match."""
        outputs = []
        i = 0
        while i < len(text):
            hit = self.match_at(text, i)
            if hit is None:
                raise UncoveredGrapheme(text[i], i)
            pattern, output = hit
            outputs.append(output)
            i += len(pattern)
        return outputs


def load_rule_table(path: str | Path) -> RuleTable:
    path = Path(path)
    language = None
    stage = None
    longest = True
    entries = []
    seen = set()
    dropped = 0
    for raw in path.read_text(encoding="utf-8").splitlines():
        if raw.startswith("#"):
            body = raw[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                key, value = key.strip(), value.strip()
                if key == "lang":
                    language = value
                elif key == "stage":
                    stage = value
                elif key == "longest_match":
                    longest = value.lower() in ("1", "true", "yes")
            continue
        if not raw.strip():
            continue
        if "\t" not in raw:
            raise ConfigError(f"{path}: entry without a tab separator: {raw!r}")
        pattern, _, output = raw.partition("\t")
        if pattern in seen:
            dropped += 1
            continue
        seen.add(pattern)
        entries.append((pattern, output))
    if language is None or stage is None:
        raise ConfigError(f"{path}: missing '# lang =' or '# stage =' directive")
    return RuleTable(language=language, stage=stage, entries=tuple(entries),
                     longest_match=longest, duplicates_dropped=dropped)


def write_rule_table(table: RuleTable, path: str | Path) -> None:
    lines = [f"# lang = {table.language}", f"# stage = {table.stage}"]
    lines += [f"{p}\t{o}" for p, o in table.entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
