"""Hangul syllable decomposition via the Unicode composition formula.

A precomposed syllable S in U+AC00..U+D7A3 satisfies
    S = 0xAC00 + (lead * 21 + vowel) * 28 + tail
with lead in 0..18, vowel in 0..20 and tail in 0..27 (0 = no final).
"""

from typing import NamedTuple

from .errors import NotHangulSyllable

SYLLABLE_FIRST = 0xAC00
SYLLABLE_LAST = 0xD7A3

LEAD_COUNT = 19
VOWEL_COUNT = 21
TAIL_COUNT = 28

# Conjoining jamo blocks used to key romanization tables.
LEAD_JAMO_FIRST = 0x1100    # U+1100..U+1112
VOWEL_JAMO_FIRST = 0x1161   # U+1161..U+1175
TAIL_JAMO_FIRST = 0x11A8    # U+11A8..U+11C2, tail index 1 maps to U+11A8


class HangulJamo(NamedTuple):
    lead: int
    vowel: int
    tail: int


def decompose_hangul(syllable: str | int) -> HangulJamo:
    """Split one precomposed syllable into (lead, vowel, tail) indices."""
    cp = ord(syllable) if isinstance(syllable, str) else syllable
    if not SYLLABLE_FIRST <= cp <= SYLLABLE_LAST:
        raise NotHangulSyllable(f"U+{cp:04X} is not a precomposed Hangul syllable")
    index = cp - SYLLABLE_FIRST
    lead, rest = divmod(index, VOWEL_COUNT * TAIL_COUNT)
    vowel, tail = divmod(rest, TAIL_COUNT)
    return HangulJamo(lead, vowel, tail)


def compose_hangul(jamo: HangulJamo) -> str:
    """Inverse of :func:`decompose_hangul`."""
    lead, vowel, tail = jamo
    if not (0 <= lead < LEAD_COUNT and 0 <= vowel < VOWEL_COUNT and 0 <= tail < TAIL_COUNT):
        raise NotHangulSyllable(f"jamo indices out of range: {jamo}")
    return chr(SYLLABLE_FIRST + (lead * VOWEL_COUNT + vowel) * TAIL_COUNT + tail)


def is_hangul_syllable(ch: str) -> bool:
    return SYLLABLE_FIRST <= ord(ch) <= SYLLABLE_LAST


def jamo_characters(jamo: HangulJamo) -> tuple[str, ...]:
    """Conjoining-jamo characters for a decomposed syllable (tail omitted when none)."""
    chars = [chr(LEAD_JAMO_FIRST + jamo.lead), chr(VOWEL_JAMO_FIRST + jamo.vowel)]
    if jamo.tail:
        chars.append(chr(TAIL_JAMO_FIRST + jamo.tail - 1))
    return tuple(chars)
