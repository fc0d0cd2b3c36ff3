"""IPA segment strings and the charset they are validated against.

A phoneme string is an ordered tuple of segments.  A segment is one or more
codepoints (affricates like "ts" or aspirates like "tʰ" stay together).
Tone contours are carried as separate segments trailing the syllable they
modify, so a toneless view is a pure filter.  Segments are serialized joined
by U+00B7 (middle dot), which never appears inside a segment.
"""

from .errors import PhonexlError

SEGMENT_SEPARATOR = "·"  # ·

TONE_LETTERS = "˥˦˧˨˩"

# Base IPA letters and common modifiers that bundled and user tables may emit.
_IPA_LETTERS = (
    "abcdefghijklmnopqrstuvwxyz"
    "ɐɑɒæɓʙβɔɕçɗɖðʣʤʥɘəɚɛɜɝɞɟʄɡɠɢʛɣɤɥɦɧħɨɪʝɩʞɭɬɫɮʟɱɯɰŋɳɲɴøɵɸœɶʘɹɺɾɻʀʁɽʂʃʈʦʧʨθʉʊʋⱱʌʍχʎʏʑʐʒʔʡʕʢǀǁǂǃ"
)
_MODIFIERS = "ʰʱʲʷˠˤ˞ʼːˑ̃̈̚ʴ" + "ˀ"
IPA_CHARSET = frozenset(_IPA_LETTERS) | frozenset(_MODIFIERS) | frozenset(TONE_LETTERS)


class InvalidSegment(PhonexlError):
    pass


def check_segments(segments: tuple[str, ...]) -> tuple[str, ...]:
    """Validate every codepoint of every segment against the IPA charset."""
    for seg in segments:
        if not seg:
            raise InvalidSegment("empty segment")
        for ch in seg:
            if ch not in IPA_CHARSET:
                raise InvalidSegment(f"{ch!r} (U+{ord(ch):04X}) in segment {seg!r} is outside the IPA charset")
    return tuple(segments)


def parse_segments(text: str) -> tuple[str, ...]:
    """Parse a middle-dot joined serialization; empty text means no segments."""
    if not text:
        return ()
    return tuple(text.split(SEGMENT_SEPARATOR))


def join_segments(segments: tuple[str, ...]) -> str:
    return SEGMENT_SEPARATOR.join(segments)


def is_tone_segment(segment: str) -> bool:
    return bool(segment) and segment[0] in TONE_LETTERS


def strip_tones(segments: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(s for s in segments if not is_tone_segment(s))
