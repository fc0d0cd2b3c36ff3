"""Exception types shared across the package.

CLI exit codes: validation problems exit 2, numerical failures exit 3.
"""


class PhonexlError(Exception):
    exit_code = 2


class NotHangulSyllable(PhonexlError):
    """Codepoint outside U+AC00..U+D7A3 passed to the Hangul decomposer."""


class UncoveredGrapheme(PhonexlError):
    """A codepoint that no rule-table entry matches."""

    def __init__(self, codepoint: str, position: int, sentence: int | None = None,
                 token: int | None = None):
        self.codepoint = codepoint
        self.position = position
        self.sentence = sentence
        self.token = token
        where = f"position {position}"
        if sentence is not None:
            where = f"sentence {sentence}, token {token}, " + where
        super().__init__(f"no rule covers {codepoint!r} (U+{ord(codepoint):04X}) at {where}")


class DuplicatePattern(PhonexlError):
    """Two entries with the same pattern in a strict rule table."""


class RaggedSentence(PhonexlError):
    """Corpus row whose column count disagrees with the rest of the file."""

    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: inconsistent column count{': ' + detail if detail else ''}")


class LabelOutsideTagSet(PhonexlError):
    def __init__(self, line_no: int, label: str):
        self.line_no = line_no
        self.label = label
        super().__init__(f"line {line_no}: label {label!r} not in the task tag set")


class DegenerateAlignment(PhonexlError):
    """A word with zero subtokens cannot be mean-pooled."""


class DegenerateEmbedding(PhonexlError):
    """Zero-norm vector fed to the cosine alignment loss."""


class ConfigError(PhonexlError):
    """Invalid run configuration or mismatched artifacts."""


class NumericalError(PhonexlError):
    """Non-finite values encountered during training or inference."""

    exit_code = 3
