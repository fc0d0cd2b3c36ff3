"""PhoneXL: cross-lingual token-level transfer with a phonemic input stream.

The package covers the full pipeline at desk scale: rule-based transcription
of CJKV text to romanized and IPA forms, corpus and vocabulary handling with
IPA vocabulary extension, pivot bilingual dictionaries with code-switching
augmentation, a small transformer encoder over five summed embeddings, the
four training objectives (CRF tagging, orthographic-phonemic alignment,
cross-modality MLM, cross-lingual MLM on code-switched input), and a seeded
training / zero-shot evaluation harness.
"""

__version__ = "0.1.0"
