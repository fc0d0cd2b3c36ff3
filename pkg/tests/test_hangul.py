import pytest

from phonexl.errors import NotHangulSyllable
from phonexl.hangul import (HangulJamo, compose_hangul, decompose_hangul,
                            is_hangul_syllable, jamo_characters)


def test_first_syllable_decomposes_to_zero_indices():
    assert decompose_hangul("가") == HangulJamo(0, 0, 0)


def test_last_syllable_decomposes_to_maximal_indices():
    assert decompose_hangul("힣") == HangulJamo(18, 20, 27)


def test_be_syllable_matches_hand_evaluated_formula():
    # 0xBCA0 - 0xAC00 = 4256 = 7*588 + 5*28 + 0
    assert decompose_hangul("베") == HangulJamo(7, 5, 0)


def test_round_trip_over_all_syllables():
    for cp in range(0xAC00, 0xD7A3 + 1):
        assert compose_hangul(decompose_hangul(cp)) == chr(cp)


def test_out_of_range_codepoint_rejected():
    with pytest.raises(NotHangulSyllable):
        decompose_hangul("A")
    with pytest.raises(NotHangulSyllable):
        decompose_hangul(0xABFF)
    with pytest.raises(NotHangulSyllable):
        compose_hangul(HangulJamo(19, 0, 0))


def test_is_hangul_syllable():
    assert is_hangul_syllable("한")
    assert not is_hangul_syllable("h")


def test_jamo_characters_skip_empty_tail():
    assert jamo_characters(decompose_hangul("가")) == ("ᄀ", "ᅡ")
    assert len(jamo_characters(decompose_hangul("한"))) == 3
