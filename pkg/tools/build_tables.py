#!/usr/bin/env python3
"""Regenerate the bundled rule tables under src/phonexl/tables/.

The tables cover a demo CJKV lexicon (every phrase used by the golden tests)
plus single-character fallbacks so arbitrary text degrades gracefully instead
of failing outright.  Latin-to-IPA tables are total over a-z and apostrophe.
"""

import unicodedata
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "phonexl" / "tables"

LATIN_SINGLES = [(c, c) for c in "abcdefghijklmnopqrstuvwxyz"] + [("'", "")]


def write(name, lang, stage, entries):
    lines = [f"# lang = {lang}", f"# stage = {stage}"]
    lines += [f"{p}\t{o}" for p, o in entries]
    (OUT / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {name}: {len(entries)} entries")


# ---------------------------------------------------------------- Chinese
# Hanzi lexicon maps to tone-numbered pinyin (digits 1-4, 5 = neutral).
# Multi-character entries resolve heteronyms (行 alone reads xing2).
ZH_LEXICON = [
    ("电子", "dian4zi3"), ("电", "dian4"), ("子", "zi3"),
    ("行业", "hang2ye4"), ("行", "xing2"), ("业", "ye4"),
    ("越南", "yue4nan2"), ("越", "yue4"), ("南", "nan2"),
    ("通讯社", "tong1xun4she4"), ("通", "tong1"), ("讯", "xun4"), ("社", "she4"),
    ("新闻", "xin1wen2"), ("新", "xin1"), ("闻", "wen2"),
    ("工业", "gong1ye4"), ("工", "gong1"),
    ("中国", "zhong1guo2"), ("中", "zhong1"), ("国", "guo2"),
]

ZH_SYLLABLES = [
    ("dian", "t·j·ɛ·n"), ("zi", "ts·ɯ"),
    ("hang", "x·ɑ·ŋ"), ("ye", "j·ɛ"), ("xing", "ɕ·i·ŋ"),
    ("yue", "ɥ·œ"), ("nan", "n·a·n"),
    ("tong", "tʰ·ʊ·ŋ"), ("xun", "ɕ·y·n"), ("she", "ʂ·ɤ"),
    ("xin", "ɕ·i·n"), ("wen", "w·ə·n"),
    ("gong", "k·ʊ·ŋ"), ("zhong", "ʈʂ·ʊ·ŋ"), ("guo", "k·w·o"),
]

# ---------------------------------------------------------------- Vietnamese
VI_WORDS = [
    ("việt", "v·i·ə·t·˨ˀ˩"), ("nam", "n·a·m"),
    ("công", "k·o·ŋ"), ("nghiệp", "ŋ·i·ə·p·˨ˀ˩"),
    ("điện", "d·i·ə·n·˨ˀ˩"), ("tử", "t·ɯ·˧˩˧"),
    ("thông", "tʰ·o·ŋ"), ("tấn", "t·ɤ·n·˧˥"), ("xã", "s·a·˧ˀ˥"),
    ("tin", "t·i·n"), ("báo", "b·a·w·˧˥"), ("hà", "h·a·˨˩"), ("nội", "n·o·j·˨ˀ˩"),
]

VI_UNITS = [
    ("ngh", "ŋ"), ("ng", "ŋ"), ("nh", "ɲ"), ("ph", "f"), ("th", "tʰ"),
    ("tr", "ʈ"), ("ch", "c"), ("gh", "ɣ"), ("gi", "z"), ("kh", "x"), ("qu", "k·w"),
    ("a", "a"), ("ă", "a"), ("â", "ə"), ("b", "b"), ("c", "k"), ("d", "z"),
    ("đ", "d"), ("e", "ɛ"), ("ê", "e"), ("g", "ɣ"), ("h", "h"), ("i", "i"),
    ("k", "k"), ("l", "l"), ("m", "m"), ("n", "n"), ("o", "ɔ"), ("ô", "o"),
    ("ơ", "ɤ"), ("p", "p"), ("q", "k"), ("r", "z"), ("s", "s"), ("t", "t"),
    ("u", "u"), ("ư", "ɯ"), ("v", "v"), ("x", "s"), ("y", "i"),
]

VI_TONE_MARKS = [
    ("́", "˧˥"),     # sắc
    ("̀", "˨˩"),     # huyền
    ("̉", "˧˩˧"),    # hỏi
    ("̃", "˧ˀ˥"),    # ngã
    ("̣", "˨ˀ˩"),    # nặng
]

VI_TONE_BASES = {
    "a": "a", "ă": "a", "â": "ə", "e": "ɛ", "ê": "e", "i": "i",
    "o": "ɔ", "ô": "o", "ơ": "ɤ", "u": "u", "ư": "ɯ", "y": "i",
}


def vi_toned_vowels():
    rows = []
    for base, ipa in VI_TONE_BASES.items():
        for mark, tone in VI_TONE_MARKS:
            composed = unicodedata.normalize("NFC", base + mark)
            if len(composed) == 1:
                rows.append((composed, f"{ipa}·{tone}"))
    return rows


# ---------------------------------------------------------------- Japanese
JA_KANJI = [
    ("電子", "denshi"), ("産業", "sangyou"), ("通信社", "tsuushinsha"),
    ("新聞", "shinbun"), ("工業", "kougyou"),
]

_GOJUON = [
    ("あア", "a"), ("いイ", "i"), ("うウ", "u"), ("えエ", "e"), ("おオ", "o"),
    ("かカ", "ka"), ("きキ", "ki"), ("くク", "ku"), ("けケ", "ke"), ("こコ", "ko"),
    ("がガ", "ga"), ("ぎギ", "gi"), ("ぐグ", "gu"), ("げゲ", "ge"), ("ごゴ", "go"),
    ("さサ", "sa"), ("しシ", "shi"), ("すス", "su"), ("せセ", "se"), ("そソ", "so"),
    ("ざザ", "za"), ("じジ", "ji"), ("ずズ", "zu"), ("ぜゼ", "ze"), ("ぞゾ", "zo"),
    ("たタ", "ta"), ("ちチ", "chi"), ("つツ", "tsu"), ("てテ", "te"), ("とト", "to"),
    ("だダ", "da"), ("でデ", "de"), ("どド", "do"),
    ("なナ", "na"), ("にニ", "ni"), ("ぬヌ", "nu"), ("ねネ", "ne"), ("のノ", "no"),
    ("はハ", "ha"), ("ひヒ", "hi"), ("ふフ", "fu"), ("へヘ", "he"), ("ほホ", "ho"),
    ("ばバ", "ba"), ("びビ", "bi"), ("ぶブ", "bu"), ("べベ", "be"), ("ぼボ", "bo"),
    ("ぱパ", "pa"), ("ぴピ", "pi"), ("ぷプ", "pu"), ("ぺペ", "pe"), ("ぽポ", "po"),
    ("まマ", "ma"), ("みミ", "mi"), ("むム", "mu"), ("めメ", "me"), ("もモ", "mo"),
    ("やヤ", "ya"), ("ゆユ", "yu"), ("よヨ", "yo"),
    ("らラ", "ra"), ("りリ", "ri"), ("るル", "ru"), ("れレ", "re"), ("ろロ", "ro"),
    ("わワ", "wa"), ("をヲ", "wo"), ("んン", "n"),
]

_DIGRAPH_FIRST = {
    "き": "ky", "ぎ": "gy", "し": "sh", "じ": "j", "ち": "ch", "に": "ny",
    "ひ": "hy", "び": "by", "ぴ": "py", "み": "my", "り": "ry",
    "キ": "ky", "ギ": "gy", "シ": "sh", "ジ": "j", "チ": "ch", "ニ": "ny",
    "ヒ": "hy", "ビ": "by", "ピ": "py", "ミ": "my", "リ": "ry",
}
_SMALL_VOWELS = {"ゃ": "a", "ゅ": "u", "ょ": "o", "ャ": "a", "ュ": "u", "ョ": "o"}


def ja_kana_rows():
    rows = []
    for kana_pair, roman in _GOJUON:
        for kana in kana_pair:
            rows.append((kana, roman))
    for first, onset in _DIGRAPH_FIRST.items():
        smalls = "ゃゅょ" if "ぁ" <= first <= "ゖ" else "ャュョ"
        for small in smalls:
            rows.append((first + small, onset + _SMALL_VOWELS[small]))
    # sokuon and long-vowel mark degrade to approximations
    rows.append(("っ", "t"))
    rows.append(("ッ", "t"))
    rows.append(("ー", ""))
    return rows


JA_LATIN = [
    ("denshi", "d·ɛ·n·ʃ·i"),
    ("sangyou", "s·æ·ŋ·j·u"),
    ("betonamu", "b·ɪ·t·ə·n·ɑ·m·u"),
    ("tsuushinsha", "ts·ʌ·u·ʃ·ɪ·n·ʃ·ə"),
    ("shinbun", "ʃ·ɪ·n·b·u·n"),
    ("kougyou", "k·o·ŋ·j·u"),
]

# ---------------------------------------------------------------- Korean
KO_LEADS = ["g", "kk", "n", "d", "tt", "r", "m", "b", "pp", "s", "ss", "",
            "j", "jj", "ch", "k", "t", "p", "h"]
KO_VOWELS = ["a", "ae", "ya", "yae", "eo", "e", "yeo", "ye", "o", "wa", "wae",
             "oe", "yo", "u", "wo", "we", "wi", "yu", "eu", "ui", "i"]
KO_TAILS = ["k", "k", "k", "n", "n", "n", "t", "l", "k", "m", "l", "l", "l",
            "p", "l", "m", "p", "p", "t", "t", "ng", "t", "t", "k", "t", "p", "t"]

KO_LATIN = [
    ("jeonja", "dʑ·ɛ·ə·n·j·ə"),
    ("saneop", "s·æ·n·i·a·w·p"),
    ("beteunam", "b·ɛ·t·u·n·æ·m"),
    ("tongsinsa", "t·ɔ·ŋ·s·ɪ·n·s·ə"),
    ("sinmun", "s·i·n·m·u·n"),
    ("gongeop", "k·o·ŋ·ə·p"),
]


def ko_jamo_rows():
    rows = []
    for i, roman in enumerate(KO_LEADS):
        rows.append((chr(0x1100 + i), roman))
    for i, roman in enumerate(KO_VOWELS):
        rows.append((chr(0x1161 + i), roman))
    for i, roman in enumerate(KO_TAILS):
        rows.append((chr(0x11A8 + i), roman))
    return rows


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    write("zh_roman.tsv", "zh", "orthography_to_roman", ZH_LEXICON)
    write("zh_pinyin_ipa.tsv", "zh", "latin_to_ipa", ZH_SYLLABLES + LATIN_SINGLES)
    write("vi_ipa.tsv", "vi", "orthography_to_ipa",
          VI_WORDS + VI_UNITS + vi_toned_vowels())
    write("ja_roman.tsv", "ja", "orthography_to_roman", JA_KANJI + ja_kana_rows())
    write("ja_latin_ipa.tsv", "ja", "latin_to_ipa", JA_LATIN + LATIN_SINGLES)
    write("ko_roman.tsv", "ko", "orthography_to_roman", ko_jamo_rows())
    write("ko_latin_ipa.tsv", "ko", "latin_to_ipa", KO_LATIN + LATIN_SINGLES)


if __name__ == "__main__":
    main()
