import unicodedata

from hypothesis import given, settings
from hypothesis import strategies as st

from agroadvisor.corpus import normalize_text


def test_whitespace_collapse_and_control_strip():
    assert normalize_text("ধান  \u0000চাষ") == "ধান চাষ"


def test_already_normalized_is_identity():
    text = "ধান চাষ ভালো।\n## শিরোনাম\nগম কাটা হবে।"
    assert normalize_text(text) == text


def test_nfc_matches_independent_normalizer():
    # Decomposed Bengali "ো" (09CB) as 09C7 + 09BE, plus Latin e + acute.
    raw = "রোপণ café ধান"
    expected = unicodedata.normalize("NFC", raw)
    assert normalize_text(raw) == expected


def test_newline_runs_collapse_to_single_newline():
    assert normalize_text("ক\n\n\nখ") == "ক\nখ"
    assert normalize_text("ক \t খ") == "ক খ"


def test_crlf_normalized():
    assert normalize_text("ক\r\nখ\rগ") == "ক\nখ\nগ"


def test_hyphenation_rejoined_across_lines():
    assert normalize_text("চাষা-\nবাদ ভালো") == "চাষাবাদ ভালো"
    # digits are not rejoined
    assert normalize_text("৩-\n৪ দিন") == "৩-\n৪ দিন"


def test_hyphenation_rejoin_with_trailing_spaces():
    assert normalize_text("চাষা-  \n  বাদ") == "চাষাবাদ"


def test_zwj_kept_between_same_script_letters():
    kept = "র্‍য"  # ra + virama + ZWJ + ya: legitimate conjunct control
    assert "‍" in normalize_text(kept)


def test_zwj_dropped_elsewhere():
    assert "‍" not in normalize_text("ক‍ 1")  # joiner before space
    assert "‍" not in normalize_text("a‍ক")  # cross-script
    assert "‌" not in normalize_text("‌ক")  # leading ZWNJ


def test_format_characters_stripped():
    assert normalize_text("ক​খ﻿গ") == "কখগ"  # ZWSP, BOM


@settings(max_examples=200)
@given(st.text(max_size=200))
def test_idempotent(text):
    once = normalize_text(text)
    assert normalize_text(once) == once


@given(st.text(max_size=200))
def test_output_has_no_forbidden_controls(text):
    out = normalize_text(text)
    for ch in out:
        cat = unicodedata.category(ch)
        if cat == "Cc":
            assert ch == "\n"
        assert cat != "Cf" or ch in "‌‍"
