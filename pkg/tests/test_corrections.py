import re

import pytest

from agroadvisor.corpus import CorrectionRule, apply_corrections, load_rules, normalize_text
from agroadvisor.corpus.normalize import GUARD_WINDOW, default_rules_path
from agroadvisor.errors import InvalidRule


def brute_force_apply(text, rules):
    """Independent oracle: scan every position, apply guarded replacements
    one rule at a time, leftmost first."""
    total = 0
    for rule in rules:
        pat = re.compile(rule.pattern)
        guard = re.compile(rule.context_guard) if rule.context_guard else None
        pos = 0
        out = ""
        while pos <= len(text):
            m = pat.search(text, pos)
            if not m:
                out += text[pos:]
                break
            window = text[max(0, m.start() - GUARD_WINDOW) : m.end() + GUARD_WINDOW]
            if guard is None or guard.search(window):
                out += text[pos : m.start()] + m.expand(rule.replacement)
                total += 1
            else:
                out += text[pos : m.end()]
            pos = m.end() if m.end() > pos else pos + 1
        text = out
    return text, total


def test_single_substitution():
    rules = [CorrectionRule(pattern="চ্যাষ", replacement="চাষ")]
    fixed, count = apply_corrections("ধান চ্যাষ ভালো", rules)
    assert fixed == "ধান চাষ ভালো"
    assert count == 1


def test_empty_rule_list_is_identity():
    fixed, count = apply_corrections("ধান চাষ", [])
    assert fixed == "ধান চাষ"
    assert count == 0


def test_guard_excludes_one_of_three_matches():
    # Three candidate sites; the guard requires "ডাল ক্ষেতে" inside the ±20
    # character window, so the middle (culinary) occurrence is skipped. The
    # padding keeps the other sites out of its window.
    pad = "এখানে শুধু দূরত্ব বাড়ানোর জন্য কিছু নিরপেক্ষ কথা লেখা হলো।"
    text = f"ডাল ক্ষেতে ভালো ফলন হয়। {pad} ডাল রান্না হয়। {pad} ডাল ক্ষেতে পোকা লাগে।"
    rules = [CorrectionRule(pattern="ডাল", replacement="ধান", context_guard="ডাল ক্ষেতে")]
    expected_text, expected_count = brute_force_apply(text, rules)
    fixed, count = apply_corrections(text, rules)
    assert count == expected_count == 2
    assert fixed == expected_text
    assert "ডাল রান্না" in fixed


def test_matches_brute_force_on_overlapping_patterns():
    text = "aaa baab aaaa"
    rules = [
        CorrectionRule(pattern="aa", replacement="c"),
        CorrectionRule(pattern="cb", replacement="x", context_guard="xb|cb"),
    ]
    assert apply_corrections(text, rules) == brute_force_apply(text, rules)


def test_invalid_pattern_raises():
    with pytest.raises(InvalidRule):
        apply_corrections("x", [CorrectionRule(pattern="(", replacement="y")])
    with pytest.raises(InvalidRule):
        apply_corrections("x", [CorrectionRule(pattern="a", replacement="y", context_guard="(")])
    with pytest.raises(InvalidRule):
        apply_corrections("x", [CorrectionRule(pattern="", replacement="y")])


def test_second_pass_stable_with_default_rules():
    rules = load_rules(default_rules_path())
    text = normalize_text("কৃযি কাজে চ্যাষ ভালাে হয়l")
    once, n1 = apply_corrections(text, rules)
    twice, n2 = apply_corrections(once, rules)
    assert n1 > 0
    assert twice == once
    assert n2 == 0


def test_default_rules_file_loads_and_compiles():
    rules = load_rules(default_rules_path())
    assert len(rules) >= 4
    for rule in rules:
        rule.compiled()


def test_backreference_replacement():
    rules = [CorrectionRule(pattern=r"(\d) ?l", replacement=r"\1।")]
    fixed, count = apply_corrections("মাত্রা ২0l", rules)
    assert count == 1
    assert fixed.endswith("।")
