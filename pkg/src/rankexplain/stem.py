"""Porter stemmer.

Implements the classic suffix-stripping algorithm, including the two
revisions from the author's reference implementation (``bli -> ble`` and
``logi -> log``), so that e.g. "biology" reduces to "biolog" and
"definition" to "definit". Words of length <= 2 are returned unchanged.
"""

from __future__ import annotations

_VOWELS = "aeiou"


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return True if i == 0 else not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Number of vowel-consonant sequences: [C](VC)^m[V]."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_consonant(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _contains_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    """*o condition: ends consonant-vowel-consonant, final not w, x or y."""
    if len(word) < 3:
        return False
    return (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
        and word[-1] not in "wxy"
    )


def _apply_rules(word: str, rules) -> str | None:
    """Longest matching suffix wins; its condition is then tested.

    Returns the rewritten word, or None if no suffix matched or the
    longest match failed its condition (Porter's one-rule-per-step rule).
    """
    best = None
    for suffix, replacement, condition in rules:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, replacement, condition)
    if best is None:
        return None
    suffix, replacement, condition = best
    stem = word[: len(word) - len(suffix)]
    if condition is None or condition(stem):
        return stem + replacement
    return word


def _step1a(word: str) -> str:
    for suffix, replacement in (("sses", "ss"), ("ies", "i"), ("ss", "ss"), ("s", "")):
        if word.endswith(suffix):
            return word[: len(word) - len(suffix)] + replacement
    return word


def _step1b(word: str) -> str:
    if word.endswith("eed"):
        stem = word[:-3]
        return stem + "ee" if _measure(stem) > 0 else word
    stripped = None
    if word.endswith("ed") and _contains_vowel(word[:-2]):
        stripped = word[:-2]
    elif word.endswith("ing") and _contains_vowel(word[:-3]):
        stripped = word[:-3]
    if stripped is None:
        return word
    if stripped.endswith(("at", "bl", "iz")):
        return stripped + "e"
    if _ends_double_consonant(stripped) and stripped[-1] not in "lsz":
        return stripped[:-1]
    if _measure(stripped) == 1 and _ends_cvc(stripped):
        return stripped + "e"
    return stripped


def _step1c(word: str) -> str:
    if word.endswith("y") and _contains_vowel(word[:-1]):
        return word[:-1] + "i"
    return word


_STEP2_RULES = [
    ("ational", "ate", None),
    ("tional", "tion", None),
    ("enci", "ence", None),
    ("anci", "ance", None),
    ("izer", "ize", None),
    ("bli", "ble", None),
    ("alli", "al", None),
    ("entli", "ent", None),
    ("eli", "e", None),
    ("ousli", "ous", None),
    ("ization", "ize", None),
    ("ation", "ate", None),
    ("ator", "ate", None),
    ("alism", "al", None),
    ("iveness", "ive", None),
    ("fulness", "ful", None),
    ("ousness", "ous", None),
    ("aliti", "al", None),
    ("iviti", "ive", None),
    ("biliti", "ble", None),
]

_STEP3_RULES = [
    ("icate", "ic", None),
    ("ative", "", None),
    ("alize", "al", None),
    ("iciti", "ic", None),
    ("ical", "ic", None),
    ("ful", "", None),
    ("ness", "", None),
]

_STEP4_SUFFIXES = (
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
    "ment", "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
)


def _step2(word: str) -> str:
    # The 'logi' departure keeps the 'l' with the stem, which makes short
    # stems like 'geo' or 'bio' measure positively.
    if word.endswith("logi") and _measure(word[:-3]) > 0:
        return word[:-3] + "og"
    rewritten = _apply_rules(
        word, [(s, r, None) for s, r, _ in _STEP2_RULES]
    )
    if rewritten is None:
        return word
    # Re-test with the measure condition: longest match already chosen.
    best = max(
        (s for s, _, _ in _STEP2_RULES if word.endswith(s)), key=len
    )
    replacement = dict((s, r) for s, r, _ in _STEP2_RULES)[best]
    stem = word[: len(word) - len(best)]
    return stem + replacement if _measure(stem) > 0 else word


def _step3(word: str) -> str:
    result = _apply_rules(
        word,
        [(s, r, lambda stem: _measure(stem) > 0) for s, r, _ in _STEP3_RULES],
    )
    return word if result is None else result


def _step4(word: str) -> str:
    matched = [s for s in _STEP4_SUFFIXES if word.endswith(s)]
    if not matched:
        return word
    suffix = max(matched, key=len)
    stem = word[: len(word) - len(suffix)]
    if _measure(stem) <= 1:
        return word
    if suffix == "ion" and not stem.endswith(("s", "t")):
        return word
    return stem


def _step5a(word: str) -> str:
    if word.endswith("e"):
        stem = word[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            return stem
    return word


def _step5b(word: str) -> str:
    if _measure(word) > 1 and _ends_double_consonant(word) and word.endswith("l"):
        return word[:-1]
    return word


def porter_stem(word: str) -> str:
    """Stem a single lowercase word."""
    if len(word) <= 2:
        return word
    word = _step1a(word)
    word = _step1b(word)
    word = _step1c(word)
    word = _step2(word)
    word = _step3(word)
    word = _step4(word)
    word = _step5a(word)
    word = _step5b(word)
    return word
