"""Rule-based English lemmatizer for dependency-tree tokens.

An exception table of irregular forms (``data/irregular_forms.tsv``) is
consulted first, then ordered suffix rules.  The rules are applied until
nothing changes, so ``lemmatize(lemmatize(w)) == lemmatize(w)`` holds for
every input.
"""
from __future__ import annotations

from functools import lru_cache
from importlib import resources
from typing import Dict

_VOWELS = set("aeiou")

# words that look inflected but are not
_PROTECTED = frozenset(
    """
    always perhaps news series species means towards afterwards besides sometimes
    whereas nowadays headquarters during morning evening nothing something anything
    everything ceiling pudding hundred kindred sacred naked wicked rugged ragged
    beloved bed red shed sled shred wed
    """.split()
)
_E_ENDINGS = ("bl", "dl", "gl", "kl", "pl", "tl", "fl", "cl", "zl", "iz", "yz", "uir", "eas", "aus", "fus",
              "ccus", "rs", "ns", "ps", "ys", "rg", "dg", "com")


@lru_cache(maxsize=1)
def irregular_forms() -> Dict[str, str]:
    table = {}
    text = resources.files("pseudoamr").joinpath("data/irregular_forms.tsv").read_text(encoding="utf-8")
    for line in text.splitlines():
        if line and not line.startswith("#"):
            form, lemma = line.split("\t")
            table[form] = lemma
    return table


def _is_vowel(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return True
    return ch == "y" and i > 0 and word[i - 1] not in _VOWELS


def _has_vowel(stem: str) -> bool:
    return any(_is_vowel(stem, i) for i in range(len(stem)))


def _measure(stem: str) -> int:
    """Number of vowel-consonant sequences, as in Porter's stemmer."""
    pattern = "".join("v" if _is_vowel(stem, i) else "c" for i in range(len(stem)))
    return pattern.lstrip("c").count("vc")


def _ends_cvc(stem: str) -> bool:
    if len(stem) < 3:
        return False
    return (not _is_vowel(stem, len(stem) - 3) and _is_vowel(stem, len(stem) - 2)
            and not _is_vowel(stem, len(stem) - 1) and stem[-1] not in "wxy")


def _restore(stem: str) -> str:
    """Undo consonant doubling or restore a dropped final ``e``."""
    if len(stem) >= 2 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS and stem[-1] not in "lsz":
        return stem[:-1]
    if stem.endswith(_E_ENDINGS) or stem[-1] in "vc":
        return stem + "e"
    if len(stem) >= 4 and stem.endswith(("at", "ut")) and not _is_vowel(stem, len(stem) - 3):
        return stem + "e"
    if stem.endswith(("ir", "os")) and len(stem) >= 3 or stem.endswith(("ang", "eng")) and len(stem) >= 5:
        return stem + "e"
    if _ends_cvc(stem) and _measure(stem) == 1:
        return stem + "e"
    return stem


def _step(word: str) -> str:
    table = irregular_forms()
    if word in table:
        return table[word]
    if word in _PROTECTED or word in _lemma_set() or not word.isalpha():
        return word
    n = len(word)
    if word.endswith("ies"):
        return word[:-3] + "y" if n > 4 else word[:-1]
    if word.endswith("sses"):
        return word[:-2]
    if word.endswith(("xes", "ches", "shes", "zzes")) and not word.endswith("aches"):
        return word[:-2]
    if word.endswith("s"):
        if n > 3 and not word.endswith(("ss", "us", "is", "ics")):
            return word[:-1]
        return word
    if word.endswith("ied") and n > 4:
        return word[:-3] + "y"
    if word.endswith("eed"):
        return word
    if word.endswith("ed") and n > 3 and _has_vowel(word[:-2]):
        return _restore(word[:-2])
    if word.endswith("ing") and n > 4 and _has_vowel(word[:-3]):
        return _restore(word[:-3])
    return word


@lru_cache(maxsize=1)
def _lemma_set() -> frozenset:
    return frozenset(irregular_forms().values())


@lru_cache(maxsize=65536)
def lemmatize_token(form: str) -> str:
    """Lemmatize one token; all-caps tokens (acronyms) are returned unchanged."""
    if form.isupper():
        return form
    word = form.lower()
    # every rule shortens the word and table lemmas are fixpoints, so this terminates
    while True:
        nxt = _step(word)
        if nxt == word:
            return word
        word = nxt
