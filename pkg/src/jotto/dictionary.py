"""Word list ingestion and the pairwise common-letter table.

Jotto restricts play to words with all-distinct letters, and bans any word
whose letters can be rearranged into another valid word (both members of such
an anagram pair would otherwise be indistinguishable to the guesser until the
very end). This module applies those filters to a raw word list and
precomputes the common-letter count for every pair of surviving words, which
every other module reads instead of re-deriving letter overlaps.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

log = logging.getLogger(__name__)

_POPCOUNT_DTYPE = np.uint32  # 26 letter bits fit comfortably


@dataclass(frozen=True)
class Dictionary:
    """An immutable, filtered word list plus its common-letter table.

    Attributes:
        words: surviving words, uppercase, sorted lexicographically; the list
            index is the word's identity everywhere else in the package.
        letters: word length (every word has exactly this many letters).
        common_letters: square uint8 table; entry (i, j) is the number of
            letters shared by words i and j. Symmetric, diagonal == letters.
        anagram_excluded: words dropped because another word used the same
            letters; kept so user-facing validation can name the reason.
    """

    words: tuple[str, ...]
    letters: int
    common_letters: np.ndarray
    anagram_excluded: frozenset[str] = field(default=frozenset())

    @property
    def size(self) -> int:
        return len(self.words)

    def index_of(self, word: str) -> int:
        """Index of `word`, or -1 if it is not in the dictionary."""
        lo, hi = 0, len(self.words)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.words[mid] < word:
                lo = mid + 1
            else:
                hi = mid
        if lo < len(self.words) and self.words[lo] == word:
            return lo
        return -1


def common_letter_count(a: str, b: str) -> int:
    """Number of letter pairs shared by two words, positions ignored.

    For all-distinct-letter words (the only kind a Dictionary contains) this
    equals the size of the intersection of their letter sets.
    """
    return sum(b.count(ch) for ch in a)


def _letter_mask(word: str) -> int:
    mask = 0
    for ch in word:
        mask |= 1 << (ord(ch) - 65)
    return mask


def _build_common_table(words: list[str]) -> np.ndarray:
    masks = np.array([_letter_mask(w) for w in words], dtype=_POPCOUNT_DTYPE)
    overlap = np.bitwise_and.outer(masks, masks)
    return np.bitwise_count(overlap).astype(np.uint8)


def load_dictionary(source: Iterable[str], letters: int) -> Dictionary:
    """Filter a raw word list down to legal Jotto words.

    `source` yields one candidate word per line (a file object works).
    Lines are uppercased; lines that are empty, the wrong length, or not
    purely A-Z are skipped with a warning count rather than failing, since
    real word-list files carry headers and stray whitespace. Of the
    remaining words, those with repeated letters are dropped, and every
    member of any anagram group is dropped.

    Raises ValueError if nothing survives.
    """
    if letters < 1:
        raise ValueError(f"letters must be >= 1, got {letters}")

    seen: set[str] = set()
    skipped = 0
    for line in source:
        word = line.strip().upper()
        if not word:
            continue
        if len(word) != letters or not all("A" <= ch <= "Z" for ch in word):
            skipped += 1
            continue
        seen.add(word)
    if skipped:
        log.warning("skipped %d lines that were not %d-letter A-Z words", skipped, letters)

    distinct = [w for w in seen if len(set(w)) == letters]
    signatures = Counter("".join(sorted(w)) for w in distinct)
    kept = sorted(w for w in distinct if signatures["".join(sorted(w))] == 1)
    excluded = frozenset(w for w in distinct if signatures["".join(sorted(w))] > 1)

    if not kept:
        raise ValueError("empty dictionary: no words survived filtering")

    table = _build_common_table(kept)
    return Dictionary(
        words=tuple(kept),
        letters=letters,
        common_letters=table,
        anagram_excluded=excluded,
    )


def load_dictionary_file(path: str | Path, letters: int) -> Dictionary:
    path = Path(path)
    with path.open("r", encoding="utf-8") as f:
        return load_dictionary(f, letters)


def dump_words(dct: Dictionary, path: str | Path) -> None:
    """Write the filtered word list, one word per line, in canonical order."""
    with Path(path).open("w", encoding="utf-8", newline="\n") as f:
        for w in dct.words:
            f.write(w + "\n")
