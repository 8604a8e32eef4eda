import functools
import io
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

from jotto import engine
from jotto.dictionary import Dictionary, common_letter_count, load_dictionary

settings.register_profile("suite", deadline=None, max_examples=40)
settings.load_profile("suite")

DATA_DIR = Path(__file__).parent / "data"
TWL_PATH = DATA_DIR / "twl06_2to5.txt"

# Small dictionaries used across the suite. All entries already satisfy the
# distinct-letter and no-anagram rules unless a test says otherwise.
CHAIN_WORDS = ["AB", "BC", "CD"]
TOY_POOLS = {
    "single": ["AB"],
    "chain": CHAIN_WORDS,
    "pair5": ["GIANT", "PECAN"],
    "ring2": ["AB", "BC", "CD", "DE", "EF", "FA"],
    "zoo3": ["CAT", "DOG", "FOX", "HEN", "OWL", "PIG"],
}


def make_dictionary(words: list[str]) -> Dictionary:
    return load_dictionary(io.StringIO("\n".join(words) + "\n"), len(words[0]))


@functools.lru_cache(maxsize=None)
def load_twl(letters: int) -> Dictionary:
    lines = [w for w in TWL_PATH.read_text().split() if len(w) == letters]
    return load_dictionary(iter(lines), letters)


@pytest.fixture(scope="session")
def chain_dict() -> Dictionary:
    return make_dictionary(CHAIN_WORDS)


@pytest.fixture(scope="session")
def twl2() -> Dictionary:
    return load_twl(2)


def replay_guess_count(dct: Dictionary, hider, hidden: int) -> int:
    """Independent step-by-step game simulation through the public engine ops.

    Answers come from string comparison, not the precomputed table, so this
    doubles as an oracle for both the table and the batched simulator.
    """
    state = engine.fresh_state(dct)
    used = 0
    while True:
        used += 1
        assert used <= dct.size, "replay exceeded the guess budget"
        guess = engine.best_guess(dct, np.asarray(hider, dtype=np.float64), state)
        answer = common_letter_count(dct.words[hidden], dct.words[guess])
        if answer == dct.letters:
            return used
        state = engine.apply_answer(dct, state, guess, answer)


def toy_strategies(size: int, seed: int = 0) -> list[np.ndarray]:
    """A spread of hider distributions: uniform, point masses, random draws."""
    rng = np.random.default_rng(seed)
    out = [np.full(size, 1.0 / size)]
    for i in range(size):
        point = np.zeros(size)
        point[i] = 1.0
        out.append(point)
    for _ in range(3):
        out.append(rng.dirichlet(np.ones(size)))
    return out
