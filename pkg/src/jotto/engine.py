"""Game-state tracking and the guesser's greedy policy.

The guesser's knowledge is a boolean vector over the dictionary: entry i is
True while word i is still consistent with every (guess, answer) pair seen so
far. The greedy policy scores every dictionary word by the number of
consistent words it would eliminate in expectation under a given hider
distribution, and guesses a top scorer. One such score pass is O(size^2)
table lookups, which is the whole search: no deeper lookahead.

Score arithmetic note: bucket sums are accumulated in word-index order
(np.bincount walks its input linearly) and the small per-answer reductions
run left to right. Mathematically tied scores can differ in the last ulp
depending on summation order, and the argmax feeds tie-sensitive game
traces, so the accumulation order here is part of the reproducibility
contract; don't swap in pairwise/BLAS reductions.
"""

from __future__ import annotations

import numpy as np

from .dictionary import Dictionary

_SUM_TOL = 1e-9


def uniform_strategy(dct: Dictionary) -> np.ndarray:
    """Hider distribution putting equal mass on every word."""
    return np.full(dct.size, 1.0 / dct.size)


def validate_strategy(strategy: np.ndarray, size: int) -> np.ndarray:
    """Check a hider distribution: length, nonnegative, sums to 1."""
    strategy = np.asarray(strategy, dtype=np.float64)
    if strategy.shape != (size,):
        raise ValueError(f"strategy has shape {strategy.shape}, expected ({size},)")
    if np.any(strategy < 0.0):
        raise ValueError("strategy has negative entries")
    if abs(float(strategy.sum()) - 1.0) > _SUM_TOL:
        raise ValueError(f"strategy sums to {strategy.sum()!r}, not 1")
    return strategy


def fresh_state(dct: Dictionary) -> np.ndarray:
    """Start-of-game state: every word still consistent."""
    return np.ones(dct.size, dtype=bool)


def _require_nonempty(state: np.ndarray) -> int:
    n = int(np.count_nonzero(state))
    if n == 0:
        raise ValueError("game state has no consistent words")
    return n


def _bucket_mass_counts(
    dct: Dictionary, state: np.ndarray, hider: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-guess, per-answer hider mass and consistent-word counts.

    Returns (mass, counts), each of shape (size, letters + 1): row w, column
    j holds the quantity over consistent words i with common(w, i) == j.
    """
    buckets = dct.letters + 1
    cons = np.flatnonzero(state)
    rows = dct.common_letters[:, cons].astype(np.intp)
    rows += buckets * np.arange(dct.size, dtype=np.intp)[:, None]
    keys = rows.ravel()
    weights = np.broadcast_to(hider[cons], rows.shape).ravel()
    total = dct.size * buckets
    mass = np.bincount(keys, weights=weights, minlength=total).reshape(dct.size, buckets)
    counts = np.bincount(keys, minlength=total).reshape(dct.size, buckets)
    return mass, counts


def answer_distribution(
    dct: Dictionary, guess: int, hider: np.ndarray, state: np.ndarray
) -> np.ndarray:
    """Probability of each answer 0..letters when `guess` is played.

    Mass comes from the hider distribution restricted to consistent words.
    If every consistent word carries zero hider mass (the guess history has
    walked outside the distribution's support), falls back to weighting the
    consistent words uniformly so the policy stays total.
    """
    n_cons = _require_nonempty(state)
    buckets = dct.letters + 1
    cons = np.flatnonzero(state)
    mass = np.bincount(
        dct.common_letters[guess, cons].astype(np.intp),
        weights=hider[cons],
        minlength=buckets,
    )
    total = mass.sum()
    if total > 0.0:
        return mass / total
    counts = np.bincount(dct.common_letters[guess, cons].astype(np.intp), minlength=buckets)
    return counts / n_cons


def eliminated_count(dct: Dictionary, guess: int, state: np.ndarray, answer: int) -> int:
    """Consistent words ruled out if `guess` draws `answer`."""
    if not 0 <= answer <= dct.letters:
        raise ValueError(f"answer {answer} out of range 0..{dct.letters}")
    row = dct.common_letters[guess]
    return int(np.count_nonzero(state & (row != answer)))


def expected_eliminations(
    dct: Dictionary, guess: int, hider: np.ndarray, state: np.ndarray
) -> float:
    """Expected number of consistent words eliminated by playing `guess`."""
    n_cons = _require_nonempty(state)
    buckets = dct.letters + 1
    cons = np.flatnonzero(state)
    comm_row = dct.common_letters[guess, cons].astype(np.intp)
    mass = np.bincount(comm_row, weights=hider[cons], minlength=buckets)
    counts = np.bincount(comm_row, minlength=buckets)
    total = mass.sum()
    probs = mass / total if total > 0.0 else counts / n_cons
    return float((probs * (n_cons - counts)).sum())


def guess_scores(dct: Dictionary, hider: np.ndarray, state: np.ndarray) -> np.ndarray:
    """expected_eliminations for every dictionary word at once."""
    n_cons = _require_nonempty(state)
    mass, counts = _bucket_mass_counts(dct, state, hider)
    total = mass.sum(axis=1)
    # Nonnegative mass sums to exactly zero only when every term is zero,
    # which is a property of (hider, state) alone, so the fallback triggers
    # for all rows together.
    if total[0] > 0.0:
        probs = mass / total[:, None]
    else:
        probs = counts / n_cons
    return (probs * (n_cons - counts)).sum(axis=1)


def best_guess(dct: Dictionary, hider: np.ndarray, state: np.ndarray) -> int:
    """Greedy guess: the lowest-index word with maximal expected eliminations.

    Scored over the whole dictionary, consistent or not — an inconsistent
    word can still split the consistent set well. When a single consistent
    word remains, every word scores exactly 0.0; the survivor is returned so
    play always terminates instead of re-probing an uninformative word.
    """
    n_cons = _require_nonempty(state)
    if n_cons == 1:
        return int(np.argmax(state))
    scores = guess_scores(dct, hider, state)
    return int(np.argmax(scores))


def apply_answer(dct: Dictionary, state: np.ndarray, guess: int, answer: int) -> np.ndarray:
    """Shrink the state to words consistent with (guess, answer).

    Never revives a word: the result is bitwise <= state.
    """
    if not 0 <= answer <= dct.letters:
        raise ValueError(f"answer {answer} out of range 0..{dct.letters}")
    return state & (dct.common_letters[guess] == answer)
