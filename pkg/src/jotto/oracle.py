"""Playable guesser strategies reconstructed from a solve run.

The solved guesser is a uniform mixture over the greedy policies for the
per-iteration hider strategies up to the best iteration. Nothing about those
policies is stored beyond the hider strategies themselves: a session samples
one iteration index up front and then answers every state query by running
the greedy policy for that iteration's strategy on demand. Sampling the
index once per game (not per move) is what makes the whole thing a genuine
mixture over deterministic strategies.

The benchmark opponent used for evaluation lives here too: a hider that
picks uniformly and a guesser that plays the greedy policy against the
uniform distribution.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import engine
from .dictionary import Dictionary


def read_strategy_file(path: str | Path, size: int | None = None) -> np.ndarray:
    """Parse a strategy file into an array of per-iteration distributions.

    Line t holds iteration t's hider distribution as space-separated
    probabilities. Raises ValueError naming the offending 1-based line on
    malformed input.
    """
    path = Path(path)
    rows: list[np.ndarray] = []
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split()
            if size is not None and len(fields) != size:
                raise ValueError(
                    f"{path}:{lineno}: expected {size} fields, found {len(fields)}"
                )
            try:
                row = np.array([float(x) for x in fields], dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: unparseable probability") from exc
            if size is None:
                size = len(fields)
            elif len(row) != size:
                raise ValueError(
                    f"{path}:{lineno}: expected {size} fields, found {len(row)}"
                )
            rows.append(row)
    if not rows:
        raise ValueError(f"{path}: empty strategy file")
    return np.vstack(rows)


@dataclass(frozen=True)
class GuesserSession:
    """One game's worth of guessing, bound to a single sampled iteration."""

    dictionary: Dictionary
    strategy: np.ndarray
    iteration: int

    def next_guess(self, state: np.ndarray) -> int:
        return engine.best_guess(self.dictionary, self.strategy, state)


@dataclass
class MixedGuesser:
    """Uniform mixture over the greedy responses of iterations 0..t_star.

    Session sampling is reproducible: session k under seed s always draws
    the same iteration, via a (seed, counter)-derived generator.
    """

    dictionary: Dictionary
    strategies: np.ndarray  # (iterations, size) rows from a strategy file
    t_star: int
    rng_seed: int
    _session_counter: int = field(default=0, repr=False)

    def __post_init__(self) -> None:
        if self.strategies.ndim != 2 or self.strategies.shape[1] != self.dictionary.size:
            raise ValueError("strategy rows do not match the dictionary size")
        if not 0 <= self.t_star < len(self.strategies):
            raise ValueError(
                f"t_star {self.t_star} outside the file's {len(self.strategies)} iterations"
            )
        for t in range(self.t_star + 1):
            engine.validate_strategy(self.strategies[t], self.dictionary.size)

    def new_session(self, forced_iteration: int | None = None) -> GuesserSession:
        """Sample an iteration (or force one, for replay tests) and bind it."""
        counter = self._session_counter
        self._session_counter += 1
        if forced_iteration is None:
            rng = np.random.default_rng((self.rng_seed, counter))
            iteration = int(rng.integers(0, self.t_star + 1))
        else:
            if not 0 <= forced_iteration < len(self.strategies):
                raise ValueError(f"iteration {forced_iteration} out of range")
            iteration = forced_iteration
        return GuesserSession(
            dictionary=self.dictionary,
            strategy=self.strategies[iteration],
            iteration=iteration,
        )


def load_mixed_guesser(
    dct: Dictionary, strategy_file: str | Path, t_star: int, seed: int
) -> MixedGuesser:
    strategies = read_strategy_file(strategy_file, dct.size)
    return MixedGuesser(dictionary=dct, strategies=strategies, t_star=t_star, rng_seed=seed)


def benchmark_hider(dct: Dictionary) -> np.ndarray:
    """The benchmark hider: uniform over the dictionary."""
    return engine.uniform_strategy(dct)


def benchmark_guesser(dct: Dictionary, state: np.ndarray) -> int:
    """The benchmark guesser: greedy response to the uniform distribution."""
    return engine.best_guess(dct, engine.uniform_strategy(dct), state)
