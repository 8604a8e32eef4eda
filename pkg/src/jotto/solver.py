"""Fictitious-play driver for the hider, with the guesser kept implicit.

Each iteration plays the greedy guesser against every possible hidden word to
get a per-word guess-count vector, folds that into a running average, and
best-responds for the hider by spreading mass uniformly over the words that
took the longest on average. The guesser's side of the equilibrium is never
materialized: the per-iteration hider strategies written to the strategy file
are enough to replay any of its pure strategies later.

Convergence is not monotone, so the driver tracks the iteration whose
strategy pair had the smallest deviation incentive (epsilon) and reports
that iterate, not the final one.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, TextIO

import numpy as np

from . import engine
from .dictionary import Dictionary

log = logging.getLogger(__name__)

STRATEGY_FILENAME = "strategy.txt"
EPSILON_FILENAME = "epsilons.csv"
COUNTS_FILENAME = "counts.npy"


# ---------------------------------------------------------------------------
# Guess counting (the per-iteration inner loop)


def _count_block(dct: Dictionary, hider: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Guesses the greedy policy needs for each hidden word in [lo, hi).

    Games that share a prefix of answers pass through identical states, so
    the greedy guess is cached per state; the cache is pure memoization and
    never changes results.
    """
    counts = np.zeros(hi - lo, dtype=np.int64)
    cache: dict[bytes, int] = {}
    table = dct.common_letters
    letters = dct.letters
    for hidden in range(lo, hi):
        state = engine.fresh_state(dct)
        used = 0
        while True:
            used += 1
            if used > dct.size:
                raise RuntimeError(
                    f"game for word {dct.words[hidden]} exceeded {dct.size} guesses; "
                    "the guess policy failed to make progress"
                )
            key = state.tobytes()
            guess = cache.get(key)
            if guess is None:
                guess = engine.best_guess(dct, hider, state)
                cache[key] = guess
            answer = int(table[hidden, guess])
            if answer == letters:
                break
            state = engine.apply_answer(dct, state, guess, answer)
        counts[hidden - lo] = used
    return counts


_POOL_DICT: Dictionary | None = None


def _pool_init(dct: Dictionary) -> None:
    global _POOL_DICT
    _POOL_DICT = dct


def _pool_count(args: tuple[np.ndarray, int, int]) -> np.ndarray:
    hider, lo, hi = args
    assert _POOL_DICT is not None
    return _count_block(_POOL_DICT, hider, lo, hi)


def _block_bounds(size: int, workers: int) -> list[tuple[int, int]]:
    # Contiguous blocks; every worker simulates its own words independently,
    # so the merged vector is identical for any worker count.
    return [(size * k // workers, size * (k + 1) // workers) for k in range(workers)]


class _CountPool:
    """Process pool that farms guess counting over contiguous word blocks."""

    def __init__(self, dct: Dictionary, workers: int):
        self._bounds = _block_bounds(dct.size, workers)
        self._pool = ProcessPoolExecutor(
            max_workers=workers, initializer=_pool_init, initargs=(dct,)
        )

    def __call__(self, hider: np.ndarray) -> np.ndarray:
        jobs = [(hider, lo, hi) for lo, hi in self._bounds]
        return np.concatenate(list(self._pool.map(_pool_count, jobs)))

    def close(self) -> None:
        self._pool.shutdown(cancel_futures=True)


def guesses_per_word(dct: Dictionary, hider: np.ndarray, workers: int = 1) -> np.ndarray:
    """Simulate every hidden word against the greedy guesser for `hider`.

    Entry i is the number of guesses the greedy policy bound to `hider`
    takes to find word i from a fresh game. Worker count only affects wall
    time, never the result.
    """
    hider = engine.validate_strategy(hider, dct.size)
    if workers <= 1:
        return _count_block(dct, hider, 0, dct.size)
    pool = _CountPool(dct, workers)
    try:
        return pool(hider)
    finally:
        pool.close()


# ---------------------------------------------------------------------------
# Best response and averaging updates


def hider_best_response(avg_counts: np.ndarray) -> np.ndarray:
    """Uniform distribution over the words with maximal average guess count."""
    avg_counts = np.asarray(avg_counts, dtype=np.float64)
    if avg_counts.size == 0:
        raise ValueError("empty guess-count vector")
    top = avg_counts == avg_counts.max()
    return top / int(top.sum())


def mix_step(s_old: np.ndarray, s_br: np.ndarray, t: int) -> np.ndarray:
    """One fictitious-play averaging step at iteration t >= 1.

    Returns (1 - 1/(t+1)) * s_old + (1/(t+1)) * s_br, renormalized only if
    float drift pushes the total off 1 by more than 1e-12.
    """
    if t < 1:
        raise ValueError(f"iteration must be >= 1, got {t}")
    w = 1.0 / (t + 1)
    mixed = (1.0 - w) * s_old + w * s_br
    total = float(mixed.sum())
    if abs(total - 1.0) > 1e-12:
        mixed = mixed / total
    return mixed


def average_update(avg_counts: np.ndarray, counts: np.ndarray, t: int) -> np.ndarray:
    """Fold iteration t's guess counts into the running average.

    Same convex step as mix_step, elementwise, without normalization; after
    t steps the result is the plain mean of all t+1 count vectors.
    """
    if t < 1:
        raise ValueError(f"iteration must be >= 1, got {t}")
    w = 1.0 / (t + 1)
    return (1.0 - w) * np.asarray(avg_counts, dtype=np.float64) + w * np.asarray(
        counts, dtype=np.float64
    )


# ---------------------------------------------------------------------------
# Payoffs and epsilons


def hider_best_response_payoff(avg_counts: np.ndarray) -> float:
    return float(np.asarray(avg_counts).max())


def hider_payoff(avg_counts: np.ndarray, strategy: np.ndarray) -> float:
    return float((np.asarray(avg_counts, dtype=np.float64) * strategy).sum())


def guesser_best_response_payoff(counts: np.ndarray, strategy: np.ndarray) -> float:
    return -float((np.asarray(counts, dtype=np.float64) * strategy).sum())


def guesser_payoff(avg_counts: np.ndarray, strategy: np.ndarray) -> float:
    return -hider_payoff(avg_counts, strategy)


@dataclass(frozen=True)
class EpsilonReport:
    """How much either player could gain by deviating at one iteration.

    The guesser's "best response" here is the greedy policy, not a true
    best response, so eps_guesser can dip slightly negative early on; it is
    reported unclamped.
    """

    hider_br_payoff: float
    hider_actual_payoff: float
    guesser_br_payoff: float
    guesser_actual_payoff: float
    eps_hider: float
    eps_guesser: float
    eps: float


def epsilon_report(
    counts: np.ndarray, avg_counts: np.ndarray, strategy: np.ndarray
) -> EpsilonReport:
    hbp = hider_best_response_payoff(avg_counts)
    hap = hider_payoff(avg_counts, strategy)
    gbp = guesser_best_response_payoff(counts, strategy)
    gap = guesser_payoff(avg_counts, strategy)
    eps_hider = hbp - hap
    eps_guesser = gbp - gap
    return EpsilonReport(
        hider_br_payoff=hbp,
        hider_actual_payoff=hap,
        guesser_br_payoff=gbp,
        guesser_actual_payoff=gap,
        eps_hider=eps_hider,
        eps_guesser=eps_guesser,
        eps=max(eps_hider, eps_guesser),
    )


# ---------------------------------------------------------------------------
# The solve loop


@dataclass
class SolveArtifacts:
    best_hider_strategy: np.ndarray
    best_iteration: int
    best_eps: float
    strategy_file_path: Path
    eps_history: list[EpsilonReport]


def format_strategy_line(strategy: np.ndarray) -> str:
    # 17 significant digits round-trips float64 exactly, so a strategy read
    # back from the file replays the identical greedy guesses.
    return " ".join(f"{p:.17g}" for p in strategy)


def _write_strategy(f: TextIO, strategy: np.ndarray, out_dir: Path) -> None:
    try:
        f.write(format_strategy_line(strategy) + "\n")
    except OSError as exc:
        raise RuntimeError(
            f"failed writing strategy file; partial output remains in {out_dir}"
        ) from exc


ProgressFn = Callable[[int, EpsilonReport, float, int], None]


def solve(
    dct: Dictionary,
    iters: int,
    out_dir: str | Path,
    *,
    workers: int = 1,
    target_eps: float | None = None,
    save_counts: bool = False,
    progress: ProgressFn | None = None,
) -> SolveArtifacts:
    """Run fictitious play for `iters` iterations and emit artifacts.

    Writes one hider distribution per line to strategy.txt (iteration 0
    first) and one epsilon row per iteration to epsilons.csv; with
    save_counts, also stacks each iteration's guess-count vector into
    counts.npy. Returns the strategy/iteration with the smallest epsilon
    (earliest on ties).

    target_eps stops early once the best epsilon reaches it. Ctrl-C
    finalizes artifacts at the last completed iteration instead of losing
    the run; the strategy file may then hold one trailing line for the
    iteration that was cut short, which is harmless because playback only
    reads lines up to the best iteration.
    """
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    strategy_path = out_dir / STRATEGY_FILENAME
    eps_path = out_dir / EPSILON_FILENAME

    pool = _CountPool(dct, workers) if workers > 1 else None
    count_fn = pool if pool is not None else (lambda h: _count_block(dct, h, 0, dct.size))

    strategy = engine.uniform_strategy(dct)
    eps_history: list[EpsilonReport] = []
    counts_history: list[np.ndarray] = []
    interrupted = False

    try:
        with strategy_path.open("w", encoding="utf-8", newline="\n") as sf, eps_path.open(
            "w", encoding="utf-8", newline="\n"
        ) as ef:
            try:
                ef.write("t,eps_hider,eps_guesser,eps\n")
            except OSError as exc:
                raise RuntimeError(
                    f"failed writing epsilon file; partial output remains in {out_dir}"
                ) from exc

            def record(t: int, report: EpsilonReport) -> None:
                eps_history.append(report)
                try:
                    ef.write(
                        f"{t},{report.eps_hider:.17g},{report.eps_guesser:.17g},"
                        f"{report.eps:.17g}\n"
                    )
                except OSError as exc:
                    raise RuntimeError(
                        f"failed writing epsilon file; partial output remains in {out_dir}"
                    ) from exc

            try:
                _write_strategy(sf, strategy, out_dir)
                counts = count_fn(strategy)
                if save_counts:
                    counts_history.append(counts)
                avg_counts = counts.astype(np.float64)
                report = epsilon_report(counts, avg_counts, strategy)
                record(0, report)
                best_eps = report.eps
                best_iteration = 0
                best_strategy = strategy.copy()
                if progress is not None:
                    progress(0, report, best_eps, best_iteration)

                if target_eps is None or best_eps > target_eps:
                    for t in range(1, iters + 1):
                        br = hider_best_response(avg_counts)
                        strategy = mix_step(strategy, br, t)
                        _write_strategy(sf, strategy, out_dir)
                        counts = count_fn(strategy)
                        if save_counts:
                            counts_history.append(counts)
                        avg_counts = average_update(avg_counts, counts, t)
                        report = epsilon_report(counts, avg_counts, strategy)
                        record(t, report)
                        if report.eps < best_eps:
                            best_eps = report.eps
                            best_iteration = t
                            best_strategy = strategy.copy()
                        if progress is not None:
                            progress(t, report, best_eps, best_iteration)
                        if target_eps is not None and best_eps <= target_eps:
                            break
            except KeyboardInterrupt:
                interrupted = True
    finally:
        if pool is not None:
            pool.close()

    if interrupted:
        last = len(eps_history) - 1
        log.warning("solve interrupted; artifacts finalized at iteration %d", last)
        if not eps_history:
            raise KeyboardInterrupt

    if save_counts:
        np.save(out_dir / COUNTS_FILENAME, np.vstack(counts_history))

    return SolveArtifacts(
        best_hider_strategy=best_strategy,
        best_iteration=best_iteration,
        best_eps=best_eps,
        strategy_file_path=strategy_path,
        eps_history=eps_history,
    )
