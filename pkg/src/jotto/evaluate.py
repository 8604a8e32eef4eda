"""Exact and Monte Carlo evaluation against the benchmark opponent.

Every matchup here admits a closed form: a deterministic guesser's
performance against any hider distribution is just a dot product with its
per-word guess counts, and the solved (mixture) guesser averages those
counts over its component iterations. Exact evaluation is therefore the
default everywhere; Monte Carlo play is kept purely as a cross-check.

Payoffs are in expected guesses, positive for the hider.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import engine, solver
from .dictionary import Dictionary
from .oracle import MixedGuesser, benchmark_hider


def hider_vs_benchmark(
    dct: Dictionary,
    strategy: np.ndarray,
    *,
    uniform_counts: np.ndarray | None = None,
    workers: int = 1,
) -> float:
    """Expected guesses the benchmark guesser needs against `strategy`.

    Pass uniform_counts to reuse a precomputed guesses_per_word(uniform).
    """
    strategy = engine.validate_strategy(strategy, dct.size)
    if uniform_counts is None:
        uniform_counts = solver.guesses_per_word(dct, benchmark_hider(dct), workers=workers)
    return float((np.asarray(uniform_counts, dtype=np.float64) * strategy).sum())


def guesser_vs_benchmark(
    dct: Dictionary,
    t_star: int,
    *,
    counts_history: np.ndarray | None = None,
    strategies: np.ndarray | None = None,
    workers: int = 1,
) -> float:
    """The solved guesser's (negative) payoff against the uniform hider.

    Component t of the mixture needs counts_history[t] guesses per word, so
    the exact value is minus the grand mean of rows 0..t_star. Without a
    saved history the rows are recomputed from the strategy-file rows, which
    costs one full simulation pass per iteration.
    """
    if counts_history is None:
        if strategies is None:
            raise ValueError("need counts_history or strategies")
        counts_history = np.vstack(
            [
                solver.guesses_per_word(dct, strategies[t], workers=workers)
                for t in range(t_star + 1)
            ]
        )
    counts_history = np.asarray(counts_history, dtype=np.float64)
    if not 0 <= t_star < len(counts_history):
        raise ValueError(f"t_star {t_star} outside history of {len(counts_history)} rows")
    per_word = counts_history[: t_star + 1].mean(axis=0)
    return -float((per_word * benchmark_hider(dct)).sum())


def benchmark_epsilon(dct: Dictionary, *, workers: int = 1) -> float:
    """Deviation incentive of the benchmark pair (uniform hider, greedy-to-uniform).

    With both count vectors equal and the hider uniform, the guesser's
    incentive is zero by construction, so this is the hider's: the worst
    word's guess count minus the average.
    """
    counts = solver.guesses_per_word(dct, benchmark_hider(dct), workers=workers)
    counts = counts.astype(np.float64)
    return float(counts.max() - (counts * benchmark_hider(dct)).sum())


# ---------------------------------------------------------------------------
# Monte Carlo cross-checks


def _play_out(dct: Dictionary, hider_strategy: np.ndarray, hidden: int) -> int:
    state = engine.fresh_state(dct)
    used = 0
    while True:
        used += 1
        if used > dct.size:
            raise RuntimeError("game exceeded the dictionary size")
        guess = engine.best_guess(dct, hider_strategy, state)
        answer = int(dct.common_letters[hidden, guess])
        if answer == dct.letters:
            return used
        state = engine.apply_answer(dct, state, guess, answer)


def mc_hider_vs_benchmark(
    dct: Dictionary, strategy: np.ndarray, games: int, seed: int
) -> tuple[float, float]:
    """Sampled version of hider_vs_benchmark; returns (mean, standard error)."""
    rng = np.random.default_rng(seed)
    uniform = benchmark_hider(dct)
    hidden_words = rng.choice(dct.size, size=games, p=strategy)
    results = np.array([_play_out(dct, uniform, int(w)) for w in hidden_words], dtype=np.float64)
    return float(results.mean()), float(results.std(ddof=1) / np.sqrt(games))


def mc_guesser_vs_benchmark(
    dct: Dictionary, mixture: MixedGuesser, games: int, seed: int
) -> tuple[float, float]:
    """Sampled version of guesser_vs_benchmark; returns (mean, standard error)."""
    rng = np.random.default_rng(seed)
    results = np.empty(games, dtype=np.float64)
    for g in range(games):
        session = mixture.new_session()
        hidden = int(rng.integers(0, dct.size))
        state = engine.fresh_state(dct)
        used = 0
        while True:
            used += 1
            if used > dct.size:
                raise RuntimeError("game exceeded the dictionary size")
            guess = session.next_guess(state)
            answer = int(dct.common_letters[hidden, guess])
            if answer == dct.letters:
                break
            state = engine.apply_answer(dct, state, guess, answer)
        results[g] = used
    return -float(results.mean()), float(results.std(ddof=1) / np.sqrt(games))


# ---------------------------------------------------------------------------
# Report assembly


@dataclass(frozen=True)
class MatchReport:
    """One dictionary's evaluation rows, mirroring the benchmark table."""

    hider_payoff_vs_benchmark: float
    guesser_payoff_vs_benchmark: float
    overall_payoff: float
    self_play_hider_payoff: float
    benchmark_self_play_hider_payoff: float
    benchmark_eps: float
    our_eps: float
    iterations: int
    avg_iter_minutes: float


def build_report(
    dct: Dictionary,
    best_strategy: np.ndarray,
    best_iteration: int,
    best_eps: float,
    counts_history: np.ndarray,
    *,
    iterations: int,
    avg_iter_minutes: float = 0.0,
) -> MatchReport:
    """Assemble the full evaluation for one solved dictionary.

    counts_history must cover iterations 0..best_iteration; row 0 doubles as
    the benchmark guesser's counts because iteration 0 plays against the
    uniform strategy.
    """
    counts_history = np.asarray(counts_history, dtype=np.float64)
    uniform_counts = counts_history[0]
    uniform = benchmark_hider(dct)
    hider_pay = hider_vs_benchmark(dct, best_strategy, uniform_counts=uniform_counts)
    guesser_pay = guesser_vs_benchmark(dct, best_iteration, counts_history=counts_history)
    avg_counts = counts_history[: best_iteration + 1].mean(axis=0)
    return MatchReport(
        hider_payoff_vs_benchmark=hider_pay,
        guesser_payoff_vs_benchmark=guesser_pay,
        overall_payoff=(hider_pay + guesser_pay) / 2.0,
        self_play_hider_payoff=float((avg_counts * best_strategy).sum()),
        benchmark_self_play_hider_payoff=float((uniform_counts * uniform).sum()),
        benchmark_eps=float(uniform_counts.max() - (uniform_counts * uniform).sum()),
        our_eps=best_eps,
        iterations=iterations,
        avg_iter_minutes=avg_iter_minutes,
    )


_ROW_LABELS: list[tuple[str, str]] = [
    ("hider_payoff_vs_benchmark", "Hider payoff vs benchmark"),
    ("guesser_payoff_vs_benchmark", "Guesser payoff vs benchmark"),
    ("overall_payoff", "Overall payoff vs benchmark"),
    ("benchmark_self_play_hider_payoff", "Benchmark self-play hider payoff"),
    ("self_play_hider_payoff", "Self-play hider payoff"),
    ("benchmark_eps", "Benchmark epsilon"),
    ("our_eps", "Our epsilon"),
    ("iterations", "Iterations"),
    ("avg_iter_minutes", "Avg minutes per iteration"),
]


def write_report_csv(rows: list[tuple[str, MatchReport]], path: str | Path) -> None:
    """One CSV line per evaluated dictionary; header only when rows is empty."""
    with Path(path).open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["label"] + [key for key, _ in _ROW_LABELS])
        for label, report in rows:
            writer.writerow([label] + [getattr(report, key) for key, _ in _ROW_LABELS])


def format_report_table(rows: list[tuple[str, MatchReport]]) -> str:
    """Aligned text table: one metric per row, one column per dictionary."""
    if not rows:
        return ""
    headers = [label for label, _ in rows]
    name_width = max(len(name) for _, name in _ROW_LABELS)
    col_width = max([len(h) for h in headers] + [12])
    lines = [" " * name_width + "  " + "  ".join(h.rjust(col_width) for h in headers)]
    for key, name in _ROW_LABELS:
        cells = []
        for _, report in rows:
            value = getattr(report, key)
            cells.append(
                f"{value:d}".rjust(col_width)
                if isinstance(value, int)
                else f"{value:.3f}".rjust(col_width)
            )
        lines.append(name.ljust(name_width) + "  " + "  ".join(cells))
    return "\n".join(lines) + "\n"
