"""Near-equilibrium Jotto strategies via fictitious play.

The hider's side is an explicit distribution over dictionary words; the
guesser's side stays implicit, reconstructed on demand from the per-iteration
strategy file. See README.md for the pipeline.
"""

from .dictionary import Dictionary, common_letter_count, load_dictionary, load_dictionary_file
from .engine import (
    answer_distribution,
    apply_answer,
    best_guess,
    eliminated_count,
    expected_eliminations,
    fresh_state,
    guess_scores,
    uniform_strategy,
)
from .evaluate import MatchReport, benchmark_epsilon, guesser_vs_benchmark, hider_vs_benchmark
from .oracle import MixedGuesser, benchmark_guesser, benchmark_hider, read_strategy_file
from .solver import (
    EpsilonReport,
    SolveArtifacts,
    guesses_per_word,
    hider_best_response,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "Dictionary",
    "EpsilonReport",
    "MatchReport",
    "MixedGuesser",
    "SolveArtifacts",
    "answer_distribution",
    "apply_answer",
    "benchmark_epsilon",
    "benchmark_guesser",
    "benchmark_hider",
    "best_guess",
    "common_letter_count",
    "eliminated_count",
    "expected_eliminations",
    "fresh_state",
    "guess_scores",
    "guesser_vs_benchmark",
    "guesses_per_word",
    "hider_best_response",
    "hider_vs_benchmark",
    "load_dictionary",
    "load_dictionary_file",
    "read_strategy_file",
    "solve",
    "uniform_strategy",
]
