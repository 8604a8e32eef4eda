"""Command-line entry point: dict / solve / eval / play / serve.

All randomness flows from --seed; solve itself is deterministic and only
records the seed for downstream playback. JOTTO_OUT_DIR and JOTTO_WORKERS
provide environment defaults for the matching flags.
"""

from __future__ import annotations

import argparse
import logging
import os
import secrets
import sys
import time
from pathlib import Path

import numpy as np

from . import engine, evaluate, service, solver
from .dictionary import dump_words, load_dictionary_file
from .oracle import load_mixed_guesser

log = logging.getLogger(__name__)


def _add_dict_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dict", dest="dict_path", required=True, help="word list, one word per line")
    p.add_argument("--letters", type=int, required=True, help="word length")


def _positive(kind: str):
    def parse(text: str) -> int:
        value = int(text)
        if value < 1:
            raise argparse.ArgumentTypeError(f"{kind} must be >= 1")
        return value

    return parse


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="jotto", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    env_workers = int(os.environ.get("JOTTO_WORKERS", "1"))
    env_out = os.environ.get("JOTTO_OUT_DIR", "out")

    p_dict = sub.add_parser("dict", help="filter a word list and show stats")
    _add_dict_args(p_dict)
    p_dict.add_argument("--stats", action="store_true", help="print dictionary statistics")
    p_dict.add_argument("--dump-words", metavar="PATH", help="write the filtered list here")

    p_solve = sub.add_parser("solve", help="run fictitious play and emit artifacts")
    _add_dict_args(p_solve)
    p_solve.add_argument("--iters", type=_positive("iters"), required=True)
    p_solve.add_argument("--target-eps", type=float, default=None)
    p_solve.add_argument("--workers", type=_positive("workers"), default=env_workers)
    p_solve.add_argument("--out-dir", default=env_out)
    p_solve.add_argument(
        "--save-counts",
        action="store_true",
        help="also save each iteration's guess-count vector (speeds up eval)",
    )
    p_solve.add_argument("--seed", type=int, default=None)

    p_eval = sub.add_parser("eval", help="evaluate a solve against the benchmark")
    _add_dict_args(p_eval)
    p_eval.add_argument("--strategy-file", required=True)
    p_eval.add_argument("--t-star", type=int, required=True)
    p_eval.add_argument("--counts", help="counts.npy from solve --save-counts")
    mode = p_eval.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--mc", type=_positive("mc games"), default=None, metavar="N")
    p_eval.add_argument("--seed", type=int, default=0)
    p_eval.add_argument("--workers", type=_positive("workers"), default=env_workers)
    p_eval.add_argument("--out", help="write the report CSV here")

    p_play = sub.add_parser("play", help="play a terminal game against the solved guesser")
    _add_dict_args(p_play)
    p_play.add_argument("--strategy-file", required=True)
    p_play.add_argument("--t-star", type=int, required=True)
    p_play.add_argument("--seed", type=int, default=None)
    p_play.add_argument("--forced-t", type=int, default=None, help="pin the sampled iteration")

    p_serve = sub.add_parser("serve", help="start the game HTTP service")
    p_serve.add_argument("--artifacts", required=True, help="directory written by solve")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--ui", default=None, help="built web UI directory to serve")
    p_serve.add_argument("--seed", type=int, default=None)
    p_serve.add_argument("--transcript-log", default=None)

    return parser


def _load_dictionary(args: argparse.Namespace):
    path = Path(args.dict_path)
    if not path.exists():
        raise FileNotFoundError(f"dictionary file not found: {path}")
    return load_dictionary_file(path, args.letters)


def _cmd_dict(args: argparse.Namespace) -> int:
    dct = _load_dictionary(args)
    if args.dump_words:
        dump_words(dct, args.dump_words)
        print(f"wrote {dct.size} words to {args.dump_words}")
    if args.stats or not args.dump_words:
        print(f"letters: {dct.letters}")
        print(f"words: {dct.size}")
        print(f"anagram-excluded: {len(dct.anagram_excluded)}")
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    dct = _load_dictionary(args)
    out_dir = Path(args.out_dir)
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    log.info("solve seed: %d", seed)
    stride = 1 if dct.letters <= 3 else 10

    def progress(t, report, best_eps, best_t):
        if t % stride == 0:
            print(f"t={t} eps={report.eps:.6f} eps*={best_eps:.6f} t*={best_t}")

    started = time.monotonic()
    artifacts = solver.solve(
        dct,
        args.iters,
        out_dir,
        workers=args.workers,
        target_eps=args.target_eps,
        save_counts=args.save_counts,
        progress=progress,
    )
    elapsed = time.monotonic() - started
    per_iter_minutes = elapsed / 60.0 / len(artifacts.eps_history)
    service.export_artifacts(
        out_dir,
        dct,
        t_star=artifacts.best_iteration,
        best_eps=artifacts.best_eps,
        iterations=len(artifacts.eps_history) - 1,
        seed=seed,
        source=str(args.dict_path),
        avg_iter_minutes=per_iter_minutes,
    )
    print(
        f"done: eps*={artifacts.best_eps:.6f} at t*={artifacts.best_iteration} "
        f"({len(artifacts.eps_history) - 1} iterations, {elapsed:.1f}s); artifacts in {out_dir}"
    )
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    dct = _load_dictionary(args)
    from .oracle import read_strategy_file

    strategies = read_strategy_file(args.strategy_file, dct.size)
    t_star = args.t_star
    if not 0 <= t_star < len(strategies):
        raise ValueError(f"--t-star {t_star} outside strategy file of {len(strategies)} lines")

    if args.mc is not None:
        mixture = load_mixed_guesser(dct, args.strategy_file, t_star, args.seed)
        hider_mean, hider_se = evaluate.mc_hider_vs_benchmark(
            dct, strategies[t_star], args.mc, args.seed
        )
        guesser_mean, guesser_se = evaluate.mc_guesser_vs_benchmark(
            dct, mixture, args.mc, args.seed + 1
        )
        print(f"mc hider payoff vs benchmark: {hider_mean:.4f} +- {hider_se:.4f}")
        print(f"mc guesser payoff vs benchmark: {guesser_mean:.4f} +- {guesser_se:.4f}")
        return 0

    if args.counts:
        counts_history = np.load(args.counts)
    else:
        counts_history = np.vstack(
            [
                solver.guesses_per_word(dct, strategies[t], workers=args.workers)
                for t in range(t_star + 1)
            ]
        )
    report = evaluate.build_report(
        dct,
        strategies[t_star],
        t_star,
        best_eps=float("nan"),
        counts_history=counts_history,
        iterations=len(strategies) - 1,
    )
    rows = [(f"L={dct.letters}", report)]
    print(evaluate.format_report_table(rows), end="")
    if args.out:
        evaluate.write_report_csv(rows, args.out)
        print(f"report written to {args.out}")
    return 0


def _cmd_play(args: argparse.Namespace) -> int:
    dct = _load_dictionary(args)
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    log.info("play seed: %d", seed)
    mixture = load_mixed_guesser(dct, args.strategy_file, args.t_star, seed)
    session = mixture.new_session(forced_iteration=args.forced_t)
    print(f"think of a {dct.letters}-letter word; answer each guess with 0..{dct.letters}")
    state = engine.fresh_state(dct)
    guesses = 0
    while True:
        guesses += 1
        guess = session.next_guess(state)
        print(f"guess {guesses}: {dct.words[guess]}")
        line = sys.stdin.readline()
        if not line:
            print("no more input; stopping")
            return 0
        try:
            answer = int(line.strip())
        except ValueError:
            print("answers must be integers; stopping")
            return 1
        if not 0 <= answer <= dct.letters:
            print(f"answer out of range 0..{dct.letters}; stopping")
            return 1
        if answer == dct.letters:
            print(f"found it in {guesses} guesses")
            return 0
        state = engine.apply_answer(dct, state, guess, answer)
        if not state.any():
            print("no consistent words — answers contradict")
            return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    artifacts = service.load_artifacts(args.artifacts)
    app = service.create_app(
        artifacts,
        seed=args.seed,
        ui_dir=args.ui,
        transcript_log=args.transcript_log,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "dict": _cmd_dict,
    "solve": _cmd_solve,
    "eval": _cmd_eval,
    "play": _cmd_play,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FileNotFoundError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
