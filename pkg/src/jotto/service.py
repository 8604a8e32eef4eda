"""HTTP session API for playing live against the solved strategies.

One session is one game. The human picks a role at creation time:

* role "hider": the human holds a secret word in their head; the machine
  guesses. The machine's pending guess rides along on every response, and
  the human posts common-letter answers until one equals the word length.
* role "guesser": the machine draws a secret from the solved hider
  distribution; the human posts dictionary words and gets answers back. The
  secret is never serialized until the game is over.

Answers from a human hider are taken on faith; the only cheating detection
is structural — if the answer history rules out every word, the session
ends in a dedicated "invalid" status.

Endpoints: POST /sessions, POST /sessions/{id}/answer,
POST /sessions/{id}/guess, GET /sessions/{id}, GET /meta. JSON bodies
throughout; optional static serving of the web UI bundle.
"""

from __future__ import annotations

import json
import logging
import secrets
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import engine, solver
from .dictionary import Dictionary, dump_words, load_dictionary_file
from .oracle import GuesserSession, MixedGuesser, read_strategy_file

log = logging.getLogger(__name__)

WORDS_FILENAME = "words.txt"
EXCLUDED_FILENAME = "anagram_excluded.txt"
META_FILENAME = "meta.json"

SESSION_TTL_SECONDS = 24 * 3600


@dataclass(frozen=True)
class LoadedArtifacts:
    """Everything a running service needs from a finished solve."""

    dictionary: Dictionary
    strategies: np.ndarray
    t_star: int
    meta: dict[str, Any]

    @property
    def best_strategy(self) -> np.ndarray:
        return self.strategies[self.t_star]


def export_artifacts(
    out_dir: str | Path,
    dct: Dictionary,
    *,
    t_star: int,
    best_eps: float,
    iterations: int,
    seed: int,
    source: str,
    avg_iter_minutes: float = 0.0,
) -> None:
    """Write the dictionary snapshot and run metadata next to the solve output.

    The strategy file is expected to already be in out_dir; this adds the
    canonical word list, the anagram-excluded words (so guess validation can
    name the reason), and meta.json.
    """
    out_dir = Path(out_dir)
    dump_words(dct, out_dir / WORDS_FILENAME)
    with (out_dir / EXCLUDED_FILENAME).open("w", encoding="utf-8", newline="\n") as f:
        for w in sorted(dct.anagram_excluded):
            f.write(w + "\n")
    meta = {
        "letters": dct.letters,
        "dictionary_size": dct.size,
        "t_star": t_star,
        "best_eps": best_eps,
        "iterations": iterations,
        "seed": seed,
        "source": source,
        "avg_iter_minutes": avg_iter_minutes,
    }
    with (out_dir / META_FILENAME).open("w", encoding="utf-8") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")


def load_artifacts(artifacts_dir: str | Path) -> LoadedArtifacts:
    artifacts_dir = Path(artifacts_dir)
    meta_path = artifacts_dir / META_FILENAME
    if not meta_path.exists():
        raise FileNotFoundError(f"no {META_FILENAME} in {artifacts_dir}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    dct = load_dictionary_file(artifacts_dir / WORDS_FILENAME, int(meta["letters"]))
    excluded_path = artifacts_dir / EXCLUDED_FILENAME
    if excluded_path.exists():
        excluded = frozenset(
            w.strip().upper() for w in excluded_path.read_text(encoding="utf-8").split()
        )
        dct = Dictionary(
            words=dct.words,
            letters=dct.letters,
            common_letters=dct.common_letters,
            anagram_excluded=excluded,
        )
    strategies = read_strategy_file(artifacts_dir / solver.STRATEGY_FILENAME, dct.size)
    t_star = int(meta["t_star"])
    if not 0 <= t_star < len(strategies):
        raise ValueError(f"t_star {t_star} outside strategy file of {len(strategies)} lines")
    return LoadedArtifacts(dictionary=dct, strategies=strategies, t_star=t_star, meta=meta)


@dataclass
class _Session:
    session_id: str
    human_role: str  # "hider" or "guesser"
    status: str = "active"  # active | finished | invalid
    transcript: list[tuple[str, int]] = field(default_factory=list)
    state: np.ndarray | None = None  # machine-guesser mode
    oracle_session: GuesserSession | None = None
    pending_guess: int | None = None
    secret: int | None = None  # machine-hider mode
    message: str | None = None
    last_touch: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock)


class CreateSessionBody(BaseModel):
    role: str


class AnswerBody(BaseModel):
    answer: int


class GuessBody(BaseModel):
    word: str


def _classify_rejected_word(dct: Dictionary, word: str) -> str:
    if len(word) != dct.letters:
        return "length"
    if len(set(word)) != len(word):
        return "duplicate-letters"
    if word in dct.anagram_excluded:
        return "anagram-excluded"
    return "unknown-word"


def create_app(
    artifacts: LoadedArtifacts,
    *,
    seed: int | None = None,
    ui_dir: str | Path | None = None,
    transcript_log: str | Path | None = None,
    session_ttl: float = SESSION_TTL_SECONDS,
) -> FastAPI:
    dct = artifacts.dictionary
    if seed is None:
        seed = secrets.randbits(63)
    log.info("service seed: %d", seed)

    mixture = MixedGuesser(
        dictionary=dct,
        strategies=artifacts.strategies,
        t_star=artifacts.t_star,
        rng_seed=seed,
    )

    app = FastAPI(title="jotto service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    sessions: dict[str, _Session] = {}
    registry_lock = threading.Lock()
    secret_counter = 0
    log_path = Path(transcript_log) if transcript_log is not None else None
    log_lock = threading.Lock()

    def log_event(session: _Session, event: str, payload: dict[str, Any]) -> None:
        if log_path is None:
            return
        line = json.dumps(
            {"session": session.session_id, "event": event, **payload}, separators=(",", ":")
        )
        with log_lock:
            with log_path.open("a", encoding="utf-8") as f:
                f.write(line + "\n")

    def purge_idle() -> None:
        now = time.monotonic()
        stale = [sid for sid, s in sessions.items() if now - s.last_touch > session_ttl]
        for sid in stale:
            del sessions[sid]

    def get_session(session_id: str) -> _Session:
        with registry_lock:
            purge_idle()
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        session.last_touch = time.monotonic()
        return session

    def view(session: _Session) -> dict[str, Any]:
        body: dict[str, Any] = {
            "session_id": session.session_id,
            "role": session.human_role,
            "status": session.status,
            "letters": dct.letters,
            "transcript": [
                {"guess": guess, "answer": answer} for guess, answer in session.transcript
            ],
            "guess_count": len(session.transcript),
        }
        if session.message is not None:
            body["message"] = session.message
        if session.human_role == "hider" and session.status == "active":
            assert session.pending_guess is not None
            body["machine_guess"] = dct.words[session.pending_guess]
        if (
            session.human_role == "guesser"
            and session.status != "active"
            and session.secret is not None
        ):
            body["secret"] = dct.words[session.secret]
        return body

    @app.get("/meta")
    def meta() -> dict[str, Any]:
        return {
            "letters": dct.letters,
            "dictionary_size": dct.size,
            "t_star": artifacts.t_star,
            "best_eps": artifacts.meta.get("best_eps"),
            "iterations": artifacts.meta.get("iterations"),
            "source": artifacts.meta.get("source"),
        }

    @app.post("/sessions", status_code=201)
    def create_session(body: CreateSessionBody) -> dict[str, Any]:
        nonlocal secret_counter
        if body.role not in ("hider", "guesser"):
            raise HTTPException(status_code=422, detail="role must be 'hider' or 'guesser'")
        session = _Session(session_id=uuid.uuid4().hex, human_role=body.role)
        if body.role == "hider":
            # Machine guesses: bind one sampled pure strategy for the game.
            session.oracle_session = mixture.new_session()
            session.state = engine.fresh_state(dct)
            session.pending_guess = session.oracle_session.next_guess(session.state)
        else:
            with registry_lock:
                counter = secret_counter
                secret_counter += 1
            rng = np.random.default_rng((seed, 1, counter))
            session.secret = int(rng.choice(dct.size, p=artifacts.best_strategy))
        with registry_lock:
            purge_idle()
            sessions[session.session_id] = session
        log_event(session, "create", {"role": body.role})
        return view(session)

    @app.post("/sessions/{session_id}/answer")
    def post_answer(session_id: str, body: AnswerBody) -> dict[str, Any]:
        session = get_session(session_id)
        with session.lock:
            if session.human_role != "hider":
                raise HTTPException(status_code=409, detail="machine hides in this session")
            if session.status != "active":
                raise HTTPException(status_code=409, detail="session already finished")
            if not 0 <= body.answer <= dct.letters:
                raise HTTPException(
                    status_code=422, detail=f"answer must be in 0..{dct.letters}"
                )
            assert session.state is not None and session.pending_guess is not None
            guess = session.pending_guess
            session.transcript.append((dct.words[guess], body.answer))
            if len(session.transcript) > dct.size:
                raise HTTPException(status_code=500, detail="guess budget exceeded")
            if body.answer == dct.letters:
                session.status = "finished"
                session.pending_guess = None
                session.message = f"machine found the word in {len(session.transcript)} guesses"
            else:
                next_state = engine.apply_answer(dct, session.state, guess, body.answer)
                if not next_state.any():
                    session.status = "invalid"
                    session.pending_guess = None
                    session.message = "no consistent words — answers contradict"
                else:
                    session.state = next_state
                    assert session.oracle_session is not None
                    session.pending_guess = session.oracle_session.next_guess(next_state)
            log_event(session, "answer", {"answer": body.answer, "status": session.status})
            return view(session)

    @app.post("/sessions/{session_id}/guess")
    def post_guess(session_id: str, body: GuessBody) -> dict[str, Any]:
        session = get_session(session_id)
        with session.lock:
            if session.human_role != "guesser":
                raise HTTPException(status_code=409, detail="machine guesses in this session")
            if session.status != "active":
                raise HTTPException(status_code=409, detail="session already finished")
            word = body.word.strip().upper()
            index = dct.index_of(word)
            if index < 0:
                reason = _classify_rejected_word(dct, word)
                raise HTTPException(
                    status_code=422,
                    detail={"reason": reason, "message": f"'{word}' rejected: {reason}"},
                )
            assert session.secret is not None
            answer = int(dct.common_letters[session.secret, index])
            session.transcript.append((word, answer))
            if answer == dct.letters:
                session.status = "finished"
                session.message = f"you found the word in {len(session.transcript)} guesses"
            log_event(session, "guess", {"word": word, "answer": answer})
            body_out = view(session)
            body_out["answer"] = answer
            return body_out

    @app.get("/sessions/{session_id}")
    def get_session_view(session_id: str) -> dict[str, Any]:
        session = get_session(session_id)
        with session.lock:
            return view(session)

    if ui_dir is not None:
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
