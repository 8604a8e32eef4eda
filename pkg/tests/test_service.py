import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from jotto import engine, service, solver
from jotto.dictionary import common_letter_count

from .conftest import TOY_POOLS, make_dictionary


def build_artifacts(tmp_path, words, iters, *, t_star=None):
    d = make_dictionary(words)
    artifacts = solver.solve(d, iters, tmp_path)
    chosen = artifacts.best_iteration if t_star is None else t_star
    service.export_artifacts(
        tmp_path,
        d,
        t_star=chosen,
        best_eps=artifacts.best_eps,
        iterations=iters,
        seed=5,
        source="toy",
    )
    return service.load_artifacts(tmp_path)


@pytest.fixture(scope="module")
def chain_service(tmp_path_factory):
    art = build_artifacts(tmp_path_factory.mktemp("svc_chain"), TOY_POOLS["chain"], 12)
    return art, TestClient(service.create_app(art, seed=1234))


@pytest.fixture(scope="module")
def bench_service(tmp_path_factory):
    # t_star pinned to 0 so the machine's strategy is known exactly (uniform).
    art = build_artifacts(
        tmp_path_factory.mktemp("svc_bench"), TOY_POOLS["ring2"], 4, t_star=0
    )
    return art, TestClient(service.create_app(art, seed=99))


def test_meta_endpoint(chain_service):
    art, client = chain_service
    body = client.get("/meta").json()
    assert body["letters"] == 2
    assert body["dictionary_size"] == 3
    assert body["t_star"] == art.t_star
    assert body["iterations"] == 12


def test_load_artifacts_requires_meta(tmp_path):
    with pytest.raises(FileNotFoundError):
        service.load_artifacts(tmp_path)


# ---------------------------------------------------------------------------
# machine guesses, human hides


def test_fresh_hider_session_carries_first_guess(chain_service):
    _, client = chain_service
    body = client.post("/sessions", json={"role": "hider"}).json()
    assert body["status"] == "active"
    assert body["transcript"] == []
    assert body["guess_count"] == 0
    assert body["machine_guess"] == "AB"  # greedy opener for every chain strategy


def test_machine_finds_known_secret(chain_service):
    art, client = chain_service
    d = art.dictionary
    secret = "BC"
    body = client.post("/sessions", json={"role": "hider"}).json()
    sid = body["session_id"]
    played = []
    while body["status"] == "active":
        guess = body["machine_guess"]
        answer = common_letter_count(secret, guess)
        played.append({"guess": guess, "answer": answer})
        body = client.post(f"/sessions/{sid}/answer", json={"answer": answer}).json()
    assert body["status"] == "finished"
    assert body["transcript"] == played
    assert body["guess_count"] <= d.size
    assert played[-1]["answer"] == d.letters
    assert str(body["guess_count"]) in body["message"]


def test_machine_guesser_transcript_replays_offline(bench_service):
    art, client = bench_service
    d = art.dictionary
    secret = "EF"
    body = client.post("/sessions", json={"role": "hider"}).json()
    sid = body["session_id"]
    while body["status"] == "active":
        answer = common_letter_count(secret, body["machine_guess"])
        body = client.post(f"/sessions/{sid}/answer", json={"answer": answer}).json()
    # replay the answer sequence through the engine with the session's
    # strategy (t_star == 0 pins it to the file's first row)
    strategy = art.strategies[0]
    state = engine.fresh_state(d)
    for row in body["transcript"]:
        guess = engine.best_guess(d, strategy, state)
        assert d.words[guess] == row["guess"]
        if row["answer"] != d.letters:
            state = engine.apply_answer(d, state, guess, row["answer"])
    assert body["status"] == "finished"


def test_answer_of_full_length_on_first_guess(chain_service):
    _, client = chain_service
    body = client.post("/sessions", json={"role": "hider"}).json()
    sid = body["session_id"]
    body = client.post(f"/sessions/{sid}/answer", json={"answer": 2}).json()
    assert body["status"] == "finished"
    assert body["guess_count"] == 1


def test_chain_answer_zero_leads_to_cd(chain_service):
    _, client = chain_service
    body = client.post("/sessions", json={"role": "hider"}).json()
    sid = body["session_id"]
    assert body["machine_guess"] == "AB"
    body = client.post(f"/sessions/{sid}/answer", json={"answer": 0}).json()
    assert body["machine_guess"] == "CD"


def test_contradictory_answers_invalidate_session(chain_service):
    art, client = chain_service
    d = art.dictionary
    body = client.post("/sessions", json={"role": "hider"}).json()
    sid = body["session_id"]
    answers = 0
    while body["status"] == "active":
        body = client.post(f"/sessions/{sid}/answer", json={"answer": 0}).json()
        answers += 1
        assert answers <= d.size
    assert body["status"] == "invalid"
    assert body["message"] == "no consistent words — answers contradict"
    # terminal state rejects further play
    conflict = client.post(f"/sessions/{sid}/answer", json={"answer": 0})
    assert conflict.status_code == 409


def test_answer_validation(chain_service):
    _, client = chain_service
    sid = client.post("/sessions", json={"role": "hider"}).json()["session_id"]
    assert client.post(f"/sessions/{sid}/answer", json={"answer": 3}).status_code == 422
    assert client.post(f"/sessions/{sid}/answer", json={"answer": -1}).status_code == 422
    assert client.post("/sessions/zzz/answer", json={"answer": 0}).status_code == 404
    guesser_sid = client.post("/sessions", json={"role": "guesser"}).json()["session_id"]
    assert client.post(f"/sessions/{guesser_sid}/answer", json={"answer": 0}).status_code == 409


def test_bad_role_rejected(chain_service):
    _, client = chain_service
    assert client.post("/sessions", json={"role": "spectator"}).status_code == 422


# ---------------------------------------------------------------------------
# machine hides, human guesses


def test_single_word_dictionary_secret(tmp_path):
    art = build_artifacts(tmp_path, TOY_POOLS["single"], 2)
    client = TestClient(service.create_app(art, seed=4))
    body = client.post("/sessions", json={"role": "guesser"}).json()
    sid = body["session_id"]
    assert "secret" not in body
    body = client.post(f"/sessions/{sid}/guess", json={"word": "ab"}).json()
    assert body["answer"] == 2
    assert body["status"] == "finished"
    assert body["secret"] == "AB"


def test_guess_win_reveals_secret_and_counts(chain_service):
    _, client = chain_service
    body = client.post("/sessions", json={"role": "guesser"}).json()
    sid = body["session_id"]
    for attempt, word in enumerate(["AB", "BC", "CD"], start=1):
        body = client.post(f"/sessions/{sid}/guess", json={"word": word}).json()
        if body["status"] == "finished":
            assert body["secret"] == word
            assert body["guess_count"] == attempt
            break
    else:
        pytest.fail("secret not among dictionary words")
    assert client.post(f"/sessions/{sid}/guess", json={"word": "AB"}).status_code == 409


def test_secret_hidden_while_active(chain_service):
    _, client = chain_service
    body = client.post("/sessions", json={"role": "guesser"}).json()
    sid = body["session_id"]
    body = client.post(f"/sessions/{sid}/guess", json={"word": "AB"}).json()
    if body["status"] == "active":
        assert "secret" not in body
        assert "secret" not in client.get(f"/sessions/{sid}").json()


def test_guess_rejection_reasons(tmp_path):
    art = build_artifacts(tmp_path, ["AB", "BA", "CD", "CE", "DE"], 2)
    assert art.dictionary.words == ("CD", "CE", "DE")
    client = TestClient(service.create_app(art, seed=8))
    sid = client.post("/sessions", json={"role": "guesser"}).json()["session_id"]

    def reason(word):
        response = client.post(f"/sessions/{sid}/guess", json={"word": word})
        assert response.status_code == 422
        return response.json()["detail"]["reason"]

    assert reason("ABC") == "length"
    assert reason("AA") == "duplicate-letters"
    assert reason("AB") == "anagram-excluded"
    assert reason("ZQ") == "unknown-word"


def test_secret_frequencies_match_best_strategy(tmp_path):
    art = build_artifacts(tmp_path, TOY_POOLS["chain"], 20)
    client = TestClient(service.create_app(art, seed=2024))
    probs = art.best_strategy
    n = 10_000
    tallies = np.zeros(art.dictionary.size)
    for _ in range(n):
        body = client.post("/sessions", json={"role": "guesser"}).json()
        sid = body["session_id"]
        done = client.post(f"/sessions/{sid}/guess", json={"word": "AB"}).json()
        if done["status"] != "finished":
            done = client.post(f"/sessions/{sid}/guess", json={"word": "BC"}).json()
        if done["status"] != "finished":
            done = client.post(f"/sessions/{sid}/guess", json={"word": "CD"}).json()
        tallies[art.dictionary.index_of(done["secret"])] += 1
    freq = tallies / n
    for i, p in enumerate(probs):
        if p == 0.0:
            assert tallies[i] == 0  # secrets always lie in the support
        else:
            assert abs(freq[i] - p) <= 3 * np.sqrt(p * (1 - p) / n)


# ---------------------------------------------------------------------------
# plumbing


def test_get_session_views(chain_service):
    _, client = chain_service
    sid = client.post("/sessions", json={"role": "hider"}).json()["session_id"]
    body = client.get(f"/sessions/{sid}").json()
    assert body["transcript"] == []
    assert body["machine_guess"]
    assert client.get("/sessions/nope").status_code == 404


def test_transcript_log_appends(tmp_path):
    art = build_artifacts(tmp_path / "art", TOY_POOLS["chain"], 4)
    log_path = tmp_path / "events.jsonl"
    client = TestClient(service.create_app(art, seed=6, transcript_log=log_path))
    sid = client.post("/sessions", json={"role": "hider"}).json()["session_id"]
    client.post(f"/sessions/{sid}/answer", json={"answer": 2})
    lines = [json.loads(x) for x in log_path.read_text().splitlines()]
    assert [e["event"] for e in lines] == ["create", "answer"]
    assert all(e["session"] == sid for e in lines)


def test_static_ui_serving(tmp_path):
    art = build_artifacts(tmp_path / "art", TOY_POOLS["chain"], 4)
    ui = tmp_path / "ui"
    ui.mkdir()
    (ui / "index.html").write_text("<html><body>jotto</body></html>")
    client = TestClient(service.create_app(art, seed=6, ui_dir=ui))
    assert client.get("/meta").status_code == 200
    page = client.get("/")
    assert page.status_code == 200
    assert "jotto" in page.text
