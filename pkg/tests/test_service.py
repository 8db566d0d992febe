import json

import pytest
from fastapi.testclient import TestClient

from conftest import ANOMALY_READING, NOMINAL_READING
from relidiag.engine import parse_event, run_events
from relidiag.model import parse_model
from relidiag.service import create_app


@pytest.fixture()
def circuit_doc(circuit_path):
    return json.loads(open(circuit_path).read())


@pytest.fixture()
def client():
    return TestClient(create_app())


def make_session(client, circuit_doc, t0):
    response = client.post("/sessions", json={"model": circuit_doc, "t0": t0})
    assert response.status_code == 200, response.text
    return response.json()


def observe_event(time, assignments):
    return {"type": "observe", "time": time, "assignments": assignments}


def p_broken(summary, component):
    return next(m for m in summary["marginals"] if m["component"] == component)["p_broken"]


class TestSessionCreation:
    def test_priors_at_ten_hours(self, client, circuit_doc):
        summary = make_session(client, circuit_doc, 10)
        assert p_broken(summary, "A") == pytest.approx(0.0952, abs=5e-5)
        assert p_broken(summary, "O") == pytest.approx(0.0392, abs=5e-5)
        assert p_broken(summary, "X") == pytest.approx(0.0282, abs=5e-5)

    def test_fresh_system_has_zero_priors(self, client, circuit_doc):
        summary = make_session(client, circuit_doc, 0)
        assert all(m["p_broken"] == 0.0 for m in summary["marginals"])

    def test_invalid_model_rejected_with_report(self, client, circuit_doc):
        circuit_doc["components"][2]["inputs"] = ["I4", "I6"]
        response = client.post("/sessions", json={"model": circuit_doc, "t0": 0})
        assert response.status_code == 422
        body = response.json()
        assert body["code"] == "validation_failed"
        assert any("cycle" in v for v in body["violations"])

    def test_stored_model_reuse(self, client, circuit_doc):
        model_id = client.post("/models", json=circuit_doc).json()["model_id"]
        response = client.post("/sessions", json={"model_id": model_id, "t0": 10})
        assert response.status_code == 200
        assert p_broken(response.json(), "A") == pytest.approx(0.0952, abs=5e-5)

    def test_unknown_model_id(self, client):
        response = client.post("/sessions", json={"model_id": "nope", "t0": 0})
        assert response.status_code == 404

    def test_time_before_commissioning_rejected(self, client, circuit_doc):
        response = client.post("/sessions", json={"model": circuit_doc, "t0": -5})
        assert response.status_code == 409
        assert response.json()["code"] == "invalid_time"


class TestEvents:
    def test_anomaly_returns_posterior(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 0)
        response = client.post(
            f"/sessions/{session['session_id']}/events",
            json=observe_event(20, ANOMALY_READING),
        )
        assert response.status_code == 200
        top = response.json()["posterior"][0]
        assert top["modes"] == {"A": "ok", "O": "ok", "X": "broken"}
        assert top["probability"] == pytest.approx(0.7558, abs=5e-5)

    def test_repair_then_confirming_observation(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 0)
        sid = session["session_id"]
        client.post(f"/sessions/{sid}/events", json=observe_event(20, ANOMALY_READING))
        client.post(
            f"/sessions/{sid}/events",
            json={"type": "repair", "time": 20, "components": ["X"]},
        )
        response = client.post(
            f"/sessions/{sid}/events",
            json=observe_event(20, {"I1": 0, "I2": 0, "I3": 0, "I6": 0}),
        )
        assert response.status_code == 200
        assert p_broken(response.json(), "X") == 0.0

    def test_time_regression_rejected_and_log_unchanged(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 0)
        sid = session["session_id"]
        client.post(f"/sessions/{sid}/events", json=observe_event(20, NOMINAL_READING))
        response = client.post(f"/sessions/{sid}/events", json=observe_event(5, NOMINAL_READING))
        assert response.status_code == 409
        assert response.json()["code"] == "invalid_time"
        log = client.get(f"/sessions/{sid}").json()["events"]
        assert len(log) == 1

    def test_inconsistent_observation_rejected_and_log_unchanged(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 0)
        sid = session["session_id"]
        response = client.post(
            f"/sessions/{sid}/events",
            json=observe_event(10, {"I1": 0, "I2": 0, "I3": 0, "I4": 1}),
        )
        assert response.status_code == 409
        assert response.json()["code"] == "inconsistent_observation"
        assert client.get(f"/sessions/{sid}").json()["events"] == []

    def test_unknown_session_404(self, client):
        response = client.post("/sessions/ghost/events", json=observe_event(1, {}))
        assert response.status_code == 404


class TestReads:
    def test_belief_top_k(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 0)
        sid = session["session_id"]
        client.post(f"/sessions/{sid}/events", json=observe_event(20, ANOMALY_READING))
        response = client.get(f"/sessions/{sid}/belief", params={"top": 2})
        body = response.json()
        assert len(body["posterior"]) == 2
        assert body["posterior_truncated"] is True

    def test_reads_do_not_mutate(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 10)
        sid = session["session_id"]
        first = client.get(f"/sessions/{sid}/belief").json()
        second = client.get(f"/sessions/{sid}/belief").json()
        assert first == second

    def test_decisions_after_full_script(self, client, circuit_doc, scenario2_path):
        scenario = json.loads(open(scenario2_path).read())
        session = make_session(client, circuit_doc, scenario["t0"])
        sid = session["session_id"]
        for event in scenario["events"]:
            response = client.post(f"/sessions/{sid}/events", json=event)
            assert response.status_code == 200
        decisions = client.get(f"/sessions/{sid}/decisions").json()
        assert decisions["head"]["actions"] == {"A": "fix", "O": "dont", "X": "fix"}
        assert decisions["head"]["expected_cost"] == pytest.approx(7.7743, abs=5e-5)
        assert decisions["factored"]["actions"] == decisions["head"]["actions"]

    def test_decisions_fresh_session_below_break_even(self, client, circuit_doc):
        # At 10h every prior sits under its fix/broken cost ratio, so the
        # cheapest composite decision is to touch nothing.
        session = make_session(client, circuit_doc, 10)
        decisions = client.get(f"/sessions/{session['session_id']}/decisions").json()
        assert set(decisions["head"]["actions"].values()) == {"dont"}
        assert decisions["factored"]["actions"] == decisions["head"]["actions"]

    def test_decisions_quiet_reading(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 10)
        sid = session["session_id"]
        client.post(f"/sessions/{sid}/events", json=observe_event(10, NOMINAL_READING))
        decisions = client.get(f"/sessions/{sid}/decisions").json()
        assert decisions["head"]["actions"] == {"A": "dont", "O": "dont", "X": "dont"}
        assert decisions["head"]["expected_cost"] == pytest.approx(0.0855, abs=5e-5)

    def test_refold_matches_cached_belief(self, client, circuit_doc, scenario2_path):
        scenario = json.loads(open(scenario2_path).read())
        session = make_session(client, circuit_doc, scenario["t0"])
        sid = session["session_id"]
        for event in scenario["events"]:
            client.post(f"/sessions/{sid}/events", json=event)
        log = client.get(f"/sessions/{sid}").json()["events"]
        model = parse_model(circuit_doc)
        refolded = run_events(model, scenario["t0"], [parse_event(e) for e in log])[-1][1]
        served = client.get(f"/sessions/{sid}/belief", params={"top": 8}).json()
        by_modes = {tuple(sorted(row["modes"].items())): row["probability"] for row in served["posterior"]}
        for cand, weight in zip(model.candidates, refolded.weights):
            key = tuple(sorted(cand.as_dict(model).items()))
            assert by_modes[key] == pytest.approx(float(weight), abs=1e-12)


class TestWhatIf:
    def test_future_reading_flags_preventive_fix(self, client, circuit_doc):
        # Session sitting at 10h with no readings yet; ask what the same
        # quiet reading would mean if it only arrived at 90h.
        session = make_session(client, circuit_doc, 10)
        sid = session["session_id"]
        before = client.get(f"/sessions/{sid}/decisions").json()
        response = client.post(
            f"/sessions/{sid}/whatif",
            json={"events": [observe_event(90, NOMINAL_READING)]},
        )
        assert response.status_code == 200
        body = response.json()
        hyp = body["hypothetical"]
        assert hyp["decisions"]["head"]["actions"] == {"A": "fix", "O": "fix", "X": "dont"}
        assert hyp["decisions"]["head"]["expected_cost"] == pytest.approx(5.0, abs=5e-5)
        assert hyp["posterior"][0]["probability"] == pytest.approx(0.6126, abs=5e-5)
        # Committed state untouched.
        assert body["committed"]["time"] == 10
        after = client.get(f"/sessions/{sid}/decisions").json()
        assert after == before
        assert client.get(f"/sessions/{sid}").json()["events"] == []

    def test_empty_hypothetical_echoes_current(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 10)
        sid = session["session_id"]
        body = client.post(f"/sessions/{sid}/whatif", json={"events": []}).json()
        assert body["hypothetical"]["time"] == body["committed"]["time"] == 10
        assert body["hypothetical"]["posterior"] == body["committed"]["posterior"]

    def test_repair_all_zeroes_do_nothing_cost(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 50)
        sid = session["session_id"]
        body = client.post(
            f"/sessions/{sid}/whatif",
            json={"events": [{"type": "repair", "time": 50, "components": ["A", "O", "X"]}]},
        ).json()
        ranked = body["hypothetical"]["decisions"]["ranked"]
        do_nothing = next(
            r for r in ranked if set(r["actions"].values()) == {"dont"}
        )
        assert do_nothing["expected_cost"] == 0.0

    def test_advance_only_what_if(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 10)
        sid = session["session_id"]
        body = client.post(f"/sessions/{sid}/whatif", json={"advance_to": 90}).json()
        assert body["hypothetical"]["time"] == 90
        assert p_broken(body["hypothetical"], "A") == pytest.approx(0.5934, abs=5e-5)

    def test_bad_hypothetical_does_not_mutate(self, client, circuit_doc):
        session = make_session(client, circuit_doc, 10)
        sid = session["session_id"]
        response = client.post(
            f"/sessions/{sid}/whatif",
            json={"events": [observe_event(5, NOMINAL_READING)]},
        )
        assert response.status_code == 409
        assert client.get(f"/sessions/{sid}").json()["events"] == []


class TestConcurrency:
    def test_concurrent_appends_serialize_to_a_refoldable_log(self, circuit_doc):
        from concurrent.futures import ThreadPoolExecutor

        client = TestClient(create_app())
        session = make_session(client, circuit_doc, 0)
        sid = session["session_id"]

        def fire(k):
            # Half quiet readings, half repairs, all at the same instant.
            if k % 2 == 0:
                return client.post(
                    f"/sessions/{sid}/events",
                    json=observe_event(10, NOMINAL_READING),
                ).status_code
            return client.post(
                f"/sessions/{sid}/events",
                json={"type": "repair", "time": 10, "components": ["O"]},
            ).status_code

        with ThreadPoolExecutor(max_workers=8) as pool:
            statuses = list(pool.map(fire, range(16)))
        assert all(s == 200 for s in statuses)

        log = client.get(f"/sessions/{sid}").json()["events"]
        assert len(log) == 16
        assert [e["time"] for e in log] == sorted(e["time"] for e in log)
        model = parse_model(circuit_doc)
        refolded = run_events(model, 0, [parse_event(e) for e in log])[-1][1]
        served = client.get(f"/sessions/{sid}/belief", params={"top": 8}).json()
        by_modes = {
            tuple(sorted(row["modes"].items())): row["probability"]
            for row in served["posterior"]
        }
        for cand, weight in zip(model.candidates, refolded.weights):
            key = tuple(sorted(cand.as_dict(model).items()))
            assert by_modes[key] == pytest.approx(float(weight), abs=1e-12)


class TestJournal:
    def test_sessions_survive_restart(self, tmp_path, circuit_doc):
        first = TestClient(create_app(state_dir=tmp_path))
        session = make_session(first, circuit_doc, 0)
        sid = session["session_id"]
        first.post(f"/sessions/{sid}/events", json=observe_event(20, ANOMALY_READING))
        before = first.get(f"/sessions/{sid}/belief").json()

        second = TestClient(create_app(state_dir=tmp_path))
        after = second.get(f"/sessions/{sid}/belief").json()
        assert after["posterior"] == before["posterior"]
        assert after["time"] == 20

    def test_rejected_events_go_to_side_journal(self, tmp_path, circuit_doc):
        client = TestClient(create_app(state_dir=tmp_path))
        session = make_session(client, circuit_doc, 0)
        sid = session["session_id"]
        client.post(
            f"/sessions/{sid}/events",
            json=observe_event(10, {"I1": 0, "I2": 0, "I3": 0, "I4": 1}),
        )
        rejected = (tmp_path / "rejected.jsonl").read_text().splitlines()
        assert len(rejected) == 1
        assert json.loads(rejected[0])["session_id"] == sid
        # The rejected event must not reappear on restart.
        fresh = TestClient(create_app(state_dir=tmp_path))
        assert fresh.get(f"/sessions/{sid}").json()["events"] == []
