#!/usr/bin/env python3
"""Record real service responses as contract-test fixtures.

Walks the two reference sessions through the API and freezes every
response the workbench renders. Rerun after any API payload change:

    python3 frontend/tools/record_fixtures.py
"""

import json
from importlib.resources import files
from pathlib import Path

from fastapi.testclient import TestClient

from relidiag.service import create_app

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

QUIET = {"I1": 1, "I2": 1, "I3": 0, "I6": 0}
ANOMALY = {"I1": 0, "I2": 0, "I3": 0, "I6": 1}
POST_REPAIR = {"I1": 0, "I2": 0, "I3": 0, "I6": 0}


def observe(time, assignments):
    return {"type": "observe", "time": time, "assignments": assignments}


def save(name, payload):
    path = FIXTURES / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2) + "\n")
    print(f"wrote {path.relative_to(FIXTURES.parent.parent)}")


def main():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    model = json.loads((files("relidiag") / "examples" / "paper_circuit.json").read_text())
    client = TestClient(create_app())

    # Session one: quiet system at 10h, what-if the same reading at 90h.
    created = client.post("/sessions", json={"model": model, "t0": 10}).json()
    sid = created["session_id"]
    save("s1_create", created)
    save("s1_session", client.get(f"/sessions/{sid}").json())
    save("s1_decisions_initial", client.get(f"/sessions/{sid}/decisions").json())
    save(
        "s1_whatif_t90",
        client.post(f"/sessions/{sid}/whatif", json={"events": [observe(90, QUIET)]}).json(),
    )
    save("s1_decisions_after_whatif", client.get(f"/sessions/{sid}/decisions").json())
    save(
        "s1_event_obs10",
        client.post(f"/sessions/{sid}/events", json=observe(10, QUIET)).json(),
    )
    save("s1_decisions_after_obs", client.get(f"/sessions/{sid}/decisions").json())

    # Session two: anomaly at 20h, replace the xor, anomaly again at 40h.
    created = client.post("/sessions", json={"model": model, "t0": 0}).json()
    sid = created["session_id"]
    save("s2_create", created)
    save(
        "s2_event_obs20",
        client.post(f"/sessions/{sid}/events", json=observe(20, ANOMALY)).json(),
    )
    save("s2_decisions_t20", client.get(f"/sessions/{sid}/decisions").json())
    save(
        "s2_event_repair",
        client.post(
            f"/sessions/{sid}/events",
            json={"type": "repair", "time": 20, "components": ["X"]},
        ).json(),
    )
    save(
        "s2_event_obs20b",
        client.post(f"/sessions/{sid}/events", json=observe(20, POST_REPAIR)).json(),
    )
    save(
        "s2_event_obs40",
        client.post(f"/sessions/{sid}/events", json=observe(40, ANOMALY)).json(),
    )
    save("s2_decisions_final", client.get(f"/sessions/{sid}/decisions").json())
    save("s2_session_final", client.get(f"/sessions/{sid}").json())


if __name__ == "__main__":
    main()
