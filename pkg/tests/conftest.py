from __future__ import annotations

from importlib.resources import files

import pytest

from relidiag.model import load_model


EXAMPLES = files("relidiag") / "examples"


@pytest.fixture(scope="session")
def circuit_path() -> str:
    return str(EXAMPLES / "paper_circuit.json")


@pytest.fixture(scope="session")
def circuit(circuit_path):
    return load_model(circuit_path)


@pytest.fixture(scope="session")
def scenario2_path() -> str:
    return str(EXAMPLES / "scenario2.json")


@pytest.fixture(scope="session")
def scenario1_t10_path() -> str:
    return str(EXAMPLES / "scenario1_t10.json")


@pytest.fixture(scope="session")
def scenario1_t90_path() -> str:
    return str(EXAMPLES / "scenario1_t90.json")


# Observations used throughout: the all-quiet reading and the anomaly.
NOMINAL_READING = {"I1": 1, "I2": 1, "I3": 0, "I6": 0}
ANOMALY_READING = {"I1": 0, "I2": 0, "I3": 0, "I6": 1}
