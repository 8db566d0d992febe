"""Belief maintenance over time: advance, condition, repair.

The belief is the exact joint distribution over candidates (one weight per
mode assignment), stored densely.  Between observations each component's
mode evolves independently under its hazard law, so advancing the joint is
a sequence of 2x2 transition-matrix products, one along each component's
axis of the weight tensor.  Observations multiply in 0/1 likelihoods and
renormalize.  Repairs project mass onto ok along the replaced component's
axis and reset that unit's reference time.

All belief states are immutable values; every operation returns a new one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .errors import (
    DiagnosisError,
    EventError,
    InconsistentObservationError,
    InvalidComponentError,
    InvalidTimeError,
    ModelFormatError,
)
from .model import (
    BROKEN,
    OK,
    Observation,
    SystemModel,
    likelihood,
    parse_model,
    validate_observation,
)
from .reliability import transition_matrix


@dataclass(frozen=True)
class Observe:
    observation: Observation

    @property
    def time(self) -> float:
        return self.observation.time


@dataclass(frozen=True)
class Repair:
    """Replace the named components with new units at the given time."""

    time: float
    components: frozenset[str]


Event = Observe | Repair


@dataclass(frozen=True)
class BeliefState:
    """Joint distribution over candidates at one instant.

    weights is indexed in candidate enumeration order (all-ok first, last
    component fastest).  ages[i] is the commissioning or last-replacement
    time of component i's current physical unit; only non-constant hazards
    actually depend on it.
    """

    model: SystemModel
    time: float
    weights: np.ndarray
    ages: tuple[float, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @cached_property
    def _joint(self) -> np.ndarray:
        n = len(self.model.components)
        return self.weights.reshape((2,) * n)

    def marginal(self, component_id: str) -> dict[str, float]:
        """Distribution over {ok, broken} for one component."""
        i = self._index(component_id)
        n = len(self.model.components)
        axes = tuple(j for j in range(n) if j != i)
        pair = self._joint.sum(axis=axes) if axes else self._joint
        return {OK: float(pair[0]), BROKEN: float(pair[1])}

    def age_of(self, component_id: str) -> float:
        return self.ages[self._index(component_id)]

    def top_candidates(self, k: int | None = None):
        """Candidates by descending probability; ties keep enumeration order."""
        order = sorted(
            range(len(self.weights)), key=lambda i: (-float(self.weights[i]), i)
        )
        if k is not None:
            order = order[:k]
        cands = self.model.candidates
        return [(cands[i], float(self.weights[i])) for i in order]

    def _index(self, component_id: str) -> int:
        try:
            return self.model.component_index[component_id]
        except KeyError:
            raise InvalidComponentError(f"unknown component {component_id!r}")


def initial_belief(model: SystemModel, t0: float) -> BeliefState:
    """Belief for a system whose components were all new and certainly ok
    at commissioning, advanced to t0."""
    c0 = model.commissioning_time
    if not (isinstance(t0, (int, float)) and math.isfinite(t0)) or t0 < c0:
        raise InvalidTimeError(f"t0 must be >= commissioning time {c0}, got {t0!r}")
    weights = np.zeros(len(model.candidates))
    weights[0] = 1.0  # all-ok is first in enumeration order
    fresh = BeliefState(model=model, time=c0, weights=weights, ages=(c0,) * len(model.components))
    return advance(fresh, t0)


def advance(belief: BeliefState, t2: float) -> BeliefState:
    """Push the belief forward to t2 with no new evidence.

    Component failure processes are independent, so the joint transition
    factorizes: apply each component's 2x2 ok/broken matrix along its own
    axis of the weight tensor.  Ages are unchanged; the interval for each
    component is taken relative to its unit's reference time so that
    non-constant hazards see true unit age.
    """
    if not (isinstance(t2, (int, float)) and math.isfinite(t2)) or t2 < belief.time:
        raise InvalidTimeError(f"cannot advance from t={belief.time} back to t={t2!r}")
    if t2 == belief.time:
        return belief
    model = belief.model
    n = len(model.components)
    joint = belief.weights.reshape((2,) * n)
    for i, comp in enumerate(model.components):
        age = belief.ages[i]
        matrix = transition_matrix(comp.hazard, belief.time - age, t2 - age).as_array()
        joint = np.moveaxis(np.tensordot(joint, matrix, axes=([i], [0])), -1, i)
    return BeliefState(model=model, time=t2, weights=joint.reshape(-1), ages=belief.ages)


def assimilate(belief: BeliefState, obs: Observation) -> BeliefState:
    """Condition on an observation taken at the belief's current time."""
    if obs.time != belief.time:
        raise InvalidTimeError(
            f"observation at t={obs.time} against belief at t={belief.time}; advance first"
        )
    model = belief.model
    validate_observation(model, obs)
    like = np.array([likelihood(model, c, obs) for c in model.candidates])
    weights = belief.weights * like
    total = weights.sum()
    if total <= 0.0:
        pairs = ", ".join(f"{k}={obs.assignments[k]!r}" for k in sorted(obs.assignments))
        raise InconsistentObservationError(
            f"observation at t={obs.time} ({pairs}) is impossible under every candidate"
        )
    return BeliefState(model=model, time=belief.time, weights=weights / total, ages=belief.ages)


def repair(belief: BeliefState, components, t: float) -> BeliefState:
    """Replace components with new units known to be ok.

    Joint mass on broken moves to ok along each replaced component's axis;
    the unit's reference time resets to t.  Other components are untouched
    and the weights stay normalized.
    """
    if t != belief.time:
        raise InvalidTimeError(
            f"repair at t={t} against belief at t={belief.time}; advance first"
        )
    model = belief.model
    indices = sorted(belief._index(c) for c in set(components))
    n = len(model.components)
    joint = belief.weights.reshape((2,) * n).copy()
    for i in indices:
        ok_slice = (slice(None),) * i + (0,)
        broken_slice = (slice(None),) * i + (1,)
        joint[ok_slice] += joint[broken_slice]
        joint[broken_slice] = 0.0
    ages = tuple(t if i in set(indices) else a for i, a in enumerate(belief.ages))
    return BeliefState(model=model, time=t, weights=joint.reshape(-1), ages=ages)


def apply_event(belief: BeliefState, event: Event) -> BeliefState:
    """Advance to the event's time, then observe or repair."""
    advanced = advance(belief, event.time)
    if isinstance(event, Observe):
        return assimilate(advanced, event.observation)
    return repair(advanced, event.components, event.time)


def run_events(model: SystemModel, t0: float, events) -> list[tuple[Event | None, BeliefState]]:
    """Fold a time-ordered event script into a belief trajectory.

    The first entry carries no event and holds the initial belief at t0;
    each following entry pairs an event with the belief after applying it.
    Same-timestamp events apply in list order.  Errors are re-raised as
    EventError naming the offending index.
    """
    belief = initial_belief(model, t0)
    trajectory: list[tuple[Event | None, BeliefState]] = [(None, belief)]
    for index, event in enumerate(events):
        try:
            belief = apply_event(belief, event)
        except DiagnosisError as exc:
            raise EventError(index, exc) from exc
        trajectory.append((event, belief))
    return trajectory


def marginal(belief: BeliefState, component_id: str) -> dict[str, float]:
    """Axis sum of the joint for one component."""
    return belief.marginal(component_id)


# ---------------------------------------------------------------------------
# Scenario documents: a model plus a timed event script.


@dataclass(frozen=True)
class Scenario:
    model: SystemModel
    t0: float
    events: tuple[Event, ...]


def parse_event(doc: Mapping) -> Event:
    if not isinstance(doc, Mapping) or "type" not in doc:
        raise ModelFormatError(f"event: expected an object with a type, got {doc!r}")
    kind = doc["type"]
    if kind == "observe":
        unknown = sorted(set(doc) - {"type", "time", "assignments"})
        if unknown:
            raise ModelFormatError(f"observe event: unknown key(s): {', '.join(unknown)}")
        if "time" not in doc or "assignments" not in doc:
            raise ModelFormatError("observe event: time and assignments are required")
        if not isinstance(doc["assignments"], Mapping):
            raise ModelFormatError("observe event: assignments must be an object")
        return Observe(Observation(time=float(doc["time"]), assignments=dict(doc["assignments"])))
    if kind == "repair":
        unknown = sorted(set(doc) - {"type", "time", "components"})
        if unknown:
            raise ModelFormatError(f"repair event: unknown key(s): {', '.join(unknown)}")
        if "time" not in doc or "components" not in doc:
            raise ModelFormatError("repair event: time and components are required")
        if not isinstance(doc["components"], list):
            raise ModelFormatError("repair event: components must be a list of ids")
        return Repair(time=float(doc["time"]), components=frozenset(doc["components"]))
    raise ModelFormatError(f"event: unknown type {kind!r}")


def event_to_dict(event: Event) -> dict[str, Any]:
    if isinstance(event, Observe):
        return {
            "type": "observe",
            "time": event.time,
            "assignments": dict(event.observation.assignments),
        }
    return {"type": "repair", "time": event.time, "components": sorted(event.components)}


def parse_scenario(doc: Mapping, base_dir: str | Path | None = None) -> Scenario:
    """Build a Scenario from a parsed JSON document. Strict keys.

    The model may be inline (an object) or a path, resolved against
    base_dir when relative.
    """
    unknown = sorted(set(doc) - {"model", "t0", "events"})
    if unknown:
        raise ModelFormatError(f"scenario: unknown key(s): {', '.join(unknown)}")
    missing = sorted({"model", "t0", "events"} - set(doc))
    if missing:
        raise ModelFormatError(f"scenario: missing key(s): {', '.join(missing)}")
    raw_model = doc["model"]
    if isinstance(raw_model, str):
        path = Path(raw_model)
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        from .model import load_model

        model = load_model(path)
    elif isinstance(raw_model, Mapping):
        model = parse_model(raw_model)
    else:
        raise ModelFormatError("scenario: model must be a path or an inline object")
    if not isinstance(doc["events"], list):
        raise ModelFormatError("scenario: events must be a list")
    events = tuple(parse_event(e) for e in doc["events"])
    return Scenario(model=model, t0=float(doc["t0"]), events=events)


def load_scenario(path: str | Path) -> Scenario:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON: {exc}")
    return parse_scenario(doc, base_dir=Path(path).parent)
