"""Declarative system description and the structural operations over it.

A model is a set of variables wired together by components.  Every
component has one deterministic behavior table per health mode (ok or
broken), reads some variables and drives exactly one internal variable.
Diagnosis treats the vector of component modes as hidden state; this module
supplies everything that is purely structural: validation, forward
simulation under a given mode assignment, 0/1 observation likelihoods, and
candidate enumeration.

Models load from JSON documents.  Parsing is strict: unknown keys are
rejected so that typos fail loudly instead of silently changing behavior.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Mapping

from .decision import CostTable
from .errors import (
    IncompleteInputError,
    InvalidComponentError,
    InvalidParameterError,
    ModelFormatError,
    ModelTooLargeError,
)
from .reliability import ConstantRate, HazardModel, Weibull, rate_from_mtbf

OK = "ok"
BROKEN = "broken"
MODES = (OK, BROKEN)

INPUT = "input"
INTERNAL = "internal"

DEFAULT_CANDIDATE_CAP = 1 << 20
CAP_ENV_VAR = "RELIDIAG_MAX_CANDIDATES"


def candidate_cap() -> int:
    """Enumeration cap: default 2^20 joint states, overridable by env var."""
    raw = os.environ.get(CAP_ENV_VAR)
    if raw is None:
        return DEFAULT_CANDIDATE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise InvalidParameterError(f"{CAP_ENV_VAR} must be an integer, got {raw!r}")
    if cap < 1:
        raise InvalidParameterError(f"{CAP_ENV_VAR} must be >= 1, got {cap}")
    return cap


@dataclass(frozen=True)
class Variable:
    name: str
    domain: tuple
    kind: str  # INPUT or INTERNAL


_UNARY_GATES = {
    "NOT": lambda v: 1 - v,
    "BUFFER": lambda v: v,
}

_NARY_GATES = {
    "AND": lambda vals: int(all(vals)),
    "OR": lambda vals: int(any(vals)),
    "XOR": lambda vals: sum(vals) % 2,
    "NAND": lambda vals: int(not all(vals)),
    "NOR": lambda vals: int(not any(vals)),
}

_STUCK_PREFIX = "STUCK_AT_"


@dataclass(frozen=True)
class Behavior:
    """Deterministic input-to-output law for one mode of one component.

    Either a named builtin gate (binary domains), a stuck-at constant, or
    an explicit truth table over arbitrary finite domains.
    """

    name: str
    rows: tuple[tuple[tuple, Any], ...] | None = None
    stuck_value: Any = None

    @classmethod
    def builtin(cls, name: str) -> "Behavior":
        if name not in _UNARY_GATES and name not in _NARY_GATES:
            raise InvalidParameterError(f"unknown builtin behavior {name!r}")
        return cls(name=name)

    @classmethod
    def stuck_at(cls, value) -> "Behavior":
        return cls(name=f"{_STUCK_PREFIX}{value}", stuck_value=value)

    @classmethod
    def table(cls, rows) -> "Behavior":
        if isinstance(rows, Mapping):
            items = tuple((tuple(k), v) for k, v in rows.items())
        else:
            items = tuple((tuple(ins), out) for ins, out in rows)
        return cls(name="table", rows=items)

    @cached_property
    def _lookup(self) -> dict[tuple, Any] | None:
        if self.rows is None:
            return None
        return dict(self.rows)

    def output(self, inputs: tuple):
        if self.name == "table":
            try:
                return self._lookup[tuple(inputs)]
            except KeyError:
                raise InvalidParameterError(
                    f"behavior table has no row for inputs {tuple(inputs)!r}"
                )
        if self.name.startswith(_STUCK_PREFIX):
            return self.stuck_value
        if self.name in _UNARY_GATES:
            if len(inputs) != 1:
                raise InvalidParameterError(
                    f"{self.name} takes exactly 1 input, got {len(inputs)}"
                )
            return _UNARY_GATES[self.name](inputs[0])
        if len(inputs) < 1:
            raise InvalidParameterError(f"{self.name} needs at least one input")
        return _NARY_GATES[self.name](inputs)

    def violations(self, owner: str, mode: str, input_domains, output_domain) -> list[str]:
        """Totality and domain checks, reported as strings."""
        where = f"component {owner}, mode {mode}"
        out: list[str] = []
        if self.name == "table":
            combos = list(itertools.product(*input_domains))
            lookup = self._lookup
            for combo in combos:
                if combo not in lookup:
                    out.append(f"{where}: behavior table missing row for inputs {combo!r}")
            known = set(combos)
            for key in lookup:
                if key not in known:
                    out.append(f"{where}: behavior table row {key!r} outside input domains")
                elif lookup[key] not in output_domain:
                    out.append(
                        f"{where}: behavior output {lookup[key]!r} for {key!r} "
                        f"not in output domain"
                    )
            return out
        if self.name.startswith(_STUCK_PREFIX):
            if self.stuck_value not in output_domain:
                out.append(f"{where}: stuck value {self.stuck_value!r} not in output domain")
            return out
        # Builtin gates are defined over binary 0/1 values only.
        if self.name in _UNARY_GATES and len(input_domains) != 1:
            out.append(f"{where}: {self.name} takes exactly 1 input, has {len(input_domains)}")
        if self.name in _NARY_GATES and len(input_domains) < 1:
            out.append(f"{where}: {self.name} needs at least one input")
        for i, dom in enumerate(input_domains):
            if set(dom) != {0, 1}:
                out.append(f"{where}: builtin {self.name} needs binary input domains, "
                           f"input {i} has domain {tuple(dom)!r}")
        if not {0, 1} <= set(output_domain):
            out.append(f"{where}: builtin {self.name} needs 0 and 1 in the output domain")
        return out


@dataclass(frozen=True)
class InvalidHazard:
    """Placeholder kept when a document's hazard parameters are rejected.

    Lets validation report the problem instead of the loader crashing.
    """

    reason: str

    def cumulative_hazard(self, t: float) -> float:
        raise InvalidParameterError(self.reason)

    @property
    def mtbf(self) -> float:
        raise InvalidParameterError(self.reason)


@dataclass(frozen=True)
class ComponentSpec:
    id: str
    hazard: HazardModel | InvalidHazard
    behavior: Mapping[str, Behavior]  # keyed by mode, exactly ok and broken
    inputs: tuple[str, ...]
    output: str
    cost: CostTable


@dataclass(frozen=True)
class Candidate:
    """One mode per component, aligned with the model's declaration order."""

    modes: tuple[str, ...]

    @classmethod
    def all_ok(cls, model: "SystemModel") -> "Candidate":
        return cls((OK,) * len(model.components))

    @classmethod
    def from_modes(cls, model: "SystemModel", by_component: Mapping[str, str]) -> "Candidate":
        ids = [c.id for c in model.components]
        unknown = sorted(set(by_component) - set(ids))
        if unknown:
            raise InvalidComponentError(f"unknown component(s): {', '.join(unknown)}")
        missing = [i for i in ids if i not in by_component]
        if missing:
            raise InvalidParameterError(f"candidate missing component(s): {', '.join(missing)}")
        return cls(tuple(by_component[i] for i in ids))

    def as_dict(self, model: "SystemModel") -> dict[str, str]:
        return {c.id: m for c, m in zip(model.components, self.modes)}


@dataclass(frozen=True)
class Observation:
    """Time-tagged variable/value pairs read off the running system."""

    time: float
    assignments: Mapping[str, Any]


@dataclass(frozen=True)
class SystemModel:
    variables: tuple[Variable, ...]
    components: tuple[ComponentSpec, ...]
    commissioning_time: float = 0.0

    @cached_property
    def variables_by_name(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    @cached_property
    def component_index(self) -> dict[str, int]:
        return {c.id: i for i, c in enumerate(self.components)}

    @cached_property
    def input_variables(self) -> tuple[Variable, ...]:
        return tuple(v for v in self.variables if v.kind == INPUT)

    @cached_property
    def topo_order(self) -> tuple[ComponentSpec, ...]:
        """Components in evaluation order; raises if the wiring is cyclic."""
        order = _topological_order(self.components)
        if order is None:
            raise InvalidParameterError("component wiring contains a cycle")
        return order

    @cached_property
    def candidates(self) -> tuple[Candidate, ...]:
        return tuple(enumerate_candidates(self))

    def component(self, component_id: str) -> ComponentSpec:
        try:
            return self.components[self.component_index[component_id]]
        except KeyError:
            raise InvalidComponentError(f"unknown component {component_id!r}")


def _topological_order(components) -> tuple[ComponentSpec, ...] | None:
    produced = {c.output: c.id for c in components}
    deps = {
        c.id: sorted({produced[v] for v in c.inputs if v in produced})
        for c in components
    }
    done: set[str] = set()
    order: list[ComponentSpec] = []
    remaining = list(components)
    while remaining:
        ready = [c for c in remaining if all(d in done for d in deps[c.id])]
        if not ready:
            return None
        for c in ready:
            done.add(c.id)
            order.append(c)
        remaining = [c for c in remaining if c.id not in done]
    return tuple(order)


def validate_model(model: SystemModel) -> list[str]:
    """Structural validation. Returns violations; an empty list means valid.

    Violations are data, not errors, and come back in a deterministic order
    (check category first, declaration order within).
    """
    out: list[str] = []

    seen: set[str] = set()
    for v in model.variables:
        if v.name in seen:
            out.append(f"duplicate variable name {v.name!r}")
        seen.add(v.name)
        if len(v.domain) == 0:
            out.append(f"variable {v.name}: empty domain")
        if v.kind not in (INPUT, INTERNAL):
            out.append(f"variable {v.name}: unknown kind {v.kind!r}")

    seen_ids: set[str] = set()
    for c in model.components:
        if c.id in seen_ids:
            out.append(f"duplicate component id {c.id!r}")
        seen_ids.add(c.id)

    names = {v.name for v in model.variables}
    for c in model.components:
        for v in c.inputs:
            if v not in names:
                out.append(f"component {c.id}: unknown input variable {v!r}")
        if c.output not in names:
            out.append(f"component {c.id}: unknown output variable {c.output!r}")
        elif model.variables_by_name[c.output].kind == INPUT:
            out.append(f"component {c.id}: drives input-kind variable {c.output!r}")

    drivers: dict[str, list[str]] = {}
    for c in model.components:
        drivers.setdefault(c.output, []).append(c.id)
    for v in model.variables:
        who = drivers.get(v.name, [])
        if v.kind == INTERNAL and len(who) == 0:
            out.append(f"variable {v.name}: internal but driven by no component")
        if len(who) > 1:
            out.append(f"variable {v.name}: driven by multiple components {', '.join(who)}")

    if _topological_order(model.components) is None:
        cyclic = sorted(_cycle_members(model.components))
        out.append(f"cycle through component(s): {', '.join(cyclic)}")

    for c in model.components:
        modes = set(c.behavior)
        if modes != set(MODES):
            out.append(
                f"component {c.id}: behavior must cover modes ok and broken, has "
                f"{sorted(modes)}"
            )
            continue
        if any(v not in names for v in c.inputs) or c.output not in names:
            continue  # reference errors already reported
        input_domains = [model.variables_by_name[v].domain for v in c.inputs]
        output_domain = model.variables_by_name[c.output].domain
        for mode in MODES:
            out.extend(c.behavior[mode].violations(c.id, mode, input_domains, output_domain))

    for c in model.components:
        if isinstance(c.hazard, InvalidHazard):
            out.append(f"component {c.id}: {c.hazard.reason}")
        out.extend(c.cost.violations(c.id))

    if not (isinstance(model.commissioning_time, (int, float))
            and math.isfinite(model.commissioning_time)
            and model.commissioning_time >= 0):
        out.append(f"commissioning_time must be finite and >= 0, got "
                   f"{model.commissioning_time!r}")

    return out


def _cycle_members(components) -> set[str]:
    produced = {c.output: c.id for c in components}
    deps = {c.id: {produced[v] for v in c.inputs if v in produced} for c in components}
    done: set[str] = set()
    changed = True
    while changed:
        changed = False
        for cid, d in deps.items():
            if cid not in done and d <= done:
                done.add(cid)
                changed = True
    return set(deps) - done


def simulate(model: SystemModel, candidate: Candidate, inputs: Mapping[str, Any]) -> dict[str, Any]:
    """Evaluate every variable under one mode assignment and given inputs.

    Forward pass in topological order; deterministic and total for valid
    models.
    """
    if len(candidate.modes) != len(model.components):
        raise InvalidParameterError(
            f"candidate covers {len(candidate.modes)} components, model has "
            f"{len(model.components)}"
        )
    input_names = {v.name for v in model.input_variables}
    missing = [v.name for v in model.input_variables if v.name not in inputs]
    if missing:
        raise IncompleteInputError(f"missing input variable(s): {', '.join(missing)}")
    extra = sorted(set(inputs) - input_names)
    if extra:
        raise InvalidParameterError(f"not input variable(s): {', '.join(extra)}")
    values: dict[str, Any] = {}
    for name in inputs:
        var = model.variables_by_name[name]
        if inputs[name] not in var.domain:
            raise InvalidParameterError(
                f"value {inputs[name]!r} not in domain of variable {name}"
            )
        values[name] = inputs[name]
    for comp in model.topo_order:
        mode = candidate.modes[model.component_index[comp.id]]
        behavior = comp.behavior.get(mode)
        if behavior is None:
            raise InvalidParameterError(f"component {comp.id} has no behavior for mode {mode!r}")
        ins = tuple(values[v] for v in comp.inputs)
        values[comp.output] = behavior.output(ins)
    return values


def likelihood(model: SystemModel, candidate: Candidate, obs: Observation) -> float:
    """1.0 if the candidate reproduces every observed value, else 0.0."""
    validate_observation(model, obs)
    input_names = {v.name for v in model.input_variables}
    sim = simulate(model, candidate, {k: v for k, v in obs.assignments.items() if k in input_names})
    for name, value in obs.assignments.items():
        if sim[name] != value:
            return 0.0
    return 1.0


def validate_observation(model: SystemModel, obs: Observation) -> None:
    if not (isinstance(obs.time, (int, float)) and math.isfinite(obs.time) and obs.time >= 0):
        raise InvalidParameterError(f"observation time must be finite and >= 0, got {obs.time!r}")
    unknown = sorted(set(obs.assignments) - set(model.variables_by_name))
    if unknown:
        raise InvalidParameterError(f"observation of unknown variable(s): {', '.join(unknown)}")
    for name, value in obs.assignments.items():
        if value not in model.variables_by_name[name].domain:
            raise InvalidParameterError(
                f"observed value {value!r} not in domain of variable {name}"
            )
    missing = [v.name for v in model.input_variables if v.name not in obs.assignments]
    if missing:
        raise IncompleteInputError(
            f"observation must assign every input variable; missing: {', '.join(missing)}"
        )


def enumerate_candidates(model: SystemModel, cap: int | None = None) -> list[Candidate]:
    """All mode assignments in binary counting order, all-ok first.

    The last declared component varies fastest, with ok before broken.
    """
    if cap is None:
        cap = candidate_cap()
    n = len(model.components)
    count = 2**n
    if count > cap:
        raise ModelTooLargeError(
            f"{count} candidates for {n} components exceeds enumeration cap {cap}"
        )
    return [Candidate(modes) for modes in itertools.product(MODES, repeat=n)]


# ---------------------------------------------------------------------------
# JSON model documents


def _check_keys(obj: Mapping, where: str, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(obj, Mapping):
        raise ModelFormatError(f"{where}: expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - required - set(optional))
    if unknown:
        raise ModelFormatError(f"{where}: unknown key(s): {', '.join(unknown)}")
    missing = sorted(required - set(obj))
    if missing:
        raise ModelFormatError(f"{where}: missing key(s): {', '.join(missing)}")


def _parse_domain(raw, where: str) -> tuple:
    if not isinstance(raw, list):
        raise ModelFormatError(f"{where}: domain must be a list")
    for v in raw:
        if not isinstance(v, (int, str, bool)):
            raise ModelFormatError(f"{where}: domain values must be ints or strings, got {v!r}")
    return tuple(raw)


def _parse_behavior(raw, where: str) -> Behavior:
    if isinstance(raw, str):
        if raw.startswith(_STUCK_PREFIX):
            tail = raw[len(_STUCK_PREFIX):]
            try:
                value: Any = int(tail)
            except ValueError:
                value = tail
            return Behavior.stuck_at(value)
        try:
            return Behavior.builtin(raw)
        except InvalidParameterError as exc:
            raise ModelFormatError(f"{where}: {exc}")
    if isinstance(raw, Mapping):
        _check_keys(raw, where, {"table"})
        rows = raw["table"]
        if not isinstance(rows, list):
            raise ModelFormatError(f"{where}: table must be a list of [inputs, output] pairs")
        parsed = []
        for row in rows:
            if not (isinstance(row, list) and len(row) == 2 and isinstance(row[0], list)):
                raise ModelFormatError(f"{where}: table rows are [inputs, output] pairs, got {row!r}")
            parsed.append((tuple(row[0]), row[1]))
        return Behavior.table(parsed)
    raise ModelFormatError(f"{where}: behavior must be a builtin name or a table object")


def _parse_hazard(raw_component: Mapping, where: str) -> HazardModel | InvalidHazard:
    has_mtbf = "mtbf_hours" in raw_component
    has_hazard = "hazard" in raw_component
    if has_mtbf == has_hazard:
        raise ModelFormatError(f"{where}: exactly one of mtbf_hours or hazard is required")
    try:
        if has_mtbf:
            return ConstantRate(rate_from_mtbf(raw_component["mtbf_hours"]))
        spec = raw_component["hazard"]
        _check_keys(spec, f"{where}.hazard", {"type", "params"})
        params = spec["params"]
        if spec["type"] == "constant_rate":
            _check_keys(params, f"{where}.hazard.params", {"rate"})
            return ConstantRate(params["rate"])
        if spec["type"] == "weibull":
            _check_keys(params, f"{where}.hazard.params", {"shape", "scale"})
            return Weibull(shape=params["shape"], scale=params["scale"])
        raise ModelFormatError(f"{where}.hazard: unknown type {spec['type']!r}")
    except InvalidParameterError as exc:
        return InvalidHazard(reason=str(exc))


def parse_model(doc: Mapping) -> SystemModel:
    """Build a SystemModel from a parsed JSON document. Strict keys."""
    _check_keys(doc, "model", {"variables", "components"}, {"commissioning_time"})
    if not isinstance(doc["variables"], list) or not isinstance(doc["components"], list):
        raise ModelFormatError("model: variables and components must be lists")

    variables = []
    for i, raw in enumerate(doc["variables"]):
        where = f"variables[{i}]"
        _check_keys(raw, where, {"name", "domain", "kind"})
        variables.append(
            Variable(name=raw["name"], domain=_parse_domain(raw["domain"], where), kind=raw["kind"])
        )

    components = []
    for i, raw in enumerate(doc["components"]):
        where = f"components[{i}]"
        _check_keys(
            raw,
            where,
            {"id", "behavior", "inputs", "output", "costs"},
            {"mtbf_hours", "hazard"},
        )
        _check_keys(raw["behavior"], f"{where}.behavior", {"ok", "broken"})
        _check_keys(raw["costs"], f"{where}.costs", {"fix_cost", "broken_unrepaired_cost"})
        if not isinstance(raw["inputs"], list):
            raise ModelFormatError(f"{where}: inputs must be a list of variable names")
        components.append(
            ComponentSpec(
                id=raw["id"],
                hazard=_parse_hazard(raw, where),
                behavior={
                    OK: _parse_behavior(raw["behavior"]["ok"], f"{where}.behavior.ok"),
                    BROKEN: _parse_behavior(raw["behavior"]["broken"], f"{where}.behavior.broken"),
                },
                inputs=tuple(raw["inputs"]),
                output=raw["output"],
                cost=CostTable(
                    fix_cost=raw["costs"]["fix_cost"],
                    broken_unrepaired_cost=raw["costs"]["broken_unrepaired_cost"],
                ),
            )
        )

    commissioning = doc.get("commissioning_time", 0.0)
    if not isinstance(commissioning, (int, float)):
        raise ModelFormatError("model: commissioning_time must be a number")
    return SystemModel(
        variables=tuple(variables),
        components=tuple(components),
        commissioning_time=float(commissioning),
    )


def load_model(path: str | Path) -> SystemModel:
    """Read and parse a model file. I/O errors propagate as OSError."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON: {exc}")
    return parse_model(doc)
