"""Slow reference implementations used to cross-check the engine.

Everything here favors plain loops over array code so the fast paths have
an independent yardstick: the joint transition is an explicit double sum
over candidate pairs, the event fold runs on python lists, and hazard math
is rewritten from the closed forms instead of calling the library
functions.  Also hosts the random model / event-script generators shared
by the property and acceptance suites.
"""

from __future__ import annotations

import math
import random

from relidiag.model import (
    BROKEN,
    INPUT,
    INTERNAL,
    OK,
    Behavior,
    Candidate,
    ComponentSpec,
    SystemModel,
    Variable,
    likelihood,
    simulate,
)
from relidiag.decision import CostTable
from relidiag.engine import Observe, Repair
from relidiag.model import Observation
from relidiag.reliability import ConstantRate, Weibull


def cumulative_hazard_ref(hazard, t: float) -> float:
    if isinstance(hazard, ConstantRate):
        return hazard.rate * t
    return (t / hazard.scale) ** hazard.shape


def fail_prob_ref(hazard, t1: float, t2: float) -> float:
    return 1.0 - math.exp(-(cumulative_hazard_ref(hazard, t2) - cumulative_hazard_ref(hazard, t1)))


def transition_prob_ref(hazard, mode_from: str, mode_to: str, t1: float, t2: float) -> float:
    if mode_from == BROKEN:
        return 1.0 if mode_to == BROKEN else 0.0
    p = fail_prob_ref(hazard, t1, t2)
    return p if mode_to == BROKEN else 1.0 - p


def naive_advance(model, weights, t1, t2, ages) -> list[float]:
    """Joint transition as the explicit double sum over candidate pairs."""
    cands = model.candidates
    out = []
    for c2 in cands:
        total = 0.0
        for w, c1 in zip(weights, cands):
            if w == 0.0:
                continue
            p = 1.0
            for i, comp in enumerate(model.components):
                p *= transition_prob_ref(
                    comp.hazard, c1.modes[i], c2.modes[i], t1 - ages[i], t2 - ages[i]
                )
            total += w * p
        out.append(total)
    return out


def naive_initial(model, t0) -> list[float]:
    """Candidate prior at t0 as a product over independent component priors."""
    c0 = model.commissioning_time
    priors = [fail_prob_ref(comp.hazard, 0.0, t0 - c0) for comp in model.components]
    out = []
    for cand in model.candidates:
        p = 1.0
        for mode, prior in zip(cand.modes, priors):
            p *= prior if mode == BROKEN else 1.0 - prior
        out.append(p)
    return out


def naive_condition(model, weights, obs) -> list[float]:
    scored = [w * likelihood(model, cand, obs) for w, cand in zip(weights, model.candidates)]
    total = sum(scored)
    assert total > 0.0, "oracle given an impossible observation"
    return [w / total for w in scored]


def naive_repair(model, weights, component_ids) -> list[float]:
    indices = [model.component_index[c] for c in component_ids]
    index_of = {cand: k for k, cand in enumerate(model.candidates)}
    out = [0.0] * len(weights)
    for w, cand in zip(weights, model.candidates):
        modes = list(cand.modes)
        for i in indices:
            modes[i] = OK
        out[index_of[Candidate(tuple(modes))]] += w
    return out


def naive_fold(model, t0, events):
    """Independent event fold; returns [(event|None, time, weights, ages)]."""
    weights = naive_initial(model, t0)
    ages = [model.commissioning_time] * len(model.components)
    t = t0
    steps = [(None, t, list(weights), list(ages))]
    for event in events:
        weights = naive_advance(model, weights, t, event.time, ages)
        t = event.time
        if isinstance(event, Observe):
            weights = naive_condition(model, weights, event.observation)
        else:
            weights = naive_repair(model, weights, event.components)
            for c in event.components:
                ages[model.component_index[c]] = t
        steps.append((event, t, list(weights), list(ages)))
    return steps


# ---------------------------------------------------------------------------
# Random instances


GATES_BY_ARITY = {
    1: ["NOT", "BUFFER"],
    2: ["AND", "OR", "XOR", "NAND", "NOR"],
    3: ["AND", "OR", "XOR", "NAND", "NOR"],
}


def random_hazard(rng: random.Random):
    if rng.random() < 0.5:
        return ConstantRate(rate=rng.uniform(1e-4, 0.05))
    return Weibull(shape=rng.uniform(0.5, 3.0), scale=rng.uniform(20.0, 2000.0))


def _random_table(rng: random.Random, arity: int) -> Behavior:
    rows = {}
    for combo in _binary_combos(arity):
        rows[combo] = rng.choice([0, 1])
    return Behavior.table(rows)


def _binary_combos(arity: int):
    combos = [()]
    for _ in range(arity):
        combos = [c + (v,) for c in combos for v in (0, 1)]
    return combos


def random_model(rng: random.Random, max_components: int = 4) -> SystemModel:
    """A random acyclic binary circuit with random hazards and costs."""
    n_inputs = rng.randint(1, 3)
    n_comps = rng.randint(1, max_components)
    variables = [Variable(name=f"in{i}", domain=(0, 1), kind=INPUT) for i in range(n_inputs)]
    available = [v.name for v in variables]
    components = []
    for k in range(n_comps):
        arity = rng.randint(1, min(3, len(available)))
        feeds = rng.sample(available, arity)
        if rng.random() < 0.25:
            ok = _random_table(rng, arity)
        elif arity == 1:
            ok = Behavior.builtin(rng.choice(GATES_BY_ARITY[1]))
        else:
            ok = Behavior.builtin(rng.choice(GATES_BY_ARITY[arity]))
        if rng.random() < 0.5:
            broken = Behavior.stuck_at(rng.choice([0, 1]))
        else:
            broken = _random_table(rng, arity)
        out_name = f"w{k}"
        variables.append(Variable(name=out_name, domain=(0, 1), kind=INTERNAL))
        components.append(
            ComponentSpec(
                id=f"c{k}",
                hazard=random_hazard(rng),
                behavior={OK: ok, BROKEN: broken},
                inputs=tuple(feeds),
                output=out_name,
                cost=CostTable(
                    fix_cost=rng.uniform(0.5, 5.0),
                    broken_unrepaired_cost=rng.uniform(1.0, 20.0),
                ),
            )
        )
        available.append(out_name)
    return SystemModel(variables=tuple(variables), components=tuple(components))


def random_script(rng: random.Random, model, t0: float, n_events: int):
    """A random event script guaranteed consistent with the model.

    Observations are generated by sampling a candidate from the running
    belief (tracked with the naive fold) and reading values off a forward
    simulation, so every observation has at least one live explanation.
    """
    weights = naive_initial(model, t0)
    ages = [model.commissioning_time] * len(model.components)
    t = t0
    events = []
    for _ in range(n_events):
        if rng.random() < 0.8:
            t += rng.uniform(0.1, 60.0)
        if rng.random() < 0.3:
            chosen = rng.sample([c.id for c in model.components], rng.randint(1, len(model.components)))
            weights = naive_advance(model, weights, _time_of(events, t0), t, ages)
            weights = naive_repair(model, weights, chosen)
            for c in chosen:
                ages[model.component_index[c]] = t
            events.append(Repair(time=t, components=frozenset(chosen)))
            continue
        weights = naive_advance(model, weights, _time_of(events, t0), t, ages)
        pick = rng.choices(range(len(weights)), weights=weights)[0]
        candidate = model.candidates[pick]
        inputs = {v.name: rng.choice(v.domain) for v in model.input_variables}
        sim = simulate(model, candidate, inputs)
        assignments = dict(inputs)
        internals = [v.name for v in model.variables if v.kind == INTERNAL]
        for name in internals:
            if rng.random() < 0.6:
                assignments[name] = sim[name]
        obs = Observation(time=t, assignments=assignments)
        weights = naive_condition(model, weights, obs)
        events.append(Observe(obs))
    return events


def _time_of(events, t0: float) -> float:
    return events[-1].time if events else t0
