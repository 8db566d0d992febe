"""Expected-cost evaluation and ranking of composite repair decisions.

Each component gets a fix / dont-fix choice; a composite decision is one
choice per component.  The system repair cost is the sum of per-component
costs, so the expected cost of a decision under a belief decomposes into
per-component terms over the mode marginals.  Both forms are implemented:
the candidate sum is the definition, the marginal form is the fast path
used for ranking, and tests hold them to agree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .errors import InvalidComponentError, InvalidDecisionError, ModelTooLargeError

FIX = "fix"
DONT_FIX = "dont"
ACTIONS = (DONT_FIX, FIX)


@dataclass(frozen=True)
class CostTable:
    """Repair costs for one component.

    fix_cost covers replacement regardless of actual mode (downtime plus a
    new unit); broken_unrepaired_cost is the price of leaving a broken unit
    in place over the model's cost horizon.  Leaving an ok unit alone is
    free by convention.
    """

    fix_cost: float
    broken_unrepaired_cost: float

    def cost(self, mode: str, action: str) -> float:
        if action == FIX:
            return self.fix_cost
        return self.broken_unrepaired_cost if mode == "broken" else 0.0

    def violations(self, owner: str) -> list[str]:
        out = []
        for name, v in (
            ("fix_cost", self.fix_cost),
            ("broken_unrepaired_cost", self.broken_unrepaired_cost),
        ):
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                out.append(f"component {owner}: {name} must be finite and >= 0, got {v!r}")
        return out


@dataclass(frozen=True)
class CompositeDecision:
    """One repair action per component, aligned with declaration order."""

    actions: tuple[str, ...]

    @classmethod
    def from_actions(cls, model, by_component: dict[str, str]) -> "CompositeDecision":
        ids = [c.id for c in model.components]
        unknown = sorted(set(by_component) - set(ids))
        if unknown:
            raise InvalidComponentError(f"unknown component(s): {', '.join(unknown)}")
        missing = [i for i in ids if i not in by_component]
        if missing:
            raise InvalidDecisionError(f"decision missing component(s): {', '.join(missing)}")
        return cls(tuple(by_component[i] for i in ids))

    def as_dict(self, model) -> dict[str, str]:
        return {c.id: a for c, a in zip(model.components, self.actions)}


@dataclass(frozen=True)
class DecisionEvaluation:
    decision: CompositeDecision
    expected_cost: float


def _check_decision(model, decision: CompositeDecision) -> None:
    if len(decision.actions) != len(model.components):
        raise InvalidDecisionError(
            f"decision covers {len(decision.actions)} components, model has {len(model.components)}"
        )
    bad = sorted({a for a in decision.actions if a not in ACTIONS})
    if bad:
        raise InvalidDecisionError(f"unknown action(s): {', '.join(map(repr, bad))}")


def expected_cost(belief, model, decision: CompositeDecision) -> float:
    """Expected total repair cost of a composite decision under a belief.

    Computed as the sum over candidates of posterior weight times the summed
    per-component cost. Equals the marginal decomposition used by
    rank_decisions up to floating point.
    """
    _check_decision(model, decision)
    costs = [c.cost for c in model.components]
    total = 0.0
    for weight, candidate in zip(belief.weights, model.candidates):
        if weight == 0.0:
            continue
        loss = 0.0
        for table, mode, action in zip(costs, candidate.modes, decision.actions):
            loss += table.cost(mode, action)
        total += float(weight) * loss
    return total


def _cost_from_marginals(p_broken: list[float], components, actions) -> float:
    total = 0.0
    for p, comp, action in zip(p_broken, components, actions):
        if action == FIX:
            total += comp.cost.fix_cost
        else:
            total += p * comp.cost.broken_unrepaired_cost
    return total


def rank_decisions(belief, model, cap: int | None = None) -> list[DecisionEvaluation]:
    """Evaluate every composite decision, cheapest first.

    Ties keep the enumeration order: dont-fix before fix, components in
    declaration order (so the all-dont-fix pattern sorts first among equals).
    """
    n = len(model.components)
    if cap is None:
        from .model import candidate_cap

        cap = candidate_cap()
    count = 2**n
    if count > cap:
        raise ModelTooLargeError(
            f"{count} composite decisions for {n} components exceeds cap {cap}; "
            "use optimal_decision_factored instead"
        )
    p_broken = [belief.marginal(c.id)["broken"] for c in model.components]
    evaluations = [
        DecisionEvaluation(
            CompositeDecision(actions),
            _cost_from_marginals(p_broken, model.components, actions),
        )
        for actions in itertools.product(ACTIONS, repeat=n)
    ]
    return sorted(evaluations, key=lambda ev: ev.expected_cost)


def optimal_decision_factored(belief, model) -> DecisionEvaluation:
    """Least-expected-cost decision by independent per-component argmin.

    Cost additivity makes the componentwise choice globally optimal: fix
    exactly when fix_cost < P(broken) * broken_unrepaired_cost, with ties
    resolved toward dont-fix.
    """
    actions = []
    total = 0.0
    for comp in model.components:
        p = belief.marginal(comp.id)["broken"]
        cost_fix = comp.cost.fix_cost
        cost_dont = p * comp.cost.broken_unrepaired_cost
        if cost_fix < cost_dont:
            actions.append(FIX)
            total += cost_fix
        else:
            actions.append(DONT_FIX)
            total += cost_dont
    return DecisionEvaluation(CompositeDecision(tuple(actions)), total)
