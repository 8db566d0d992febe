"""Report bundles: the three tables a diagnosis produces, plus renderers.

A bundle snapshots one step: per-component failure probabilities with
uptime and MTBF (the gauges), the posterior over candidates sorted by
probability, and every composite decision sorted by expected cost.  Text
output rounds to 4 decimals with fixed ordering and deterministic
tie-breaks, so repeated runs are byte-identical; the JSON form keeps full
precision and round-trips back to the same text.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

from .decision import rank_decisions
from .engine import (
    BeliefState,
    Event,
    Observe,
    advance,
    apply_event,
    event_to_dict,
    initial_belief,
)
from .errors import DiagnosisError, EventError
from .model import SystemModel


@dataclass(frozen=True)
class PriorRow:
    component: str
    uptime: float
    mtbf: float
    p_broken: float


@dataclass(frozen=True)
class PosteriorRow:
    modes: dict[str, str]
    probability: float


@dataclass(frozen=True)
class DecisionRow:
    actions: dict[str, str]
    expected_cost: float


@dataclass(frozen=True)
class ReportBundle:
    time: float
    priors: tuple[PriorRow, ...]
    posterior: tuple[PosteriorRow, ...]
    decisions: tuple[DecisionRow, ...]


def bundle_from_beliefs(prior: BeliefState, posterior: BeliefState) -> ReportBundle:
    """Build the three tables from a pre-evidence and post-evidence belief.

    For a one-shot diagnosis the prior is the advanced-but-unconditioned
    belief; mid-session both may be the current belief, in which case the
    priors table doubles as the per-component gauge readout.
    """
    model = prior.model
    priors = tuple(
        PriorRow(
            component=comp.id,
            uptime=prior.time - prior.age_of(comp.id),
            mtbf=comp.hazard.mtbf,
            p_broken=prior.marginal(comp.id)["broken"],
        )
        for comp in model.components
    )
    rows = tuple(
        PosteriorRow(modes=cand.as_dict(model), probability=p)
        for cand, p in posterior.top_candidates()
    )
    decisions = tuple(
        DecisionRow(actions=ev.decision.as_dict(model), expected_cost=ev.expected_cost)
        for ev in rank_decisions(posterior, model)
    )
    return ReportBundle(time=posterior.time, priors=priors, posterior=rows, decisions=decisions)


def scenario_bundles(
    model: SystemModel, t0: float, events
) -> list[tuple[Event | None, ReportBundle]]:
    """One bundle per step of an event script: initial belief, then each event.

    Each event's priors table reflects the belief advanced to the event's
    time but not yet conditioned, matching how a one-shot diagnosis reports.
    """
    belief = initial_belief(model, t0)
    steps: list[tuple[Event | None, ReportBundle]] = [
        (None, bundle_from_beliefs(belief, belief))
    ]
    for index, event in enumerate(events):
        try:
            pre = advance(belief, event.time)
            belief = apply_event(pre, event)
        except DiagnosisError as exc:
            raise EventError(index, exc) from exc
        steps.append((event, bundle_from_beliefs(pre, belief)))
    return steps


# ---------------------------------------------------------------------------
# Rendering


def _fmt_hours(x: float) -> str:
    return f"{x:g}"


def _table(headers: list[str], rows: list[list[str]], numeric: set[int]) -> list[str]:
    widths = [
        max(len(headers[i]), *(len(r[i]) for r in rows)) if rows else len(headers[i])
        for i in range(len(headers))
    ]

    def cell(text: str, i: int) -> str:
        return text.rjust(widths[i]) if i in numeric else text.ljust(widths[i])

    lines = ["  ".join(cell(h, i) for i, h in enumerate(headers)).rstrip()]
    for r in rows:
        lines.append("  ".join(cell(c, i) for i, c in enumerate(r)).rstrip())
    return lines


def render_text(bundle: ReportBundle) -> str:
    component_ids = [row.component for row in bundle.priors]
    lines: list[str] = ["Failure priors"]
    lines += _table(
        ["component", "uptime", "MTBF", "P(broken)"],
        [
            [r.component, _fmt_hours(r.uptime), _fmt_hours(r.mtbf), f"{r.p_broken:.4f}"]
            for r in bundle.priors
        ],
        numeric={1, 2, 3},
    )
    lines.append("")
    lines.append("Posterior")
    lines += _table(
        component_ids + ["P"],
        [
            [r.modes[c] for c in component_ids] + [f"{r.probability:.4f}"]
            for r in bundle.posterior
        ],
        numeric={len(component_ids)},
    )
    lines.append("")
    lines.append("Expected cost")
    lines += _table(
        component_ids + ["cost"],
        [
            [r.actions[c] for c in component_ids] + [f"{r.expected_cost:.4f}"]
            for r in bundle.decisions
        ],
        numeric={len(component_ids)},
    )
    return "\n".join(lines) + "\n"


def describe_event(event: Event | None) -> str:
    if event is None:
        return "initial"
    if isinstance(event, Observe):
        return f"observe at t={_fmt_hours(event.time)}"
    return f"repair {' '.join(sorted(event.components))} at t={_fmt_hours(event.time)}"


def render_trajectory_text(steps) -> str:
    parts = []
    for index, (event, bundle) in enumerate(steps):
        if event is None:
            header = f"== initial belief at t={_fmt_hours(bundle.time)} =="
        else:
            header = f"== event {index}: {describe_event(event)} =="
        parts.append(header + "\n" + render_text(bundle))
    return "\n".join(parts)


def bundle_to_dict(bundle: ReportBundle) -> dict[str, Any]:
    return {
        "time": bundle.time,
        "priors": [
            {
                "component": r.component,
                "uptime": r.uptime,
                "mtbf": r.mtbf,
                "p_broken": r.p_broken,
            }
            for r in bundle.priors
        ],
        "posterior": [
            {"modes": dict(r.modes), "probability": r.probability} for r in bundle.posterior
        ],
        "decisions": [
            {"actions": dict(r.actions), "expected_cost": r.expected_cost}
            for r in bundle.decisions
        ],
    }


def bundle_from_dict(doc: Mapping) -> ReportBundle:
    return ReportBundle(
        time=doc["time"],
        priors=tuple(
            PriorRow(
                component=r["component"],
                uptime=r["uptime"],
                mtbf=r["mtbf"],
                p_broken=r["p_broken"],
            )
            for r in doc["priors"]
        ),
        posterior=tuple(
            PosteriorRow(modes=dict(r["modes"]), probability=r["probability"])
            for r in doc["posterior"]
        ),
        decisions=tuple(
            DecisionRow(actions=dict(r["actions"]), expected_cost=r["expected_cost"])
            for r in doc["decisions"]
        ),
    )


def trajectory_to_dict(steps) -> dict[str, Any]:
    return {
        "steps": [
            {
                "event": None if event is None else event_to_dict(event),
                "bundle": bundle_to_dict(bundle),
            }
            for event, bundle in steps
        ]
    }
