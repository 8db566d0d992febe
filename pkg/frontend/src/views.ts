// Pure view-model builders: service payload in, display rows out.
// Every displayed number is a served value run through a formatter; the
// contract tests hold these builders to the recorded API responses.

import {
    DecisionsPayload,
    DecisionRow,
    MarginalRow,
    PosteriorRow,
    SessionEvent,
    SessionSummary,
    WhatIfResponse,
} from "./api.js";
import { cost, hours, prob } from "./format.js";

export interface BarView {
    label: string;
    value: string; // probability, 4 decimals, as served
    fraction: number; // bar width only, not displayed
}

export interface GaugeView {
    component: string;
    uptime: string;
    mtbf: string;
    pBroken: string;
    fraction: number;
}

export interface DecisionView {
    actions: string[]; // per component, declaration order
    cost: string;
    optimal: boolean;
}

export interface TimelineItem {
    kind: "observe" | "repair";
    time: string;
    detail: string;
}

export function componentOrder(summary: SessionSummary): string[] {
    return summary.marginals.map((m) => m.component);
}

export function posteriorBars(rows: PosteriorRow[], order: string[]): BarView[] {
    return rows.map((row) => ({
        label: order.map((id) => `${id}:${row.modes[id]}`).join(" "),
        value: prob(row.probability),
        fraction: row.probability,
    }));
}

export function marginalGauges(rows: MarginalRow[]): GaugeView[] {
    return rows.map((row) => ({
        component: row.component,
        uptime: hours(row.uptime),
        mtbf: hours(row.mtbf),
        pBroken: prob(row.p_broken),
        fraction: row.p_broken,
    }));
}

function sameActions(a: DecisionRow, b: DecisionRow, order: string[]): boolean {
    return order.every((id) => a.actions[id] === b.actions[id]);
}

export function decisionTable(payload: DecisionsPayload, order: string[]): DecisionView[] {
    return payload.ranked.map((row) => ({
        actions: order.map((id) => row.actions[id]),
        cost: cost(row.expected_cost),
        optimal: sameActions(row, payload.head, order),
    }));
}

export function optimumSummary(payload: DecisionsPayload, order: string[]): string {
    const fixes = order.filter((id) => payload.head.actions[id] === "fix");
    const what = fixes.length === 0 ? "do nothing" : `fix ${fixes.join(", ")}`;
    return `${what} (expected cost ${cost(payload.head.expected_cost)})`;
}

export function timelineItems(events: SessionEvent[]): TimelineItem[] {
    return events.map((event) => {
        if (event.type === "observe") {
            const pairs = Object.keys(event.assignments)
                .sort()
                .map((k) => `${k}=${event.assignments[k]}`)
                .join(", ");
            return { kind: "observe" as const, time: hours(event.time), detail: pairs };
        }
        return {
            kind: "repair" as const,
            time: hours(event.time),
            detail: `replace ${[...event.components].sort().join(", ")}`,
        };
    });
}

export interface ComparisonView {
    committed: { time: string; bars: BarView[]; gauges: GaugeView[] };
    hypothetical: {
        time: string;
        bars: BarView[];
        gauges: GaugeView[];
        decisions: DecisionView[];
        optimum: string;
    };
}

export function whatIfComparison(response: WhatIfResponse): ComparisonView {
    const order = componentOrder(response.committed);
    return {
        committed: {
            time: hours(response.committed.time),
            bars: posteriorBars(response.committed.posterior, order),
            gauges: marginalGauges(response.committed.marginals),
        },
        hypothetical: {
            time: hours(response.hypothetical.time),
            bars: posteriorBars(response.hypothetical.posterior, order),
            gauges: marginalGauges(response.hypothetical.marginals),
            decisions: decisionTable(response.hypothetical.decisions, order),
            optimum: optimumSummary(response.hypothetical.decisions, order),
        },
    };
}
