// Typed client for the diagnosis session service. The workbench displays
// numbers exactly as served; nothing in the UI recomputes probabilities.

export interface MarginalRow {
    component: string;
    uptime: number;
    age: number;
    mtbf: number;
    p_broken: number;
}

export interface PosteriorRow {
    modes: Record<string, string>;
    probability: number;
}

export interface SessionSummary {
    session_id: string;
    time: number;
    event_count: number;
    marginals: MarginalRow[];
    posterior: PosteriorRow[];
    posterior_truncated: boolean;
}

export interface DecisionRow {
    actions: Record<string, string>;
    expected_cost: number;
}

export interface DecisionsPayload {
    ranked: DecisionRow[];
    head: DecisionRow;
    factored: DecisionRow;
}

export interface DecisionsResponse extends DecisionsPayload {
    session_id: string;
    time: number;
}

export interface ObserveEvent {
    type: "observe";
    time: number;
    assignments: Record<string, number | string>;
}

export interface RepairEvent {
    type: "repair";
    time: number;
    components: string[];
}

export type SessionEvent = ObserveEvent | RepairEvent;

export interface VariableInfo {
    name: string;
    domain: (number | string)[];
    kind: "input" | "internal";
}

export interface SessionInfo {
    session_id: string;
    t0: number;
    time: number;
    events: SessionEvent[];
    model: {
        variables: VariableInfo[];
        components: string[];
        commissioning_time: number;
    };
}

export interface WhatIfResponse {
    committed: SessionSummary;
    hypothetical: SessionSummary & { decisions: DecisionsPayload };
}

export interface ApiError {
    code: string;
    message: string;
    violations?: string[];
}

export class ServiceError extends Error {
    readonly code: string;
    readonly status: number;

    constructor(status: number, body: ApiError) {
        super(body.message);
        this.code = body.code;
        this.status = status;
    }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
    const response = await fetch(url, init);
    const body = await response.json();
    if (!response.ok) {
        throw new ServiceError(response.status, body as ApiError);
    }
    return body as T;
}

function post(payload: unknown): RequestInit {
    return {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
    };
}

export class ApiClient {
    constructor(readonly base: string) {}

    createSession(model: unknown, t0: number): Promise<SessionSummary> {
        return request(`${this.base}/sessions`, post({ model, t0 }));
    }

    getSession(id: string): Promise<SessionInfo> {
        return request(`${this.base}/sessions/${id}`);
    }

    getBelief(id: string, top = 8): Promise<SessionSummary> {
        return request(`${this.base}/sessions/${id}/belief?top=${top}`);
    }

    getDecisions(id: string): Promise<DecisionsResponse> {
        return request(`${this.base}/sessions/${id}/decisions`);
    }

    appendEvent(id: string, event: SessionEvent): Promise<SessionSummary> {
        return request(`${this.base}/sessions/${id}/events`, post(event));
    }

    whatIf(id: string, events: SessionEvent[], advanceTo?: number): Promise<WhatIfResponse> {
        const payload: Record<string, unknown> = { events };
        if (advanceTo !== undefined) {
            payload.advance_to = advanceTo;
        }
        return request(`${this.base}/sessions/${id}/whatif`, post(payload));
    }
}
