// Workbench wiring: one live session against the diagnosis service.
// Observations and repairs post events; the what-if panel renders
// hypotheticals side by side without touching committed state.

import { ApiClient, SessionEvent, SessionInfo, ServiceError, VariableInfo } from "./api.js";
import {
    banner,
    clear,
    clearBanner,
    el,
    renderBars,
    renderDecisions,
    renderGauges,
    renderTimeline,
} from "./dom.js";
import {
    componentOrder,
    decisionTable,
    marginalGauges,
    optimumSummary,
    posteriorBars,
    timelineItems,
    whatIfComparison,
} from "./views.js";

const $ = (id: string) => document.getElementById(id) as HTMLElement;

let client = new ApiClient("http://127.0.0.1:8000");
let sessionId: string | null = null;
let sessionInfo: SessionInfo | null = null;
let busy = false;

function setBusy(value: boolean): void {
    busy = value;
    document.querySelectorAll("button").forEach((b) => {
        (b as HTMLButtonElement).disabled = value;
    });
}

async function refresh(): Promise<void> {
    if (!sessionId) return;
    sessionInfo = await client.getSession(sessionId);
    const summary = await client.getBelief(sessionId);
    const decisions = await client.getDecisions(sessionId);
    const order = componentOrder(summary);

    $("session-label").textContent = `session ${sessionId} · t=${summary.time}h`;
    renderTimeline($("timeline"), timelineItems(sessionInfo.events));
    renderGauges($("gauges"), marginalGauges(summary.marginals));
    renderBars($("posterior"), posteriorBars(summary.posterior, order));
    renderDecisions($("decisions"), decisionTable(decisions, order), order);
    $("optimum").textContent = `optimal: ${optimumSummary(decisions, order)}`;
    buildObservationForm(sessionInfo.model.variables);
    buildRepairForm(sessionInfo.model.components);
    $("workspace").style.display = "";
}

function buildObservationForm(variables: VariableInfo[]): void {
    const host = $("observe-fields");
    clear(host);
    for (const variable of variables) {
        const row = el("label", "field");
        row.appendChild(el("span", "field-name", variable.name));
        const select = el("select");
        select.dataset.variable = variable.name;
        select.dataset.kind = variable.kind;
        if (variable.kind === "internal") {
            select.appendChild(new Option("(not observed)", ""));
        }
        for (const value of variable.domain) {
            select.appendChild(new Option(String(value), String(value)));
        }
        if (variable.kind === "input") select.required = true;
        row.appendChild(select);
        host.appendChild(row);
    }
}

function buildRepairForm(components: string[]): void {
    const host = $("repair-fields");
    clear(host);
    for (const id of components) {
        const label = el("label", "check");
        const box = el("input");
        box.type = "checkbox";
        box.value = id;
        label.appendChild(box);
        label.appendChild(el("span", undefined, id));
        host.appendChild(label);
    }
}

function readObservation(timeInput: HTMLInputElement, host: HTMLElement): SessionEvent | null {
    const time = Number(timeInput.value);
    if (timeInput.value === "" || Number.isNaN(time)) {
        banner($("messages"), "error", "observation needs a timestamp");
        return null;
    }
    const assignments: Record<string, number | string> = {};
    let ok = true;
    host.querySelectorAll("select").forEach((node) => {
        const select = node as HTMLSelectElement;
        const name = select.dataset.variable as string;
        if (select.value === "") {
            if (select.dataset.kind === "input") {
                banner($("messages"), "error", `input variable ${name} must be filled`);
                ok = false;
            }
            return;
        }
        const raw = select.value;
        assignments[name] = /^-?\d+$/.test(raw) ? Number(raw) : raw;
    });
    if (!ok) return null;
    return { type: "observe", time, assignments };
}

async function guard(work: () => Promise<void>): Promise<void> {
    if (busy) return;
    setBusy(true);
    clearBanner($("messages"));
    try {
        await work();
    } catch (err) {
        if (err instanceof ServiceError) {
            banner($("messages"), "error", `${err.code}: ${err.message}`);
        } else {
            banner($("messages"), "error", String(err));
        }
    } finally {
        setBusy(false);
    }
}

function wireSessionForm(): void {
    ($("connect") as HTMLButtonElement).onclick = () =>
        guard(async () => {
            client = new ApiClient(($("base-url") as HTMLInputElement).value.replace(/\/$/, ""));
            const attach = ($("session-id") as HTMLInputElement).value.trim();
            if (attach) {
                sessionId = attach;
            } else {
                const modelText = ($("model-json") as HTMLTextAreaElement).value;
                const t0 = Number(($("t0") as HTMLInputElement).value || "0");
                const summary = await client.createSession(JSON.parse(modelText), t0);
                sessionId = summary.session_id;
            }
            await refresh();
        });
}

function wireObservationForm(): void {
    ($("observe-submit") as HTMLButtonElement).onclick = () =>
        guard(async () => {
            const event = readObservation($("observe-time") as HTMLInputElement, $("observe-fields"));
            if (!event || !sessionId) return;
            await client.appendEvent(sessionId, event);
            await refresh();
        });
}

function wireRepairForm(): void {
    ($("repair-submit") as HTMLButtonElement).onclick = () =>
        guard(async () => {
            if (!sessionId) return;
            const chosen: string[] = [];
            $("repair-fields")
                .querySelectorAll("input:checked")
                .forEach((node) => chosen.push((node as HTMLInputElement).value));
            if (chosen.length === 0) return; // nothing selected, nothing sent
            const time = Number(($("repair-time") as HTMLInputElement).value);
            if (Number.isNaN(time)) {
                banner($("messages"), "error", "repair needs a timestamp");
                return;
            }
            await client.appendEvent(sessionId, { type: "repair", time, components: chosen });
            await refresh();
        });
}

function wireWhatIf(): void {
    ($("whatif-submit") as HTMLButtonElement).onclick = () =>
        guard(async () => {
            if (!sessionId) return;
            const events: SessionEvent[] = [];
            const obs = readObservation($("whatif-time") as HTMLInputElement, $("observe-fields"));
            const useReading = ($("whatif-use-reading") as HTMLInputElement).checked;
            if (useReading && obs) events.push(obs);
            const advanceRaw = ($("whatif-advance") as HTMLInputElement).value;
            const advanceTo = advanceRaw === "" ? undefined : Number(advanceRaw);
            if (!useReading && advanceTo === undefined) {
                banner($("messages"), "info", "what-if: pick a reading and/or a future time");
                return;
            }
            const response = await client.whatIf(sessionId, events, advanceTo);
            const view = whatIfComparison(response);
            const order = componentOrder(response.committed);
            $("whatif-panel").style.display = "";
            $("whatif-committed-label").textContent = `committed (t=${view.committed.time}h)`;
            $("whatif-hypo-label").textContent = `hypothetical (t=${view.hypothetical.time}h)`;
            renderBars($("whatif-committed-bars"), view.committed.bars);
            renderBars($("whatif-hypo-bars"), view.hypothetical.bars);
            renderGauges($("whatif-committed-gauges"), view.committed.gauges);
            renderGauges($("whatif-hypo-gauges"), view.hypothetical.gauges);
            renderDecisions($("whatif-decisions"), view.hypothetical.decisions, order);
            $("whatif-optimum").textContent = `hypothetical optimal: ${view.hypothetical.optimum}`;
        });
    ($("whatif-dismiss") as HTMLButtonElement).onclick = () => {
        $("whatif-panel").style.display = "none";
    };
}

function install(): void {
    wireSessionForm();
    wireObservationForm();
    wireRepairForm();
    wireWhatIf();
}

install();
