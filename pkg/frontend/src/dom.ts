// Thin DOM layer: renders view models into containers. No numeric logic.

import { BarView, DecisionView, GaugeView, TimelineItem } from "./views.js";

export function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    className?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
}

export function clear(node: HTMLElement): void {
    while (node.firstChild) node.removeChild(node.firstChild);
}

export function renderBars(container: HTMLElement, bars: BarView[]): void {
    clear(container);
    for (const bar of bars) {
        const row = el("div", "bar-row");
        row.appendChild(el("span", "bar-label", bar.label));
        const track = el("div", "bar-track");
        const fill = el("div", "bar-fill");
        fill.style.width = `${bar.fraction * 100}%`;
        track.appendChild(fill);
        row.appendChild(track);
        row.appendChild(el("span", "bar-value", bar.value));
        container.appendChild(row);
    }
}

export function renderGauges(container: HTMLElement, gauges: GaugeView[]): void {
    clear(container);
    for (const gauge of gauges) {
        const card = el("div", "gauge");
        card.appendChild(el("div", "gauge-name", gauge.component));
        const track = el("div", "bar-track");
        const fill = el("div", "bar-fill gauge-fill");
        fill.style.width = `${gauge.fraction * 100}%`;
        track.appendChild(fill);
        card.appendChild(track);
        card.appendChild(el("div", "gauge-value", `P(broken) ${gauge.pBroken}`));
        card.appendChild(
            el("div", "gauge-meta", `uptime ${gauge.uptime}h · MTBF ${gauge.mtbf}h`),
        );
        container.appendChild(card);
    }
}

export function renderDecisions(
    container: HTMLElement,
    rows: DecisionView[],
    componentIds: string[],
): void {
    clear(container);
    const table = el("table", "decisions");
    const head = el("tr");
    for (const id of componentIds) head.appendChild(el("th", undefined, id));
    head.appendChild(el("th", undefined, "expected cost"));
    table.appendChild(head);
    for (const row of rows) {
        const tr = el("tr", row.optimal ? "optimal" : undefined);
        for (const action of row.actions) tr.appendChild(el("td", undefined, action));
        tr.appendChild(el("td", "cost", row.cost));
        table.appendChild(tr);
    }
    container.appendChild(table);
}

export function renderTimeline(container: HTMLElement, items: TimelineItem[]): void {
    clear(container);
    if (items.length === 0) {
        container.appendChild(el("p", "empty", "no events yet"));
        return;
    }
    const list = el("ol", "timeline");
    for (const item of items) {
        list.appendChild(el("li", item.kind, `t=${item.time}: ${item.kind} — ${item.detail}`));
    }
    container.appendChild(list);
}

export function banner(container: HTMLElement, kind: "error" | "info", message: string): void {
    clear(container);
    container.appendChild(el("div", `banner ${kind}`, message));
}

export function clearBanner(container: HTMLElement): void {
    clear(container);
}
