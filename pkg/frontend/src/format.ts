// Display formatting. Probabilities and costs show 4 decimals to match the
// service's text reports; times and ages show plain hours.

export function prob(value: number): string {
    return value.toFixed(4);
}

export function cost(value: number): string {
    return value.toFixed(4);
}

export function hours(value: number): string {
    return Number.isInteger(value) ? String(value) : String(value);
}

export function modeLabel(modes: Record<string, string>, order: string[]): string {
    return order.map((id) => `${id}=${modes[id]}`).join(" ");
}

export function actionLabel(actions: Record<string, string>, order: string[]): string {
    return order.map((id) => `${actions[id]=== "fix" ? "fix" : "dont"} ${id}`).join(", ");
}
