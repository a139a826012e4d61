// HTML renderers: pure functions from state to markup strings, so layout
// and masking behavior are assertable in unit tests without a DOM.

import { Candidate, SessionState } from "./state.js";

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
  "'": "&#39;",
};

export function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => ESCAPES[ch] as string);
}

/**
 * Replace flagged tokens with asterisks of the same length. Token indices
 * count whitespace-separated words, which is exactly how the service
 * tokenizes the all-lowercase space-joined lines it generates.
 */
export function maskLine(
  line: string,
  profane: readonly number[],
  revealed: boolean,
): string {
  if (revealed || profane.length === 0) return line;
  const words = line.split(/\s+/);
  for (const index of profane) {
    const word = words[index];
    if (word !== undefined) words[index] = "*".repeat(word.length);
  }
  return words.join(" ");
}

function badge(cls: string, text: string): string {
  return `<span class="badge ${cls}">${text}</span>`;
}

export function renderCandidate(c: Candidate, index: number, revealed: boolean): string {
  const line = escapeHtml(maskLine(c.line, c.profaneTokens, revealed));
  const high = c.rhymeDensity > 1 ? badge("high", "high") : "";
  return (
    `<li class="candidate" data-index="${index}">` +
    `<button class="accept" data-index="${index}">accept</button>` +
    `<span class="line">${line}</span>` +
    badge("rd", `rd ${c.rhymeDensity.toFixed(3)}`) +
    high +
    badge("slur", `slur ${c.slurScore.toFixed(3)}`) +
    `</li>`
  );
}

export function renderCandidates(state: SessionState): string {
  if (state.inFlight !== null) return `<p class="waiting">waiting for the model...</p>`;
  if (state.pending.length === 0) return "";
  const items = state.pending
    .map((c, i) => renderCandidate(c, i, state.revealed))
    .join("");
  return `<ol class="candidates">${items}</ol>`;
}

export function renderPad(state: SessionState): string {
  if (state.accepted.length === 0) return `<p class="empty">no lines yet</p>`;
  const items = state.accepted
    .map(
      (line, i) =>
        `<li><input class="pad-line" data-index="${i}" value="${escapeHtml(line)}"></li>`,
    )
    .join("");
  return `<ol class="pad">${items}</ol>`;
}

export function renderMetrics(state: SessionState): string {
  // metrics trace to service responses; an empty pad shows nothing
  if (state.accepted.length === 0 || state.metrics === null) return "";
  return (
    badge("rd", `pad rd ${state.metrics.density.toFixed(3)}`) +
    badge("slur", `pad slur ${state.metrics.slur.toFixed(3)}`)
  );
}

export function renderError(state: SessionState): string {
  if (state.error === null) return "";
  return (
    `<div class="error-banner">${escapeHtml(state.error)} ` +
    `<button class="retry">retry</button></div>`
  );
}
