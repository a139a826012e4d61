// Glue between the state machine and the service client.
//
// One completion request is considered current at a time: each call gets a
// fresh id and the reducer drops responses whose id is no longer in flight,
// so a slow early response can never clobber a newer one. All metric numbers
// come from service responses; nothing is computed locally.

import { ApiClient, ApiError } from "./client.js";
import { Candidate, Store } from "./state.js";

export class Controller {
  private requestCounter = 0;

  constructor(
    private readonly store: Store,
    private readonly client: ApiClient,
  ) {}

  /** Accepted lines plus the non-empty draft, in pad order. */
  contextLines(): string[] {
    const state = this.store.getState();
    const lines = [...state.accepted];
    const draft = state.draft.trim();
    if (draft !== "") lines.push(draft);
    return lines;
  }

  async requestCompletion(): Promise<void> {
    const context = this.contextLines();
    if (context.length === 0) return; // nothing to complete from
    const id = ++this.requestCounter;
    this.store.dispatch({ type: "REQUEST_STARTED", id });
    const params = this.store.getState().params;
    try {
      const resp = await this.client.complete({
        context,
        seed: params.seed,
        k: params.k,
        rerank: params.rerank,
        num_candidates: params.numCandidates,
      });
      // one scoring call flags profanity across all candidate lines
      const scored = await this.client.score(resp.candidates.map((c) => c.line));
      const candidates: Candidate[] = resp.candidates.map((c, i) => ({
        line: c.line,
        rhymeDensity: c.rhyme_density,
        slurScore: c.slur_score,
        seedOffset: c.seed_offset,
        profaneTokens: scored.matches
          .filter((m) => m.line_index === i)
          .map((m) => m.token_index),
      }));
      this.store.dispatch({ type: "CANDIDATES_RECEIVED", id, candidates });
    } catch (err) {
      const message = err instanceof ApiError ? err.message : "service unreachable";
      this.store.dispatch({ type: "REQUEST_FAILED", id, message });
    }
  }

  /** Whole-pad rhyme density and slur score, fetched from the service. */
  async refreshMetrics(): Promise<void> {
    const pad = this.store.getState().accepted;
    if (pad.length === 0) return;
    try {
      const [rd, score] = await Promise.all([
        this.client.rhymeDensity({ text: pad.join("\n") }),
        this.client.score([...pad]),
      ]);
      this.store.dispatch({
        type: "METRICS_RECEIVED",
        metrics: { density: rd.density, slur: score.slur_score },
      });
    } catch {
      // metrics are advisory; keep the last good values on a failed refresh
    }
  }

  async accept(index: number): Promise<void> {
    this.store.dispatch({ type: "ACCEPT", index });
    await this.refreshMetrics();
  }

  reject(): void {
    this.store.dispatch({ type: "REJECT" });
  }

  async editAccepted(index: number, text: string): Promise<void> {
    this.store.dispatch({ type: "EDIT_ACCEPTED", index, text });
    await this.refreshMetrics();
  }

  reset(): void {
    this.store.dispatch({ type: "RESET" });
  }
}
