// Session state machine for the co-writing pad.
//
// Every transition is a pure function of (state, action): no mutation, no
// IO, no timers. The service talks back through CANDIDATES_RECEIVED and
// METRICS_RECEIVED only, so the whole machine is testable without a browser
// or a network. Responses carry the id of the request they answer; anything
// that does not match the request currently in flight is stale and dropped.

export interface Candidate {
  line: string;
  rhymeDensity: number;
  slurScore: number;
  seedOffset: number;
  // whitespace-token indices the scoring endpoint flagged as profane
  profaneTokens: readonly number[];
}

export interface Params {
  k: number;
  seed: number;
  numCandidates: number;
  rerank: boolean;
}

export interface Metrics {
  density: number;
  slur: number;
}

export interface SessionState {
  accepted: readonly string[];
  draft: string;
  pending: readonly Candidate[];
  inFlight: number | null;
  error: string | null;
  revealed: boolean;
  metrics: Metrics | null;
  params: Params;
}

export const DEFAULT_PARAMS: Params = { k: 50, seed: 42, numCandidates: 4, rerank: true };

export function initialState(params: Params = DEFAULT_PARAMS): SessionState {
  return {
    accepted: [],
    draft: "",
    pending: [],
    inFlight: null,
    error: null,
    revealed: false,
    metrics: null,
    params,
  };
}

export type Action =
  | { type: "SET_DRAFT"; text: string }
  | { type: "SET_PARAMS"; params: Partial<Params> }
  | { type: "REQUEST_STARTED"; id: number }
  | { type: "CANDIDATES_RECEIVED"; id: number; candidates: readonly Candidate[] }
  | { type: "REQUEST_FAILED"; id: number; message: string }
  | { type: "ACCEPT"; index: number }
  | { type: "REJECT" }
  | { type: "EDIT_ACCEPTED"; index: number; text: string }
  | { type: "RESET" }
  | { type: "METRICS_RECEIVED"; metrics: Metrics }
  | { type: "TOGGLE_REVEAL" };

function sanitizeParams(current: Params, patch: Partial<Params>): Params {
  const next = { ...current };
  if (patch.k !== undefined && Number.isInteger(patch.k) && patch.k >= 1) next.k = patch.k;
  if (patch.seed !== undefined && Number.isInteger(patch.seed) && patch.seed >= 0) {
    next.seed = patch.seed;
  }
  if (
    patch.numCandidates !== undefined &&
    Number.isInteger(patch.numCandidates) &&
    patch.numCandidates >= 1
  ) {
    next.numCandidates = patch.numCandidates;
  }
  if (patch.rerank !== undefined) next.rerank = patch.rerank;
  return next;
}

export function reduce(state: SessionState, action: Action): SessionState {
  switch (action.type) {
    case "SET_DRAFT":
      return { ...state, draft: action.text };

    case "SET_PARAMS":
      return { ...state, params: sanitizeParams(state.params, action.params) };

    case "REQUEST_STARTED":
      // a new request supersedes whatever was in flight
      return { ...state, inFlight: action.id, error: null };

    case "CANDIDATES_RECEIVED": {
      if (state.inFlight !== action.id) return state; // stale response
      const sorted = [...action.candidates].sort((a, b) => b.rhymeDensity - a.rhymeDensity);
      return { ...state, pending: sorted, inFlight: null, error: null };
    }

    case "REQUEST_FAILED":
      if (state.inFlight !== action.id) return state; // stale failure
      return { ...state, inFlight: null, error: action.message };

    case "ACCEPT": {
      const chosen = state.pending[action.index];
      if (chosen === undefined) return state;
      return {
        ...state,
        accepted: [...state.accepted, chosen.line],
        pending: [],
        draft: "",
      };
    }

    case "REJECT":
      return { ...state, pending: [] };

    case "EDIT_ACCEPTED": {
      const text = action.text.trim();
      if (text === "" || action.index < 0 || action.index >= state.accepted.length) {
        return state;
      }
      const accepted = state.accepted.map((line, i) => (i === action.index ? text : line));
      return { ...state, accepted };
    }

    case "RESET":
      return initialState(state.params);

    case "METRICS_RECEIVED":
      return { ...state, metrics: action.metrics };

    case "TOGGLE_REVEAL":
      return { ...state, revealed: !state.revealed };
  }
}

export interface Store {
  getState(): SessionState;
  dispatch(action: Action): void;
  subscribe(listener: () => void): () => void;
}

export function createStore(start: SessionState = initialState()): Store {
  let state = start;
  const listeners = new Set<() => void>();
  return {
    getState: () => state,
    dispatch(action) {
      state = reduce(state, action);
      for (const listener of listeners) listener();
    },
    subscribe(listener) {
      listeners.add(listener);
      return () => listeners.delete(listener);
    },
  };
}
