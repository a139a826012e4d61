// Browser bootstrap: binds the state machine, client, and renderers to the
// static page. Everything interesting lives in the imported modules; this
// file only wires events and repaints.

import { ApiClient } from "./client.js";
import { Controller } from "./controller.js";
import { createStore } from "./state.js";
import { renderCandidates, renderError, renderMetrics, renderPad } from "./view.js";

function defaultBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("api");
  return fromQuery ?? "http://127.0.0.1:8787";
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing element #${id}`);
  return node as T;
}

const apiInput = el<HTMLInputElement>("api-url");
apiInput.value = defaultBaseUrl();

const store = createStore();
let controller = new Controller(store, new ApiClient(apiInput.value));

apiInput.addEventListener("change", () => {
  controller = new Controller(store, new ApiClient(apiInput.value.trim()));
});

const draft = el<HTMLInputElement>("draft");
const padBox = el<HTMLElement>("pad");
const candidatesBox = el<HTMLElement>("candidates");
const metricsBox = el<HTMLElement>("metrics");
const errorBox = el<HTMLElement>("error");
const suggest = el<HTMLButtonElement>("suggest");
const reveal = el<HTMLInputElement>("reveal");

draft.addEventListener("input", () => {
  store.dispatch({ type: "SET_DRAFT", text: draft.value });
});
draft.addEventListener("keydown", (event) => {
  if (event.key === "Enter") void controller.requestCompletion();
});
suggest.addEventListener("click", () => void controller.requestCompletion());
el<HTMLButtonElement>("reject").addEventListener("click", () => controller.reject());
el<HTMLButtonElement>("reset").addEventListener("click", () => controller.reset());
reveal.addEventListener("change", () => store.dispatch({ type: "TOGGLE_REVEAL" }));

for (const [id, key] of [
  ["param-k", "k"],
  ["param-seed", "seed"],
  ["param-candidates", "numCandidates"],
] as const) {
  const input = el<HTMLInputElement>(id);
  input.addEventListener("change", () => {
    store.dispatch({ type: "SET_PARAMS", params: { [key]: Number(input.value) } });
    input.value = String(store.getState().params[key]); // echo back the accepted value
  });
}
const rerank = el<HTMLInputElement>("param-rerank");
rerank.addEventListener("change", () => {
  store.dispatch({ type: "SET_PARAMS", params: { rerank: rerank.checked } });
});

candidatesBox.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.classList.contains("accept")) {
    void controller.accept(Number(target.dataset.index));
  }
});
padBox.addEventListener("change", (event) => {
  const target = event.target as HTMLInputElement;
  if (target.classList.contains("pad-line")) {
    void controller.editAccepted(Number(target.dataset.index), target.value);
  }
});
errorBox.addEventListener("click", (event) => {
  if ((event.target as HTMLElement).classList.contains("retry")) {
    void controller.requestCompletion();
  }
});

function repaint(): void {
  const state = store.getState();
  padBox.innerHTML = renderPad(state);
  candidatesBox.innerHTML = renderCandidates(state);
  metricsBox.innerHTML = renderMetrics(state);
  errorBox.innerHTML = renderError(state);
  if (document.activeElement !== draft) draft.value = state.draft;
  suggest.disabled = state.inFlight !== null;
  reveal.checked = state.revealed;
}

store.subscribe(repaint);
repaint();
