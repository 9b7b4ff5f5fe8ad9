/** Search view state: a free-text query plus facet chips for k-types and
 * annotations. The state object is immutable so the view can re-render from
 * scratch after every toggle. */

import type { SearchParams } from "./api.js";
import type { SearchHit } from "./types.js";

export interface SearchState {
  q: string;
  ktypes: string[];
  annotations: string[];
}

export const EMPTY_SEARCH: SearchState = { q: "", ktypes: [], annotations: [] };

function toggle(list: string[], value: string): string[] {
  return list.includes(value) ? list.filter((v) => v !== value) : [...list, value];
}

export function toggleKtype(state: SearchState, ktype: string): SearchState {
  return { ...state, ktypes: toggle(state.ktypes, ktype) };
}

export function toggleAnnotation(state: SearchState, iri: string): SearchState {
  return { ...state, annotations: toggle(state.annotations, iri) };
}

export function withQuery(state: SearchState, q: string): SearchState {
  return { ...state, q };
}

/** A search is runnable once any criterion is set; the gateway rejects a
 * completely empty request. */
export function isRunnable(state: SearchState): boolean {
  return state.q.trim() !== "" || state.ktypes.length > 0 || state.annotations.length > 0;
}

export function toParams(state: SearchState): SearchParams {
  const params: SearchParams = {};
  if (state.q.trim()) params.q = state.q.trim();
  if (state.ktypes.length) params.ktype = [...state.ktypes];
  if (state.annotations.length) params.annotation = [...state.annotations];
  return params;
}

function shorten(iri: string): string {
  const cut = Math.max(iri.lastIndexOf("/"), iri.lastIndexOf("#"));
  return cut >= 0 ? iri.slice(cut + 1) : iri;
}

/** Renders one facet chip row; active chips carry the "active" class and
 * clicking a chip invokes onToggle with its value. */
export function renderChips(
  doc: Document,
  values: string[],
  active: string[],
  onToggle: (value: string) => void,
): HTMLElement {
  const row = doc.createElement("div");
  row.className = "chip-row";
  for (const value of values) {
    const chip = doc.createElement("button");
    chip.type = "button";
    chip.className = active.includes(value) ? "chip active" : "chip";
    chip.dataset.value = value;
    chip.textContent = shorten(value);
    chip.addEventListener("click", () => onToggle(value));
    row.appendChild(chip);
  }
  return row;
}

/** Renders the hit list; each entry links to the detail route for its id. */
export function renderHits(doc: Document, hits: SearchHit[]): HTMLElement {
  const list = doc.createElement("ul");
  list.className = "hit-list";
  for (const hit of hits) {
    const entry = doc.createElement("li");
    entry.className = "hit";
    const link = doc.createElement("a");
    link.href = `#/item/${encodeURIComponent(hit.id)}`;
    link.textContent = hit.name;
    entry.appendChild(link);
    const meta = doc.createElement("span");
    meta.className = "hit-meta";
    meta.textContent = ` ${hit.ktype} (score ${hit.score.toFixed(2)})`;
    entry.appendChild(meta);
    list.appendChild(entry);
  }
  if (!hits.length) {
    const empty = doc.createElement("li");
    empty.className = "empty";
    empty.textContent = "no matches";
    list.appendChild(empty);
  }
  return list;
}
