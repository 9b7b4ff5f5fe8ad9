/** Console shell: a tiny hash router over four views (search, k-item
 * detail, link graph, SPARQL console). Every view re-renders from scratch
 * into the root element, so the only state is the route plus the current
 * search selection. */

import { GatewayClient } from "./api.js";
import { readForm, renderForm } from "./forms.js";
import { renderLinkGraph } from "./linkgraph.js";
import { linePlot } from "./plot.js";
import { renderTable, resultsToTable } from "./sparql.js";
import {
  EMPTY_SEARCH,
  isRunnable,
  renderChips,
  renderHits,
  toParams,
  toggleAnnotation,
  toggleKtype,
  withQuery,
  type SearchState,
} from "./search.js";
import type { KItemDoc } from "./types.js";

export interface Route {
  view: "search" | "item" | "graph" | "sparql";
  id?: string;
}

/** Parses a location hash into a route; anything unrecognized falls back
 * to the search view. */
export function parseRoute(hash: string): Route {
  const parts = hash.replace(/^#\/?/, "").split("/").filter(Boolean);
  if (parts[0] === "item" && parts[1]) {
    return { view: "item", id: decodeURIComponent(parts[1]) };
  }
  if (parts[0] === "graph" && parts[1]) {
    return { view: "graph", id: decodeURIComponent(parts[1]) };
  }
  if (parts[0] === "sparql") return { view: "sparql" };
  return { view: "search" };
}

export class Console {
  private searchState: SearchState = EMPTY_SEARCH;

  constructor(
    private root: HTMLElement,
    private client: GatewayClient,
  ) {}

  private doc(): Document {
    return this.root.ownerDocument;
  }

  async render(route: Route): Promise<void> {
    this.root.textContent = "";
    try {
      if (route.view === "item" && route.id) await this.renderItem(route.id);
      else if (route.view === "graph" && route.id) await this.renderGraph(route.id);
      else if (route.view === "sparql") this.renderSparql();
      else await this.renderSearch();
    } catch (error) {
      const note = this.doc().createElement("p");
      note.className = "error";
      note.textContent = String(error instanceof Error ? error.message : error);
      this.root.appendChild(note);
    }
  }

  private async renderSearch(): Promise<void> {
    const doc = this.doc();
    const ktypes = await this.client.listKtypes();

    const box = doc.createElement("input");
    box.type = "search";
    box.id = "query";
    box.value = this.searchState.q;
    box.placeholder = "full-text query";
    box.addEventListener("change", () => {
      this.searchState = withQuery(this.searchState, box.value);
      void this.render({ view: "search" });
    });
    this.root.appendChild(box);

    this.root.appendChild(
      renderChips(
        doc,
        ktypes.map((k) => k.id),
        this.searchState.ktypes,
        (value) => {
          this.searchState = toggleKtype(this.searchState, value);
          void this.render({ view: "search" });
        },
      ),
    );
    const terms = await this.client.vocabularyTerms();
    this.root.appendChild(
      renderChips(
        doc,
        terms.map((t) => t.iri),
        this.searchState.annotations,
        (value) => {
          this.searchState = toggleAnnotation(this.searchState, value);
          void this.render({ view: "search" });
        },
      ),
    );

    if (isRunnable(this.searchState)) {
      const hits = await this.client.search(toParams(this.searchState));
      this.root.appendChild(renderHits(doc, hits));
    } else {
      const hint = doc.createElement("p");
      hint.className = "hint";
      hint.textContent = "enter a query or pick a facet";
      this.root.appendChild(hint);
    }
  }

  private async renderItem(id: string): Promise<void> {
    const doc = this.doc();
    const item = await this.client.getKitem(id);

    const title = doc.createElement("h2");
    title.textContent = `${item.name} (${item.ktype})`;
    this.root.appendChild(title);
    if (item.summary) {
      const summary = doc.createElement("p");
      summary.textContent = item.summary;
      this.root.appendChild(summary);
    }

    this.root.appendChild(this.metaTable(item));

    const graphLink = doc.createElement("a");
    graphLink.href = `#/graph/${encodeURIComponent(id)}`;
    graphLink.textContent = "link graph";
    this.root.appendChild(graphLink);

    for (const name of item.columns) {
      const column = await this.client.getColumn(id, name);
      const index = column.values.map((_, i) => i);
      const caption = column.unit ? `${name} [${column.unit}]` : name;
      this.root.appendChild(
        linePlot(doc, index, column.values, { xLabel: "sample", yLabel: caption }),
      );
    }

    await this.renderItemForm(item);
  }

  private metaTable(item: KItemDoc): HTMLTableElement {
    const doc = this.doc();
    const table = doc.createElement("table");
    table.className = "item-meta";
    const rows: [string, string][] = [
      ["id", item.id],
      ["created", item.created],
      ["updated", item.updated],
      ["annotations", item.annotations.join(", ")],
      [
        "attachments",
        item.attachments
          .map((a) => `${a.filename} (${a.size} bytes${a.derived ? ", derived" : ""})`)
          .join(", "),
      ],
      ["links", item.links.map((l) => `${l.target}`).join(", ")],
    ];
    for (const [key, value] of rows) {
      const tr = table.insertRow();
      const th = doc.createElement("th");
      th.textContent = key;
      tr.appendChild(th);
      tr.insertCell().textContent = value;
    }
    return table;
  }

  private async renderItemForm(item: KItemDoc): Promise<void> {
    let schema;
    try {
      schema = await this.client.getForm(item.ktype);
    } catch {
      return; // no form attached to this k-type
    }
    const form = renderForm(this.doc(), schema);
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      void (async () => {
        const note = this.doc().createElement("p");
        note.className = "form-status";
        try {
          const values = readForm(form, schema);
          const result = await this.client.submitForm(item.id, item.ktype, values);
          note.textContent = `saved, ${result.triples_written} statements written`;
        } catch (error) {
          note.className = "form-status error";
          note.textContent = String(error instanceof Error ? error.message : error);
        }
        form.appendChild(note);
      })();
    });
    this.root.appendChild(form);
  }

  private async renderGraph(id: string): Promise<void> {
    const graph = await this.client.getLinkGraph(id);
    this.root.appendChild(renderLinkGraph(this.doc(), graph));
  }

  private renderSparql(): void {
    const doc = this.doc();
    const editor = doc.createElement("textarea");
    editor.id = "sparql-editor";
    editor.rows = 8;
    editor.placeholder = "SELECT ?s WHERE { ?s ?p ?o }";
    this.root.appendChild(editor);

    const run = doc.createElement("button");
    run.id = "sparql-run";
    run.textContent = "Run";
    this.root.appendChild(run);

    const output = doc.createElement("div");
    output.id = "sparql-output";
    this.root.appendChild(output);

    run.addEventListener("click", () => {
      void (async () => {
        output.textContent = "";
        try {
          const results = await this.client.sparql(editor.value);
          output.appendChild(renderTable(resultsToTable(results), doc));
        } catch (error) {
          const note = doc.createElement("p");
          note.className = "error";
          note.textContent = String(error instanceof Error ? error.message : error);
          output.appendChild(note);
        }
      })();
    });
  }
}

/** Wires the console into a page: renders the current hash route now and
 * re-renders on every hash change. */
export function mount(root: HTMLElement, client: GatewayClient): Console {
  const console_ = new Console(root, client);
  const view = () => void console_.render(parseRoute(root.ownerDocument.location.hash));
  root.ownerDocument.defaultView?.addEventListener("hashchange", view);
  view();
  return console_;
}
