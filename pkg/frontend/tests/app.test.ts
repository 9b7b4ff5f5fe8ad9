import { afterEach, describe, expect, it, vi } from "vitest";

import { GatewayClient } from "../src/api.js";
import { Console, parseRoute } from "../src/app.js";

function jsonResponse(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { "content-type": "application/json" },
  });
}

const ITEM = {
  id: "ds1",
  ktype: "dataset",
  name: "AFZ1-Fz-S1D",
  summary: "tensile sample",
  annotations: ["https://w3id.org/steel/ProcessOntology/TensileTest"],
  links: [{ target: "run-0001-card", relation: "https://w3id.org/dsms/isInputFor", label: null }],
  attachments: [
    {
      filename: "fig7.csv",
      media_type: "text/csv",
      derived: false,
      checksum: "0".repeat(64),
      size: 2048,
    },
  ],
  columns: ["Standardweg"],
  created: "2026-01-01T00:00:00",
  updated: "2026-01-01T00:00:00",
};

/** Routes mocked fetch calls by path prefix. */
function stubRoutes(routes: Record<string, unknown>) {
  const fetchMock = vi.fn(async (url: string) => {
    const path = url.split("?")[0];
    for (const [prefix, doc] of Object.entries(routes)) {
      if (path === prefix) return jsonResponse(doc);
    }
    return jsonResponse({ code: "kitem-error", message: `unknown ${path}` }, 404);
  });
  vi.stubGlobal("fetch", fetchMock);
  return fetchMock;
}

afterEach(() => {
  vi.unstubAllGlobals();
  document.body.innerHTML = "";
});

describe("parseRoute", () => {
  it("decodes the item and graph routes", () => {
    expect(parseRoute("#/item/ds%201")).toEqual({ view: "item", id: "ds 1" });
    expect(parseRoute("#/graph/a")).toEqual({ view: "graph", id: "a" });
    expect(parseRoute("#/sparql")).toEqual({ view: "sparql" });
  });

  it("falls back to search for anything else", () => {
    expect(parseRoute("")).toEqual({ view: "search" });
    expect(parseRoute("#/bogus/route")).toEqual({ view: "search" });
    expect(parseRoute("#/item/")).toEqual({ view: "search" });
  });
});

describe("Console item view", () => {
  it("renders metadata, a plot per column and the k-type form", async () => {
    stubRoutes({
      "/kitems/ds1": ITEM,
      "/kitems/ds1/columns/Standardweg": {
        name: "Standardweg",
        values: [0, 0.5, 1.0, 1.5],
        concept: null,
        unit: "http://qudt.org/vocab/unit/MilliM",
      },
      "/ktypes/dataset/form": {
        ktype: "dataset",
        version: 1,
        fields: [
          {
            key: "facility",
            label: "Facility",
            concept: "https://w3id.org/steel/ProcessOntology/TestingFacility",
            kind: "text",
            unit: null,
            required: false,
            options: [],
          },
        ],
      },
    });

    const root = document.createElement("main");
    document.body.appendChild(root);
    await new Console(root, new GatewayClient()).render({ view: "item", id: "ds1" });

    expect(root.querySelector("h2")!.textContent).toBe("AFZ1-Fz-S1D (dataset)");
    expect(root.querySelector("table.item-meta")!.textContent).toContain("fig7.csv");
    expect(root.querySelectorAll("svg.line-plot").length).toBe(1);
    expect(root.querySelector("form.kitem-form")).not.toBeNull();
  });

  it("omits the form when the k-type has none", async () => {
    stubRoutes({ "/kitems/ds1": { ...ITEM, columns: [] } });
    const root = document.createElement("main");
    document.body.appendChild(root);
    await new Console(root, new GatewayClient()).render({ view: "item", id: "ds1" });
    expect(root.querySelector("form")).toBeNull();
    expect(root.querySelectorAll("svg").length).toBe(0);
  });

  it("shows the gateway error message for an unknown item", async () => {
    stubRoutes({});
    const root = document.createElement("main");
    document.body.appendChild(root);
    await new Console(root, new GatewayClient()).render({ view: "item", id: "ghost" });
    expect(root.querySelector("p.error")!.textContent).toContain("unknown");
  });
});

describe("Console search view", () => {
  it("asks for facets first and searches once a chip is toggled", async () => {
    const fetchMock = stubRoutes({
      "/ktypes": [{ id: "dataset", name: "Dataset", description: "" }],
      "/vocabulary/terms": [],
      "/search": [
        { id: "ds1", score: 1.0, name: "AFZ1-Fz-S1D", ktype: "dataset", annotations: [] },
      ],
    });

    const root = document.createElement("main");
    document.body.appendChild(root);
    const console_ = new Console(root, new GatewayClient());
    await console_.render({ view: "search" });

    // empty state: no search request yet, just the hint
    expect(root.querySelector("p.hint")).not.toBeNull();
    const searched = fetchMock.mock.calls.filter(([url]) => url.startsWith("/search"));
    expect(searched.length).toBe(0);

    const chip = root.querySelector("button.chip") as HTMLButtonElement;
    chip.click();
    await vi.waitFor(() => {
      if (!root.querySelector("ul.hit-list")) throw new Error("not rendered yet");
    });
    const after = fetchMock.mock.calls.filter(([url]) => url.startsWith("/search"));
    expect(after.length).toBe(1);
    expect(after[0][0]).toBe("/search?ktype=dataset");
    expect(root.querySelector(".hit a")!.textContent).toBe("AFZ1-Fz-S1D");
  });
});

describe("Console sparql view", () => {
  it("runs the query from the editor and renders the result table", async () => {
    const results = {
      head: { vars: ["name"] },
      results: { bindings: [{ name: { type: "literal", value: "alpha" } }] },
    };
    const fetchMock = stubRoutes({ "/sparql": results });

    const root = document.createElement("main");
    document.body.appendChild(root);
    const console_ = new Console(root, new GatewayClient());
    await console_.render({ view: "sparql" });

    const editor = root.querySelector("#sparql-editor") as HTMLTextAreaElement;
    editor.value = "SELECT ?name WHERE { ?s ?p ?name }";
    (root.querySelector("#sparql-run") as HTMLButtonElement).click();

    await vi.waitFor(() => {
      if (!root.querySelector("table.sparql-results")) throw new Error("pending");
    });
    expect(root.querySelector("tbody td")!.textContent).toBe("alpha");
    const [, init] = fetchMock.mock.calls[0];
    expect(init!.body).toBe("SELECT ?name WHERE { ?s ?p ?name }");
  });
});

describe("Console graph view", () => {
  it("renders the link graph", async () => {
    stubRoutes({
      "/kitems/ds1/linkgraph": {
        nodes: [
          { id: "ds1", name: "ds1", ktype: "dataset" },
          { id: "run-0001-card", name: "card", ktype: "material-card" },
        ],
        edges: [
          { source: "ds1", target: "run-0001-card", relation: "https://w3id.org/dsms/isInputFor" },
        ],
      },
    });
    const root = document.createElement("main");
    document.body.appendChild(root);
    await new Console(root, new GatewayClient()).render({ view: "graph", id: "ds1" });
    expect(root.querySelectorAll("svg.link-graph g.node").length).toBe(2);
    expect(root.querySelectorAll("svg.link-graph line.edge").length).toBe(1);
  });
});
