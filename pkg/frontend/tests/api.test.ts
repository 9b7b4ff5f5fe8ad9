import { afterEach, describe, expect, it, vi } from "vitest";

import { GatewayClient, GatewayError, searchQuery } from "../src/api.js";

function jsonResponse(doc: unknown, status = 200): Response {
  return new Response(JSON.stringify(doc), {
    status,
    headers: { "content-type": "application/json" },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("searchQuery", () => {
  it("joins list facets with commas", () => {
    const qs = searchQuery({ q: "tensile", ktype: ["dataset", "material"], limit: 5 });
    const parsed = new URLSearchParams(qs);
    expect(parsed.get("q")).toBe("tensile");
    expect(parsed.get("ktype")).toBe("dataset,material");
    expect(parsed.get("limit")).toBe("5");
    expect(parsed.has("annotation")).toBe(false);
  });

  it("is empty for an empty selection", () => {
    expect(searchQuery({})).toBe("");
  });
});

describe("GatewayClient", () => {
  it("fetches k-items from the base url", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ id: "d1", name: "one" }));
    vi.stubGlobal("fetch", fetchMock);

    const client = new GatewayClient("http://api.test");
    const item = await client.getKitem("d1");

    expect(item.name).toBe("one");
    expect(fetchMock).toHaveBeenCalledWith(
      "http://api.test/kitems/d1",
      expect.objectContaining({ method: "GET" }),
    );
  });

  it("escapes path segments", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ values: [] }));
    vi.stubGlobal("fetch", fetchMock);

    await new GatewayClient().getColumn("ds1", "Standardkraft [N]");
    expect(fetchMock.mock.calls[0][0]).toBe(
      "/kitems/ds1/columns/Standardkraft%20%5BN%5D",
    );
  });

  it("sends the bearer token on writes but not on reads", async () => {
    const fetchMock = vi.fn(async () => jsonResponse({ id: "x" }));
    vi.stubGlobal("fetch", fetchMock);

    const client = new GatewayClient("", "sesame");
    await client.listKitems();
    expect(fetchMock.mock.calls[0][1].headers).not.toHaveProperty("authorization");

    await client.createKitem({ ktype: "dataset", name: "x" });
    const [, init] = fetchMock.mock.calls[1];
    expect(init.headers["authorization"]).toBe("Bearer sesame");
    expect(init.headers["content-type"]).toBe("application/json");
    expect(JSON.parse(init.body)).toEqual({ ktype: "dataset", name: "x" });
  });

  it("posts sparql queries with the dedicated media type", async () => {
    const results = { head: { vars: ["s"] }, results: { bindings: [] } };
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(results));
    vi.stubGlobal("fetch", fetchMock);

    const doc = await new GatewayClient().sparql("SELECT ?s WHERE { ?s ?p ?o }");
    expect(doc).toEqual(results);
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("/sparql");
    expect(init.headers["content-type"]).toBe("application/sparql-query");
    expect(init.body).toBe("SELECT ?s WHERE { ?s ?p ?o }");
  });

  it("raises GatewayError with the machine-readable code", async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValue(jsonResponse({ code: "kitem-error", message: "unknown k-item" }, 404));
    vi.stubGlobal("fetch", fetchMock);

    const error = await new GatewayClient().getKitem("ghost").catch((e) => e);
    expect(error).toBeInstanceOf(GatewayError);
    expect(error.status).toBe(404);
    expect(error.code).toBe("kitem-error");
    expect(error.message).toBe("unknown k-item");
  });

  it("survives a non-JSON error body", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn().mockResolvedValue(new Response("boom", { status: 500 })),
    );
    const error = await new GatewayClient().health().catch((e) => e);
    expect(error).toBeInstanceOf(GatewayError);
    expect(error.code).toBe("http-error");
  });

  it("builds nested form submit paths", async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValue(jsonResponse({ triples_written: 2, form_version: 1 }));
    vi.stubGlobal("fetch", fetchMock);

    const report = await new GatewayClient().submitForm("d1", "dataset", { facility: "IWM" });
    expect(report.triples_written).toBe(2);
    expect(fetchMock.mock.calls[0][0]).toBe("/kitems/d1/forms/dataset/submit");
  });
});
