/** Thin typed client over the gateway REST routes. Every call goes through
 * one request helper so error handling and the bearer token live in one
 * place. */

import type {
  ColumnDoc,
  FormSchemaDoc,
  HealthDoc,
  KItemDoc,
  KTypeDoc,
  LinkGraphDoc,
  RunDoc,
  SearchHit,
  SparqlResults,
  VocabTermDoc,
} from "./types.js";

export class GatewayError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
    this.name = "GatewayError";
  }
}

export interface SearchParams {
  q?: string;
  ktype?: string[];
  annotation?: string[];
  limit?: number;
}

/** Builds the /search query string; list parameters join with commas. */
export function searchQuery(params: SearchParams): string {
  const pairs = new URLSearchParams();
  if (params.q) pairs.set("q", params.q);
  if (params.ktype && params.ktype.length) pairs.set("ktype", params.ktype.join(","));
  if (params.annotation && params.annotation.length) {
    pairs.set("annotation", params.annotation.join(","));
  }
  if (params.limit != null) pairs.set("limit", String(params.limit));
  return pairs.toString();
}

export class GatewayClient {
  constructor(
    private base: string = "",
    private token: string | null = null,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: BodyInit | null,
    contentType?: string,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (contentType) headers["content-type"] = contentType;
    if (this.token && method !== "GET") {
      headers["authorization"] = `Bearer ${this.token}`;
    }
    const response = await fetch(this.base + path, { method, headers, body });
    if (!response.ok) {
      let code = "http-error";
      let message = `${response.status}`;
      try {
        const doc = await response.json();
        code = doc.code ?? code;
        message = doc.message ?? message;
      } catch {
        // non-JSON error body, keep the status text
      }
      throw new GatewayError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  private getJson<T>(path: string): Promise<T> {
    return this.request<T>("GET", path);
  }

  private postJson<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>("POST", path, JSON.stringify(body), "application/json");
  }

  health(): Promise<HealthDoc> {
    return this.getJson("/health");
  }

  listKtypes(): Promise<KTypeDoc[]> {
    return this.getJson("/ktypes");
  }

  listKitems(): Promise<KItemDoc[]> {
    return this.getJson("/kitems");
  }

  getKitem(id: string): Promise<KItemDoc> {
    return this.getJson(`/kitems/${encodeURIComponent(id)}`);
  }

  createKitem(doc: {
    ktype: string;
    name: string;
    summary?: string;
    id?: string;
  }): Promise<KItemDoc> {
    return this.postJson("/kitems", doc);
  }

  getColumn(id: string, name: string): Promise<ColumnDoc> {
    return this.getJson(
      `/kitems/${encodeURIComponent(id)}/columns/${encodeURIComponent(name)}`,
    );
  }

  getLinkGraph(id: string, depth = 2): Promise<LinkGraphDoc> {
    return this.getJson(`/kitems/${encodeURIComponent(id)}/linkgraph?depth=${depth}`);
  }

  search(params: SearchParams): Promise<SearchHit[]> {
    return this.getJson(`/search?${searchQuery(params)}`);
  }

  sparql(query: string): Promise<SparqlResults> {
    return this.request("POST", "/sparql", query, "application/sparql-query");
  }

  vocabularyTerms(): Promise<VocabTermDoc[]> {
    return this.getJson("/vocabulary/terms");
  }

  getForm(ktype: string): Promise<FormSchemaDoc> {
    return this.getJson(`/ktypes/${encodeURIComponent(ktype)}/form`);
  }

  submitForm(
    itemId: string,
    ktype: string,
    values: Record<string, unknown>,
  ): Promise<{ triples_written: number; form_version: number }> {
    return this.postJson(
      `/kitems/${encodeURIComponent(itemId)}/forms/${encodeURIComponent(ktype)}/submit`,
      values,
    );
  }

  getRun(runId: string): Promise<RunDoc> {
    return this.getJson(`/runs/${encodeURIComponent(runId)}`);
  }

  runApp(
    appId: string,
    inputs: string[],
    settings: Record<string, unknown> = {},
  ): Promise<{ run_id: string; status: string }> {
    return this.postJson(`/apps/${encodeURIComponent(appId)}/run`, {
      inputs,
      settings,
    });
  }
}
