/** Payload shapes returned by the gateway REST routes. */

export interface KTypeDoc {
  id: string;
  name: string;
  description: string;
}

export interface LinkDoc {
  target: string;
  relation: string;
  label: string | null;
}

export interface AttachmentDoc {
  filename: string;
  media_type: string;
  derived: boolean;
  checksum: string;
  size: number;
}

export interface KItemDoc {
  id: string;
  ktype: string;
  name: string;
  summary: string;
  annotations: string[];
  links: LinkDoc[];
  attachments: AttachmentDoc[];
  columns: string[];
  created: string;
  updated: string;
}

export interface SearchHit {
  id: string;
  score: number;
  name: string;
  ktype: string;
  annotations: string[];
}

export interface ColumnDoc {
  name: string;
  values: number[];
  concept: string | null;
  unit: string | null;
}

export interface LinkGraphNode {
  id: string;
  name: string;
  ktype: string;
}

export interface LinkGraphEdge {
  source: string;
  target: string;
  relation: string;
}

export interface LinkGraphDoc {
  nodes: LinkGraphNode[];
  edges: LinkGraphEdge[];
}

export interface FormFieldDoc {
  key: string;
  label: string;
  concept: string;
  kind: string;
  unit: string | null;
  required: boolean;
  options: string[];
}

export interface FormSchemaDoc {
  ktype: string;
  version: number;
  fields: FormFieldDoc[];
}

export interface VocabTermDoc {
  iri: string;
  label: string;
  namespace?: string;
  parent?: string | null;
  description: string | null;
}

export interface RunDoc {
  run_id: string;
  app_id: string;
  status: string;
  inputs: string[];
  outputs: string[];
  log: string[];
}

export interface HealthDoc {
  version: string;
  kitems: number;
  ktypes: number;
  triples: number;
  graphs: number;
}

/** SPARQL Results JSON (SELECT form). */
export interface SparqlBinding {
  type: string;
  value: string;
  datatype?: string;
  "xml:lang"?: string;
}

export interface SparqlResults {
  head: { vars: string[] };
  results: { bindings: Record<string, SparqlBinding>[] };
}
