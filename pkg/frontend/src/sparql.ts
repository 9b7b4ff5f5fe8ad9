/** Turning SPARQL Results JSON into a plain table the views can render. */

import type { SparqlBinding, SparqlResults } from "./types.js";

export interface ResultTable {
  columns: string[];
  rows: (string | null)[][];
}

/** Display form of one binding: literals keep their lexical value, IRIs are
 * wrapped in angle brackets and blank nodes get the _: prefix. */
export function formatBinding(binding: SparqlBinding): string {
  if (binding.type === "uri") return `<${binding.value}>`;
  if (binding.type === "bnode") return `_:${binding.value}`;
  return binding.value;
}

/** Flattens SELECT results into rows following head.vars order. Unbound
 * variables come out as null so the table can show an empty cell. */
export function resultsToTable(results: SparqlResults): ResultTable {
  const columns = results.head.vars;
  const rows = results.results.bindings.map((solution) =>
    columns.map((name) => {
      const binding = solution[name];
      return binding === undefined ? null : formatBinding(binding);
    }),
  );
  return { columns, rows };
}

/** Renders a result table as an HTML table element. */
export function renderTable(table: ResultTable, doc: Document): HTMLTableElement {
  const el = doc.createElement("table");
  el.className = "sparql-results";
  const head = el.createTHead().insertRow();
  for (const name of table.columns) {
    const th = doc.createElement("th");
    th.textContent = name;
    head.appendChild(th);
  }
  const body = el.createTBody();
  for (const row of table.rows) {
    const tr = body.insertRow();
    for (const cell of row) {
      const td = tr.insertCell();
      td.textContent = cell ?? "";
      if (cell === null) td.className = "unbound";
    }
  }
  return el;
}
