/** Link-graph rendering. Nodes sit on a circle in the order the gateway
 * returns them, which keeps the layout deterministic without a physics
 * simulation. */

import type { LinkGraphDoc } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface NodePosition {
  id: string;
  x: number;
  y: number;
}

/** Places n nodes evenly on a circle, starting at twelve o'clock. A single
 * node lands in the center. */
export function circularLayout(
  ids: string[],
  width: number,
  height: number,
  margin = 50,
): NodePosition[] {
  const cx = width / 2;
  const cy = height / 2;
  if (ids.length === 1) return [{ id: ids[0], x: cx, y: cy }];
  const radius = Math.min(width, height) / 2 - margin;
  return ids.map((id, i) => {
    const angle = (2 * Math.PI * i) / ids.length - Math.PI / 2;
    return { id, x: cx + radius * Math.cos(angle), y: cy + radius * Math.sin(angle) };
  });
}

function shorten(iri: string): string {
  const cut = Math.max(iri.lastIndexOf("/"), iri.lastIndexOf("#"));
  return cut >= 0 ? iri.slice(cut + 1) : iri;
}

/** Renders the gateway's linkgraph document as a static SVG: one line per
 * edge with the relation as its label, one labelled circle per node. */
export function renderLinkGraph(
  doc: Document,
  graph: LinkGraphDoc,
  width = 520,
  height = 400,
): SVGSVGElement {
  const positions = new Map(
    circularLayout(
      graph.nodes.map((n) => n.id),
      width,
      height,
    ).map((p) => [p.id, p]),
  );

  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("class", "link-graph");

  for (const edge of graph.edges) {
    const a = positions.get(edge.source);
    const b = positions.get(edge.target);
    if (!a || !b) continue; // edge touching a node outside the depth cut
    const line = doc.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", a.x.toFixed(2));
    line.setAttribute("y1", a.y.toFixed(2));
    line.setAttribute("x2", b.x.toFixed(2));
    line.setAttribute("y2", b.y.toFixed(2));
    line.setAttribute("stroke", "currentColor");
    line.setAttribute("class", "edge");
    line.setAttribute("data-relation", edge.relation);
    svg.appendChild(line);

    const label = doc.createElementNS(SVG_NS, "text");
    label.setAttribute("x", ((a.x + b.x) / 2).toFixed(2));
    label.setAttribute("y", ((a.y + b.y) / 2).toFixed(2));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("class", "edge-label");
    label.textContent = shorten(edge.relation);
    svg.appendChild(label);
  }

  for (const node of graph.nodes) {
    const p = positions.get(node.id)!;
    const group = doc.createElementNS(SVG_NS, "g");
    group.setAttribute("class", `node node-${node.ktype}`);
    group.setAttribute("data-id", node.id);

    const circle = doc.createElementNS(SVG_NS, "circle");
    circle.setAttribute("cx", p.x.toFixed(2));
    circle.setAttribute("cy", p.y.toFixed(2));
    circle.setAttribute("r", "16");
    group.appendChild(circle);

    const label = doc.createElementNS(SVG_NS, "text");
    label.setAttribute("x", p.x.toFixed(2));
    label.setAttribute("y", (p.y + 28).toFixed(2));
    label.setAttribute("text-anchor", "middle");
    label.textContent = node.name;
    group.appendChild(label);

    svg.appendChild(group);
  }
  return svg;
}
