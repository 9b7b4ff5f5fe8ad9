/** Hand-rolled SVG line plots for container columns. No chart library; the
 * geometry is simple enough that a polyline and a handful of tick labels
 * cover what the console needs. */

const SVG_NS = "http://www.w3.org/2000/svg";

export interface PlotOptions {
  width?: number;
  height?: number;
  padding?: number;
  xLabel?: string;
  yLabel?: string;
  ticks?: number;
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

/** Linear mapping from a data domain onto pixel coordinates. A degenerate
 * domain (min == max) maps everything onto the middle of the range. */
export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0;
  const scale = ((value: number) => {
    if (span === 0) return (r0 + r1) / 2;
    return r0 + ((value - d0) / span) * (r1 - r0);
  }) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

/** Evenly spaced tick values across a domain, endpoints included. */
export function tickValues(domain: [number, number], count: number): number[] {
  if (count < 2) return [domain[0]];
  const step = (domain[1] - domain[0]) / (count - 1);
  return Array.from({ length: count }, (_, i) => domain[0] + i * step);
}

function extent(values: number[]): [number, number] {
  let lo = values[0];
  let hi = values[0];
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return [lo, hi];
}

/** Draws y against x as a single polyline with axes and tick labels.
 * Returns a detached <svg> element owned by the given document. */
export function linePlot(
  doc: Document,
  x: number[],
  y: number[],
  options: PlotOptions = {},
): SVGSVGElement {
  if (x.length !== y.length) {
    throw new Error(`x and y lengths differ: ${x.length} vs ${y.length}`);
  }
  if (x.length < 2) {
    throw new Error("a line plot needs at least two points");
  }
  const width = options.width ?? 480;
  const height = options.height ?? 300;
  const pad = options.padding ?? 40;
  const ticks = options.ticks ?? 5;

  const sx = linearScale(extent(x), [pad, width - pad]);
  const sy = linearScale(extent(y), [height - pad, pad]);

  const svg = doc.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  svg.setAttribute("class", "line-plot");

  const axes = doc.createElementNS(SVG_NS, "path");
  axes.setAttribute(
    "d",
    `M ${pad} ${pad} L ${pad} ${height - pad} L ${width - pad} ${height - pad}`,
  );
  axes.setAttribute("class", "axes");
  axes.setAttribute("fill", "none");
  axes.setAttribute("stroke", "currentColor");
  svg.appendChild(axes);

  for (const t of tickValues(sx.domain, ticks)) {
    const label = doc.createElementNS(SVG_NS, "text");
    label.setAttribute("x", sx(t).toFixed(2));
    label.setAttribute("y", String(height - pad / 3));
    label.setAttribute("class", "tick tick-x");
    label.setAttribute("text-anchor", "middle");
    label.textContent = formatTick(t);
    svg.appendChild(label);
  }
  for (const t of tickValues(sy.domain, ticks)) {
    const label = doc.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(pad / 3));
    label.setAttribute("y", sy(t).toFixed(2));
    label.setAttribute("class", "tick tick-y");
    label.setAttribute("text-anchor", "middle");
    label.textContent = formatTick(t);
    svg.appendChild(label);
  }

  const line = doc.createElementNS(SVG_NS, "polyline");
  line.setAttribute(
    "points",
    x.map((v, i) => `${sx(v).toFixed(2)},${sy(y[i]).toFixed(2)}`).join(" "),
  );
  line.setAttribute("fill", "none");
  line.setAttribute("stroke", "steelblue");
  line.setAttribute("class", "series");
  svg.appendChild(line);

  if (options.xLabel) {
    const label = doc.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(width / 2));
    label.setAttribute("y", String(height - 4));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("class", "axis-label axis-label-x");
    label.textContent = options.xLabel;
    svg.appendChild(label);
  }
  if (options.yLabel) {
    const label = doc.createElementNS(SVG_NS, "text");
    label.setAttribute("x", "12");
    label.setAttribute("y", String(height / 2));
    label.setAttribute("text-anchor", "middle");
    label.setAttribute("transform", `rotate(-90 12 ${height / 2})`);
    label.setAttribute("class", "axis-label axis-label-y");
    label.textContent = options.yLabel;
    svg.appendChild(label);
  }
  return svg;
}

/** Compact tick formatting, six significant digits at most. */
export function formatTick(value: number): string {
  return String(Number(value.toPrecision(6)));
}
