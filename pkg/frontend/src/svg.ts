/** SVG geometry helpers: pie segments and grouped bars, as pure data. */

export interface PieSegment {
  label: string;
  share: number; // fraction of the total, 0..1
  path: string;
  color: string;
}

function polar(cx: number, cy: number, r: number, angle: number): [number, number] {
  return [cx + r * Math.sin(angle), cy - r * Math.cos(angle)];
}

export function arcPath(
  cx: number, cy: number, r: number, startAngle: number, endAngle: number,
): string {
  const [x0, y0] = polar(cx, cy, r, startAngle);
  const [x1, y1] = polar(cx, cy, r, endAngle);
  const largeArc = endAngle - startAngle > Math.PI ? 1 : 0;
  return `M ${cx} ${cy} L ${x0} ${y0} A ${r} ${r} 0 ${largeArc} 1 ${x1} ${y1} Z`;
}

/** Segments for the non-zero labels, in the given order; shares are count/total. */
export function pieSegments(
  counts: Record<string, number>,
  order: string[],
  colors: Record<string, string>,
  cx = 90, cy = 90, r = 80,
): PieSegment[] {
  const total = order.reduce((acc, label) => acc + (counts[label] ?? 0), 0);
  if (total === 0) return [];
  const segments: PieSegment[] = [];
  let angle = 0;
  for (const label of order) {
    const count = counts[label] ?? 0;
    if (count === 0) continue;
    const share = count / total;
    const sweep = share * 2 * Math.PI;
    const path =
      share >= 1
        ? // full circle: two half arcs, since a zero-length arc collapses
          `M ${cx} ${cy - r} A ${r} ${r} 0 1 1 ${cx} ${cy + r} ` +
          `A ${r} ${r} 0 1 1 ${cx} ${cy - r} Z`
        : arcPath(cx, cy, r, angle, angle + sweep);
    segments.push({ label, share, path, color: colors[label] ?? "#cccccc" });
    angle += sweep;
  }
  return segments;
}

export interface Bar {
  label: string;
  group: string;
  x: number;
  y: number;
  width: number;
  height: number;
  color: string;
  value: number;
}

/** Grouped bar layout: one group per entry, one bar per label, values 0..100. */
export function groupedBars(
  groups: { group: string; values: Record<string, number> }[],
  order: string[],
  colors: Record<string, string>,
  width: number,
  height: number,
  padding = 24,
): Bar[] {
  const bars: Bar[] = [];
  if (groups.length === 0) return bars;
  const groupWidth = (width - 2 * padding) / groups.length;
  const barWidth = (groupWidth * 0.85) / order.length;
  const plotHeight = height - 2 * padding;
  groups.forEach((entry, gi) => {
    order.forEach((label, li) => {
      const value = entry.values[label] ?? 0;
      const barHeight = (value / 100) * plotHeight;
      bars.push({
        label,
        group: entry.group,
        x: padding + gi * groupWidth + li * barWidth,
        y: padding + plotHeight - barHeight,
        width: barWidth,
        height: barHeight,
        color: colors[label] ?? "#cccccc",
        value,
      });
    });
  });
  return bars;
}

export function svgElement(width: number, height: number): SVGSVGElement {
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.setAttribute("height", String(height));
  return svg;
}

export function svgNode<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS("http://www.w3.org/2000/svg", tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, value);
  }
  return node;
}
