/** Overview: one pie per dimension, segment shares straight off the API
 * percentages, legend covering every label including zero counts. */

import { AnalyticsBundle, DistributionSummary } from "../api.js";
import { CLASSES, DIMENSIONS, Dimension, LABEL_COLORS, displayLabel, formatPercent } from "../format.js";
import { pieSegments, svgElement, svgNode } from "../svg.js";

function renderPie(summary: DistributionSummary, dimension: Dimension): HTMLElement {
  const card = document.createElement("section");
  card.className = "card pie-card";
  card.dataset.dimension = dimension;

  const heading = document.createElement("h3");
  heading.textContent = dimension;
  card.appendChild(heading);

  const svg = svgElement(180, 180);
  for (const segment of pieSegments(summary.counts, CLASSES[dimension], LABEL_COLORS)) {
    const path = svgNode("path", {
      d: segment.path,
      fill: segment.color,
      stroke: "#ffffff",
      "stroke-width": "1",
      class: "pie-segment",
      "data-label": segment.label,
      "data-share": segment.share.toFixed(6),
    });
    const title = svgNode("title", {});
    title.textContent = `${displayLabel(segment.label)}: ${formatPercent(
      summary.percentages[segment.label],
    )}`;
    path.appendChild(title);
    svg.appendChild(path);
  }
  card.appendChild(svg);

  const legend = document.createElement("ul");
  legend.className = "legend";
  for (const label of CLASSES[dimension]) {
    const item = document.createElement("li");
    item.className = "legend-item";
    item.dataset.label = label;
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = LABEL_COLORS[label] ?? "#cccccc";
    item.appendChild(swatch);
    const text = document.createElement("span");
    text.className = "legend-text";
    text.textContent =
      `${displayLabel(label)}: ${summary.counts[label]} ` +
      `(${formatPercent(summary.percentages[label])})`;
    item.appendChild(text);
    legend.appendChild(item);
  }
  card.appendChild(legend);
  return card;
}

export function renderOverview(root: HTMLElement, bundle: AnalyticsBundle): void {
  root.replaceChildren();
  root.className = "view overview-view";
  for (const dimension of DIMENSIONS) {
    root.appendChild(renderPie(bundle.distributions[dimension], dimension));
  }
}
