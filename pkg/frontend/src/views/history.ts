/** History: grouped bars of label percentages across discussions in API
 * (date) order, with stored goal targets overlaid as reference lines. */

import { GoalRecord, HistorySeries } from "../api.js";
import { CLASSES, DIMENSIONS, Dimension, LABEL_COLORS, displayLabel, formatPercent } from "../format.js";
import { groupedBars, svgElement, svgNode } from "../svg.js";

const WIDTH = 560;
const HEIGHT = 240;
const PADDING = 24;

function chart(series: HistorySeries, dimension: Dimension, goals: GoalRecord[]): HTMLElement {
  const card = document.createElement("section");
  card.className = "card history-card";
  card.dataset.dimension = dimension;

  const heading = document.createElement("h3");
  heading.textContent = dimension;
  card.appendChild(heading);

  const groups = series.entries.map((entry) => ({
    group: entry.discussion_id,
    values: entry.distributions[dimension].percentages,
  }));
  const svg = svgElement(WIDTH, HEIGHT);

  for (const bar of groupedBars(groups, CLASSES[dimension], LABEL_COLORS, WIDTH, HEIGHT, PADDING)) {
    const rect = svgNode("rect", {
      x: bar.x.toFixed(1),
      y: bar.y.toFixed(1),
      width: bar.width.toFixed(1),
      height: bar.height.toFixed(1),
      fill: bar.color,
      class: "history-bar",
      "data-group": bar.group,
      "data-label": bar.label,
      "data-value": formatPercent(bar.value),
    });
    const title = svgNode("title", {});
    title.textContent = `${bar.group} ${displayLabel(bar.label)}: ${formatPercent(bar.value)}`;
    rect.appendChild(title);
    svg.appendChild(rect);
  }

  const plotHeight = HEIGHT - 2 * PADDING;
  for (const goal of goals.filter((g) => g.dimension === dimension)) {
    const y = PADDING + plotHeight - (goal.target_percentage / 100) * plotHeight;
    svg.appendChild(svgNode("line", {
      x1: String(PADDING),
      x2: String(WIDTH - PADDING),
      y1: y.toFixed(1),
      y2: y.toFixed(1),
      stroke: LABEL_COLORS[goal.label] ?? "#333333",
      "stroke-dasharray": "6,4",
      class: "goal-line",
      "data-label": goal.label,
      "data-target": String(goal.target_percentage),
    }));
    const text = svgNode("text", {
      x: String(WIDTH - PADDING),
      y: (y - 4).toFixed(1),
      "text-anchor": "end",
      "font-size": "10",
      fill: "#333333",
    });
    text.textContent = `goal: ${displayLabel(goal.label)} ${formatPercent(goal.target_percentage)}`;
    svg.appendChild(text);
  }

  // x-axis group labels
  const groupWidth = (WIDTH - 2 * PADDING) / Math.max(groups.length, 1);
  groups.forEach((group, i) => {
    const text = svgNode("text", {
      x: (PADDING + (i + 0.5) * groupWidth).toFixed(1),
      y: String(HEIGHT - 6),
      "text-anchor": "middle",
      "font-size": "10",
      fill: "#333333",
      class: "history-group-label",
    });
    text.textContent = group.group;
    svg.appendChild(text);
  });

  card.appendChild(svg);
  return card;
}

export function renderHistory(
  root: HTMLElement,
  series: HistorySeries,
  goals: GoalRecord[],
): void {
  root.replaceChildren();
  root.className = "view history-view";
  if (series.entries.length === 0) {
    const empty = document.createElement("p");
    empty.textContent = "No discussions with the requested labels yet.";
    root.appendChild(empty);
    return;
  }
  for (const dimension of DIMENSIONS) {
    root.appendChild(chart(series, dimension, goals));
  }
}
