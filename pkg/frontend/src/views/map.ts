/** Collaboration map: one node per student turn on a timeline, directed arcs
 * back to the referenced turn, colored by collaboration type.  Clicking a
 * node hands its turn index to the caller (the app scrolls the transcript).
 */

import { CollaborationMapData } from "../api.js";
import { LABEL_COLORS, displayLabel } from "../format.js";
import { svgElement, svgNode } from "../svg.js";

export interface NodePosition {
  turn_index: number;
  x: number;
  y: number;
}

export interface MapLayout {
  width: number;
  height: number;
  positions: NodePosition[];
  arcs: { path: string; collaboration: string; target: number; reference: number }[];
}

const SPACING = 72;
const BASELINE = 150;
const RADIUS = 16;

/** Pure geometry so tests can check it without a DOM. */
export function computeLayout(map: CollaborationMapData): MapLayout {
  const positions = map.nodes.map((node, i) => ({
    turn_index: node.turn_index,
    x: 48 + i * SPACING,
    y: BASELINE,
  }));
  const byIndex = new Map(positions.map((p) => [p.turn_index, p]));
  const arcs = map.edges.flatMap((edge) => {
    const from = byIndex.get(edge.target_turn_index);
    const to = byIndex.get(edge.reference_turn_index);
    if (!from || !to) return [];
    const lift = 28 + Math.abs(from.x - to.x) / 4;
    const midX = (from.x + to.x) / 2;
    return [{
      path: `M ${from.x} ${from.y - RADIUS} Q ${midX} ${from.y - RADIUS - lift} ` +
            `${to.x} ${to.y - RADIUS}`,
      collaboration: edge.collaboration,
      target: edge.target_turn_index,
      reference: edge.reference_turn_index,
    }];
  });
  return {
    width: Math.max(320, 96 + map.nodes.length * SPACING),
    height: 240,
    positions,
    arcs,
  };
}

export function renderCollaborationMap(
  root: HTMLElement,
  map: CollaborationMapData,
  onNodeClick: (turnIndex: number) => void,
): void {
  root.replaceChildren();
  root.className = "view map-view";

  const legend = document.createElement("ul");
  legend.className = "legend legend-row";
  for (const label of ["agree", "extension", "challenge_probe"]) {
    const item = document.createElement("li");
    item.className = "legend-item";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.backgroundColor = LABEL_COLORS[label];
    item.append(swatch, ` ${displayLabel(label)}`);
    legend.appendChild(item);
  }
  root.appendChild(legend);

  const layout = computeLayout(map);
  const svg = svgElement(layout.width, layout.height);

  const defs = svgNode("defs", {});
  for (const label of ["agree", "extension", "challenge_probe"]) {
    const marker = svgNode("marker", {
      id: `arrow-${label}`,
      viewBox: "0 0 8 8",
      refX: "7",
      refY: "4",
      markerWidth: "7",
      markerHeight: "7",
      orient: "auto-start-reverse",
    });
    marker.appendChild(svgNode("path", { d: "M 0 0 L 8 4 L 0 8 Z", fill: LABEL_COLORS[label] }));
    defs.appendChild(marker);
  }
  svg.appendChild(defs);

  for (const arc of layout.arcs) {
    svg.appendChild(svgNode("path", {
      d: arc.path,
      fill: "none",
      stroke: LABEL_COLORS[arc.collaboration] ?? "#666666",
      "stroke-width": "2",
      class: "map-edge",
      "data-collaboration": arc.collaboration,
      "data-target": String(arc.target),
      "data-reference": String(arc.reference),
      "marker-end": `url(#arrow-${arc.collaboration})`,
    }));
  }

  const excerptByIndex = new Map(map.nodes.map((n) => [n.turn_index, n]));
  for (const pos of layout.positions) {
    const node = excerptByIndex.get(pos.turn_index)!;
    const group = svgNode("g", {
      class: "map-node",
      "data-turn-index": String(pos.turn_index),
      cursor: "pointer",
    });
    const circle = svgNode("circle", {
      cx: String(pos.x),
      cy: String(pos.y),
      r: String(RADIUS),
      fill: "#4c72b0",
    });
    const title = svgNode("title", {});
    title.textContent = `${node.speaker_id}: ${node.excerpt}`;
    circle.appendChild(title);
    group.appendChild(circle);

    const number = svgNode("text", {
      x: String(pos.x),
      y: String(pos.y + 4),
      "text-anchor": "middle",
      fill: "#ffffff",
      "font-size": "11",
    });
    number.textContent = String(pos.turn_index);
    group.appendChild(number);

    const speaker = svgNode("text", {
      x: String(pos.x),
      y: String(pos.y + RADIUS + 16),
      "text-anchor": "middle",
      "font-size": "11",
      fill: "#333333",
    });
    speaker.textContent = node.speaker_id;
    group.appendChild(speaker);

    group.addEventListener("click", () => onNodeClick(pos.turn_index));
    svg.appendChild(group);
  }

  const scroller = document.createElement("div");
  scroller.className = "map-scroller";
  scroller.appendChild(svg);
  root.appendChild(scroller);
}
