/** Annotated transcript: turns in order with label chips per ADU; clicking a
 * label filter highlights matching ADUs; prediction chips carry the full
 * probability distribution as a tooltip. */

import { Transcript, TranscriptAdu, TranscriptTurn } from "../api.js";
import { CLASSES, LABEL_COLORS, displayLabel, probabilityTooltip } from "../format.js";

export interface TranscriptFilter {
  dimension: string;
  label: string;
}

function chip(
  dimension: string,
  label: string,
  probabilities: Record<string, number> | null | undefined,
): HTMLElement {
  const el = document.createElement("span");
  el.className = "chip";
  el.dataset.dimension = dimension;
  el.dataset.label = label;
  el.style.backgroundColor = LABEL_COLORS[label] ?? "#cccccc";
  el.textContent = displayLabel(label);
  if (probabilities) {
    el.title = probabilityTooltip(probabilities, CLASSES[dimension as keyof typeof CLASSES] ?? []);
  }
  return el;
}

function matches(filter: TranscriptFilter, dimension: string, label: string | null | undefined): boolean {
  return filter.dimension === dimension && filter.label === label;
}

function renderAdu(adu: TranscriptAdu, turn: TranscriptTurn, filter: TranscriptFilter | null): HTMLElement {
  const el = document.createElement("div");
  el.className = "adu";
  el.dataset.aduId = adu.adu_id;

  const text = document.createElement("span");
  text.className = "adu-text";
  text.textContent = adu.text;
  el.appendChild(text);

  if (turn.role === "student") {
    if (adu.argument) {
      el.appendChild(chip("argument", adu.argument, adu.argument_probabilities));
    }
    if (adu.specificity) {
      el.appendChild(chip("specificity", adu.specificity, adu.specificity_probabilities));
    }
  }
  const highlighted =
    filter !== null &&
    (matches(filter, "argument", adu.argument) || matches(filter, "specificity", adu.specificity));
  if (highlighted) {
    el.classList.add("highlight");
  }
  return el;
}

function renderTurn(turn: TranscriptTurn, filter: TranscriptFilter | null): HTMLElement {
  const el = document.createElement("article");
  el.className = `turn ${turn.role}`;
  el.id = `turn-${turn.turn_index}`;
  el.dataset.turnIndex = String(turn.turn_index);

  const header = document.createElement("header");
  const speaker = document.createElement("strong");
  speaker.textContent = `${turn.turn_index}. ${turn.speaker_id}`;
  header.appendChild(speaker);
  if (turn.role === "student" && turn.collaboration) {
    const collab = chip("collaboration", turn.collaboration, turn.collaboration_probabilities);
    if (turn.reference_turn_index !== null) {
      collab.textContent += ` → ${turn.reference_turn_index}`;
    }
    header.appendChild(collab);
    if (filter && matches(filter, "collaboration", turn.collaboration)) {
      el.classList.add("highlight");
    }
  }
  el.appendChild(header);

  for (const adu of turn.adus) {
    el.appendChild(renderAdu(adu, turn, filter));
  }
  return el;
}

export function renderTranscript(
  root: HTMLElement,
  transcript: Transcript,
  filter: TranscriptFilter | null,
  onFilter: (filter: TranscriptFilter | null) => void,
): void {
  root.replaceChildren();
  root.className = "view transcript-view";

  const bar = document.createElement("div");
  bar.className = "filter-bar";
  for (const [dimension, labels] of Object.entries(CLASSES)) {
    for (const label of labels) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "filter-button";
      button.dataset.dimension = dimension;
      button.dataset.label = label;
      button.textContent = displayLabel(label);
      button.style.borderColor = LABEL_COLORS[label] ?? "#cccccc";
      const active = filter !== null && filter.dimension === dimension && filter.label === label;
      if (active) {
        button.classList.add("active");
      }
      button.addEventListener("click", () => {
        onFilter(active ? null : { dimension, label });
      });
      bar.appendChild(button);
    }
  }
  root.appendChild(bar);

  const list = document.createElement("div");
  list.className = "turns";
  for (const turn of transcript.turns) {
    list.appendChild(renderTurn(turn, filter));
  }
  root.appendChild(list);
}
