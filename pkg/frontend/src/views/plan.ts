/** Plan Next Discussion: the strengths/weaknesses report, instructional
 * resource links per weakness, and the goal form (validated client-side,
 * posted through the API). */

import { AssessmentEntry, GoalRecord, GoalRequest } from "../api.js";
import { CLASSES, DIMENSIONS, displayLabel, formatPercent } from "../format.js";

function assessmentTable(assessment: AssessmentEntry[]): HTMLElement {
  const table = document.createElement("table");
  table.className = "assessment-table";
  const head = document.createElement("tr");
  for (const column of ["dimension", "label", "observed", "verdict", "resources"]) {
    const th = document.createElement("th");
    th.textContent = column;
    head.appendChild(th);
  }
  table.appendChild(head);

  for (const entry of assessment) {
    const row = document.createElement("tr");
    row.className = `assessment-row verdict-${entry.verdict}`;
    row.dataset.dimension = entry.dimension;
    row.dataset.label = entry.label;

    const cells = [
      entry.dimension,
      displayLabel(entry.label),
      formatPercent(entry.observed_percentage),
      entry.verdict,
    ];
    for (const value of cells) {
      const td = document.createElement("td");
      td.textContent = value;
      row.appendChild(td);
    }
    const links = document.createElement("td");
    if (entry.verdict === "weakness") {
      for (const resource of entry.resources) {
        const a = document.createElement("a");
        a.href = resource.url;
        a.textContent = resource.title;
        a.target = "_blank";
        a.className = "resource-link";
        links.appendChild(a);
      }
    }
    row.appendChild(links);
    table.appendChild(row);
  }
  return table;
}

function goalList(goals: GoalRecord[]): HTMLElement {
  const list = document.createElement("ul");
  list.className = "goal-list";
  for (const goal of goals) {
    const item = document.createElement("li");
    item.className = "goal-item";
    item.dataset.goalId = goal.goal_id;
    item.textContent =
      `${goal.dimension} / ${displayLabel(goal.label)} → ` +
      `${formatPercent(goal.target_percentage)}` +
      (goal.note ? ` — ${goal.note}` : "");
    list.appendChild(item);
  }
  return list;
}

export function renderPlan(
  root: HTMLElement,
  discussionId: string,
  assessment: AssessmentEntry[],
  goals: GoalRecord[],
  onSubmit: (goal: GoalRequest) => void,
): void {
  root.replaceChildren();
  root.className = "view plan-view";

  const strengths = document.createElement("section");
  strengths.className = "card";
  const heading = document.createElement("h3");
  heading.textContent = "Strengths and weaknesses";
  strengths.append(heading, assessmentTable(assessment));
  root.appendChild(strengths);

  const form = document.createElement("form");
  form.className = "card goal-form";
  const formHeading = document.createElement("h3");
  formHeading.textContent = "Set a goal for the next discussion";
  form.appendChild(formHeading);

  const dimensionSelect = document.createElement("select");
  dimensionSelect.name = "dimension";
  for (const dimension of DIMENSIONS) {
    const option = document.createElement("option");
    option.value = dimension;
    option.textContent = dimension;
    dimensionSelect.appendChild(option);
  }
  const labelSelect = document.createElement("select");
  labelSelect.name = "label";
  const fillLabels = () => {
    labelSelect.replaceChildren();
    for (const label of CLASSES[dimensionSelect.value as keyof typeof CLASSES]) {
      const option = document.createElement("option");
      option.value = label;
      option.textContent = displayLabel(label);
      labelSelect.appendChild(option);
    }
  };
  fillLabels();
  dimensionSelect.addEventListener("change", fillLabels);

  const target = document.createElement("input");
  target.name = "target";
  target.type = "number";
  target.placeholder = "target %";
  const note = document.createElement("input");
  note.name = "note";
  note.type = "text";
  note.placeholder = "note";

  const submit = document.createElement("button");
  submit.type = "submit";
  submit.textContent = "Add goal";

  const error = document.createElement("p");
  error.className = "form-error";
  error.hidden = true;

  form.append(dimensionSelect, labelSelect, target, note, submit, error);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const value = Number(target.value);
    if (!target.value || Number.isNaN(value) || value < 0 || value > 100) {
      error.textContent = "Target must be a percentage between 0 and 100.";
      error.hidden = false;
      return; // invalid input never reaches the API
    }
    error.hidden = true;
    onSubmit({
      discussion_id: discussionId,
      dimension: dimensionSelect.value,
      label: labelSelect.value,
      target_percentage: value,
      note: note.value,
    });
  });
  root.appendChild(form);

  const goalsCard = document.createElement("section");
  goalsCard.className = "card";
  const goalsHeading = document.createElement("h3");
  goalsHeading.textContent = "Goals";
  goalsCard.append(goalsHeading, goalList(goals));
  root.appendChild(goalsCard);
}
