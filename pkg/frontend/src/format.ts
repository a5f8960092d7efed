/** Display formatting; the one place rounding is allowed to happen. */

export const DIMENSIONS = ["argument", "specificity", "collaboration"] as const;
export type Dimension = (typeof DIMENSIONS)[number];

export const CLASSES: Record<Dimension, string[]> = {
  argument: ["claim", "evidence", "explanation"],
  specificity: ["low", "medium", "high"],
  collaboration: ["new", "agree", "extension", "challenge_probe"],
};

export const LABEL_COLORS: Record<string, string> = {
  claim: "#4c72b0",
  evidence: "#dd8452",
  explanation: "#55a868",
  low: "#c9c9c9",
  medium: "#8da0cb",
  high: "#2d5986",
  new: "#999999",
  agree: "#55a868",
  extension: "#4c72b0",
  challenge_probe: "#dd8452",
};

/** API percentages render with exactly one decimal place. */
export function formatPercent(value: number): string {
  return `${value.toFixed(1)}%`;
}

/** File-safe label spellings back to display form. */
export function displayLabel(label: string): string {
  return label === "challenge_probe" ? "challenge/probe" : label;
}

export function probabilityTooltip(probabilities: Record<string, number>, order: string[]): string {
  return order
    .filter((label) => label in probabilities)
    .map((label) => `${displayLabel(label)} ${formatPercent(probabilities[label] * 100)}`)
    .join(" · ");
}
