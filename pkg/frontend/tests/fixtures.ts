/** Canned API payloads shaped exactly like the service responses. */

import { AnalyticsBundle, HistorySeries, Transcript } from "../src/api.js";

export const bundle: AnalyticsBundle = {
  discussion_id: "demo1",
  source: "gold",
  distributions: {
    argument: {
      dimension: "argument",
      total: 3,
      counts: { claim: 2, evidence: 1, explanation: 0 },
      percentages: { claim: 66.66666666666667, evidence: 33.333333333333336, explanation: 0.0 },
    },
    specificity: {
      dimension: "specificity",
      total: 3,
      counts: { low: 1, medium: 1, high: 1 },
      percentages: { low: 33.333333333333336, medium: 33.333333333333336, high: 33.333333333333336 },
    },
    collaboration: {
      dimension: "collaboration",
      total: 3,
      counts: { new: 1, agree: 0, extension: 1, challenge_probe: 1 },
      percentages: { new: 33.333333333333336, agree: 0.0, extension: 33.333333333333336, challenge_probe: 33.333333333333336 },
    },
  },
  collaboration_map: {
    nodes: [
      { turn_index: 1, speaker_id: "S1", excerpt: "First idea." },
      { turn_index: 2, speaker_id: "S2", excerpt: "Building on it." },
      { turn_index: 3, speaker_id: "S3", excerpt: "But the text says no." },
    ],
    edges: [
      { target_turn_index: 2, reference_turn_index: 1, collaboration: "extension" },
      { target_turn_index: 3, reference_turn_index: 2, collaboration: "challenge_probe" },
    ],
  },
  assessment: [
    {
      dimension: "collaboration",
      label: "challenge_probe",
      weakness_below: 10,
      strength_at_or_above: 25,
      observed_percentage: 33.333333333333336,
      verdict: "strength",
      resources: [{ title: "Norms for respectful disagreement", url: "https://example.org/norms" }],
    },
    {
      dimension: "argument",
      label: "evidence",
      weakness_below: 15,
      strength_at_or_above: 30,
      observed_percentage: 12.5,
      verdict: "weakness",
      resources: [{ title: "Prompts for grounding claims", url: "https://example.org/evidence" }],
    },
  ],
};

export const transcript: Transcript = {
  discussion_id: "demo1",
  title: "demo",
  recorded_at: "2026-03-05",
  provenance: "gold_coded",
  annotations: "predicted",
  turns: [
    {
      turn_index: 0,
      speaker_id: "T",
      role: "teacher",
      reference_turn_index: null,
      adus: [{ adu_id: "t0a0", text: "What do we think?" }],
    },
    {
      turn_index: 1,
      speaker_id: "S1",
      role: "student",
      reference_turn_index: null,
      collaboration: "new",
      collaboration_probabilities: { new: 1, agree: 0, extension: 0, challenge_probe: 0 },
      adus: [
        {
          adu_id: "t1a0",
          text: "First idea.",
          argument: "claim",
          argument_probabilities: { claim: 0.832, evidence: 0.101, explanation: 0.067 },
          specificity: "low",
          specificity_probabilities: { low: 0.6, medium: 0.3, high: 0.1 },
        },
      ],
    },
    {
      turn_index: 2,
      speaker_id: "S2",
      role: "student",
      reference_turn_index: 1,
      collaboration: "extension",
      collaboration_probabilities: { new: 0.1, agree: 0.1, extension: 0.7, challenge_probe: 0.1 },
      adus: [
        {
          adu_id: "t2a0",
          text: "Building on it.",
          argument: "evidence",
          argument_probabilities: { claim: 0.2, evidence: 0.7, explanation: 0.1 },
          specificity: "high",
          specificity_probabilities: { low: 0.1, medium: 0.2, high: 0.7 },
        },
      ],
    },
  ],
};

export const history: HistorySeries = {
  source: "gold",
  entries: [
    {
      discussion_id: "earlier",
      title: "earlier",
      recorded_at: "2026-01-10",
      distributions: bundle.distributions,
    },
    {
      discussion_id: "later",
      title: "later",
      recorded_at: "2026-03-05",
      distributions: bundle.distributions,
    },
  ],
  skipped: [],
};
