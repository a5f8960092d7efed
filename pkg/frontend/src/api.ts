/** Typed client for the discussion analytics REST API.
 *
 * The dashboard computes nothing itself: every number it shows comes out of
 * one of these endpoints.
 */

export type Source = "gold" | "predicted";

export interface DistributionSummary {
  dimension: string;
  total: number;
  counts: Record<string, number>;
  percentages: Record<string, number>;
}

export interface MapNode {
  turn_index: number;
  speaker_id: string;
  excerpt: string;
}

export interface MapEdge {
  target_turn_index: number;
  reference_turn_index: number;
  collaboration: string;
}

export interface CollaborationMapData {
  nodes: MapNode[];
  edges: MapEdge[];
}

export interface ResourceLink {
  title: string;
  url: string;
}

export interface AssessmentEntry {
  dimension: string;
  label: string;
  weakness_below: number;
  strength_at_or_above: number;
  observed_percentage: number;
  verdict: "strength" | "weakness" | "neutral";
  resources: ResourceLink[];
}

export interface AnalyticsBundle {
  discussion_id: string;
  source: Source;
  distributions: Record<string, DistributionSummary>;
  collaboration_map: CollaborationMapData;
  assessment: AssessmentEntry[];
}

export interface TranscriptAdu {
  adu_id: string;
  text: string;
  argument?: string | null;
  specificity?: string | null;
  argument_probabilities?: Record<string, number> | null;
  specificity_probabilities?: Record<string, number> | null;
}

export interface TranscriptTurn {
  turn_index: number;
  speaker_id: string;
  role: "teacher" | "student";
  reference_turn_index: number | null;
  adus: TranscriptAdu[];
  collaboration?: string | null;
  collaboration_probabilities?: Record<string, number> | null;
}

export interface Transcript {
  discussion_id: string;
  title: string;
  recorded_at: string | null;
  provenance: string;
  annotations: string;
  turns: TranscriptTurn[];
}

export interface DiscussionMeta {
  discussion_id: string;
  title: string;
  recorded_at: string | null;
  versions: number;
  provenance: string;
}

export interface GoalRecord {
  goal_id: string;
  discussion_id: string;
  dimension: string;
  label: string;
  target_percentage: number;
  created_at: string;
  note: string;
}

export interface GoalRequest {
  discussion_id: string;
  dimension: string;
  label: string;
  target_percentage: number;
  note: string;
}

export interface HistoryEntry {
  discussion_id: string;
  title: string;
  recorded_at: string | null;
  distributions: Record<string, DistributionSummary>;
}

export interface HistorySeries {
  source: Source;
  entries: HistoryEntry[];
  skipped: { discussion_id: string; reason: string }[];
}

export class ApiError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`API ${status}: ${detail}`);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw new ApiError(response.status, await response.text());
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(private readonly baseUrl = "") {}

  private get<T>(path: string): Promise<T> {
    return fetch(this.baseUrl + path).then((r) => parseOrThrow<T>(r));
  }

  listDiscussions(): Promise<DiscussionMeta[]> {
    return this.get("/api/discussions");
  }

  analytics(discussionId: string, source: Source): Promise<AnalyticsBundle> {
    return this.get(`/api/discussions/${discussionId}/analytics?source=${source}`);
  }

  transcript(discussionId: string, annotations: Source): Promise<Transcript> {
    return this.get(`/api/discussions/${discussionId}/transcript?annotations=${annotations}`);
  }

  history(source: Source): Promise<HistorySeries> {
    return this.get(`/api/history?source=${source}`);
  }

  goals(discussionId?: string): Promise<GoalRecord[]> {
    const query = discussionId ? `?discussion_id=${discussionId}` : "";
    return this.get(`/api/goals${query}`);
  }

  async createGoal(goal: GoalRequest): Promise<GoalRecord> {
    const response = await fetch(`${this.baseUrl}/api/goals`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(goal),
    });
    return parseOrThrow<GoalRecord>(response);
  }

  async uploadDiscussion(csv: string, params: Record<string, string>): Promise<{ discussion_id: string }> {
    const query = new URLSearchParams(params).toString();
    const response = await fetch(`${this.baseUrl}/api/discussions?${query}`, {
      method: "POST",
      headers: { "Content-Type": "text/csv" },
      body: csv,
    });
    return parseOrThrow(response);
  }

  async classify(discussionId: string): Promise<{ job_id: string; state: string }> {
    const response = await fetch(`${this.baseUrl}/api/discussions/${discussionId}/classify`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: "{}",
    });
    return parseOrThrow(response);
  }

  job(jobId: string): Promise<{ job_id: string; state: string; error: string | null }> {
    return this.get(`/api/jobs/${jobId}`);
  }
}
