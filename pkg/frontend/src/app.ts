/** App shell: discussion/source pickers, view navigation, data loading. */

import { ApiClient, ApiError, GoalRequest, Source } from "./api.js";
import { renderHistory } from "./views/history.js";
import { renderCollaborationMap } from "./views/map.js";
import { renderOverview } from "./views/overview.js";
import { renderPlan } from "./views/plan.js";
import { TranscriptFilter, renderTranscript } from "./views/transcript.js";

export type ViewName = "overview" | "transcript" | "map" | "plan" | "history";

export const VIEW_TITLES: Record<ViewName, string> = {
  overview: "Overview",
  transcript: "Annotated Transcript",
  map: "Collaboration Map",
  plan: "Plan Next Discussion",
  history: "History",
};

export interface AppState {
  view: ViewName;
  discussionId: string | null;
  source: Source;
  filter: TranscriptFilter | null;
  focusTurn: number | null;
}

export class App {
  readonly state: AppState = {
    view: "overview",
    discussionId: null,
    source: "gold",
    filter: null,
    focusTurn: null,
  };

  private viewRoot!: HTMLElement;
  private statusBar!: HTMLElement;
  private discussionSelect!: HTMLSelectElement;
  private sourceSelect!: HTMLSelectElement;

  constructor(private readonly root: HTMLElement, private readonly api: ApiClient) {}

  async start(): Promise<void> {
    this.buildShell();
    const discussions = await this.api.listDiscussions();
    this.discussionSelect.replaceChildren();
    for (const meta of discussions) {
      const option = document.createElement("option");
      option.value = meta.discussion_id;
      option.textContent = `${meta.title} (${meta.discussion_id})`;
      this.discussionSelect.appendChild(option);
    }
    this.state.discussionId = discussions[0]?.discussion_id ?? null;
    await this.refresh();
  }

  private buildShell(): void {
    this.root.replaceChildren();
    const header = document.createElement("header");
    header.className = "app-header";

    const title = document.createElement("h1");
    title.textContent = "Discussion analytics";
    header.appendChild(title);

    const nav = document.createElement("nav");
    nav.className = "view-nav";
    for (const [view, label] of Object.entries(VIEW_TITLES) as [ViewName, string][]) {
      const button = document.createElement("button");
      button.type = "button";
      button.dataset.view = view;
      button.textContent = label;
      button.addEventListener("click", () => {
        void this.show(view);
      });
      nav.appendChild(button);
    }
    header.appendChild(nav);

    const controls = document.createElement("div");
    controls.className = "controls";
    this.discussionSelect = document.createElement("select");
    this.discussionSelect.id = "discussion-select";
    this.discussionSelect.addEventListener("change", () => {
      this.state.discussionId = this.discussionSelect.value;
      void this.refresh();
    });
    this.sourceSelect = document.createElement("select");
    this.sourceSelect.id = "source-select";
    for (const source of ["gold", "predicted"]) {
      const option = document.createElement("option");
      option.value = source;
      option.textContent = `${source} labels`;
      this.sourceSelect.appendChild(option);
    }
    this.sourceSelect.addEventListener("change", () => {
      this.state.source = this.sourceSelect.value as Source;
      void this.refresh();
    });
    controls.append(this.discussionSelect, this.sourceSelect);
    header.appendChild(controls);
    this.root.appendChild(header);

    this.statusBar = document.createElement("p");
    this.statusBar.className = "status-bar";
    this.root.appendChild(this.statusBar);

    this.viewRoot = document.createElement("main");
    this.viewRoot.id = "view-root";
    this.root.appendChild(this.viewRoot);
  }

  async show(view: ViewName): Promise<void> {
    this.state.view = view;
    await this.refresh();
  }

  /** Map node click: jump to the transcript and focus the turn. */
  private readonly onNodeClick = (turnIndex: number): void => {
    this.state.focusTurn = turnIndex;
    void this.show("transcript");
  };

  private readonly onFilter = (filter: TranscriptFilter | null): void => {
    this.state.filter = filter;
    void this.refresh();
  };

  private readonly onGoalSubmit = (goal: GoalRequest): void => {
    void this.api
      .createGoal(goal)
      .then(() => this.refresh()) // optimistic refetch after the mutation
      .catch((error) => this.reportError(error));
  };

  private reportError(error: unknown): void {
    if (error instanceof ApiError && error.status === 409) {
      this.statusBar.textContent =
        "The requested labels are not available for this discussion yet " +
        "(run classification or switch the source).";
    } else {
      this.statusBar.textContent = String(error);
    }
    this.statusBar.classList.add("error");
  }

  async refresh(): Promise<void> {
    const { discussionId, source, view } = this.state;
    this.statusBar.textContent = "";
    this.statusBar.classList.remove("error");
    for (const button of this.root.querySelectorAll<HTMLButtonElement>(".view-nav button")) {
      button.classList.toggle("active", button.dataset.view === view);
    }
    if (!discussionId) {
      this.viewRoot.textContent = "No discussions uploaded yet.";
      return;
    }
    try {
      switch (view) {
        case "overview": {
          renderOverview(this.viewRoot, await this.api.analytics(discussionId, source));
          break;
        }
        case "transcript": {
          const transcript = await this.api.transcript(discussionId, source);
          renderTranscript(this.viewRoot, transcript, this.state.filter, this.onFilter);
          if (this.state.focusTurn !== null) {
            const target = this.viewRoot.querySelector<HTMLElement>(
              `#turn-${this.state.focusTurn}`,
            );
            if (target) {
              target.classList.add("focused");
              if (typeof target.scrollIntoView === "function") {
                target.scrollIntoView({ block: "center" });
              }
            }
            this.state.focusTurn = null;
          }
          break;
        }
        case "map": {
          const bundle = await this.api.analytics(discussionId, source);
          renderCollaborationMap(this.viewRoot, bundle.collaboration_map, this.onNodeClick);
          break;
        }
        case "plan": {
          const [bundle, goals] = await Promise.all([
            this.api.analytics(discussionId, source),
            this.api.goals(discussionId),
          ]);
          renderPlan(this.viewRoot, discussionId, bundle.assessment, goals, this.onGoalSubmit);
          break;
        }
        case "history": {
          const [series, goals] = await Promise.all([
            this.api.history(source),
            this.api.goals(),
          ]);
          renderHistory(this.viewRoot, series, goals);
          break;
        }
      }
    } catch (error) {
      this.viewRoot.replaceChildren();
      this.reportError(error);
    }
  }
}

export function mount(root: HTMLElement, baseUrl = ""): App {
  const app = new App(root, new ApiClient(baseUrl));
  void app.start();
  return app;
}

declare global {
  interface Window {
    discusskitApp?: App;
  }
}

if (typeof document !== "undefined") {
  const container = document.getElementById("app");
  if (container) {
    window.discusskitApp = mount(container);
  }
}
