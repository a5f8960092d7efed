"""REST API over the store and the analytics/classification modules.

Responses are pure projections of the store plus module computations.
Discussions are versioned: upload is version 1, every classification run
appends a version, and analytics read the latest one.
"""

from __future__ import annotations

import json
from contextlib import asynccontextmanager
from datetime import date
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from pydantic import BaseModel

from .analytics import (
    AssessmentRule,
    GoalRecord,
    UnknownDimension,
    assess_strengths_weaknesses,
    build_collaboration_map,
    compare_history,
    compute_distribution,
    utc_now_iso,
)
from .config import AppConfig
from .demo import build_demo_heads, default_rules_json, resource_links_json
from .embedding import DimensionMismatch
from .features import WindowConfig
from .head import Task, load_head, save_head
from .jobs import JobKind, JobRunner
from .metrics import MissingLabels, evaluate_discussions
from .model import (
    ARGUMENT_CLASSES,
    COLLABORATION_CLASSES,
    DIMENSIONS,
    SPECIFICITY_CLASSES,
    Discussion,
    SpeakerRole,
    argmax_label,
)
from .predict import classify_discussion
from .store import DuplicateEntity, Store, UnknownEntity
from .transcript_io import ParseError, parse_transcript

DEMO_HEAD_IDS = {
    Task.ARGUMENT: "demo-argument",
    Task.SPECIFICITY: "demo-specificity",
    Task.COLLABORATION: "demo-collaboration",
}


class ClassifyRequest(BaseModel):
    backend: Optional[str] = None
    head_ids: Optional[list[str]] = None
    window: Optional[dict] = None
    seed: Optional[int] = None


class GoalRequest(BaseModel):
    discussion_id: str
    dimension: str
    label: str
    target_percentage: float
    note: str = ""


def _load_rules(store: Store) -> list[AssessmentRule]:
    rules = []
    for rule_id in store.list_ids("rules"):
        doc = store.get("rules", rule_id)
        rules.append(AssessmentRule(
            doc["dimension"], doc["label"],
            float(doc["weakness_below"]), float(doc["strength_at_or_above"])))
    return rules


def _seed_rules(store: Store, cfg: AppConfig) -> None:
    if store.list_ids("rules"):
        return
    if cfg.rules_path:
        with open(cfg.rules_path, encoding="utf-8") as fh:
            raw = json.load(fh)
    else:
        raw = default_rules_json()
    for i, doc in enumerate(raw):
        store.put("rules", f"rule-{i:04d}", doc)


def _load_resources(cfg: AppConfig) -> dict:
    if cfg.resources_path:
        with open(cfg.resources_path, encoding="utf-8") as fh:
            return json.load(fh)
    return resource_links_json()


def _transcript_json(d: Discussion, annotations: str) -> dict:
    turns = []
    for turn in d.turns:
        adus = []
        for adu in turn.adus:
            entry: dict = {"adu_id": adu.adu_id, "text": adu.text}
            if annotations == "gold":
                entry["argument"] = adu.gold_argument.value if adu.gold_argument else None
                entry["specificity"] = adu.gold_specificity.value if adu.gold_specificity else None
            elif annotations == "predicted":
                entry["argument"] = (argmax_label(adu.predicted_argument, ARGUMENT_CLASSES)
                                     if adu.predicted_argument else None)
                entry["argument_probabilities"] = adu.predicted_argument
                entry["specificity"] = (argmax_label(adu.predicted_specificity, SPECIFICITY_CLASSES)
                                        if adu.predicted_specificity else None)
                entry["specificity_probabilities"] = adu.predicted_specificity
            adus.append(entry)
        t: dict = {
            "turn_index": turn.turn_index,
            "speaker_id": turn.speaker_id,
            "role": turn.role.value,
            "reference_turn_index": turn.reference_turn_index,
            "adus": adus,
        }
        if annotations == "gold":
            t["collaboration"] = (turn.gold_collaboration.value
                                  if turn.gold_collaboration else None)
        elif annotations == "predicted":
            t["collaboration"] = (argmax_label(turn.predicted_collaboration, COLLABORATION_CLASSES)
                                  if turn.predicted_collaboration else None)
            t["collaboration_probabilities"] = turn.predicted_collaboration
        turns.append(t)
    return {
        "discussion_id": d.discussion_id,
        "title": d.title,
        "recorded_at": d.recorded_at.isoformat() if d.recorded_at else None,
        "provenance": d.provenance.value,
        "annotations": annotations,
        "turns": turns,
    }


def _has_source_labels(d: Discussion, source: str) -> bool:
    for turn in d.turns:
        if turn.role is not SpeakerRole.STUDENT:
            continue
        for adu in turn.adus:
            if source == "gold" and adu.gold_argument is None:
                return False
            if source == "predicted" and adu.predicted_argument is None:
                return False
    return True


def create_app(cfg: AppConfig) -> FastAPI:
    store = Store(cfg.data_root)
    _seed_rules(store, cfg)
    resources = _load_resources(cfg)
    runner = JobRunner()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        runner.start()
        yield
        runner.stop()

    app = FastAPI(title="discussion analytics service", lifespan=lifespan)
    app.state.store = store
    app.state.runner = runner
    app.state.config = cfg

    from fastapi.middleware.cors import CORSMiddleware
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    if cfg.ui_root:
        from fastapi.staticfiles import StaticFiles
        app.mount("/ui", StaticFiles(directory=cfg.ui_root, html=True), name="ui")

    def get_discussion_or_404(discussion_id: str, version: Optional[int] = None) -> Discussion:
        try:
            return store.load_discussion(discussion_id, version)
        except UnknownEntity:
            raise HTTPException(404, f"unknown discussion {discussion_id!r}")

    def check_source(source: str) -> str:
        if source not in ("gold", "predicted"):
            raise HTTPException(400, "source must be 'gold' or 'predicted'")
        return source

    @app.get("/api/health")
    def health():
        return {"status": "ok"}

    @app.post("/api/discussions", status_code=201)
    async def upload_discussion(request: Request, title: Optional[str] = None,
                                discussion_id: Optional[str] = None,
                                recorded_at: Optional[str] = None):
        body = await request.body()
        try:
            content = body.decode("utf-8")
        except UnicodeDecodeError:
            raise HTTPException(400, "body must be UTF-8 CSV")
        try:
            parsed_date = date.fromisoformat(recorded_at) if recorded_at else None
        except ValueError:
            raise HTTPException(400, f"recorded_at must be an ISO date, got {recorded_at!r}")
        try:
            d = parse_transcript(content, discussion_id=discussion_id,
                                 title=title, recorded_at=parsed_date)
        except ParseError as exc:
            raise HTTPException(400, {"line": exc.line, "reason": exc.reason})
        try:
            store.add_discussion(d)
        except DuplicateEntity:
            raise HTTPException(409, f"discussion {d.discussion_id!r} already exists")
        return {"discussion_id": d.discussion_id}

    @app.get("/api/discussions")
    def list_discussions():
        return [store.discussion_meta(i) for i in store.list_ids("discussions")]

    @app.get("/api/discussions/{discussion_id}")
    def discussion_meta(discussion_id: str):
        try:
            return store.discussion_meta(discussion_id)
        except UnknownEntity:
            raise HTTPException(404, f"unknown discussion {discussion_id!r}")

    @app.get("/api/discussions/{discussion_id}/transcript")
    def transcript(discussion_id: str, annotations: str = "gold",
                   version: Optional[int] = None):
        if annotations not in ("gold", "predicted", "none"):
            raise HTTPException(400, "annotations must be gold, predicted or none")
        d = get_discussion_or_404(discussion_id, version)
        if annotations in ("gold", "predicted") and not _has_source_labels(d, annotations):
            raise HTTPException(409, f"discussion has no {annotations} labels")
        return _transcript_json(d, annotations)

    def ensure_demo_heads(backend, seed: int) -> dict[Task, object]:
        heads = {}
        rebuild = False
        for task, head_id in DEMO_HEAD_IDS.items():
            if store.exists("heads", head_id):
                doc = store.get("heads", head_id)
                head = load_head(json.dumps(doc["container"]).encode("utf-8"))
                if head.embedding_dim != backend.dimension:
                    rebuild = True
                    break
                heads[task] = head
            else:
                rebuild = True
                break
        if not rebuild:
            return heads
        built = build_demo_heads(backend, WindowConfig(), seed=seed)
        for task, head in built.items():
            store.put("heads", DEMO_HEAD_IDS[task], {
                "head_id": DEMO_HEAD_IDS[task],
                "task": task.value,
                "container": json.loads(save_head(head).decode("utf-8")),
            })
        return built

    @app.post("/api/discussions/{discussion_id}/classify", status_code=202)
    def classify(discussion_id: str, req: ClassifyRequest):
        d = get_discussion_or_404(discussion_id)
        try:
            backend = cfg.make_backend(req.backend)
        except ValueError as exc:
            raise HTTPException(400, str(exc))
        seed = req.seed if req.seed is not None else cfg.seed

        if req.head_ids:
            heads = {}
            for head_id in req.head_ids:
                try:
                    doc = store.get("heads", head_id)
                except UnknownEntity:
                    raise HTTPException(422, f"unknown head {head_id!r}")
                head = load_head(json.dumps(doc["container"]).encode("utf-8"))
                heads[head.task] = head
            missing = [t.value for t in Task if t not in heads]
            if missing:
                raise HTTPException(422, f"missing heads for: {', '.join(missing)}")
        else:
            heads = ensure_demo_heads(backend, seed)

        if req.window:
            try:
                window = WindowConfig(**req.window)
            except (TypeError, ValueError) as exc:
                raise HTTPException(400, f"bad window: {exc}")
        else:
            window = heads[Task.ARGUMENT].window or WindowConfig()

        # Fail fast on incompatible geometry before queueing.
        for head in heads.values():
            if head.embedding_dim != backend.dimension:
                raise HTTPException(
                    422, f"{head.task.value} head expects dimension "
                         f"{head.embedding_dim}, backend has {backend.dimension}")
        if heads[Task.ARGUMENT].feature_dim != window.span * backend.dimension:
            raise HTTPException(422, "argument head incompatible with requested window")

        def work() -> str:
            coded = classify_discussion(d, heads, backend, window)
            version = store.add_discussion_version(coded)
            return f"{discussion_id}@v{version}"

        status = runner.submit(JobKind.CLASSIFY, work, discussion_id)
        return status.to_dict()

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        status = runner.get(job_id)
        if status is None:
            raise HTTPException(404, f"unknown job {job_id!r}")
        return status.to_dict()

    @app.get("/api/discussions/{discussion_id}/analytics")
    def analytics_bundle(discussion_id: str, source: str = "gold"):
        check_source(source)
        d = get_discussion_or_404(discussion_id)
        try:
            dists = {dim: compute_distribution(d, dim, source) for dim in DIMENSIONS}
            cmap = build_collaboration_map(d, source)
        except MissingLabels as exc:
            raise HTTPException(409, str(exc))
        items = assess_strengths_weaknesses(dists, _load_rules(store))
        assessment = []
        for item in items:
            entry = item.to_dict()
            entry["resources"] = resources.get(f"{item.rule.dimension}/{item.rule.label}", [])
            assessment.append(entry)
        return {
            "discussion_id": discussion_id,
            "source": source,
            "distributions": {k: v.to_dict() for k, v in dists.items()},
            "collaboration_map": cmap.to_dict(),
            "assessment": assessment,
        }

    @app.get("/api/history")
    def history(source: str = "gold"):
        check_source(source)
        discussions = [store.load_discussion(i) for i in store.list_ids("discussions")]
        series = compare_history(discussions, source)
        return {"source": source, **series.to_dict()}

    @app.get("/api/goals")
    def list_goals(discussion_id: Optional[str] = None):
        goals = [store.get("goals", i) for i in store.list_ids("goals")]
        if discussion_id is not None:
            goals = [g for g in goals if g["discussion_id"] == discussion_id]
        return goals

    @app.post("/api/goals", status_code=201)
    def create_goal(req: GoalRequest):
        try:
            store.discussion_meta(req.discussion_id)
        except UnknownEntity:
            raise HTTPException(404, f"unknown discussion {req.discussion_id!r}")
        goal_id = f"g-{len(store.list_ids('goals')):04d}"
        try:
            goal = GoalRecord(
                goal_id=goal_id,
                discussion_id=req.discussion_id,
                dimension=req.dimension,
                label=req.label,
                target_percentage=req.target_percentage,
                created_at=utc_now_iso(),
                note=req.note,
            )
        except (ValueError, UnknownDimension) as exc:
            raise HTTPException(400, str(exc))
        store.put("goals", goal_id, goal.to_dict())
        return goal.to_dict()

    @app.get("/api/rules")
    def get_rules():
        return [r.to_dict() for r in _load_rules(store)]

    @app.put("/api/rules")
    def put_rules(rules: list[dict]):
        try:
            parsed = [AssessmentRule(
                r["dimension"], r["label"],
                float(r["weakness_below"]), float(r["strength_at_or_above"]))
                for r in rules]
        except (KeyError, TypeError, ValueError, UnknownDimension) as exc:
            raise HTTPException(400, f"bad rule: {exc}")
        for rule_id in store.list_ids("rules"):
            store.delete("rules", rule_id)
        for i, rule in enumerate(parsed):
            store.put("rules", f"rule-{i:04d}", rule.to_dict())
        return [r.to_dict() for r in parsed]

    @app.get("/api/discussions/{discussion_id}/evaluation")
    def evaluation(discussion_id: str, exclude_fallback: bool = False):
        d = get_discussion_or_404(discussion_id)
        try:
            report = evaluate_discussions([d], exclude_fallback=exclude_fallback)
        except MissingLabels as exc:
            raise HTTPException(409, str(exc))
        return {"discussion_id": discussion_id,
                "exclude_fallback": exclude_fallback,
                "dimensions": report.to_dict()}

    @app.get("/api/heads")
    def list_heads():
        out = []
        for head_id in store.list_ids("heads"):
            doc = store.get("heads", head_id)
            container = doc["container"]
            out.append({"head_id": head_id, "task": container["task"],
                        "classes": container["classes"],
                        "embedding_dim": container["embedding_dim"],
                        "window": container.get("window")})
        return out

    @app.post("/api/heads", status_code=201)
    async def upload_head(request: Request):
        body = await request.body()
        try:
            head = load_head(body)
        except Exception as exc:
            raise HTTPException(400, f"bad model file: {exc}")
        head_id = f"h-{len(store.list_ids('heads')):04d}-{head.task.value}"
        store.put("heads", head_id, {
            "head_id": head_id,
            "task": head.task.value,
            "container": json.loads(body.decode("utf-8")),
        })
        return {"head_id": head_id}

    return app
