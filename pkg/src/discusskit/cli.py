"""`dt` command line: ingest, train, classify, evaluate, report, serve."""

from __future__ import annotations

import json
import sys
from datetime import date
from pathlib import Path

import click

from .analytics import assess_strengths_weaknesses, build_collaboration_map, compare_history, compute_distribution
from .config import AppConfig, load_config
from .demo import build_demo_heads, default_rules_json, sample_transcript_text
from .features import WindowConfig
from .head import CLASSES_BY_TASK, Task, load_head, save_head
from .metrics import (
    MissingLabels,
    cohen_kappa,
    confusion_matrix,
    evaluate_discussions,
    f1_scores,
    format_report_table,
)
from .model import ARGUMENT_CLASSES, DIMENSIONS, Discussion
from .predict import classify_discussion
from .store import DuplicateEntity, Store, UnknownEntity
from .training import TrainConfig, collect_examples, train_head
from .transcript_io import ParseError, parse_transcript, serialize_transcript

WINDOW_CANDIDATES = (0, 1, 2, 3)


def _window_option(value: str) -> WindowConfig:
    try:
        before, after = (int(p) for p in value.split(","))
        return WindowConfig(before, after)
    except ValueError as exc:
        raise click.BadParameter(f"window must be 'B,A', got {value!r}: {exc}")


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None,
              help="TOML or JSON configuration file.")
@click.option("--data-root", type=click.Path(), default=None,
              help="Override the store directory.")
@click.pass_context
def main(ctx, config_path, data_root):
    """Classroom discussion analytics toolkit."""
    cfg = load_config(config_path)
    if data_root:
        from dataclasses import replace
        cfg = replace(cfg, data_root=data_root)
    ctx.obj = cfg


@main.command()
@click.argument("file", type=click.Path(exists=True))
@click.option("--title", default=None)
@click.option("--id", "discussion_id", default=None)
@click.option("--date", "recorded_at", default=None, help="ISO recording date.")
@click.pass_obj
def ingest(cfg: AppConfig, file, title, discussion_id, recorded_at):
    """Parse a transcript CSV and store it."""
    content = Path(file).read_text(encoding="utf-8")
    try:
        d = parse_transcript(
            content,
            discussion_id=discussion_id,
            title=title or Path(file).stem,
            recorded_at=date.fromisoformat(recorded_at) if recorded_at else None,
        )
    except ParseError as exc:
        raise click.ClickException(str(exc))
    store = Store(cfg.data_root)
    try:
        store.add_discussion(d)
    except DuplicateEntity:
        raise click.ClickException(f"discussion {d.discussion_id!r} already stored")
    click.echo(d.discussion_id)


@main.command()
@click.option("--out", type=click.Path(), default=None, help="Write the bundled sample here.")
def sample(out):
    """Print (or save) the bundled gold-coded sample transcript."""
    text = sample_transcript_text()
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
        click.echo(out)
    else:
        click.echo(text, nl=False)


def _load_corpus(corpus_dir: str) -> list[Discussion]:
    paths = sorted(Path(corpus_dir).glob("*.csv"))
    if not paths:
        raise click.ClickException(f"no .csv transcripts in {corpus_dir}")
    discussions = []
    for p in paths:
        try:
            discussions.append(parse_transcript(
                p.read_text(encoding="utf-8"), title=p.stem, discussion_id=p.stem))
        except ParseError as exc:
            raise click.ClickException(f"{p.name}: {exc}")
    return discussions


def _search_window(discussions, backend, cfg: TrainConfig, folds: int):
    """K-fold CV by discussion over symmetric windows; returns rows of mean metrics."""
    if len(discussions) < folds:
        folds = max(2, len(discussions))
    assignments = [i % folds for i in range(len(discussions))]
    rows = []
    for size in WINDOW_CANDIDATES:
        window = WindowConfig(size, size)
        accs, kappas, macros = [], [], []
        for fold in range(folds):
            train_set = [d for d, a in zip(discussions, assignments) if a != fold]
            held_out = [d for d, a in zip(discussions, assignments) if a == fold]
            train_examples = collect_examples(train_set, Task.ARGUMENT, backend, window)
            head, _ = train_head(train_examples, cfg, ARGUMENT_CLASSES,
                                 Task.ARGUMENT, window=window)
            gold, pred = [], []
            for d in held_out:
                coded = classify_discussion(
                    d, _fill_heads(head, backend, cfg), backend, window)
                for turn in coded.turns:
                    for adu in turn.adus:
                        if adu.gold_argument is not None and adu.predicted_argument:
                            gold.append(adu.gold_argument.value)
                            best = max(ARGUMENT_CLASSES,
                                       key=lambda c: adu.predicted_argument[c])
                            pred.append(best)
            m = confusion_matrix(gold, pred, ARGUMENT_CLASSES)
            accs.append(sum(g == p for g, p in zip(gold, pred)) / len(gold))
            kappas.append(cohen_kappa(m))
            macros.append(f1_scores(m).macro_f1)
        rows.append((size, sum(accs) / len(accs), sum(kappas) / len(kappas),
                     sum(macros) / len(macros)))
    return rows


def _fill_heads(argument_head, backend, cfg: TrainConfig):
    """Pad the head dict with throwaway heads so classify_discussion can run
    during window search (only argument predictions are scored)."""
    import numpy as np

    from .head import SoftmaxHead
    d = backend.dimension
    dummy = {
        Task.SPECIFICITY: SoftmaxHead(Task.SPECIFICITY, CLASSES_BY_TASK[Task.SPECIFICITY],
                                      np.zeros((3, d)), np.zeros(3), d),
        Task.COLLABORATION: SoftmaxHead(Task.COLLABORATION, CLASSES_BY_TASK[Task.COLLABORATION],
                                        np.zeros((4, d)), np.zeros(4), d),
    }
    return {Task.ARGUMENT: argument_head, **dummy}


@main.command()
@click.option("--task", "task_name", type=click.Choice([t.value for t in Task]), required=True)
@click.option("--corpus", "corpus_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--window", "window_str", default="2,2", show_default=True,
              help="Context window 'before,after' (argument task).")
@click.option("--search-window", is_flag=True,
              help="Cross-validate symmetric windows 0..3 instead of training one head.")
@click.option("--folds", default=5, show_default=True)
@click.option("--backend", "backend_name", default=None)
@click.option("--seed", default=None, type=int)
@click.option("--out", "out_path", type=click.Path(), default=None)
@click.pass_obj
def train(cfg: AppConfig, task_name, corpus_dir, window_str, search_window,
          folds, backend_name, seed, out_path):
    """Train a softmax head on a directory of gold-coded transcripts."""
    task = Task(task_name)
    window = _window_option(window_str)
    backend = cfg.make_backend(backend_name)
    train_cfg = TrainConfig(seed=seed if seed is not None else cfg.seed)
    discussions = _load_corpus(corpus_dir)

    if search_window:
        if task is not Task.ARGUMENT:
            raise click.ClickException("--search-window applies to the argument task only")
        rows = _search_window(discussions, backend, train_cfg, folds)
        click.echo(f"{'window':>8}  {'accuracy':>8}  {'kappa':>8}  {'macro_f1':>8}")
        for size, acc, kappa, macro in rows:
            click.echo(f"({size},{size})".rjust(8)
                       + f"  {acc:8.3f}  {kappa:8.3f}  {macro:8.3f}")
        best = max(rows, key=lambda r: r[1])
        click.echo(f"best window by accuracy: ({best[0]},{best[0]})")
        return

    examples = collect_examples(discussions, task, backend, window)
    try:
        head, training_report = train_head(
            examples, train_cfg, CLASSES_BY_TASK[task], task,
            window=window if task is Task.ARGUMENT else None,
            metadata={"backend": backend.name, "corpus": str(corpus_dir)},
        )
    except Exception as exc:
        raise click.ClickException(str(exc))
    out = Path(out_path or f"{task.value}_head.json")
    out.write_bytes(save_head(head))
    click.echo(f"wrote {out} "
               f"(examples={len(examples)}, epochs={training_report.epochs_run}, "
               f"best_epoch={training_report.best_epoch}, "
               f"train_acc={training_report.final_train_accuracy:.3f})")


def _resolve_heads(cfg: AppConfig, head_paths, backend, window, seed):
    if head_paths:
        heads = {}
        for path in head_paths:
            head = load_head(Path(path).read_bytes(), backend_dimension=backend.dimension)
            heads[head.task] = head
        missing = [t.value for t in Task if t not in heads]
        if missing:
            raise click.ClickException(f"missing heads for: {', '.join(missing)}")
        return heads
    return build_demo_heads(backend, window, seed=seed)


@main.command()
@click.argument("discussion_id")
@click.option("--head", "head_paths", type=click.Path(exists=True), multiple=True,
              help="Model file; pass three (one per task). Default: demo heads.")
@click.option("--backend", "backend_name", default=None)
@click.option("--window", "window_str", default=None, help="Override 'before,after'.")
@click.option("--seed", default=None, type=int)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Also write the predicted transcript CSV here.")
@click.pass_obj
def classify(cfg: AppConfig, discussion_id, head_paths, backend_name, window_str,
             seed, out_path):
    """Predict all three dimensions for a stored discussion (new version)."""
    store = Store(cfg.data_root)
    try:
        d = store.load_discussion(discussion_id)
    except UnknownEntity:
        raise click.ClickException(f"unknown discussion {discussion_id!r}")
    backend = cfg.make_backend(backend_name)
    seed = seed if seed is not None else cfg.seed
    heads = _resolve_heads(cfg, head_paths, backend,
                           _window_option(window_str) if window_str else WindowConfig(),
                           seed)
    window = (_window_option(window_str) if window_str
              else heads[Task.ARGUMENT].window or WindowConfig())
    try:
        coded = classify_discussion(d, heads, backend, window)
    except Exception as exc:
        raise click.ClickException(str(exc))
    version = store.add_discussion_version(coded)
    if out_path:
        Path(out_path).write_text(serialize_transcript(coded, include_predictions=True),
                                  encoding="utf-8", newline="")
    click.echo(f"{discussion_id} classified (version {version})")


@main.command()
@click.argument("discussion_id")
@click.option("--exclude-fallback", is_flag=True,
              help="Drop collaboration turns predicted by the no-reference fallback.")
@click.option("--json", "json_path", type=click.Path(), default=None)
@click.pass_obj
def evaluate(cfg: AppConfig, discussion_id, exclude_fallback, json_path):
    """Compare predictions against gold labels for a stored discussion."""
    store = Store(cfg.data_root)
    try:
        d = store.load_discussion(discussion_id)
    except UnknownEntity:
        raise click.ClickException(f"unknown discussion {discussion_id!r}")
    try:
        report = evaluate_discussions([d], exclude_fallback=exclude_fallback)
    except MissingLabels as exc:
        raise click.ClickException(str(exc))
    click.echo(format_report_table(report))
    if json_path:
        Path(json_path).write_text(json.dumps(report.to_dict(), indent=2),
                                   encoding="utf-8")


@main.command()
@click.argument("discussion_id")
@click.option("--source", type=click.Choice(["gold", "predicted"]), default="gold",
              show_default=True)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@click.option("--history/--no-history", default=True, show_default=True,
              help="Also render the cross-discussion history when possible.")
@click.pass_obj
def report(cfg: AppConfig, discussion_id, source, out_dir, history):
    """Render figures and CSVs for a stored discussion."""
    from .report import write_discussion_report, write_history_report

    store = Store(cfg.data_root)
    try:
        d = store.load_discussion(discussion_id)
    except UnknownEntity:
        raise click.ClickException(f"unknown discussion {discussion_id!r}")
    try:
        dists = {dim: compute_distribution(d, dim, source) for dim in DIMENSIONS}
        cmap = build_collaboration_map(d, source)
    except MissingLabels as exc:
        raise click.ClickException(str(exc))

    rules = default_rules_json()
    from .analytics import AssessmentRule
    items = assess_strengths_weaknesses(
        dists, [AssessmentRule(r["dimension"], r["label"], r["weakness_below"],
                               r["strength_at_or_above"]) for r in rules])

    out = Path(out_dir or f"reports/{discussion_id}")
    written = write_discussion_report(out, dists, cmap, items, d.title)

    if history:
        discussions = [store.load_discussion(i) for i in store.list_ids("discussions")]
        series = compare_history(discussions, source)
        if len(series.entries) >= 2:
            written += write_history_report(out, series)
    for path in written:
        click.echo(str(path))


@main.command()
@click.option("--port", default=None, type=int)
@click.option("--host", default=None)
@click.pass_obj
def serve(cfg: AppConfig, port, host):
    """Run the REST API."""
    import uvicorn

    from .server import create_app

    app = create_app(cfg)
    uvicorn.run(app, host=host or cfg.host, port=port or cfg.port, log_level="warning")


if __name__ == "__main__":
    main()
