"""Single entry point exposing every pipeline stage: corpus synthesis,
ingestion checks, featurization, clustering, training, evaluation, ablation
grids, group summaries, prediction, and the collection service."""

from __future__ import annotations

import csv as csv_mod
import json
import sys
from pathlib import Path

import click

from .core import map_emotion
from .errors import WristmoodError
from .evaluation import (
    DEFAULT_MODEL_KINDS,
    group_summary,
    nonstatistical_grid,
    run_ablation,
    statistical_grid,
)
from .featurization import FeatureSetSpec, build_matrix
from .ingestion import (
    clean_recording,
    load_corpus,
    parse_session,
    read_corpus_csv,
)
from .core import validate_recording
from .labeling import cluster_label_agreement, kmeans
from .models import fit_model, load_model, save_model
from .models.base import decode_labels, encode_labels
from .synthesis import GeneratorConfig, MoodProfile, generate_corpus, write_corpus


def _info(ctx, message):
    if not ctx.obj.get("quiet"):
        click.echo(message, err=True)


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Master seed for every random choice.")
@click.option("--quiet", is_flag=True, help="Suppress progress output.")
@click.pass_context
def main(ctx, seed, quiet):
    """Smartwatch mood pipeline."""
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["quiet"] = quiet


def _load_recordings(corpus, csv):
    if csv:
        return read_corpus_csv(csv)
    return load_corpus(corpus)


def _parse_feature_spec(text):
    """Parse e.g. "hrv,hr,acc,gyro" with optional flags
    "-age", "-gender", "-median_mode", or "pca:3"."""
    groups = set()
    kwargs = {}
    for part in text.split(","):
        part = part.strip()
        if part.startswith("pca:"):
            kwargs["pca_components"] = int(part.split(":", 1)[1])
        elif part == "-age":
            kwargs["without_age"] = True
        elif part == "-gender":
            kwargs["without_gender"] = True
        elif part == "-median_mode":
            kwargs["without_median_mode"] = True
        else:
            groups.add(part)
    return FeatureSetSpec(groups=frozenset(groups), **kwargs)


@main.command()
@click.option("--sessions-per-emotion", type=int, default=10, show_default=True)
@click.option("--duration-s", type=float, default=60.0, show_default=True)
@click.option("--rate-hz", type=float, default=5.0, show_default=True)
@click.option("--warmup-s", type=float, default=10.0, show_default=True)
@click.option("--effect-size", type=float, default=1.0, show_default=True)
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.pass_context
def synth(ctx, sessions_per_emotion, duration_s, rate_hz, warmup_s, effect_size, out):
    """Generate a seeded synthetic session corpus."""
    cfg = GeneratorConfig(
        sessions_per_emotion=sessions_per_emotion, duration_s=duration_s,
        sample_rate_hz=rate_hz, warmup_s=warmup_s, seed=ctx.obj["seed"],
        profile=MoodProfile.default(effect_size))
    recordings = generate_corpus(cfg)
    write_corpus(recordings, out, cfg)
    _info(ctx, f"wrote {len(recordings)} sessions to {out}")


@main.command()
@click.option("--corpus", type=click.Path(exists=True, file_okay=False))
@click.option("--csv", type=click.Path(exists=True, dir_okay=False),
              help="Flat CSV export instead of a corpus directory.")
@click.pass_context
def ingest(ctx, corpus, csv):
    """Parse, validate, and clean a corpus; report violations and counts."""
    if not corpus and not csv:
        raise click.UsageError("provide --corpus or --csv")
    recordings = _load_recordings(corpus, csv)
    report = []
    for r in recordings:
        violations = validate_recording(r)
        entry = {"session_id": r.meta.session_id, "violations": violations}
        if not violations:
            _, cleaning = clean_recording(r)
            entry["warmup_samples_dropped"] = cleaning.warmup_samples_dropped
            entry["invalid_samples_dropped"] = cleaning.invalid_samples_dropped
        report.append(entry)
    click.echo(json.dumps(report, indent=1))
    if any(e["violations"] for e in report):
        sys.exit(1)


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--flavor", type=click.Choice(["statistical", "nonstatistical"]),
              default="statistical", show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_context
def featurize(ctx, corpus, flavor, out):
    """Build a feature matrix CSV from a corpus."""
    recordings = [clean_recording(r)[0] for r in load_corpus(corpus)]
    matrix = build_matrix(recordings, flavor)
    matrix.to_csv(out)
    _info(ctx, f"wrote {matrix.n_rows} x {len(matrix.column_names)} matrix to {out}")


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_context
def cluster(ctx, corpus, out):
    """K-means (k=2) on the valence-arousal self-assessments."""
    recordings = [r for r in load_corpus(corpus) if r.assessment is not None]
    points = [(r.assessment.valence, r.assessment.arousal) for r in recordings]
    moods = [map_emotion(r.assessment.emotion) for r in recordings]
    model = kmeans(points, k=2, seed=ctx.obj["seed"])
    agreement = cluster_label_agreement(model, moods)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        writer = csv_mod.writer(fh)
        writer.writerow(["session_id", "valence", "arousal", "mood", "cluster"])
        for r, mood, assignment in zip(recordings, moods, model.assignments):
            writer.writerow([r.meta.session_id, r.assessment.valence,
                             r.assessment.arousal, mood.value, int(assignment)])
    _info(ctx, f"inertia {model.inertia:.4f}, mood agreement {agreement:.3f}")


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--flavor", type=click.Choice(["statistical", "nonstatistical"]),
              default="statistical", show_default=True)
@click.option("--model", "kind", required=True,
              type=click.Choice(DEFAULT_MODEL_KINDS))
@click.option("--features", default="hrv,hr,acc,gyro", show_default=True,
              help='Feature spec, e.g. "acc,gyro,-gender" or "hr,acc,gyro,pca:3".')
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.pass_context
def train(ctx, corpus, flavor, kind, features, out):
    """Fit one model on the full corpus and save it."""
    from .featurization import select_features

    recordings = [clean_recording(r)[0] for r in load_corpus(corpus)]
    matrix = select_features(build_matrix(recordings, flavor),
                             _parse_feature_spec(features))
    model = fit_model(kind, matrix.rows, matrix.labels, seed=ctx.obj["seed"],
                      column_names=matrix.column_names)
    save_model(model, out)
    _info(ctx, f"trained {kind} on {matrix.n_rows} rows, saved to {out}")


def _run_grid(ctx, corpus, flavor, repeats, jobs, feature_sets, models, out,
              out_text):
    recordings = load_corpus(corpus)
    kinds = list(models) if models else None
    report = run_ablation(recordings, flavor, feature_sets=feature_sets,
                          model_kinds=kinds, repeats=repeats,
                          seed=ctx.obj["seed"], jobs=jobs)
    report.to_csv(out)
    text = report.to_text()
    if out_text:
        Path(out_text).write_text(text, encoding="utf-8")
    else:
        click.echo(text)
    _info(ctx, f"wrote report to {out}")


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--flavor", type=click.Choice(["statistical", "nonstatistical"]),
              default="statistical", show_default=True)
@click.option("--features", default="hrv,hr,acc,gyro", show_default=True)
@click.option("--model", "models", multiple=True,
              help="Model kind (repeatable); default: all supported.")
@click.option("--repeats", type=int, default=10, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--out-text", type=click.Path(dir_okay=False))
@click.pass_context
def evaluate(ctx, corpus, flavor, features, models, repeats, out, out_text):
    """Repeated evaluation of one feature set."""
    _run_grid(ctx, corpus, flavor, repeats, 1,
              [_parse_feature_spec(features)], models, out, out_text)


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--flavor", type=click.Choice(["statistical", "nonstatistical"]),
              default="statistical", show_default=True)
@click.option("--model", "models", multiple=True,
              help="Model kind (repeatable); default: all supported.")
@click.option("--repeats", type=int, default=10, show_default=True)
@click.option("--jobs", type=int, default=1, show_default=True)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--out-text", type=click.Path(dir_okay=False))
@click.pass_context
def ablate(ctx, corpus, flavor, models, repeats, jobs, out, out_text):
    """Full (feature set x model) ablation grid."""
    grid = statistical_grid() if flavor == "statistical" else nonstatistical_grid()
    _run_grid(ctx, corpus, flavor, repeats, jobs, grid, models, out, out_text)


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True, file_okay=False))
@click.pass_context
def summarize(ctx, corpus):
    """Mean HR / |acc| / |gyro| by age group, gender, and emotion."""
    recordings = [clean_recording(r)[0] for r in load_corpus(corpus)]
    click.echo(json.dumps(group_summary(recordings), indent=1))


@main.command()
@click.option("--model", "model_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--session", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--path", "flavor_path",
              type=click.Choice(["statistical", "nonstatistical"]),
              default="statistical", show_default=True)
@click.pass_context
def predict(ctx, model_path, session, flavor_path):
    """Predict the mood of one session file."""
    import numpy as np

    from .evaluation import majority_vote
    from .service import (_nonstatistical_features, _select_for_model,
                          _statistical_features)

    model = load_model(model_path)
    cleaned, _ = clean_recording(parse_session(session))
    if flavor_path == "statistical":
        names, row = _statistical_features(cleaned)
        selected, x = _select_for_model(model, names, np.array([row]))
        mood = decode_labels(model.predict(x))[0]
        proba = float(model.predict_proba(x)[0])
    else:
        names, rows, _ = _nonstatistical_features(cleaned)
        selected, x = _select_for_model(model, names, np.array(rows))
        mood = majority_vote(decode_labels(model.predict(x)))
        proba = float(model.predict_proba(x).mean())
    click.echo(json.dumps({"mood": mood.value, "probability": proba,
                           "features_used": selected}))


@main.command()
@click.option("--model", "model_path", envvar="WRISTMOOD_MODEL",
              type=click.Path(exists=True, dir_okay=False))
@click.option("--corpus-dir", envvar="WRISTMOOD_CORPUS_DIR", required=True,
              type=click.Path(file_okay=False))
@click.option("--port", envvar="WRISTMOOD_PORT", type=int, default=8000,
              show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.pass_context
def serve(ctx, model_path, corpus_dir, port, host):
    """Run the live session-collection service."""
    import uvicorn

    from .service import create_app

    app = create_app(model_path=model_path, corpus_dir=corpus_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


def entrypoint(argv=None):
    try:
        return main(args=argv, standalone_mode=True)
    except WristmoodError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    entrypoint()
