"""Command-line entry point: ingest, refine, analyze, recommend, serve.

Exit codes: 0 success, 1 usage or input error, 2 internal error.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from .analytics import (
    compute_type_stats,
    mean_position_by_type,
    stability,
    type_frequency,
    view_count_distribution,
)
from .annotation import (
    annotation_from_design,
    normalize,
    parse_annotation,
    serialize_annotation,
)
from .encoding import LayoutCode
from .errors import MVLabError
from .ingest import cooccurrence_csv, ingest, load_derived, save_derived
from .model import ViewType
from .recommend import MVRecommender, SketchView, UserSketch
from .refine import RefinementConfig, refine

click.UsageError.exit_code = 1

METRICS = ("counts", "frequency", "cooccurrence", "aspect", "position", "stability")


def _fail(exc: Exception, internal: bool = False) -> "SystemExit":
    click.echo(f"error: {exc}", err=True)
    return SystemExit(2 if internal else 1)


def _load_bundle(path: str):
    p = Path(path)
    if (p / "manifest.json").exists():
        return load_derived(p)
    return ingest(p)


@click.group()
@click.version_option(package_name="mvlab")
def main():
    """Analyze multiple-view layouts and recommend designs by example."""


@main.command("ingest")
@click.argument("directory", type=click.Path(exists=True, file_okay=False))
@click.option("--out", default="derived", show_default=True,
              help="Directory for derived artifacts.")
@click.option("--theta", default=0.03, show_default=True,
              help="Refinement snap threshold as a fraction of the group box.")
def ingest_cmd(directory: str, out: str, theta: float):
    """Ingest an annotation directory and write derived artifacts."""
    try:
        bundle = ingest(directory, RefinementConfig(theta_fraction=theta))
        save_derived(bundle, out)
    except MVLabError as exc:
        raise _fail(exc)
    except OSError as exc:
        raise _fail(exc, internal=True)
    click.echo(bundle.report.summary())
    click.echo(f"derived artifacts written to {out}")


@main.command("refine")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--theta", default=0.03, show_default=True)
def refine_cmd(file: str, theta: float):
    """Refine one annotation file; writes <file>.refined.json."""
    path = Path(file)
    try:
        annotated = parse_annotation(path.read_bytes())
        design = refine(normalize(annotated), RefinementConfig(theta_fraction=theta))
    except MVLabError as exc:
        raise _fail(exc)
    out_path = path.parent / (path.name.removesuffix(".json") + ".refined.json")
    out_path.write_bytes(
        serialize_annotation(annotation_from_design(design, doi=annotated.doi))
    )
    for note in design.warnings:
        click.echo(f"warning: {note}", err=True)
    if design.non_guillotine:
        click.echo("warning: layout is non-guillotine", err=True)
    click.echo(f"refined layout written to {out_path}")


@main.command("analyze")
@click.argument("derived", type=click.Path(exists=True, file_okay=False),
                envvar="MVLAB_CORPUS")
@click.option("--metric", type=click.Choice(METRICS), required=True)
@click.option("--format", "fmt", type=click.Choice(("csv", "json")), default="json",
              show_default=True)
@click.option("--type", "type_name", default=None, help="View type for stability.")
@click.option("--layout", default=None, help="Layout code filter for stability.")
@click.option("--level1", is_flag=True,
              help="Count level-1 nodes instead of leaf views.")
def analyze_cmd(derived: str, metric: str, fmt: str, type_name: str | None,
                layout: str | None, level1: bool):
    """Emit a corpus metric as CSV or JSON on stdout."""
    try:
        bundle = _load_bundle(derived)
        corpus = bundle.corpus
        if metric == "counts":
            data = {
                ("10+" if k == 10 else str(k)): v
                for k, v in view_count_distribution(corpus, level1=level1).items()
            }
        elif metric == "frequency":
            data = {t.canonical: f for t, f in type_frequency(corpus).items()}
        elif metric == "cooccurrence":
            if fmt == "csv":
                click.echo(cooccurrence_csv(corpus), nl=False)
                return
            from .analytics import conditional_probability
            import numpy as np

            probs = conditional_probability(corpus).probs
            data = {
                "types": [t.canonical for t in ViewType],
                "matrix": [
                    [None if np.isnan(p) else float(p) for p in row] for row in probs
                ],
            }
        elif metric == "aspect":
            data = {
                t.canonical: {
                    "count": len(st.arc_values),
                    "mean": st.arc_mean,
                    "quartiles": list(st.arc_quartiles) if st.arc_quartiles else None,
                }
                for t, st in compute_type_stats(corpus).items()
            }
        elif metric == "position":
            data = {
                t.canonical: [float(v) for v in grid]
                for t, grid in mean_position_by_type(corpus).items()
            }
        else:  # stability
            if not type_name:
                raise click.UsageError("--metric stability requires --type")
            vtype = ViewType.from_name(type_name)
            code = LayoutCode.parse(layout) if layout else None
            value = stability(
                corpus, vtype, code, list(bundle.codes) if code else None
            )
            data = {"type": vtype.canonical, "layout": layout, "stability": value}
    except KeyError as exc:
        raise _fail(exc)
    except MVLabError as exc:
        raise _fail(exc)

    if fmt == "json":
        click.echo(json.dumps(data, indent=2, sort_keys=True))
    else:
        for key, value in data.items():
            click.echo(f"{key},{value}")


@main.command("recommend")
@click.argument("derived", type=click.Path(exists=True, file_okay=False),
                envvar="MVLAB_CORPUS")
@click.option("--sketch", "sketch_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Sketch JSON: {\"views\": [{type,x,y,w,h}], \"canvas\": {w,h}}.")
@click.option("--top", default=10, show_default=True)
@click.option("--views", default=None,
              help="Comma-separated view-count filter, e.g. 3,4 (10 means 10+).")
def recommend_cmd(derived: str, sketch_path: str, top: int, views: str | None):
    """Rank corpus designs against a sketch, best first."""
    try:
        bundle = _load_bundle(derived)
        sketch = _read_sketch(Path(sketch_path))
        wanted = (
            {int(tok) for tok in views.split(",")} if views else None
        )
        rec = MVRecommender.from_cache(
            bundle.corpus.items, bundle.dois, bundle.tensors, bundle.codes
        )
        results = rec.recommend(sketch, wanted, top)
    except (MVLabError, ValueError, KeyError) as exc:
        raise _fail(exc)
    for r in results:
        click.echo(f"{r.rank}\t{r.score:.6f}\t{r.code}\t{r.doi}")


def _read_sketch(path: Path) -> UserSketch:
    doc = json.loads(path.read_text())
    views = tuple(
        SketchView(
            ViewType.from_name(v["type"]),
            float(v["x"]), float(v["y"]), float(v["w"]), float(v["h"]),
        )
        for v in doc.get("views", ())
    )
    canvas = doc.get("canvas") or {}
    return UserSketch(
        views,
        canvas_w=float(canvas["w"]) if "w" in canvas else None,
        canvas_h=float(canvas["h"]) if "h" in canvas else None,
    )


@main.command("serve")
@click.argument("derived", type=click.Path(exists=True, file_okay=False),
                envvar="MVLAB_CORPUS")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True)
@click.option("--thumbnails-dir", default=None,
              type=click.Path(exists=True, file_okay=False))
@click.option("--cors-origin", default=None)
@click.option("--admin-token", default=None, envvar="MVLAB_ADMIN_TOKEN")
def serve_cmd(derived: str, host: str, port: int, thumbnails_dir: str | None,
              cors_origin: str | None, admin_token: str | None):
    """Serve the HTTP API over an ingested corpus."""
    import uvicorn

    from .service import app_from_derived

    try:
        app = app_from_derived(
            derived,
            thumbnails_dir=thumbnails_dir,
            cors_origin=cors_origin,
            admin_token=admin_token,
        )
    except MVLabError as exc:
        raise _fail(exc)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
