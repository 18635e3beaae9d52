"""HTTP API over an ingested corpus: faceted exploration + recommendation.

All GET endpoints are pure reads over an immutable bundle; POST
/admin/reload swaps the whole bundle atomically, so concurrent readers see
either the old corpus or the new one, never a mix. Facet semantics: values
within one facet are a union, facets combine by intersection.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import FileResponse
from pydantic import BaseModel, Field

from .analytics import (
    compute_type_stats,
    conditional_probability,
    mean_position_by_type,
    stability,
    type_frequency,
    view_count_distribution,
)
from .encoding import LayoutCode
from .errors import MVLabError, NoFilesError
from .ingest import CorpusBundle, ingest, load_derived
from .model import MVDesign, SmallMultiples, ViewType, leaf_count
from .recommend import MVRecommender, SketchView, UserSketch

MAX_GROUPS = 10


class _State:
    """Mutable holder so a reload can swap everything in one assignment."""

    def __init__(self, bundle: CorpusBundle, bins: int = 8):
        self.bundle = bundle
        self.recommender = MVRecommender.from_cache(
            bundle.corpus.items, bundle.dois, bundle.tensors, bundle.codes, bins=bins
        )
        self.matrix = conditional_probability(bundle.corpus)
        self.by_doi = {
            doi: i for i, doi in enumerate(bundle.dois)
        }


class CanvasIn(BaseModel):
    w: float = Field(gt=0)
    h: float = Field(gt=0)


class SketchViewIn(BaseModel):
    type: str
    x: float
    y: float
    w: float = Field(gt=0)
    h: float = Field(gt=0)


class SketchIn(BaseModel):
    views: list[SketchViewIn]
    canvas: CanvasIn | None = None


class RecommendIn(BaseModel):
    sketch: SketchIn
    view_counts: list[int] | None = None
    top_k: int = Field(default=10, ge=1, le=100)


def create_app(
    bundle: CorpusBundle,
    thumbnails_dir: str | Path | None = None,
    cors_origin: str | None = None,
    admin_token: str | None = None,
    corpus_dir: str | Path | None = None,
    bins: int = 8,
) -> FastAPI:
    app = FastAPI(title="mvlab", version="0.1.0")
    app.state.mv = _State(bundle, bins=bins)
    thumbs = Path(thumbnails_dir) if thumbnails_dir else None

    def S() -> _State:
        return app.state.mv

    if cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def summary(i: int) -> dict:
        state = S()
        mv = state.bundle.corpus.items[i]
        md = mv.metadata
        doi = state.bundle.dois[i]
        thumb = None
        if thumbs is not None:
            from .annotation import escape_doi

            for ext in (".png", ".jpg", ".jpeg"):
                if (thumbs / (escape_doi(doi) + ext)).exists():
                    thumb = f"/thumbnails/{escape_doi(doi)}{ext}"
                    break
        return {
            "doi": doi,
            "title": md.title if md else None,
            "venue": md.venue if md else None,
            "year": md.year if md else None,
            "count": leaf_count(mv),
            "layout": str(state.bundle.codes[i]),
            "thumbnail": thumb,
        }

    @app.get("/mvs")
    def list_mvs(
        types: str | None = None,
        counts: str | None = None,
        layouts: str | None = None,
        group_by: str = Query(default="none"),
        color_by: str = Query(default="year"),
    ):
        if group_by not in ("none", "count", "layout"):
            raise HTTPException(400, f"unknown group_by {group_by!r}")
        if color_by not in ("year", "venue"):
            raise HTTPException(400, f"unknown color_by {color_by!r}")
        wanted_types = _parse_types(types)
        wanted_counts = _parse_counts(counts)
        wanted_layouts = _parse_layouts(layouts)

        state = S()
        indices = []
        for i, mv in enumerate(state.bundle.corpus.items):
            if wanted_types is not None:
                present = {v.type for v in _leaves(mv)}
                if not (present & wanted_types):
                    continue
            if wanted_counts is not None:
                n = leaf_count(mv)
                if not (n in wanted_counts or (10 in wanted_counts and n >= 10)):
                    continue
            if wanted_layouts is not None:
                if str(state.bundle.codes[i]) not in wanted_layouts:
                    continue
            indices.append(i)

        if group_by == "none":
            return {"total": len(indices), "items": [summary(i) for i in indices]}
        if group_by == "count":
            keys = sorted({min(leaf_count(state.bundle.corpus.items[i]), 10)
                           for i in indices})
            groups = [
                {
                    "key": "10+" if key == 10 else str(key),
                    "items": [
                        summary(i)
                        for i in indices
                        if min(leaf_count(state.bundle.corpus.items[i]), 10) == key
                    ],
                }
                for key in keys
            ]
        else:
            by_code: dict[str, list[int]] = {}
            for i in indices:
                by_code.setdefault(str(state.bundle.codes[i]), []).append(i)
            ordered = sorted(by_code.items(), key=lambda kv: (-len(kv[1]), kv[0]))
            groups = [
                {"key": code, "items": [summary(i) for i in members]}
                for code, members in ordered
            ]
        return {
            "total": len(indices),
            "groups": groups[:MAX_GROUPS],
            "truncated": len(groups) > MAX_GROUPS,
        }

    @app.get("/mv/{doi:path}")
    def mv_detail(doi: str):
        state = S()
        i = state.by_doi.get(doi)
        if i is None:
            raise HTTPException(404, f"unknown doi {doi!r}")
        mv = state.bundle.corpus.items[i]
        md = mv.metadata
        return {
            "doi": doi,
            "metadata": {
                "title": md.title if md else None,
                "authors": list(md.authors) if md else [],
                "venue": md.venue if md else None,
                "year": md.year if md else None,
            },
            "layout": str(state.bundle.codes[i]),
            "non_guillotine": mv.non_guillotine,
            "count": leaf_count(mv),
            "nodes": [_node_doc(n) for n in mv.nodes],
            "tensor": [float(v) for v in state.bundle.tensors[i]],
        }

    @app.post("/recommend")
    def recommend_endpoint(body: RecommendIn):
        state = S()
        if not body.sketch.views:
            raise HTTPException(400, "sketch has no views")
        try:
            views = tuple(
                SketchView(ViewType.from_name(v.type), v.x, v.y, v.w, v.h)
                for v in body.sketch.views
            )
        except KeyError as exc:
            raise HTTPException(400, str(exc)) from exc
        sketch = UserSketch(
            views,
            canvas_w=body.sketch.canvas.w if body.sketch.canvas else None,
            canvas_h=body.sketch.canvas.h if body.sketch.canvas else None,
        )
        wanted = set(body.view_counts) if body.view_counts else None
        results = state.recommender.recommend(sketch, wanted, body.top_k)
        out = []
        for rec in results:
            i = state.by_doi[rec.doi]
            mv = state.bundle.corpus.items[i]
            out.append(
                {
                    "doi": rec.doi,
                    "score": rec.score,
                    "layout": str(rec.code),
                    "rank": rec.rank,
                    "count": leaf_count(mv),
                    "template": {"nodes": [_node_doc(n) for n in mv.nodes]},
                }
            )
        return {"results": out}

    @app.get("/stats/{metric}")
    def stats(metric: str, type: str | None = None, layout: str | None = None):
        state = S()
        corpus = state.bundle.corpus
        if metric == "frequency":
            return {
                t.canonical: f for t, f in sorted(
                    type_frequency(corpus).items(), key=lambda kv: kv[0].index
                )
            }
        if metric == "counts":
            return {
                ("10+" if k == 10 else str(k)): v
                for k, v in view_count_distribution(corpus).items()
            }
        if metric == "cooccurrence":
            names = [t.canonical for t in ViewType]
            probs = state.matrix.probs
            matrix = [
                [None if np.isnan(probs[i, j]) else float(probs[i, j])
                 for j in range(len(names))]
                for i in range(len(names))
            ]
            missing = [t.canonical for t in ViewType if state.matrix.missing(t)]
            return {"types": names, "matrix": matrix, "missing": missing}
        if metric == "aspect":
            out = {}
            for t, st in compute_type_stats(corpus).items():
                out[t.canonical] = {
                    "count": len(st.arc_values),
                    "mean": st.arc_mean,
                    "quartiles": list(st.arc_quartiles) if st.arc_quartiles else None,
                    "clip_range": [0.1, 10.0],
                }
            return out
        if metric == "position":
            return {
                t.canonical: [float(v) for v in grid]
                for t, grid in sorted(
                    mean_position_by_type(corpus).items(), key=lambda kv: kv[0].index
                )
            }
        if metric == "stability":
            if not type:
                raise HTTPException(400, "stability requires ?type=")
            try:
                vtype = ViewType.from_name(type)
            except KeyError as exc:
                raise HTTPException(400, str(exc)) from exc
            code = None
            if layout:
                try:
                    code = LayoutCode.parse(layout)
                except ValueError as exc:
                    raise HTTPException(400, str(exc)) from exc
            value = stability(
                corpus, vtype, code, list(state.bundle.codes) if code else None
            )
            return {
                "type": vtype.canonical,
                "layout": layout,
                "stability": value,
            }
        raise HTTPException(404, f"unknown metric {metric!r}")

    if thumbs is not None:

        @app.get("/thumbnails/{name}")
        def thumbnail(name: str):
            path = (thumbs / name).resolve()
            if not str(path).startswith(str(thumbs.resolve())) or not path.exists():
                raise HTTPException(404, "no such thumbnail")
            return FileResponse(path)

    @app.post("/admin/reload")
    def reload(request: Request, token: str | None = None):
        supplied = token or request.headers.get("x-admin-token")
        if not admin_token or supplied != admin_token:
            raise HTTPException(403, "reload requires the admin token")
        if not corpus_dir:
            raise HTTPException(400, "no corpus directory configured")
        try:
            fresh = ingest(corpus_dir)
        except (MVLabError, OSError) as exc:
            raise HTTPException(500, f"reload failed: {exc}") from exc
        app.state.mv = _State(fresh, bins=bins)
        return {"reloaded": True, "items": fresh.corpus.n}

    def _parse_types(raw: str | None) -> set[ViewType] | None:
        if raw is None or raw == "":
            return None
        out = set()
        for token in raw.split(","):
            try:
                out.add(ViewType.from_name(token))
            except KeyError:
                raise HTTPException(400, f"unknown view type {token!r}") from None
        return out

    def _parse_counts(raw: str | None) -> set[int] | None:
        if raw is None or raw == "":
            return None
        out = set()
        for token in raw.split(","):
            token = token.strip()
            if token == "10+":
                out.add(10)
                continue
            try:
                value = int(token)
            except ValueError:
                raise HTTPException(400, f"bad view count {token!r}") from None
            if not 2 <= value <= 10:
                raise HTTPException(400, f"view count {value} out of range 2..10+")
            out.add(value)
        return out

    def _parse_layouts(raw: str | None) -> set[str] | None:
        if raw is None or raw == "":
            return None
        out = set()
        for token in raw.split(","):
            try:
                out.add(str(LayoutCode.parse(token)))
            except ValueError:
                raise HTTPException(400, f"bad layout code {token!r}") from None
        return out

    return app


def _leaves(mv: MVDesign):
    for node in mv.nodes:
        if isinstance(node, SmallMultiples):
            yield from node.children
        else:
            yield node


def _node_doc(node) -> dict:
    if isinstance(node, SmallMultiples):
        return {
            "id": str(node.id),
            "kind": "small_multiples",
            "bbox": _bbox_doc(node.bbox),
            "children": [_node_doc(c) for c in node.children],
        }
    return {
        "id": node.id,
        "kind": "view",
        "type": node.type.canonical,
        "bbox": _bbox_doc(node.bbox),
    }


def _bbox_doc(b) -> dict:
    return {"x": b.x, "y": b.y, "w": b.w, "h": b.h}


def app_from_derived(
    derived_dir: str | Path,
    thumbnails_dir: str | Path | None = None,
    cors_origin: str | None = None,
    admin_token: str | None = None,
    bins: int = 8,
) -> FastAPI:
    """Convenience entry point used by the CLI ``serve`` command."""
    path = Path(derived_dir)
    if (path / "manifest.json").exists():
        bundle = load_derived(path)
    else:
        bundle = ingest(path)
    if bundle.corpus.n == 0:
        raise NoFilesError(f"no corpus at {derived_dir}")
    return create_app(
        bundle,
        thumbnails_dir=thumbnails_dir,
        cors_origin=cors_origin,
        admin_token=admin_token,
        corpus_dir=derived_dir,
        bins=bins,
    )
