"""Per-MV annotation files: parsing, canonical serialization, normalization.

One JSON file per MV, named by the source publication's DOI with slashes
escaped to underscores. The file stores pixel coordinates within the image;
``normalize`` clips every view rectangle to the annotated display region
and maps it affinely onto the unit square.

Canonical schema (all rectangles are center position + size)::

    {
      "doi": "10.0/x",
      "image": {"w": <px>, "h": <px>},
      "display": {"x": ..., "y": ..., "w": ..., "h": ...},
      "views": [
        {"id": "1", "type": "Bar", "x": ..., "y": ..., "w": ..., "h": ...},
        {"id": "2", "small multiples": [ ...level-2 view records... ]}
      ],
      "metadata": {"doi": ..., "venue": ..., "year": ..., "title": ...,
                   "authors": [...]}
    }

Unknown fields are ignored on input.
"""

from __future__ import annotations

import dataclasses
import json
import warnings as _warnings
from dataclasses import dataclass, field

from .errors import (
    AllClippedError,
    BadGeometryError,
    BadTypeError,
    EmptyDisplayError,
    MalformedAnnotationError,
)
from .model import BBox, Metadata, MVDesign, SmallMultiples, View, ViewType


class ClippedViewWarning(UserWarning):
    """A view fell entirely outside the display region and was dropped."""


@dataclass(frozen=True)
class PixelRect:
    """Center position and size, in image pixels."""

    x: float
    y: float
    w: float
    h: float

    @property
    def left(self) -> float:
        return self.x - self.w / 2.0

    @property
    def right(self) -> float:
        return self.x + self.w / 2.0

    @property
    def top(self) -> float:
        return self.y - self.h / 2.0

    @property
    def bottom(self) -> float:
        return self.y + self.h / 2.0


@dataclass(frozen=True)
class RawView:
    id: str
    type: ViewType
    rect: PixelRect


@dataclass(frozen=True)
class RawGroup:
    id: int
    children: tuple[RawView, ...]


@dataclass(frozen=True)
class AnnotatedMV:
    doi: str
    image_w: float
    image_h: float
    display: PixelRect
    entries: tuple[RawView | RawGroup, ...] = field(default=())
    metadata: Metadata | None = None


def escape_doi(doi: str) -> str:
    return doi.replace("/", "_")


def parse_annotation(data: bytes | str) -> AnnotatedMV:
    """Parse annotation JSON; unknown keys are ignored.

    Raises MalformedAnnotationError for non-JSON input or missing required
    keys, BadTypeError for type names outside the taxonomy, and
    BadGeometryError for nonpositive rectangle sizes.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedAnnotationError(f"not UTF-8: {exc}") from exc
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedAnnotationError(f"not JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedAnnotationError("top level must be a JSON object")
    for key in ("display", "views"):
        if key not in doc:
            raise MalformedAnnotationError(f"missing required key {key!r}")

    display = _parse_rect(doc["display"], "display")
    if "image" in doc:
        img = doc["image"]
        if not isinstance(img, dict) or "w" not in img or "h" not in img:
            raise MalformedAnnotationError("'image' needs 'w' and 'h'")
        image_w, image_h = _number(img["w"], "image.w"), _number(img["h"], "image.h")
    else:
        # No image record: assume the image tightly bounds the display rect.
        image_w, image_h = display.right, display.bottom
    if display.w > image_w + 1e-6 or display.h > image_h + 1e-6:
        raise MalformedAnnotationError("display region larger than the image")

    raw_views = doc["views"]
    if not isinstance(raw_views, list):
        raise MalformedAnnotationError("'views' must be an array")

    entries: list[RawView | RawGroup] = []
    used_ids: set[str] = set()
    for i, record in enumerate(raw_views):
        if not isinstance(record, dict):
            raise MalformedAnnotationError(f"views[{i}] is not an object")
        if "small multiples" in record:
            entries.append(_parse_group(record, i, used_ids))
        else:
            entries.append(_parse_view(record, str(i + 1), None, used_ids))

    metadata = _parse_metadata(doc.get("metadata"))
    doi = str(doc.get("doi", "")) or (metadata.doi if metadata else "") or ""
    return AnnotatedMV(
        doi=doi,
        image_w=image_w,
        image_h=image_h,
        display=display,
        entries=tuple(entries),
        metadata=metadata,
    )


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedAnnotationError(f"{where} must be a number")
    return float(value)


def _parse_rect(obj, where: str) -> PixelRect:
    if not isinstance(obj, dict):
        raise MalformedAnnotationError(f"{where} must be an object")
    try:
        rect = PixelRect(*(_number(obj[k], f"{where}.{k}") for k in "xywh"))
    except KeyError as exc:
        raise MalformedAnnotationError(f"{where} missing key {exc}") from exc
    if rect.w <= 0 or rect.h <= 0:
        raise BadGeometryError(f"{where} has nonpositive size")
    return rect


def _parse_type(record: dict, where: str) -> ViewType:
    if "type" not in record:
        raise MalformedAnnotationError(f"{where} missing 'type'")
    name = record["type"]
    if not isinstance(name, str):
        raise BadTypeError(f"{where}: type must be a string")
    try:
        return ViewType.from_name(name)
    except KeyError:
        raise BadTypeError(f"{where}: unknown view type {name!r}") from None


def _parse_view(
    record: dict, default_id: str, inherited_type: ViewType | None, used: set[str]
) -> RawView:
    view_id = str(record.get("id", default_id))
    if view_id in used:
        raise MalformedAnnotationError(f"duplicate view id {view_id!r}")
    used.add(view_id)
    if "type" not in record and inherited_type is not None:
        vtype = inherited_type
    else:
        vtype = _parse_type(record, f"view {view_id}")
    return RawView(view_id, vtype, _parse_rect(record, f"view {view_id}"))


def _parse_group(record: dict, position: int, used: set[str]) -> RawGroup:
    raw_id = record.get("id", str(position + 1))
    try:
        group_id = int(str(raw_id).split(".")[0])
    except ValueError:
        raise MalformedAnnotationError(f"bad group id {raw_id!r}") from None
    children_doc = record["small multiples"]
    if not isinstance(children_doc, list) or not children_doc:
        raise MalformedAnnotationError(f"group {group_id}: empty 'small multiples'")
    inherited = None
    if "type" in record:
        inherited = _parse_type(record, f"group {group_id}")
    children = []
    for k, child in enumerate(children_doc):
        if not isinstance(child, dict):
            raise MalformedAnnotationError(f"group {group_id}: child {k} is not an object")
        children.append(_parse_view(child, f"{group_id}.{k + 1}", inherited, used))
    return RawGroup(group_id, tuple(children))


def _parse_metadata(obj) -> Metadata | None:
    if obj is None:
        return None
    if not isinstance(obj, dict):
        raise MalformedAnnotationError("'metadata' must be an object")
    authors = obj.get("authors", ())
    if isinstance(authors, str):
        authors = (authors,)
    year = obj.get("year")
    return Metadata(
        doi=obj.get("doi"),
        venue=obj.get("venue"),
        year=int(year) if year is not None else None,
        title=obj.get("title"),
        authors=tuple(str(a) for a in authors),
    )


# ---------------------------------------------------------------------------
# Canonical serialization


def serialize_annotation(a: AnnotatedMV) -> bytes:
    """Emit canonical JSON: sorted keys, floats fixed at 6 decimal places.

    Two serializations of equal models are byte-identical, and parsing the
    output reproduces the model whenever its coordinates are representable
    at 6 decimals (serialize . parse . serialize is always a fixpoint).
    """
    doc: dict = {
        "doi": a.doi,
        "image": {"w": a.image_w, "h": a.image_h},
        "display": _rect_doc(a.display),
        "views": [_entry_doc(e) for e in a.entries],
    }
    if a.metadata is not None:
        md = a.metadata
        meta: dict = {}
        if md.doi is not None:
            meta["doi"] = md.doi
        if md.venue is not None:
            meta["venue"] = md.venue
        if md.year is not None:
            meta["year"] = md.year
        if md.title is not None:
            meta["title"] = md.title
        if md.authors:
            meta["authors"] = list(md.authors)
        doc["metadata"] = meta
    return (_emit(doc) + "\n").encode("utf-8")


def _rect_doc(r: PixelRect) -> dict:
    return {"x": r.x, "y": r.y, "w": r.w, "h": r.h}


def _entry_doc(entry: RawView | RawGroup) -> dict:
    if isinstance(entry, RawGroup):
        return {
            "id": str(entry.id),
            "small multiples": [_entry_doc(c) for c in entry.children],
        }
    return {"id": entry.id, "type": entry.type.canonical, **_rect_doc(entry.rect)}


def _emit(obj) -> str:
    """Minimal canonical JSON emitter; controls float formatting exactly."""
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_emit(v)}" for k, v in items) + "}"
    if isinstance(obj, list):
        return "[" + ",".join(_emit(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return repr(obj)
    if isinstance(obj, float):
        return f"{obj:.6f}"
    return json.dumps(obj, ensure_ascii=False)


# ---------------------------------------------------------------------------
# Normalization to the unit square


def normalize(a: AnnotatedMV) -> MVDesign:
    """Clip every view to the display region, then map onto the unit square.

    Views whose clipped area is zero are dropped with a ClippedViewWarning;
    a group reduced to one child is lifted to a plain level-1 view.
    """
    d = a.display
    if d.w <= 0 or d.h <= 0:
        raise EmptyDisplayError("display rectangle has zero area")

    nodes: list[View | SmallMultiples] = []
    for entry in a.entries:
        if isinstance(entry, RawGroup):
            kept = [
                (rv, bbox)
                for rv in entry.children
                if (bbox := _clip_normalize(rv, d)) is not None
            ]
            if not kept:
                _warn_dropped(f"group {entry.id}")
                continue
            if len(kept) == 1:
                rv, bbox = kept[0]
                _warn_dropped(
                    f"group {entry.id} reduced to one child; lifting to level 1"
                )
                nodes.append(View(rv.type, bbox, str(entry.id)))
                continue
            children = tuple(View(rv.type, bbox, rv.id) for rv, bbox in kept)
            nodes.append(SmallMultiples.enclosing(entry.id, children))
        else:
            bbox = _clip_normalize(entry, d)
            if bbox is None:
                _warn_dropped(f"view {entry.id}")
                continue
            nodes.append(View(entry.type, bbox, entry.id))

    if not nodes:
        raise AllClippedError("no view survives clipping to the display region")

    metadata = a.metadata
    if a.doi and (metadata is None or metadata.doi is None):
        metadata = (
            Metadata(doi=a.doi)
            if metadata is None
            else dataclasses.replace(metadata, doi=a.doi)
        )
    return MVDesign(nodes=tuple(nodes), metadata=metadata)


def _clip_normalize(rv: RawView, d: PixelRect) -> BBox | None:
    x0 = max(rv.rect.left, d.left)
    y0 = max(rv.rect.top, d.top)
    x1 = min(rv.rect.right, d.right)
    y1 = min(rv.rect.bottom, d.bottom)
    if x1 - x0 <= 0 or y1 - y0 <= 0:
        return None
    return BBox.from_edges(
        (x0 - d.left) / d.w,
        (y0 - d.top) / d.h,
        (x1 - d.left) / d.w,
        (y1 - d.top) / d.h,
    )


def _warn_dropped(what: str) -> None:
    _warnings.warn(f"{what}: clipped to zero area, dropped", ClippedViewWarning,
                   stacklevel=3)


def annotation_from_design(mv: MVDesign, doi: str | None = None) -> AnnotatedMV:
    """Represent a normalized design as an annotation over a 1x1 "image"."""
    entries: list[RawView | RawGroup] = []
    for node in mv.nodes:
        if isinstance(node, SmallMultiples):
            entries.append(
                RawGroup(
                    node.id,
                    tuple(RawView(v.id, v.type, _px(v.bbox)) for v in node.children),
                )
            )
        else:
            entries.append(RawView(node.id, node.type, _px(node.bbox)))
    return AnnotatedMV(
        doi=doi or mv.doi or "",
        image_w=1.0,
        image_h=1.0,
        display=PixelRect(0.5, 0.5, 1.0, 1.0),
        entries=tuple(entries),
        metadata=mv.metadata,
    )


def _px(b: BBox) -> PixelRect:
    return PixelRect(b.x, b.y, b.w, b.h)
