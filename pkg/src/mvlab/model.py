"""Core data model for multiple-view (MV) layouts.

An MV design is an ordered list of level-1 nodes filling a normalized
unit-square display space. A node is either a plain view or a "small
multiples" group holding level-2 views; nesting never goes deeper. All
types are immutable values and safe to share between threads.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import NotRefinedError
from .geometry import Rect, intersection_area, union_area

#: Tolerance for pointwise geometric comparisons (edges, overlaps).
GEOM_EPS = 1e-9
#: Tolerance for area sums over a whole layout.
AREA_EPS = 1e-6


class ViewType(enum.Enum):
    """Closed taxonomy of the 14 view categories.

    Twelve information-visualization chart types plus SciVis (volume/flow
    rendering) and Panel (menus, legends, narrative text). Each member has
    a stable index 0..13 and a unique short display name.
    """

    def __new__(cls, index: int, canonical: str, short: str):
        obj = object.__new__(cls)
        obj._value_ = index
        obj.canonical = canonical
        obj.short = short
        return obj

    AREA = (0, "Area", "Area")
    BAR = (1, "Bar", "Bar")
    CIRCLE = (2, "Circle", "Circle")
    DIAGRAM = (3, "Diagram", "Diag.")
    DISTRIBUTION = (4, "Distribution", "Distri.")
    GRID_MATRIX = (5, "GridMatrix", "Grid")
    LINE = (6, "Line", "Line")
    MAP = (7, "Map", "Map")
    POINT = (8, "Point", "Point")
    TABLE = (9, "Table", "Table")
    TEXT = (10, "Text", "Text")
    TREES_NETWORKS = (11, "TreesNetworks", "Net.")
    SCIVIS = (12, "SciVis", "SciVis")
    PANEL = (13, "Panel", "Panel")

    @property
    def index(self) -> int:
        return self.value

    @classmethod
    def from_name(cls, name: str) -> "ViewType":
        """Resolve a canonical name or short alias, case-insensitively."""
        key = name.strip().lower()
        try:
            return _TYPE_LOOKUP[key]
        except KeyError:
            raise KeyError(f"unknown view type name: {name!r}") from None


_TYPE_LOOKUP: dict[str, ViewType] = {}
for _t in ViewType:
    _TYPE_LOOKUP[_t.canonical.lower()] = _t
    _TYPE_LOOKUP[_t.short.lower()] = _t
    _TYPE_LOOKUP[_t.name.lower()] = _t


@dataclass(frozen=True)
class BBox:
    """Normalized center position and size of a rectangle in display space."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"BBox needs positive size, got w={self.w}, h={self.h}")

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

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def edges(self) -> Rect:
        return (self.left, self.top, self.right, self.bottom)

    @classmethod
    def from_edges(cls, x0: float, y0: float, x1: float, y1: float) -> "BBox":
        return cls((x0 + x1) / 2.0, (y0 + y1) / 2.0, x1 - x0, y1 - y0)

    def within_unit(self, eps: float = GEOM_EPS) -> bool:
        return (
            self.left >= -eps
            and self.top >= -eps
            and self.right <= 1.0 + eps
            and self.bottom <= 1.0 + eps
        )

    def contains(self, other: "BBox", eps: float = GEOM_EPS) -> bool:
        return (
            other.left >= self.left - eps
            and other.top >= self.top - eps
            and other.right <= self.right + eps
            and other.bottom <= self.bottom + eps
        )

    def overlap_area(self, other: "BBox") -> float:
        return intersection_area(self.edges, other.edges)


_ID_RE = re.compile(r"^[1-9][0-9]*(\.[1-9][0-9]*)?$")


def is_valid_view_id(view_id: str) -> bool:
    """Level-1 ids are integers ("3"); level-2 ids are dotted ("3.1")."""
    return bool(_ID_RE.match(view_id))


@dataclass(frozen=True)
class View:
    type: ViewType
    bbox: BBox
    id: str


@dataclass(frozen=True)
class SmallMultiples:
    """A juxtaposed group of same-level views, one level-1 node."""

    id: int
    bbox: BBox
    children: tuple[View, ...]

    @classmethod
    def enclosing(cls, group_id: int, children: tuple[View, ...]) -> "SmallMultiples":
        x0 = min(v.bbox.left for v in children)
        y0 = min(v.bbox.top for v in children)
        x1 = max(v.bbox.right for v in children)
        y1 = max(v.bbox.bottom for v in children)
        return cls(group_id, BBox.from_edges(x0, y0, x1, y1), children)


Node = View | SmallMultiples


@dataclass(frozen=True)
class Metadata:
    doi: str | None = None
    venue: str | None = None
    year: int | None = None
    title: str | None = None
    authors: tuple[str, ...] = ()


@dataclass(frozen=True)
class MVDesign:
    """A display space filled by level-1 views and small multiples.

    ``refined`` marks geometry that went through gap/overlap removal;
    ``non_guillotine`` flags layouts the refinement loop could not merge
    into a single box. ``warnings`` preserves refinement diagnostics.
    """

    nodes: tuple[Node, ...]
    metadata: Metadata | None = None
    refined: bool = False
    non_guillotine: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def doi(self) -> str | None:
        return self.metadata.doi if self.metadata else None


@dataclass(frozen=True)
class Corpus:
    items: tuple[MVDesign, ...]

    @property
    def n(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


def leaf_views(mv: MVDesign) -> list[View]:
    """All plain level-1 views plus level-2 children, in document order.

    Small-multiples containers themselves are excluded.
    """
    out: list[View] = []
    for node in mv.nodes:
        if isinstance(node, SmallMultiples):
            out.extend(node.children)
        else:
            out.append(node)
    return out


def leaf_count(mv: MVDesign) -> int:
    return len(leaf_views(mv))


def require_refined(mv: MVDesign) -> None:
    if not mv.refined:
        raise NotRefinedError("operation requires a refined MVDesign")


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    where: str = ""


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default=())

    @property
    def errors(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.code.startswith("E_"))

    @property
    def warnings(self) -> tuple[Violation, ...]:
        return tuple(v for v in self.violations if v.code.startswith("W_"))

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def is_empty(self) -> bool:
        return not self.violations

    def codes(self) -> list[str]:
        return [v.code for v in self.violations]


def validate(mv: MVDesign) -> ValidationReport:
    """Check structural invariants; never raises.

    Overlaps and gaps between level-1 boxes are warnings (raw annotations
    legitimately have them before refinement); everything else is an error.
    """
    found: list[Violation] = []

    leaves = leaf_views(mv)
    if len(leaves) < 2:
        found.append(
            Violation("E_EMPTY", f"an MV arranges two or more views, got {len(leaves)}")
        )

    seen_ids: set[str] = set()
    for node in mv.nodes:
        for view, inside in _iter_views(node):
            if not is_valid_view_id(view.id):
                found.append(
                    Violation("E_ID_FORMAT", f"bad view id {view.id!r}", view.id)
                )
            elif inside is not None:
                prefix = view.id.split(".")[0]
                if "." not in view.id or prefix != str(inside.id):
                    found.append(
                        Violation(
                            "E_ID_FORMAT",
                            f"child id {view.id!r} does not match group {inside.id}",
                            view.id,
                        )
                    )
            if view.id in seen_ids:
                found.append(
                    Violation("E_ID_FORMAT", f"duplicate view id {view.id!r}", view.id)
                )
            seen_ids.add(view.id)
            if not view.bbox.within_unit():
                found.append(
                    Violation(
                        "E_OUT_OF_BOUNDS",
                        f"view {view.id} lies outside the display space",
                        view.id,
                    )
                )
            if inside is not None and not inside.bbox.contains(view.bbox):
                found.append(
                    Violation(
                        "E_OUT_OF_BOUNDS",
                        f"child {view.id} exceeds its group box",
                        view.id,
                    )
                )
        if isinstance(node, SmallMultiples):
            if len(node.children) < 2:
                found.append(
                    Violation(
                        "E_EMPTY",
                        f"small multiples {node.id} needs >= 2 children",
                        str(node.id),
                    )
                )
            if not node.bbox.within_unit():
                found.append(
                    Violation(
                        "E_OUT_OF_BOUNDS",
                        f"group {node.id} lies outside the display space",
                        str(node.id),
                    )
                )

    rects = [node.bbox for node in mv.nodes]
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            if rects[i].overlap_area(rects[j]) > GEOM_EPS:
                found.append(
                    Violation(
                        "W_OVERLAP",
                        f"level-1 boxes {i} and {j} overlap",
                        f"{i},{j}",
                    )
                )
    if rects:
        covered = union_area([_clip_unit(r.edges) for r in rects])
        if covered < 1.0 - AREA_EPS:
            found.append(
                Violation("W_GAP", f"display coverage {covered:.6f} < 1")
            )

    return ValidationReport(tuple(found))


def _iter_views(node: Node):
    if isinstance(node, SmallMultiples):
        for child in node.children:
            yield child, node
    else:
        yield node, None


def _clip_unit(r: Rect) -> Rect:
    return (max(r[0], 0.0), max(r[1], 0.0), min(r[2], 1.0), min(r[3], 1.0))
