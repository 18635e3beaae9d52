"""Exemplar retrieval: tensor encoding, mutual information, layout transfer.

An MV becomes a 3x3x14 tensor of per-cell, per-type area mass. A user
sketch becomes the same tensor after normalizing against the minimum box
enclosing its views (gaps in a sketch simply leave mass missing; sketches
are never refined, since gaps are meaningful while designing). Proximity
between two tensors is the mutual information of their flattened
126-vectors after shared-range equal-width discretization; corpus entries
are ranked by it in descending order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator

from .analytics import CoOccurrenceMatrix, position_grid, relative_position_change
from .encoding import LayoutCode, LayoutCoder
from .errors import (
    EmptyCorpusError,
    EmptySketchError,
    MissingTypeError,
    TemplateTooSmallError,
    TooFewViewsError,
)
from .model import (
    BBox,
    Corpus,
    MVDesign,
    SmallMultiples,
    View,
    ViewType,
    leaf_views,
    require_refined,
)

TENSOR_SHAPE = (3, 3, 14)
TENSOR_SIZE = 126


@dataclass(frozen=True)
class MIConfig:
    """Equal-width discretization setup; natural-log mutual information."""

    bins: int = 8

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError("bins must be >= 2")


def composition_tensor(mv: MVDesign) -> np.ndarray:
    """Sum of every leaf view's position grid, bucketed by view type."""
    require_refined(mv)
    t = np.zeros(TENSOR_SHAPE)
    for v in leaf_views(mv):
        t[:, :, v.type.index] += position_grid(v).reshape(3, 3)
    return t


@dataclass(frozen=True)
class SketchView:
    """A typed rectangle on the design canvas, center + size, any units."""

    type: ViewType
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError("sketch views need positive sizes")


@dataclass(frozen=True)
class UserSketch:
    views: tuple[SketchView, ...]
    canvas_w: float | None = None
    canvas_h: float | None = None


def sketch_bboxes(s: UserSketch) -> list[tuple[ViewType, BBox]]:
    """Sketch views normalized against their minimum enclosing rectangle."""
    if not s.views:
        raise EmptySketchError("sketch has no views")
    x0 = min(v.x - v.w / 2 for v in s.views)
    y0 = min(v.y - v.h / 2 for v in s.views)
    x1 = max(v.x + v.w / 2 for v in s.views)
    y1 = max(v.y + v.h / 2 for v in s.views)
    w, h = x1 - x0, y1 - y0
    out = []
    for v in s.views:
        out.append(
            (
                v.type,
                BBox.from_edges(
                    (v.x - v.w / 2 - x0) / w,
                    (v.y - v.h / 2 - y0) / h,
                    (v.x + v.w / 2 - x0) / w,
                    (v.y + v.h / 2 - y0) / h,
                ),
            )
        )
    return out


def sketch_tensor(s: UserSketch) -> np.ndarray:
    """Tensor of a sketch over its own enclosing box; no refinement."""
    t = np.zeros(TENSOR_SHAPE)
    for vtype, bbox in sketch_bboxes(s):
        t[:, :, vtype.index] += position_grid(bbox).reshape(3, 3)
    return t


def discretize(values, bins: int = 8, upper: float | None = None) -> np.ndarray:
    """Equal-width bin labels over [0, upper]; all-zero input is all label 0.

    ``upper`` defaults to the data maximum; a value exactly on an interior
    boundary goes to the upper bin, and the maximum clamps into the top bin.
    """
    v = np.asarray(values, dtype=float)
    if upper is None:
        upper = float(v.max()) if v.size else 0.0
    if upper <= 0.0:
        return np.zeros(v.shape, dtype=np.int64)
    width = upper / bins
    return np.minimum((v / width).astype(np.int64), bins - 1)


def mutual_information(
    a: np.ndarray, b: np.ndarray, config: MIConfig | None = None
) -> float:
    """MI of the two flattened tensors under shared-range discretization.

    Both 126-vectors are binned over [0, max of either], the joint
    histogram of the 126 paired samples is built, and MI is summed with
    the 0*log(0) = 0 convention and natural logarithm. Arguments are
    ordered canonically first, so MI(a, b) == MI(b, a) bit-for-bit.
    """
    cfg = config or MIConfig()
    x = np.asarray(a, dtype=float).reshape(-1)
    y = np.asarray(b, dtype=float).reshape(-1)
    if x.shape != y.shape:
        raise ValueError("tensors must have identical shape")
    if x.tobytes() > y.tobytes():  # canonical order makes MI exactly symmetric
        x, y = y, x
    upper = max(float(x.max()), float(y.max()))
    lx = discretize(x, cfg.bins, upper)
    ly = discretize(y, cfg.bins, upper)
    joint = np.zeros((cfg.bins, cfg.bins))
    np.add.at(joint, (lx, ly), 1.0)
    joint /= x.size
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    mi = 0.0
    for i, j in zip(*np.nonzero(joint)):
        p = joint[i, j]
        mi += p * (math.log(p) - math.log(px[i]) - math.log(py[j]))
    return max(mi, 0.0)


@dataclass(frozen=True)
class Recommendation:
    doi: str
    score: float
    code: LayoutCode
    rank: int


class MVRecommender(BaseEstimator):
    """Ranks corpus designs by mutual information against a user sketch.

    fit() pre-computes each design's composition tensor and layout code;
    recommend() scores a sketch against all of them and returns the top-k,
    ordered by descending score with ties broken by ascending doi.
    """

    def __init__(self, bins: int = 8):
        self.bins = bins

    def fit(self, X, y=None):
        items = tuple(X.items if isinstance(X, Corpus) else X)
        if not items:
            raise EmptyCorpusError("cannot fit a recommender on no designs")
        for mv in items:
            require_refined(mv)
        self.items_ = items
        self.dois_ = tuple(
            mv.doi if mv.doi else f"item-{i:04d}" for i, mv in enumerate(items)
        )
        self.tensors_ = np.stack(
            [composition_tensor(mv).reshape(-1) for mv in items]
        )
        self.codes_ = tuple(LayoutCoder().fit(items).transform(items))
        self.leaf_counts_ = tuple(len(leaf_views(mv)) for mv in items)
        return self

    @classmethod
    def from_cache(cls, items, dois, tensors, codes, bins: int = 8):
        """Rebuild a fitted recommender from persisted artifacts."""
        est = cls(bins=bins)
        est.items_ = tuple(items)
        est.dois_ = tuple(dois)
        est.tensors_ = np.asarray(tensors, dtype=float)
        est.codes_ = tuple(codes)
        est.leaf_counts_ = tuple(len(leaf_views(mv)) for mv in est.items_)
        return est

    def mi_scores(self, sketch: UserSketch) -> np.ndarray:
        self._check_fitted()
        target = sketch_tensor(sketch).reshape(-1)
        cfg = MIConfig(bins=self.bins)
        return np.array(
            [mutual_information(row, target, cfg) for row in self.tensors_]
        )

    def recommend(
        self,
        sketch: UserSketch,
        view_counts: set[int] | None = None,
        top_k: int = 10,
    ) -> list[Recommendation]:
        self._check_fitted()
        if not sketch.views:
            raise EmptySketchError("sketch has no views")
        scores = self.mi_scores(sketch)
        order = sorted(
            range(len(self.items_)), key=lambda i: (-scores[i], self.dois_[i])
        )
        out: list[Recommendation] = []
        for i in order:
            if view_counts is not None and not _count_matches(
                self.leaf_counts_[i], view_counts
            ):
                continue
            out.append(
                Recommendation(self.dois_[i], float(scores[i]), self.codes_[i],
                               len(out) + 1)
            )
            if len(out) >= top_k:
                break
        return out

    def item_by_doi(self, doi: str) -> MVDesign | None:
        self._check_fitted()
        try:
            return self.items_[self.dois_.index(doi)]
        except ValueError:
            return None

    def _check_fitted(self):
        if not hasattr(self, "tensors_"):
            raise RuntimeError("MVRecommender used before fit")


def _count_matches(count: int, wanted: set[int]) -> bool:
    # 10 denotes the open-ended "10+" bucket.
    return count in wanted or (10 in wanted and count >= 10)


def recommend(
    c: Corpus,
    sketch: UserSketch,
    view_counts: set[int] | None = None,
    top_k: int = 10,
    bins: int = 8,
) -> list[Recommendation]:
    """One-shot ranking over a refined corpus; see MVRecommender."""
    return MVRecommender(bins=bins).fit(c).recommend(sketch, view_counts, top_k)


def correlated_types(
    t: ViewType, m: CoOccurrenceMatrix, top_k: int | None = None
) -> list[tuple[ViewType, float]]:
    """Types most likely to co-occur with t: column t sorted descending,
    t itself and never-seen types excluded."""
    if m.missing(t):
        raise MissingTypeError(f"{t.canonical} does not occur in the corpus")
    column = m.column(t)
    pairs = [
        (other, float(column[other.index]))
        for other in ViewType
        if other is not t and not np.isnan(column[other.index])
    ]
    pairs.sort(key=lambda p: (-p[1], p[0].index))
    return pairs[:top_k] if top_k is not None else pairs


_ALIGN_MODES = ("left", "right", "top", "bottom", "center-h", "center-v")


def align_views(selection: list[BBox], mode: str) -> list[BBox]:
    """Align edges to the selection-wide extremum or centers to the mean;
    sizes never change."""
    if len(selection) < 2:
        raise TooFewViewsError("alignment needs at least two views")
    if mode not in _ALIGN_MODES:
        raise ValueError(f"mode must be one of {_ALIGN_MODES}")
    if mode == "left":
        edge = min(b.left for b in selection)
        return [replace(b, x=edge + b.w / 2) for b in selection]
    if mode == "right":
        edge = max(b.right for b in selection)
        return [replace(b, x=edge - b.w / 2) for b in selection]
    if mode == "top":
        edge = min(b.top for b in selection)
        return [replace(b, y=edge + b.h / 2) for b in selection]
    if mode == "bottom":
        edge = max(b.bottom for b in selection)
        return [replace(b, y=edge - b.h / 2) for b in selection]
    if mode == "center-h":
        center = sum(b.x for b in selection) / len(selection)
        return [replace(b, x=center) for b in selection]
    center = sum(b.y for b in selection) / len(selection)
    return [replace(b, y=center) for b in selection]


def apply_layout(template: MVDesign, sketch: UserSketch) -> MVDesign:
    """Pour sketch views into a template's slots, keeping its geometry.

    Slots are the template's level-1 boxes, visited largest first. Each
    slot takes an exact-type sketch view when one is left (closest by
    position-grid distance D), then remaining views fill remaining slots
    by minimal D; slots left over keep the template's type as placeholder.
    """
    require_refined(template)
    if not sketch.views:
        raise EmptySketchError("sketch has no views")
    slots = [(node.bbox, _node_type(node)) for node in template.nodes]
    if len(slots) < len(sketch.views):
        raise TemplateTooSmallError(
            f"template has {len(slots)} slots for {len(sketch.views)} views"
        )
    slot_order = sorted(range(len(slots)), key=lambda i: (-slots[i][0].area, i))
    slot_grids = [position_grid(b) for b, _ in slots]
    views = sketch_bboxes(sketch)
    view_grids = [position_grid(b) for _, b in views]
    assigned: dict[int, int] = {}
    taken: set[int] = set()

    def closest(slot_idx: int, candidates) -> int | None:
        best = None
        for vi in candidates:
            key = (
                relative_position_change(slot_grids[slot_idx], view_grids[vi]),
                vi,
            )
            if best is None or key < best:
                best = key
        return None if best is None else best[1]

    for si in slot_order:  # exact type matches first
        vi = closest(
            si,
            (
                vi
                for vi in range(len(views))
                if vi not in taken and views[vi][0] is slots[si][1]
            ),
        )
        if vi is not None:
            assigned[si] = vi
            taken.add(vi)
    for si in slot_order:  # then best remaining by grid distance
        if si in assigned:
            continue
        vi = closest(si, (vi for vi in range(len(views)) if vi not in taken))
        if vi is None:
            break
        assigned[si] = vi
        taken.add(vi)

    nodes = []
    for si, (bbox, slot_type) in enumerate(slots):
        vtype = views[assigned[si]][0] if si in assigned else slot_type
        nodes.append(View(vtype, bbox, str(si + 1)))
    return MVDesign(nodes=tuple(nodes), refined=True)


def _node_type(node) -> ViewType:
    if isinstance(node, SmallMultiples):
        return node.children[0].type
    return node.type
