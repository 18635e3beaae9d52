"""Composition and configuration metrics over an MV corpus.

Composition: which view types appear and how they co-occur (frequencies,
conditional probabilities). Configuration: where views sit (3x3 position
grids, relative-position change D, per-type stability STB) and how they
are shaped (aspect ratios).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .encoding import LayoutCode
from .errors import DegenerateViewError, EmptyCorpusError
from .geometry import interval_overlap
from .model import BBox, Corpus, MVDesign, View, ViewType, leaf_views

#: Number of view-count buckets before everything folds into "10+".
COUNT_BUCKET = 10

#: Aspect ratios outside this range are kept in data but clipped when the
#: range matters for presentation.
ARC_CLIP = (0.1, 10.0)

_CELL = 1.0 / 3.0


def position_grid(view: View | BBox) -> np.ndarray:
    """Overlap area of a view with each cell of the 3x3 display partition.

    Returned row-major from the top-left cell; each entry already carries
    the 1/9 cell weight, so the grid sums to the view's normalized area.
    """
    bbox = view.bbox if isinstance(view, View) else view
    grid = np.zeros(9)
    for r in range(3):
        hy = interval_overlap(bbox.top, bbox.bottom, r * _CELL, (r + 1) * _CELL)
        if hy <= 0.0:
            continue
        for c in range(3):
            hx = interval_overlap(bbox.left, bbox.right, c * _CELL, (c + 1) * _CELL)
            grid[3 * r + c] = hx * hy
    return grid


def relative_position_change(a: np.ndarray, b: np.ndarray) -> float:
    """D = half the L1 distance between two position grids; 0 iff equal."""
    return 0.5 * float(np.abs(np.asarray(a) - np.asarray(b)).sum())


def type_grid(mv: MVDesign, t: ViewType) -> np.ndarray | None:
    """Summed position grid of every leaf view of one type, or None."""
    grids = [position_grid(v) for v in leaf_views(mv) if v.type is t]
    if not grids:
        return None
    return np.sum(grids, axis=0)


def view_count_distribution(
    c: Corpus, level1: bool = False, bucket: int = COUNT_BUCKET
) -> dict[int, int]:
    """Histogram of views per MV; counts at or above ``bucket`` fold together.

    Leaf views are counted by default; ``level1=True`` counts top-level
    nodes instead (a small multiples group then counts as one).
    """
    _require_items(c)
    histogram: Counter[int] = Counter()
    for mv in c.items:
        n = len(mv.nodes) if level1 else len(leaf_views(mv))
        histogram[min(n, bucket)] += 1
    return dict(sorted(histogram.items()))


def type_frequency(c: Corpus) -> dict[ViewType, float]:
    """Fraction of MVs containing at least one leaf view of each type."""
    _require_items(c)
    containing: Counter[ViewType] = Counter()
    for mv in c.items:
        for t in {v.type for v in leaf_views(mv)}:
            containing[t] += 1
    return {t: containing.get(t, 0) / c.n for t in ViewType}


@dataclass(frozen=True)
class CoOccurrenceMatrix:
    """P(type_i | type_j) over the corpus, NaN where type_j never occurs.

    ``probs[i, j]`` conditions on j; the diagonal holds the probability
    that a type occurs two or more times (as separate leaf views) in an MV
    that contains it.
    """

    probs: np.ndarray  # (14, 14)

    def prob(self, i: ViewType, j: ViewType) -> float:
        return float(self.probs[i.index, j.index])

    def missing(self, j: ViewType) -> bool:
        return bool(np.isnan(self.probs[:, j.index]).all())

    def column(self, j: ViewType) -> np.ndarray:
        return self.probs[:, j.index]


def conditional_probability(c: Corpus) -> CoOccurrenceMatrix:
    _require_items(c)
    k = len(ViewType)
    present = np.zeros((c.n, k), dtype=bool)
    repeated = np.zeros((c.n, k), dtype=bool)
    for row, mv in enumerate(c.items):
        counts = Counter(v.type.index for v in leaf_views(mv))
        for idx, cnt in counts.items():
            present[row, idx] = True
            repeated[row, idx] = cnt >= 2

    n_with = present.sum(axis=0).astype(float)  # per type j
    probs = np.full((k, k), np.nan)
    for j in range(k):
        if n_with[j] == 0:
            continue
        both = (present & present[:, j][:, None]).sum(axis=0)
        probs[:, j] = both / n_with[j]
        probs[j, j] = (repeated[:, j] & present[:, j]).sum() / n_with[j]
    return CoOccurrenceMatrix(probs)


def aspect_ratio(v: View | BBox) -> float:
    """ARC = width over height; 1 is square, small is tall, large is wide."""
    bbox = v.bbox if isinstance(v, View) else v
    if bbox.h <= 0:
        raise DegenerateViewError("aspect ratio of a zero-height view")
    return bbox.w / bbox.h


def mean_position_by_type(c: Corpus) -> dict[ViewType, np.ndarray]:
    """Per-type grids summed within each MV, averaged over MVs containing
    the type; the grid mass is the type's average share of the display."""
    _require_items(c)
    sums: dict[ViewType, np.ndarray] = {}
    counts: Counter[ViewType] = Counter()
    for mv in c.items:
        for t in {v.type for v in leaf_views(mv)}:
            grid = type_grid(mv, t)
            sums[t] = sums.get(t, np.zeros(9)) + grid
            counts[t] += 1
    return {t: sums[t] / counts[t] for t in sums}


def stability(
    c: Corpus,
    t: ViewType,
    layout: LayoutCode | None = None,
    codes: list[LayoutCode] | None = None,
) -> float | None:
    """Mean pairwise D of a type's per-MV grid over MVs containing it.

    Multiple views of the type within one MV are summed into a single grid
    first. Returns None when fewer than two qualifying MVs exist (a null
    cell). Filtering by layout code requires per-item ``codes``.
    """
    _require_items(c)
    if layout is not None and codes is None:
        raise ValueError("layout filtering requires per-item layout codes")
    grids = []
    for idx, mv in enumerate(c.items):
        if layout is not None and codes[idx] != layout:
            continue
        grid = type_grid(mv, t)
        if grid is not None:
            grids.append(grid)
    m = len(grids)
    if m < 2:
        return None
    total = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            total += relative_position_change(grids[i], grids[j])
    return 2.0 * total / (m * (m - 1))


@dataclass(frozen=True)
class TypeStats:
    type: ViewType
    frequency: float
    arc_values: tuple[float, ...]
    arc_mean: float | None
    arc_quartiles: tuple[float, float, float] | None  # q1, median, q3
    mean_grid: np.ndarray | None

    @property
    def mean_area_share(self) -> float | None:
        if self.mean_grid is None:
            return None
        return float(self.mean_grid.sum())


def compute_type_stats(c: Corpus) -> dict[ViewType, TypeStats]:
    _require_items(c)
    freq = type_frequency(c)
    grids = mean_position_by_type(c)
    arcs: dict[ViewType, list[float]] = {t: [] for t in ViewType}
    for mv in c.items:
        for v in leaf_views(mv):
            arcs[v.type].append(aspect_ratio(v))
    out = {}
    for t in ViewType:
        values = arcs[t]
        if values:
            q1, med, q3 = np.percentile(values, [25, 50, 75])
            stats = TypeStats(
                t, freq[t], tuple(values), float(np.mean(values)),
                (float(q1), float(med), float(q3)), grids.get(t),
            )
        else:
            stats = TypeStats(t, freq[t], (), None, None, grids.get(t))
        out[t] = stats
    return out


def _require_items(c: Corpus) -> None:
    if c.n == 0:
        raise EmptyCorpusError("corpus has no items")
