"""Axis-aligned rectangle primitives.

Rectangles are edge tuples ``(x0, y0, x1, y1)`` with ``x0 < x1`` and
``y0 < y1``; the y axis grows downward (image convention), so ``y0`` is
the top edge.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Rect = tuple[float, float, float, float]


def rect_w(r: Rect) -> float:
    return r[2] - r[0]


def rect_h(r: Rect) -> float:
    return r[3] - r[1]


def rect_area(r: Rect) -> float:
    return max(0.0, r[2] - r[0]) * max(0.0, r[3] - r[1])


def rect_center(r: Rect) -> tuple[float, float]:
    return (r[0] + r[2]) / 2.0, (r[1] + r[3]) / 2.0


def interval_overlap(a0: float, a1: float, b0: float, b1: float) -> float:
    return max(0.0, min(a1, b1) - max(a0, b0))


def intersection_area(a: Rect, b: Rect) -> float:
    return interval_overlap(a[0], a[2], b[0], b[2]) * interval_overlap(
        a[1], a[3], b[1], b[3]
    )


def enclosing_rect(rects: Iterable[Rect]) -> Rect:
    rects = list(rects)
    if not rects:
        raise ValueError("enclosing_rect of no rectangles")
    return (
        min(r[0] for r in rects),
        min(r[1] for r in rects),
        max(r[2] for r in rects),
        max(r[3] for r in rects),
    )


def union_area(rects: Sequence[Rect]) -> float:
    """Exact area of the union, by coordinate compression.

    Quadratic in the number of distinct edges; intended for the handful of
    boxes a single layout holds, not for bulk geometry.
    """
    if not rects:
        return 0.0
    xs = sorted({r[0] for r in rects} | {r[2] for r in rects})
    ys = sorted({r[1] for r in rects} | {r[3] for r in rects})
    total = 0.0
    for i in range(len(xs) - 1):
        cx = (xs[i] + xs[i + 1]) / 2.0
        w = xs[i + 1] - xs[i]
        for j in range(len(ys) - 1):
            cy = (ys[j] + ys[j + 1]) / 2.0
            if any(r[0] <= cx <= r[2] and r[1] <= cy <= r[3] for r in rects):
                total += w * (ys[j + 1] - ys[j])
    return total


def open_segment_crosses(
    ax: float, ay: float, bx: float, by: float, rect: Rect, eps: float = 1e-12
) -> bool:
    """True iff the open segment a-b passes through the rectangle interior.

    Touching an edge or a corner does not count as crossing.
    """
    x0, y0, x1, y1 = rect
    dx, dy = bx - ax, by - ay
    t_lo, t_hi = 0.0, 1.0
    for d, lo, hi, o in ((dx, x0, x1, ax), (dy, y0, y1, ay)):
        if abs(d) <= eps:
            # Segment parallel to this slab: must lie strictly inside it.
            if o <= lo + eps or o >= hi - eps:
                return False
        else:
            ta, tb = (lo - o) / d, (hi - o) / d
            if ta > tb:
                ta, tb = tb, ta
            t_lo, t_hi = max(t_lo, ta), min(t_hi, tb)
    return t_hi - t_lo > eps
