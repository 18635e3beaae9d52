"""Random layout generators shared across the test suite.

All generators are seeded-RNG deterministic so failures reproduce.
"""

from __future__ import annotations

import random

from mvlab import BBox, MVDesign, SmallMultiples, View, ViewType

TYPES = list(ViewType)

Rect = tuple[float, float, float, float]


def random_guillotine_rects(rng: random.Random, n_leaves: int) -> list[Rect]:
    """Exact tiling of the unit square by repeated guillotine splits."""
    rects: list[Rect] = [(0.0, 0.0, 1.0, 1.0)]
    while len(rects) < n_leaves:
        i = max(
            range(len(rects)),
            key=lambda k: (rects[k][2] - rects[k][0]) * (rects[k][3] - rects[k][1]),
        )
        l, t, r, b = rects.pop(i)
        split_x = (r - l) >= (b - t)
        if rng.random() < 0.2:
            split_x = not split_x
        f = rng.uniform(0.35, 0.65)
        if split_x:
            m = l + f * (r - l)
            rects += [(l, t, m, b), (m, t, r, b)]
        else:
            m = t + f * (b - t)
            rects += [(l, t, r, m), (l, m, r, b)]
    return rects


def perturb(rng: random.Random, rect: Rect, scale: float = 0.3) -> Rect:
    """Move each edge by less than ``scale`` times the local snap threshold."""
    l, t, r, b = rect
    d = scale * 0.03 * min(r - l, b - t)
    return (
        l + rng.uniform(-d, d),
        t + rng.uniform(-d, d),
        r + rng.uniform(-d, d),
        b + rng.uniform(-d, d),
    )


def views_from_rects(rects, rng: random.Random | None = None) -> tuple[View, ...]:
    out = []
    for i, rect in enumerate(rects):
        t = TYPES[rng.randrange(14)] if rng else TYPES[i % 14]
        out.append(View(t, BBox.from_edges(*rect), str(i + 1)))
    return tuple(out)


def tiled_design(rects, rng: random.Random | None = None) -> MVDesign:
    """An exact tiling marked refined, bypassing the refinement pass."""
    return MVDesign(views_from_rects(rects, rng), refined=True)


def fuzzed_design(rng: random.Random, n_leaves: int) -> MVDesign:
    rects = [perturb(rng, r) for r in random_guillotine_rects(rng, n_leaves)]
    return MVDesign(views_from_rects(rects, rng))


def warp_rect(rect: Rect, gx: float, gy: float) -> Rect:
    """Monotone per-axis power warp; preserves guillotine structure."""
    l, t, r, b = rect
    return (l**gx, t**gy, r**gx, b**gy)


def mirror_rect(rect: Rect) -> Rect:
    l, t, r, b = rect
    return (1.0 - r, t, 1.0 - l, b)


PINWHEEL: list[Rect] = [
    (0.0, 0.0, 0.6, 0.4),
    (0.6, 0.0, 1.0, 0.6),
    (0.4, 0.6, 1.0, 1.0),
    (0.0, 0.4, 0.4, 1.0),
    (0.4, 0.4, 0.6, 0.6),
]


def small_multiples_of(group_id: int, rects, vtype: ViewType) -> SmallMultiples:
    children = tuple(
        View(vtype, BBox.from_edges(*r), f"{group_id}.{k + 1}")
        for k, r in enumerate(rects)
    )
    return SmallMultiples.enclosing(group_id, children)
