"""Bottom-up layout refinement: removes overlaps and gaps between boxes.

Manual annotation leaves small misalignments between neighboring view
rectangles. Refinement repairs them by repeatedly (1) grouping boxes that
sit side by side with nearly equal extents, (2) snapping group members to
the group frame and to each other, and (3) replacing the members by their
group box, until a single box spans the display space. The snap threshold
theta is 3% of the average width/height of the group box being fixed, so
a fix never moves an edge far from where the annotator put it.

Layouts where no pair can be grouped (e.g. pinwheels) come back flagged
``non_guillotine`` with their boxes snapped to the display bounds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from sklearn.base import BaseEstimator, TransformerMixin

from .errors import EmptyBoxListError
from .geometry import (
    Rect,
    interval_overlap,
    open_segment_crosses,
    rect_center,
    union_area,
)
from .model import AREA_EPS, GEOM_EPS, BBox, MVDesign, SmallMultiples


@dataclass(frozen=True)
class RefinementConfig:
    """theta_fraction scales the snap threshold per group box."""

    theta_fraction: float = 0.03
    max_iterations: int = 100

    def __post_init__(self):
        if not 0.0 < self.theta_fraction < 0.5:
            raise ValueError("theta_fraction must be in (0, 0.5)")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")

    def theta(self, w: float, h: float) -> float:
        return self.theta_fraction * (w + h) / 2.0


def enclosing_box(boxes: list[BBox] | tuple[BBox, ...]) -> BBox:
    """Smallest axis-aligned rectangle containing all inputs."""
    if not boxes:
        raise EmptyBoxListError("enclosing_box of an empty list")
    if len(boxes) == 1:
        return boxes[0]
    return BBox.from_edges(
        min(b.left for b in boxes),
        min(b.top for b in boxes),
        max(b.right for b in boxes),
        max(b.bottom for b in boxes),
    )


@dataclass(frozen=True)
class GroupBox:
    members: tuple[BBox, ...]
    bbox_g: BBox

    def __post_init__(self):
        for m in self.members:
            if not self.bbox_g.contains(m, eps=GEOM_EPS):
                raise ValueError("group box does not enclose every member")

    @classmethod
    def from_members(cls, members) -> "GroupBox":
        members = tuple(members)
        return cls(members, enclosing_box(members))


def neighbors(boxes: list[BBox] | tuple[BBox, ...]) -> set[tuple[int, int]]:
    """Index pairs whose centers can be joined without crossing a third box.

    The segment is open and only box interiors block it, so touching a
    boundary or passing exactly through a shared corner does not cross.
    """
    rects = [b.edges for b in boxes]
    centers = [rect_center(r) for r in rects]
    out: set[tuple[int, int]] = set()
    for i in range(len(rects)):
        for j in range(i + 1, len(rects)):
            blocked = any(
                k not in (i, j)
                and open_segment_crosses(*centers[i], *centers[j], rects[k])
                for k in range(len(rects))
            )
            if not blocked:
                out.add((i, j))
    return out


def groupable(a: BBox, b: BBox, theta: float) -> bool:
    """Centers aligned on one axis and near-equal extent on that axis.

    Horizontally aligned boxes must have nearly the same height, vertical
    ones nearly the same width; the theta boundary is inclusive.
    """
    horizontal = abs(a.y - b.y) <= theta and abs(a.h - b.h) <= theta
    vertical = abs(a.x - b.x) <= theta and abs(a.w - b.w) <= theta
    return horizontal or vertical


@dataclass(frozen=True)
class AlignResult:
    boxes: tuple[BBox, ...]
    unresolved: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.unresolved


def align_group(group: GroupBox, theta: float) -> AlignResult:
    """Snap members to the group frame and close sub-theta seams.

    The group box itself never changes. Gaps or overlaps of theta or more
    between neighbors are reported in ``unresolved``, not forced shut.
    """
    work = [_Box(*m.edges) for m in group.members]
    frame = _Box(*group.bbox_g.edges, children=work)
    unresolved = _align_members(frame, theta)
    return AlignResult(
        tuple(BBox.from_edges(b.l, b.t, b.r, b.b) for b in work),
        tuple(unresolved),
    )


# ---------------------------------------------------------------------------
# Internal mutable geometry


class _Box:
    """Mutable rectangle; resizing remaps nested children affinely."""

    __slots__ = ("l", "t", "r", "b", "children", "ref")

    def __init__(self, l, t, r, b, children=None, ref=None):
        self.l, self.t, self.r, self.b = l, t, r, b
        self.children: list[_Box] = children or []
        self.ref = ref

    @property
    def w(self):
        return self.r - self.l

    @property
    def h(self):
        return self.b - self.t

    @property
    def cx(self):
        return (self.l + self.r) / 2.0

    @property
    def cy(self):
        return (self.t + self.b) / 2.0

    @property
    def rect(self) -> Rect:
        return (self.l, self.t, self.r, self.b)

    def to_bbox(self) -> BBox:
        return BBox.from_edges(self.l, self.t, self.r, self.b)

    def set_rect(self, nl, nt, nr, nb):
        if nr - nl <= GEOM_EPS or nb - nt <= GEOM_EPS:
            return  # refuse to collapse a box
        ol, ot, sw, sh = self.l, self.t, self.w, self.h
        fx, fy = (nr - nl) / sw, (nb - nt) / sh
        self.l, self.t, self.r, self.b = nl, nt, nr, nb
        for child in self.children:
            child.set_rect(
                nl + (child.l - ol) * fx,
                nt + (child.t - ot) * fy,
                nl + (child.r - ol) * fx,
                nt + (child.b - ot) * fy,
            )


def _seam(a: _Box, b: _Box):
    """Orientation and signed gap (negative = overlap) of a neighbor pair.

    Returns (orientation, gap, lo, hi) with lo the left/upper box, or None
    for diagonal pairs whose perpendicular projections barely overlap.
    """
    dxc, dyc = b.cx - a.cx, b.cy - a.cy
    if abs(dxc) >= abs(dyc):
        lo, hi = (a, b) if dxc >= 0 else (b, a)
        span = interval_overlap(lo.t, lo.b, hi.t, hi.b)
        if span < 0.5 * min(lo.h, hi.h):
            return None
        return "h", hi.l - lo.r, lo, hi
    lo, hi = (a, b) if dyc >= 0 else (b, a)
    span = interval_overlap(lo.l, lo.r, hi.l, hi.r)
    if span < 0.5 * min(lo.w, hi.w):
        return None
    return "v", hi.t - lo.b, lo, hi


def _align_members(group: _Box, theta: float) -> list[str]:
    unresolved: list[str] = []
    members = group.children

    # Snap member edges onto the group frame. Discrepancies at or below
    # GEOM_EPS already count as aligned; rewriting them would perturb
    # nested children and break bit-exact idempotence.
    def snap(value: float, target: float) -> float:
        return target if GEOM_EPS < abs(value - target) <= theta else value

    for m in members:
        nl = snap(m.l, group.l)
        nr = snap(m.r, group.r)
        nt = snap(m.t, group.t)
        nb = snap(m.b, group.b)
        if (nl, nt, nr, nb) != m.rect:
            m.set_rect(nl, nt, nr, nb)

    # Close seams between neighboring members, smallest discrepancy first.
    boxes = [m.to_bbox() for m in members]
    ordered = []
    for i, j in neighbors(boxes):
        seam = _seam(members[i], members[j])
        if seam is None:
            continue
        ordered.append((abs(seam[1]), i, j))
    for _, i, j in sorted(ordered):
        seam = _seam(members[i], members[j])
        if seam is None:
            continue
        orient, gap, lo, hi = seam
        if abs(gap) <= GEOM_EPS:
            continue
        if abs(gap) < theta:
            if orient == "h":
                mid = (lo.r + hi.l) / 2.0
                lo.set_rect(lo.l, lo.t, mid, lo.b)
                hi.set_rect(mid, hi.t, hi.r, hi.b)
            else:
                mid = (lo.b + hi.t) / 2.0
                lo.set_rect(lo.l, lo.t, lo.r, mid)
                hi.set_rect(hi.l, mid, hi.r, hi.b)
        else:
            unresolved.append(
                f"E_UNRESOLVABLE: gap {gap:.6f} between members {i} and {j} "
                f"is not below theta {theta:.6f}"
            )
    return unresolved


def _enclose_boxes(boxes: list[_Box]) -> Rect:
    return (
        min(b.l for b in boxes),
        min(b.t for b in boxes),
        max(b.r for b in boxes),
        max(b.b for b in boxes),
    )


def _best_pair(work: list[_Box], cfg: RefinementConfig):
    """Pick the groupable neighbor pair that most clearly forms a rectangle.

    Candidates are ranked by (intrusion, alignment discrepancy, seam gap):
    a merge whose enclosing box would cut deep into a third box is taken
    only as a last resort, and among clean merges the pair with the most
    similar extents wins (true row/column mates differ only by annotation
    noise, coincidental alignments differ by up to theta).
    """
    boxes = [b.to_bbox() for b in work]
    best = None
    for i, j in sorted(neighbors(boxes)):
        a, b = boxes[i], boxes[j]
        el, et, er, eb = _enclose_boxes([work[i], work[j]])
        theta = cfg.theta(er - el, eb - et)
        discrepancies = []
        if abs(a.y - b.y) <= theta and abs(a.h - b.h) <= theta:
            discrepancies.append(max(abs(a.y - b.y), abs(a.h - b.h)))
        if abs(a.x - b.x) <= theta and abs(a.w - b.w) <= theta:
            discrepancies.append(max(abs(a.x - b.x), abs(a.w - b.w)))
        if not discrepancies:
            continue
        seam = _seam(work[i], work[j])
        if seam is None:
            continue
        intrudes = 0
        for k, other in enumerate(boxes):
            if k in (i, j):
                continue
            dx = min(er, other.right) - max(el, other.left)
            dy = min(eb, other.bottom) - max(et, other.top)
            if dx > theta and dy > theta:
                intrudes = 1
                break
        key = (intrudes, min(discrepancies), abs(seam[1]), i, j)
        if best is None or key < best:
            best = key
    if best is None:
        return None
    return best[3], best[4]


def refine(mv: MVDesign, config: RefinementConfig | None = None) -> MVDesign:
    """Produce a gapless, overlap-free version of an annotated design.

    Small multiples are grouped and aligned first; then groupable neighbor
    pairs are merged and aligned until one box spans the display space,
    which is finally stretched onto the unit square. Every transformation
    of a container box carries its nested children along. Ids and types
    never change; only geometry does.

    Non-convergent inputs are returned with ``non_guillotine=True``, their
    residual boxes snapped to the display bounds and the leftover gaps
    recorded as warnings.
    """
    cfg = config or RefinementConfig()
    notes: list[str] = []

    roots: list[_Box] = []
    for node in mv.nodes:
        if isinstance(node, SmallMultiples):
            kids = [_Box(*v.bbox.edges, ref=v.id) for v in node.children]
            roots.append(_Box(*_enclose_boxes(kids), children=kids, ref=node.id))
        else:
            roots.append(_Box(*node.bbox.edges, ref=node.id))

    # Steps 1-2: align within each small-multiples group.
    for box in roots:
        if box.children:
            notes.extend(_align_members(box, cfg.theta(box.w, box.h)))

    # Steps 3-6: merge groupable neighbors until one box remains.
    work = list(roots)
    non_guillotine = False
    for _ in range(cfg.max_iterations):
        if len(work) <= 1:
            break
        pair = _best_pair(work, cfg)
        if pair is None:
            non_guillotine = True
            notes.append(
                f"E_NONCONVERGENT: {len(work)} boxes remain and none are groupable"
            )
            break
        i, j = pair
        merged = _Box(*_enclose_boxes([work[i], work[j]]), children=[work[i], work[j]])
        notes.extend(_align_members(merged, cfg.theta(merged.w, merged.h)))
        work[i] = merged
        del work[j]
    else:
        if len(work) > 1:
            non_guillotine = True
            notes.append(
                f"E_NONCONVERGENT: {len(work)} boxes left after "
                f"{cfg.max_iterations} iterations"
            )

    theta_display = cfg.theta(1.0, 1.0)
    if len(work) == 1 and not non_guillotine:
        outer = work[0]
        margin = max(abs(outer.l), abs(outer.t), abs(1 - outer.r), abs(1 - outer.b))
        if margin > theta_display:
            notes.append(
                f"display margin {margin:.6f} exceeds theta {theta_display:.6f}"
            )
        if margin > GEOM_EPS:
            outer.set_rect(0.0, 0.0, 1.0, 1.0)
    else:
        for box in work:
            target = (
                0.0 if GEOM_EPS < abs(box.l) <= theta_display else box.l,
                0.0 if GEOM_EPS < abs(box.t) <= theta_display else box.t,
                1.0 if GEOM_EPS < abs(1 - box.r) <= theta_display else box.r,
                1.0 if GEOM_EPS < abs(1 - box.b) <= theta_display else box.b,
            )
            if target != box.rect:
                box.set_rect(*target)

    # Keep original BBox objects for untouched geometry so refining an
    # already-refined design reproduces it bit for bit.
    def rebuilt(box: _Box, old: BBox) -> BBox:
        return old if box.rect == old.edges else box.to_bbox()

    new_nodes = []
    for node, box in zip(mv.nodes, roots):
        if isinstance(node, SmallMultiples):
            children = tuple(
                replace(v, bbox=rebuilt(cb, v.bbox))
                for v, cb in zip(node.children, box.children)
            )
            new_nodes.append(
                SmallMultiples(node.id, rebuilt(box, node.bbox), children)
            )
        else:
            new_nodes.append(replace(node, bbox=rebuilt(box, node.bbox)))

    level1 = [n.bbox.edges for n in new_nodes]
    covered = union_area(level1)
    if covered < 1.0 - AREA_EPS:
        notes.append(f"residual gaps: display coverage {covered:.6f} < 1")
    for i in range(len(level1)):
        for j in range(i + 1, len(level1)):
            if new_nodes[i].bbox.overlap_area(new_nodes[j].bbox) > GEOM_EPS:
                notes.append(f"residual overlap between level-1 boxes {i} and {j}")

    return MVDesign(
        nodes=tuple(new_nodes),
        metadata=mv.metadata,
        refined=True,
        non_guillotine=non_guillotine,
        warnings=tuple(notes),
    )


class LayoutRefiner(TransformerMixin, BaseEstimator):
    """Stateless transformer applying ``refine`` to a sequence of designs.

    Follows the scikit-learn estimator protocol so refinement can sit in a
    pipeline; ``fit`` is a no-op.
    """

    def __init__(self, theta_fraction: float = 0.03, max_iterations: int = 100):
        self.theta_fraction = theta_fraction
        self.max_iterations = max_iterations

    def fit(self, X, y=None):
        self._config()  # validate parameters eagerly
        return self

    def transform(self, X) -> list[MVDesign]:
        cfg = self._config()
        return [refine(mv, cfg) for mv in X]

    def _config(self) -> RefinementConfig:
        return RefinementConfig(
            theta_fraction=self.theta_fraction, max_iterations=self.max_iterations
        )
