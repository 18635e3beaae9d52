"""Twofold layout codes: level-1 node count + a letter per slice class.

A refined layout is decomposed by full-width/full-height guillotine cuts
into a slicing tree. Trees that differ only by per-slab resizing or by
mirroring share one canonical signature, and every signature of a given
leaf count has a letter pre-assigned by enumerating all signatures in a
fixed order, so the signature -> letter map never depends on the order a
corpus is ingested in. Layouts admitting no full cut (e.g. pinwheels) are
bucketed per count as Z1, Z2, ...
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

from sklearn.base import BaseEstimator, TransformerMixin

from .errors import NotRefinedError
from .model import MVDesign, require_refined

#: Cut collinearity tolerance in normalized units.
CUT_EPS = 1e-6

#: Full enumeration of signatures is cached up to this leaf count; rarer,
#: larger layouts fall back to deterministic lexicographic assignment.
ENUMERATION_MAX_LEAVES = 12


@dataclass(frozen=True)
class Leaf:
    node_index: int | None = None


@dataclass(frozen=True)
class Node:
    orientation: str  # "V" = vertical cuts, "H" = horizontal cuts
    children: tuple["Leaf | Node", ...]
    cut_positions: tuple[float, ...] = ()

    def __post_init__(self):
        if self.orientation not in ("V", "H"):
            raise ValueError(f"bad orientation {self.orientation!r}")
        if len(self.children) < 2:
            raise ValueError("a slice needs at least two slabs")
        for child in self.children:
            if isinstance(child, Node) and child.orientation == self.orientation:
                raise ValueError("maximal slices must be merged")


SlicingTree = Leaf | Node


class NonGuillotine:
    """Marker result: some multi-box slab admits no full cut."""

    def __repr__(self):
        return "NonGuillotine()"

    def __eq__(self, other):
        return isinstance(other, NonGuillotine)

    def __hash__(self):
        return hash(NonGuillotine)


def slicing_tree(mv: MVDesign) -> SlicingTree | NonGuillotine:
    """Guillotine decomposition of the level-1 boxes of a refined design.

    Vertical cuts are preferred at equal depth; all collinear cuts at one
    level become one node, so no child repeats its parent's orientation.
    """
    require_refined(mv)
    rects = [(i, n.bbox.edges) for i, n in enumerate(mv.nodes)]
    if not rects:
        raise NotRefinedError("design has no level-1 nodes")
    return _split(rects)


def _split(rects) -> SlicingTree | NonGuillotine:
    if len(rects) == 1:
        return Leaf(node_index=rects[0][0])
    for orientation, lo_k, hi_k in (("V", 0, 2), ("H", 1, 3)):
        lo = min(r[lo_k] for _, r in rects)
        hi = max(r[hi_k] for _, r in rects)
        cuts = _full_cuts(rects, lo, hi, lo_k, hi_k)
        if not cuts:
            continue
        bounds = [lo] + cuts + [hi]
        bands: list[list] = [[] for _ in range(len(bounds) - 1)]
        for item in rects:
            center = (item[1][lo_k] + item[1][hi_k]) / 2.0
            for bi in range(len(bounds) - 1):
                if bounds[bi] - CUT_EPS <= center <= bounds[bi + 1] + CUT_EPS:
                    bands[bi].append(item)
                    break
        if any(not band for band in bands):
            continue
        children = []
        for band in bands:
            sub = _split(band)
            if isinstance(sub, NonGuillotine):
                return sub
            children.append(sub)
        return Node(orientation, tuple(children), tuple(cuts))
    return NonGuillotine()


def _full_cuts(rects, lo: float, hi: float, lo_k: int, hi_k: int) -> list[float]:
    candidates = sorted(
        {r[lo_k] for _, r in rects} | {r[hi_k] for _, r in rects}
    )
    cuts: list[float] = []
    for x in candidates:
        if x <= lo + CUT_EPS or x >= hi - CUT_EPS:
            continue
        if cuts and x - cuts[-1] <= CUT_EPS:
            continue
        crossing = any(
            r[lo_k] < x - CUT_EPS and r[hi_k] > x + CUT_EPS for _, r in rects
        )
        if not crossing:
            cuts.append(x)
    return cuts


def tree_leaf_count(t: SlicingTree) -> int:
    if isinstance(t, Leaf):
        return 1
    return sum(tree_leaf_count(c) for c in t.children)


def canonical_signature(t: SlicingTree) -> str:
    """Structure-only identity: cut positions and leaf sizes are ignored,
    children are sorted so mirrored layouts collapse onto one signature."""
    return _canon(t)[0]


def _canon(t: SlicingTree) -> tuple[str, int]:
    if isinstance(t, Leaf):
        return "L", 1
    parts = sorted((_canon(c) for c in t.children), key=lambda p: (p[1], p[0]))
    sig = f"{t.orientation}({','.join(p[0] for p in parts)})"
    return sig, sum(p[1] for p in parts)


# ---------------------------------------------------------------------------
# Canonical enumeration and letter assignment


@lru_cache(maxsize=None)
def _rooted_signatures(n: int, orientation: str) -> tuple[str, ...]:
    """All signatures of trees with this root orientation and n leaves,
    in the canonical order (children compared by leaf count, then text)."""
    other = "H" if orientation == "V" else "V"
    options: list[tuple[int, str]] = [(1, "L")]
    for k in range(2, n):
        options.extend((k, s) for s in _rooted_signatures(k, other))
    options.sort()
    out: list[str] = []

    def grow(start: int, remaining: int, acc: list[str]) -> None:
        if remaining == 0:
            if len(acc) >= 2:
                out.append(f"{orientation}({','.join(acc)})")
            return
        for idx in range(start, len(options)):
            size, sig = options[idx]
            if size > remaining:
                break
            acc.append(sig)
            grow(idx, remaining - size, acc)
            acc.pop()

    grow(0, n, [])
    return tuple(out)


def enumerate_signatures(n: int) -> tuple[str, ...]:
    """Every possible signature with n leaves: V-rooted first, then H."""
    if n < 2:
        raise ValueError("layouts have at least 2 leaves")
    return _rooted_signatures(n, "V") + _rooted_signatures(n, "H")


_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXY"  # Z prefixes the non-guillotine bucket


def _letter_label(rank: int) -> str:
    label = ""
    rank += 1
    while rank:
        rank, rem = divmod(rank - 1, len(_LETTERS))
        label = _LETTERS[rem] + label
    return label


@dataclass(frozen=True)
class LayoutCode:
    count: int
    letter: str

    def __str__(self) -> str:
        return f"{self.count}{self.letter}"

    @classmethod
    def parse(cls, text: str) -> "LayoutCode":
        m = re.fullmatch(r"(\d+)([A-Z][A-Z0-9]*)", text.strip())
        if not m:
            raise ValueError(f"bad layout code {text!r}")
        return cls(int(m.group(1)), m.group(2))


def non_guillotine_signature(mv: MVDesign) -> str:
    """Geometry-based identity for layouts without a slicing tree."""
    rects = sorted(
        ",".join(f"{v:.6f}" for v in n.bbox.edges) for n in mv.nodes
    )
    return "NG[" + ";".join(rects) + "]"


class LayoutRegistry:
    """Assigns and remembers signature -> letter mappings.

    Guillotine signatures get their letter from the enumeration rank, so
    any two corpora agree on letters. Non-guillotine signatures are
    numbered Z1, Z2, ... per count; ``assign_batch`` orders them by sorted
    signature so ingest order does not matter.
    """

    def __init__(self):
        self._letters: dict[str, str] = {}
        self._counts: dict[str, int] = {}
        self._ng_next: dict[int, int] = {}
        self._fallback_next: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._letters)

    @property
    def entries(self) -> list[tuple[str, int, str]]:
        return sorted(
            (sig, self._counts[sig], letter) for sig, letter in self._letters.items()
        )

    def letter_for(self, signature: str, count: int) -> str:
        if signature in self._letters:
            return self._letters[signature]
        if signature.startswith("NG["):
            k = self._ng_next.get(count, 0) + 1
            self._ng_next[count] = k
            letter = f"Z{k}"
        else:
            letter = self._enumerated_letter(signature, count)
        self._letters[signature] = letter
        self._counts[signature] = count
        return letter

    def _enumerated_letter(self, signature: str, count: int) -> str:
        if count <= ENUMERATION_MAX_LEAVES:
            rank = _rank_index(count).get(signature)
            if rank is None:
                raise ValueError(f"signature {signature!r} is not a {count}-leaf tree")
            return _letter_label(rank)
        # Too many shapes to enumerate: deterministic per-corpus fallback.
        k = self._fallback_next.get(count, 0)
        self._fallback_next[count] = k + 1
        return "X" + _letter_label(k)

    def assign_batch(self, pairs: list[tuple[str, int]]) -> None:
        """Assign letters for many signatures independent of input order."""
        for signature, count in sorted(set(pairs)):
            self.letter_for(signature, count)

    def code_for(self, signature: str, count: int) -> LayoutCode:
        return LayoutCode(count, self.letter_for(signature, count))

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "entries": [
                {"signature": s, "count": c, "letter": m} for s, c, m in self.entries
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "LayoutRegistry":
        reg = cls()
        for entry in doc.get("entries", ()):
            sig, count, letter = entry["signature"], entry["count"], entry["letter"]
            reg._letters[sig] = letter
            reg._counts[sig] = count
            if letter.startswith("Z"):
                k = int(letter[1:])
                reg._ng_next[count] = max(reg._ng_next.get(count, 0), k)
            elif letter.startswith("X"):
                reg._fallback_next[count] = reg._fallback_next.get(count, 0) + 1
        return reg


@lru_cache(maxsize=None)
def _rank_index(n: int) -> dict[str, int]:
    return {sig: i for i, sig in enumerate(enumerate_signatures(n))}


def layout_code(mv: MVDesign, registry: LayoutRegistry) -> LayoutCode:
    """Count of level-1 nodes plus the letter of the slice structure."""
    require_refined(mv)
    count = len(mv.nodes)
    tree = slicing_tree(mv)
    if isinstance(tree, NonGuillotine):
        return registry.code_for(non_guillotine_signature(mv), count)
    return registry.code_for(canonical_signature(tree), count)


def signature_of(mv: MVDesign) -> str:
    """Canonical signature of a refined design (NG form when unsliceable)."""
    tree = slicing_tree(mv)
    if isinstance(tree, NonGuillotine):
        return non_guillotine_signature(mv)
    return canonical_signature(tree)


class LayoutCoder(TransformerMixin, BaseEstimator):
    """Estimator facade: fit collects signatures, transform emits codes."""

    def __init__(self):
        pass

    def fit(self, X, y=None):
        self.registry_ = LayoutRegistry()
        pairs = [(signature_of(mv), len(mv.nodes)) for mv in X]
        self.registry_.assign_batch(pairs)
        return self

    def transform(self, X) -> list[LayoutCode]:
        if not hasattr(self, "registry_"):
            raise RuntimeError("LayoutCoder.transform called before fit")
        return [layout_code(mv, self.registry_) for mv in X]
