import dataclasses

import pytest

from conftest import ev, two_columns
from mvlab import (
    BBox,
    MVDesign,
    SmallMultiples,
    View,
    ViewType,
    leaf_count,
    leaf_views,
    validate,
)
from mvlab.model import is_valid_view_id


class TestViewType:
    def test_fourteen_members_with_bijective_indices(self):
        assert len(ViewType) == 14
        assert sorted(t.index for t in ViewType) == list(range(14))

    def test_short_names_unique(self):
        shorts = [t.short for t in ViewType]
        assert len(set(shorts)) == 14

    @pytest.mark.parametrize(
        "name,expected",
        [
            ("Net.", ViewType.TREES_NETWORKS),
            ("Distri.", ViewType.DISTRIBUTION),
            ("Diag.", ViewType.DIAGRAM),
            ("Grid", ViewType.GRID_MATRIX),
            ("bar", ViewType.BAR),
            ("TreesNetworks", ViewType.TREES_NETWORKS),
            ("SciVis", ViewType.SCIVIS),
        ],
    )
    def test_from_name_accepts_aliases(self, name, expected):
        assert ViewType.from_name(name) is expected

    def test_from_name_rejects_unknown(self):
        with pytest.raises(KeyError):
            ViewType.from_name("Donut")


class TestBBox:
    def test_requires_positive_size(self):
        with pytest.raises(ValueError):
            BBox(0.5, 0.5, 0.0, 1.0)
        with pytest.raises(ValueError):
            BBox(0.5, 0.5, 1.0, -0.1)

    def test_edges_and_area(self):
        b = BBox(0.25, 0.5, 0.5, 1.0)
        assert b.edges == (0.0, 0.0, 0.5, 1.0)
        assert b.area == 0.5

    def test_within_unit(self):
        assert BBox(0.5, 0.5, 1.0, 1.0).within_unit()
        assert not BBox(0.5, 0.5, 1.2, 1.0).within_unit()


@pytest.mark.parametrize(
    "vid,ok",
    [("1", True), ("3", True), ("3.1", True), ("12.34", True),
     ("0", False), ("3.0", False), ("a", False), ("3.1.1", False), ("", False)],
)
def test_view_id_format(vid, ok):
    assert is_valid_view_id(vid) is ok


class TestLeafViews:
    def test_flat_design(self):
        a = ev(ViewType.BAR, 0, 0, 0.5, 1, "1")
        b = ev(ViewType.LINE, 0.5, 0, 1, 1, "2")
        assert leaf_views(MVDesign((a, b))) == [a, b]

    def test_small_multiples_flatten_to_leaves(self):
        v1 = ev(ViewType.MAP, 0, 0, 0.5, 1, "1")
        c1 = ev(ViewType.LINE, 0.5, 0, 0.75, 1, "2.1")
        c2 = ev(ViewType.LINE, 0.75, 0, 1, 1, "2.2")
        sm = SmallMultiples.enclosing(2, (c1, c2))
        mv = MVDesign((v1, sm))
        assert leaf_views(mv) == [v1, c1, c2]

    def test_two_groups_give_five_leaves(self):
        g1 = SmallMultiples.enclosing(
            1,
            (ev(ViewType.AREA, 0, 0, 0.25, 0.5, "1.1"),
             ev(ViewType.AREA, 0.25, 0, 0.5, 0.5, "1.2")),
        )
        g2 = SmallMultiples.enclosing(
            2,
            (ev(ViewType.BAR, 0.5, 0, 1, 0.33, "2.1"),
             ev(ViewType.BAR, 0.5, 0.33, 1, 0.66, "2.2"),
             ev(ViewType.BAR, 0.5, 0.66, 1, 1, "2.3")),
        )
        mv = MVDesign((g1, g2))
        assert leaf_count(mv) == 5


class TestValidate:
    def test_exact_tiling_is_clean(self):
        assert validate(two_columns()).is_empty

    def test_single_view_reports_empty(self):
        mv = MVDesign((ev(ViewType.MAP, 0, 0, 1, 1, "1"),))
        assert "E_EMPTY" in validate(mv).codes()

    def test_small_overlap_is_a_warning(self):
        # 2% of display area overlapped, no gap anywhere
        a = ev(ViewType.MAP, 0.0, 0.0, 0.52, 1.0, "1")
        b = ev(ViewType.BAR, 0.5, 0.0, 1.0, 1.0, "2")
        report = validate(MVDesign((a, b)))
        assert report.codes() == ["W_OVERLAP"]
        assert report.ok  # warnings do not fail validation

    def test_gap_is_a_warning(self):
        a = ev(ViewType.MAP, 0.0, 0.0, 0.45, 1.0, "1")
        b = ev(ViewType.BAR, 0.55, 0.0, 1.0, 1.0, "2")
        assert "W_GAP" in validate(MVDesign((a, b))).codes()

    def test_bad_id_and_out_of_bounds(self):
        a = ev(ViewType.MAP, 0.0, 0.0, 0.5, 1.0, "zero")
        b = ev(ViewType.BAR, 0.5, 0.0, 1.1, 1.0, "2")
        codes = validate(MVDesign((a, b))).codes()
        assert "E_ID_FORMAT" in codes
        assert "E_OUT_OF_BOUNDS" in codes

    def test_child_id_must_match_group(self):
        c1 = ev(ViewType.LINE, 0.5, 0, 0.75, 1, "3.1")
        c2 = ev(ViewType.LINE, 0.75, 0, 1, 1, "3.2")
        sm = SmallMultiples.enclosing(2, (c1, c2))  # group id 2, children 3.x
        mv = MVDesign((ev(ViewType.MAP, 0, 0, 0.5, 1, "1"), sm))
        assert "E_ID_FORMAT" in validate(mv).codes()

    def test_duplicate_ids(self):
        a = ev(ViewType.MAP, 0, 0, 0.5, 1, "1")
        b = ev(ViewType.BAR, 0.5, 0, 1, 1, "1")
        assert "E_ID_FORMAT" in validate(MVDesign((a, b))).codes()

    def test_child_outside_group_box(self):
        c1 = ev(ViewType.LINE, 0.5, 0, 0.75, 1, "2.1")
        c2 = ev(ViewType.LINE, 0.75, 0, 1, 1, "2.2")
        sm = SmallMultiples(2, BBox.from_edges(0.5, 0, 0.9, 1), (c1, c2))
        mv = MVDesign((ev(ViewType.MAP, 0, 0, 0.5, 1, "1"), sm))
        assert "E_OUT_OF_BOUNDS" in validate(mv).codes()

    def test_validate_is_idempotent_and_pure(self):
        mv = two_columns()
        first = validate(mv)
        second = validate(mv)
        assert first == second
        assert mv == two_columns()  # untouched


def test_design_is_immutable():
    mv = two_columns()
    with pytest.raises(dataclasses.FrozenInstanceError):
        mv.refined = False
