from pathlib import Path

import pytest

from mvlab import BBox, MVDesign, View, ViewType

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


def ev(vtype: ViewType, x0: float, y0: float, x1: float, y1: float, vid: str) -> View:
    """View from edge coordinates."""
    return View(vtype, BBox.from_edges(x0, y0, x1, y1), vid)


def two_columns(left=ViewType.MAP, right=ViewType.BAR, split=0.5) -> MVDesign:
    return MVDesign(
        (
            ev(left, 0.0, 0.0, split, 1.0, "1"),
            ev(right, split, 0.0, 1.0, 1.0, "2"),
        ),
        refined=True,
    )


def two_rows(top=ViewType.LINE, bottom=ViewType.TABLE, split=0.5) -> MVDesign:
    return MVDesign(
        (
            ev(top, 0.0, 0.0, 1.0, split, "1"),
            ev(bottom, 0.0, split, 1.0, 1.0, "2"),
        ),
        refined=True,
    )
