import json
import shutil

import pytest
from fastapi.testclient import TestClient

from mvlab import create_app, ingest, leaf_views, save_derived
from mvlab.service import app_from_derived


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    data = __import__("conftest").DATA
    target = tmp_path_factory.mktemp("svc") / "corpus"
    target.mkdir()
    for p in data.iterdir():
        shutil.copy(p, target / p.name)
    return target


@pytest.fixture(scope="module")
def bundle(corpus_dir):
    return ingest(corpus_dir)


@pytest.fixture(scope="module")
def client(bundle):
    return TestClient(create_app(bundle))


DOIS = {"10.0000/layered", "10.0000/twocol", "10.0000/tworow", "10.0000/pinwheel"}


class TestListMvs:
    def test_no_filters_returns_everything(self, client):
        body = client.get("/mvs").json()
        assert body["total"] == 4
        assert {item["doi"] for item in body["items"]} == DOIS

    def test_type_facet_is_a_union(self, client):
        body = client.get("/mvs", params={"types": "Map,Line"}).json()
        # every fixture except... all four contain Map or Line
        assert body["total"] == 4
        body = client.get("/mvs", params={"types": "Panel"}).json()
        assert {i["doi"] for i in body["items"]} == {"10.0000/layered"}

    def test_facets_intersect(self, client):
        body = client.get("/mvs", params={"types": "Bar", "counts": "2"}).json()
        assert {i["doi"] for i in body["items"]} == {"10.0000/twocol"}

    def test_counts_facet(self, client):
        body = client.get("/mvs", params={"counts": "5,7"}).json()
        assert {i["doi"] for i in body["items"]} == {
            "10.0000/pinwheel",
            "10.0000/layered",
        }

    def test_layout_facet(self, client):
        body = client.get("/mvs", params={"layouts": "2A"}).json()
        assert {i["doi"] for i in body["items"]} == {"10.0000/twocol"}

    def test_group_by_count_matches_stats(self, client):
        grouped = client.get("/mvs", params={"group_by": "count"}).json()
        counts = client.get("/stats/counts").json()
        by_key = {g["key"]: len(g["items"]) for g in grouped["groups"]}
        assert by_key == counts

    def test_group_by_layout_largest_first(self, client):
        grouped = client.get("/mvs", params={"group_by": "layout"}).json()
        sizes = [len(g["items"]) for g in grouped["groups"]]
        assert sizes == sorted(sizes, reverse=True)
        assert len(grouped["groups"]) <= 10

    @pytest.mark.parametrize(
        "params",
        [
            {"types": "Donut"},
            {"counts": "1"},
            {"counts": "eleven"},
            {"layouts": "??"},
            {"group_by": "venue"},
            {"color_by": "author"},
        ],
    )
    def test_unknown_facet_values_are_400(self, client, params):
        assert client.get("/mvs", params=params).status_code == 400


class TestDetail:
    def test_known_doi(self, client, bundle):
        body = client.get("/mv/10.0000/layered").json()
        assert body["metadata"]["venue"] == "VAST"
        assert body["metadata"]["authors"] == ["A. One", "B. Two"]
        assert body["count"] == 7
        assert len(body["tensor"]) == 126
        kinds = [n["kind"] for n in body["nodes"]]
        assert kinds.count("small_multiples") == 2

    def test_unknown_doi_is_404(self, client):
        assert client.get("/mv/10.9999/nope").status_code == 404

    def test_geometry_matches_saved_refined_annotation(self, client, bundle, tmp_path):
        save_derived(bundle, tmp_path)
        saved = json.loads((tmp_path / "refined" / "10.0000_twocol.json").read_text())
        body = client.get("/mv/10.0000/twocol").json()
        for node, raw in zip(body["nodes"], saved["views"]):
            for key in ("x", "y", "w", "h"):
                assert node["bbox"][key] == pytest.approx(raw[key], abs=1e-6)


class TestRecommend:
    def _sketch_for(self, bundle, doi):
        mv = next(m for m in bundle.corpus.items if m.doi == doi)
        return {
            "views": [
                {
                    "type": v.type.canonical,
                    "x": v.bbox.x,
                    "y": v.bbox.y,
                    "w": v.bbox.w,
                    "h": v.bbox.h,
                }
                for v in leaf_views(mv)
            ]
        }

    def test_member_sketch_is_top_ranked(self, client, bundle):
        sketch = self._sketch_for(bundle, "10.0000/twocol")
        body = client.post("/recommend", json={"sketch": sketch, "top_k": 4}).json()
        results = body["results"]
        top = [r["doi"] for r in results if r["score"] == results[0]["score"]]
        assert "10.0000/twocol" in top

    def test_top_k_and_monotone_scores(self, client, bundle):
        sketch = self._sketch_for(bundle, "10.0000/layered")
        body = client.post("/recommend", json={"sketch": sketch, "top_k": 2}).json()
        scores = [r["score"] for r in body["results"]]
        assert len(scores) <= 2
        assert scores == sorted(scores, reverse=True)

    def test_byte_identical_responses(self, client, bundle):
        payload = {"sketch": self._sketch_for(bundle, "10.0000/tworow"), "top_k": 4}
        first = client.post("/recommend", json=payload)
        second = client.post("/recommend", json=payload)
        assert first.content == second.content

    def test_template_geometry_included(self, client, bundle):
        sketch = self._sketch_for(bundle, "10.0000/twocol")
        body = client.post("/recommend", json={"sketch": sketch, "top_k": 1}).json()
        nodes = body["results"][0]["template"]["nodes"]
        assert all("bbox" in n for n in nodes)

    def test_view_count_filter(self, client, bundle):
        sketch = self._sketch_for(bundle, "10.0000/twocol")
        body = client.post(
            "/recommend", json={"sketch": sketch, "view_counts": [2], "top_k": 10}
        ).json()
        assert all(r["count"] == 2 for r in body["results"])

    def test_empty_sketch_is_400(self, client):
        assert (
            client.post("/recommend", json={"sketch": {"views": []}}).status_code
            == 400
        )

    def test_malformed_body_is_422(self, client):
        assert client.post("/recommend", json={"nope": 1}).status_code == 422
        bad_view = {"sketch": {"views": [{"type": "Bar", "x": 0, "y": 0, "w": -1, "h": 1}]}}
        assert client.post("/recommend", json=bad_view).status_code == 422

    def test_unknown_type_is_400(self, client):
        body = {"sketch": {"views": [{"type": "Donut", "x": 0, "y": 0, "w": 1, "h": 1}]}}
        assert client.post("/recommend", json=body).status_code == 400


class TestStats:
    def test_counts(self, client):
        assert client.get("/stats/counts").json() == {"2": 2, "5": 1, "7": 1}

    def test_frequency_covers_all_types(self, client):
        body = client.get("/stats/frequency").json()
        assert len(body) == 14
        assert body["Bar"] == 0.75

    def test_cooccurrence_shape_and_missing(self, client):
        body = client.get("/stats/cooccurrence").json()
        assert len(body["matrix"]) == 14
        assert all(len(row) == 14 for row in body["matrix"])
        assert "SciVis" in body["missing"]

    def test_aspect(self, client):
        body = client.get("/stats/aspect").json()
        assert body["Map"]["count"] >= 1
        q = body["Map"]["quartiles"]
        assert q[0] <= q[1] <= q[2]

    def test_position(self, client):
        body = client.get("/stats/position").json()
        assert len(body["Bar"]) == 9

    def test_stability_scalar_or_null(self, client):
        body = client.get("/stats/stability", params={"type": "Bar"}).json()
        assert body["stability"] is None or 0 <= body["stability"] <= 0.5
        null = client.get(
            "/stats/stability", params={"type": "Panel", "layout": "2A"}
        ).json()
        assert null["stability"] is None

    def test_unknown_metric_is_404(self, client):
        assert client.get("/stats/entropy").status_code == 404

    def test_reads_do_not_mutate_state(self, client):
        before = client.get("/mvs").content
        client.get("/stats/cooccurrence")
        client.get("/mv/10.0000/twocol")
        assert client.get("/mvs").content == before


class TestAdminReload:
    def test_reload_requires_token(self, corpus_dir, bundle):
        app = create_app(bundle, admin_token="s3cret", corpus_dir=corpus_dir)
        client = TestClient(app)
        assert client.post("/admin/reload").status_code == 403
        assert (
            client.post("/admin/reload", params={"token": "wrong"}).status_code == 403
        )
        ok = client.post("/admin/reload", params={"token": "s3cret"})
        assert ok.status_code == 200
        assert ok.json() == {"reloaded": True, "items": 4}
        assert client.get("/mvs").json()["total"] == 4

    def test_reload_disabled_without_token_config(self, bundle):
        client = TestClient(create_app(bundle))
        assert client.post("/admin/reload", params={"token": "x"}).status_code == 403


class TestThumbnails:
    def test_thumbnail_url_and_serving(self, bundle, tmp_path):
        thumbs = tmp_path / "thumbs"
        thumbs.mkdir()
        (thumbs / "10.0000_twocol.png").write_bytes(b"\x89PNG fake")
        client = TestClient(create_app(bundle, thumbnails_dir=thumbs))
        items = client.get("/mvs").json()["items"]
        by_doi = {i["doi"]: i for i in items}
        url = by_doi["10.0000/twocol"]["thumbnail"]
        assert url == "/thumbnails/10.0000_twocol.png"
        assert by_doi["10.0000/tworow"]["thumbnail"] is None
        assert client.get(url).status_code == 200
        assert client.get("/thumbnails/../secret").status_code in (404, 403)


def test_app_from_derived_round_trip(corpus_dir, bundle, tmp_path):
    derived = tmp_path / "derived"
    save_derived(bundle, derived)
    client = TestClient(app_from_derived(derived))
    assert client.get("/mvs").json()["total"] == 4
    assert client.get("/stats/counts").json() == {"2": 2, "5": 1, "7": 1}
