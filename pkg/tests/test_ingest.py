import json
import shutil

import numpy as np
import pytest

from mvlab import (
    MVRecommender,
    SketchView,
    UserSketch,
    ViewType,
    ingest,
    leaf_views,
    load_derived,
    save_derived,
)
from mvlab.errors import NoFilesError
from mvlab.ingest import SCHEMA_VERSION, cooccurrence_csv


@pytest.fixture
def corpus_dir(data_dir, tmp_path):
    target = tmp_path / "corpus"
    target.mkdir()
    for p in data_dir.iterdir():
        shutil.copy(p, target / p.name)
    return target


class TestIngest:
    def test_reads_all_files_and_reports_failures(self, corpus_dir):
        bundle = ingest(corpus_dir)
        report = bundle.report
        assert report.files_read == 6
        assert report.successes == 4
        assert len(report.failures) == 2
        assert report.files_read == report.successes + len(report.failures)
        failed = dict(report.failures)
        assert failed["malformed.json"].startswith("E_MALFORMED")
        assert failed["badtype.json"].startswith("E_BAD_TYPE")
        assert report.non_guillotine == 1  # the pinwheel

    def test_empty_directory(self, tmp_path):
        empty = tmp_path / "nothing"
        empty.mkdir()
        with pytest.raises(NoFilesError):
            ingest(empty)

    def test_deterministic_across_runs(self, corpus_dir):
        a = ingest(corpus_dir)
        b = ingest(corpus_dir)
        assert a.corpus == b.corpus
        assert a.codes == b.codes
        assert a.registry.entries == b.registry.entries
        assert np.array_equal(a.tensors, b.tensors)

    def test_everything_is_refined(self, corpus_dir):
        bundle = ingest(corpus_dir)
        assert all(mv.refined for mv in bundle.corpus.items)
        assert bundle.tensors.shape == (4, 126)

    def test_metadata_enriched_from_corpus_csv(self, corpus_dir):
        bundle = ingest(corpus_dir)
        pin = next(mv for mv in bundle.corpus.items if mv.doi == "10.0000/pinwheel")
        assert pin.metadata.venue == "PacificVis"
        assert pin.metadata.year == 2017
        assert pin.metadata.title == "Pinwheel arrangement"

    def test_doi_falls_back_to_file_stem(self, corpus_dir):
        doc = json.loads((corpus_dir / "10.0000_twocol.json").read_text())
        del doc["doi"]
        del doc["metadata"]
        (corpus_dir / "10.0000_twocol.json").write_text(json.dumps(doc))
        bundle = ingest(corpus_dir)
        assert "10.0000_twocol" in bundle.dois


class TestDerivedArtifacts:
    def test_save_and_load_preserve_recommendation_scores(self, corpus_dir, tmp_path):
        bundle = ingest(corpus_dir)
        out = tmp_path / "derived"
        save_derived(bundle, out)
        loaded = load_derived(out)

        assert loaded.dois == bundle.dois
        assert loaded.codes == bundle.codes
        sketch = UserSketch(
            tuple(
                SketchView(v.type, v.bbox.x, v.bbox.y, v.bbox.w, v.bbox.h)
                for v in leaf_views(bundle.corpus.items[0])
            )
        )
        fresh = MVRecommender().fit(bundle.corpus).mi_scores(sketch)
        cached = MVRecommender.from_cache(
            loaded.corpus.items, loaded.dois, loaded.tensors, loaded.codes
        ).mi_scores(sketch)
        assert np.allclose(fresh, cached, atol=1e-12)

    def test_tensor_cache_shape_and_dtype(self, corpus_dir, tmp_path):
        bundle = ingest(corpus_dir)
        out = tmp_path / "derived"
        save_derived(bundle, out)
        raw = (out / "tensors.bin").read_bytes()
        rows = np.frombuffer(raw, dtype="<f8").reshape(-1, 126)
        assert rows.shape[0] == bundle.corpus.n
        assert np.array_equal(rows, bundle.tensors)

    def test_cooccurrence_csv_shape(self, corpus_dir):
        bundle = ingest(corpus_dir)
        text = cooccurrence_csv(bundle.corpus)
        lines = text.strip().splitlines()
        assert len(lines) == 15  # header + 14 given-type rows
        assert all(len(line.split(",")) == 15 for line in lines)

    def test_registry_json_written(self, corpus_dir, tmp_path):
        bundle = ingest(corpus_dir)
        out = tmp_path / "derived"
        save_derived(bundle, out)
        doc = json.loads((out / "registry.json").read_text())
        letters = {e["signature"]: e["letter"] for e in doc["entries"]}
        assert len(letters) == len(bundle.registry)

    def test_stale_schema_rebuilds_silently(self, corpus_dir, tmp_path):
        bundle = ingest(corpus_dir)
        out = tmp_path / "derived"
        save_derived(bundle, out)
        manifest = json.loads((out / "manifest.json").read_text())
        manifest["schema_version"] = SCHEMA_VERSION - 1
        (out / "manifest.json").write_text(json.dumps(manifest))

        loaded = load_derived(out)
        assert loaded.corpus.n == bundle.corpus.n
        fresh_manifest = json.loads((out / "manifest.json").read_text())
        assert fresh_manifest["schema_version"] == SCHEMA_VERSION

    def test_refined_jsons_are_normalized_annotations(self, corpus_dir, tmp_path):
        bundle = ingest(corpus_dir)
        out = tmp_path / "derived"
        save_derived(bundle, out)
        files = sorted((out / "refined").glob("*.json"))
        assert len(files) == 4
        doc = json.loads(files[0].read_text())
        assert doc["display"] == {"x": 0.5, "y": 0.5, "w": 1.0, "h": 1.0}

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(NoFilesError):
            load_derived(tmp_path)


def test_type_frequencies_on_the_fixture_corpus(corpus_dir):
    bundle = ingest(corpus_dir)
    from mvlab import type_frequency

    freq = type_frequency(bundle.corpus)
    assert freq[ViewType.BAR] == 0.75  # layered, twocol, pinwheel of 4 MVs
    assert freq[ViewType.PANEL] == 0.25
