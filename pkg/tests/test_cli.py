import json
import os
import shutil
import signal
import socket
import subprocess
import sys
import time
import urllib.request

import pytest
from click.testing import CliRunner

from mvlab.cli import main


@pytest.fixture
def corpus_dir(data_dir, tmp_path):
    target = tmp_path / "corpus"
    target.mkdir()
    for p in data_dir.iterdir():
        shutil.copy(p, target / p.name)
    return target


@pytest.fixture
def derived_dir(corpus_dir, tmp_path):
    out = tmp_path / "derived"
    result = CliRunner().invoke(
        main, ["ingest", str(corpus_dir), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    return out


runner = CliRunner()


class TestIngestCommand:
    def test_report_printed(self, corpus_dir, tmp_path):
        out = tmp_path / "derived"
        result = runner.invoke(main, ["ingest", str(corpus_dir), "--out", str(out)])
        assert result.exit_code == 0
        assert "files read:      6" in result.output
        assert "ingested:        4" in result.output
        assert (out / "manifest.json").exists()
        assert (out / "tensors.bin").exists()

    def test_no_files_exits_one(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        result = runner.invoke(main, ["ingest", str(empty)])
        assert result.exit_code == 1

    def test_theta_flag_plumbs_through(self, corpus_dir, tmp_path):
        out = tmp_path / "d2"
        result = runner.invoke(
            main, ["ingest", str(corpus_dir), "--out", str(out), "--theta", "0.05"]
        )
        assert result.exit_code == 0

    def test_bad_theta_is_usage_error(self, corpus_dir):
        result = runner.invoke(main, ["ingest", str(corpus_dir), "--theta", "0.9"])
        assert result.exit_code == 1


class TestRefineCommand:
    def test_writes_refined_file(self, corpus_dir):
        source = corpus_dir / "10.0000_twocol.json"
        result = runner.invoke(main, ["refine", str(source)])
        assert result.exit_code == 0, result.output
        refined = corpus_dir / "10.0000_twocol.refined.json"
        assert refined.exists()
        doc = json.loads(refined.read_text())
        # gapless input: geometry unchanged up to normalization
        xs = sorted(v["x"] for v in doc["views"])
        assert xs == [0.25, 0.75]

    def test_pinwheel_warns_but_succeeds(self, corpus_dir):
        source = corpus_dir / "10.0000_pinwheel.json"
        result = runner.invoke(main, ["refine", str(source)])
        assert result.exit_code == 0
        assert "non-guillotine" in result.output

    def test_malformed_input_exits_one(self, corpus_dir):
        result = runner.invoke(main, ["refine", str(corpus_dir / "malformed.json")])
        assert result.exit_code == 1


class TestAnalyzeCommand:
    def test_counts_json(self, derived_dir):
        result = runner.invoke(
            main, ["analyze", str(derived_dir), "--metric", "counts"]
        )
        assert result.exit_code == 0, result.output
        assert json.loads(result.output) == {"2": 2, "5": 1, "7": 1}

    def test_cooccurrence_csv(self, derived_dir):
        result = runner.invoke(
            main,
            ["analyze", str(derived_dir), "--metric", "cooccurrence",
             "--format", "csv"],
        )
        lines = result.output.strip().splitlines()
        assert len(lines) == 15
        assert lines[0].startswith("given,Area,Bar")

    def test_stability_scalar(self, derived_dir):
        result = runner.invoke(
            main,
            ["analyze", str(derived_dir), "--metric", "stability", "--type", "Map"],
        )
        assert result.exit_code == 0
        body = json.loads(result.output)
        assert body["type"] == "Map"

    def test_stability_requires_type(self, derived_dir):
        result = runner.invoke(
            main, ["analyze", str(derived_dir), "--metric", "stability"]
        )
        assert result.exit_code == 1

    def test_unknown_metric_is_usage_error(self, derived_dir):
        result = runner.invoke(
            main, ["analyze", str(derived_dir), "--metric", "entropy"]
        )
        assert result.exit_code == 1


class TestRecommendCommand:
    def _sketch_file(self, tmp_path):
        sketch = {
            "canvas": {"w": 100, "h": 100},
            "views": [
                {"type": "Map", "x": 25, "y": 50, "w": 50, "h": 100},
                {"type": "Bar", "x": 75, "y": 50, "w": 50, "h": 100},
            ],
        }
        path = tmp_path / "sketch.json"
        path.write_text(json.dumps(sketch))
        return path

    def test_member_sketch_listed_first_or_tied(self, derived_dir, tmp_path):
        path = self._sketch_file(tmp_path)
        result = runner.invoke(
            main,
            ["recommend", str(derived_dir), "--sketch", str(path), "--top", "4"],
        )
        assert result.exit_code == 0, result.output
        rows = [line.split("\t") for line in result.output.strip().splitlines()]
        top_score = rows[0][1]
        tied = [r[3] for r in rows if r[1] == top_score]
        assert "10.0000/twocol" in tied

    def test_stable_across_runs(self, derived_dir, tmp_path):
        path = self._sketch_file(tmp_path)
        args = ["recommend", str(derived_dir), "--sketch", str(path), "--top", "10"]
        assert runner.invoke(main, args).output == runner.invoke(main, args).output

    def test_views_filter(self, derived_dir, tmp_path):
        path = self._sketch_file(tmp_path)
        result = runner.invoke(
            main,
            ["recommend", str(derived_dir), "--sketch", str(path), "--views", "2"],
        )
        dois = [line.split("\t")[3] for line in result.output.strip().splitlines()]
        assert set(dois) == {"10.0000/twocol", "10.0000/tworow"}


@pytest.mark.slow
class TestServeCommand:
    def test_serves_and_shuts_down_gracefully(self, derived_dir):
        with socket.socket() as s:
            s.bind(("127.0.0.1", 0))
            port = s.getsockname()[1]
        env = dict(os.environ, PYTHONPATH="src")
        proc = subprocess.Popen(
            [sys.executable, "-m", "mvlab.cli", "serve", str(derived_dir),
             "--port", str(port)],
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            env=env,
        )
        try:
            deadline = time.time() + 15
            url = f"http://127.0.0.1:{port}/stats/frequency"
            while True:
                try:
                    with urllib.request.urlopen(url, timeout=1) as resp:
                        assert resp.status == 200
                        break
                except OSError:
                    if time.time() > deadline:
                        raise AssertionError("service never came up")
                    time.sleep(0.2)
            proc.send_signal(signal.SIGTERM)
            assert proc.wait(timeout=5) is not None
        finally:
            if proc.poll() is None:
                proc.kill()

    def test_missing_directory_exits_nonzero(self):
        result = runner.invoke(main, ["serve", "/definitely/not/a/dir"])
        assert result.exit_code == 1
