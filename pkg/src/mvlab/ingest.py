"""Corpus ingestion: annotation directory -> refined, encoded, cached corpus.

Files are processed in sorted name order so a directory always produces
the same corpus, registry, and tensor cache. Derived artifacts live in a
separate output directory:

    derived/
      manifest.json       schema version, per-item doi/code/flags
      refined/<doi>.json  refined annotations (unit-square display)
      registry.json       layout signature -> letter table
      cooccurrence.csv    14x14 conditional probability matrix
      tensors.bin         one little-endian float64 126-vector per item
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytics import conditional_probability
from .annotation import (
    annotation_from_design,
    escape_doi,
    normalize,
    parse_annotation,
    serialize_annotation,
)
from .encoding import LayoutCode, LayoutCoder, LayoutRegistry
from .errors import MVLabError, NoFilesError
from .model import Corpus, Metadata, MVDesign, ViewType
from .recommend import composition_tensor
from .refine import RefinementConfig, refine

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class IngestReport:
    files_read: int
    successes: int
    failures: tuple[tuple[str, str], ...]  # (file name, reason)
    non_guillotine: int
    registry_size: int
    elapsed_seconds: float

    def summary(self) -> str:
        lines = [
            f"files read:      {self.files_read}",
            f"ingested:        {self.successes}",
            f"failures:        {len(self.failures)}",
            f"non-guillotine:  {self.non_guillotine}",
            f"layout classes:  {self.registry_size}",
            f"elapsed:         {self.elapsed_seconds:.2f}s",
        ]
        for name, reason in self.failures:
            lines.append(f"  failed {name}: {reason}")
        return "\n".join(lines)


@dataclass(frozen=True)
class CorpusBundle:
    corpus: Corpus
    registry: LayoutRegistry
    codes: tuple[LayoutCode, ...]
    tensors: np.ndarray  # (n, 126)
    report: IngestReport

    @property
    def dois(self) -> tuple[str, ...]:
        return tuple(mv.doi or "" for mv in self.corpus.items)


def ingest(
    dir_path: str | Path,
    config: RefinementConfig | None = None,
) -> CorpusBundle:
    """Parse, normalize, refine, and encode every annotation in a directory.

    Unreadable or invalid files are skipped and reported; the registry is
    letter-assigned in one batch after all signatures are known.
    """
    start = time.perf_counter()
    cfg = config or RefinementConfig()
    directory = Path(dir_path)
    files = sorted(p for p in directory.glob("*.json"))
    if not files:
        raise NoFilesError(f"no annotation files in {directory}")

    enrichment = _read_corpus_csv(directory / "corpus.csv")

    items: list[MVDesign] = []
    failures: list[tuple[str, str]] = []
    for path in files:
        try:
            annotated = parse_annotation(path.read_bytes())
            if not annotated.doi:
                annotated = _with_doi(annotated, path.stem)
            design = refine(normalize(annotated), cfg)
            design = _enrich(design, enrichment)
            items.append(design)
        except MVLabError as exc:
            failures.append((path.name, f"{exc.code}: {exc}"))
        except OSError as exc:
            failures.append((path.name, f"E_IO: {exc}"))

    if not items:
        raise NoFilesError(f"no ingestible annotation files in {directory}")

    corpus = Corpus(tuple(items))
    coder = LayoutCoder().fit(items)
    codes = tuple(coder.transform(items))
    tensors = np.stack([composition_tensor(mv).reshape(-1) for mv in items])
    report = IngestReport(
        files_read=len(files),
        successes=len(items),
        failures=tuple(failures),
        non_guillotine=sum(1 for mv in items if mv.non_guillotine),
        registry_size=len(coder.registry_),
        elapsed_seconds=time.perf_counter() - start,
    )
    return CorpusBundle(corpus, coder.registry_, codes, tensors, report)


def _with_doi(annotated, stem: str):
    return dataclasses.replace(annotated, doi=stem)


def _read_corpus_csv(path: Path) -> dict[str, dict]:
    if not path.exists():
        return {}
    out: dict[str, dict] = {}
    with path.open(newline="") as fh:
        for row in csv.DictReader(fh):
            doi = (row.get("doi") or "").strip()
            if doi:
                out[doi] = row
    return out


def _enrich(mv: MVDesign, enrichment: dict[str, dict]) -> MVDesign:
    doi = mv.doi
    if not doi or doi not in enrichment:
        return mv
    row = enrichment[doi]
    md = mv.metadata or Metadata(doi=doi)
    year = row.get("year")
    md = dataclasses.replace(
        md,
        venue=md.venue or (row.get("venue") or None),
        year=md.year if md.year is not None else (int(year) if year else None),
        title=md.title or (row.get("title") or None),
    )
    return dataclasses.replace(mv, metadata=md)


# ---------------------------------------------------------------------------
# Derived artifacts


def save_derived(bundle: CorpusBundle, out_dir: str | Path) -> None:
    out = Path(out_dir)
    refined_dir = out / "refined"
    refined_dir.mkdir(parents=True, exist_ok=True)

    manifest_items = []
    for mv, code in zip(bundle.corpus.items, bundle.codes):
        doi = mv.doi or ""
        (refined_dir / f"{escape_doi(doi)}.json").write_bytes(
            serialize_annotation(annotation_from_design(mv))
        )
        manifest_items.append(
            {
                "doi": doi,
                "code": str(code),
                "non_guillotine": mv.non_guillotine,
            }
        )
    (out / "manifest.json").write_text(
        json.dumps(
            {"schema_version": SCHEMA_VERSION, "items": manifest_items},
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )
    (out / "registry.json").write_text(
        json.dumps(bundle.registry.to_json(), indent=2, sort_keys=True) + "\n"
    )
    (out / "cooccurrence.csv").write_text(cooccurrence_csv(bundle.corpus))
    (out / "tensors.bin").write_bytes(
        np.ascontiguousarray(bundle.tensors, dtype="<f8").tobytes()
    )


def cooccurrence_csv(corpus: Corpus) -> str:
    """Rows are the conditioning ("given") type, columns the target type;
    never-seen conditioning types leave their row empty."""
    matrix = conditional_probability(corpus)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    names = [t.canonical for t in ViewType]
    writer.writerow(["given"] + names)
    for j, given in enumerate(ViewType):
        row: list[str] = [given.canonical]
        for i in range(len(ViewType)):
            p = matrix.probs[i, j]
            row.append("" if np.isnan(p) else f"{p:.6f}")
        writer.writerow(row)
    return buf.getvalue()


def load_derived(out_dir: str | Path) -> CorpusBundle:
    """Rebuild a bundle from saved artifacts.

    A stale schema version triggers a silent rebuild from the refined
    annotations (which are self-contained).
    """
    out = Path(out_dir)
    manifest_path = out / "manifest.json"
    if not manifest_path.exists():
        raise NoFilesError(f"{out} has no manifest.json")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("schema_version") != SCHEMA_VERSION:
        bundle = ingest(out / "refined")
        save_derived(bundle, out)
        return bundle

    start = time.perf_counter()
    items: list[MVDesign] = []
    for entry in manifest["items"]:
        path = out / "refined" / f"{escape_doi(entry['doi'])}.json"
        design = normalize(parse_annotation(path.read_bytes()))
        items.append(
            dataclasses.replace(
                design,
                refined=True,
                non_guillotine=bool(entry.get("non_guillotine", False)),
            )
        )
    registry = LayoutRegistry.from_json(json.loads((out / "registry.json").read_text()))
    codes = tuple(LayoutCode.parse(e["code"]) for e in manifest["items"])
    raw = (out / "tensors.bin").read_bytes()
    tensors = np.frombuffer(raw, dtype="<f8").reshape(len(items), -1).copy()
    report = IngestReport(
        files_read=len(items),
        successes=len(items),
        failures=(),
        non_guillotine=sum(1 for mv in items if mv.non_guillotine),
        registry_size=len(registry),
        elapsed_seconds=time.perf_counter() - start,
    )
    return CorpusBundle(Corpus(tuple(items)), registry, codes, tensors, report)
