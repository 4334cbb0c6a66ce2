"""Pipeline stages. Each stage reads the corpus and/or earlier artifacts under
``cfg.output_dir`` and rewrites its own artifacts from scratch, so running a
stage twice on unchanged input produces identical files.

Artifacts::

    manifest.json, unpack_report.json          ingest
    detections.json                            detect
    records/<arxiv_id>/<ordinal>.json          extract (+ refs)
    snippets.jsonl                             clean
    topics.csv, models/<year>.json             cluster
    stats.csv, yearly.csv, categories.csv      stats
    sample.csv                                 sample
    validation.json, indicative.json           validate
"""
from __future__ import annotations

import json
import logging
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from . import analytics, cleaner, corpus, detector, extractor, references, topics
from .config import ConfigError, PipelineConfig
from .extractor import atomic_write_text

log = logging.getLogger(__name__)
progress = logging.getLogger("pseudomine.progress")


class StageError(RuntimeError):
    """A stage could not run at all (missing inputs, bad arguments)."""


@dataclass
class StageResult:
    stage: str
    outputs: list[str] = field(default_factory=list)
    errors: dict[str, str] = field(default_factory=dict)  # arxiv_id -> message

    @property
    def ok(self) -> bool:
        return not self.errors


def _write_json(path: Path, obj) -> None:
    atomic_write_text(path, json.dumps(obj, ensure_ascii=False, indent=2) + "\n")


def _read_json(path: Path):
    if not path.exists():
        raise StageError(f"missing input {path}; run the earlier stage first")
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _map(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _bundles(cfg: PipelineConfig) -> list[corpus.PaperBundle]:
    root = Path(cfg.corpus_root)
    if not root.is_dir():
        raise StageError(f"corpus root {root} does not exist")
    return corpus.load_corpus(root)


# --------------------------------------------------------------------------
# ingest

def ingest(cfg: PipelineConfig) -> StageResult:
    res = StageResult("ingest")
    root = Path(cfg.corpus_root)
    if not root.is_dir():
        raise StageError(f"corpus root {root} does not exist")
    report = corpus.UnpackReport()
    if (root / "sources").is_dir():
        report = corpus.unpack_archives(root / "sources", cfg.max_archive_depth)
    bundles = corpus.load_corpus(root)
    manifest = {
        "papers": [
            {
                "arxiv_id": b.arxiv_id,
                "has_latex": b.has_latex,
                "has_pdf_text": b.pdf_text is not None,
                "latex_files": [{"path": f.path, "encoding": f.encoding} for f in b.latex_files],
                "metadata": corpus.metadata_to_dict(b.metadata),
            }
            for b in bundles
        ],
        "unmatched": corpus.unmatched_report(bundles),
    }
    out = Path(cfg.output_dir)
    _write_json(out / "manifest.json", manifest)
    _write_json(
        out / "unpack_report.json",
        {"archives_opened": report.archives_opened, "files_produced": report.files_produced,
         "depth_reached": report.depth_reached, "warnings": report.warnings},
    )
    for b in bundles:
        progress.info("stage=ingest paper=%s latex_files=%d pdf_text=%s", b.arxiv_id, len(b.latex_files), b.pdf_text is not None)
    res.outputs += ["manifest.json", "unpack_report.json"]
    return res


# --------------------------------------------------------------------------
# detect

def _detect_one(args) -> dict:
    bundle, keywords = args
    det = detector.detect_latex_algorithm(bundle)
    hits = []
    if bundle.pdf_text is not None:
        hits = detector.KeywordMatcher(keywords).find(bundle.pdf_text)
    return {
        "arxiv_id": det.arxiv_id,
        "has_latex": det.has_latex,
        "latex_tag_found": det.latex_tag_found,
        "tag_count": det.tag_count,
        "keyword_hits": [{"class": h.keyword_class, "text": h.matched_text, "offset": h.file_offset} for h in hits],
    }


def detect(cfg: PipelineConfig) -> StageResult:
    res = StageResult("detect")
    bundles = _bundles(cfg)
    rows = _map(_detect_one, [(b, cfg.keywords) for b in bundles], cfg.jobs)
    for row in rows:
        progress.info("stage=detect paper=%s tags=%d keyword_hits=%d", row["arxiv_id"], row["tag_count"], len(row["keyword_hits"]))
    _write_json(Path(cfg.output_dir) / "detections.json", rows)
    res.outputs.append("detections.json")
    return res


# --------------------------------------------------------------------------
# extract / refs

def _extract_one(bundle: corpus.PaperBundle):
    try:
        return bundle.arxiv_id, [r.to_json() for r in extractor.extract_records(bundle)], None
    except Exception as exc:  # per-paper failure must not stop the corpus
        return bundle.arxiv_id, [], f"{type(exc).__name__}: {exc}"


def extract(cfg: PipelineConfig) -> StageResult:
    res = StageResult("extract")
    records_dir = Path(cfg.output_dir) / "records"
    if records_dir.exists():
        shutil.rmtree(records_dir)
    bundles = [b for b in _bundles(cfg) if b.has_latex]
    for arxiv_id, records, err in _map(_extract_one, bundles, cfg.jobs):
        if err:
            res.errors[arxiv_id] = err
            progress.info("stage=extract paper=%s status=error", arxiv_id)
            continue
        for ordinal, rec in enumerate(records):
            _write_json(extractor.record_path(records_dir, arxiv_id, ordinal), rec)
        progress.info("stage=extract paper=%s records=%d", arxiv_id, len(records))
    res.outputs.append("records/")
    return res


def record_files(records_dir: Path) -> dict[str, list[Path]]:
    """Record paths per paper, in ordinal order."""
    out: dict[str, list[Path]] = {}
    if not records_dir.is_dir():
        return out
    for paper_dir in sorted(p for p in records_dir.iterdir() if p.is_dir()):
        files = sorted(paper_dir.glob("*.json"), key=lambda p: int(p.stem))
        if files:
            out[paper_dir.name] = files
    return out


def _refs_one(args):
    bundle, paths, snippet_cfg = args
    try:
        updated = []
        for path in paths:
            rec = extractor.read_record(path)
            snippets = references.snippets_for_span(bundle, rec.pseudocode, rec.source_path, rec.span, snippet_cfg)
            rec.reference_snippets = [s.text for s in snippets]
            updated.append((path, rec.to_json()))
        return bundle.arxiv_id, updated, None
    except Exception as exc:
        return bundle.arxiv_id, [], f"{type(exc).__name__}: {exc}"


def refs(cfg: PipelineConfig) -> StageResult:
    res = StageResult("refs")
    files = record_files(Path(cfg.output_dir) / "records")
    by_id = {b.arxiv_id: b for b in _bundles(cfg)}
    work = []
    for arxiv_id, paths in files.items():
        if arxiv_id not in by_id:
            res.errors[arxiv_id] = "records exist but paper is missing from the corpus"
            continue
        work.append((by_id[arxiv_id], paths, cfg.snippet))
    for arxiv_id, updated, err in _map(_refs_one, work, cfg.jobs):
        if err:
            res.errors[arxiv_id] = err
            continue
        for path, rec in updated:
            _write_json(path, rec)
        progress.info("stage=refs paper=%s snippets=%d", arxiv_id, sum(len(r["reference_snippets"]) for _, r in updated))
    res.outputs.append("records/")
    return res


# --------------------------------------------------------------------------
# clean / cluster

def clean(cfg: PipelineConfig) -> StageResult:
    res = StageResult("clean")
    lines = []
    for arxiv_id, paths in record_files(Path(cfg.output_dir) / "records").items():
        n = 0
        for path in paths:
            rec = extractor.read_record(path)
            for i, raw in enumerate(rec.reference_snippets):
                text = cleaner.clean(raw, cfg.cleaning)
                if not text:
                    continue
                lines.append(json.dumps(
                    {"arxiv_id": arxiv_id, "year": rec.year, "record": int(path.stem), "snippet": i, "text": text},
                    ensure_ascii=False,
                ))
                n += 1
        progress.info("stage=clean paper=%s snippets=%d", arxiv_id, n)
    atomic_write_text(Path(cfg.output_dir) / "snippets.jsonl", "".join(l + "\n" for l in lines))
    res.outputs.append("snippets.jsonl")
    return res


def read_snippets(path: Path) -> list[dict]:
    if not path.exists():
        raise StageError(f"missing input {path}; run the clean stage first")
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]


def cluster(cfg: PipelineConfig) -> StageResult:
    res = StageResult("cluster")
    out = Path(cfg.output_dir)
    snippets = read_snippets(out / "snippets.jsonl")
    result = topics.cluster_by_year(
        [(s["year"], s["text"]) for s in snippets],
        num_topics=cfg.num_topics,
        seed=cfg.seed,
        alpha=cfg.alpha,
        beta=cfg.beta,
        iterations=cfg.iterations,
        top_k=cfg.top_words,
        max_df=cfg.max_df,
        min_df=cfg.min_df,
        min_year=cfg.min_year,
        tokenizer=cfg.tokenizer,
    )
    models_dir = out / "models"
    if models_dir.exists():
        shutil.rmtree(models_dir)
    for year, yt in result.items():
        atomic_write_text(models_dir / f"{year}.json", topics.model_json(yt.model))
        progress.info("stage=cluster year=%d docs=%d vocabulary=%d", year, yt.dtm.n_docs, len(yt.dtm.vocabulary))
    atomic_write_text(out / "topics.csv", topics.topic_table_csv(result, cfg.top_words))
    res.outputs += ["topics.csv", "models/"]
    return res


# --------------------------------------------------------------------------
# stats / sample / validate

def paper_flags(cfg: PipelineConfig) -> list[analytics.PaperFlags]:
    out = Path(cfg.output_dir)
    manifest = _read_json(out / "manifest.json")
    detections = {d["arxiv_id"]: d for d in _read_json(out / "detections.json")}
    flags = []
    for p in manifest["papers"]:
        d = detections.get(p["arxiv_id"], {})
        meta = p["metadata"]
        flags.append(analytics.PaperFlags(
            arxiv_id=p["arxiv_id"],
            year=meta.get("year"),
            category=meta.get("category"),
            has_latex=p["has_latex"],
            has_tag=bool(d.get("latex_tag_found")),
            has_keywords=bool(d.get("keyword_hits")),
        ))
    return flags


def stats(cfg: PipelineConfig) -> StageResult:
    res = StageResult("stats")
    out = Path(cfg.output_dir)
    s = analytics.compute_stats(paper_flags(cfg))
    atomic_write_text(out / "stats.csv", analytics.stats_csv(s))
    atomic_write_text(out / "yearly.csv", analytics.yearly_csv(s))
    atomic_write_text(out / "categories.csv", analytics.categories_csv(s.categories))
    res.outputs += ["stats.csv", "yearly.csv", "categories.csv"]
    return res


def sample(cfg: PipelineConfig) -> StageResult:
    res = StageResult("sample")
    ids = [p["arxiv_id"] for p in _read_json(Path(cfg.output_dir) / "manifest.json")["papers"]]
    n = cfg.sample_n
    if n > len(ids):
        log.warning("sampling.n=%d exceeds the %d scanned papers; sampling all of them", n, len(ids))
        n = len(ids)
    chosen = analytics.sample_uniform(ids, n, cfg.sample_seed)
    text = "arxiv_id,has_pseudocode,notes\n" + "".join(f"{i},,\n" for i in chosen)
    atomic_write_text(Path(cfg.output_dir) / "sample.csv", text)
    res.outputs.append("sample.csv")
    return res


def predictions_from_records(cfg: PipelineConfig) -> dict[str, bool]:
    out = Path(cfg.output_dir)
    have = set(record_files(out / "records"))
    ids = [p["arxiv_id"] for p in _read_json(out / "manifest.json")["papers"]]
    return {i: i in have for i in ids}


def validate(cfg: PipelineConfig) -> StageResult:
    res = StageResult("validate")
    if cfg.labels is None:
        raise ConfigError("validate needs a labels file (validation.labels or --labels)")
    labels = analytics.read_labels(cfg.labels)
    if cfg.predictions is not None:
        preds = analytics.read_predictions(cfg.predictions)
    else:
        preds = predictions_from_records(cfg)
    report = analytics.compute_confusion(labels, preds)
    out = Path(cfg.output_dir)
    _write_json(out / "validation.json", report.to_json())
    res.outputs.append("validation.json")

    det_path = out / "detections.json"
    if det_path.exists():
        kw = {d["arxiv_id"]: bool(d["keyword_hits"]) for d in _read_json(det_path)}
        labelled = [l for l in labels if l.arxiv_id in kw]
        table = analytics.indicative_crosscheck(labelled, kw)
        _write_json(out / "indicative.json", {f"{a},{b}": n for (a, b), n in table.items()})
        res.outputs.append("indicative.json")
    return res


STAGES: dict[str, Callable[[PipelineConfig], StageResult]] = {
    "ingest": ingest,
    "detect": detect,
    "extract": extract,
    "refs": refs,
    "clean": clean,
    "cluster": cluster,
    "stats": stats,
    "sample": sample,
    "validate": validate,
}


def run_all(cfg: PipelineConfig) -> list[StageResult]:
    results = []
    for name, stage in STAGES.items():
        if name == "validate" and cfg.labels is None:
            log.info("no labels configured; validate skipped")
            continue
        results.append(stage(cfg))
    return results
