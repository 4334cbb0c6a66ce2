"""Extraction of algorithm environments, their referenced supplements, and
the JSON record files that make up the output collection."""
from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from ._latex import (
    enclosing_paragraph,
    find_label_positions,
    innermost_environment,
    mask_comments,
    outermost_pairs,
    scan_algorithm_tokens,
    scan_environments,
)
from .corpus import PaperBundle, PaperMetadata

log = logging.getLogger(__name__)

# \ref, \eqref, \algref, \Cref, \autoref, ... ; a starred form and a
# comma-separated label list are both accepted.
REF_COMMAND = re.compile(r"\\([A-Za-z]*ref)\*?[ \t]*\{([^{}]*)\}")

# environments that never count as the labelled object
_NON_OBJECT_ENVS = frozenset({"document"})


@dataclass(frozen=True)
class PseudocodeSpan:
    source_path: str
    start_offset: int
    end_offset: int
    body: str
    raw: str
    starred: bool
    nesting_depth_seen: int = 1


@dataclass(frozen=True)
class SupplementRecord:
    label: str
    content: str
    environment: str
    source_path: str

    def to_json(self) -> dict:
        return {"label": self.label, "environment": self.environment, "content": self.content, "source_path": self.source_path}


@dataclass
class PseudocodeRecord:
    arxiv_id: str
    pseudocode: str
    source_path: str
    span: tuple[int, int]
    starred: bool = False
    year: int | None = None
    title: str | None = None
    category: str | None = None
    subcategory: str | None = None
    supplements: list[SupplementRecord] = field(default_factory=list)
    reference_snippets: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "arxiv_id": self.arxiv_id,
            "year": self.year,
            "title": self.title,
            "category": self.category,
            "subcategory": self.subcategory,
            "pseudocode": self.pseudocode,
            "supplements": [s.to_json() for s in self.supplements],
            "reference_snippets": list(self.reference_snippets),
            "source_path": self.source_path,
            "span": [self.span[0], self.span[1]],
            "starred": self.starred,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PseudocodeRecord":
        return cls(
            arxiv_id=data["arxiv_id"],
            pseudocode=data["pseudocode"],
            source_path=data["source_path"],
            span=(data["span"][0], data["span"][1]),
            starred=data.get("starred", False),
            year=data.get("year"),
            title=data.get("title"),
            category=data.get("category"),
            subcategory=data.get("subcategory"),
            supplements=[SupplementRecord(s["label"], s["content"], s["environment"], s["source_path"]) for s in data.get("supplements", [])],
            reference_snippets=list(data.get("reference_snippets", [])),
        )


def extract_pseudocode(text: str, source_path: str = "") -> list[PseudocodeSpan]:
    """Outermost algorithm environments of one LaTeX file, in document order.

    Tags inside comments are ignored for matching, but comment text inside an
    environment is kept in ``raw`` and ``body``. A begin tag that is never
    closed is dropped with a warning.
    """
    scan = scan_algorithm_tokens(text)
    for offset in scan.dangling_begins:
        log.warning("%s: unclosed algorithm environment at offset %d dropped", source_path or "<text>", offset)
    for offset in scan.stray_ends:
        log.warning("%s: unmatched \\end{algorithm} at offset %d ignored", source_path or "<text>", offset)
    spans = []
    for pair, depth in outermost_pairs(scan):
        spans.append(
            PseudocodeSpan(
                source_path=source_path,
                start_offset=pair.begin,
                end_offset=pair.end_end,
                body=text[pair.begin_end : pair.end],
                raw=text[pair.begin : pair.end_end],
                starred=pair.starred,
                nesting_depth_seen=depth,
            )
        )
    return spans


def extract_bundle(bundle: PaperBundle) -> list[PseudocodeSpan]:
    spans = []
    for f in bundle.latex_files:
        spans.extend(extract_pseudocode(f.text, f.path))
    return spans


def referenced_labels(body: str) -> list[str]:
    """Labels named by reference commands in ``body``, first occurrence order."""
    seen: dict[str, None] = {}
    for m in REF_COMMAND.finditer(mask_comments(body)):
        for label in m.group(2).split(","):
            label = label.strip()
            if label:
                seen.setdefault(label, None)
    return list(seen)


def extract_referenced_content(span: PseudocodeSpan, bundle: PaperBundle) -> list[SupplementRecord]:
    """Resolve each reference inside ``span`` to the labelled content.

    A label inside an environment yields the innermost enclosing environment;
    a label in running prose yields its blank-line-delimited paragraph.
    Labels defined inside the span itself (e.g. line labels) are skipped.
    """
    labels = referenced_labels(span.body)
    if not labels:
        return []
    index: dict[str, tuple[str, int]] = {}
    for f in bundle.latex_files:
        for label, offset in find_label_positions(f.text):
            if f.path == span.source_path and span.start_offset <= offset < span.end_offset:
                continue
            index.setdefault(label, (f.path, offset))

    env_cache: dict[str, list] = {}
    records = []
    for label in labels:
        if label not in index:
            if not _defined_inside(label, span):
                log.warning("%s: label %r referenced in pseudocode not found", bundle.arxiv_id, label)
            continue
        path, offset = index[label]
        text = bundle.file_text(path)
        if path not in env_cache:
            env_cache[path] = scan_environments(text)
        env = innermost_environment(env_cache[path], offset, _NON_OBJECT_ENVS)
        if env is not None:
            content, name = text[env.start : env.end], env.name
        else:
            lo, hi = enclosing_paragraph(text, offset)
            content, name = text[lo:hi].strip("\n"), "paragraph"
        if content.strip():
            records.append(SupplementRecord(label, content, name, path))
    return records


def _defined_inside(label: str, span: PseudocodeSpan) -> bool:
    return any(lbl == label for lbl, _ in find_label_positions(span.raw))


def make_record(span: PseudocodeSpan, supplements: list[SupplementRecord], metadata: PaperMetadata) -> PseudocodeRecord:
    return PseudocodeRecord(
        arxiv_id=metadata.arxiv_id,
        year=metadata.year,
        title=metadata.title,
        category=metadata.category,
        subcategory=metadata.subcategory,
        pseudocode=span.raw,
        supplements=list(supplements),
        source_path=span.source_path,
        span=(span.start_offset, span.end_offset),
        starred=span.starred,
    )


def atomic_write_text(path: str | Path, text: str) -> Path:
    """Write via a temp file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    return path


def record_path(out_dir: str | Path, arxiv_id: str, ordinal: int) -> Path:
    return Path(out_dir) / arxiv_id / f"{ordinal}.json"


def write_record(record: PseudocodeRecord, path: str | Path) -> Path:
    try:
        return atomic_write_text(path, json.dumps(record.to_json(), ensure_ascii=False, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write record {path}: {exc}") from exc


def emit_record(
    span: PseudocodeSpan,
    supplements: list[SupplementRecord],
    metadata: PaperMetadata,
    out_dir: str | Path,
    ordinal: int,
) -> Path:
    """Write one record to ``<out_dir>/<arxiv_id>/<ordinal>.json``."""
    record = make_record(span, supplements, metadata)
    return write_record(record, record_path(out_dir, metadata.arxiv_id, ordinal))


def read_record(path: str | Path) -> PseudocodeRecord:
    with open(path, encoding="utf-8") as fh:
        return PseudocodeRecord.from_json(json.load(fh))


def extract_records(bundle: PaperBundle) -> list[PseudocodeRecord]:
    """Spans plus supplements for one bundle, ready to be written."""
    return [make_record(s, extract_referenced_content(s, bundle), bundle.metadata) for s in extract_bundle(bundle)]
