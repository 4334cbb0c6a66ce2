"""Corpus discovery: unpack nested source archives, pair LaTeX sources with
pre-extracted PDF text by arXiv identifier, and read metadata sidecars.

Expected layout under a corpus root::

    <root>/pdf_text/<arxiv_id>.txt
    <root>/sources/<arxiv_id>/**
    <root>/meta/<arxiv_id>.json
"""
from __future__ import annotations

import datetime as _dt
import gzip
import json
import logging
import shutil
import tarfile
import zipfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

log = logging.getLogger(__name__)

DEFAULT_MAX_DEPTH = 10
SOURCE_SUFFIXES = (".tex", ".bbl")
FIRST_ARXIV_YEAR = 1991


class ArchiveDepthError(RuntimeError):
    """Archive nesting exceeded the configured cap."""


class MetadataError(ValueError):
    pass


@dataclass
class PaperMetadata:
    arxiv_id: str
    version: int | None = None
    year: int | None = None
    title: str | None = None
    abstract: str | None = None
    category: str | None = None
    subcategory: str | None = None
    source_url: str | None = None

    def __post_init__(self):
        if not self.arxiv_id:
            raise MetadataError("arxiv_id must be non-empty")


class SourceFile(NamedTuple):
    path: str  # posix path relative to the paper's source directory
    text: str
    encoding: str  # "utf-8" or "latin-1"


@dataclass
class PaperBundle:
    metadata: PaperMetadata
    latex_files: list[SourceFile] = field(default_factory=list)
    pdf_text: str | None = None

    @property
    def arxiv_id(self) -> str:
        return self.metadata.arxiv_id

    @property
    def has_latex(self) -> bool:
        return bool(self.latex_files)

    def file_text(self, path: str) -> str:
        for f in self.latex_files:
            if f.path == path:
                return f.text
        raise KeyError(path)


# --------------------------------------------------------------------------
# archives

@dataclass
class UnpackReport:
    archives_opened: int = 0
    files_produced: int = 0
    depth_reached: int = 0
    warnings: list[str] = field(default_factory=list)


def _archive_kind(path: Path) -> str | None:
    name = path.name.lower()
    if name.endswith(".zip"):
        return "zip"
    if name.endswith((".tar", ".tar.gz", ".tgz", ".tar.bz2", ".tar.xz")):
        return "tar"
    if name.endswith(".gz"):
        return "gz"
    return None


def _archive_stem(path: Path) -> str:
    name = path.name
    for suffix in (".tar.gz", ".tar.bz2", ".tar.xz", ".tgz", ".tar", ".zip", ".gz"):
        if name.lower().endswith(suffix):
            return name[: -len(suffix)]
    return name


def _free_path(base: Path) -> Path:
    if not base.exists():
        return base
    i = 1
    while base.with_name(f"{base.name}_{i}").exists():
        i += 1
    return base.with_name(f"{base.name}_{i}")


def _safe_target(dest: Path, member: str) -> Path:
    if not member or member.startswith(("/", "\\")):
        raise ValueError(f"absolute or empty member path: {member!r}")
    target = (dest / member).resolve()
    root = dest.resolve()
    if target != root and root not in target.parents:
        raise ValueError(f"member escapes extraction directory: {member!r}")
    return target


def _extract_one(archive: Path, kind: str) -> list[Path]:
    """Extract next to ``archive``; return the regular files written."""
    written: list[Path] = []
    if kind == "gz":
        out = _free_path(archive.with_name(_archive_stem(archive)))
        with gzip.open(archive, "rb") as src, open(out, "wb") as dst:
            shutil.copyfileobj(src, dst)
        return [out]

    dest = _free_path(archive.with_name(_archive_stem(archive)))
    dest.mkdir(parents=True)
    try:
        if kind == "zip":
            with zipfile.ZipFile(archive) as zf:
                for info in zf.infolist():
                    target = _safe_target(dest, info.filename)
                    if info.is_dir():
                        target.mkdir(parents=True, exist_ok=True)
                        continue
                    target.parent.mkdir(parents=True, exist_ok=True)
                    with zf.open(info) as src, open(target, "wb") as dst:
                        shutil.copyfileobj(src, dst)
                    written.append(target)
        else:
            with tarfile.open(archive, "r:*") as tf:
                for member in tf.getmembers():
                    target = _safe_target(dest, member.name)
                    if member.isdir():
                        target.mkdir(parents=True, exist_ok=True)
                        continue
                    if not member.isreg():
                        continue  # links and device files are never materialised
                    src = tf.extractfile(member)
                    if src is None:
                        continue
                    target.parent.mkdir(parents=True, exist_ok=True)
                    with src, open(target, "wb") as dst:
                        shutil.copyfileobj(src, dst)
                    written.append(target)
    except Exception:
        shutil.rmtree(dest, ignore_errors=True)
        raise
    return written


def unpack_archives(root: str | Path, max_depth: int = DEFAULT_MAX_DEPTH) -> UnpackReport:
    """Recursively unpack every archive under ``root`` in place.

    Each archive is extracted into a sibling directory named after it (plain
    ``.gz`` files decompress to a sibling file) and then deleted, so a second
    call finds nothing to do. Archives found inside an extracted archive sit
    one level deeper; meeting one deeper than ``max_depth`` raises
    :class:`ArchiveDepthError`. Corrupt archives are skipped with a warning and
    left on disk.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(root)
    if max_depth < 1:
        raise ValueError("max_depth must be positive")
    report = UnpackReport()
    work = [(p, 1) for p in sorted(root.rglob("*")) if p.is_file() and _archive_kind(p)]
    while work:
        archive, depth = work.pop(0)
        if depth > max_depth:
            raise ArchiveDepthError(f"archive nesting deeper than {max_depth}: {archive}")
        kind = _archive_kind(archive)
        try:
            produced = _extract_one(archive, kind)
        except (zipfile.BadZipFile, tarfile.TarError, OSError, EOFError, ValueError) as exc:
            msg = f"skipping unreadable archive {archive}: {exc}"
            log.warning(msg)
            report.warnings.append(msg)
            continue
        archive.unlink()
        report.archives_opened += 1
        report.depth_reached = max(report.depth_reached, depth)
        for p in sorted(produced):
            if _archive_kind(p):
                work.append((p, depth + 1))
            else:
                report.files_produced += 1
    return report


# --------------------------------------------------------------------------
# metadata

def _parse_year(value, path) -> int | None:
    try:
        year = int(str(value).strip())
    except (TypeError, ValueError):
        log.warning("%s: malformed year %r ignored", path, value)
        return None
    if not FIRST_ARXIV_YEAR <= year <= _dt.date.today().year:
        log.warning("%s: year %d out of range ignored", path, year)
        return None
    return year


def _parse_version(value, path) -> int | None:
    text = str(value).strip().lower().lstrip("v")
    try:
        version = int(text)
    except ValueError:
        log.warning("%s: malformed version %r ignored", path, value)
        return None
    return version if version > 0 else None


def metadata_from_dict(data: dict, where: str = "<dict>") -> PaperMetadata:
    arxiv_id = data.get("id")
    if not arxiv_id or not str(arxiv_id).strip():
        raise MetadataError(f"{where}: missing mandatory field 'id'")

    def text(key):
        v = data.get(key)
        return None if v is None else str(v)

    return PaperMetadata(
        arxiv_id=str(arxiv_id).strip(),
        version=_parse_version(data["version"], where) if data.get("version") is not None else None,
        year=_parse_year(data["year"], where) if data.get("year") is not None else None,
        title=text("title"),
        abstract=text("abstract"),
        category=text("category"),
        subcategory=text("subcategory"),
        source_url=text("url"),
    )


def parse_metadata(path: str | Path) -> PaperMetadata:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise MetadataError(f"{path}: metadata must be a JSON object")
    return metadata_from_dict(data, str(path))


def metadata_to_dict(meta: PaperMetadata) -> dict:
    return {
        "id": meta.arxiv_id,
        "version": meta.version,
        "year": meta.year,
        "title": meta.title,
        "abstract": meta.abstract,
        "category": meta.category,
        "subcategory": meta.subcategory,
        "url": meta.source_url,
    }


# --------------------------------------------------------------------------
# pairing

def read_text(path: Path) -> tuple[str, str]:
    raw = path.read_bytes()
    try:
        return raw.decode("utf-8"), "utf-8"
    except UnicodeDecodeError:
        return raw.decode("latin-1"), "latin-1"


def load_source_files(source_dir: Path) -> list[SourceFile]:
    files = []
    for p in source_dir.rglob("*"):
        if p.is_file() and p.suffix.lower() in SOURCE_SUFFIXES:
            text, enc = read_text(p)
            files.append(SourceFile(p.relative_to(source_dir).as_posix(), text, enc))
    files.sort(key=lambda f: f.path)
    return files


def pair_by_identifier(
    pdf_text_dir: str | Path | None,
    source_dir: str | Path | None,
    meta_dir: str | Path | None = None,
) -> list[PaperBundle]:
    """Build one :class:`PaperBundle` per identifier found on disk.

    Identifiers are the ``.txt`` stems under ``pdf_text_dir`` and the
    directory names under ``source_dir``, taken verbatim. Missing
    directories are treated as empty. Bundles are sorted by identifier.
    """
    pdf_ids: dict[str, Path] = {}
    if pdf_text_dir and Path(pdf_text_dir).is_dir():
        pdf_ids = {p.stem: p for p in Path(pdf_text_dir).iterdir() if p.is_file() and p.suffix == ".txt"}
    src_ids: dict[str, Path] = {}
    if source_dir and Path(source_dir).is_dir():
        src_ids = {p.name: p for p in Path(source_dir).iterdir() if p.is_dir()}

    bundles = []
    for arxiv_id in sorted(set(pdf_ids) | set(src_ids)):
        meta = None
        if meta_dir:
            meta_path = Path(meta_dir) / f"{arxiv_id}.json"
            if meta_path.is_file():
                meta = parse_metadata(meta_path)
                if meta.arxiv_id != arxiv_id:
                    log.warning("%s: metadata id %r differs from on-disk id; using %r", meta_path, meta.arxiv_id, arxiv_id)
                    meta.arxiv_id = arxiv_id
        if meta is None:
            meta = PaperMetadata(arxiv_id=arxiv_id)
        latex = load_source_files(src_ids[arxiv_id]) if arxiv_id in src_ids else []
        pdf_text = read_text(pdf_ids[arxiv_id])[0] if arxiv_id in pdf_ids else None
        bundles.append(PaperBundle(meta, latex, pdf_text))
    return bundles


def unmatched_report(bundles: list[PaperBundle]) -> dict[str, list[str]]:
    """Identifiers that have only PDF text, or only sources."""
    return {
        "pdf_only": [b.arxiv_id for b in bundles if not b.latex_files and b.pdf_text is not None],
        "source_only": [b.arxiv_id for b in bundles if b.pdf_text is None],
    }


def load_corpus(root: str | Path) -> list[PaperBundle]:
    root = Path(root)
    return pair_by_identifier(root / "pdf_text", root / "sources", root / "meta")
