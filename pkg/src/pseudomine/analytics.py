"""Corpus statistics and the sampling-based validation harness."""
from __future__ import annotations

import csv
import io
import random
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Mapping

UNKNOWN = "unknown"

# Reference magnitudes for a full arXiv scan (1991 to mid-2023).
ARXIV_REFERENCE = {
    "total_papers": 2_285_111,
    "papers_with_latex": 2_054_422,
    "papers_with_algorithm_tag": 141_939,
    "papers_with_keywords": 241_275,
    "records": 323_303,
}


@dataclass(frozen=True)
class PaperFlags:
    """What the pipeline learned about one paper."""

    arxiv_id: str
    year: int | None = None
    category: str | None = None
    has_latex: bool = False
    has_tag: bool = False
    has_keywords: bool = False


@dataclass
class CorpusStats:
    total_papers: int = 0
    papers_with_latex: int = 0
    papers_with_algorithm_tag: int = 0
    papers_with_keywords: int = 0
    yearly: dict = field(default_factory=dict)  # year|"unknown" -> (scanned, with_tag, with_keywords)
    categories: dict = field(default_factory=dict)

    @property
    def latex_fraction(self) -> float:
        return self.papers_with_latex / self.total_papers if self.total_papers else 0.0


def _year_key(year):
    return UNKNOWN if year is None else int(year)


def _sorted_years(keys):
    return sorted(keys, key=lambda y: (y == UNKNOWN, 0 if y == UNKNOWN else y))


def compute_stats(papers: Iterable[PaperFlags]) -> CorpusStats:
    papers = list(papers)
    stats = CorpusStats()
    yearly: dict = {}
    for p in papers:
        stats.total_papers += 1
        stats.papers_with_latex += p.has_latex
        stats.papers_with_algorithm_tag += p.has_tag
        stats.papers_with_keywords += p.has_keywords
        s, t, k = yearly.get(_year_key(p.year), (0, 0, 0))
        yearly[_year_key(p.year)] = (s + 1, t + p.has_tag, k + p.has_keywords)
    stats.yearly = {y: yearly[y] for y in _sorted_years(yearly)}
    stats.categories = category_distribution(papers)
    return stats


def yearly_counts(items: Iterable[tuple[int | None, bool]]) -> dict:
    """Count papers per year where ``flag`` is true (``True`` for all papers)."""
    c = Counter(_year_key(y) for y, flag in items if flag)
    return {y: c[y] for y in _sorted_years(c)}


def cumulative(series: Mapping) -> dict:
    total = 0
    out = {}
    for y, n in series.items():
        total += n
        out[y] = total
    return out


def category_distribution(papers: Iterable[PaperFlags]) -> dict[str, int]:
    c = Counter((p.category or UNKNOWN) for p in papers if p.has_keywords)
    return dict(sorted(c.items(), key=lambda kv: (-kv[1], kv[0])))


def sample_uniform(ids: Iterable[str], n: int, seed: int) -> list[str]:
    """``n`` distinct ids drawn uniformly without replacement, sorted."""
    population = sorted(set(ids))
    if n < 0 or n > len(population):
        raise ValueError(f"cannot sample {n} ids from a population of {len(population)}")
    return sorted(random.Random(seed).sample(population, n))


# --------------------------------------------------------------------------
# validation

@dataclass(frozen=True)
class ValidationLabel:
    arxiv_id: str
    has_pseudocode: bool
    notes: str | None = None


@dataclass(frozen=True)
class ValidationReport:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def fpr(self) -> float:
        neg = self.fp + self.tn
        return self.fp / neg if neg else 0.0

    @property
    def fnr(self) -> float:
        pos = self.fn + self.tp
        return self.fn / pos if pos else 0.0

    @property
    def fpr_percent(self) -> float:
        return percent_1dp(self.fpr)

    @property
    def fnr_percent(self) -> float:
        return percent_1dp(self.fnr)

    def to_json(self) -> dict:
        return {
            "tp": self.tp,
            "fp": self.fp,
            "tn": self.tn,
            "fn": self.fn,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "fpr_percent": self.fpr_percent,
            "fnr_percent": self.fnr_percent,
        }


def percent_1dp(rate: float) -> float:
    return float(Decimal(repr(rate * 100)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _check_unique(labels: list[ValidationLabel]):
    dup = [k for k, v in Counter(l.arxiv_id for l in labels).items() if v > 1]
    if dup:
        raise ValueError(f"duplicate labels for: {sorted(dup)}")


def _require_predictions(labels, predictions: Mapping[str, bool]):
    missing = sorted(l.arxiv_id for l in labels if l.arxiv_id not in predictions)
    if missing:
        raise KeyError(f"no prediction for labelled ids: {missing}")


def compute_confusion(labels: Iterable[ValidationLabel], predictions: Mapping[str, bool]) -> ValidationReport:
    """Compare human labels with paper-level predictions.

    FPR is false flags over all negative labels; FNR is misses over all
    positive labels.
    """
    labels = list(labels)
    _check_unique(labels)
    _require_predictions(labels, predictions)
    tp = fp = tn = fn = 0
    for l in labels:
        pred = bool(predictions[l.arxiv_id])
        if l.has_pseudocode:
            tp += pred
            fn += not pred
        else:
            fp += pred
            tn += not pred
    return ValidationReport(tp, fp, tn, fn)


def indicative_crosscheck(labels: Iterable[ValidationLabel], keyword_hits: Mapping[str, bool]) -> dict[tuple[str, str], int]:
    """Contingency counts keyed ``(label, keyword)`` with values ``"Y"``/``"N"``."""
    labels = list(labels)
    _check_unique(labels)
    _require_predictions(labels, keyword_hits)
    table = {("Y", "Y"): 0, ("Y", "N"): 0, ("N", "Y"): 0, ("N", "N"): 0}
    for l in labels:
        key = ("Y" if l.has_pseudocode else "N", "Y" if keyword_hits[l.arxiv_id] else "N")
        table[key] += 1
    return table


# --------------------------------------------------------------------------
# file formats

def _parse_bool(value: str, where: str) -> bool:
    v = value.strip().lower()
    if v == "true":
        return True
    if v == "false":
        return False
    raise ValueError(f"{where}: expected true/false, got {value!r}")


def read_labels(path: str | Path) -> list[ValidationLabel]:
    labels = []
    with open(path, newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.DictReader(fh), start=2):
            labels.append(
                ValidationLabel(
                    row["arxiv_id"].strip(),
                    _parse_bool(row["has_pseudocode"], f"{path}:{i}"),
                    (row.get("notes") or None),
                )
            )
    _check_unique(labels)
    return labels


def labels_csv(labels: Iterable[ValidationLabel]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["arxiv_id", "has_pseudocode", "notes"])
    for l in labels:
        w.writerow([l.arxiv_id, "true" if l.has_pseudocode else "false", l.notes or ""])
    return buf.getvalue()


def read_predictions(path: str | Path, column: str = "predicted") -> dict[str, bool]:
    """CSV with ``arxiv_id`` and a boolean column (default ``predicted``)."""
    with open(path, newline="", encoding="utf-8") as fh:
        return {row["arxiv_id"].strip(): _parse_bool(row[column], str(path)) for row in csv.DictReader(fh)}


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def stats_csv(stats: CorpusStats) -> str:
    return _csv(
        ["metric", "value"],
        [
            ["total_papers", stats.total_papers],
            ["papers_with_latex", stats.papers_with_latex],
            ["papers_with_algorithm_tag", stats.papers_with_algorithm_tag],
            ["papers_with_keywords", stats.papers_with_keywords],
            ["latex_fraction", f"{stats.latex_fraction:.6f}"],
        ],
    )


def yearly_csv(stats: CorpusStats) -> str:
    rows = []
    cum = 0
    for y, (scanned, tagged, kw) in stats.yearly.items():
        cum += scanned
        rows.append([y, scanned, tagged, kw, cum])
    return _csv(["year", "scanned", "with_tag", "with_keywords", "cumulative_scanned"], rows)


def categories_csv(dist: Mapping[str, int]) -> str:
    return _csv(["category", "papers_with_keywords"], list(dist.items()))
