"""Pseudocode detection: algorithm-environment search in LaTeX sources and
indicative-keyword search in extracted PDF text."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

from ._latex import outermost_pairs, scan_algorithm_tokens
from .corpus import PaperBundle

PSEUDOCODE = "Pseudocode"
ALGORITHM = "Algorithm"

# Surface forms per keyword class. A trailing "N" stands for a decimal number.
DEFAULT_KEYWORDS: dict[str, tuple[str, ...]] = {
    PSEUDOCODE: ("Pseudocode", "pseudocode", "Pseudo-code", "pseudo-code"),
    ALGORITHM: ("Algorithm N", "algorithm N", "Algorithm-N", "algorithm-N", "Algorithm:", "algorithm:"),
}


@dataclass(frozen=True)
class DetectionResult:
    arxiv_id: str
    latex_tag_found: bool
    tag_count: int
    has_latex: bool


@dataclass(frozen=True)
class KeywordHit:
    keyword_class: str
    matched_text: str
    file_offset: int


def count_algorithm_environments(text: str) -> int:
    """Number of outermost, properly closed algorithm environments."""
    return len(outermost_pairs(scan_algorithm_tokens(text)))


def detect_latex_algorithm(bundle: PaperBundle) -> DetectionResult:
    count = sum(count_algorithm_environments(f.text) for f in bundle.latex_files)
    return DetectionResult(bundle.arxiv_id, count > 0, count, bundle.has_latex)


def _form_pattern(form: str) -> str:
    if form.endswith("N"):
        return re.escape(form[:-1]) + r"\d+(?!\d)"
    return re.escape(form)


class KeywordMatcher:
    """Keyword classes compiled into a single alternation, one named group per
    class, longest surface form first."""

    def __init__(self, keywords: Mapping[str, Iterable[str]] = DEFAULT_KEYWORDS, classes: Iterable[str] | None = None):
        wanted = sorted(set(keywords) if classes is None else set(classes))
        unknown = set(wanted) - set(keywords)
        if unknown:
            raise KeyError(f"unknown keyword classes: {sorted(unknown)}")
        self.names = {f"k{i}": name for i, name in enumerate(wanted)}
        groups = []
        for group, name in self.names.items():
            forms = sorted(keywords[name], key=len, reverse=True)
            groups.append(f"(?P<{group}>" + "|".join(_form_pattern(f) for f in forms) + ")")
        body = "|".join(groups) if groups else r"(?!x)x"
        self.pattern = re.compile(r"(?<![A-Za-z])(?:" + body + ")")

    def find(self, text: str) -> list[KeywordHit]:
        return [KeywordHit(self.names[m.lastgroup], m.group(0), m.start()) for m in self.pattern.finditer(text)]


_DEFAULT_MATCHER = KeywordMatcher()


def detect_indicative_keywords(
    text: str,
    classes: Iterable[str] | None = None,
    keywords: Mapping[str, Iterable[str]] | None = None,
) -> list[KeywordHit]:
    """Every non-overlapping keyword hit in ``text``, in document order."""
    if classes is None and keywords is None:
        return _DEFAULT_MATCHER.find(text)
    return KeywordMatcher(keywords or DEFAULT_KEYWORDS, classes).find(text)
