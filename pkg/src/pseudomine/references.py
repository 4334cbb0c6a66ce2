"""Locate prose that refers to a pseudocode block and cut a sentence-trimmed
snippet around each reference."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import NamedTuple

from ._latex import mask_comments
from .corpus import PaperBundle

_LABEL = re.compile(r"\\label[ \t]*\{([^{}]*)\}")
_AFTER_TERMINATOR = frozenset("})")


@dataclass(frozen=True)
class SnippetConfig:
    span_chars: int = 1200
    boundary_window: int = 300
    sentence_terminators: frozenset[str] = frozenset(".!?")

    def __post_init__(self):
        if self.span_chars <= 0 or self.boundary_window <= 0:
            raise ValueError("span_chars and boundary_window must be positive")
        if self.boundary_window > self.span_chars:
            raise ValueError("boundary_window must not exceed span_chars")


@dataclass(frozen=True)
class ReferenceSnippet:
    text: str
    source_path: str
    tag_offset: int
    trimmed_left: bool
    trimmed_right: bool


class ReferenceMatch(NamedTuple):
    source_path: str
    offset: int
    length: int


def find_labels(body: str) -> list[str]:
    return [m.group(1).strip() for m in _LABEL.finditer(body)]


def generate_ref_patterns(label: str) -> re.Pattern:
    """Matcher for ``\\<seg>ref{label}`` with any alphabetic segment."""
    if not label:
        raise ValueError("label must be non-empty")
    return re.compile(r"\\[A-Za-z]*ref[ \t]*\{\s*" + re.escape(label) + r"\s*\}")


def locate_references(
    matcher: re.Pattern,
    bundle: PaperBundle,
    exclude: tuple[str, int, int] | None = None,
) -> list[ReferenceMatch]:
    """All matches in the bundle's LaTeX files, in (path, offset) order.

    ``exclude`` is ``(source_path, start, end)`` of the originating
    pseudocode; matches starting inside it are dropped. Commented-out
    references are not reported.
    """
    found = []
    for f in bundle.latex_files:
        for m in matcher.finditer(mask_comments(f.text)):
            if exclude and f.path == exclude[0] and exclude[1] <= m.start() < exclude[2]:
                continue
            found.append(ReferenceMatch(f.path, m.start(), m.end() - m.start()))
    found.sort()
    return found


def _is_terminator(text: str, i: int, window_end: int, terminators: frozenset[str]) -> bool:
    if text[i] not in terminators:
        return False
    nxt = i + 1
    return nxt >= window_end or text[nxt].isspace() or text[nxt] in _AFTER_TERMINATOR


def extract_snippet(
    text: str,
    offset: int,
    length: int,
    cfg: SnippetConfig = SnippetConfig(),
    source_path: str = "",
) -> ReferenceSnippet:
    """Cut the snippet around the reference at ``text[offset:offset+length]``.

    The window reaches ``span_chars`` characters either side of the command.
    Within the first ``boundary_window`` characters the snippet starts after
    the last sentence terminator; within the last ``boundary_window`` it ends
    at the first terminator. Trimming never cuts into the command itself.
    """
    if not (0 <= offset and offset + length <= len(text)):
        raise ValueError("match lies outside text")
    lo = max(0, offset - cfg.span_chars)
    hi = min(len(text), offset + length + cfg.span_chars)
    start, end = lo, hi
    trimmed_left = trimmed_right = False

    for i in range(min(lo + cfg.boundary_window, offset) - 1, lo - 1, -1):
        if _is_terminator(text, i, hi, cfg.sentence_terminators):
            start, trimmed_left = i + 1, True
            break
    for i in range(max(hi - cfg.boundary_window, offset + length), hi):
        if _is_terminator(text, i, hi, cfg.sentence_terminators):
            end, trimmed_right = i + 1, True
            break

    snippet = text[start:end]
    if trimmed_left:
        snippet = snippet.lstrip()
    if trimmed_right:
        snippet = snippet.rstrip()
    return ReferenceSnippet(snippet, source_path, offset, trimmed_left, trimmed_right)


def snippets_for_span(
    bundle: PaperBundle,
    pseudocode: str,
    source_path: str,
    span: tuple[int, int],
    cfg: SnippetConfig = SnippetConfig(),
) -> list[ReferenceSnippet]:
    """Every reference snippet for one pseudocode block, via its labels."""
    out = []
    seen = set()
    for label in dict.fromkeys(find_labels(mask_comments(pseudocode))):
        if not label:
            continue
        matcher = generate_ref_patterns(label)
        for match in locate_references(matcher, bundle, (source_path, span[0], span[1])):
            if match in seen:
                continue
            seen.add(match)
            out.append(extract_snippet(bundle.file_text(match.source_path), match.offset, match.length, cfg, match.source_path))
    return out
