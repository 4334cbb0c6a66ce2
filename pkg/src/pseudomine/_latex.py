"""Low-level LaTeX scanning helpers shared by the detector, extractor and
reference resolver.

All functions work on character offsets of the *original* text. Comments are
handled by masking: a masked copy has the same length as the input, with every
comment character replaced by a space, so offsets found in the mask are valid
in the original.
"""
from __future__ import annotations

import re
from typing import NamedTuple

# `%` preceded by an even number (incl. zero) of backslashes starts a comment.
_COMMENT = re.compile(r"(?<!\\)((?:\\\\)*)%[^\n]*")

ALGO_BEGIN = re.compile(r"\\begin[ \t]*\{algorithm(\*?)\}")
ALGO_END = re.compile(r"\\end[ \t]*\{algorithm\*?\}")
_ALGO_TOKEN = re.compile(r"\\(begin|end)[ \t]*\{algorithm(\*?)\}")

_ENV_TOKEN = re.compile(r"\\(begin|end)[ \t]*\{([^{}\n]+)\}")
_LABEL = re.compile(r"\\label[ \t]*\{([^{}]*)\}")


def mask_comments(text: str) -> str:
    """Blank out LaTeX comments, keeping every other character in place."""

    def _blank(m: re.Match) -> str:
        keep = m.group(1)
        return keep + " " * (len(m.group(0)) - len(keep))

    return _COMMENT.sub(_blank, text)


class AlgorithmPair(NamedTuple):
    begin: int  # offset of the backslash of \begin
    begin_end: int  # offset one past the begin token
    end: int  # offset of the backslash of \end
    end_end: int  # offset one past the end token
    starred: bool
    depth: int  # 1 for an outermost environment


class AlgorithmScan(NamedTuple):
    pairs: list[AlgorithmPair]
    dangling_begins: list[int]
    stray_ends: list[int]


def scan_algorithm_tokens(text: str) -> AlgorithmScan:
    """Match algorithm begin/end tokens with a stack.

    Comment text is ignored. Every ``\\end`` closes the most recent open
    ``\\begin``; begins left open at end of input are reported as dangling and
    ends with nothing open as stray.
    """
    masked = mask_comments(text)
    stack: list[re.Match] = []
    pairs: list[AlgorithmPair] = []
    stray: list[int] = []
    for m in _ALGO_TOKEN.finditer(masked):
        if m.group(1) == "begin":
            stack.append(m)
        elif stack:
            b = stack.pop()
            pairs.append(
                AlgorithmPair(b.start(), b.end(), m.start(), m.end(), bool(b.group(2)), len(stack) + 1)
            )
        else:
            stray.append(m.start())
    pairs.sort()
    return AlgorithmScan(pairs, [b.start() for b in stack], stray)


def outermost_pairs(scan: AlgorithmScan) -> list[tuple[AlgorithmPair, int]]:
    """Matched environments not contained in another matched environment.

    Returns ``(pair, nesting_depth_seen)`` in document order, where the depth
    counts the outer environment itself plus every level of matched nesting
    inside it. An environment whose enclosing begin is dangling becomes
    outermost.
    """
    out: list[tuple[AlgorithmPair, int]] = []
    for pair in scan.pairs:  # sorted by begin offset
        if out and pair.begin < out[-1][0].end_end:
            outer, seen = out[-1]
            out[-1] = (outer, max(seen, pair.depth - outer.depth + 1))
        else:
            out.append((pair, 1))
    return out


class Environment(NamedTuple):
    name: str
    start: int
    end: int  # one past the closing \end{name}


def scan_environments(text: str) -> list[Environment]:
    """All matched ``\\begin{E}...\\end{E}`` environments, in begin order.

    An ``\\end{E}`` with no open ``E`` is ignored; an ``\\end{E}`` closes the
    nearest open ``E`` and discards anything opened after it (unbalanced
    inner environments).
    """
    masked = mask_comments(text)
    stack: list[tuple[str, int]] = []
    envs: list[Environment] = []
    for m in _ENV_TOKEN.finditer(masked):
        kind, name = m.group(1), m.group(2).strip()
        if kind == "begin":
            stack.append((name, m.start()))
            continue
        for i in range(len(stack) - 1, -1, -1):
            if stack[i][0] == name:
                envs.append(Environment(name, stack[i][1], m.end()))
                del stack[i:]
                break
    envs.sort(key=lambda e: (e.start, -e.end))
    return envs


def innermost_environment(envs: list[Environment], offset: int, exclude: frozenset[str] = frozenset()) -> Environment | None:
    best = None
    for env in envs:
        if env.name in exclude:
            continue
        if env.start <= offset < env.end and (best is None or env.end - env.start < best.end - best.start):
            best = env
    return best


def enclosing_paragraph(text: str, offset: int) -> tuple[int, int]:
    """Bounds of the maximal run of non-blank lines around ``offset``."""
    lines = text.splitlines(keepends=True)
    starts = []
    pos = 0
    for line in lines:
        starts.append(pos)
        pos += len(line)
    idx = 0
    for i, s in enumerate(starts):
        if s <= offset:
            idx = i
        else:
            break
    lo = idx
    while lo > 0 and lines[lo - 1].strip():
        lo -= 1
    hi = idx
    while hi + 1 < len(lines) and lines[hi + 1].strip():
        hi += 1
    start = starts[lo] if lines else 0
    end = starts[hi] + len(lines[hi]) if lines else 0
    return start, end


def find_label_positions(text: str) -> list[tuple[str, int]]:
    """``(label, offset)`` for each non-commented ``\\label{...}``."""
    return [(m.group(1).strip(), m.start()) for m in _LABEL.finditer(mask_comments(text))]
