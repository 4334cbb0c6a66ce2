"""Turn LaTeX-flavoured reference snippets into plain prose."""
from __future__ import annotations

import re
from dataclasses import dataclass


@dataclass(frozen=True)
class CleaningRules:
    remove_comments: bool = True
    remove_math: bool = True
    remove_commands: bool = True
    remove_underscore_tokens: bool = True
    collapse_whitespace: bool = True


def strip_comments(text: str) -> str:
    # `\%` is dropped too: a bare `%` surviving into the output would read as a
    # comment on the next pass.
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n:
            out.append(" " if text[i + 1] == "%" else text[i : i + 2])
            i += 2
        elif c == "%":
            j = text.find("\n", i)
            i = n if j < 0 else j
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _find_unescaped(text: str, token: str, start: int) -> int:
    i = start
    while True:
        j = text.find(token, i)
        if j < 0:
            return -1
        k = j
        while k > start and text[k - 1] == "\\":
            k -= 1
        if (j - k) % 2 == 0:
            return j
        i = j + 1


def strip_math(text: str) -> str:
    """Replace ``$..$``, ``$$..$$``, ``\\(..\\)`` and ``\\[..\\]`` with a space.

    An unmatched dollar swallows the rest of the text; an unmatched ``\\(`` or
    ``\\[`` is left for command stripping. ``\\$`` is dropped.
    """
    out = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\\" and i + 1 < n:
            nxt = text[i + 1]
            if nxt == "$":
                out.append(" ")
                i += 2
                continue
            if nxt in "([":
                close = "\\)" if nxt == "(" else "\\]"
                j = _find_unescaped(text, close, i + 2)
                if j >= 0:
                    out.append(" ")
                    i = j + 2
                    continue
            out.append(text[i : i + 2])
            i += 2
        elif c == "$":
            delim = "$$" if text.startswith("$$", i) else "$"
            j = _find_unescaped(text, delim, i + len(delim))
            out.append(" ")
            if j < 0:
                break
            i = j + len(delim)
        else:
            out.append(c)
            i += 1
    return "".join(out)


# one left-to-right pass so `\\line` reads as a line break followed by "line"
_BACKSLASH_TOKEN = re.compile(r"\\\\|\\[A-Za-z]+\*?(?:[ \t]*\[[^\[\]]*\])?|\\(.)?", re.DOTALL)
_BRACES = re.compile(r"[{}]")


def _replace_backslash(m: re.Match) -> str:
    escaped = m.group(1)
    if escaped is None or escaped.isspace():
        return " "
    return escaped


def strip_commands(text: str) -> str:
    return _BRACES.sub(" ", _BACKSLASH_TOKEN.sub(_replace_backslash, text))


_UNDERSCORE_TOKEN = re.compile(r"^(?:\S_\S|\S_|_\S|_)$")


def strip_underscore_tokens(text: str) -> str:
    return re.sub(r"\S+", lambda m: " " if _UNDERSCORE_TOKEN.match(m.group(0)) else m.group(0), text)


def clean(text: str, rules: CleaningRules = CleaningRules()) -> str:
    if rules.remove_comments:
        text = strip_comments(text)
    if rules.remove_math:
        text = strip_math(text)
    if rules.remove_commands:
        text = strip_commands(text)
    if rules.remove_underscore_tokens:
        text = strip_underscore_tokens(text)
    if rules.collapse_whitespace:
        text = " ".join(text.split())
    return text
