import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import snippet_oracle
from pseudomine.corpus import PaperBundle, PaperMetadata, SourceFile
from pseudomine.references import (
    SnippetConfig,
    extract_snippet,
    find_labels,
    generate_ref_patterns,
    locate_references,
    snippets_for_span,
)


@pytest.mark.parametrize(
    "body,labels",
    [
        ("\\label{alg:main}", ["alg:main"]),
        ("\\label{ alg:x }", ["alg:x"]),
        ("no labels here", []),
        ("\\label{a}\\label{b}\\label{a}", ["a", "b", "a"]),
    ],
)
def test_find_labels(body, labels):
    assert find_labels(body) == labels


@pytest.mark.parametrize("cmd", ["\\ref", "\\algref", "\\eqref", "\\Cref", "\\autoref"])
def test_pattern_accepts_any_ref_segment(cmd):
    assert generate_ref_patterns("alg:main").search(cmd + "{alg:main}")


@pytest.mark.parametrize("text", ["\\ref{alg:main2}", "\\ref{xalg:main}", "\\label{alg:main}", "\\re1ref{alg:main}"])
def test_pattern_exact_label(text):
    assert not generate_ref_patterns("alg:main").search(text)


def test_pattern_special_characters_literal():
    m = generate_ref_patterns("alg:a+b")
    assert m.search("\\ref{alg:a+b}") and not m.search("\\ref{alg:aab}")


def test_pattern_whitespace_in_braces():
    assert generate_ref_patterns("x").fullmatch("\\ref{ x }")


def test_empty_label_rejected():
    with pytest.raises(ValueError):
        generate_ref_patterns("")


def _bundle(files):
    return PaperBundle(PaperMetadata("p"), [SourceFile(k, v, "utf-8") for k, v in sorted(files.items())])


def test_locate_in_other_file_and_order():
    b = _bundle({
        "a.tex": "\\begin{algorithm}\\label{alg:m}\\end{algorithm}",
        "b.tex": "see \\ref{alg:m} and \\algref{alg:m}.",
    })
    found = locate_references(generate_ref_patterns("alg:m"), b)
    assert [(f.source_path, f.offset, f.length) for f in found] == [("b.tex", 4, 11), ("b.tex", 20, 14)]


def test_locate_none():
    assert locate_references(generate_ref_patterns("z"), _bundle({"a.tex": "nothing"})) == []


def test_locate_excludes_origin_span_and_comments():
    text = "\\begin{algorithm}\\label{L}\\ref{L}\\end{algorithm} % \\ref{L}\nAs \\ref{L} shows."
    b = _bundle({"a.tex": text})
    end = text.index("\\end{algorithm}") + len("\\end{algorithm}")
    found = locate_references(generate_ref_patterns("L"), b, ("a.tex", 0, end))
    assert [f.offset for f in found] == [text.index("As") + 3]


def test_spec_scale_example():
    text = "abcd. efghij REF klmno. pqrst"
    s = extract_snippet(text, text.index("REF"), 3, SnippetConfig(10, 5))
    assert (s.text, s.trimmed_left, s.trimmed_right) == ("efghij REF klmno.", True, True)


def test_no_terminators_keeps_clipped_window():
    text = "x" * 2000 + "REF" + "y" * 2000
    s = extract_snippet(text, 2000, 3)
    assert s.text == text[800:3203] and not s.trimmed_left and not s.trimmed_right
    assert len(s.text) == 2 * 1200 + 3


def test_match_at_file_start_clips():
    text = "REF then words" + " w" * 1000
    s = extract_snippet(text, 0, 3)
    assert s.text.startswith("REF") and not s.trimmed_left


def test_decimal_point_is_not_a_terminator():
    text = "pi is 3.14 and REF x"
    s = extract_snippet(text, text.index("REF"), 3, SnippetConfig(10, 10))
    assert not s.trimmed_left


def test_terminator_before_brace_counts():
    text = "\\emph{done.} REF x"
    s = extract_snippet(text, text.index("REF"), 3, SnippetConfig(20, 20))
    assert s.trimmed_left and s.text == "} REF x"


def test_bad_config():
    with pytest.raises(ValueError):
        SnippetConfig(10, 11)


def test_snippets_for_span_follows_labels():
    alg = "\\begin{algorithm}\\caption{X}\\label{alg:x}\\end{algorithm}"
    b = _bundle({"a.tex": alg + "\nAlgorithm \\ref{alg:x} sorts. Done.", "b.tex": "Nothing."})
    [s] = snippets_for_span(b, alg, "a.tex", (0, len(alg)))
    assert "\\ref{alg:x}" in s.text and s.source_path == "a.tex"


alphabet = st.sampled_from(list("ab .!?\n})3") + ["\\ref{x}", "é"])


@st.composite
def snippet_case(draw):
    text = "".join(draw(st.lists(alphabet, min_size=1, max_size=200)))
    offset = draw(st.integers(0, len(text) - 1))
    length = draw(st.integers(1, len(text) - offset))
    span = draw(st.integers(1, 60))
    bw = draw(st.integers(1, span))
    return text, offset, length, span, bw


@settings(max_examples=1000, deadline=None)
@given(snippet_case())
def test_snippet_matches_oracle(case):
    text, offset, length, span, bw = case
    s = extract_snippet(text, offset, length, SnippetConfig(span, bw))
    assert (s.text, s.trimmed_left, s.trimmed_right) == snippet_oracle(text, offset, length, span, bw)
    assert len(s.text) <= 2 * span + length
    assert text[offset : offset + length].strip() in s.text
