import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudomine.corpus import PaperBundle, PaperMetadata, SourceFile, load_corpus, unpack_archives
from pseudomine.detector import detect_latex_algorithm
from pseudomine.extractor import (
    PseudocodeRecord,
    emit_record,
    extract_bundle,
    extract_pseudocode,
    extract_referenced_content,
    read_record,
)


def test_single_environment_exact_body():
    text = "intro \\begin{algorithm}\\caption{A} x←0 \\end{algorithm} outro"
    [s] = extract_pseudocode(text)
    assert s.body == "\\caption{A} x←0 "
    assert s.raw == "\\begin{algorithm}\\caption{A} x←0 \\end{algorithm}"
    assert text[s.start_offset : s.end_offset] == s.raw
    assert s.start_offset == 6 and not s.starred and s.nesting_depth_seen == 1


def test_two_environments_in_order():
    text = "\\begin{algorithm}A\\end{algorithm} mid \\begin{algorithm*}B\\end{algorithm*}"
    spans = extract_pseudocode(text)
    assert [s.body for s in spans] == ["A", "B"]
    assert [s.starred for s in spans] == [False, True]


def test_nested_environment():
    # depth counter on this input: 1, 2, back to 1, back to 0 -> one span, max depth 2
    text = "\\begin{algorithm}outer \\begin{algorithm}inner\\end{algorithm} tail\\end{algorithm}"
    [s] = extract_pseudocode(text)
    assert s.raw == text and s.nesting_depth_seen == 2


def test_comment_kept_in_body_but_not_matched():
    text = "\\begin{algorithm}\nx % \\end{algorithm} fake\ny\n\\end{algorithm}"
    [s] = extract_pseudocode(text)
    assert "% \\end{algorithm} fake" in s.body
    assert s.raw == text


def test_dangling_begin_dropped(caplog):
    text = "\\begin{algorithm}ok\\end{algorithm}\n\\begin{algorithm}never closed"
    spans = extract_pseudocode(text, "a.tex")
    assert len(spans) == 1
    assert "offset 35" in caplog.text


def test_complete_environment_inside_dangling_one_survives():
    text = "\\begin{algorithm} open \\begin{algorithm}B\\end{algorithm}"
    [s] = extract_pseudocode(text)
    assert s.body == "B"


def test_options_kept_in_raw():
    [s] = extract_pseudocode("\\begin{algorithm}[H]x\\end{algorithm}")
    assert s.raw.startswith("\\begin{algorithm}[H]") and s.body == "[H]x"


def _bundle(files):
    return PaperBundle(PaperMetadata("1901.00123", year=2019, category="cs.LG"),
                       [SourceFile(p, t, "utf-8") for p, t in sorted(files.items())])


def test_equation_supplement_from_other_file():
    b = _bundle({
        "alg.tex": "\\begin{algorithm}minimise \\eqref{eq:loss}\\end{algorithm}",
        "eqs.tex": "Text.\n\\begin{equation}\\label{eq:loss}E=mc^2\\end{equation}\n",
    })
    [span] = extract_bundle(b)
    [sup] = extract_referenced_content(span, b)
    assert (sup.label, sup.environment, sup.source_path) == ("eq:loss", "equation", "eqs.tex")
    assert "E=mc^2" in sup.content and sup.content.startswith("\\begin{equation}")


def test_no_references_no_supplements():
    b = _bundle({"a.tex": "\\begin{algorithm}x\\end{algorithm}"})
    [span] = extract_bundle(b)
    assert extract_referenced_content(span, b) == []


def test_paragraph_supplement():
    # the label sits in prose; the record is the blank-line-delimited block around it
    intro = "\\begin{document}\nFirst para.\n\n\\section{Intro}\\label{sec:intro}\nWe study graphs.\nMore text.\n\nLast.\n\\end{document}\n"
    b = _bundle({"a.tex": "\\begin{algorithm}see \\ref{sec:intro}\\end{algorithm}", "intro.tex": intro})
    [span] = extract_bundle(b)
    [sup] = extract_referenced_content(span, b)
    assert sup.environment == "paragraph"
    assert sup.content == "\\section{Intro}\\label{sec:intro}\nWe study graphs.\nMore text."


def test_innermost_environment_wins():
    text = "\\begin{align}\\begin{split}a\\label{eq:in}\\end{split}\\end{align}\n\\begin{algorithm}\\ref{eq:in}\\end{algorithm}"
    b = _bundle({"a.tex": text})
    [span] = extract_bundle(b)
    [sup] = extract_referenced_content(span, b)
    assert sup.environment == "split"


def test_missing_label_warns(caplog):
    b = _bundle({"a.tex": "\\begin{algorithm}\\ref{nowhere}\\end{algorithm}"})
    [span] = extract_bundle(b)
    assert extract_referenced_content(span, b) == []
    assert "nowhere" in caplog.text


def test_duplicate_and_multi_label_references():
    b = _bundle({
        "a.tex": "\\begin{algorithm}\\eqref{e1} \\ref{e1} \\cref{e1,e2}\\end{algorithm}",
        "b.tex": "\\begin{equation}\\label{e1}1\\end{equation}\n\\begin{equation}\\label{e2}2\\end{equation}",
    })
    [span] = extract_bundle(b)
    assert [s.label for s in extract_referenced_content(span, b)] == ["e1", "e2"]


def test_self_reference_to_line_label_skipped(caplog):
    b = _bundle({"a.tex": "\\begin{algorithm}\\State x \\label{line:1}\\State goto \\ref{line:1}\\end{algorithm}"})
    [span] = extract_bundle(b)
    assert extract_referenced_content(span, b) == []
    assert "line:1" not in caplog.text


def test_emit_record_paths_and_roundtrip(tmp_path):
    b = _bundle({"a.tex": "\\begin{algorithm}A\\end{algorithm}\\begin{algorithm*}B\\end{algorithm*}"})
    spans = extract_bundle(b)
    paths = [emit_record(s, [], b.metadata, tmp_path / "out", i) for i, s in enumerate(spans)]
    assert paths == [tmp_path / "out" / "1901.00123" / "0.json", tmp_path / "out" / "1901.00123" / "1.json"]
    data = json.loads(paths[1].read_text())
    assert list(data) == ["arxiv_id", "year", "title", "category", "subcategory", "pseudocode", "supplements",
                          "reference_snippets", "source_path", "span", "starred"]
    assert data["pseudocode"] == "\\begin{algorithm*}B\\end{algorithm*}" and data["starred"] is True
    rec = read_record(paths[0])
    assert rec.to_json() == PseudocodeRecord.from_json(json.loads(paths[0].read_text())).to_json()
    assert rec.span == (spans[0].start_offset, spans[0].end_offset) and rec.year == 2019
    assert not list((tmp_path / "out" / "1901.00123").glob(".*"))  # no temp files left


def test_emit_record_unwritable(tmp_path):
    b = _bundle({"a.tex": "\\begin{algorithm}A\\end{algorithm}"})
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        emit_record(extract_bundle(b)[0], [], b.metadata, blocker, 0)


def test_fixture_counts_agree_with_detector(truth):
    from conftest import FIXTURES

    for b in load_corpus(FIXTURES / "corpus"):
        assert detect_latex_algorithm(b).tag_count == len(extract_bundle(b)), b.arxiv_id


def test_extraction_is_pure():
    from conftest import FIXTURES

    [b] = [x for x in load_corpus(FIXTURES / "corpus") if x.arxiv_id == "0801.1000"]
    assert extract_bundle(b) == extract_bundle(b)


fragments = st.sampled_from([
    "\\begin{algorithm}", "\\end{algorithm}", "\\begin{algorithm*}", "\\end{algorithm*}",
    "% ", "\n", "x", "\\%", "\\begin{figure}", "\\end{figure}", "é",
])


@settings(max_examples=400, deadline=None)
@given(st.lists(fragments, max_size=25).map("".join))
def test_span_roundtrip_and_count_agreement(text):
    spans = extract_pseudocode(text)
    for s in spans:
        assert text[s.start_offset : s.end_offset] == s.raw
        assert s.raw.startswith("\\begin") and s.raw.rstrip().endswith("}")
        assert s.body in s.raw and len(s.body) < len(s.raw)
    starts = [s.start_offset for s in spans]
    assert starts == sorted(starts)
    for a, b in zip(spans, spans[1:]):
        assert a.end_offset <= b.start_offset
    b = PaperBundle(PaperMetadata("p"), [SourceFile("a.tex", text, "utf-8")])
    assert detect_latex_algorithm(b).tag_count == len(spans)


def test_fixture_extraction_matches_truth(corpus_copy, truth):
    unpack_archives(corpus_copy / "sources")
    for b in load_corpus(corpus_copy):
        expected = truth["papers"][b.arxiv_id]["spans"]
        got = extract_bundle(b)
        assert [(s.source_path, s.start_offset, s.end_offset, s.raw, s.starred, s.nesting_depth_seen) for s in got] == [
            (e["path"], e["start"], e["end"], e["raw"], e["starred"], e["nesting_depth"]) for e in expected
        ], b.arxiv_id
        for s, e in zip(got, expected):
            sups = extract_referenced_content(s, b)
            assert [(x.label, x.environment, x.source_path) for x in sups] == [
                (x["label"], x["environment"], x["source_path"]) for x in e["supplements"]
            ], (b.arxiv_id, e["label"])
