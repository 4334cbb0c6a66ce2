"""
Extracting pseudocode from a LaTeX bundle
=========================================

A small two-file paper is built in memory, its algorithm environment is
pulled out together with the equation it references, and the prose that
points back at the algorithm is cut into a snippet and cleaned.

Run with ``python3 demos/extract_walkthrough.py``.
"""
from __future__ import annotations

from pseudomine import (
    PaperBundle,
    PaperMetadata,
    SnippetConfig,
    SourceFile,
    clean,
    detect_indicative_keywords,
    detect_latex_algorithm,
    extract_bundle,
    extract_referenced_content,
    snippets_for_span,
)

# %%
# A paper split across a main file and a methods file.

main_tex = r"""\documentclass{article}
\begin{document}
We train with a simple loop. Algorithm~\ref{alg:sgd} lists the steps and
converges in practice after a few epochs. % a remark nobody should see
The pseudocode in Algorithm 1 of the appendix is equivalent.
\input{methods}
\end{document}
"""

methods_tex = r"""\section{Method}
The objective is
\begin{equation}\label{eq:loss}
L(\theta) = \sum_i \ell(x_i; \theta)
\end{equation}
\begin{algorithm}[t]
\caption{SGD}\label{alg:sgd}
\begin{algorithmic}[1]
\For{each batch $B$}
  \State $\theta \gets \theta - \eta \nabla$ \eqref{eq:loss}
\EndFor
\end{algorithmic}
\end{algorithm}
"""

bundle = PaperBundle(
    PaperMetadata("2101.00001", year=2021, title="A toy paper", category="cs.LG"),
    [SourceFile("main.tex", main_tex, "utf-8"), SourceFile("methods.tex", methods_tex, "utf-8")],
)

# %%
# Detection looks only at uncommented LaTeX; keyword search runs on any text.

print(detect_latex_algorithm(bundle))
for hit in detect_indicative_keywords(main_tex):
    print("keyword:", hit)

# %%
# Each outermost algorithm environment becomes one span. Labels referenced
# from inside it are resolved to their enclosing environment.

[span] = extract_bundle(bundle)
print(f"\n{span.source_path} [{span.start_offset}:{span.end_offset}] starred={span.starred}")
print(span.raw)
for sup in extract_referenced_content(span, bundle):
    print(f"\nsupplement {sup.label} ({sup.environment} in {sup.source_path}):\n{sup.content}")

# %%
# References to the algorithm's own label, anywhere in the bundle, give the
# reference snippets. A small window makes the sentence trimming visible.

cfg = SnippetConfig(span_chars=80, boundary_window=40)
for snip in snippets_for_span(bundle, span.raw, span.source_path, (span.start_offset, span.end_offset), cfg):
    print(f"\nraw snippet (trimmed left={snip.trimmed_left}, right={snip.trimmed_right}):\n{snip.text!r}")
    print("cleaned:", clean(snip.text))
