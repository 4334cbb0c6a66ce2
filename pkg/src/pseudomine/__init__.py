"""Pseudocode mining for arXiv-style LaTeX source corpora.

Stages, each in its own module:

    corpus      unpack archives, pair sources with PDF text, read metadata
    detector    algorithm-environment and indicative-keyword detection
    extractor   algorithm spans, referenced supplements, JSON records
    references  label -> reference search and sentence-trimmed snippets
    cleaner     LaTeX-to-prose cleanup of snippets
    topics      tokenise/stem, TF-IDF, per-year LDA
    analytics   corpus statistics, sampling, FPR/FNR validation
    pipeline    stage orchestration used by the ``pseudomine`` CLI
"""
from .analytics import (
    CorpusStats,
    ValidationLabel,
    ValidationReport,
    compute_confusion,
    compute_stats,
    indicative_crosscheck,
    sample_uniform,
)
from .cleaner import CleaningRules, clean
from .corpus import (
    PaperBundle,
    PaperMetadata,
    SourceFile,
    load_corpus,
    pair_by_identifier,
    parse_metadata,
    unpack_archives,
)
from .detector import DetectionResult, KeywordHit, detect_indicative_keywords, detect_latex_algorithm
from .extractor import (
    PseudocodeRecord,
    PseudocodeSpan,
    SupplementRecord,
    emit_record,
    extract_bundle,
    extract_pseudocode,
    extract_referenced_content,
)
from .references import (
    ReferenceSnippet,
    SnippetConfig,
    extract_snippet,
    find_labels,
    generate_ref_patterns,
    locate_references,
    snippets_for_span,
)
from .topics import (
    DocumentTermMatrix,
    TokenizerConfig,
    TopicModel,
    build_dtm,
    cluster_by_year,
    fit_lda,
    tokenize_and_filter,
    top_words,
)

__version__ = "0.1.0"
