"""Topic analysis of reference snippets: tokenise, stem, TF-IDF, LDA.

The TF-IDF matrix decides which stems are kept; LDA is fitted on raw counts
over that vocabulary.
"""
from __future__ import annotations

import csv
import io
import json
import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from nltk.stem import PorterStemmer
from scipy import sparse
from sklearn.feature_extraction.text import ENGLISH_STOP_WORDS

log = logging.getLogger(__name__)

NON_INSTRUCTIVE_WORDS = frozenset({"use", "employ", "indicate"})
MIN_YEAR = 2010

_WORD = re.compile(r"[^\W\d_]+")
_stemmer = PorterStemmer()


@lru_cache(maxsize=200_000)
def stem(word: str) -> str:
    return _stemmer.stem(word)


@dataclass(frozen=True)
class TokenizerConfig:
    stopwords: frozenset[str] = frozenset(ENGLISH_STOP_WORDS)
    non_instructive: frozenset[str] = NON_INSTRUCTIVE_WORDS
    min_token_length: int = 2

    def __post_init__(self):
        object.__setattr__(self, "stopwords", frozenset(w.lower() for w in self.stopwords))
        object.__setattr__(self, "non_instructive", frozenset(w.lower() for w in self.non_instructive))
        if self.min_token_length < 1:
            raise ValueError("min_token_length must be positive")


def tokenize_and_filter(text: str, cfg: TokenizerConfig = TokenizerConfig()) -> list[str]:
    """Lowercase alphabetic tokens, stop/non-instructive words removed, then stemmed."""
    drop = cfg.stopwords | cfg.non_instructive
    out = []
    for word in _WORD.findall(text.lower()):
        if word in drop:
            continue
        s = stem(word)
        if len(s) >= cfg.min_token_length:
            out.append(s)
    return out


# --------------------------------------------------------------------------
# TF-IDF

@dataclass
class DocumentTermMatrix:
    vocabulary: list[str]
    doc_ids: list
    weights: sparse.csr_matrix  # L2-normalised TF-IDF, docs x terms
    counts: sparse.csr_matrix  # raw term counts over the same vocabulary
    doc_freq: np.ndarray

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)


def _exact(x: float) -> Fraction:
    # decimal reading of the threshold: 0.85 means 17/20, not the nearest double
    return Fraction(repr(float(x)))


def build_dtm(
    docs: Sequence[Sequence[str]],
    max_df: float = 0.85,
    min_df: float = 0.0002,
    doc_ids: Sequence | None = None,
) -> DocumentTermMatrix:
    """TF-IDF over the terms whose document fraction lies in ``[min_df, max_df]``.

    ``weight(d, t) = tf(d, t) * (ln((1 + N) / (1 + df(t))) + 1)``, each row then
    scaled to unit length. Documents with no retained term keep a zero row.
    """
    n = len(docs)
    if n == 0:
        raise ValueError("build_dtm needs at least one document")
    if not 0 <= min_df <= max_df <= 1:
        raise ValueError("need 0 <= min_df <= max_df <= 1")
    doc_ids = list(range(n)) if doc_ids is None else list(doc_ids)

    df: dict[str, int] = {}
    for doc in docs:
        for term in set(doc):
            df[term] = df.get(term, 0) + 1
    lo, hi = _exact(min_df), _exact(max_df)
    vocabulary = sorted(t for t, c in df.items() if lo <= Fraction(c, n) <= hi)
    if not vocabulary:
        raise ValueError(
            f"no term survives document-frequency filtering (min_df={min_df}, max_df={max_df}, N={n}); "
            "relax the thresholds"
        )
    col = {t: j for j, t in enumerate(vocabulary)}

    rows, cols, vals = [], [], []
    for i, doc in enumerate(docs):
        tf: dict[int, int] = {}
        for term in doc:
            j = col.get(term)
            if j is not None:
                tf[j] = tf.get(j, 0) + 1
        for j in sorted(tf):
            rows.append(i)
            cols.append(j)
            vals.append(tf[j])
    shape = (n, len(vocabulary))
    counts = sparse.csr_matrix((np.array(vals, dtype=np.float64), (rows, cols)), shape=shape)
    doc_freq = np.array([df[t] for t in vocabulary], dtype=np.int64)
    idf = np.log((1.0 + n) / (1.0 + doc_freq)) + 1.0

    weights = counts.multiply(idf[None, :]).tocsr()
    norms = np.sqrt(np.asarray(weights.multiply(weights).sum(axis=1)).ravel())
    norms[norms == 0] = 1.0
    weights = sparse.diags(1.0 / norms) @ weights
    return DocumentTermMatrix(vocabulary, doc_ids, weights.tocsr(), counts.astype(np.int64).tocsr(), doc_freq)


# --------------------------------------------------------------------------
# LDA

@dataclass
class TopicModel:
    vocabulary: list[str]
    topic_word: np.ndarray  # K x V
    doc_topic: np.ndarray  # D x K
    seed: int
    alpha: float
    beta: float
    iterations: int

    @property
    def num_topics(self) -> int:
        return self.topic_word.shape[0]

    def to_json(self) -> dict:
        return {
            "vocabulary": self.vocabulary,
            "topic_word": self.topic_word.tolist(),
            "doc_topic": self.doc_topic.tolist(),
            "seed": self.seed,
            "num_topics": self.num_topics,
            "alpha": self.alpha,
            "beta": self.beta,
            "iterations": self.iterations,
        }


def _normalise_rows(m: np.ndarray) -> np.ndarray:
    return m / m.sum(axis=1, keepdims=True)


def fit_lda(
    counts,
    num_topics: int = 10,
    seed: int = 0,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    vocabulary: Sequence[str] | None = None,
) -> TopicModel:
    """Collapsed Gibbs LDA over a document-term count matrix.

    ``counts`` may be a :class:`DocumentTermMatrix` (its counts and vocabulary
    are used) or any dense/sparse integer matrix. ``alpha`` defaults to
    ``50 / num_topics``. Output is bit-identical for identical arguments.
    """
    from ._gibbs import run_sampler

    if isinstance(counts, DocumentTermMatrix):
        vocabulary = counts.vocabulary if vocabulary is None else vocabulary
        counts = counts.counts
    if num_topics < 2:
        raise ValueError("num_topics must be at least 2")
    counts = sparse.csr_matrix(counts)
    n_docs, n_words = counts.shape
    if n_docs == 0 or n_words == 0:
        raise ValueError("fit_lda needs a non-empty corpus")
    if num_topics > n_docs:
        log.warning("num_topics=%d exceeds the number of documents (%d)", num_topics, n_docs)
    if iterations < 1:
        raise ValueError("iterations must be positive")
    alpha = 50.0 / num_topics if alpha is None else float(alpha)
    vocabulary = [str(j) for j in range(n_words)] if vocabulary is None else list(vocabulary)

    coo = counts.tocoo()
    order = np.lexsort((coo.col, coo.row))
    reps = coo.data[order].astype(np.int64)
    if np.any(reps < 0):
        raise ValueError("counts must be non-negative")
    docs = np.repeat(coo.row[order].astype(np.int64), reps)
    words = np.repeat(coo.col[order].astype(np.int64), reps)

    if words.size:
        ndk, nkw = run_sampler(words, docs, n_docs, n_words, num_topics, alpha, beta, iterations, seed)
    else:
        ndk = np.zeros((n_docs, num_topics), dtype=np.int64)
        nkw = np.zeros((num_topics, n_words), dtype=np.int64)
    topic_word = _normalise_rows(nkw + beta)
    doc_topic = _normalise_rows(ndk + alpha)
    return TopicModel(vocabulary, topic_word, doc_topic, seed, alpha, beta, iterations)


def top_words(model: TopicModel, k: int = 5) -> list[list[str]]:
    """Per topic, the ``k`` most probable terms; ties go to the smaller term."""
    if k < 1:
        raise ValueError("k must be at least 1")
    vocab = model.vocabulary
    out = []
    for row in model.topic_word:
        ranked = sorted(range(len(vocab)), key=lambda j: (-row[j], vocab[j]))
        out.append([vocab[j] for j in ranked[:k]])
    return out


# --------------------------------------------------------------------------
# per-year clustering

@dataclass
class YearTopics:
    year: int
    model: TopicModel
    dtm: DocumentTermMatrix
    words: list[list[str]] = field(default_factory=list)


def cluster_by_year(
    snippets: Iterable[tuple[int | None, str]],
    num_topics: int = 10,
    seed: int = 0,
    *,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 1000,
    top_k: int = 5,
    max_df: float = 0.85,
    min_df: float = 0.0002,
    min_year: int = MIN_YEAR,
    tokenizer: TokenizerConfig = TokenizerConfig(),
) -> dict[int, YearTopics]:
    """Fit one independent topic model per year from ``min_year`` onward.

    Years with fewer than ``num_topics`` snippets, or whose vocabulary is
    filtered away entirely, are skipped with a warning.
    """
    by_year: dict[int, list[str]] = {}
    for year, text in snippets:
        if year is None or year < min_year:
            continue
        by_year.setdefault(int(year), []).append(text)

    result = {}
    for year in sorted(by_year):
        texts = by_year[year]
        if len(texts) < num_topics:
            log.warning("year %d: %d snippets < %d topics, skipped", year, len(texts), num_topics)
            continue
        docs = [tokenize_and_filter(t, tokenizer) for t in texts]
        try:
            dtm = build_dtm(docs, max_df=max_df, min_df=min_df)
        except ValueError as exc:
            log.warning("year %d skipped: %s", year, exc)
            continue
        model = fit_lda(dtm, num_topics=num_topics, seed=seed, alpha=alpha, beta=beta, iterations=iterations)
        result[year] = YearTopics(year, model, dtm, top_words(model, top_k))
    return result


def topic_table(result: dict[int, YearTopics], top_k: int = 5) -> list[list]:
    """Rows ``[year, cluster, word1..wordk]``; short topics padded with ''."""
    rows = []
    for year in sorted(result):
        for cluster, words in enumerate(result[year].words):
            rows.append([year, cluster] + list(words[:top_k]) + [""] * (top_k - len(words[:top_k])))
    return rows


def topic_table_csv(result: dict[int, YearTopics], top_k: int = 5) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["year", "cluster"] + [f"word{i}" for i in range(1, top_k + 1)])
    writer.writerows(topic_table(result, top_k))
    return buf.getvalue()


def model_json(model: TopicModel) -> str:
    return json.dumps(model.to_json(), indent=1) + "\n"
