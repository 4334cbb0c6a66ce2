"""
Recovering known topics with LDA
================================

Documents are sampled from three disjoint vocabularies. A three-topic model
should put each vocabulary into its own topic, which is easy to see from the
top words.

Run with ``python3 demos/topics_synthetic.py``.
"""
from __future__ import annotations

import numpy as np

from pseudomine import build_dtm, fit_lda, top_words, tokenize_and_filter

rng = np.random.default_rng(3)

vocabularies = [
    "graph node edge tree path vertex spanning shortest neighbor depth".split(),
    "loss gradient batch epoch weight layer training optimizer learning rate".split(),
    "matrix vector sparse solve rank eigenvalue factorization pivot column row".split(),
]

# %%
# Each document mixes the vocabularies with Dirichlet(0.1) proportions, so
# most documents lean heavily on one of them.

texts = []
for _ in range(300):
    theta = rng.dirichlet([0.1] * 3)
    topic = rng.choice(3, size=40, p=theta)
    texts.append(" ".join(rng.choice(vocabularies[k]) for k in topic))

docs = [tokenize_and_filter(t) for t in texts]
print("first document after tokenising and stemming:", docs[0][:12])

# %%
# The TF-IDF step fixes the vocabulary; LDA then runs on raw counts.

dtm = build_dtm(docs, max_df=0.85, min_df=0.0002)
print(f"{dtm.n_docs} documents, {len(dtm.vocabulary)} terms")

model = fit_lda(dtm, num_topics=3, seed=0, iterations=300)
for k, words in enumerate(top_words(model, 5)):
    print(f"topic {k}: {', '.join(words)}")

print("row sums:", model.topic_word.sum(axis=1))
