"""
False positive and false negative rates
=======================================

A thousand papers are labelled by hand, 101 of them containing pseudocode.
The detector misses 34 of the positives and wrongly flags 5 negatives. The
rates use each class's own size as denominator.

Run with ``python3 demos/validation_rates.py``.
"""
from __future__ import annotations

from pseudomine import ValidationLabel, compute_confusion, indicative_crosscheck, sample_uniform

population = [f"2101.{i:05d}" for i in range(20_000)]
sampled = sample_uniform(population, 1000, seed=11)
print("sampled", len(sampled), "papers, first three:", sampled[:3])

# %%
# Pretend the first 101 sampled papers turned out to contain pseudocode.

labels = [ValidationLabel(pid, i < 101) for i, pid in enumerate(sampled)]
predicted = {lab.arxiv_id: lab.has_pseudocode for lab in labels}
for lab in labels[:34]:
    predicted[lab.arxiv_id] = False
for lab in labels[101:106]:
    predicted[lab.arxiv_id] = True

report = compute_confusion(labels, predicted)
print(report)
print(f"FNR {report.fnr:.5f} -> {report.fnr_percent}%   FPR {report.fpr:.5f} -> {report.fpr_percent}%")

# %%
# Keyword presence against the labels, as a 2x2 table.

has_keywords = {lab.arxiv_id: False for lab in labels}
for lab in labels[:75] + labels[101:121]:
    has_keywords[lab.arxiv_id] = True
for (label, kw), n in indicative_crosscheck(labels, has_keywords).items():
    print(f"pseudocode={label} keywords={kw}: {n}")
