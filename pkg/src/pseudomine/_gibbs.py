"""Collapsed Gibbs sweep for LDA, compiled with numba.

Kept apart from ``topics`` so the pure-Python parts import without paying
numba's compile cost.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def gibbs_sweep(words, docs, z, ndk, nkw, nk, alpha, beta, vbeta, uniforms, p):
    """One in-order pass over all tokens, resampling each topic assignment.

    ``uniforms`` holds one U[0,1) draw per token; all count arrays are updated
    in place.
    """
    n_topics = nk.shape[0]
    for i in range(words.shape[0]):
        w = words[i]
        d = docs[i]
        k = z[i]
        ndk[d, k] -= 1
        nkw[k, w] -= 1
        nk[k] -= 1
        total = 0.0
        for t in range(n_topics):
            total += (ndk[d, t] + alpha) * (nkw[t, w] + beta) / (nk[t] + vbeta)
            p[t] = total
        u = uniforms[i] * total
        k = 0
        while k < n_topics - 1 and p[k] <= u:
            k += 1
        z[i] = k
        ndk[d, k] += 1
        nkw[k, w] += 1
        nk[k] += 1


def run_sampler(words, docs, n_docs, n_words, n_topics, alpha, beta, iterations, seed):
    """Seeded initialisation followed by ``iterations`` sweeps.

    Returns the final doc-topic and topic-word count matrices.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    z = rng.integers(0, n_topics, size=words.shape[0]).astype(np.int64)
    ndk = np.zeros((n_docs, n_topics), dtype=np.int64)
    nkw = np.zeros((n_topics, n_words), dtype=np.int64)
    np.add.at(ndk, (docs, z), 1)
    np.add.at(nkw, (z, words), 1)
    nk = nkw.sum(axis=1)
    p = np.empty(n_topics, dtype=np.float64)
    for _ in range(iterations):
        uniforms = rng.random(words.shape[0])
        gibbs_sweep(words, docs, z, ndk, nkw, nk, float(alpha), float(beta), float(n_words * beta), uniforms, p)
    return ndk, nkw
