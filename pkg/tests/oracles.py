"""Independent reference implementations used to check the package.

Everything here is deliberately naive: plain loops, exhaustive enumeration,
and direct summation, sharing no code with the package internals beyond
numpy primitives.
"""

from __future__ import annotations

import itertools

import numpy as np

COMP = {0: 3, 1: 2, 2: 1, 3: 0}
LETTER = "ACGT"


def naive_parse_fasta(text: str) -> list[tuple[str, str]]:
    """Line-by-line FASTA reader keeping only ACGT letters (upper-cased)."""
    records: list[tuple[str, str]] = []
    header = None
    chunks: list[str] = []
    for line in text.splitlines():
        if line.startswith(">"):
            if header is not None:
                records.append((header, "".join(chunks)))
            header = line[1:].strip()
            chunks = []
        elif header is not None:
            chunks.append("".join(c for c in line.upper() if c in LETTER))
    if header is not None:
        records.append((header, "".join(chunks)))
    return records


def brute_palindromes(bases, min_half: int) -> list[tuple[int, int]]:
    """All (center, maximal half-length) pairs with half >= min_half.

    A center c pairs positions c - d + 1 and c + d for depths d = 1, 2, ...
    """
    b = list(bases)
    n = len(b)
    out = []
    for c in range(n - 1):
        h = 0
        while c - h >= 0 and c + 1 + h < n and b[c + 1 + h] == COMP[b[c - h]]:
            h += 1
        if h >= min_half:
            out.append((c, h))
    return out


def enum_markov_rate(pi, trans, half: int) -> float:
    """P(palindrome of half-length >= half at a center) by 4^half enumeration.

    Sums the stationary path probability of every length-2*half string whose
    right half mirrors the left half under complementation.
    """
    pi = np.asarray(pi, dtype=float)
    trans = np.asarray(trans, dtype=float)
    total = 0.0
    for left in itertools.product(range(4), repeat=half):
        full = list(left) + [COMP[x] for x in reversed(left)]
        prob = pi[full[0]]
        for a, b in zip(full[:-1], full[1:]):
            prob *= trans[a, b]
        total += prob
    return total


def start_weights(pi, trans) -> np.ndarray:
    """Probability that a center starts a palindrome run at each first letter.

    Entry i is pi_i minus the mass arriving through one extra mirrored pair,
    so that summing over run lengths telescopes back to pi.
    """
    pi = np.asarray(pi, dtype=float)
    t = quasi_matrix(trans)
    return pi - pi @ t


def quasi_matrix(trans) -> np.ndarray:
    trans = np.asarray(trans, dtype=float)
    t = np.empty((4, 4))
    for i in range(4):
        for j in range(4):
            t[i, j] = trans[i, j] * trans[COMP[j], COMP[i]]
    return t


def closure_vector(trans) -> np.ndarray:
    trans = np.asarray(trans, dtype=float)
    return np.array([trans[i, COMP[i]] for i in range(4)])


def enum_exact_length_patterns(pi, trans, k: int):
    """(probability, score-change factors) for every exact-half-length-k pattern.

    Yields (prob, prob) pairs: the exact-length path probability of the left
    half, usable both as weight and as the base of the log-rarity score.
    """
    v0 = start_weights(pi, trans)
    t = quasi_matrix(trans)
    close = closure_vector(trans)
    for left in itertools.product(range(4), repeat=k):
        prob = v0[left[0]]
        for a, b in zip(left[:-1], left[1:]):
            prob *= t[a, b]
        prob *= close[left[-1]]
        yield left, prob


def enum_exact_length_prob(pi, trans, k: int) -> float:
    return sum(p for _, p in enum_exact_length_patterns(pi, trans, k))


def enum_exact_length_mgf(pi, trans, min_half: int, k: int, t: float,
                          kind: str) -> float:
    """E[e^{t * score}; half-length exactly k] by 4^k pattern enumeration."""
    total = 0.0
    for _, prob in enum_exact_length_patterns(pi, trans, k):
        if kind == "pcs":
            score = 1.0
        elif kind == "pls":
            score = k / min_half
        elif kind == "bws":
            if prob == 0.0:
                continue
            score = -np.log(prob)
        else:
            raise ValueError(kind)
        total += prob * np.exp(t * score)
    return total


def series_mgf(pi, trans, min_half: int, t, kind: str,
               max_terms: int = 5000, rtol: float = 1e-14):
    """Score MGF as a truncated sum of exact-length terms over the rate.

    Exact-length terms for k beyond enumeration reach use the matrix form
    v(t)' Q(t)^{k-1} u(t) built directly here (entrywise powers for the
    log-rarity score), which is the series the closed-form kernel must match.
    Accepts a complex argument t.
    """
    v0 = start_weights(pi, trans)
    tq = quasi_matrix(trans)
    close = closure_vector(trans)
    if kind == "bws":
        expo = 1.0 - t
        base = np.where(v0 > 0, v0, 0.0)
        v = base.astype(complex) ** expo if np.iscomplex(t) else base**expo
        q = tq.astype(complex) ** expo if np.iscomplex(t) else tq**expo
        u = close.astype(complex) ** expo if np.iscomplex(t) else close**expo
    else:
        v, q, u = v0, tq, close

    rate = 0.0
    vec = v0 @ np.linalg.matrix_power(tq, min_half - 1)
    for k in range(min_half, min_half + max_terms):
        rate += float(vec @ close)
        vec = vec @ tq

    total = 0.0
    vec = v @ np.linalg.matrix_power(q.astype(v.dtype), min_half - 1)
    for k in range(min_half, min_half + max_terms):
        term = vec @ u
        if kind == "pcs":
            term *= np.exp(t)
        elif kind == "pls":
            term *= np.exp(t * k / min_half)
        total += term
        if k > min_half + 4 and abs(term) < rtol * abs(total):
            break
        vec = vec @ q
    return total / rate


def window_sums(events: list[tuple[int, float]], window: int,
                total_length: int) -> np.ndarray:
    """Quadratic re-summation of windowed scores.

    Window t covers centers c with t + 1 <= c <= t + window.
    """
    values = np.zeros(total_length - window + 1)
    for t in range(total_length - window + 1):
        acc = 0.0
        for center, score in events:
            if t + 1 <= center <= t + window:
                acc += score
        values[t] = acc
    return values


def iid_match_gamma(pi) -> float:
    pi = np.asarray(pi, dtype=float)
    return 2.0 * (pi[0] * pi[3] + pi[1] * pi[2])


def random_model(rng: np.random.Generator):
    """A random valid stationary first-order model as (pi, trans)."""
    trans = rng.random((4, 4)) + 0.05
    trans /= trans.sum(axis=1, keepdims=True)
    vals, vecs = np.linalg.eig(trans.T)
    idx = int(np.argmin(np.abs(vals - 1.0)))
    pi = np.abs(np.real(vecs[:, idx]))
    pi /= pi.sum()
    return pi, trans
