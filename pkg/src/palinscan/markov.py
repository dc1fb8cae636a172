"""First-order Markov models of DNA and palindrome occurrence rates.

A model is a base-composition vector ``pi`` plus a row-stochastic 4x4
transition matrix ``trans`` over the alphabet A=0, C=1, G=2, T=3. The chance
that a palindrome of half-length ``h`` sits at a given centre works out to a
matrix product: entry (i, j) of the quasi transition matrix is the chance of
stepping i -> j on the leading strand times the chance of the mirrored step
comp(j) -> comp(i) on the lagging strand, and the rate is the composition
vector pushed through ``h - 1`` such steps and closed off with a
complementary centre pair.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import EstimationError
from .numeric import mat_pow
from .seqio import DnaSeq

PROB_ATOL = 1e-6

# Base composition and transition frequencies of the bovine herpes virus 1
# reference genome (135,301 bp), rounded to four decimals; rows are
# renormalised on construction since the rounding leaves sums off by 1e-4.
BOHV1_GENOME_LENGTH = 135_301
_BOHV1_PI = (0.1354, 0.3588, 0.3654, 0.1404)
_BOHV1_TRANS = (
    (0.1854, 0.3288, 0.3556, 0.1303),
    (0.1258, 0.2932, 0.4347, 0.1463),
    (0.1343, 0.4512, 0.2994, 0.1151),
    (0.1141, 0.3151, 0.3695, 0.2012),
)


@dataclass(frozen=True)
class MarkovModel:
    """Base composition plus first-order transition probabilities.

    Attributes:
        pi: shape (4,) probability vector over A, C, G, T.
        trans: shape (4, 4) row-stochastic matrix; trans[i, j] is the
            probability that base j follows base i.
    """

    pi: np.ndarray
    trans: np.ndarray

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        trans = np.asarray(self.trans, dtype=float)
        if pi.shape != (4,) or trans.shape != (4, 4):
            raise ValueError("pi must have shape (4,) and trans shape (4, 4)")
        if np.any(pi < 0) or np.any(trans < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(pi.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"pi sums to {pi.sum()!r}, not 1")
        rows = trans.sum(axis=1)
        if np.any(np.abs(rows - 1.0) > PROB_ATOL):
            raise ValueError(f"transition rows sum to {rows!r}, not 1")
        pi.flags.writeable = False
        trans.flags.writeable = False
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "trans", trans)

    @classmethod
    def from_unnormalized(cls, pi, trans) -> "MarkovModel":
        """Build a model from near-stochastic inputs by rescaling rows."""
        pi = np.asarray(pi, dtype=float)
        trans = np.asarray(trans, dtype=float)
        return cls(pi=pi / pi.sum(), trans=trans / trans.sum(axis=1, keepdims=True))


@dataclass(frozen=True)
class RateEstimate:
    """A per-position palindrome occurrence rate.

    Attributes:
        value: probability that a palindrome of the given half-length (or
            longer) is centred at a fixed position.
        method: "markov" or "iid", naming the null model used.
        half_length: minimum half-length counted as an occurrence.
    """

    value: float
    method: str
    half_length: int


def estimate_model(seq: DnaSeq, pseudocount: float = 0.0) -> MarkovModel:
    """Fit composition and transition frequencies to a sequence.

    Args:
        seq: sequence to fit.
        pseudocount: added to every base count and every transition count
            before normalising, to keep rare rows away from zero.

    Raises:
        EstimationError: fewer than two bases, or (with zero pseudocount) a
            base that never occurs, leaving its transition row undefined.
    """
    if pseudocount < 0:
        raise ValueError("pseudocount must be non-negative")
    b = seq.bases
    if b.size < 2:
        raise EstimationError("need at least two bases to estimate transitions")
    base_counts = np.bincount(b, minlength=4).astype(float)
    pair_counts = (
        np.bincount(b[:-1].astype(np.intp) * 4 + b[1:], minlength=16)
        .reshape(4, 4)
        .astype(float)
    )
    row_totals = pair_counts.sum(axis=1)
    if pseudocount == 0.0 and np.any(row_totals == 0):
        missing = "".join("ACGT"[i] for i in np.flatnonzero(row_totals == 0))
        raise EstimationError(
            f"no transitions out of {missing}; use a positive pseudocount"
        )
    pi = (base_counts + pseudocount) / (b.size + 4.0 * pseudocount)
    trans = (pair_counts + pseudocount) / (
        (row_totals + 4.0 * pseudocount)[:, None]
    )
    return MarkovModel(pi=pi, trans=trans)


def iid_model(pi) -> MarkovModel:
    """Model with independent draws from a fixed composition."""
    pi = np.asarray(pi, dtype=float)
    return MarkovModel(pi=pi, trans=np.tile(pi, (4, 1)))


def bohv1_model() -> MarkovModel:
    """The published bovine herpes virus 1 model (rows renormalised)."""
    return MarkovModel.from_unnormalized(_BOHV1_PI, _BOHV1_TRANS)


def quasi_transition_matrix(model: MarkovModel) -> np.ndarray:
    """Joint leading/lagging-strand step matrix.

    Entry (i, j) is trans[i, j] * trans[comp(j), comp(i)], the probability of
    extending a palindrome outward by one position on both strands at once.
    Its row sums fall below 1, so powers of it decay at the rate palindromes
    become rarer with length.
    """
    p = model.trans
    return p * p[::-1, ::-1].T


def center_pair_probs(model: MarkovModel) -> np.ndarray:
    """Probability of each base being followed by its complement.

    Component i is trans[i, comp(i)], which closes the innermost pair of a
    palindrome.
    """
    return np.diag(model.trans[:, ::-1]).copy()


def markov_rate(model: MarkovModel, half_length: int) -> RateEstimate:
    """Per-position rate of palindromes of at least the given half-length.

    Computed exactly as pi' T^(h-1) c, where T is the quasi transition
    matrix and c the centre-pair closure vector.
    """
    if half_length < 1:
        raise ValueError("half_length must be >= 1")
    t = quasi_transition_matrix(model)
    value = float(
        model.pi @ mat_pow(t, half_length - 1) @ center_pair_probs(model)
    )
    return RateEstimate(value=value, method="markov", half_length=half_length)


def iid_match_prob(pi) -> float:
    """Chance that two independent draws from pi are complementary."""
    pi = np.asarray(pi, dtype=float)
    return float(2.0 * (pi[0] * pi[3] + pi[1] * pi[2]))


def iid_rate(pi, half_length: int) -> RateEstimate:
    """Per-position palindrome rate when bases are independent draws from pi."""
    if half_length < 1:
        raise ValueError("half_length must be >= 1")
    gamma = iid_match_prob(pi)
    return RateEstimate(
        value=float(gamma**half_length), method="iid", half_length=half_length
    )


def stationary(model: MarkovModel) -> np.ndarray:
    """Stationary composition of the transition matrix."""
    vals, vecs = np.linalg.eig(model.trans.T)
    k = int(np.argmin(np.abs(vals - 1.0)))
    v = np.real(vecs[:, k])
    v = np.abs(v)
    return v / v.sum()


def stationary_gap(model: MarkovModel) -> float:
    """Largest absolute difference between pi and the stationary composition.

    A large gap means the model's composition vector is not self-consistent
    with its transition matrix, so rate formulas that anchor the first base
    at pi describe a chain started from pi rather than an equilibrium chain.
    """
    return float(np.abs(model.pi - stationary(model)).max())


def generate_sequence(model: MarkovModel, length: int,
                      rng: np.random.Generator) -> DnaSeq:
    """Sample a sequence of the given length from the model.

    The chain is realised without a per-base Python loop: each uniform draw
    is first turned into a next-state lookup table (which base follows each
    possible current base), and the tables are then composed blockwise, so
    the sequential work is O(sqrt(length)) numpy passes.
    """
    if length < 0:
        raise ValueError("length must be non-negative")
    if length == 0:
        return DnaSeq(bases=np.empty(0, dtype=np.uint8), source_id="generated")
    u = rng.random(length)
    first = min(int(np.searchsorted(np.cumsum(model.pi), u[0], side="right")), 3)
    out = np.empty(length, dtype=np.uint8)
    out[0] = first
    m = length - 1
    if m == 0:
        return DnaSeq(bases=out, source_id="generated")

    # step t maps the base at position t to the base at position t+1
    thresholds = np.cumsum(model.trans, axis=1)[:, :3]
    steps = (u[1:, None, None] > thresholds[None, :, :]).sum(axis=2).astype(np.uint8)

    block = max(int(math.isqrt(m)), 1)
    nblocks = -(-m // block)
    pad = nblocks * block - m
    if pad:
        identity = np.tile(np.arange(4, dtype=np.uint8), (pad, 1))
        steps = np.concatenate([steps, identity])
    steps = steps.reshape(nblocks, block, 4)

    # partial[b, t, s]: base at position b*block + t + 1, given base s at b*block
    partial = np.empty_like(steps)
    cur = np.tile(np.arange(4, dtype=np.uint8), (nblocks, 1))
    for t in range(block):
        cur = np.take_along_axis(steps[:, t, :], cur, axis=1)
        partial[:, t, :] = cur

    starts = np.empty(nblocks, dtype=np.intp)
    state = first
    for b in range(nblocks):
        starts[b] = state
        state = int(partial[b, block - 1, state])

    inner = partial[np.arange(nblocks)[:, None], np.arange(block)[None, :],
                    starts[:, None]]
    out[1:] = inner.reshape(-1)[:m]
    return DnaSeq(bases=out, source_id="generated")


def _round12(x: float) -> float:
    return float(f"{x:.12g}")


def model_to_json(model: MarkovModel) -> str:
    """Serialise a model as JSON with keys "pi" and "trans" (12 sig. digits)."""
    payload = {
        "pi": [_round12(x) for x in model.pi],
        "trans": [[_round12(x) for x in row] for row in model.trans],
    }
    return json.dumps(payload)


def model_from_json(text: str) -> MarkovModel:
    """Parse a model serialised by model_to_json.

    Raises:
        ValueError: malformed JSON, missing keys, or wrong shapes.
    """
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid model JSON: {exc}") from exc
    if not isinstance(payload, dict) or not {"pi", "trans"} <= set(payload):
        raise ValueError('model JSON must be an object with keys "pi" and "trans"')
    return MarkovModel(pi=np.asarray(payload["pi"], dtype=float),
                       trans=np.asarray(payload["trans"], dtype=float))
