"""Moment-generating functions of palindrome scores under a null model.

Scores attach to palindrome occurrences (see module palindrome): a plain
count (pcs), the length ratio (pls), or minus the log pattern probability
(bws). Conditioned on an occurrence, each score has a moment-generating
function with a closed matrix form built from the quasi transition matrix;
this module evaluates those forms, their log (the cumulant function) and its
derivatives, the exact contribution of each palindrome half-length, the
domain of valid arguments, and the characteristic function of the ladder
increment used by the overshoot correction in module scan.

All evaluators accept the real arguments of the public API; the internal
kernels also take complex arguments so the characteristic function can reuse
the same matrix series.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConvergenceError, DomainError
from .markov import (
    MarkovModel,
    center_pair_probs,
    iid_match_prob,
    quasi_transition_matrix,
)
from .numeric import (
    DERIV_STEP,
    DERIV_STEP_SECOND,
    derivative,
    find_root,
    mat_inv,
    mat_pow,
    spectral_radius,
)
from .palindrome import SCORE_KINDS

SERIES_RTOL = 1e-16
SERIES_MAX_TERMS = 100_000
_EYE = np.eye(4)


@dataclass(frozen=True)
class ScoreModel:
    """A score kind bound to a null sequence model and detection threshold.

    Attributes:
        kind: "pcs", "pls", or "bws".
        model: the null first-order Markov model.
        half_length: detection threshold h >= half_length.
        iid_mode: evaluate with the closed-form expressions for independent
            bases (using only model.pi) instead of the matrix forms.
        bws_column_start: for bws only, build the start weights from the
            column product (I - T) pi instead of the row product pi (I - T).
            The row form is the default; it is the one that normalises the
            length distribution exactly. The column variant exists for
            comparison.
    """

    kind: str
    model: MarkovModel
    half_length: int
    iid_mode: bool = False
    bws_column_start: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", self.kind.lower())
        if self.kind not in SCORE_KINDS:
            raise ValueError(f"unknown score kind {self.kind!r}")
        if self.half_length < 1:
            raise ValueError("half_length must be >= 1")
        if spectral_radius(self.t_matrix) >= 1.0:
            raise ValueError("quasi transition matrix must be strictly subcritical")

    @cached_property
    def t_matrix(self) -> np.ndarray:
        return quasi_transition_matrix(self.model)

    @cached_property
    def closure_probs(self) -> np.ndarray:
        return center_pair_probs(self.model)

    @cached_property
    def start_weights(self) -> np.ndarray:
        """Row vector pi (I - T); component j weights palindromes whose
        outermost left base is j without being extendable one step further."""
        v = self.model.pi - self.model.pi @ self.t_matrix
        v[(v < 0) & (v > -1e-12)] = 0.0
        return v

    @cached_property
    def gamma(self) -> float:
        return iid_match_prob(self.model.pi)

    @cached_property
    def rate(self) -> float:
        """Per-position probability of an occurrence (h >= half_length)."""
        if self.iid_mode:
            return float(self.gamma**self.half_length)
        return float(
            self.model.pi
            @ mat_pow(self.t_matrix, self.half_length - 1)
            @ self.closure_probs
        )

    @cached_property
    def domain(self) -> "TiltDomain":
        return mgf_domain(self)


@dataclass(frozen=True)
class TiltDomain:
    """Supremum of valid MGF arguments for one score kind."""

    kind: str
    t_max: float

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")

    def __contains__(self, t: float) -> bool:
        return t < self.t_max


def _entrywise_power(base: np.ndarray, expo) -> np.ndarray:
    """base ** expo for non-negative base and Re(expo) > 0, complex-safe.

    Zero entries map to zero, matching the limit from positive base.
    """
    cplx = isinstance(expo, complex) or np.iscomplexobj(expo)
    out = np.zeros(base.shape, dtype=complex if cplx else float)
    pos = base > 0
    out[pos] = np.exp(expo * np.log(base[pos]))
    return out


def mgf_domain(sm: ScoreModel) -> TiltDomain:
    """Largest open interval (−inf, t_max) on which the MGF converges.

    pcs scores are bounded, so t_max is infinite. pls arguments must keep
    exp(t / half_length) times the spectral radius of the quasi transition
    matrix below 1. bws arguments must keep the tilted matrix subcritical;
    t_max is the root of its spectral radius hitting 1 on (0, 1), or 1 when
    the radius stays below 1 on the whole interval.
    """
    if sm.kind == "pcs":
        return TiltDomain(kind=sm.kind, t_max=np.inf)
    if sm.kind == "pls":
        rho = sm.gamma if sm.iid_mode else spectral_radius(sm.t_matrix)
        return TiltDomain(kind=sm.kind, t_max=-sm.half_length * np.log(rho))

    def excess(t: float) -> float:
        if sm.iid_mode:
            return _tilted_iid_match(sm.model.pi, t) - 1.0
        return spectral_radius(_entrywise_power(sm.t_matrix, 1.0 - t)) - 1.0

    hi = 1.0 - 1e-9
    if excess(hi) < 0.0:
        return TiltDomain(kind=sm.kind, t_max=1.0)
    return TiltDomain(kind=sm.kind, t_max=find_root(excess, 0.0, hi, tol=1e-9))


def require_in_domain(sm: ScoreModel, z) -> None:
    """Raise DomainError unless Re(z) is a valid MGF argument for sm."""
    re = float(np.real(z))
    if sm.kind == "bws" and re >= 1.0:
        raise DomainError(f"bws MGF argument must satisfy Re t < 1, got {re!r}")
    t_max = sm.domain.t_max
    if re >= t_max:
        raise DomainError(
            f"{sm.kind} MGF argument {re!r} is outside the domain (max {t_max!r})"
        )


def _tilted_iid_match(pi: np.ndarray, t) -> complex | float:
    """Tilted analogue of the complementary-pair probability gamma."""
    at, cg = pi[0] * pi[3], pi[1] * pi[2]
    return 2.0 * (
        _entrywise_power(np.array([at]), 1.0 - t)[0]
        + _entrywise_power(np.array([cg]), 1.0 - t)[0]
    )


def _pls_value(sm: ScoreModel, z):
    if sm.iid_mode:
        g = sm.gamma
        return np.exp(z) * (1.0 - g) / (1.0 - np.exp(z / sm.half_length) * g)
    t, h = sm.t_matrix, sm.half_length
    core = mat_inv(_EYE - np.exp(z / h) * t)
    head = sm.model.pi @ mat_pow(t, h - 1)
    tail = (_EYE - t) @ sm.closure_probs
    return np.exp(z) * (head @ core @ tail) / sm.rate


def _bws_value(sm: ScoreModel, z):
    if sm.iid_mode:
        g = sm.gamma
        gt = _tilted_iid_match(sm.model.pi, z)
        one = _entrywise_power(np.array([1.0 - g]), 1.0 - z)[0]
        return one / (1.0 - gt) * (gt / g) ** sm.half_length
    start = sm.start_weights
    if sm.bws_column_start:
        start = (_EYE - sm.t_matrix) @ sm.model.pi
    if np.any(start < 0):
        raise DomainError("start weights have negative entries; bws undefined")
    q = _entrywise_power(sm.t_matrix, 1.0 - z)
    u = _entrywise_power(sm.closure_probs, 1.0 - z)
    v = _entrywise_power(start, 1.0 - z)
    val = v @ mat_pow_any(q, sm.half_length - 1) @ mat_inv(_EYE.astype(q.dtype) - q) @ u
    return val / sm.rate


def mat_pow_any(m: np.ndarray, k: int) -> np.ndarray:
    """Matrix power that tolerates complex dtype."""
    if np.iscomplexobj(m):
        out = np.eye(m.shape[0], dtype=complex)
        base = m.copy()
        e = k
        while e:
            if e & 1:
                out = out @ base
            base = base @ base
            e >>= 1
        return out
    return mat_pow(m, k)


def _mgf_value(sm: ScoreModel, z):
    """Kernel for all kinds; z may be complex (domain checks use Re z)."""
    require_in_domain(sm, z)
    if sm.kind == "pcs":
        return np.exp(z)
    if sm.kind == "pls":
        return _pls_value(sm, z)
    return _bws_value(sm, z)


def pls_mgf(sm: ScoreModel, t: float) -> float:
    """MGF of the length-ratio score at t, conditioned on an occurrence.

    Raises:
        DomainError: t at or beyond the domain supremum.
    """
    if sm.kind != "pls":
        raise ValueError("pls_mgf requires a pls score model")
    return float(np.real(_mgf_value(sm, float(t))))


def bws_mgf(sm: ScoreModel, t: float) -> float:
    """MGF of the log-rarity score at t, conditioned on an occurrence.

    Raises:
        DomainError: t at or beyond the domain supremum (always < 1).
    """
    if sm.kind != "bws":
        raise ValueError("bws_mgf requires a bws score model")
    return float(np.real(_mgf_value(sm, float(t))))


def score_mgf(sm: ScoreModel, t: float) -> float:
    """MGF of the configured score kind at t."""
    return float(np.real(_mgf_value(sm, float(t))))


def exact_length_prob(sm: ScoreModel, k: int) -> float:
    """Probability that an occurrence has half-length exactly k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if sm.iid_mode:
        g = sm.gamma
        return float((1.0 - g) * g**k)
    return float(
        sm.start_weights @ mat_pow(sm.t_matrix, k - 1) @ sm.closure_probs
    )


def mgf_at_length(sm: ScoreModel, t: float, k: int) -> float:
    """Joint term E[exp(t * score); half-length = k] for a single centre.

    For bws this is the tilted matrix bracket; for pls and pcs the score is
    a function of k alone, so the term is the exact-length probability times
    the scored exponential.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if sm.kind == "pcs":
        return float(np.exp(t)) * exact_length_prob(sm, k)
    if sm.kind == "pls":
        return float(np.exp(t * k / sm.half_length)) * exact_length_prob(sm, k)
    require_in_domain(sm, t)
    if sm.iid_mode:
        g = sm.gamma
        one = _entrywise_power(np.array([1.0 - g]), 1.0 - t)[0]
        return float(one * _tilted_iid_match(sm.model.pi, t) ** k)
    start = sm.start_weights
    if sm.bws_column_start:
        start = (_EYE - sm.t_matrix) @ sm.model.pi
    q = _entrywise_power(sm.t_matrix, 1.0 - t)
    u = _entrywise_power(sm.closure_probs, 1.0 - t)
    v = _entrywise_power(start, 1.0 - t)
    return float(np.real(v @ mat_pow_any(q, k - 1) @ u))


def mgf_series(sm: ScoreModel, t: float) -> float:
    """MGF recomputed as the sum over half-lengths of mgf_at_length terms.

    Serves as an internal cross-check of the closed matrix forms; truncation
    continues until the term ratio falls below machine-level tolerance.

    Raises:
        ConvergenceError: series fails to decay within the term cap.
    """
    require_in_domain(sm, t)
    total = 0.0
    k = sm.half_length
    while k < sm.half_length + SERIES_MAX_TERMS:
        term = mgf_at_length(sm, t, k)
        total += term
        if k > sm.half_length + 4 and term <= SERIES_RTOL * total:
            return total / sm.rate
        k += 1
    raise ConvergenceError("half-length series did not converge")


def log_mgf(sm: ScoreModel, theta: float) -> float:
    """Cumulant function: log of the score MGF (identity map for pcs)."""
    if sm.kind == "pcs":
        return float(theta)
    return float(np.log(score_mgf(sm, theta)))


def _adaptive_step(sm: ScoreModel, theta: float, base: float) -> float:
    h = base * max(1.0, abs(theta))
    t_max = sm.domain.t_max
    if np.isfinite(t_max):
        gap = t_max - theta
        if gap <= 0:
            raise DomainError(f"theta {theta!r} outside MGF domain (max {t_max!r})")
        h = min(h, gap / 8.0)
    return h


def log_mgf_prime(sm: ScoreModel, theta: float) -> float:
    """First derivative of the cumulant function (the tilted mean score)."""
    if sm.kind == "pcs":
        return 1.0
    return derivative(lambda x: log_mgf(sm, x), theta, order=1,
                      step=_adaptive_step(sm, theta, DERIV_STEP))


def log_mgf_double_prime(sm: ScoreModel, theta: float) -> float:
    """Second derivative of the cumulant function (the tilted score variance)."""
    if sm.kind == "pcs":
        return 0.0
    return derivative(lambda x: log_mgf(sm, x), theta, order=2,
                      step=_adaptive_step(sm, theta, DERIV_STEP_SECOND))


def increment_charfn(sm: ScoreModel, lambda0: float, lambda1: float,
                     theta0: float, theta1: float, delta: float,
                     t: float) -> complex:
    """Characteristic function of one ladder increment of the overshoot walk.

    The increment over a stretch of length delta subtracts the scores of a
    Poisson(lambda0 * delta) number of occurrences drawn under tilt theta0
    and adds those of a Poisson(lambda1 * delta) number drawn under tilt
    theta1. Both compound-Poisson factors reduce to evaluations of the score
    MGF at complex arguments theta0 - i t and theta1 + i t.

    Raises:
        DomainError: theta0 or theta1 outside the MGF domain.
    """
    k0 = score_mgf(sm, theta0)
    f_minus = _mgf_value(sm, complex(theta0, -t)) / k0
    f_plus = _mgf_value(sm, complex(theta1, t)) / k0
    first = np.exp(lambda0 * delta * (f_minus - 1.0))
    second = np.exp(-lambda1 * delta + lambda0 * delta * f_plus)
    return complex(first * second)
