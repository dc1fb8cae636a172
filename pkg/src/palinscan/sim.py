"""Simulation studies: hot-spot insertion, tilted samplers, experiments.

Two experiment harnesses mirror the package's analysis pipeline end to end.
The rate experiment measures how clustered palindrome inserts ("hot spots")
bias the window-free rate estimators; the power experiment measures how often
scan thresholds derived from each estimator flag the inserted segments.
Everything is reproducible: replicate i draws from a generator seeded by
mixing the master seed with (0, i) through numpy's SeedSequence, so results
do not depend on execution order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, CrowdedSegmentError, DomainError
from .markov import MarkovModel, generate_sequence, estimate_model, iid_model, markov_rate
from .mgf import ScoreModel, require_in_domain
from .numeric import mat_pow, spectral_radius
from .palindrome import (
    PalindromeBank,
    average_rate,
    build_bank,
    find_palindromes,
    score_event,
)
from .scan import DEFAULT_NU_WALKS, threshold_for_alpha, window_scores
from .seqio import DnaSeq

PLACEMENT_RETRIES = 1000
_TAIL_MASS = 1e-12


@dataclass(frozen=True)
class HotspotSpec:
    """One elevated-rate segment to insert into a background sequence."""

    start: int
    length: int = 1000
    multiplier: float = 1.0

    def __post_init__(self):
        if self.start < 0 or self.length < 1:
            raise ValueError("hotspot segment must have start >= 0 and length >= 1")
        if self.multiplier < 1.0:
            raise ValueError("hotspot multiplier must be >= 1")

    @property
    def stop(self) -> int:
        return self.start + self.length


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared settings of the rate and power experiments.

    Attributes:
        model: generator (and scoring) model for background sequences.
        lambda0_target: nominal per-position rate used to size hot-spot
            insert counts (length * multiplier * lambda0_target).
        bank: palindrome patterns for insertion; when None, a bank is built
            from one reference sequence generated from the model.
        hotspot_starts: segment start positions; when None, segments are
            centred at 25%, 50%, and 75% of the sequence.
    """

    model: MarkovModel
    seq_length: int = 135_301
    half_length: int = 6
    window: int = 1000
    replicates: int = 500
    multipliers: tuple[float, ...] = (1.0, 1.0, 1.0)
    lambda0_target: float = 0.00098
    master_seed: int = 0
    bank: PalindromeBank | None = None
    hotspot_length: int = 1000
    hotspot_starts: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if any(a < 1.0 for a in self.multipliers):
            raise ValueError("multipliers must be >= 1")
        if self.lambda0_target <= 0:
            raise ValueError("lambda0_target must be positive")


@dataclass(frozen=True)
class RateExperimentResult:
    """Hot-spot bias of the two rate estimators, averaged over replicates."""

    multipliers: tuple[float, ...]
    replicates: int
    average_rates: np.ndarray = field(repr=False)
    markov_rates: np.ndarray = field(repr=False)

    @property
    def average_rate_mean(self) -> float:
        return float(self.average_rates.mean())

    @property
    def markov_rate_mean(self) -> float:
        return float(self.markov_rates.mean())

    @property
    def average_rate_se(self) -> float:
        return float(self.average_rates.std(ddof=1) / np.sqrt(self.replicates))

    @property
    def markov_rate_se(self) -> float:
        return float(self.markov_rates.std(ddof=1) / np.sqrt(self.replicates))


@dataclass(frozen=True)
class PowerRow:
    """Detection summary for thresholds derived from one rate estimator."""

    estimator: str
    rate: float
    threshold: float
    powers: tuple[float, ...]


@dataclass(frozen=True)
class PowerExperimentResult:
    kind: str
    alpha: float
    multipliers: tuple[float, ...]
    replicates: int
    rows: tuple[PowerRow, ...]
    segment_maxima: np.ndarray = field(repr=False)


def default_hotspot_specs(cfg: ExperimentConfig) -> list[HotspotSpec]:
    """Hot-spot segments centred at quarter points of the sequence."""
    if cfg.hotspot_starts is not None:
        starts = cfg.hotspot_starts
    else:
        fracs = [(i + 1) / (len(cfg.multipliers) + 1) for i in range(len(cfg.multipliers))]
        starts = [int(round(f * cfg.seq_length - cfg.hotspot_length / 2)) for f in fracs]
    if len(starts) != len(cfg.multipliers):
        raise ValueError("need one start per multiplier")
    return [
        HotspotSpec(start=s, length=cfg.hotspot_length, multiplier=a)
        for s, a in zip(starts, cfg.multipliers)
    ]


def _validate_specs(specs, seq_length: int) -> None:
    ordered = sorted(specs, key=lambda s: s.start)
    for spec in ordered:
        if spec.stop > seq_length:
            raise ValueError(f"hotspot {spec} extends past the sequence end")
    for a, b in zip(ordered, ordered[1:]):
        if a.stop > b.start:
            raise ValueError(f"hotspots {a} and {b} overlap")


def insert_hotspots(background: DnaSeq, specs, bank: PalindromeBank,
                    lambda0: float, rng: np.random.Generator,
                    max_retries: int = PLACEMENT_RETRIES):
    """Overwrite hot-spot segments with palindromes resampled from a bank.

    Each segment receives a Poisson(length * multiplier * lambda0) number of
    patterns drawn uniformly with replacement; each pattern is placed at a
    uniform centre inside the segment, redrawing (up to ``max_retries``
    times) when it would overlap a previous placement or cross the segment
    boundary. Background palindromes remain, so a segment's total event rate
    is the insert intensity plus the background rate.

    Returns:
        (sequence, centers): modified sequence and the sorted ground-truth
        centre positions of all inserted patterns.

    Raises:
        CrowdedSegmentError: a pattern could not be placed within the retry
            budget.
    """
    if not bank.patterns:
        raise ValueError("bank is empty")
    _validate_specs(specs, background.length)
    bases = background.bases.copy()
    centers: list[int] = []
    for spec in specs:
        count = int(rng.poisson(spec.length * spec.multiplier * lambda0))
        placed: list[tuple[int, int]] = []
        for _ in range(count):
            for _attempt in range(max_retries):
                pattern = bank.patterns[int(rng.integers(len(bank.patterns)))]
                h = pattern.length // 2
                c_lo = spec.start + h - 1
                c_hi = spec.stop - 1 - h
                if c_hi < c_lo:
                    continue  # pattern wider than the segment; redraw
                c = int(rng.integers(c_lo, c_hi + 1))
                lo, hi = c - h + 1, c + h
                if any(lo <= p_hi and p_lo <= hi for p_lo, p_hi in placed):
                    continue
                bases[lo : hi + 1] = pattern.bases
                placed.append((lo, hi))
                centers.append(c)
                break
            else:
                raise CrowdedSegmentError(
                    f"could not place pattern {len(placed) + 1}/{count} in "
                    f"segment at {spec.start} after {max_retries} retries"
                )
    out = DnaSeq(bases=bases, source_id=background.source_id,
                 dropped_count=background.dropped_count)
    return out, sorted(centers)


class TiltedScoreSampler:
    """Draws palindrome scores from the exponentially tilted distribution.

    Tilting by theta reweights the null score density by exp(theta * x)
    (normalised). For the length-ratio score this only tilts the half-length
    distribution; for the log-rarity score it also reshapes the letters of
    the pattern, which are sampled with backward accumulation vectors so
    each conditional step is an exact categorical draw.

    Construction precomputes all lookup tables; ``draw`` is vectorised.
    """

    def __init__(self, sm: ScoreModel, theta: float):
        self.kind = sm.kind
        self.theta = float(theta)
        if self.kind == "pcs":
            return
        require_in_domain(sm, self.theta)
        # In iid mode the score law depends on the composition only; sample
        # from the equivalent identical-row model so one matrix path serves.
        eff = sm
        if sm.iid_mode:
            eff = ScoreModel(sm.kind, iid_model(sm.model.pi), sm.half_length)
        self.half_length = eff.half_length
        if self.kind == "pls":
            self._init_pls(eff)
        else:
            self._init_bws(eff)

    def _length_table(self, weights_of_k, ratio: float, first_k: int):
        """Accumulate length weights until the geometric tail is negligible."""
        ks, terms, total = [], [], 0.0
        k = first_k
        while k < first_k + 100_000:
            term = weights_of_k(k)
            ks.append(k)
            terms.append(term)
            total += term
            tail = term * ratio / (1.0 - ratio)
            if k > first_k and tail < _TAIL_MASS * total:
                return np.asarray(ks), np.cumsum(terms) / total
            k += 1
        raise ConvergenceError("tilted length distribution failed to truncate")

    def _init_pls(self, sm: ScoreModel) -> None:
        t, h = sm.t_matrix, sm.half_length
        ratio = np.exp(self.theta / h) * spectral_radius(t)
        row = sm.start_weights @ mat_pow(t, h - 1)
        state = {"row": row, "k": h}

        def weight(k: int) -> float:
            while state["k"] < k:
                state["row"] = state["row"] @ t
                state["k"] += 1
            return float(np.exp(self.theta * k / h) * (state["row"] @ sm.closure_probs))

        self._ks, self._cum = self._length_table(weight, ratio, h)

    def _init_bws(self, sm: ScoreModel) -> None:
        expo = 1.0 - self.theta
        with np.errstate(divide="ignore"):
            q = np.where(sm.t_matrix > 0, sm.t_matrix, 1.0) ** expo
            q[sm.t_matrix <= 0] = 0.0
            u = np.where(sm.closure_probs > 0, sm.closure_probs, 1.0) ** expo
            u[sm.closure_probs <= 0] = 0.0
        v0 = sm.start_weights
        if np.any(v0 < 0):
            raise DomainError("negative start weights; log-rarity tilt undefined")
        v = np.where(v0 > 0, v0, 1.0) ** expo
        v[v0 <= 0] = 0.0
        ratio = spectral_radius(q)
        state = {"row": v.copy(), "k": 1}

        def weight(k: int) -> float:
            while state["k"] < k:
                state["row"] = state["row"] @ q
                state["k"] += 1
            return float(state["row"] @ u)

        self._ks, self._cum = self._length_table(weight, ratio, sm.half_length)
        k_last = int(self._ks[-1])
        # backward[m] = q^m u; conditional step tables follow from them
        backward = np.empty((k_last, 4))
        backward[0] = u
        for m in range(1, k_last):
            backward[m] = q @ backward[m - 1]
        first = v[None, :] * backward[self._ks - 1]
        self._first_cum = np.cumsum(first / first.sum(axis=1, keepdims=True), axis=1)
        steps = np.zeros((k_last, 4, 4))
        with np.errstate(divide="ignore", invalid="ignore"):
            for m in range(1, k_last):
                table = q * backward[m - 1][None, :] / backward[m][:, None]
                steps[m] = np.where(np.isfinite(table), table, 0.0)
        self._step_cum = np.cumsum(steps, axis=2)
        self._log_start = np.log(np.where(v0 > 0, v0, 1.0))
        self._log_step = np.log(np.where(sm.t_matrix > 0, sm.t_matrix, 1.0))
        self._log_close = np.log(np.where(sm.closure_probs > 0, sm.closure_probs, 1.0))

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Sample ``size`` scores."""
        if self.kind == "pcs":
            return np.ones(size)
        idx = np.searchsorted(self._cum, rng.random(size), side="right")
        ks = self._ks[np.minimum(idx, self._ks.size - 1)]
        if self.kind == "pls":
            return ks / self.half_length
        rows = self._first_cum[np.minimum(idx, self._ks.size - 1)]
        letter = (rng.random(size)[:, None] > rows[:, :3]).sum(axis=1)
        log_prob = self._log_start[letter]
        step = 1
        while True:
            active = np.flatnonzero(ks > step)
            if not active.size:
                break
            remaining = ks[active] - step
            rows = self._step_cum[remaining, letter[active]]
            nxt = (rng.random(active.size)[:, None] > rows[:, :3]).sum(axis=1)
            log_prob[active] += self._log_step[letter[active], nxt]
            letter[active] = nxt
            step += 1
        log_prob += self._log_close[letter]
        return -log_prob


def sample_tilted_score(sm: ScoreModel, theta: float,
                        rng: np.random.Generator) -> float:
    """One draw from the tilted score distribution.

    For bulk draws construct a TiltedScoreSampler once and call draw().
    """
    return float(TiltedScoreSampler(sm, theta).draw(rng, 1)[0])


def _replicate_rng(master_seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=master_seed, spawn_key=(0, index))
    )


def _bank_for(cfg: ExperimentConfig) -> PalindromeBank:
    if cfg.bank is not None:
        return cfg.bank
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=cfg.master_seed, spawn_key=(1,))
    )
    reference = generate_sequence(cfg.model, cfg.seq_length, rng)
    return build_bank(reference, cfg.half_length)


def _threshold_entropy(cfg: ExperimentConfig, index: int) -> int:
    ss = np.random.SeedSequence(entropy=cfg.master_seed, spawn_key=(2, index))
    return int(np.random.default_rng(ss).integers(2**63))


def rate_experiment(cfg: ExperimentConfig) -> RateExperimentResult:
    """Bias of the average-rate and model-based estimators under hot spots.

    Per replicate: generate a background sequence, insert hot spots, detect
    palindromes, and record the observed average rate alongside the rate
    implied by a model re-fitted to the contaminated sequence.
    """
    specs = default_hotspot_specs(cfg)
    bank = _bank_for(cfg)
    avg = np.empty(cfg.replicates)
    mk = np.empty(cfg.replicates)
    for i in range(cfg.replicates):
        rng = _replicate_rng(cfg.master_seed, i)
        background = generate_sequence(cfg.model, cfg.seq_length, rng)
        seq, _ = insert_hotspots(background, specs, bank, cfg.lambda0_target, rng)
        events = find_palindromes(seq, cfg.half_length)
        avg[i] = average_rate(events, cfg.seq_length, cfg.half_length).value
        mk[i] = markov_rate(estimate_model(seq), cfg.half_length).value
    return RateExperimentResult(multipliers=tuple(cfg.multipliers),
                                replicates=cfg.replicates,
                                average_rates=avg, markov_rates=mk)


def _segment_window_bounds(spec: HotspotSpec, window: int,
                           total_length: int) -> tuple[int, int]:
    """Range of window starts t whose window (t, t+window] meets the segment."""
    lo = max(0, spec.start - window)
    hi = min(total_length - window, spec.stop - 2)
    return lo, hi


def power_experiment(cfg: ExperimentConfig, kind: str, alpha: float = 0.05,
                     thresholds: dict[str, float] | None = None,
                     nu_fixed: float | None = None,
                     n_walks: int = DEFAULT_NU_WALKS,
                     per_replicate_thresholds: bool = False,
                     ey1_literal: bool = False,
                     literal_condition: bool = False,
                     bws_column_start: bool = False) -> PowerExperimentResult:
    """Detection power of scan thresholds built from each rate estimator.

    Per replicate, the maximal window score overlapping each hot-spot
    segment is recorded; a segment counts as detected when that maximum
    reaches the threshold. Thresholds come from inverting the p-value
    approximation at ``alpha`` under each estimator's scenario-averaged rate
    (or per replicate with ``per_replicate_thresholds``), or may be injected
    directly via ``thresholds`` with keys "average" and "markov". Scores and
    tilt computations use the generator model.
    """
    sm = ScoreModel(kind, cfg.model, cfg.half_length,
                    bws_column_start=bws_column_start)
    specs = default_hotspot_specs(cfg)
    bank = _bank_for(cfg)
    n_seg = len(specs)
    seg_max = np.empty((cfg.replicates, n_seg))
    avg = np.empty(cfg.replicates)
    mk = np.empty(cfg.replicates)
    for i in range(cfg.replicates):
        rng = _replicate_rng(cfg.master_seed, i)
        background = generate_sequence(cfg.model, cfg.seq_length, rng)
        seq, _ = insert_hotspots(background, specs, bank, cfg.lambda0_target, rng)
        events = find_palindromes(seq, cfg.half_length)
        avg[i] = average_rate(events, cfg.seq_length, cfg.half_length).value
        mk[i] = markov_rate(estimate_model(seq), cfg.half_length).value
        scored = [
            (e.center, score_event(e, kind, cfg.half_length, cfg.model))
            for e in events
        ]
        series = window_scores(scored, cfg.window, cfg.seq_length)
        for j, spec in enumerate(specs):
            lo, hi = _segment_window_bounds(spec, cfg.window, cfg.seq_length)
            seg_max[i, j] = series.values[lo : hi + 1].max()

    estimates = {"average": avg, "markov": mk}
    rows = []
    for index, (name, rates) in enumerate(estimates.items()):
        mean_rate = float(rates.mean())
        if thresholds is not None:
            b = float(thresholds[name])
        elif per_replicate_thresholds:
            b = np.array([
                threshold_for_alpha(
                    alpha, cfg.window, cfg.seq_length, float(r), sm,
                    nu_fixed=nu_fixed, n_walks=n_walks,
                    nu_entropy=_threshold_entropy(cfg, index),
                    ey1_literal=ey1_literal, literal_condition=literal_condition)
                for r in rates
            ])
        else:
            b = threshold_for_alpha(
                alpha, cfg.window, cfg.seq_length, mean_rate, sm,
                nu_fixed=nu_fixed, n_walks=n_walks,
                nu_entropy=_threshold_entropy(cfg, index),
                ey1_literal=ey1_literal, literal_condition=literal_condition)
        detected = seg_max >= (b[:, None] if isinstance(b, np.ndarray) else b)
        powers = tuple(float(x) for x in detected.mean(axis=0))
        row_b = float(b.mean()) if isinstance(b, np.ndarray) else float(b)
        rows.append(PowerRow(estimator=name, rate=mean_rate, threshold=row_b,
                             powers=powers))
    return PowerExperimentResult(kind=kind, alpha=alpha,
                                 multipliers=tuple(cfg.multipliers),
                                 replicates=cfg.replicates, rows=tuple(rows),
                                 segment_maxima=seg_max)


def rate_results_to_tsv(results) -> str:
    """Render rate-experiment rows (one per multiplier scenario) as TSV."""
    lines = ["a1\ta2\ta3\tlambda_avg\tlambda_markov"]
    for r in results:
        mult = "\t".join(f"{a:g}" for a in r.multipliers)
        lines.append(
            f"{mult}\t{r.average_rate_mean:.10g}\t{r.markov_rate_mean:.10g}"
        )
    return "\n".join(lines) + "\n"


def power_result_to_tsv(result: PowerExperimentResult) -> str:
    """Render power-experiment rows as TSV, one line per estimator."""
    n_seg = len(result.rows[0].powers) if result.rows else 0
    powers_hdr = "\t".join(f"power{j + 1}" for j in range(n_seg))
    lines = [f"kind\talpha\tmultipliers\testimator\trate\tthreshold\t{powers_hdr}"]
    mult = ",".join(f"{a:g}" for a in result.multipliers)
    for row in result.rows:
        powers = "\t".join(f"{p:.4f}" for p in row.powers)
        lines.append(
            f"{result.kind}\t{result.alpha:g}\t{mult}\t{row.estimator}"
            f"\t{row.rate:.10g}\t{row.threshold:.10g}\t{powers}"
        )
    return "\n".join(lines) + "\n"
