"""Scan statistics for DNA palindromes under Markov null models.

The package covers the full pipeline: sequence I/O and encoding
(:mod:`palinscan.seqio`), first-order Markov model estimation and
palindrome rates (:mod:`palinscan.markov`), palindrome detection and
scoring (:mod:`palinscan.palindrome`), analytic score MGFs with
exponential tilting (:mod:`palinscan.mgf`), windowed scan p-values and
thresholds with Monte Carlo overshoot correction (:mod:`palinscan.scan`),
and hot-spot robustness / power simulations (:mod:`palinscan.sim`).
"""

from .errors import (
    BracketError,
    ConvergenceError,
    CrowdedSegmentError,
    DomainError,
    EmptyBankError,
    EstimationError,
    FastaError,
    FetchError,
    InfiniteScoreError,
    LadderCapError,
    NonFiniteError,
    PalinscanError,
    SingularMatrixError,
)
from .markov import (
    BOHV1_GENOME_LENGTH,
    MarkovModel,
    RateEstimate,
    bohv1_model,
    center_pair_probs,
    estimate_model,
    generate_sequence,
    iid_match_prob,
    iid_model,
    iid_rate,
    markov_rate,
    model_from_json,
    model_to_json,
    quasi_transition_matrix,
    stationary,
    stationary_gap,
)
from .mgf import (
    ScoreModel,
    TiltDomain,
    bws_mgf,
    exact_length_prob,
    increment_charfn,
    log_mgf,
    log_mgf_double_prime,
    log_mgf_prime,
    mgf_at_length,
    mgf_domain,
    mgf_series,
    pls_mgf,
    require_in_domain,
    score_mgf,
)
from .palindrome import (
    PalindromeBank,
    PalindromeEvent,
    attach_scores,
    average_rate,
    build_bank,
    check_palindrome,
    events_to_tsv,
    find_palindromes,
    pattern_log_prob,
    score_event,
)
from .scan import (
    LlrStatistics,
    PvalueReport,
    TiltSolution,
    WindowSeries,
    llr_statistics,
    overshoot_nu,
    p_value,
    solve_tilt,
    threshold_for_alpha,
    window_scores,
)
from .seqio import (
    ALPHABET,
    DnaSeq,
    FastaRecord,
    fetch_sequence,
    parse_fasta,
    parse_fasta_file,
    reverse_complement,
    serialize_fasta,
)
from .sim import (
    ExperimentConfig,
    HotspotSpec,
    PowerExperimentResult,
    PowerRow,
    RateExperimentResult,
    TiltedScoreSampler,
    default_hotspot_specs,
    insert_hotspots,
    power_experiment,
    power_result_to_tsv,
    rate_experiment,
    rate_results_to_tsv,
    sample_tilted_score,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHABET",
    "BOHV1_GENOME_LENGTH",
    "BracketError",
    "ConvergenceError",
    "CrowdedSegmentError",
    "DnaSeq",
    "DomainError",
    "EmptyBankError",
    "EstimationError",
    "ExperimentConfig",
    "FastaError",
    "FastaRecord",
    "FetchError",
    "HotspotSpec",
    "InfiniteScoreError",
    "LadderCapError",
    "LlrStatistics",
    "MarkovModel",
    "NonFiniteError",
    "PalindromeBank",
    "PalindromeEvent",
    "PalinscanError",
    "PowerExperimentResult",
    "PowerRow",
    "PvalueReport",
    "RateEstimate",
    "RateExperimentResult",
    "ScoreModel",
    "SingularMatrixError",
    "TiltDomain",
    "TiltSolution",
    "TiltedScoreSampler",
    "WindowSeries",
    "attach_scores",
    "average_rate",
    "bohv1_model",
    "build_bank",
    "bws_mgf",
    "center_pair_probs",
    "check_palindrome",
    "default_hotspot_specs",
    "estimate_model",
    "events_to_tsv",
    "exact_length_prob",
    "fetch_sequence",
    "find_palindromes",
    "generate_sequence",
    "iid_match_prob",
    "iid_model",
    "iid_rate",
    "increment_charfn",
    "insert_hotspots",
    "llr_statistics",
    "log_mgf",
    "log_mgf_double_prime",
    "log_mgf_prime",
    "markov_rate",
    "mgf_at_length",
    "mgf_domain",
    "mgf_series",
    "model_from_json",
    "model_to_json",
    "overshoot_nu",
    "p_value",
    "parse_fasta",
    "parse_fasta_file",
    "pattern_log_prob",
    "pls_mgf",
    "power_experiment",
    "power_result_to_tsv",
    "quasi_transition_matrix",
    "rate_experiment",
    "rate_results_to_tsv",
    "require_in_domain",
    "reverse_complement",
    "sample_tilted_score",
    "score_event",
    "score_mgf",
    "serialize_fasta",
    "solve_tilt",
    "stationary",
    "stationary_gap",
    "threshold_for_alpha",
    "window_scores",
]
