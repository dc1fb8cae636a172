"""
Hot spots bias the average rate but barely move the Markov estimate
===================================================================

Insert three 1000-bp segments of extra palindromes (sampled from a bank of
real patterns) into simulated genomes, then re-estimate the null rate both
ways. The average rate counts the planted events and inflates; the Markov
estimator only sees the sequence composition, which the inserts barely
change. This asymmetry is what makes Markov-based scan thresholds honest in
the presence of localized signal.
"""

from palinscan import ExperimentConfig, bohv1_model, rate_experiment

REPLICATES = 25          # enough to see the effect; raise for smoother means
NOMINAL_RATE = 0.00098   # insertion intensity per multiplier unit

model = bohv1_model()
scenarios = [(1.0, 1.0, 1.0), (10.0, 10.0, 10.0), (30.0, 30.0, 30.0)]

print(f"{'multipliers':<16}{'avg rate':>12}{'Markov rate':>13}"
      f"{'avg/nominal':>13}{'Markov/nominal':>16}")
for multipliers in scenarios:
    cfg = ExperimentConfig(model=model, replicates=REPLICATES,
                           multipliers=multipliers,
                           lambda0_target=NOMINAL_RATE, master_seed=11)
    res = rate_experiment(cfg)
    label = ",".join(f"{a:g}" for a in multipliers)
    print(f"{label:<16}{res.average_rate_mean:>12.6g}"
          f"{res.markov_rate_mean:>13.6g}"
          f"{res.average_rate_mean / NOMINAL_RATE:>13.2f}"
          f"{res.markov_rate_mean / NOMINAL_RATE:>16.2f}")

# At multiplier 30 the average rate roughly doubles relative to the nominal
# rate, while the Markov estimate stays within a few percent of its
# hot-spot-free value.
