"""
Detection power under the two rate estimators
=============================================

The scan threshold depends on the null rate plugged into the p-value
approximation. Hot spots inflate the average rate, which raises the
threshold and costs real detections; the Markov rate stays put. Here each
replicate plants three hot spots (multiplier 10), both rate estimates are
averaged across replicates, thresholds are derived from each, and power is
the fraction of replicates in which some window overlapping a segment
clears the threshold.
"""

from palinscan import ExperimentConfig, bohv1_model, power_experiment

REPLICATES = 25
ALPHA = 0.0005      # deep enough that the thresholds sit mid-distribution

cfg = ExperimentConfig(model=bohv1_model(), replicates=REPLICATES,
                       multipliers=(10.0, 10.0, 10.0), master_seed=11)

for kind in ("pls", "bws"):
    result = power_experiment(cfg, kind, alpha=ALPHA, nu_fixed=1.0)
    print(f"\n{kind} scan, alpha = {ALPHA}")
    print(f"{'estimator':<10}{'rate':>12}{'threshold':>12}"
          f"{'power seg1':>12}{'power seg2':>12}{'power seg3':>12}")
    for row in result.rows:
        p1, p2, p3 = row.powers
        print(f"{row.estimator:<10}{row.rate:>12.6g}{row.threshold:>12.4f}"
              f"{p1:>12.2f}{p2:>12.2f}{p3:>12.2f}")

# The average-rate row carries the higher threshold and the lower power in
# every segment: the bias of the estimator translates directly into missed
# hot spots.
