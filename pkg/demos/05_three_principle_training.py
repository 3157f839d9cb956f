"""The three-principle trainer: traces, ablation, and the over-matching trap.

Principle I reweights the source loss by the estimated label ratio,
principle II matches per-class feature centroids (weighted by source +
pseudo-label frequencies), principle III is the adversarial feature-marginal
constraint with a warm-up schedule. The ablation reproduces the headline
ordering: all three principles beat every subset, and marginal matching
alone (the classic adversarial baseline) trails by several points under
label shift. The last section shows why: driving the feature-marginal
divergence down raises the provable floor on the label-conditional shift.
"""

import numpy as np

from jsda import TrainConfig, make_scenario, run_training
from jsda.training import ablate


def banner(title):
    print(f"\n{'=' * 72}\n{title}\n{'=' * 72}")


banner("Full three-principle run on a rotated + label-shifted task")
sc = make_scenario("conditional-shift", rotation_deg=40.0, cov_scale=1.2,
                   source_label_marginal=(0.5, 0.5),
                   target_label_marginal=(0.8, 0.2), seed=3)
cfg = TrainConfig(epochs=40, n_source=1500, n_target=1500,
                  cond_multiplier=12.0, learning_rate=0.03, seed=0)
trace = run_training(sc, cfg)
print(f"{'epoch':>5} {'term I':>9} {'term II':>9} {'JS est (III)':>13} "
      f"{'target acc':>11} {'alpha_hat':>18}")
for e in range(0, trace.n_epochs(), 5):
    print(f"{e:5d} {trace.weighted_source_loss[e]:9.4f} "
          f"{trace.conditional_loss[e]:9.4f} {trace.adversarial_js[e]:13.4f} "
          f"{trace.target_accuracy[e]:11.4f} "
          f"{np.array2string(trace.alpha_hat[e], precision=3):>18}")
print("terms I and II fall; the adversarial estimate stays pinned near zero.")

banner("Ablation over principle subsets (5 common seeds)")
rows = ablate(sc, TrainConfig(epochs=60, n_source=1500, n_target=1500,
                              cond_multiplier=12.0, learning_rate=0.03, seed=0),
              seeds=range(5))
for r in rows:
    print(f"{r['principles']:10s} mean acc {r['mean_accuracy']:.4f} "
          f"+- {r['std_accuracy']:.4f}")

banner("Over-matching: marginal matching alone raises the conditional floor")
sc2 = make_scenario("label-shift", source_label_marginal=(0.5, 0.5),
                    target_label_marginal=(0.9, 0.1), cov_scale=1.0, seed=4)
cfg2 = TrainConfig(epochs=150, batch_size=64, n_source=4000, n_target=4000,
                   principles=frozenset({"III"}), feature_width=2,
                   hidden_width=16, track_feature_shift=True,
                   learning_rate=0.07, feature_bins=8, seed=0)
trace2 = run_training(sc2, cfg2)
print(f"{'epoch':>5} {'feature JS':>11} {'conditional-shift floor':>24}")
for e in range(0, trace2.n_epochs(), 25):
    print(f"{e:5d} {trace2.feature_js[e]:11.4f} {trace2.conditional_floor[e]:24.5f}")
print(f"{trace2.n_epochs() - 1:5d} {trace2.feature_js[-1]:11.4f} "
      f"{trace2.conditional_floor[-1]:24.5f}")
print("\nfeature-marginal JS falls while the floor on label-conditional shift")
print("rises: matching marginals under label shift must distort conditionals.")
