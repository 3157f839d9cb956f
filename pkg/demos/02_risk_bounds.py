"""Every risk bound, evaluated against exactly-computed risks.

Each verifier returns a BoundReport pairing the bound with the true quantity
and a holds verdict at tolerance 1e-9. The randomized suites at the end run
hundreds of instances per bound; note that three of the implemented constants
are genuinely too tight (see the printed violation counts) -- the suites
report this instead of hiding it.
"""

import numpy as np

from jsda import (
    JointPmf,
    LossTable,
    TailParams,
    conditional_shift_lower_bound,
    decomposed_upper_bound,
    intrinsic_error_upper_bound,
    joint_upper_bound,
    matched_conditional_band,
    open_set_band,
    open_set_label_pair,
    prediction_gap_lower_bound,
    risk_band_from_values,
    run_suite,
    violations,
    zero_one_band,
)
from jsda.suites import random_joint_pair


def banner(title):
    print(f"\n{'=' * 72}\n{title}\n{'=' * 72}")


def show(report):
    lo = f"{report.bound_lo:+.5f}" if np.isfinite(report.bound_lo) else "  -inf"
    hi = f"{report.bound_hi:+.5f}" if np.isfinite(report.bound_hi) else "  +inf"
    print(f"{report.name:28s} lhs={report.lhs:+.5f} in [{lo}, {hi}] "
          f"holds={report.holds}")


rng = np.random.default_rng(42)

banner("Upper bounds on the target risk from the joint divergence")
s, t = random_joint_pair(rng)
loss = LossTable(2.0 * rng.random(s.shape))
g = loss.range_g
show(joint_upper_bound(s, t, loss))
show(joint_upper_bound(s, t, loss, TailParams("subgaussian", sigma=g / 2)))
show(joint_upper_bound(s, t, loss, TailParams("subgamma", sigma=g * g / 4, a=0.2)))

banner("Two-sided band for zero-one losses, plus the worked numbers")
zo = LossTable(rng.integers(0, 2, s.shape).astype(float))
show(zero_one_band(s, t, zo))
band = risk_band_from_values(0.2, 2e-4)
print(f"R_S=0.2, JS=2e-4  ->  band [{band.bound_lo:.3f}, {band.bound_hi:.3f}]")

banner("Marginal + conditional decompositions (both axes)")
for axis in ("x", "y"):
    r = decomposed_upper_bound(s, t, loss, axis=axis)
    show(r)
    print(f"   chain check: marginal {r.extras['marginal_js_nats']:.5f} + "
          f"conditional {r.extras['conditional_js_nats']:.5f} >= "
          f"joint {r.extras['joint_js_nats']:.5f}")

banner("Intrinsic error (conditional entropy) transfer")
r = intrinsic_error_upper_bound(s, t)
show(r)
print("   caution: this inequality is not universally valid; near")
print("   deterministic conditionals it fails (the verifier reports it).")
bad_s = JointPmf((0, 1), (0, 1), np.array([[0.5, 0.0], [0.5, 0.0]]))
bad_t = JointPmf((0, 1), (0, 1), np.array([[0.45, 0.05], [0.45, 0.05]]))
show(intrinsic_error_upper_bound(bad_s, bad_t))

banner("Open-set band: partially overlapping uniform label spaces")
for alpha in (0.9, 0.5, 0.2):
    r = open_set_band(0.3, alpha=alpha, delta=0.0)
    print(f"alpha={alpha:.1f}: band width [{r.bound_lo:+.4f}, {r.bound_hi:+.4f}]")
s_y, t_y, js = open_set_label_pair(10, 0.5)
print(f"explicit N=10, 5 shared classes: measured JS = {js:.4f} nats "
      f"<= 1-alpha = 0.5")

banner("Matched-conditional band and the pseudo-label floor")
nz = 5
cond = rng.uniform(0.1, 1.0, (2, nz))
cond /= cond.sum(axis=1, keepdims=True)


def matched(marg):
    mass = cond.T * np.asarray(marg)[None, :]
    return JointPmf(tuple(range(nz)), (0, 1), mass / mass.sum())


zo5 = LossTable(rng.integers(0, 2, (nz, 2)).astype(float))
show(matched_conditional_band(matched([0.5, 0.5]), matched([0.9, 0.1]), zo5))
show(conditional_shift_lower_bound(s, t))
from jsda import Pmf  # noqa: E402

p_y = Pmf((0, 1), np.array([0.5, 0.5]))
show(prediction_gap_lower_bound(p_y, p_y, p_y, Pmf((0, 1), np.array([0.95, 0.05])),
                                observed_feature_js=0.4))

banner("Randomized suites (500 instances each)")
for name in ("joint-upper", "zero-one-band", "decomposition-y", "intrinsic-error",
             "matched-conditional", "prediction-gap", "conditional-shift-floor"):
    reports = run_suite(name, 500, seed=7)
    bad = violations(reports)
    print(f"{name:26s} {len(bad):3d}/{len(reports)} violations"
          + ("   <- genuine counterexamples to the stated constants" if bad else ""))
