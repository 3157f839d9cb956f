"""Risk-bound calculators and empirical verifiers.

Each function computes one bound together with the exactly-computed quantity
it constrains, and returns a :class:`BoundReport` whose ``holds`` verdict is
decided at tolerance 1e-9. All bound arithmetic is in nats: the bounded-loss
upper bound comes from a sub-Gaussian moment-generating-function argument
that only closes under natural logarithms. Where a base-2 restatement is
useful (the intrinsic-error bound) it is attached to ``extras``.

A caution on the intrinsic-error transfer bound: the inequality as
implemented is not universally valid. Near deterministic conditionals the
entropy gap can exceed sqrt(delta2/2) (e.g. S(y|x)=(1,0) vs T(y|x)=(0.9,0.1)
with equal X-marginals violates it by ~0.19 nats). The verifier reports such
instances honestly as ``holds=False``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Mapping, Sequence

import numpy as np

from .divergence import js_divergence
from .pmf import JointPmf, LossTable, Pmf, conditionals, entropy_stats, expected_risk, marginals

VERDICT_TOL = 1e-9
HYPOTHESIS_TOL = 1e-9

TailVariant = Literal["bounded", "subgaussian", "subgamma"]
MarginalAxis = Literal["x", "y"]


class BoundInputError(ValueError):
    """Inputs violate a bound's hypotheses or shapes."""


@dataclass(frozen=True)
class TailParams:
    """Loss tail description selecting the upper-bound variant.

    ``bounded`` uses the loss range g; ``subgaussian`` uses the
    variance-factor sigma; ``subgamma`` uses the (sigma, a) pair of its
    moment-generating-function envelope.
    """

    variant: TailVariant = "bounded"
    g: float = 1.0
    sigma: float = 0.0
    a: float = 0.0

    def __post_init__(self) -> None:
        if self.variant == "bounded" and not self.g >= 0:
            raise BoundInputError("bounded variant needs loss range g >= 0")
        if self.variant == "subgaussian" and not self.sigma >= 0:
            raise BoundInputError("subgaussian variant needs sigma >= 0")
        if self.variant == "subgamma" and not (self.sigma >= 0 and self.a >= 0):
            raise BoundInputError("subgamma variant needs sigma >= 0 and a >= 0")
        if self.variant not in ("bounded", "subgaussian", "subgamma"):
            raise BoundInputError(f"unknown tail variant {self.variant!r}")


@dataclass(frozen=True)
class BoundReport:
    """One verified bound: the quantity, the bound, the slack, the verdict."""

    name: str
    lhs: float
    bound_lo: float = -math.inf
    bound_hi: float = math.inf
    inputs_digest: str = ""
    extras: Mapping[str, float] = field(default_factory=dict)
    slack_lo: float = field(init=False)
    slack_hi: float = field(init=False)
    holds: bool = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "slack_lo", self.lhs - self.bound_lo)
        object.__setattr__(self, "slack_hi", self.bound_hi - self.lhs)
        ok = (self.bound_lo - VERDICT_TOL <= self.lhs <= self.bound_hi + VERDICT_TOL)
        object.__setattr__(self, "holds", bool(ok))

    def to_row(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "bound_lo": self.bound_lo,
                "bound_hi": self.bound_hi, "holds": self.holds}


def _joint_digest(s: JointPmf, t: JointPmf, g: float | None = None) -> str:
    nx, ny = s.shape
    core = f"|X|={nx},|Y|={ny}"
    return core if g is None else f"{core},G={g:.4g}"


def _gap_term(tail: TailParams, js_nats: float) -> float:
    """The divergence-driven gap for the chosen tail variant, in nats."""
    if tail.variant == "bounded":
        return tail.g / math.sqrt(2.0) * math.sqrt(js_nats)
    if tail.variant == "subgaussian":
        return tail.sigma * math.sqrt(2.0 * js_nats)
    return (tail.sigma + 1.0) * math.sqrt(2.0 * js_nats) + 2.0 * tail.a * js_nats


def joint_upper_bound(s: JointPmf, t: JointPmf, l: LossTable,
                      tail: TailParams | None = None) -> BoundReport:
    """Upper bound on the target risk from the joint divergence.

    lhs is the exact target risk; the bound is the exact source risk plus
    the tail-dependent gap: (G/sqrt(2))*sqrt(JS) for bounded losses,
    sigma*sqrt(2 JS) for sub-Gaussian ones, and
    (sigma+1)*sqrt(2 JS) + 2a*JS for the sub-Gamma envelope.
    """
    if tail is None:
        tail = TailParams("bounded", g=l.range_g)
    if tail.variant == "bounded" and tail.g + 1e-12 < l.range_g:
        raise BoundInputError(
            f"tail range g={tail.g} smaller than actual loss range {l.range_g}")
    r_t = expected_risk(t, l)
    r_s = expected_risk(s, l)
    js = js_divergence(s, t, "e")
    hi = r_s + _gap_term(tail, js)
    return BoundReport(
        name=f"joint_upper_{tail.variant}", lhs=r_t, bound_hi=hi,
        inputs_digest=_joint_digest(s, t, l.range_g),
        extras={"source_risk": r_s, "joint_js_nats": js})


def zero_one_band(s: JointPmf, t: JointPmf, l: LossTable) -> BoundReport:
    """Two-sided band R_S - sqrt(JS) <= R_T <= R_S + sqrt(JS)/sqrt(2).

    Only valid for zero-one losses: the lower side rests on a Bernoulli
    data-processing argument that needs L in {0, 1}.
    """
    if not l.is_zero_one:
        raise BoundInputError("the risk band requires zero-one loss")
    r_t = expected_risk(t, l)
    r_s = expected_risk(s, l)
    js = js_divergence(s, t, "e")
    return BoundReport(
        name="zero_one_band", lhs=r_t,
        bound_lo=r_s - math.sqrt(js),
        bound_hi=r_s + math.sqrt(js) / math.sqrt(2.0),
        inputs_digest=_joint_digest(s, t, 1.0),
        extras={"source_risk": r_s, "joint_js_nats": js})


def risk_band_from_values(r_s: float, js_nats: float) -> BoundReport:
    """The zero-one band evaluated from already-known (R_S, JS) values."""
    if js_nats < 0:
        raise BoundInputError("negative divergence")
    return BoundReport(
        name="zero_one_band", lhs=r_s,
        bound_lo=r_s - math.sqrt(js_nats),
        bound_hi=r_s + math.sqrt(js_nats) / math.sqrt(2.0),
        inputs_digest=f"R_S={r_s:.4g},JS={js_nats:.4g}")


def _conditional_shift_terms(s: JointPmf, t: JointPmf,
                             axis: MarginalAxis) -> tuple[float, float]:
    """(marginal JS, summed expected conditional JS) along one axis, nats."""
    if s.x_atoms != t.x_atoms or s.y_atoms != t.y_atoms:
        raise BoundInputError("decomposition requires identical supports")
    cond_axis = "y|x" if axis == "x" else "x|y"
    s_marg = s.mass.sum(axis=1) if axis == "x" else s.mass.sum(axis=0)
    t_marg = t.mass.sum(axis=1) if axis == "x" else t.mass.sum(axis=0)
    atoms = s.x_atoms if axis == "x" else s.y_atoms
    s_cond = conditionals(s, cond_axis)
    t_cond = conditionals(t, cond_axis)
    marg_js = js_divergence(Pmf(atoms, s_marg / s_marg.sum()),
                            Pmf(atoms, t_marg / t_marg.sum()), "e")
    cond_sum = 0.0
    for weights in (t_marg, s_marg):
        terms = []
        for atom, w in zip(atoms, weights.tolist()):
            if w <= 0.0:
                continue
            if atom not in s_cond or atom not in t_cond:
                raise BoundInputError(f"missing conditional at atom {atom!r}")
            terms.append(w * js_divergence(t_cond[atom], s_cond[atom], "e"))
        cond_sum += math.fsum(terms)
    return marg_js, cond_sum


def decomposed_upper_bound(s: JointPmf, t: JointPmf, l: LossTable,
                           axis: MarginalAxis = "x",
                           tail: TailParams | None = None) -> BoundReport:
    """Marginal-plus-conditional decomposition of the joint upper bound.

    axis="x" splits into feature-marginal shift and label-conditional shift;
    axis="y" into label-marginal shift and per-class feature-conditional
    shift. ``extras`` records the chain-rule check
    marginal + conditional >= joint JS, which the decomposition rests on.
    """
    if tail is None:
        tail = TailParams("bounded", g=l.range_g)
    marg_js, cond_js = _conditional_shift_terms(s, t, axis)
    r_t = expected_risk(t, l)
    r_s = expected_risk(s, l)
    joint_js = js_divergence(s, t, "e")
    if tail.variant == "bounded":
        gap = tail.g / math.sqrt(2.0) * (math.sqrt(marg_js) + math.sqrt(cond_js))
    elif tail.variant == "subgaussian":
        gap = tail.sigma * math.sqrt(2.0) * (math.sqrt(marg_js) + math.sqrt(cond_js))
    else:
        gap = ((tail.sigma + 1.0) * math.sqrt(2.0)
               * (math.sqrt(marg_js) + math.sqrt(cond_js))
               + 2.0 * tail.a * (marg_js + cond_js))
    decomposition_slack = marg_js + cond_js - joint_js
    return BoundReport(
        name=f"decomposed_upper_{axis}", lhs=r_t, bound_hi=r_s + gap,
        inputs_digest=_joint_digest(s, t, l.range_g),
        extras={"source_risk": r_s, "joint_js_nats": joint_js,
                "marginal_js_nats": marg_js, "conditional_js_nats": cond_js,
                "decomposition_slack": decomposition_slack,
                "decomposition_holds": float(decomposition_slack >= -VERDICT_TOL)})


def intrinsic_error_upper_bound(s: JointPmf, t: JointPmf) -> BoundReport:
    """Transfer bound on the target conditional entropy H(Y_t|X_t).

    Uses the tightest admissible constants: eps = H(Y_s|X_s), delta1 = the
    X-marginal JS, delta2 = the max over shared x of the conditional JS, all
    in nats; the claimed bound is eps + sqrt(delta2/2) +
    (sqrt(delta1)/2) log|Y|. A base-2 restatement is in ``extras``.
    This inequality can genuinely fail near deterministic conditionals; the
    report then says so.
    """
    if s.x_atoms != t.x_atoms or s.y_atoms != t.y_atoms:
        raise BoundInputError("intrinsic-error bound requires identical supports")
    s_x = s.mass.sum(axis=1)
    t_x = t.mass.sum(axis=1)
    s_cond = conditionals(s, "y|x")
    t_cond = conditionals(t, "y|x")
    delta2 = 0.0
    for atom, sw, tw in zip(s.x_atoms, s_x.tolist(), t_x.tolist()):
        if sw <= 0.0 and tw <= 0.0:
            continue
        if atom not in s_cond or atom not in t_cond:
            raise BoundInputError(f"missing conditional at atom {atom!r}")
        delta2 = max(delta2, js_divergence(s_cond[atom], t_cond[atom], "e"))
    delta1 = js_divergence(Pmf(s.x_atoms, s_x / s_x.sum()),
                           Pmf(t.x_atoms, t_x / t_x.sum()), "e")
    _, eps = entropy_stats(s, "e")
    _, lhs = entropy_stats(t, "e")
    n_labels = len(s.y_atoms)
    hi = eps + math.sqrt(delta2 / 2.0) + math.sqrt(delta1) / 2.0 * math.log(n_labels)
    ln2 = math.log(2.0)
    hi_bits = (eps / ln2 + math.sqrt(delta2 / ln2 / 2.0)
               + math.sqrt(delta1 / ln2) / 2.0 * math.log2(n_labels))
    return BoundReport(
        name="intrinsic_error_upper", lhs=lhs, bound_hi=hi,
        inputs_digest=_joint_digest(s, t),
        extras={"eps_nats": eps, "delta1_nats": delta1, "delta2_nats": delta2,
                "lhs_bits": lhs / ln2, "bound_hi_bits": hi_bits})


def open_set_band(r_s: float, alpha: float, delta: float,
                  r_t: float | None = None) -> BoundReport:
    """Risk band under partially overlapping uniform label spaces.

    alpha is the shared fraction of classes, delta an upper bound on the
    per-class feature-conditional JS. The band is
    R_S - (sqrt(1-alpha) + 2 sqrt(delta)) from below and
    R_S + (sqrt(1-alpha) + 2 sqrt(delta))/sqrt(2) from above. When a measured
    target risk is supplied it becomes the lhs; otherwise the report is the
    band itself around R_S.
    """
    if not 0.0 < alpha <= 1.0:
        raise BoundInputError("overlap fraction alpha must lie in (0, 1]")
    if delta < 0.0:
        raise BoundInputError("conditional-shift level delta must be >= 0")
    width = math.sqrt(1.0 - alpha) + 2.0 * math.sqrt(delta)
    lhs = r_s if r_t is None else r_t
    return BoundReport(
        name="open_set_band", lhs=lhs,
        bound_lo=r_s - width, bound_hi=r_s + width / math.sqrt(2.0),
        inputs_digest=f"alpha={alpha:.4g},delta={delta:.4g}",
        extras={"source_risk": r_s, "band_width_term": width})


def open_set_label_pair(n: int, alpha: float) -> tuple[Pmf, Pmf, float]:
    """Uniform label marginals over two size-n class sets sharing floor(alpha*n).

    Returns (source Pmf, target Pmf, measured JS in nats) on the union
    support. The measured JS equals (1 - shared/n) * ln 2, which never
    exceeds 1 - alpha, the quantity the band uses.
    """
    if n < 1:
        raise BoundInputError("need at least one class")
    if not 0.0 < alpha <= 1.0:
        raise BoundInputError("overlap fraction alpha must lie in (0, 1]")
    shared = int(math.floor(alpha * n))
    union = tuple(range(2 * n - shared))
    s_probs = np.zeros(len(union))
    t_probs = np.zeros(len(union))
    s_probs[:n] = 1.0 / n
    t_probs[n - shared:] = 1.0 / n
    s_y = Pmf(union, s_probs)
    t_y = Pmf(union, t_probs)
    return s_y, t_y, js_divergence(t_y, s_y, "e")


def matched_conditional_band(s: JointPmf, t: JointPmf, l: LossTable) -> BoundReport:
    """Band R_S +- sqrt(2 JS(S(y), T(y))) under matched class conditionals.

    Hypotheses are checked, not assumed: binary label space, zero-one loss,
    and per-class conditional JS below 1e-9 (violation raises).
    """
    if len(s.y_atoms) != 2 or len(t.y_atoms) != 2:
        raise BoundInputError("matched-conditional band requires |Y| = 2")
    if not l.is_zero_one:
        raise BoundInputError("matched-conditional band requires zero-one loss")
    if s.x_atoms != t.x_atoms or s.y_atoms != t.y_atoms:
        raise BoundInputError("matched-conditional band requires identical supports")
    s_cond = conditionals(s, "x|y")
    t_cond = conditionals(t, "x|y")
    for y in s.y_atoms:
        if y not in s_cond or y not in t_cond:
            raise BoundInputError(f"missing class conditional for label {y!r}")
        gap = js_divergence(s_cond[y], t_cond[y], "e")
        if gap > HYPOTHESIS_TOL:
            raise BoundInputError(
                f"matched-conditional hypothesis violated at label {y!r}: JS={gap:.3g}")
    _, s_y = marginals(s)
    _, t_y = marginals(t)
    label_js = js_divergence(s_y, t_y, "e")
    r_s = expected_risk(s, l)
    r_t = expected_risk(t, l)
    width = math.sqrt(2.0 * label_js)
    return BoundReport(
        name="matched_conditional_band", lhs=r_t,
        bound_lo=r_s - width, bound_hi=r_s + width,
        inputs_digest=_joint_digest(s, t, 1.0),
        extras={"source_risk": r_s, "label_js_nats": label_js})


def prediction_gap_lower_bound(s_y: Pmf, t_y: Pmf, s_pred: Pmf, t_pred: Pmf,
                               observed_feature_js: float | None = None) -> BoundReport:
    """Lower bound on the feature-marginal JS from pseudo-label quality.

    With P = JS(T(y) || T_pred(y)), eps1 = JS(S(y) || S_pred(y)) and
    eps2 = JS(S(y) || T(y)), the latent feature divergence is at least
    (sqrt(P) - sqrt(eps1) - sqrt(eps2))^2, clamped at zero. Supply the
    measured feature JS to verify a full pipeline.
    """
    p = js_divergence(t_y, t_pred, "e")
    eps1 = js_divergence(s_y, s_pred, "e")
    eps2 = js_divergence(s_y, t_y, "e")
    root = math.sqrt(p) - math.sqrt(eps1) - math.sqrt(eps2)
    lo = max(0.0, root) ** 2
    lhs = lo if observed_feature_js is None else observed_feature_js
    return BoundReport(
        name="prediction_gap_lower", lhs=lhs, bound_lo=lo,
        inputs_digest=f"|Y|={len(s_y)}",
        extras={"p_nats": p, "eps1_nats": eps1, "eps2_nats": eps2})


def label_conditional_floor(js_label_nats: float, js_feature_nats: float) -> float:
    """2 (sqrt(label JS) - sqrt(feature JS))^2, clamped at zero.

    The floor the label-conditional shift cannot go below once the feature
    marginals have been matched; shrinking the feature JS with a fixed label
    JS raises it.
    """
    if js_label_nats < 0 or js_feature_nats < 0:
        raise BoundInputError("divergences must be nonnegative")
    root = math.sqrt(js_label_nats) - math.sqrt(js_feature_nats)
    return 2.0 * max(0.0, root) ** 2


def conditional_shift_lower_bound(s: JointPmf, t: JointPmf) -> BoundReport:
    """Lower bound on the summed expected label-conditional shift over Z.

    lhs = E_{z~T} JS(S(y|z) || T(y|z)) + E_{z~S} JS(S(y|z) || T(y|z));
    the floor is :func:`label_conditional_floor` of the label-marginal and
    feature-marginal divergences.
    """
    marg_js, cond_sum = _conditional_shift_terms(s, t, "x")
    _, s_y = marginals(s)
    _, t_y = marginals(t)
    label_js = js_divergence(t_y, s_y, "e")
    lo = label_conditional_floor(label_js, marg_js)
    return BoundReport(
        name="conditional_shift_lower", lhs=cond_sum, bound_lo=lo,
        inputs_digest=_joint_digest(s, t),
        extras={"label_js_nats": label_js, "feature_js_nats": marg_js})


def reweighted_convergence_check(scenario, n_grid: Sequence[int],
                                 repeats: int = 50, seed: int = 0) -> list[dict]:
    """Empirical convergence of the reweighted source risk to the target risk.

    For a matched-conditional scenario and the fixed midpoint classifier,
    draws ``repeats`` source samples of each size in ``n_grid``, reweights
    the empirical risk with the true label ratio, and tabulates the gap to
    the exactly-computed target risk. One row per sample size with the mean
    and median gap and the median of gap*sqrt(n); no rate constant is
    asserted, only reported.
    """
    from .labelshift import WeightVector, reweighted_risk
    from .scenarios import linear_zero_one_risk, midpoint_classifier, sample

    w_vec, b = midpoint_classifier(scenario)
    r_t = linear_zero_one_risk(scenario, "target", w_vec, b)
    s_y = scenario.source_label_marginal
    t_y = scenario.target_label_marginal
    alpha = np.where(s_y > 0, t_y / np.where(s_y > 0, s_y, 1.0), 0.0)
    weights = WeightVector(alpha)
    rows = []
    for n in n_grid:
        gaps = []
        for r in range(repeats):
            batch = sample(scenario, "source", int(n), stream=(seed, r))
            preds = (batch.xs @ w_vec + b > 0).astype(int)
            losses = (preds != batch.ys).astype(float)
            gaps.append(abs(reweighted_risk(batch.ys, losses, weights) - r_t))
        gaps_arr = np.array(gaps)
        rows.append({
            "n": int(n),
            "mean_gap": float(gaps_arr.mean()),
            "median_gap": float(np.median(gaps_arr)),
            "median_gap_sqrt_n": float(np.median(gaps_arr) * math.sqrt(n)),
            "gaps": gaps_arr.tolist(),
        })
    return rows
