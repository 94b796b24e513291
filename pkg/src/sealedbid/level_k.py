"""Level-k opponent models and model averaging.

Level-1 is the non-strategic solve.  For level-2 the decision maker simulates
the opponent as a level-1 thinker: she draws his value and effective risk,
solves his bid problem against the composed CDF he would hold about her,
reduces the simulated bids to the fraction q of his representative value, and
then solves her own problem against the induced affine bid CDF.  Level-3
pushes the same machinery one level deeper and replaces the affine CDF with
the empirical distribution of simulated level-2 bids.

Two Monte Carlo policies are exposed because the reference constants pin them
down (see the package notes on reproducing the published tables):

* ``risk_wealth``: whether the opponent's own wealth enters his risk
  transform at its representative (mean) value or as a fresh draw per sample.
* ``domain_cap``: whether a simulated bidder's domain is capped by his value
  only, additionally by his drawn wealth, or whether value/wealth draws are
  rejection-resampled until wealth covers value.

Defaults ("representative", "value") reproduce the published level-2
constants; the alternatives are kept because the belief documents only make
all of value, wealth and risk jointly random under them.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from .bid_model import (BidCdf, ClosedFormBidCdf, EmpiricalBidCdf,
                        QuadratureBidCdf, ScaledLinearBidCdf)
from .distributions import PointMassDist, UniformDist
from .errors import InfeasibleScenarioError, ValidationError
from .risk import OpponentRiskBelief, sample_effective_opponent_risk_with_draws
from .scenario import Scenario
from .solver import (STAGE_LEVEL3_INNER, STAGE_LEVEL3_OUTER, STAGE_MAIN,
                     STAGE_OPPONENT, ExpectedBidOutcome, McEstimate,
                     expected_bid_given_cdf, maximize_scalar, solve_profit_bids,
                     stage_rng, _bid_domain, _mc_estimate)

NON_STRATEGIC = "non_strategic"
LEVEL_1 = "level_1"
LEVEL_2 = "level_2"
LEVEL_3 = "level_3"
CONCEPTS = (NON_STRATEGIC, LEVEL_1, LEVEL_2, LEVEL_3)

RISK_WEALTH_REPRESENTATIVE = "representative"
RISK_WEALTH_PER_DRAW = "per_draw"
CAP_VALUE = "value"
CAP_WEALTH = "wealth"
CAP_RESAMPLE = "resample"


def normalize_concept(name: str) -> str:
    canon = name.strip().lower().replace("-", "_")
    if canon == "nonstrategic":
        canon = NON_STRATEGIC
    if canon not in CONCEPTS:
        raise ValidationError("unknown solution concept %r (expected one of %s)"
                              % (name, ", ".join(CONCEPTS)))
    return canon


def compose_bid_cdf(value_dist: UniformDist, fraction_exponent: float) -> BidCdf:
    """The bid CDF induced by a uniform value belief and a power bid fraction."""
    floor = value_dist.support.lower
    if fraction_exponent == 8.0 and floor > 0.0:
        return ClosedFormBidCdf(floor, value_dist.support.upper)
    return QuadratureBidCdf(value_dist, floor, fraction_exponent)


def build_opponent_bid_cdf(scenario: Scenario) -> BidCdf:
    """Non-strategic opponent-bid CDF from the scenario's opponent beliefs."""
    return compose_bid_cdf(scenario.opponent.value, scenario.opponent.fraction_exponent)


def opponent_level1_bid(value: float, risk: float, win_cdf: BidCdf, reserve: float,
                        wealth: float | None = None) -> float:
    """One simulated level-1 bid: argmax of (value - c)^risk F(c).

    The domain is (max(reserve, floor), min(value, wealth)]; an empty domain
    raises InfeasibleScenarioError, which batch callers treat as a skipped
    draw.
    """
    hi = value if wealth is None else min(value, wealth)
    lo = max(reserve, win_cdf.support.lower)
    if not lo < hi:
        raise InfeasibleScenarioError("empty bid domain (%g, %g] for simulated bidder"
                                      % (lo, hi))
    best = maximize_scalar(
        lambda c: (value - c) ** risk * float(win_cdf.objective_cdf(c)),
        _domain(lo, hi))
    return best.argmax


def _domain(lo, hi):
    from .distributions import SupportInterval
    return SupportInterval(lo, hi)


def _simulated_bids(rng, n, value_dist, wealth_dist, risk_belief: OpponentRiskBelief,
                    own_wealth_belief, win_cdf: BidCdf, reserve: float,
                    risk_wealth: str, domain_cap: str, threads: int):
    """Simulate n optimizing bidders: draw (value, effective risk), solve each.

    Draw order is fixed: value, then (baseline risk, believed opponent wealth,
    own wealth), then any extra wealth draw the cap policy needs.  Returns the
    bids, the effective risks, and the skipped-draw count.
    """
    value = np.atleast_1d(value_dist.sample(rng, n))
    if risk_wealth == RISK_WEALTH_REPRESENTATIVE:
        transform_wealth_dist = PointMassDist(wealth_dist.mean())
    elif risk_wealth == RISK_WEALTH_PER_DRAW:
        transform_wealth_dist = wealth_dist
    else:
        raise ValidationError("unknown risk_wealth policy %r" % (risk_wealth,))
    risk, _, wealth_draw = sample_effective_opponent_risk_with_draws(
        risk_belief, own_wealth_belief, transform_wealth_dist, rng, n)
    risk = np.atleast_1d(np.asarray(risk, dtype=float))

    if domain_cap == CAP_VALUE:
        hi = value
    elif domain_cap == CAP_WEALTH:
        wealth = wealth_draw if risk_wealth == RISK_WEALTH_PER_DRAW \
            else np.atleast_1d(wealth_dist.sample(rng, n))
        hi = np.minimum(value, wealth)
    elif domain_cap == CAP_RESAMPLE:
        wealth = wealth_draw if risk_wealth == RISK_WEALTH_PER_DRAW \
            else np.atleast_1d(wealth_dist.sample(rng, n))
        need = wealth < value
        while np.any(need):
            idx = np.flatnonzero(need)
            value[idx] = np.atleast_1d(value_dist.sample(rng, idx.size))
            wealth[idx] = np.atleast_1d(wealth_dist.sample(rng, idx.size))
            need[idx] = wealth[idx] < value[idx]
        hi = value
    else:
        raise ValidationError("unknown domain_cap policy %r" % (domain_cap,))

    lo = max(reserve, win_cdf.support.lower)
    feasible = hi > lo
    skipped = int(n - feasible.sum())
    if not feasible.any():
        raise InfeasibleScenarioError("every simulated bid domain was empty")
    bids = solve_profit_bids(value[feasible], risk[feasible], lo, hi[feasible],
                             win_cdf.interpolated(), threads=threads)
    return bids, risk[feasible], value, skipped


def expected_opponent_bid(scenario: Scenario, *, n: int | None = None,
                          seed: int | None = None, threads: int = 1,
                          risk_wealth: str = RISK_WEALTH_REPRESENTATIVE,
                          domain_cap: str = CAP_VALUE):
    """Expected level-1 opponent bid and the induced bid fraction q.

    Returns ``(estimate, q, diagnostics)`` where q divides the mean simulated
    bid by the mean of the opponent-value belief.
    """
    n, seed = _resolve_mc(scenario, n, seed)
    if scenario.levelk is None:
        raise ValidationError("scenario has no levelk beliefs; level-2 needs them")
    lk = scenario.levelk
    inner_cdf = compose_bid_cdf(lk.value_belief, lk.fraction_exponent)
    rng = stage_rng(seed, STAGE_OPPONENT)
    bids, risks, values, skipped = _simulated_bids(
        rng, n, scenario.opponent.value, scenario.opponent.wealth,
        scenario.levelk_opponent_risk(), lk.wealth_belief, inner_cdf,
        scenario.reserve, risk_wealth, domain_cap, threads)
    estimate = _mc_estimate(bids, seed)
    q = estimate.mean / scenario.opponent.value.mean()
    diagnostics = {
        "skipped_draws": skipped,
        "q_from_sampled_values": float(estimate.mean / values.mean()),
        "mean_effective_risk": float(risks.mean()),
    }
    return estimate, q, diagnostics


def _resolve_mc(scenario: Scenario, n, seed):
    n = int(n) if n is not None else scenario.mc.n
    if n < 1:
        raise ValidationError("Monte Carlo draw count must be >= 1, got %d" % n)
    seed = seed if seed is not None else scenario.mc.seed
    if seed is None:
        raise ValidationError("a seed is required (scenario mc.seed or explicit argument)")
    return n, int(seed)


def solve_nonstrategic(scenario: Scenario, *, n=None, seed=None,
                       threads: int = 1) -> ExpectedBidOutcome:
    """Expected optimal bid against a non-strategic opponent."""
    n, seed = _resolve_mc(scenario, n, seed)
    win_cdf = build_opponent_bid_cdf(scenario)
    return expected_bid_given_cdf(
        scenario.bidder.value, scenario.bidder.wealth, scenario.bidder.risk,
        scenario.opponent.wealth, win_cdf, reserve=scenario.reserve,
        n=n, seed=seed, stage=STAGE_MAIN, threads=threads)


def solve_level2(scenario: Scenario, *, n=None, seed=None, threads: int = 1,
                 q_override: float | None = None,
                 risk_wealth: str = RISK_WEALTH_REPRESENTATIVE,
                 domain_cap: str = CAP_VALUE) -> ExpectedBidOutcome:
    """Level-2 solve: simulate the opponent as level-1, then best-respond."""
    n, seed = _resolve_mc(scenario, n, seed)
    diagnostics = {}
    if q_override is not None:
        if not 0.0 < q_override <= 1.0:
            raise ValidationError("q override must lie in (0, 1], got %g" % q_override)
        q = float(q_override)
    else:
        inner_est, q, inner_diag = expected_opponent_bid(
            scenario, n=n, seed=seed, threads=threads,
            risk_wealth=risk_wealth, domain_cap=domain_cap)
        diagnostics["opponent_bid_mean"] = inner_est.mean
        diagnostics["opponent_bid_std_error"] = inner_est.std_error
        diagnostics.update(inner_diag)
    if not 0.0 < q <= 1.0:
        raise ValidationError("induced bid fraction q=%g outside (0, 1]" % q)
    win_cdf = ScaledLinearBidCdf(scenario.opponent.value, q, clamp=scenario.clamp)
    outcome = expected_bid_given_cdf(
        scenario.bidder.value, scenario.bidder.wealth, scenario.bidder.risk,
        scenario.opponent.wealth, win_cdf, reserve=scenario.reserve,
        n=n, seed=seed, stage=STAGE_MAIN, threads=threads)
    diagnostics["q"] = q
    outcome.diagnostics.update(diagnostics)
    return outcome


def solve_level3(scenario: Scenario, *, n=None, seed=None, threads: int = 1,
                 risk_wealth: str = RISK_WEALTH_REPRESENTATIVE,
                 domain_cap: str = CAP_VALUE) -> ExpectedBidOutcome:
    """Level-3 solve: simulate the opponent as a level-2 thinker.

    The nested fraction uses sqrt(n) draws so total solver work stays O(n).
    The reported standard error adds the propagated nested-fraction noise to
    the outer sampling error: simulated bids against the affine CDF move by
    floor * a/(1+a) per unit of q, so the whole empirical CDF is shifted by
    one standard error of q and the final stage re-solved.
    """
    n, seed = _resolve_mc(scenario, n, seed)
    if scenario.levelk is None or scenario.level3 is None:
        raise ValidationError("level-3 needs both levelk and level3 belief blocks")
    lk, l3 = scenario.levelk, scenario.level3

    # nested fraction: what the level-2 opponent thinks my level-1 bids average
    n_inner = max(2, math.isqrt(n))
    inner_cdf = compose_bid_cdf(l3.value_belief, l3.fraction_exponent)
    rng_inner = stage_rng(seed, STAGE_LEVEL3_INNER)
    inner_bids, _, _, inner_skipped = _simulated_bids(
        rng_inner, n_inner, lk.value_belief, lk.wealth_belief, l3.self_risk_belief,
        l3.wealth_belief, inner_cdf, scenario.reserve, risk_wealth, domain_cap, threads)
    inner_est = _mc_estimate(inner_bids, seed)
    q_inner = inner_est.mean / lk.value_belief.mean()
    if not 0.0 < q_inner <= 1.0:
        raise ValidationError("nested bid fraction q=%g outside (0, 1]" % q_inner)
    q_se = inner_est.std_error / lk.value_belief.mean()

    # opponent as level-2: his bids against the scaled CDF of my value
    opp_cdf = ScaledLinearBidCdf(lk.value_belief, q_inner, clamp=scenario.clamp)
    rng_outer = stage_rng(seed, STAGE_LEVEL3_OUTER)
    opp_bids, opp_risks, _, outer_skipped = _simulated_bids(
        rng_outer, n, scenario.opponent.value, scenario.opponent.wealth,
        scenario.levelk_opponent_risk(), lk.wealth_belief, opp_cdf,
        scenario.reserve, risk_wealth, domain_cap, threads)

    def final_solve(bid_sample):
        empirical = EmpiricalBidCdf(bid_sample)
        return expected_bid_given_cdf(
            scenario.bidder.value, scenario.bidder.wealth, scenario.bidder.risk,
            scenario.opponent.wealth, empirical, reserve=scenario.reserve,
            n=n, seed=seed, stage=STAGE_MAIN, threads=threads)

    outcome = final_solve(opp_bids)
    outer_se = outcome.bid.std_error

    # propagate nested-fraction uncertainty through a shifted re-solve
    floor = lk.value_belief.support.lower
    shift = floor * opp_risks / (1.0 + opp_risks) * q_se
    shifted = final_solve(opp_bids + shift)
    inner_effect = abs(shifted.bid.mean - outcome.bid.mean)
    outcome.bid = replace(outcome.bid, std_error=math.hypot(outer_se, inner_effect))
    outcome.diagnostics.update({
        "q": q_inner,
        "q_std_error": q_se,
        "nested_draws": int(n_inner),
        "nested_skipped_draws": inner_skipped,
        "opponent_skipped_draws": outer_skipped,
        "outer_std_error": float(outer_se),
        "nested_std_error_effect": float(inner_effect),
        "opponent_bid_mean": float(opp_bids.mean()),
    })
    return outcome


def solve_concept(scenario: Scenario, concept: str, *, n=None, seed=None,
                  threads: int = 1, q_override: float | None = None,
                  risk_wealth: str = RISK_WEALTH_REPRESENTATIVE,
                  domain_cap: str = CAP_VALUE) -> ExpectedBidOutcome:
    """Dispatch a scenario to the solver for the requested solution concept."""
    concept = normalize_concept(concept)
    if concept in (NON_STRATEGIC, LEVEL_1):
        return solve_nonstrategic(scenario, n=n, seed=seed, threads=threads)
    if concept == LEVEL_2:
        return solve_level2(scenario, n=n, seed=seed, threads=threads,
                            q_override=q_override, risk_wealth=risk_wealth,
                            domain_cap=domain_cap)
    return solve_level3(scenario, n=n, seed=seed, threads=threads,
                        risk_wealth=risk_wealth, domain_cap=domain_cap)


def model_average(results, weights) -> float:
    """Weighted average of expected bids across solution concepts.

    ``results`` maps concept name to expected bid; ``weights`` must cover
    exactly the same concepts with nonnegative weights summing to 1.
    """
    norm_results = {normalize_concept(k): float(v) for k, v in results.items()}
    weight_map = {normalize_concept(k): float(w) for k, w in weights.items()}
    if set(weight_map) != set(norm_results):
        raise ValidationError("weights cover %s but results cover %s"
                              % (sorted(weight_map), sorted(norm_results)))
    total = sum(weight_map.values())
    if any(w < 0.0 for w in weight_map.values()):
        raise ValidationError("concept weights must be nonnegative")
    if abs(total - 1.0) > 1e-9:
        raise ValidationError("concept weights must sum to 1 (+-1e-9), got %.12g" % total)
    return float(sum(weight_map[k] * norm_results[k] for k in norm_results))
