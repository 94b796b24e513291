"""Scalar maximization of expected utility and Monte Carlo expected bids.

The maximizer is deliberately simple and fully specified: a coarse scan on
1001 equally spaced points of the half-open domain, then golden-section
refinement of the winning bracket to absolute width 1e-6, with ties broken
toward the smallest bid.  ``solve_profit_bids`` runs the identical algorithm
element-wise over arrays of draws, so one Monte Carlo draw solved in a batch
gives bit-for-bit the same bid as a scalar solve, regardless of chunking or
worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .bid_model import BidCdf
from .distributions import SupportInterval
from .errors import InfeasibleScenarioError, NumericalError, ValidationError
from .risk import RiskProfile, wealth_adjusted_risk
from .utility import BidderState, legacy_expected_utility

GRID_POINTS = 1001
REFINE_TOL = 1e-6
CHUNK = 8192
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = 1.0 - _INVPHI

# deterministic per-stage substreams: stage k of root seed s is
# SeedSequence(s, spawn_key=(k,)).  Stage layout is fixed across the package.
STAGE_MAIN = 0          # final expected-bid draws (opponent wealth)
STAGE_OPPONENT = 1      # opponent-bid draws behind the level-2 fraction
STAGE_LEVEL3_OUTER = 2  # simulated level-2 opponent bids
STAGE_LEVEL3_INNER = 3  # nested fraction draws inside the level-3 solve


def stage_rng(seed: int, stage: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(stage),)))


class MaximizeResult(NamedTuple):
    argmax: float
    value: float
    evaluations: int


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error and provenance."""

    mean: float
    std_error: float
    n: int
    seed: int


@dataclass(frozen=True)
class SolveResult:
    """One point solve: optimal bid with its reported probability and utility."""

    bid: float
    win_prob: float
    expected_utility: float
    domain: SupportInterval
    evaluations: int


@dataclass
class ExpectedBidOutcome:
    """Monte Carlo expected optimal bid and companions, reported at the mean bid."""

    bid: McEstimate
    effective_risk: McEstimate
    win_prob: float
    expected_utility: float
    domain: SupportInterval
    diagnostics: dict = field(default_factory=dict)


def _check_finite(fx: float, x: float) -> float:
    if not math.isfinite(fx):
        raise NumericalError("objective returned non-finite value %r at %.12g" % (fx, x))
    return fx


def maximize_scalar(objective: Callable[[float], float], domain: SupportInterval,
                    grid_points: int = GRID_POINTS, tol: float = REFINE_TOL) -> MaximizeResult:
    """Maximize a scalar objective over the half-open domain (lower, upper].

    Coarse scan on ``grid_points`` equally spaced points (the open lower
    endpoint is never evaluated), then golden-section refinement of the best
    bracket to absolute width ``tol``.  The best evaluated point is only
    displaced by a strictly larger value, so exact ties resolve to the
    smallest bid.
    """
    lo, hi = domain.lower, domain.upper
    step = (hi - lo) / grid_points
    evals = 0
    x_best = f_best = None
    best_k = 0
    xs = [lo + k * step for k in range(1, grid_points + 1)]
    xs[-1] = hi
    for k, x in enumerate(xs):
        fx = _check_finite(objective(x), x)
        evals += 1
        if f_best is None or fx > f_best:
            x_best, f_best, best_k = x, fx, k
    a = xs[best_k - 1] if best_k >= 1 else lo
    b = xs[best_k + 1] if best_k + 1 < grid_points else hi
    h = b - a
    x1, x2 = a + _INVPHI2 * h, a + _INVPHI * h
    f1 = _check_finite(objective(x1), x1)
    f2 = _check_finite(objective(x2), x2)
    evals += 2
    for x, fx in ((x1, f1), (x2, f2)):
        if fx > f_best:
            x_best, f_best = x, fx
    while h > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            h = b - a
            x1 = a + _INVPHI2 * h
            f1 = _check_finite(objective(x1), x1)
            xn, fn = x1, f1
        else:
            a, x1, f1 = x1, x2, f2
            h = b - a
            x2 = a + _INVPHI * h
            f2 = _check_finite(objective(x2), x2)
            xn, fn = x2, f2
        evals += 1
        if fn > f_best:
            x_best, f_best = xn, fn
    return MaximizeResult(float(x_best), float(f_best), evals)


def _bid_domain(reserve: float, cdf_floor: float, value: float, wealth: float) -> SupportInterval:
    lo = max(reserve, cdf_floor)
    hi = min(value, wealth)
    if not lo < hi:
        raise InfeasibleScenarioError(
            "empty bid domain: max(reserve=%g, bid floor=%g) >= min(value=%g, wealth=%g)"
            % (reserve, cdf_floor, value, wealth))
    return SupportInterval(lo, hi)


def optimal_bid(state: BidderState, win_cdf: BidCdf, reserve: float = 0.0) -> SolveResult:
    """Maximize w + (v - b)^a F(b) over (max(reserve, floor), min(v, w)].

    The optimizer maximizes the wealth-free profit term, which leaves the
    argmax exactly invariant under wealth shifts; the scaled-linear CDF's
    clamping policy decides whether F enters clamped.  Reported winning
    probability and expected utility always use the clamped CDF.
    """
    domain = _bid_domain(reserve, win_cdf.support.lower, state.value, state.wealth)

    def profit(b):
        return (state.value - b) ** state.risk * float(win_cdf.objective_cdf(b))

    best = maximize_scalar(profit, domain)
    win = float(np.clip(win_cdf.cdf(best.argmax), 0.0, 1.0))
    psi = state.wealth + (state.value - best.argmax) ** state.risk * win
    return SolveResult(best.argmax, win, psi, domain, best.evaluations)


def legacy_optimal_bid(value: float, wealth: float, profile: RiskProfile,
                       win_cdf: BidCdf) -> SolveResult:
    """Maximize the legacy wealth utility over the CDF's own support.

    Bids above the bidder's value (and wealth) are allowed; that is the
    documented pathology of this utility.  The domain is clipped at
    wealth + value where the utility stops being defined.
    """
    lo = win_cdf.support.lower
    hi = min(win_cdf.support.upper, wealth + value)
    if not lo < hi:
        raise InfeasibleScenarioError("empty legacy bid domain (%g, %g]" % (lo, hi))
    domain = SupportInterval(lo, hi)

    def objective(b):
        return float(legacy_expected_utility(value, wealth, profile, b, win_cdf))

    best = maximize_scalar(objective, domain)
    win = float(np.clip(win_cdf.cdf(best.argmax), 0.0, 1.0))
    return SolveResult(best.argmax, win, best.value, domain, best.evaluations)


# ---------------------------------------------------------------------------
# batch engine
# ---------------------------------------------------------------------------

def _golden_batch(profit, a, b, x_best, f_best, tol):
    """Vectorized golden-section refinement, element-wise identical to the
    scalar loop; entries stop updating once their bracket width is below tol."""
    a = a.copy()
    b = b.copy()
    h = b - a
    x1 = a + _INVPHI2 * h
    x2 = a + _INVPHI * h
    f1 = profit(x1)
    f2 = profit(x2)
    for x, fx in ((x1, f1), (x2, f2)):
        better = fx > f_best
        x_best[better] = x[better]
        f_best[better] = fx[better]
    iterations = 0
    while True:
        active = h > tol
        if not active.any():
            break
        iterations += 1
        goleft = active & (f1 >= f2)
        goright = active & ~goleft
        b[goleft] = x2[goleft]
        x2[goleft] = x1[goleft]
        f2[goleft] = f1[goleft]
        a[goright] = x1[goright]
        x1[goright] = x2[goright]
        f1[goright] = f2[goright]
        h = b - a
        xn = np.where(goleft, a + _INVPHI2 * h, a + _INVPHI * h)
        fn = profit(xn)
        x1[goleft] = xn[goleft]
        f1[goleft] = fn[goleft]
        x2[goright] = xn[goright]
        f2[goright] = fn[goright]
        better = active & (fn > f_best)
        x_best[better] = xn[better]
        f_best[better] = fn[better]
    return iterations


def _for_chunks(n: int, threads: int, work) -> None:
    slices = [slice(i, min(i + CHUNK, n)) for i in range(0, n, CHUNK)]
    if threads > 1 and len(slices) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, slices))
    else:
        for s in slices:
            work(s)


def _envelope_argmax(slopes: np.ndarray, intercepts: np.ndarray,
                     queries: np.ndarray) -> np.ndarray:
    """Per query a, the index j maximizing slopes[j] * a + intercepts[j].

    Exact argmax via the upper envelope of the lines; slopes must be strictly
    decreasing (here: log(value - grid) over an increasing bid grid).  Lines
    with non-finite slope or intercept score minus infinity and are dropped;
    if every line is dropped the first index is returned, matching a direct
    scan over all-equal scores.
    """
    finite = np.isfinite(slopes) & np.isfinite(intercepts)
    live = np.flatnonzero(finite)
    out = np.zeros(queries.size, dtype=np.intp)
    if live.size == 0:
        return out
    hull_j: list[int] = []
    hull_from: list[float] = []  # a-value from which hull_j[i] is maximal
    for j in live[::-1]:  # ascending slope order
        sj = float(slopes[j])
        cj = float(intercepts[j])
        while hull_j:
            k = hull_j[-1]
            cross = (float(intercepts[k]) - cj) / (sj - float(slopes[k]))
            if cross <= hull_from[-1]:
                hull_j.pop()
                hull_from.pop()
                continue
            hull_j.append(j)
            hull_from.append(cross)
            break
        if not hull_j or hull_j[-1] != j:
            hull_j.append(j)
            hull_from.append(-math.inf)
    segment = np.searchsorted(np.asarray(hull_from), queries, side="right") - 1
    out[:] = np.asarray(hull_j, dtype=np.intp)[segment]
    return out


def solve_profit_bids(values, risks, lows, highs, win_cdf: BidCdf, *, threads: int = 1,
                      grid_points: int = GRID_POINTS, tol: float = REFINE_TOL) -> np.ndarray:
    """Per-draw argmax of (value - b)^risk * F(b) over (low, high].

    ``values``/``lows``/``highs`` may be scalars (shared across draws) or
    arrays aligned with ``risks``.  All domains must be non-empty; callers
    decide what to do with infeasible draws before calling.  Results are
    independent of chunking and thread count.
    """
    risks = np.atleast_1d(np.asarray(risks, dtype=float))
    n = risks.size
    shared = np.ndim(values) == 0 and np.ndim(lows) == 0 and np.ndim(highs) == 0
    values_a = np.broadcast_to(np.asarray(values, dtype=float), (n,))
    lows_a = np.broadcast_to(np.asarray(lows, dtype=float), (n,))
    highs_a = np.broadcast_to(np.asarray(highs, dtype=float), (n,))
    if np.any(highs_a <= lows_a):
        raise InfeasibleScenarioError("solve_profit_bids requires low < high for every draw")

    bids = np.empty(n, dtype=float)
    grid_idx = np.arange(1, grid_points + 1, dtype=float)

    if shared:
        lo, hi, v = float(lows), float(highs), float(values)
        step = (hi - lo) / grid_points
        xs = lo + grid_idx * step
        xs[-1] = hi
        with np.errstate(divide="ignore"):
            logx = np.log(np.maximum(v - xs, 0.0))
            logF = np.log(np.maximum(np.asarray(win_cdf.objective_cdf(xs), dtype=float), 0.0))

        def work(sl):
            # the scan scores are lines risk * logx[j] + logF[j]; the argmax
            # over the shared grid comes from their upper envelope
            k = _envelope_argmax(logx, logF, risks[sl])
            x0 = xs[k]
            a_br = np.where(k >= 1, lo + k * step, lo)  # xs[k-1] simplifies to lo + k*step
            b_br = np.where(k + 2 < grid_points, lo + (k + 2) * step, hi)
            r = risks[sl]

            def profit(x):
                return (v - x) ** r * np.maximum(
                    np.asarray(win_cdf.objective_cdf(x), dtype=float), 0.0)

            f0 = profit(x0)
            xb, fb = x0.copy(), f0.copy()
            _golden_batch(profit, a_br, b_br, xb, fb, tol)
            bids[sl] = xb
    else:
        def work(sl):
            v = values_a[sl]
            r = risks[sl]
            lo = lows_a[sl]
            hi = highs_a[sl]
            step = (hi - lo) / grid_points
            grid = lo[:, None] + step[:, None] * grid_idx[None, :]
            grid[:, -1] = hi
            with np.errstate(divide="ignore"):
                scores = (r[:, None] * np.log(np.maximum(v[:, None] - grid, 0.0))
                          + np.log(np.maximum(
                              np.asarray(win_cdf.objective_cdf(grid), dtype=float), 0.0)))
            k = np.argmax(scores, axis=1)
            rows = np.arange(grid.shape[0])
            x0 = grid[rows, k]
            a_br = np.where(k >= 1, lo + k * step, lo)
            b_br = np.where(k + 2 < grid_points, lo + (k + 2) * step, hi)

            def profit(x):
                return (v - x) ** r * np.maximum(
                    np.asarray(win_cdf.objective_cdf(x), dtype=float), 0.0)

            f0 = profit(x0)
            xb, fb = x0.copy(), f0.copy()
            _golden_batch(profit, a_br, b_br, xb, fb, tol)
            bids[sl] = xb

    _for_chunks(n, threads, work)
    return bids


def _mc_estimate(samples: np.ndarray, seed: int) -> McEstimate:
    n = int(samples.size)
    se = float(samples.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(float(samples.mean()), se, n, int(seed))


def expected_bid_given_cdf(value: float, wealth: float, profile: RiskProfile,
                           opponent_wealth_dist, win_cdf: BidCdf, *, reserve: float,
                           n: int, seed: int, stage: int = STAGE_MAIN,
                           threads: int = 1) -> ExpectedBidOutcome:
    """Monte Carlo expected optimal bid against a fixed opponent-bid CDF.

    Per draw of the opponent's wealth: adjust the bidder's own risk parameter
    for the wealth matchup, solve the point problem, then average.  The
    reported winning probability and expected utility are evaluated at the
    mean bid (using the mean effective risk), matching how the reference
    tables report them; per-draw averages are kept in ``diagnostics``.
    """
    if n < 1:
        raise ValidationError("Monte Carlo draw count must be >= 1, got %r" % (n,))
    domain = _bid_domain(reserve, win_cdf.support.lower, value, wealth)
    rng = stage_rng(seed, stage)
    w_opp = np.atleast_1d(opponent_wealth_dist.sample(rng, n))
    risk = np.broadcast_to(
        np.asarray(wealth_adjusted_risk(profile.baseline, profile.risk_class,
                                        wealth, w_opp), dtype=float), (n,))
    mc_cdf = win_cdf.interpolated()
    bids = solve_profit_bids(value, risk, domain.lower, domain.upper, mc_cdf,
                             threads=threads)
    bid_est = _mc_estimate(bids, seed)
    risk_est = _mc_estimate(risk, seed)
    win = float(np.clip(win_cdf.cdf(bid_est.mean), 0.0, 1.0))
    psi = wealth + (value - bid_est.mean) ** risk_est.mean * win
    win_draws = np.clip(np.asarray(win_cdf.cdf(bids), dtype=float), 0.0, 1.0)
    diagnostics = {
        "mean_per_draw_win_prob": float(win_draws.mean()),
        "mean_per_draw_expected_utility": float(
            (wealth + (value - bids) ** risk * win_draws).mean()),
    }
    return ExpectedBidOutcome(bid_est, risk_est, win, psi, domain, diagnostics)


def expected_optimal_bid(scenario, concept: str = "non_strategic", *, n: int | None = None,
                         seed: int | None = None, threads: int = 1) -> ExpectedBidOutcome:
    """Expected optimal bid for a scenario under a solution concept.

    Level-1 is by definition the non-strategic solve; level-2 and level-3
    are delegated to :mod:`sealedbid.level_k`.
    """
    from . import level_k  # local import: level_k builds on this module

    return level_k.solve_concept(scenario, concept, n=n, seed=seed, threads=threads)
