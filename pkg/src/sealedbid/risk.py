"""Wealth-dependent CRRA risk parameters.

The baseline parameter r classifies a bidder as risk-averse (0 < r < 1),
risk-neutral (r = 1) or risk-seeking (1 < r <= 2).  For a normal auctioned
item the *wealthier* side of a matchup behaves more risk-averse (or less
risk-seeking): with h = poorer_wealth / richer_wealth in (0, 1), the richer
side's effective parameter is r**(1/h) when averse and r**h when seeking,
while the poorer side keeps its baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import PointMassDist, UniformDist
from .errors import ValidationError

AVERSE = "averse"
NEUTRAL = "neutral"
SEEKING = "seeking"
RISK_CLASSES = (AVERSE, NEUTRAL, SEEKING)


def classify_baseline(baseline: float) -> str:
    """Map a baseline parameter in (0, 2] onto its risk class."""
    if not np.isfinite(baseline) or not 0.0 < baseline <= 2.0:
        raise ValidationError("baseline risk outside (0,2]: got %r" % (baseline,))
    if baseline < 1.0:
        return AVERSE
    if baseline == 1.0:
        return NEUTRAL
    return SEEKING


@dataclass(frozen=True)
class RiskProfile:
    """Baseline CRRA parameter plus its (derived) risk class."""

    baseline: float

    def __post_init__(self):
        classify_baseline(self.baseline)

    @property
    def risk_class(self) -> str:
        return classify_baseline(self.baseline)


def wealth_adjusted_risk(baseline, risk_class: str, own_wealth, other_wealth):
    """Effective parameter for the ``own`` side of a matchup.

    The transform fires only where own_wealth > other_wealth; the boundary
    own == other is treated as "no advantage" and returns the baseline.
    Accepts scalars or arrays for baseline and the wealths.
    """
    own = np.asarray(own_wealth, dtype=float)
    other = np.asarray(other_wealth, dtype=float)
    if np.any(own <= 0.0) or np.any(other <= 0.0):
        raise ValidationError("wealth must be positive")
    if risk_class not in RISK_CLASSES:
        raise ValidationError("unknown risk class %r" % (risk_class,))
    r = np.asarray(baseline, dtype=float)
    if risk_class == NEUTRAL:
        return (r * np.ones(np.broadcast(r, own, other).shape))[()]
    h = np.where(own > other, other / own, 1.0)
    exponent = 1.0 / h if risk_class == AVERSE else h
    return (r ** exponent)[()]


def effective_risk_self(profile: RiskProfile, wealth_self, wealth_other):
    """My effective parameter when I may be the wealthier bidder."""
    return wealth_adjusted_risk(profile.baseline, profile.risk_class,
                                wealth_self, wealth_other)


def effective_risk_opponent(baseline, risk_class: str, wealth_self, wealth_opponent):
    """The opponent's effective parameter; transforms only where they are wealthier."""
    return wealth_adjusted_risk(baseline, risk_class, wealth_opponent, wealth_self)


def _default_baseline_dist(risk_class: str):
    if risk_class == AVERSE:
        return UniformDist.of(0.0, 1.0)
    if risk_class == SEEKING:
        return UniformDist.of(1.0, 2.0)
    return PointMassDist(1.0)


@dataclass(frozen=True)
class OpponentRiskBelief:
    """Belief about an opponent's baseline risk: class plus a distribution over it."""

    risk_class: str
    baseline_dist: object = field(default=None)

    def __post_init__(self):
        if self.risk_class not in RISK_CLASSES:
            raise ValidationError("unknown risk class %r" % (self.risk_class,))
        if self.baseline_dist is None:
            object.__setattr__(self, "baseline_dist", _default_baseline_dist(self.risk_class))
        self._check_support()

    def _check_support(self):
        d = self.baseline_dist
        if isinstance(d, PointMassDist):
            if classify_baseline(d.value) != self.risk_class:
                raise ValidationError("point-mass baseline %g inconsistent with class %s"
                                      % (d.value, self.risk_class))
            return
        if isinstance(d, UniformDist):
            lo, hi = d.support.lower, d.support.upper
            expected = {AVERSE: (0.0, 1.0), NEUTRAL: (1.0, 1.0), SEEKING: (1.0, 2.0)}[self.risk_class]
            if self.risk_class == NEUTRAL:
                raise ValidationError("neutral risk belief must be a point mass at 1")
            if (lo, hi) != expected:
                raise ValidationError("baseline distribution support (%g, %g] does not match "
                                      "class %s (expected (%g, %g])"
                                      % (lo, hi, self.risk_class, expected[0], expected[1]))
            return
        raise ValidationError("unsupported baseline distribution %r" % (d,))

    def sample_baseline(self, rng: np.random.Generator, size=None):
        return self.baseline_dist.sample(rng, size)


def sample_effective_opponent_risk(belief: OpponentRiskBelief, wealth_self_dist,
                                   wealth_opp_dist, rng: np.random.Generator, size=None):
    """Draw effective opponent risk parameters.

    Draw order is fixed (baseline, self wealth, opponent wealth) so seeded
    runs are reproducible.  Either wealth distribution may be a point mass.
    """
    a, _, _ = sample_effective_opponent_risk_with_draws(
        belief, wealth_self_dist, wealth_opp_dist, rng, size)
    return a


def sample_effective_opponent_risk_with_draws(belief: OpponentRiskBelief, wealth_self_dist,
                                              wealth_opp_dist, rng: np.random.Generator,
                                              size=None):
    """Like :func:`sample_effective_opponent_risk` but also returns the wealth draws."""
    baseline = belief.sample_baseline(rng, size)
    w_self = wealth_self_dist.sample(rng, size)
    w_opp = wealth_opp_dist.sample(rng, size)
    a = effective_risk_opponent(baseline, belief.risk_class, w_self, w_opp)
    return a, w_self, w_opp
