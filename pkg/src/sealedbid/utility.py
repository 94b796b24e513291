"""Bidder utilities.

The wealth-additive utility pays w + (v - b)^a on a win and w on a loss, so
expected utility simplifies to w + (v - b)^a F(b) and the optimal bid never
depends on wealth except through the effective risk parameter a.  The legacy
wealth utility (w + v - b)^r F(b) + w^r (1 - F(b)) is kept only to reproduce
its documented pathologies (optimal bids above wealth, bids falling as wealth
rises).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bid_model import BidCdf
from .errors import ValidationError
from .risk import RiskProfile


@dataclass(frozen=True)
class BidderState:
    """True value, wealth, and effective risk parameter of one bidder."""

    value: float
    wealth: float
    risk: float

    def __post_init__(self):
        if not 0.0 < self.value <= self.wealth:
            raise ValidationError("requires 0 < value <= wealth, got value=%g wealth=%g"
                                  % (self.value, self.wealth))
        if not 0.0 < self.risk <= 2.0:
            raise ValidationError("effective risk must lie in (0,2], got %g" % self.risk)


def profit_term(state: BidderState, bid):
    """(value - bid)^risk, the wealth-free part of the winning utility."""
    bid = np.asarray(bid, dtype=float)
    if np.any(bid > state.value):
        raise ValidationError("bid above true value: bid=%g > value=%g"
                              % (float(np.max(bid)), state.value))
    return ((state.value - bid) ** state.risk)[()]


def utility_win(state: BidderState, bid):
    """Utility on winning: wealth plus the risk-adjusted profit.

    At bid == value the profit term is taken as its limit 0.
    """
    return state.wealth + profit_term(state, bid)


def utility_lose(state: BidderState):
    """Utility on losing: wealth unchanged."""
    return state.wealth


def expected_utility(state: BidderState, bid, win_cdf: BidCdf):
    """w + (v - b)^a * F(b) with the reported (clamped) winning probability."""
    return (state.wealth + profit_term(state, bid) * np.clip(win_cdf.cdf(bid), 0.0, 1.0))[()]


def legacy_expected_utility(value: float, wealth: float, profile: RiskProfile,
                            bid, win_cdf: BidCdf):
    """(w + v - b)^r F(b) + w^r (1 - F(b)); requires w + v - b >= 0."""
    if wealth < 0.0:
        raise ValidationError("legacy utility requires wealth >= 0, got %g" % wealth)
    bid = np.asarray(bid, dtype=float)
    if np.any(wealth + value - bid < 0.0):
        raise ValidationError("legacy utility undefined for bid > wealth + value")
    r = profile.baseline
    win = np.clip(win_cdf.cdf(bid), 0.0, 1.0)
    return ((wealth + value - bid) ** r * win + wealth ** r * (1.0 - win))[()]
