"""Optimal bidding in first-price sealed-bid auctions via adversarial risk analysis.

The package models one bidder's decision problem: beliefs about the
opponent's value, wealth and risk attitude induce a distribution over the
opponent's bid, and the bidder maximizes wealth-additive CRRA expected
utility over the admissible bid range.  Non-strategic and level-k opponent
models are supported, along with averaging over solution concepts.
"""

from .bid_model import (BidCdf, ClosedFormBidCdf, EmpiricalBidCdf, ExplicitBidCdf,
                        InterpolatedBidCdf, QuadratureBidCdf, ScaledLinearBidCdf,
                        compose_cdf_closed, compose_cdf_quadrature, scaled_cdf)
from .distributions import (PointMassDist, PowerFractionDist, SupportInterval,
                            UniformDist)
from .errors import (InfeasibleScenarioError, NumericalError, SealedBidError,
                     ValidationError)
from .level_k import (expected_opponent_bid, model_average, solve_concept,
                      solve_level2, solve_level3, opponent_level1_bid)
from .risk import (OpponentRiskBelief, RiskProfile, effective_risk_opponent,
                   effective_risk_self, sample_effective_opponent_risk,
                   wealth_adjusted_risk)
from .scenario import (LevelKBeliefs, Level3Beliefs, McSettings, OpponentBeliefs,
                       Scenario, SelfBidder, parse_scenario, serialize_scenario,
                       validate)
from .solver import (ExpectedBidOutcome, McEstimate, SolveResult,
                     expected_bid_given_cdf, expected_optimal_bid,
                     legacy_optimal_bid, maximize_scalar, optimal_bid)
from .utility import (BidderState, expected_utility, legacy_expected_utility,
                      utility_lose, utility_win)

__version__ = "0.1.0"

__all__ = [
    "BidCdf", "ClosedFormBidCdf", "EmpiricalBidCdf", "ExplicitBidCdf",
    "InterpolatedBidCdf", "QuadratureBidCdf", "ScaledLinearBidCdf",
    "compose_cdf_closed", "compose_cdf_quadrature", "scaled_cdf",
    "PointMassDist", "PowerFractionDist", "SupportInterval", "UniformDist",
    "InfeasibleScenarioError", "NumericalError", "SealedBidError", "ValidationError",
    "expected_opponent_bid", "model_average", "solve_concept", "solve_level2",
    "solve_level3", "opponent_level1_bid",
    "OpponentRiskBelief", "RiskProfile", "effective_risk_opponent",
    "effective_risk_self", "sample_effective_opponent_risk", "wealth_adjusted_risk",
    "LevelKBeliefs", "Level3Beliefs", "McSettings", "OpponentBeliefs", "Scenario",
    "SelfBidder", "parse_scenario", "serialize_scenario", "validate",
    "ExpectedBidOutcome", "McEstimate", "SolveResult", "expected_bid_given_cdf",
    "expected_optimal_bid", "legacy_optimal_bid", "maximize_scalar", "optimal_bid",
    "BidderState", "expected_utility", "legacy_expected_utility", "utility_lose",
    "utility_win",
]
