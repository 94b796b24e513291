"""Scenario documents: the single source of every belief the solvers consume.

A scenario is one JSON document with top-level keys ``reserve``, ``self``,
``opponent``, ``levelk``, ``level3``, ``mc`` and ``clamp_mode``.  The schema
is strict: unknown keys are rejected with their path, so a typo in a belief
name cannot silently fall back to a default.  Numeric fields accept JSON
numbers or decimal strings ("150" and 150 are the same value); documents are
serialized back with plain numbers.  See docs/scenario-format.md for the key
reference.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .distributions import PointMassDist, UniformDist
from .errors import ValidationError
from .risk import OpponentRiskBelief, RiskProfile, classify_baseline

CLAMP_PAPER = "paper_faithful"
CLAMP_STRICT = "strict"
CLAMP_MODES = (CLAMP_PAPER, CLAMP_STRICT)

DEFAULT_MC_N = 200_000


@dataclass(frozen=True)
class SelfBidder:
    value: float
    wealth: float
    risk: RiskProfile


@dataclass(frozen=True)
class OpponentBeliefs:
    value: UniformDist
    fraction_exponent: float
    wealth: object          # UniformDist or PointMassDist
    risk: OpponentRiskBelief


@dataclass(frozen=True)
class LevelKBeliefs:
    """What the opponent believes about me: my value, bid fraction and wealth."""

    value_belief: UniformDist
    fraction_exponent: float
    wealth_belief: object
    opponent_risk: Optional[OpponentRiskBelief] = None


@dataclass(frozen=True)
class Level3Beliefs:
    """One level deeper: the belief set a level-2 opponent would attribute to me."""

    self_risk_belief: OpponentRiskBelief
    value_belief: UniformDist
    fraction_exponent: float
    wealth_belief: object


@dataclass(frozen=True)
class McSettings:
    n: int = DEFAULT_MC_N
    seed: Optional[int] = None


@dataclass(frozen=True)
class Scenario:
    reserve: float
    bidder: SelfBidder
    opponent: OpponentBeliefs
    levelk: Optional[LevelKBeliefs] = None
    level3: Optional[Level3Beliefs] = None
    mc: McSettings = McSettings()
    clamp_mode: str = CLAMP_PAPER

    @property
    def clamp(self) -> bool:
        return self.clamp_mode == CLAMP_STRICT

    def levelk_opponent_risk(self) -> OpponentRiskBelief:
        if self.levelk is not None and self.levelk.opponent_risk is not None:
            return self.levelk.opponent_risk
        return self.opponent.risk


class _Doc:
    """Strict walker over a nested dict; records errors with their paths."""

    def __init__(self):
        self.errors = []

    def fail(self, path, message):
        self.errors.append((path, message))

    def number(self, mapping, key, path, required=True, default=None):
        if key not in mapping:
            if required:
                self.fail("%s.%s" % (path, key), "missing required field")
            return default
        raw = mapping[key]
        if isinstance(raw, bool):
            self.fail("%s.%s" % (path, key), "expected a number, got a boolean")
            return default
        if isinstance(raw, str):
            try:
                return float(raw)
            except ValueError:
                self.fail("%s.%s" % (path, key), "not a decimal number: %r" % raw)
                return default
        if isinstance(raw, (int, float)):
            return float(raw)
        self.fail("%s.%s" % (path, key), "expected a number, got %r" % (raw,))
        return default

    def integer(self, mapping, key, path, required=True, default=None):
        value = self.number(mapping, key, path, required, None)
        if value is None:
            return default
        if value != int(value):
            self.fail("%s.%s" % (path, key), "expected an integer, got %g" % value)
            return default
        return int(value)

    def section(self, mapping, key, path, allowed, required=True):
        if key not in mapping:
            if required:
                self.fail("%s.%s" % (path, key), "missing required section")
            return None
        sub = mapping[key]
        if not isinstance(sub, dict):
            self.fail("%s.%s" % (path, key), "expected an object")
            return None
        for unknown in sorted(set(sub) - set(allowed)):
            self.fail("%s.%s.%s" % (path, key, unknown), "unknown field")
        return sub

    def build(self, path, factory, *args, **kwargs):
        try:
            return factory(*args, **kwargs)
        except ValidationError as exc:
            self.fail(path, str(exc))
            return None


def _parse_distribution(doc: _Doc, mapping, path, kinds=("uniform", "point")):
    if not isinstance(mapping, dict):
        doc.fail(path, "expected a tagged distribution object")
        return None
    kind = mapping.get("type")
    if kind == "uniform" and "uniform" in kinds:
        for unknown in sorted(set(mapping) - {"type", "lower", "upper"}):
            doc.fail("%s.%s" % (path, unknown), "unknown field")
        lower = doc.number(mapping, "lower", path)
        upper = doc.number(mapping, "upper", path)
        if lower is None or upper is None:
            return None
        return doc.build(path, UniformDist.of, lower, upper)
    if kind == "point" and "point" in kinds:
        for unknown in sorted(set(mapping) - {"type", "value"}):
            doc.fail("%s.%s" % (path, unknown), "unknown field")
        value = doc.number(mapping, "value", path)
        if value is None:
            return None
        return doc.build(path, PointMassDist, value)
    doc.fail("%s.type" % path, "expected one of %s, got %r" % (list(kinds), kind))
    return None


def _parse_fraction(doc: _Doc, mapping, path):
    if not isinstance(mapping, dict):
        doc.fail(path, "expected a tagged distribution object")
        return None
    if mapping.get("type") != "power_fraction":
        doc.fail("%s.type" % path, "expected 'power_fraction', got %r" % (mapping.get("type"),))
        return None
    for unknown in sorted(set(mapping) - {"type", "exponent"}):
        doc.fail("%s.%s" % (path, unknown), "unknown field")
    exponent = doc.number(mapping, "exponent", path, required=False, default=8.0)
    if exponent is not None and exponent <= 0:
        doc.fail("%s.exponent" % path, "must be > 0, got %g" % exponent)
        return None
    return exponent


def _parse_risk_belief(doc: _Doc, mapping, path):
    if not isinstance(mapping, dict):
        doc.fail(path, "expected a risk-belief object")
        return None
    for unknown in sorted(set(mapping) - {"class", "dist"}):
        doc.fail("%s.%s" % (path, unknown), "unknown field")
    risk_class = mapping.get("class")
    if risk_class not in ("averse", "neutral", "seeking"):
        doc.fail("%s.class" % path, "expected averse | neutral | seeking, got %r" % (risk_class,))
        return None
    dist = None
    if "dist" in mapping:
        dist = _parse_distribution(doc, mapping["dist"], "%s.dist" % path)
        if dist is None:
            return None
    return doc.build(path, OpponentRiskBelief, risk_class, dist)


def _parse_risk_profile(doc: _Doc, mapping, path):
    if not isinstance(mapping, dict):
        doc.fail(path, "expected a risk object")
        return None
    for unknown in sorted(set(mapping) - {"class", "baseline"}):
        doc.fail("%s.%s" % (path, unknown), "unknown field")
    baseline = doc.number(mapping, "baseline", path)
    if baseline is None:
        return None
    profile = doc.build(path, RiskProfile, baseline)
    if profile is None:
        return None
    declared = mapping.get("class")
    if declared is not None and declared != classify_baseline(baseline):
        doc.fail("%s.class" % path, "class %r inconsistent with baseline %g (%s)"
                 % (declared, baseline, classify_baseline(baseline)))
        return None
    return profile


_TOP_KEYS = ("reserve", "self", "opponent", "levelk", "level3", "mc", "clamp_mode")


def parse_scenario(document) -> Scenario:
    """Parse and validate a scenario from a JSON string, dict, or file text.

    Raises :class:`ValidationError` carrying the full list of (path, message)
    pairs when anything is wrong.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ValidationError("scenario is not valid JSON: %s" % exc) from exc
    if not isinstance(document, dict):
        raise ValidationError("scenario document must be a JSON object")

    doc = _Doc()
    for unknown in sorted(set(document) - set(_TOP_KEYS)):
        doc.fail(unknown, "unknown field")

    reserve = doc.number(document, "reserve", "")

    bidder = None
    sub = doc.section(document, "self", "", ("value", "wealth", "risk"))
    if sub is not None:
        value = doc.number(sub, "value", "self")
        wealth = doc.number(sub, "wealth", "self")
        profile = _parse_risk_profile(doc, sub.get("risk"), "self.risk") \
            if "risk" in sub else doc.fail("self.risk", "missing required field")
        if None not in (value, wealth, profile):
            bidder = SelfBidder(value, wealth, profile)

    opponent = None
    sub = doc.section(document, "opponent", "", ("value", "fraction", "wealth", "risk"))
    if sub is not None:
        value_dist = _parse_distribution(doc, sub.get("value"), "opponent.value",
                                         kinds=("uniform",)) if "value" in sub \
            else doc.fail("opponent.value", "missing required field")
        fraction = _parse_fraction(doc, sub.get("fraction"), "opponent.fraction") \
            if "fraction" in sub else doc.fail("opponent.fraction", "missing required field")
        wealth_dist = _parse_distribution(doc, sub.get("wealth"), "opponent.wealth") \
            if "wealth" in sub else doc.fail("opponent.wealth", "missing required field")
        risk_belief = _parse_risk_belief(doc, sub.get("risk"), "opponent.risk") \
            if "risk" in sub else doc.fail("opponent.risk", "missing required field")
        if None not in (value_dist, fraction, wealth_dist, risk_belief):
            opponent = OpponentBeliefs(value_dist, fraction, wealth_dist, risk_belief)

    levelk = None
    sub = doc.section(document, "levelk", "",
                      ("value_belief", "fraction_belief", "wealth_belief", "opponent_risk"),
                      required=False)
    if sub is not None:
        value_belief = _parse_distribution(doc, sub.get("value_belief"),
                                           "levelk.value_belief", kinds=("uniform",)) \
            if "value_belief" in sub else doc.fail("levelk.value_belief", "missing required field")
        fraction = _parse_fraction(doc, sub.get("fraction_belief"), "levelk.fraction_belief") \
            if "fraction_belief" in sub else doc.fail("levelk.fraction_belief",
                                                      "missing required field")
        wealth_belief = _parse_distribution(doc, sub.get("wealth_belief"),
                                            "levelk.wealth_belief") \
            if "wealth_belief" in sub else doc.fail("levelk.wealth_belief",
                                                    "missing required field")
        opp_risk = None
        if "opponent_risk" in sub:
            opp_risk = _parse_risk_belief(doc, sub["opponent_risk"], "levelk.opponent_risk")
        if None not in (value_belief, fraction, wealth_belief):
            levelk = LevelKBeliefs(value_belief, fraction, wealth_belief, opp_risk)

    level3 = None
    sub = doc.section(document, "level3", "",
                      ("self_risk_belief", "value_belief", "fraction_belief", "wealth_belief"),
                      required=False)
    if sub is not None:
        self_risk = _parse_risk_belief(doc, sub.get("self_risk_belief"),
                                       "level3.self_risk_belief") \
            if "self_risk_belief" in sub else doc.fail("level3.self_risk_belief",
                                                       "missing required field")
        value_belief = _parse_distribution(doc, sub.get("value_belief"),
                                           "level3.value_belief", kinds=("uniform",)) \
            if "value_belief" in sub else doc.fail("level3.value_belief",
                                                   "missing required field")
        fraction = _parse_fraction(doc, sub.get("fraction_belief"), "level3.fraction_belief") \
            if "fraction_belief" in sub else doc.fail("level3.fraction_belief",
                                                      "missing required field")
        wealth_belief = _parse_distribution(doc, sub.get("wealth_belief"),
                                            "level3.wealth_belief") \
            if "wealth_belief" in sub else doc.fail("level3.wealth_belief",
                                                    "missing required field")
        if None not in (self_risk, value_belief, fraction, wealth_belief):
            level3 = Level3Beliefs(self_risk, value_belief, fraction, wealth_belief)

    mc = McSettings()
    sub = doc.section(document, "mc", "", ("n", "seed"), required=False)
    if sub is not None:
        n = doc.integer(sub, "n", "mc", required=False, default=DEFAULT_MC_N)
        seed = doc.integer(sub, "seed", "mc", required=False, default=None)
        if n is not None:
            mc = McSettings(n, seed)

    clamp_mode = document.get("clamp_mode", CLAMP_PAPER)
    if clamp_mode not in CLAMP_MODES:
        doc.fail("clamp_mode", "expected one of %s, got %r" % (list(CLAMP_MODES), clamp_mode))

    if doc.errors:
        raise ValidationError(_format_errors(doc.errors), doc.errors)

    scenario = Scenario(reserve, bidder, opponent, levelk, level3, mc, clamp_mode)
    issues = validate(scenario)
    if issues:
        raise ValidationError(_format_errors(issues), issues)
    return scenario


def _format_errors(errors) -> str:
    return "; ".join("%s: %s" % (path, msg) if path else msg for path, msg in errors)


def _dist_bounds(dist):
    if isinstance(dist, PointMassDist):
        return dist.value, dist.value
    return dist.support.lower, dist.support.upper


def validate(scenario: Scenario):
    """Check every cross-field invariant; returns a list of (path, message)."""
    issues = []
    if scenario.reserve < 0:
        issues.append(("reserve", "must be >= 0, got %g" % scenario.reserve))
    bidder = scenario.bidder
    if scenario.reserve >= bidder.value:
        issues.append(("reserve", "reserve exceeds true value: reserve=%g >= value=%g"
                       % (scenario.reserve, bidder.value)))
    if bidder.value > bidder.wealth:
        issues.append(("self.value", "value must not exceed wealth: value=%g > wealth=%g"
                       % (bidder.value, bidder.wealth)))

    opp = scenario.opponent
    if opp.value.support.lower < scenario.reserve:
        issues.append(("opponent.value.lower",
                       "opponent value support must start at or above the reserve: "
                       "lower=%g < reserve=%g" % (opp.value.support.lower, scenario.reserve)))
    w_lo, w_hi = _dist_bounds(opp.wealth)
    if w_lo < opp.value.support.lower or w_hi < opp.value.support.upper:
        issues.append(("opponent.wealth",
                       "wealth support (%g, %g] must cover the value support (%g, %g]"
                       % (w_lo, w_hi, opp.value.support.lower, opp.value.support.upper)))

    for name, block in (("levelk", scenario.levelk), ("level3", scenario.level3)):
        if block is None:
            continue
        if block.value_belief.support.lower < scenario.reserve:
            issues.append(("%s.value_belief.lower" % name,
                           "bid floor must be at or above the reserve: lower=%g < reserve=%g"
                           % (block.value_belief.support.lower, scenario.reserve)))
        b_lo, b_hi = _dist_bounds(block.wealth_belief)
        if b_lo < block.value_belief.support.lower or b_hi < block.value_belief.support.upper:
            issues.append(("%s.wealth_belief" % name,
                           "wealth support (%g, %g] must cover the value support (%g, %g]"
                           % (b_lo, b_hi, block.value_belief.support.lower,
                              block.value_belief.support.upper)))

    if scenario.mc.n < 1:
        issues.append(("mc.n", "must be >= 1, got %d" % scenario.mc.n))
    return issues


def _serialize_dist(dist):
    if isinstance(dist, PointMassDist):
        return {"type": "point", "value": dist.value}
    return {"type": "uniform", "lower": dist.support.lower, "upper": dist.support.upper}


def _serialize_risk_belief(belief: OpponentRiskBelief):
    return {"class": belief.risk_class, "dist": _serialize_dist(belief.baseline_dist)}


def serialize_scenario(scenario: Scenario) -> dict:
    """The JSON-ready dict form; parse(serialize(s)) == s field for field."""
    out = {
        "reserve": scenario.reserve,
        "self": {
            "value": scenario.bidder.value,
            "wealth": scenario.bidder.wealth,
            "risk": {"class": scenario.bidder.risk.risk_class,
                     "baseline": scenario.bidder.risk.baseline},
        },
        "opponent": {
            "value": _serialize_dist(scenario.opponent.value),
            "fraction": {"type": "power_fraction",
                         "exponent": scenario.opponent.fraction_exponent},
            "wealth": _serialize_dist(scenario.opponent.wealth),
            "risk": _serialize_risk_belief(scenario.opponent.risk),
        },
        "mc": {"n": scenario.mc.n},
        "clamp_mode": scenario.clamp_mode,
    }
    if scenario.mc.seed is not None:
        out["mc"]["seed"] = scenario.mc.seed
    if scenario.levelk is not None:
        block = {
            "value_belief": _serialize_dist(scenario.levelk.value_belief),
            "fraction_belief": {"type": "power_fraction",
                                "exponent": scenario.levelk.fraction_exponent},
            "wealth_belief": _serialize_dist(scenario.levelk.wealth_belief),
        }
        if scenario.levelk.opponent_risk is not None:
            block["opponent_risk"] = _serialize_risk_belief(scenario.levelk.opponent_risk)
        out["levelk"] = block
    if scenario.level3 is not None:
        out["level3"] = {
            "self_risk_belief": _serialize_risk_belief(scenario.level3.self_risk_belief),
            "value_belief": _serialize_dist(scenario.level3.value_belief),
            "fraction_belief": {"type": "power_fraction",
                                "exponent": scenario.level3.fraction_exponent},
            "wealth_belief": _serialize_dist(scenario.level3.wealth_belief),
        }
    return out
