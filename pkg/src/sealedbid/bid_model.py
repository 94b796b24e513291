"""Opponent-bid distributions.

The probability that a bid b beats the opponent is the CDF of the opponent's
bid evaluated at b.  Several constructions of that CDF live here:

* ``QuadratureBidCdf`` composes a value distribution G on (gamma, kappa] with
  a power-law bid-fraction family: F(c) = G(c) + integral_c^kappa g(v) T(c/v) dv,
  evaluated by adaptive Simpson quadrature.
* ``ClosedFormBidCdf`` is the exact antiderivative of that composition for
  uniform G and fraction exponent 8.
* ``ScaledLinearBidCdf`` is the bid CDF under the change of variable C = qV:
  affine on (q*gamma, q*kappa].  Its clamping policy is the one knob in the
  package with two defensible behaviours, see below.
* ``EmpiricalBidCdf`` interpolates the order statistics of simulated bids.
* ``ExplicitBidCdf`` wraps any callable CDF with a declared support.

Clamping: a true CDF never exceeds 1, but the affine form does above
q*kappa.  In the reference tables the optimizer consumes the *unclamped*
affine extension while reported winning probabilities are clamped; that is
``clamp=False`` (the paper_faithful scenario mode).  ``clamp=True`` (strict
mode) clamps inside the optimizer as well.  ``cdf`` is always the clamped,
true-CDF value; ``objective_cdf`` is what the optimizer consumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import PowerFractionDist, SupportInterval, UniformDist
from .errors import NumericalError, ValidationError

SIMPSON_TOL = 1e-8
SIMPSON_MAX_DEPTH = 40
CACHE_POINTS = 4096


def _adaptive_simpson(f, a, b, tol, max_depth):
    """Adaptive Simpson quadrature of f over [a, b] to absolute tolerance."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_step(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    if m <= a or m >= b:
        return whole  # interval degenerate at float resolution
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise NumericalError("adaptive Simpson did not converge on [%g, %g] "
                             "(residual %g)" % (a, b, abs(delta)))
    return (_simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + _simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1))


class BidCdf:
    """Base class: a bid CDF with half-open support and a clamping policy."""

    support: SupportInterval

    def cdf(self, x):
        """True CDF value in [0, 1]."""
        raise NotImplementedError

    def objective_cdf(self, x):
        """The value the optimizer consumes; equals cdf unless overridden."""
        return self.cdf(x)

    def interpolated(self, points: int = CACHE_POINTS) -> "BidCdf":
        """A cheap stand-in for Monte Carlo loops; default precomputes a grid."""
        return InterpolatedBidCdf(self, points)


class QuadratureBidCdf(BidCdf):
    """Composition CDF evaluated by adaptive Simpson quadrature.

    For the fraction family T with floor gamma/v and exponent m the inner
    integrand simplifies to g(v) * (c^m - gamma^m) / (v^m - gamma^m).  The
    integral is computed in u = log(v - gamma), which removes the near-edge
    spike when c approaches gamma.
    """

    def __init__(self, value_dist: UniformDist, floor: float, exponent: float = 8.0):
        if floor < value_dist.support.lower - 1e-12:
            # bids below the value support's lower end would have zero density anyway
            raise ValidationError("bid floor %g below value support lower %g"
                                  % (floor, value_dist.support.lower))
        self.value_dist = value_dist
        self.floor = float(floor)
        self.exponent = float(exponent)
        self.support = SupportInterval(self.floor, value_dist.support.upper)

    def _tail_integral(self, c: float) -> float:
        # integral over v in [c, kappa] of g(v) (c^m - gamma^m)/(v^m - gamma^m),
        # computed in u = log(v - gamma) so the near-floor spike flattens out;
        # the ratio is evaluated via exp of log differences to survive large m
        gamma, kappa, m = self.floor, self.support.upper, self.exponent
        gm = gamma ** m
        log_scale = math.log(c ** m - gm)

        def integrand(u):
            # rounding in exp can push v a hair outside [c, kappa], onto the
            # zero side of the density's jump; clamp back inside
            v = min(gamma + math.exp(u), kappa)
            density = self.value_dist.pdf(v)
            if density == 0.0:
                return 0.0
            return density * math.exp(u + log_scale - math.log(v ** m - gm))

        lo, hi = math.log(c - gamma), math.log(kappa - gamma)
        return _adaptive_simpson(integrand, lo, hi, SIMPSON_TOL, SIMPSON_MAX_DEPTH)

    def _cdf_scalar(self, c: float) -> float:
        if c <= self.floor:
            return 0.0
        if c >= self.support.upper:
            return 1.0
        value = self.value_dist.cdf(c) + self._tail_integral(c)
        return min(max(value, 0.0), 1.0)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return self._cdf_scalar(float(x))
        return np.array([self._cdf_scalar(v) for v in x.ravel()]).reshape(x.shape)


class ClosedFormBidCdf(BidCdf):
    """Exact composition CDF for uniform values on (gamma, kappa] and exponent 8."""

    exponent = 8.0

    def __init__(self, gamma: float, kappa: float):
        if gamma <= 0.0:
            raise ValidationError("closed form requires gamma > 0 (it divides by "
                                  "gamma^7), got %g" % gamma)
        self.support = SupportInterval(float(gamma), float(kappa))

    def _bracket(self, x):
        # antiderivative of 1/(v^8 - gamma^8), evaluated at x
        g = self.support.lower
        g7 = g ** 7
        sqrt2 = math.sqrt(2.0)
        xg = x / g
        return (sqrt2 / (16.0 * g7) * np.log((x * x + x * g * sqrt2 + g * g)
                                             / (x * x - x * g * sqrt2 + g * g))
                + sqrt2 / (8.0 * g7) * np.arctan(xg * sqrt2 + 1.0)
                + sqrt2 / (8.0 * g7) * np.arctan(xg * sqrt2 - 1.0)
                + 1.0 / (4.0 * g7) * np.arctan(xg)
                - np.log(x - g) / (8.0 * g7)
                + np.log(x + g) / (8.0 * g7))

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        g, k = self.support.lower, self.support.upper
        inside = (x > g) & (x < k)
        xs = np.where(inside, x, 0.5 * (g + k))  # placeholder keeps logs finite
        width = k - g
        base = (xs - g) / width
        tail = (xs ** 8 - g ** 8) / width * (self._bracket(xs) - self._bracket(k))
        value = np.where(x <= g, 0.0, np.where(x >= k, 1.0, base + tail))
        return np.clip(value, 0.0, 1.0)[()]


class ScaledLinearBidCdf(BidCdf):
    """Bid CDF when the opponent bids the fraction q of a uniform value."""

    def __init__(self, value_dist: UniformDist, fraction: float, clamp: bool = False):
        if not 0.0 < fraction <= 1.0:
            raise ValidationError("bid fraction must lie in (0, 1], got %g" % fraction)
        self.value_dist = value_dist
        self.fraction = float(fraction)
        self.clamp = bool(clamp)
        self.support = SupportInterval(fraction * value_dist.support.lower,
                                       fraction * value_dist.support.upper)

    def raw(self, x):
        """Unclamped affine extension (c - q*lower) / (q * width)."""
        x = np.asarray(x, dtype=float)
        return ((x - self.support.lower) / (self.fraction * self.value_dist.support.width))[()]

    def cdf(self, x):
        return np.clip(self.raw(x), 0.0, 1.0)[()]

    def objective_cdf(self, x):
        return self.cdf(x) if self.clamp else self.raw(x)

    def interpolated(self, points: int = CACHE_POINTS) -> "ScaledLinearBidCdf":
        return self  # already O(1) to evaluate, and interpolation would clamp


class EmpiricalBidCdf(BidCdf):
    """Piecewise-linear CDF through the order statistics of a bid sample.

    A linear (not step) interpolation keeps the solver's objective continuous.
    A degenerate sample collapses to a step at the common value.
    """

    def __init__(self, samples):
        samples = np.sort(np.asarray(samples, dtype=float))
        if samples.size < 1 or not np.all(np.isfinite(samples)):
            raise ValidationError("empirical CDF needs a finite, non-empty sample")
        self._knots = samples
        self._degenerate = samples[-1] - samples[0] <= 0.0
        upper = samples[-1] if not self._degenerate else float(np.nextafter(samples[-1], np.inf))
        self.support = SupportInterval(samples[0], upper)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self._degenerate:
            return np.where(x >= self._knots[0], 1.0, 0.0)[()]
        levels = np.linspace(0.0, 1.0, self._knots.size)
        return np.interp(x, self._knots, levels, left=0.0, right=1.0)[()]

    def interpolated(self, points: int = CACHE_POINTS) -> "EmpiricalBidCdf":
        return self


class ExplicitBidCdf(BidCdf):
    """A caller-supplied CDF function with a declared support."""

    def __init__(self, support: SupportInterval, fn):
        self.support = support
        self._fn = fn

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        value = np.where(x <= self.support.lower, 0.0,
                         np.where(x >= self.support.upper, 1.0, self._fn(x)))
        return np.clip(value, 0.0, 1.0)[()]

    def interpolated(self, points: int = CACHE_POINTS) -> "ExplicitBidCdf":
        return self


class InterpolatedBidCdf(BidCdf):
    """Monotone linear interpolation of another CDF on a fixed grid."""

    def __init__(self, base: BidCdf, points: int = CACHE_POINTS):
        self.base = base
        self.support = base.support
        self._grid = np.linspace(base.support.lower, base.support.upper, points)
        self._values = np.asarray(base.cdf(self._grid), dtype=float)

    def cdf(self, x):
        return np.interp(np.asarray(x, dtype=float), self._grid, self._values,
                         left=0.0, right=1.0)[()]

    def interpolated(self, points: int = CACHE_POINTS) -> "InterpolatedBidCdf":
        return self


def compose_cdf_quadrature(value_dist: UniformDist, floor: float, exponent: float, c):
    """Composition CDF at c via adaptive quadrature (0 below floor, 1 above)."""
    return QuadratureBidCdf(value_dist, floor, exponent).cdf(c)


def compose_cdf_closed(gamma: float, kappa: float, c):
    """Closed-form composition CDF at c (uniform values, exponent 8)."""
    return ClosedFormBidCdf(gamma, kappa).cdf(c)


def scaled_cdf(value_dist: UniformDist, fraction: float, c, clamp: bool):
    """Affine change-of-variable CDF at c; clamp limits the result to [0, 1]."""
    dist = ScaledLinearBidCdf(value_dist, fraction, clamp=clamp)
    return dist.cdf(c) if clamp else dist.raw(c)


def fraction_floor_ratio(floor: float, value: float) -> PowerFractionDist:
    """The fraction distribution induced at a specific opponent value."""
    return PowerFractionDist(floor_ratio=floor / value)
