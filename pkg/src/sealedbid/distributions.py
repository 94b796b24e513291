"""Parametric one-dimensional distributions on half-open supports (lower, upper].

Every distribution exposes the same small contract: ``cdf``, ``pdf``,
``quantile``, ``sample`` and ``mean``.  Sampling is inverse-CDF on ``1 - U``
with ``U ~ rng.random()``, so one uniform draw maps deterministically to one
variate and the result always lies inside the half-open support.  All methods
accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class SupportInterval:
    """Half-open interval (lower, upper]: lower excluded, upper included."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValidationError("support bounds must be finite, got (%r, %r)"
                                  % (self.lower, self.upper))
        if self.lower < 0:
            raise ValidationError("support lower bound must be >= 0, got %g" % self.lower)
        if not self.lower < self.upper:
            raise ValidationError("support requires lower < upper, got (%g, %g)"
                                  % (self.lower, self.upper))

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        return bool(np.all((np.asarray(x) > self.lower) & (np.asarray(x) <= self.upper)))


@dataclass(frozen=True)
class UniformDist:
    """Uniform distribution on (lower, upper]."""

    support: SupportInterval

    @classmethod
    def of(cls, lower: float, upper: float) -> "UniformDist":
        return cls(SupportInterval(float(lower), float(upper)))

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.support.lower) / self.support.width
        return np.clip(z, 0.0, 1.0)[()]

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x > self.support.lower) & (x <= self.support.upper)
        return np.where(inside, 1.0 / self.support.width, 0.0)[()]

    def quantile(self, u):
        # defined on u in (0, 1]; quantile(1) is the inclusive upper endpoint
        return (self.support.lower + np.asarray(u, dtype=float) * self.support.width)[()]

    def sample(self, rng: np.random.Generator, size=None):
        return self.quantile(1.0 - rng.random(size))

    def mean(self) -> float:
        return 0.5 * (self.support.lower + self.support.upper)


@dataclass(frozen=True)
class PowerFractionDist:
    """Distribution of the bid-to-value fraction on (floor_ratio, 1].

    CDF (p^m - f^m) / (1 - f^m) with f = floor_ratio and m = exponent; the
    density m p^(m-1) / (1 - f^m) puts most mass near 1, i.e. bids close to
    the bidder's full value.
    """

    floor_ratio: float
    exponent: float = 8.0

    def __post_init__(self):
        if not 0.0 < self.floor_ratio < 1.0:
            raise ValidationError("floor_ratio must lie in (0, 1), got %g" % self.floor_ratio)
        if not self.exponent > 0.0:
            raise ValidationError("exponent must be > 0, got %g" % self.exponent)

    @property
    def support(self) -> SupportInterval:
        return SupportInterval(self.floor_ratio, 1.0)

    def _floor_pow(self) -> float:
        return self.floor_ratio ** self.exponent

    def cdf(self, p):
        p = np.asarray(p, dtype=float)
        fm = self._floor_pow()
        z = (np.clip(p, self.floor_ratio, 1.0) ** self.exponent - fm) / (1.0 - fm)
        return np.clip(z, 0.0, 1.0)[()]

    def pdf(self, p):
        p = np.asarray(p, dtype=float)
        fm = self._floor_pow()
        inside = (p > self.floor_ratio) & (p <= 1.0)
        return np.where(inside, self.exponent * p ** (self.exponent - 1.0) / (1.0 - fm), 0.0)[()]

    def quantile(self, u):
        fm = self._floor_pow()
        return ((fm + np.asarray(u, dtype=float) * (1.0 - fm)) ** (1.0 / self.exponent))[()]

    def sample(self, rng: np.random.Generator, size=None):
        return self.quantile(1.0 - rng.random(size))

    def mean(self) -> float:
        m, fm = self.exponent, self._floor_pow()
        return m * (1.0 - fm * self.floor_ratio) / ((m + 1.0) * (1.0 - fm))


@dataclass(frozen=True)
class PointMassDist:
    """Degenerate distribution concentrated at a single value."""

    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValidationError("point mass requires a finite value, got %r" % (self.value,))

    def cdf(self, x):
        return np.where(np.asarray(x, dtype=float) >= self.value, 1.0, 0.0)[()]

    def pdf(self, x):
        raise ValidationError("a point mass has no density")

    def quantile(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.value)[()]

    def sample(self, rng: np.random.Generator, size=None):
        rng.random(size)  # consume one uniform so stream layout matches other dists
        if size is None:
            return self.value
        return np.full(size, self.value)

    def mean(self) -> float:
        return self.value
