"""
dists.py
Utility distributions for the Monte Carlo experiments and the uniform gas-size
distribution.

Light-tailed: Exponential(theta), LogNormal(mu, sigma), Rayleigh(sigma).
Heavy-tailed: Levy(mu, sigma), Pareto(alpha) with support x >= 1.

Densities and CDFs come from the matching scipy.stats families. Sampling is
exact and rejection free: inverse CDF for Exponential, Rayleigh and Pareto,
exp(mu + sigma Z) for LogNormal and mu + sigma / Z^2 for Levy, Z standard normal.
"""
import logging
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import stats

from module_block_building.errors import ConfigError

logger = logging.getLogger(__name__)


def _fmt(value):
    return f"{value:g}"


class UtilityDistribution:
    """Base class: subclasses provide `_frozen()` (a scipy frozen distribution) and `_draw()`."""
    kind_index = -1
    heavy_tailed = False

    @property
    def params(self):
        raise NotImplementedError

    @property
    def name(self):
        return f"{type(self).__name__}({','.join(_fmt(p) for p in self.params)})"

    @property
    def slug(self):
        """File-name friendly form of `name`, e.g. pareto-0.5."""
        return '-'.join([type(self).__name__.lower()] + [_fmt(p) for p in self.params])

    @property
    def support_lower(self):
        """Smallest value the distribution can take (Levy: mu, Pareto: 1, others: 0)."""
        return float(self._frozen().support()[0])

    def __str__(self):
        return self.name

    def _frozen(self):
        raise NotImplementedError

    def _draw(self, n, rng):
        raise NotImplementedError

    def pdf(self, x):
        return self._frozen().pdf(x)

    def cdf(self, x):
        return self._frozen().cdf(x)

    def sample(self, n, rng):
        if n < 0:
            raise ValueError(f"sample size must be nonnegative, got {n}")
        if n == 0:
            return np.empty(0)
        return np.asarray(self._draw(n, rng), dtype=np.float64)


def _require_positive(label, **values):
    for key, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise ConfigError(f"{label}: {key} must be positive, got {value}")


def _require_finite(label, **values):
    for key, value in values.items():
        if not math.isfinite(value):
            raise ConfigError(f"{label}: {key} must be finite, got {value}")


@dataclass(frozen=True)
class Exponential(UtilityDistribution):
    theta: float
    kind_index = 0

    def __post_init__(self):
        _require_positive('Exponential', theta=self.theta)

    @property
    def params(self):
        return (self.theta,)

    def _frozen(self):
        return stats.expon(scale=self.theta)

    def _draw(self, n, rng):
        return self._frozen().ppf(rng.random(n))


@dataclass(frozen=True)
class LogNormal(UtilityDistribution):
    mu: float
    sigma: float
    kind_index = 1

    def __post_init__(self):
        _require_finite('LogNormal', mu=self.mu)
        _require_positive('LogNormal', sigma=self.sigma)

    @property
    def params(self):
        return (self.mu, self.sigma)

    def _frozen(self):
        return stats.lognorm(s=self.sigma, scale=math.exp(self.mu))

    def _draw(self, n, rng):
        return np.exp(self.mu + self.sigma * rng.standard_normal(n))


@dataclass(frozen=True)
class Rayleigh(UtilityDistribution):
    sigma: float
    kind_index = 2

    def __post_init__(self):
        _require_positive('Rayleigh', sigma=self.sigma)

    @property
    def params(self):
        return (self.sigma,)

    def _frozen(self):
        return stats.rayleigh(scale=self.sigma)

    def _draw(self, n, rng):
        return self._frozen().ppf(rng.random(n))


@dataclass(frozen=True)
class Levy(UtilityDistribution):
    mu: float
    sigma: float
    kind_index = 3
    heavy_tailed = True

    def __post_init__(self):
        _require_finite('Levy', mu=self.mu)
        _require_positive('Levy', sigma=self.sigma)

    @property
    def params(self):
        return (self.mu, self.sigma)

    def _frozen(self):
        return stats.levy(loc=self.mu, scale=self.sigma)

    def _draw(self, n, rng):
        z = rng.standard_normal(n)
        return self.mu + self.sigma / (z * z)


@dataclass(frozen=True)
class Pareto(UtilityDistribution):
    """One-parameter Pareto, density alpha / x^(alpha+1) on x >= 1 (unit scale)."""
    alpha: float
    kind_index = 4
    heavy_tailed = True

    def __post_init__(self):
        _require_positive('Pareto', alpha=self.alpha)

    @property
    def params(self):
        return (self.alpha,)

    def _frozen(self):
        return stats.pareto(b=self.alpha)

    def _draw(self, n, rng):
        return self._frozen().ppf(rng.random(n))


DISTRIBUTIONS = {cls.__name__.lower(): cls for cls in (Exponential, LogNormal, Rayleigh, Levy, Pareto)}

REFERENCE_DISTRIBUTIONS = (
    Exponential(2.5),
    LogNormal(1.0, 1.0),
    Rayleigh(1.0),
    Levy(0.0, 1.0),
    Pareto(0.5),
)

_SPEC_RE = re.compile(r'^\s*([A-Za-z]+)\s*\(\s*([^()]*?)\s*\)\s*$')


def parse_distribution(text: str) -> UtilityDistribution:
    """Parse `Name(p1,p2)`, e.g. `Pareto(0.5)` or `lognormal(1, 1)`."""
    match = _SPEC_RE.match(text)
    if not match:
        raise ConfigError(f"distribution must look like Name(p1,p2), got {text!r}")
    name, args = match.groups()
    cls = DISTRIBUTIONS.get(name.lower())
    if cls is None:
        raise ConfigError(f"unknown distribution {name!r}; expected one of "
                          f"{', '.join(c.__name__ for c in DISTRIBUTIONS.values())}")
    try:
        params = [float(p) for p in args.split(',')] if args else []
    except ValueError:
        raise ConfigError(f"distribution parameters must be numbers, got {args!r}") from None
    try:
        return cls(*params)
    except TypeError:
        raise ConfigError(f"{cls.__name__} takes {len(cls.__dataclass_fields__)} parameter(s), "
                          f"got {len(params)}") from None


# Module-level operations mirroring the methods, for callers holding a distribution value.

def pdf(d: UtilityDistribution, x):
    """Density; zero outside the support."""
    return d.pdf(x)


def cdf(d: UtilityDistribution, x):
    return d.cdf(x)


def sample(d: UtilityDistribution, n: int, rng: np.random.Generator):
    return d.sample(n, rng)


def sample_gas(lo: float, hi: float, n: int, rng: np.random.Generator):
    """n uniform transaction sizes on [lo, hi]."""
    if not (math.isfinite(lo) and lo > 0):
        raise ConfigError(f"gas lower bound must be positive, got {lo}")
    if not (math.isfinite(hi) and hi >= lo):
        raise ConfigError(f"gas upper bound must be >= lower bound, got [{lo}, {hi}]")
    if n < 0:
        raise ValueError(f"sample size must be nonnegative, got {n}")
    return rng.uniform(lo, hi, n)
