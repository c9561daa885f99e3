"""Posterior inference over the likelihood support for a fixed harmed count.

With the harmed count held fixed, the posterior over (n11, n10) under any
prior is proportional to prior weight times the randomization likelihood,
normalized over the finite support. Posteriors of derived quantities (the
average effect, the attributable effect) are pushforwards of that point
posterior. At desk scale all masses are exact rationals, so modes and
highest-density windows never depend on float dust.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .likelihood import (
    EXACT_N_LIMIT,
    LOG_ZERO,
    likelihood_exact,
    loglik_general,
)
from .tables import (
    InfeasibleError,
    IntervalEstimate,
    ObservedTable,
    ParameterPoint,
    general_support,
)

_MASS_TOLERANCE = 1e-9


@dataclass(frozen=True)
class DiscreteDistribution:
    """Normalized probability mass on a strictly increasing finite support."""

    support: tuple
    mass: tuple

    def __post_init__(self) -> None:
        if len(self.support) != len(self.mass):
            raise ValueError("support and mass must align")
        if not self.support:
            raise ValueError("empty distribution")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise ValueError("support must be strictly increasing")
        if any(m < 0 for m in self.mass):
            raise ValueError("masses must be nonnegative")
        total = sum(self.mass)
        if abs(float(total) - 1.0) > _MASS_TOLERANCE:
            raise ValueError(f"masses sum to {float(total)}, not 1")

    def __len__(self) -> int:
        return len(self.support)

    def mode(self):
        """Smallest support value attaining the maximum mass."""
        best = max(self.mass)
        for value, mass in zip(self.support, self.mass):
            if mass == best:
                return value

    def median(self):
        """Smallest support value whose cumulative mass reaches one half.

        On these skewed discrete posteriors the median is the stable point
        summary: for the worked example it stays on the same grid value
        across the whole sensitivity sweep, which the mode does not.
        """
        half = Fraction(1, 2)
        cumulative = 0
        for value, mass in zip(self.support, self.mass):
            cumulative = cumulative + mass
            if cumulative >= half:
                return value
        return self.support[-1]

    def mean(self):
        return sum(v * m for v, m in zip(self.support, self.mass))

    def mass_at(self, value):
        for v, m in zip(self.support, self.mass):
            if v == value:
                return m
        return 0


@dataclass(frozen=True)
class Prior:
    """Prior weights over parameter points: uniform, or an explicit table.

    Table weights are exact rationals; points absent from the table carry
    weight zero. No parametric families: the module stays model-free.
    """

    kind: str
    weights: Optional[Mapping[ParameterPoint, Fraction]] = None

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "table"):
            raise ValueError(f"unknown prior kind {self.kind!r}")
        if self.kind == "table":
            if not self.weights:
                raise ValueError("table prior needs at least one weighted point")
            if any(w < 0 for w in self.weights.values()):
                raise ValueError("prior weights must be nonnegative")
            if not any(w > 0 for w in self.weights.values()):
                raise ValueError("prior must put positive weight somewhere")

    @staticmethod
    def uniform() -> "Prior":
        return Prior(kind="uniform")

    @classmethod
    def from_weights(cls, weights: Mapping[ParameterPoint, object]) -> "Prior":
        table = {point: Fraction(w) for point, w in weights.items()}
        return cls(kind="table", weights=table)

    def weight(self, point: ParameterPoint) -> Fraction:
        if self.kind == "uniform":
            return Fraction(1)
        return self.weights.get(point, Fraction(0))


UNIFORM = Prior.uniform()


def posterior_points(
    obs: ObservedTable, n01: int = 0, prior: Prior = UNIFORM
) -> DiscreteDistribution:
    """Posterior over support points: prior times likelihood, normalized.

    Under the uniform prior the posterior is exactly the normalized
    likelihood. Raises when the support is empty or the prior annihilates
    all of it.
    """
    support = general_support(obs, n01)
    if not support:
        raise InfeasibleError(f"empty likelihood support at n01={n01}")
    weights = [prior.weight(point) for point in support]
    if obs.total <= EXACT_N_LIMIT:
        masses = [w * likelihood_exact(obs, p) for w, p in zip(weights, support)]
        total = sum(masses)
        if total == 0:
            raise ValueError("prior assigns zero weight to the entire support")
        masses = [m / total for m in masses]
    else:
        logs = [
            math.log(w) + loglik_general(obs, p) if w > 0 else LOG_ZERO
            for w, p in zip(weights, support)
        ]
        peak = max(logs)
        if peak == LOG_ZERO:
            raise ValueError("prior assigns zero weight to the entire support")
        raw = [math.exp(v - peak) if v > LOG_ZERO else 0.0 for v in logs]
        total = math.fsum(raw)
        masses = [r / total for r in raw]
    return DiscreteDistribution(support=support, mass=tuple(masses))


def _pushforward(dist: DiscreteDistribution, fn: Callable) -> DiscreteDistribution:
    accumulated: dict = {}
    for point, mass in zip(dist.support, dist.mass):
        value = fn(point)
        accumulated[value] = accumulated.get(value, 0) + mass
    # A pushforward's support is where mass actually lives; grid points
    # zeroed out by the prior are dropped.
    support = tuple(sorted(v for v, m in accumulated.items() if m > 0))
    return DiscreteDistribution(
        support=support, mass=tuple(accumulated[v] for v in support)
    )


def tau_posterior(
    obs: ObservedTable, n01: int = 0, prior: Prior = UNIFORM
) -> DiscreteDistribution:
    """Posterior of the average causal effect, on the grid (k - n01)/N."""
    dist = posterior_points(obs, n01, prior)
    total = obs.total
    return _pushforward(dist, lambda p: Fraction(p.n10 - n01, total))


def a_posterior(
    obs: ObservedTable, n01: int = 0, prior: Prior = UNIFORM
) -> DiscreteDistribution:
    """Posterior of the attributable effect A = n11_obs + n01_obs - n01 - n11."""
    dist = posterior_points(obs, n01, prior)
    base = obs.n11 + obs.n01 - n01
    return _pushforward(dist, lambda p: base - p.n11)


def hpd_window(dist: DiscreteDistribution, level: float) -> tuple:
    """Smallest contiguous support window holding at least ``level`` mass.

    Among windows of minimal width the one with the larger mass wins; any
    remaining tie goes to the window most symmetric around the mode, then
    to the leftmost. Returns (low value, high value, window mass).
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    size = len(dist.support)
    best_mass = max(dist.mass)
    mode_index = next(i for i, m in enumerate(dist.mass) if m == best_mass)
    prefix = [0]
    for mass in dist.mass:
        prefix.append(prefix[-1] + mass)
    for width in range(1, size + 1):
        best = None
        for lo in range(size - width + 1):
            window_mass = prefix[lo + width] - prefix[lo]
            if window_mass >= level:
                asymmetry = abs(2 * lo + width - 1 - 2 * mode_index)
                candidate = (-window_mass, asymmetry, lo)
                if best is None or candidate < best:
                    best = candidate
        if best is not None:
            _, _, lo = best
            hi = lo + width - 1
            return dist.support[lo], dist.support[hi], prefix[hi + 1] - prefix[lo]
    # Mass never reached the level (float dust near level ~ 1): full hull.
    return dist.support[0], dist.support[-1], prefix[-1]


def hpd_interval(dist: DiscreteDistribution, level: float = 0.95) -> IntervalEstimate:
    """Highest-density window as an interval; the point is the mode."""
    lo, hi, _ = hpd_window(dist, level)
    return IntervalEstimate(
        point=float(dist.mode()),
        lower=float(lo),
        upper=float(hi),
        level=level,
        method="bayes-hpd",
    )
