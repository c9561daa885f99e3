"""Inference for the attributable effect via the count of responders.

The attributable effect, the number of treated units whose outcome was
changed by treatment, satisfies A = n11_obs + n01_obs - s where s is the
fixed number of units that respond under control. Randomization makes the
observed control successes hypergeometric: n01_obs counts how many of the
s responders landed in the control arm of size N0. Testing s therefore
reduces to a classical hypergeometric problem, and every result here is
free of any assumption about the association between potential outcomes:
none of these functions take a harmed count.

All p-values are computed in exact rational arithmetic, so ties in the
Hodges-Lehmann-type maximization are genuine, not float artifacts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from statistics import median

from .bayes import DiscreteDistribution
from .moments import normal_quantile, tau_hat
from .tables import IntervalEstimate, ObservedTable


@dataclass(frozen=True)
class HypergeomLaw:
    """Number of successes among ``draws`` taken from ``population``."""

    population: int
    successes: int
    draws: int

    def __post_init__(self) -> None:
        if not 0 <= self.successes <= self.population:
            raise ValueError("successes must lie in [0, population]")
        if not 1 <= self.draws <= self.population - 1:
            raise ValueError("draws must leave the rest of the population nonempty")

    @property
    def support(self) -> range:
        lo = max(0, self.successes - (self.population - self.draws))
        hi = min(self.successes, self.draws)
        return range(lo, hi + 1)

    def pmf(self, h: int) -> Fraction:
        if h not in self.support:
            return Fraction(0)
        return Fraction(
            math.comb(self.successes, h)
            * math.comb(self.population - self.successes, self.draws - h),
            math.comb(self.population, self.draws),
        )

    def pmf_table(self) -> tuple[tuple[int, Fraction], ...]:
        return tuple((h, self.pmf(h)) for h in self.support)


def control_law(obs: ObservedTable, s: int) -> HypergeomLaw:
    """Law of the observed control successes when ``s`` units respond
    under control: draws are the N0 control slots."""
    return HypergeomLaw(population=obs.total, successes=s, draws=obs.n_control)


def pvalue_exact(obs: ObservedTable, s: int) -> Fraction:
    """Two-sided p-value for s: total mass no likelier than the observed count.

    Zero when the observed control-success count is impossible under s.
    """
    law = control_law(obs, s)
    observed = obs.n01
    if observed not in law.support:
        return Fraction(0)
    observed_mass = law.pmf(observed)
    return sum(mass for _, mass in law.pmf_table() if mass <= observed_mass)


def pvalue(obs: ObservedTable, s: int) -> float:
    return float(pvalue_exact(obs, s))


def hl_estimate(obs: ObservedTable) -> tuple[int, ...]:
    """Attributable-effect values from the s values maximizing the p-value.

    Discreteness makes ties real; the whole set is returned, ascending.
    """
    base = obs.n11 + obs.n01
    best = Fraction(0)
    argmax: list[int] = []
    for s in range(obs.total + 1):
        p = pvalue_exact(obs, s)
        if p > best:
            best, argmax = p, [s]
        elif p == best and p > 0:
            argmax.append(s)
    return tuple(sorted(base - s for s in argmax))


def interval_A(
    obs: ObservedTable, alpha: float = 0.05
) -> tuple[IntervalEstimate, tuple[int, ...]]:
    """Test-inversion interval for A plus the full retained value set.

    Retains every s with p(s) > alpha and maps through A = n11 + n01 - s.
    The interval is the hull of the retained values, which need not be
    contiguous for this p-value ordering, hence the companion set. The
    point is the median of the Hodges-Lehmann set.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    base = obs.n11 + obs.n01
    retained = tuple(
        sorted(base - s for s in range(obs.total + 1) if pvalue_exact(obs, s) > alpha)
    )
    estimate = IntervalEstimate(
        point=float(median(hl_estimate(obs))),
        lower=float(retained[0]),
        upper=float(retained[-1]),
        level=1.0 - alpha,
        method="exact-inversion",
    )
    return estimate, retained


def neyman_predict(
    obs: ObservedTable, level: float = 0.95, compat_paper_mse: bool = False
) -> IntervalEstimate:
    """Unbiased prediction of A by N1 * tau_hat with its mean squared error.

    The mean squared error is N^2 N1 p0(1-p0) / {N0 (N-1)} with the
    control-arm rate plugged in. ``compat_paper_mse`` substitutes the
    treated-arm rate p1(1-p1), a variant convention kept for comparability;
    see the README. The prediction is not rounded to integers: out-of-range
    values are the moment method's documented behavior.
    """
    point = obs.n_treated * tau_hat(obs)
    rate = obs.p1_hat if compat_paper_mse else obs.p0_hat
    total = obs.total
    mse = Fraction(
        total * total * obs.n_treated, obs.n_control * (total - 1)
    ) * rate * (1 - rate)
    z = normal_quantile(level)
    center = float(point)
    half = z * math.sqrt(mse)
    return IntervalEstimate(
        point=center, lower=center - half, upper=center + half,
        level=level, method="prediction",
    )


def standardized_pvalues(obs: ObservedTable) -> DiscreteDistribution:
    """p-value curve rescaled to sum 1, indexed by the attributable effect.

    Covers the attainable values A in [0, n11_obs], i.e. the s range
    compatible with the observed table when no unit is harmed; this is the
    plot-ready companion to the posterior of A and shares its support hull.
    """
    base = obs.n11 + obs.n01
    values = [(a, pvalue_exact(obs, base - a)) for a in range(obs.n11 + 1)]
    total = sum(p for _, p in values)
    return DiscreteDistribution(
        support=tuple(a for a, _ in values),
        mass=tuple(p / total for _, p in values),
    )
