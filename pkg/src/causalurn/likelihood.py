"""Exact randomization likelihood over (n11, n10) for a fixed harmed count.

The treatment arm of a completely randomized experiment is a draw of N1
balls, without replacement, from an urn holding one ball per unit typed by
its potential outcomes. For a fixed number of harmed units the urn
composition is pinned down by (n11, n10), and the chance of the observed
table is a multivariate hypergeometric sum

    sum_x C(n11, x) C(n10, n11_obs - x) C(n01, n01 + n11 - n01_obs - x)
          C(n00, n10_obs + n01_obs + x - n01 - n11)  /  C(N, N1)

over the feasible counts x of always-responders assigned to treatment
(n00 = N - n11 - n10 - n01). With no harmed units the sum collapses to a
single term. Evaluation is in log space with log-sum-exp; exact big-integer
rationals back every computation at desk scale and all oracle comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .tables import (
    InfeasibleError,
    ObservedTable,
    ParameterPoint,
    general_support,
)

#: Log of an impossible event; compares below every finite log-likelihood.
LOG_ZERO = float("-inf")

#: Populations up to this size use exact rational likelihoods for argmax
#: and posterior work; beyond it, floating log space only.
EXACT_N_LIMIT = 60

# Below this min(k, n-k) the binomial coefficient is computed exactly and
# logged once; above it, a compensated sum of log factors.
_EXACT_SIDE_LIMIT = 10_000


def log_choose(n: int, k: int) -> float:
    """Natural log of C(n, k).

    Exact-integer evaluation whenever min(k, n-k) <= 10^4, so results are
    correct to one rounding for every population this library targets;
    the compensated-sum fallback for huge balanced coefficients stays well
    inside 1e-10 absolute error for n up to 10^6.
    """
    if k < 0 or k > n:
        raise ValueError(f"k must be in [0, {n}], got {k}")
    side = min(k, n - k)
    if side <= _EXACT_SIDE_LIMIT:
        return math.log(math.comb(n, k))
    return math.fsum(
        math.log(n - side + i) - math.log(i) for i in range(1, side + 1)
    )


def log_choose_or_zero(n: int, k: int) -> float:
    """Like :func:`log_choose` but LOG_ZERO for out-of-range terms."""
    if n < 0 or k < 0 or k > n:
        return LOG_ZERO
    return log_choose(n, k)


def _logsumexp(terms: list[float]) -> float:
    peak = max(terms)
    if peak == LOG_ZERO:
        return LOG_ZERO
    return peak + math.log(sum(math.exp(t - peak) for t in terms))


def _x_range(obs: ObservedTable, point: ParameterPoint) -> tuple[int, int]:
    # Bounds on the number of always-responders assigned to treatment; the
    # point has positive likelihood exactly when lo <= hi.
    lo = max(
        0,
        obs.n11 - point.n10,
        point.n11 - obs.n01,
        point.n01 + point.n11 - obs.n10 - obs.n01,
    )
    hi = min(
        point.n11,
        obs.n11,
        point.n01 + point.n11 - obs.n01,
        obs.total - point.n10 - obs.n10 - obs.n01,
    )
    return lo, hi


def loglik_monotone(obs: ObservedTable, point: ParameterPoint) -> float:
    """Log-likelihood of (n11, n10) when no unit is harmed.

    LOG_ZERO outside the feasible region. The point must carry n01 = 0.
    """
    if point.n01 != 0:
        raise ValueError("monotone likelihood requires a point with n01 = 0")
    total = obs.total
    n11, n10 = point.n11, point.n10
    if not obs.n01 <= n11 <= obs.n11 + obs.n01 <= n10 + n11 <= total - obs.n10:
        return LOG_ZERO
    return (
        log_choose(n11, n11 - obs.n01)
        + log_choose(n10, obs.n11 + obs.n01 - n11)
        + log_choose(total - n10 - n11, obs.n10)
        - log_choose(total, obs.n_treated)
    )


def loglik_general(obs: ObservedTable, point: ParameterPoint) -> float:
    """Log-likelihood of (n11, n10) given the point's harmed count.

    Log-sum-exp over the inner sum; LOG_ZERO wherever the point lies off
    the feasible region (including an empty inner range). At n01 = 0 this
    reproduces :func:`loglik_monotone` bit for bit.
    """
    total = obs.total
    n00 = total - point.n11 - point.n10 - point.n01
    if n00 < 0:
        return LOG_ZERO
    lo, hi = _x_range(obs, point)
    if lo > hi:
        return LOG_ZERO
    terms = [
        log_choose(point.n11, x)
        + log_choose(point.n10, obs.n11 - x)
        + log_choose(point.n01, point.n01 + point.n11 - obs.n01 - x)
        + log_choose(n00, obs.n10 + obs.n01 + x - point.n01 - point.n11)
        for x in range(lo, hi + 1)
    ]
    return _logsumexp(terms) - log_choose(total, obs.n_treated)


def likelihood_exact(obs: ObservedTable, point: ParameterPoint) -> Fraction:
    """The same likelihood as an exact rational; 0 off the support."""
    total = obs.total
    n00 = total - point.n11 - point.n10 - point.n01
    if n00 < 0:
        return Fraction(0)
    lo, hi = _x_range(obs, point)
    if lo > hi:
        return Fraction(0)
    numerator = sum(
        math.comb(point.n11, x)
        * math.comb(point.n10, obs.n11 - x)
        * math.comb(point.n01, point.n01 + point.n11 - obs.n01 - x)
        * math.comb(n00, obs.n10 + obs.n01 + x - point.n01 - point.n11)
        for x in range(lo, hi + 1)
    )
    return Fraction(numerator, math.comb(total, obs.n_treated))


@dataclass(frozen=True)
class LikelihoodSurface:
    """Log-likelihood over the full support grid for one harmed count.

    ``entries`` maps each support point to its log-likelihood, iterated in
    lexicographic (n11, n10) order. The exponentiated entries sum to a
    positive finite value; normalization is the posterior's job.
    """

    n01: int
    n: int
    n_treated: int
    n_control: int
    entries: Mapping[ParameterPoint, float]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def points(self) -> tuple[ParameterPoint, ...]:
        return tuple(self.entries)


def surface(obs: ObservedTable, n01: int) -> LikelihoodSurface:
    """Evaluate the likelihood over every support point.

    An empty surface (no support) is a valid result and signals an
    infeasible ``n01`` for this data.
    """
    entries = {
        point: loglik_general(obs, point) for point in general_support(obs, n01)
    }
    return LikelihoodSurface(
        n01=n01,
        n=obs.total,
        n_treated=obs.n_treated,
        n_control=obs.n_control,
        entries=entries,
    )


@dataclass(frozen=True)
class MaxLikelihood:
    """Argmax set of the likelihood; ties are preserved, never broken."""

    points: tuple[ParameterPoint, ...]
    tau_values: tuple[Fraction, ...]
    log_likelihood: float


def mle(obs: ObservedTable, n01: int = 0) -> MaxLikelihood:
    """Maximum-likelihood point(s) and the implied effect value(s).

    Uses exact rational comparison for populations up to EXACT_N_LIMIT, so
    genuine discrete ties survive; beyond that, exact float comparison of
    log-likelihoods.
    """
    support = general_support(obs, n01)
    if not support:
        raise InfeasibleError(f"empty likelihood support at n01={n01}")
    total = obs.total
    if total <= EXACT_N_LIMIT:
        values = [(likelihood_exact(obs, point), point) for point in support]
        best = max(value for value, _ in values)
        points = tuple(point for value, point in values if value == best)
        log_best = math.log(best)
    else:
        values = [(loglik_general(obs, point), point) for point in support]
        log_best = max(value for value, _ in values)
        points = tuple(point for value, point in values if value == log_best)
    tau_values = tuple(sorted({Fraction(p.n10 - n01, total) for p in points}))
    return MaxLikelihood(points=points, tau_values=tau_values, log_likelihood=log_best)
