"""Ground-truth engine: exact enumeration of treatment assignments.

Every closed-form formula in this package can be checked against brute
force. For a given science table, assignments that place the same number
of each unit type into the treatment arm produce identical observed data,
so enumeration runs over type compositions (at most (N1+1)^3 cells)
weighted by multivariate hypergeometric counts instead of over all
C(N, N1) raw assignments. Probabilities are exact rationals throughout;
a seeded Monte Carlo stand-in covers populations beyond the enumeration
cap.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Callable, NamedTuple, Optional

import numpy as np

from .moments import population_tau_variance
from .tables import ObservedTable, ScienceTable

ENUM_CAP_ENV = "CAUSALURN_ENUM_CAP"
DEFAULT_ENUM_CAP = 10**6


class EnumerationCapError(ValueError):
    """The assignment space is too large to enumerate; use monte_carlo."""


def enumeration_cap() -> int:
    raw = os.environ.get(ENUM_CAP_ENV)
    if raw is None:
        return DEFAULT_ENUM_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"{ENUM_CAP_ENV} must be an integer, got {raw!r}") from None
    if cap < 1:
        raise ValueError(f"{ENUM_CAP_ENV} must be positive, got {cap}")
    return cap


@dataclass(frozen=True)
class AssignmentRecord:
    """One type composition of the treatment arm and its statistics.

    ``treated_types`` counts, per potential-outcome type (11, 10, 01, 00),
    how many units of that type were assigned to treatment. The
    attributable effect is treated helped minus treated harmed; it varies
    across compositions that share an observed table.
    """

    observed: ObservedTable
    treated_types: tuple[int, int, int, int]
    probability: Fraction
    tau_hat: Fraction
    attributable: int


@dataclass(frozen=True)
class AssignmentDistribution:
    """Sampling distribution of the observed data for one science table."""

    science: ScienceTable
    n_treated: int
    records: tuple[AssignmentRecord, ...]
    outcomes: dict
    n_assignments: int
    kind: str = "exact"
    draws: Optional[int] = None
    rng: Optional[str] = None

    @property
    def n_control(self) -> int:
        return self.science.total - self.n_treated

    def expectation(self, fn: Callable[[AssignmentRecord], object]) -> Fraction:
        return sum(record.probability * fn(record) for record in self.records)

    def moments(self, fn: Callable[[AssignmentRecord], object]) -> tuple:
        mean = self.expectation(fn)
        second = self.expectation(lambda r: fn(r) ** 2)
        return mean, second - mean * mean

    def tau_hat_moments(self) -> tuple:
        return self.moments(lambda r: r.tau_hat)

    def prediction_gap_moments(self) -> tuple:
        """Mean and variance of A - N1 * tau_hat."""
        n1 = self.n_treated
        return self.moments(lambda r: r.attributable - n1 * r.tau_hat)


def _record(
    science: ScienceTable, n_treated: int, types: tuple[int, int, int, int],
    probability: Fraction,
) -> AssignmentRecord:
    x11, x10, x01, x00 = types
    observed = ObservedTable(
        n11=x11 + x10,
        n10=x01 + x00,
        n01=(science.n11 - x11) + (science.n01 - x01),
        n00=(science.n10 - x10) + (science.n00 - x00),
    )
    n_control = science.total - n_treated
    t_hat = Fraction(observed.n11, n_treated) - Fraction(observed.n01, n_control)
    return AssignmentRecord(
        observed=observed,
        treated_types=types,
        probability=probability,
        tau_hat=t_hat,
        attributable=x10 - x01,
    )


def _aggregate_outcomes(records: tuple[AssignmentRecord, ...]) -> dict:
    outcomes: dict = {}
    for record in records:
        outcomes[record.observed] = (
            outcomes.get(record.observed, Fraction(0)) + record.probability
        )
    return outcomes


def enumerate_assignments(
    science: ScienceTable, n_treated: int, cap: Optional[int] = None
) -> AssignmentDistribution:
    """Exact sampling distribution over all C(N, N1) assignments."""
    total = science.total
    if not 1 <= n_treated <= total - 1:
        raise ValueError("n_treated must leave both arms nonempty")
    n_assignments = math.comb(total, n_treated)
    limit = enumeration_cap() if cap is None else cap
    if n_assignments > limit:
        raise EnumerationCapError(
            f"C({total}, {n_treated}) = {n_assignments} exceeds the cap {limit}; "
            "use monte_carlo instead"
        )
    records = []
    for x11 in range(min(science.n11, n_treated) + 1):
        for x10 in range(min(science.n10, n_treated - x11) + 1):
            for x01 in range(min(science.n01, n_treated - x11 - x10) + 1):
                x00 = n_treated - x11 - x10 - x01
                if x00 > science.n00:
                    continue
                ways = (
                    math.comb(science.n11, x11)
                    * math.comb(science.n10, x10)
                    * math.comb(science.n01, x01)
                    * math.comb(science.n00, x00)
                )
                records.append(
                    _record(
                        science, n_treated, (x11, x10, x01, x00),
                        Fraction(ways, n_assignments),
                    )
                )
    records = tuple(records)
    total_mass = sum(r.probability for r in records)
    if total_mass != 1:
        raise AssertionError(f"composition probabilities sum to {total_mass}")
    return AssignmentDistribution(
        science=science,
        n_treated=n_treated,
        records=records,
        outcomes=_aggregate_outcomes(records),
        n_assignments=n_assignments,
    )


def monte_carlo(
    science: ScienceTable, n_treated: int, draws: int, seed: int
) -> AssignmentDistribution:
    """Seeded empirical stand-in: frequencies replace exact probabilities.

    The same seed always reproduces the same distribution; the PRNG is
    recorded in the result so runs can be replicated elsewhere.
    """
    total = science.total
    if not 1 <= n_treated <= total - 1:
        raise ValueError("n_treated must leave both arms nonempty")
    if draws < 1:
        raise ValueError("draws must be positive")
    rng = np.random.default_rng(seed)
    colors = [science.n11, science.n10, science.n01, science.n00]
    samples = rng.multivariate_hypergeometric(colors, n_treated, size=draws)
    compositions, counts = np.unique(samples, axis=0, return_counts=True)
    records = tuple(
        _record(
            science, n_treated, tuple(int(v) for v in comp),
            Fraction(int(count), draws),
        )
        for comp, count in zip(compositions, counts)
    )
    return AssignmentDistribution(
        science=science,
        n_treated=n_treated,
        records=records,
        outcomes=_aggregate_outcomes(records),
        n_assignments=math.comb(total, n_treated),
        kind="monte-carlo",
        draws=draws,
        rng=f"numpy.random.Generator(PCG64(seed={seed})), numpy {np.__version__}",
    )


class Lemma1Report(NamedTuple):
    mean: Fraction
    variance: Fraction
    matches: bool


def lemma1_check(
    constants, n_treated: int, cap: Optional[int] = None
) -> Lemma1Report:
    """Exact moments of a treated-arm total of fixed constants.

    Enumerates every assignment and reports whether the moments equal
    N1 * mean(c) and (N1 N0 / N) * S_c^2, the sampling formulas all the
    variance results reduce to.
    """
    values = [Fraction(c) for c in constants]
    total = len(values)
    if total < 2:
        raise ValueError("need at least 2 constants")
    if not 1 <= n_treated <= total - 1:
        raise ValueError("n_treated must leave both arms nonempty")
    n_assignments = math.comb(total, n_treated)
    limit = enumeration_cap() if cap is None else cap
    if n_assignments > limit:
        raise EnumerationCapError(
            f"C({total}, {n_treated}) = {n_assignments} exceeds the cap {limit}"
        )
    sums = [
        sum(combo) for combo in itertools.combinations(values, n_treated)
    ]
    mean = Fraction(sum(sums), n_assignments)
    variance = Fraction(sum(s * s for s in sums), n_assignments) - mean * mean
    c_bar = sum(values) / total
    s_c2 = sum((c - c_bar) ** 2 for c in values) / (total - 1)
    expected_mean = n_treated * c_bar
    expected_var = Fraction(n_treated * (total - n_treated), total) * s_c2
    return Lemma1Report(
        mean=mean,
        variance=variance,
        matches=(mean == expected_mean and variance == expected_var),
    )


@dataclass(frozen=True)
class NormalityReport:
    """Distance of the studentized estimator from the standard normal.

    Report-only: the underlying claim is asymptotic, so no hard threshold
    is attached. ``excluded`` counts draws whose plug-in variance was zero
    and could not be studentized.
    """

    science: ScienceTable
    n_treated: int
    draws: int
    seed: int
    skipped: bool
    ks_statistic: Optional[float] = None
    excluded: int = 0
    reason: str = ""
    rng: Optional[str] = None


def normality_check(
    science: ScienceTable, n_treated: int, draws: int, seed: int
) -> NormalityReport:
    """Kolmogorov-Smirnov distance of (tau_hat - tau)/sqrt(V_hat) from N(0,1)."""
    if draws < 10**4:
        raise ValueError("need at least 10^4 draws for a stable distance")
    total = science.total
    if population_tau_variance(science, n_treated) == 0:
        return NormalityReport(
            science=science, n_treated=n_treated, draws=draws, seed=seed,
            skipped=True, reason="degenerate science table: estimator variance is 0",
        )
    rng = np.random.default_rng(seed)
    colors = [science.n11, science.n10, science.n01, science.n00]
    samples = rng.multivariate_hypergeometric(colors, n_treated, size=draws)
    n_control = total - n_treated
    n11_obs = samples[:, 0] + samples[:, 1]
    n01_obs = (science.n11 - samples[:, 0]) + (science.n01 - samples[:, 2])
    p1 = n11_obs / n_treated
    p0 = n01_obs / n_control
    t_hat = p1 - p0
    v_hat = (total / (total - 1)) * (
        p1 * (1 - p1) / n_treated
        + p0 * (1 - p0) / n_control
        - t_hat * (1 - t_hat) / total
    )
    usable = v_hat > 0
    z = np.sort((t_hat[usable] - float(science.tau)) / np.sqrt(v_hat[usable]))
    cdf = NormalDist().cdf
    n = len(z)
    distance = max(
        max((i + 1) / n - cdf(v), cdf(v) - i / n) for i, v in enumerate(z.tolist())
    )
    return NormalityReport(
        science=science, n_treated=n_treated, draws=draws, seed=seed,
        skipped=False, ks_statistic=float(distance),
        excluded=int(draws - n),
        rng=f"numpy.random.Generator(PCG64(seed={seed})), numpy {np.__version__}",
    )
