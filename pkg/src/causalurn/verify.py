"""Oracle-versus-formula identity suite behind ``causalurn verify``.

Sweeps every science table up to a small population size and checks, by
exhaustive enumeration in exact rational arithmetic, that the closed-form
moments, the likelihood, and the feasibility regions agree with brute
force. The formula arguments exist so tests can inject a deliberately
wrong formula and confirm the suite catches it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

from . import likelihood, moments, oracle
from .tables import ObservedTable, ScienceTable, in_general_support

_MAX_REPORTED_FAILURES = 5


@dataclass
class CheckResult:
    name: str
    passed: int = 0
    failed: int = 0
    failures: list[str] = field(default_factory=list)

    def record(self, ok: bool, detail: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if len(self.failures) < _MAX_REPORTED_FAILURES:
                self.failures.append(detail)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        line = f"{status}  {self.name}: {self.passed} identities checked"
        if self.failed:
            line += f", {self.failed} failed"
        return line


@dataclass
class VerificationReport:
    max_n: int
    seed: int
    results: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(result.ok for result in self.results)

    def lines(self) -> list[str]:
        out = [result.line() for result in self.results]
        for result in self.results:
            for failure in result.failures:
                out.append(f"  failure [{result.name}]: {failure}")
        return out


def science_tables_up_to(max_n: int) -> Iterator[ScienceTable]:
    """Every science table with population size from 2 to ``max_n``."""
    for total in range(2, max_n + 1):
        for n11 in range(total + 1):
            for n10 in range(total - n11 + 1):
                for n01 in range(total - n11 - n10 + 1):
                    yield ScienceTable(n11, n10, n01, total - n11 - n10 - n01)


def _designs(max_n: int) -> Iterator[tuple[ScienceTable, int]]:
    for science in science_tables_up_to(max_n):
        for n_treated in range(1, science.total):
            yield science, n_treated


def run_verification(
    max_n: int = 8,
    seed: int = 0,
    mc_draws: int = 20_000,
    tau_variance: Optional[Callable[[ScienceTable, int], Fraction]] = None,
    attributable_mse: Optional[Callable[[ScienceTable, int], Fraction]] = None,
) -> VerificationReport:
    """Run the full identity suite over all designs with N <= ``max_n``."""
    tau_variance = tau_variance or moments.population_tau_variance
    attributable_mse = attributable_mse or moments.population_attributable_mse

    estimator = CheckResult("rate-difference mean and variance")
    cells = CheckResult("cell estimators are unbiased")
    prediction = CheckResult("attributable prediction moments")
    lik = CheckResult("likelihood equals assignment probability")
    support = CheckResult("support matches positive probability")
    lemma = CheckResult("treated-sum moments (constants)")
    mc = CheckResult("monte carlo agrees with exact moments")

    for science, n_treated in _designs(max_n):
        dist = oracle.enumerate_assignments(science, n_treated)
        label = f"science={science} N1={n_treated}"

        mean, variance = dist.tau_hat_moments()
        estimator.record(mean == science.tau, f"{label}: E(tau_hat)={mean}")
        estimator.record(
            variance == tau_variance(science, n_treated),
            f"{label}: var(tau_hat)={variance}",
        )

        n = science.total
        n_control = n - n_treated
        est_n11 = dist.expectation(
            lambda r: Fraction(n * r.observed.n01, n_control) - science.n01
        )
        est_n00 = dist.expectation(
            lambda r: Fraction(n * r.observed.n10, n_treated) - science.n01
        )
        est_n10 = dist.expectation(
            lambda r: n
            + science.n01
            - Fraction(n * r.observed.n01, n_control)
            - Fraction(n * r.observed.n10, n_treated)
        )
        cells.record(
            (est_n11, est_n00, est_n10)
            == (science.n11, science.n00, science.n10),
            f"{label}: cell means {(est_n11, est_n00, est_n10)}",
        )

        gap_mean, gap_var = dist.prediction_gap_moments()
        prediction.record(gap_mean == 0, f"{label}: E(A - N1 tau_hat)={gap_mean}")
        prediction.record(
            gap_var == attributable_mse(science, n_treated),
            f"{label}: var(A - N1 tau_hat)={gap_var}",
        )

        point = science.parameter_point
        for obs, probability in dist.outcomes.items():
            lik.record(
                likelihood.likelihood_exact(obs, point) == probability,
                f"{label} obs={obs}: likelihood != probability {probability}",
            )
            support.record(
                in_general_support(obs, point),
                f"{label} obs={obs}: reachable table outside the support region",
            )
        for obs in _all_observed(n, n_treated):
            if obs not in dist.outcomes:
                support.record(
                    not in_general_support(obs, point)
                    and likelihood.likelihood_exact(obs, point) == 0,
                    f"{label} obs={obs}: unreachable table inside the support",
                )

    for constants in _constant_families(max_n):
        for n_treated in range(1, len(constants)):
            report = oracle.lemma1_check(constants, n_treated)
            lemma.record(
                report.matches,
                f"constants={constants} N1={n_treated}: "
                f"mean={report.mean} var={report.variance}",
            )

    for science, n_treated in (
        (ScienceTable(13, 10, 0, 30), 32),
        (ScienceTable(5, 5, 5, 5), 10),
    ):
        empirical = oracle.monte_carlo(science, n_treated, mc_draws, seed)
        mean, _ = empirical.tau_hat_moments()
        spread = math.sqrt(tau_variance(science, n_treated) / mc_draws)
        mc.record(
            abs(float(mean - science.tau)) <= 4 * spread,
            f"MC science={science} N1={n_treated}: mean {float(mean):.5f} "
            f"vs tau {float(science.tau):.5f}",
        )

    return VerificationReport(
        max_n=max_n,
        seed=seed,
        results=(estimator, cells, prediction, lik, support, lemma, mc),
    )


def _all_observed(total: int, n_treated: int) -> Iterator[ObservedTable]:
    n_control = total - n_treated
    for n11 in range(n_treated + 1):
        for n01 in range(n_control + 1):
            yield ObservedTable(n11, n_treated - n11, n01, n_control - n01)


def _constant_families(max_n: int) -> Iterator[tuple]:
    yield (1, 0, 0)
    yield (1, 1, 0, 0)
    yield (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5), 1)
    for total in range(2, min(max_n, 6) + 1):
        yield tuple(range(total))
    yield (2, 2, 2, 2)
