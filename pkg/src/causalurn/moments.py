"""Moment estimators, variance formulas, and the sensitivity sweep.

The difference in observed response rates is unbiased for the average
causal effect. Its exact randomization variance, for a population with
``n01`` harmed units, is

    N/(N-1) * { p1(1-p1)/N1 + p0(1-p0)/N0 - tau(1-tau)/N - 2*n01/N^2 }

which is identified once ``n01`` is fixed. The functions here compute the
plug-in versions of these formulas, normal-approximation intervals, the
feasible range for ``n01``, and a sweep over candidate ``n01`` values.
All estimators return exact rationals; intervals convert to floats at the
very end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from statistics import NormalDist
from typing import Iterable, NamedTuple, Optional

from .tables import InfeasibleError, IntervalEstimate, ObservedTable, ScienceTable

ASSUMPTIONS = ("frechet", "nonneg-correlation", "nonneg-correlation-and-effect")


def normal_quantile(level: float) -> float:
    """Two-sided standard normal quantile for a central interval."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    return NormalDist().inv_cdf((1.0 + level) / 2.0)


def tau_hat(obs: ObservedTable) -> Fraction:
    """Difference in response rates, n11/N1 - n01/N0."""
    return obs.p1_hat - obs.p0_hat


class CellEstimates(NamedTuple):
    n11: Fraction
    n00: Fraction
    n10: Fraction


def moment_cells(obs: ObservedTable, n01: int = 0) -> CellEstimates:
    """Unbiased moment estimates of the science-table cells given ``n01``.

    The estimates are unconstrained: they can be non-integer or fall
    outside [0, N]. That is the documented deficiency of the moment method
    relative to likelihood-based inference, kept on purpose.
    """
    if n01 < 0:
        raise ValueError("n01 must be nonnegative")
    total = obs.total
    from_control = Fraction(total * obs.n01, obs.n_control)
    from_treated = Fraction(total * obs.n10, obs.n_treated)
    return CellEstimates(
        n11=from_control - n01,
        n00=from_treated - n01,
        n10=total + n01 - from_control - from_treated,
    )


def _core_terms(obs: ObservedTable) -> Fraction:
    p1, p0 = obs.p1_hat, obs.p0_hat
    return p1 * (1 - p1) / obs.n_treated + p0 * (1 - p0) / obs.n_control


def improved_variance(obs: ObservedTable) -> Fraction:
    """Plug-in variance with the tau(1-tau)/N correction (no harmed units)."""
    total = obs.total
    t = tau_hat(obs)
    inner = _core_terms(obs) - t * (1 - t) / total
    return Fraction(total, total - 1) * inner


def neyman_variance(obs: ObservedTable) -> Fraction:
    """Baseline variance: the improved formula without the subtracted term."""
    total = obs.total
    return Fraction(total, total - 1) * _core_terms(obs)


def classic_neyman_variance(obs: ObservedTable) -> Fraction:
    """Conventional s1^2/N1 + s0^2/N0 with per-arm N_w - 1 denominators.

    Offered for comparison only; the baseline reported by
    :func:`neyman_variance` differs by finite-population factors.
    """
    if obs.n_treated < 2 or obs.n_control < 2:
        raise InfeasibleError("per-arm sample variances need two units per arm")
    p1, p0 = obs.p1_hat, obs.p0_hat
    return p1 * (1 - p1) / (obs.n_treated - 1) + p0 * (1 - p0) / (obs.n_control - 1)


def sensitivity_variance(obs: ObservedTable, n01: int) -> Fraction:
    """Plug-in variance when ``n01`` units are assumed harmed.

    Strictly decreasing in ``n01`` by 2/((N-1)N) per unit. Raises
    :class:`InfeasibleError` when the plug-in value goes negative, which
    signals an ``n01`` outside the plausible range for this data.
    """
    if n01 < 0:
        raise ValueError("n01 must be nonnegative")
    total = obs.total
    value = improved_variance(obs) - Fraction(2 * n01, (total - 1) * total)
    if value < 0:
        raise InfeasibleError(
            f"plug-in variance is negative at n01={n01}; "
            "the value is implausible for this data"
        )
    return value


def n01_bounds(
    obs: ObservedTable, assumption: str = "nonneg-correlation-and-effect"
) -> tuple[int, int]:
    """Plug-in integer bounds for the number of harmed units.

    Bounds round inward (ceil below, floor above) so every integer in the
    returned range is feasible under the chosen assumption. Raises
    :class:`InfeasibleError` when the data contradict the assumption.
    """
    if assumption not in ASSUMPTIONS:
        raise ValueError(f"unknown assumption {assumption!r}")
    total = obs.total
    p1, p0 = obs.p1_hat, obs.p0_hat
    t = p1 - p0
    if assumption == "frechet":
        lo = max(0, math.ceil(-total * t))
        hi = math.floor(min(total * p0, total * (1 - p1)))
    elif assumption == "nonneg-correlation":
        lo = max(0, math.ceil(-total * t))
        hi = math.floor(total * p0 * (1 - p1))
    else:
        lo = 0
        hi = math.floor(total * p0 * (1 - p1))
    if hi < lo:
        raise InfeasibleError(
            f"data are inconsistent with assumption {assumption!r}: "
            f"bounds [{lo}, {hi}] are empty"
        )
    return lo, hi


def confidence_interval(
    point, variance, level: float = 0.95, method: str = "improved"
) -> IntervalEstimate:
    """Normal-approximation interval point +/- z * sqrt(variance).

    Not clipped to [-1, 1]: out-of-range endpoints are part of the moment
    method's documented behavior.
    """
    if variance < 0:
        raise ValueError("variance must be nonnegative")
    z = normal_quantile(level)
    center = float(point)
    half = z * math.sqrt(variance)
    return IntervalEstimate(
        point=center, lower=center - half, upper=center + half,
        level=level, method=method,
    )


@dataclass(frozen=True)
class SensitivityRow:
    n01: int
    point: float
    feasible: bool
    variance: Optional[float] = None
    interval: Optional[IntervalEstimate] = None
    note: str = ""


@dataclass(frozen=True)
class SensitivityCurve:
    obs: ObservedTable
    level: float
    rows: tuple[SensitivityRow, ...] = field(default_factory=tuple)


def sensitivity_sweep(
    obs: ObservedTable, n01_values: Iterable[int], level: float = 0.95
) -> SensitivityCurve:
    """One row per candidate ``n01``: point, variance, interval, length.

    The point estimate does not change with ``n01``; only the variance
    shrinks. Infeasible values produce a marked row rather than being
    dropped, so a sweep over a full grid stays aligned.
    """
    point = tau_hat(obs)
    rows = []
    for n01 in n01_values:
        try:
            variance = sensitivity_variance(obs, n01)
        except InfeasibleError as exc:
            rows.append(
                SensitivityRow(n01=n01, point=float(point), feasible=False, note=str(exc))
            )
            continue
        method = "improved" if n01 == 0 else "sensitivity"
        interval = confidence_interval(point, variance, level, method=method)
        rows.append(
            SensitivityRow(
                n01=n01, point=float(point), feasible=True,
                variance=float(variance), interval=interval,
            )
        )
    return SensitivityCurve(obs=obs, level=level, rows=tuple(rows))


def population_tau_variance(science: ScienceTable, n_treated: int) -> Fraction:
    """Exact randomization variance of the rate difference, any science table."""
    total = science.total
    if not 1 <= n_treated <= total - 1:
        raise ValueError("n_treated must leave both arms nonempty")
    n_control = total - n_treated
    p1, p0, tau = science.p1, science.p0, science.tau
    inner = (
        p1 * (1 - p1) / n_treated
        + p0 * (1 - p0) / n_control
        - tau * (1 - tau) / total
        - Fraction(2 * science.n01, total * total)
    )
    return Fraction(total, total - 1) * inner


def population_attributable_mse(science: ScienceTable, n_treated: int) -> Fraction:
    """Exact variance of A - N1 * tau_hat; free of the outcome association."""
    total = science.total
    if not 1 <= n_treated <= total - 1:
        raise ValueError("n_treated must leave both arms nonempty")
    n_control = total - n_treated
    p0 = science.p0
    return Fraction(total * total * n_treated, n_control * (total - 1)) * p0 * (1 - p0)
