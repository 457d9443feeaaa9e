"""DoS schedules under a duty-cycle budget and actuation-attack signals."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .expr import Expression


class AttackError(ValueError):
    pass


class InfeasibleScheduleError(AttackError):
    pass


@dataclass(frozen=True)
class DoSSchedule:
    """Sorted, disjoint half-open intervals ``[T_on, T_off)`` within ``[0, horizon]``."""

    intervals: tuple = ()
    horizon: int = 0

    def __post_init__(self):
        ivs = tuple((int(a), int(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        if self.horizon < 0:
            raise AttackError("horizon must be non-negative")
        prev_end = -1
        for on, off in ivs:
            if not on < off:
                raise AttackError(f"interval [{on}, {off}) is empty or reversed")
            if on < 0 or off > self.horizon:
                raise AttackError(f"interval [{on}, {off}) leaves the horizon {self.horizon}")
            if on < prev_end:
                raise AttackError("intervals must be sorted and disjoint")
            prev_end = off

    @property
    def attacked_steps(self) -> int:
        return sum(off - on for on, off in self.intervals)

    @property
    def last_off(self):
        return self.intervals[-1][1] if self.intervals else None

    def flags(self) -> np.ndarray:
        """psi(k) for k = 0..horizon."""
        psi = np.ones(self.horizon + 1, dtype=int)
        for on, off in self.intervals:
            psi[on:off] = 0
        return psi


@dataclass(frozen=True)
class DoSBudget:
    M: float
    beta: float

    def __post_init__(self):
        if not self.M >= 0:
            raise AttackError(f"M must be non-negative, got {self.M}")
        if not 0 < self.beta < 1:
            raise AttackError(f"beta must lie in (0, 1), got {self.beta}")


def dos_flag(schedule: DoSSchedule, k: int) -> int:
    if not 0 <= k <= schedule.horizon:
        raise AttackError(f"step {k} outside horizon [0, {schedule.horizon}]")
    for on, off in schedule.intervals:
        if on <= k < off:
            return 0
        if on > k:
            break
    return 1


def validate_budget(schedule: DoSSchedule, budget: DoSBudget) -> bool:
    """True iff the attacked count in ``[0, k]`` is at most ``M + beta*k`` for every k."""
    attacked = np.cumsum(1 - schedule.flags())
    k = np.arange(schedule.horizon + 1)
    return bool(np.all(attacked <= budget.M + budget.beta * k))


def _max_burst(start, used, budget, limit):
    """Longest burst starting at ``start`` that keeps every prefix within budget."""
    length = 0
    while length < limit:
        t = start + length
        if used + length + 1 > budget.M + budget.beta * t:
            break
        length += 1
    return length


def generate_schedule(budget: DoSBudget, horizon: int, rng_seed: int, *,
                      mean_burst: float = 5.0, mean_gap: float = 10.0,
                      window_end: int | None = None,
                      demand: int | None = None) -> DoSSchedule:
    """Random DoS schedule that satisfies ``budget`` at every prefix.

    Gaps and burst lengths are drawn from geometric distributions with the
    given means; each burst is truncated to the longest length the budget
    allows at its start. Attack onsets are confined to ``[0, window_end)``
    (default: whole horizon) to concentrate attacks early. If ``demand`` is
    given, placement continues until that many attacked steps exist, and the
    request is rejected when the budget cannot supply it.
    """
    window_end = horizon if window_end is None else min(window_end, horizon)
    if demand is not None:
        capacity = math.floor(budget.M + budget.beta * max(window_end - 1, 0))
        if demand > capacity:
            raise InfeasibleScheduleError(
                f"demanded {demand} attacked steps but the budget allows at most {capacity} "
                f"before step {window_end}")
    rng = np.random.default_rng(rng_seed)
    p_gap = 1.0 / (1.0 + mean_gap)
    p_burst = 1.0 / mean_burst
    intervals = []
    used = 0
    t = 0
    while t < window_end:
        if demand is not None and used >= demand:
            break
        t += int(rng.geometric(p_gap)) - 1
        if t >= window_end:
            break
        wanted = int(rng.geometric(p_burst))
        if demand is not None:
            wanted = min(wanted, demand - used)
        length = _max_burst(t, used, budget, min(wanted, horizon - t))
        if length == 0:
            t += 1
            continue
        intervals.append((t, t + length))
        used += length
        t += length + 1
    if demand is not None and used < demand:
        raise InfeasibleScheduleError(
            f"could only place {used} of {demand} attacked steps before step {window_end}")
    return DoSSchedule(tuple(intervals), horizon)


@dataclass(frozen=True)
class AASignal:
    """Actuation attack chi(k) with per-step variation bound ``variation_bound``."""

    expression: Expression
    variation_bound: float = field(default=math.inf)

    def __post_init__(self):
        expr = self.expression
        if not isinstance(expr, Expression):
            expr = Expression(expr)
        object.__setattr__(self, "expression", expr)
        if not self.variation_bound > 0:
            raise AttackError("variation bound must be positive")


def aa_value(signal: AASignal, k: int) -> float:
    return signal.expression(0.0, 0.0, k)


def validate_variation(signal: AASignal, horizon: int) -> bool:
    values = np.array([aa_value(signal, k) for k in range(horizon + 1)])
    if values[0] != 0:
        return False
    return bool(np.all(np.abs(np.diff(values)) < signal.variation_bound))
