"""Exact max-weight assignment under location quotas, with pinned pairs.

This is the workhorse behind the employment-optimal benchmark, the grant checks
of the serial-dictatorship mechanism, and the bound subproblems of the
rank-value solver.  Locations are expanded into unit slots and the resulting
rectangular problem is solved exactly with scipy's Hungarian-style kernel.

Pinned pairs are contracted out of the problem (family removed, quota reduced,
weight moved to a constant offset) rather than encoded as big weights, so the
solve stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Iterable, Mapping, Optional, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InfeasibleAssignment, InfeasiblePins, InvalidInstance
from .model import (
    EPSILON,
    Instance,
    Matching,
    QuotaMode,
    government_objective,
    validate_instance,
)


@dataclass(frozen=True)
class PinnedSet:
    """Family-location pairs that a solve must keep assigned."""

    pins: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        object.__setattr__(
            self, "pins", frozenset((int(i), int(j)) for i, j in self.pins)
        )

    @classmethod
    def of(cls, pairs: Iterable[tuple[int, int]]) -> "PinnedSet":
        return cls(frozenset(pairs))

    def as_dict(self) -> dict[int, int]:
        """Family -> location map; duplicate families are rejected."""
        out: dict[int, int] = {}
        for i, j in sorted(self.pins):
            if i in out:
                raise InfeasiblePins(f"family {i} pinned to both {out[i]} and {j}")
            out[i] = j
        return out

    def __len__(self) -> int:
        return len(self.pins)


@dataclass(frozen=True)
class AssignSolution:
    matching: Matching
    objective: float


PinsLike = Union[PinnedSet, Iterable[tuple[int, int]], None]


def _pin_map(pins: PinsLike) -> dict[int, int]:
    if pins is None:
        return {}
    if not isinstance(pins, PinnedSet):
        pins = PinnedSet.of(pins)
    return pins.as_dict()


def _check_pins(inst: Instance, pin_map: Mapping[int, int]) -> None:
    counts = [0] * inst.num_locations
    for i, j in pin_map.items():
        if not 0 <= i < inst.num_families:
            raise InfeasiblePins(f"pinned family {i} does not exist")
        if not 0 <= j < inst.num_locations:
            raise InfeasiblePins(f"pinned location {j} does not exist")
        counts[j] += 1
    for j, (c, q) in enumerate(zip(counts, inst.quotas)):
        if c > q:
            raise InfeasiblePins(f"{c} pins at location {j} exceed quota {q}")


def max_weight_assignment(
    weights: np.ndarray,
    quotas: tuple[int, ...],
    exact: bool,
    pins: Mapping[int, int],
    forbidden: Union[AbstractSet[tuple[int, int]], np.ndarray, None] = None,
) -> Optional[tuple[list[Optional[int]], float]]:
    """Maximize sum of ``weights[i, mu(i)]`` over full assignments.

    Every family is assigned; location ``j`` hosts exactly ``quotas[j]``
    families when ``exact`` else at most ``quotas[j]``.  Pins fix pairs.
    ``forbidden`` excludes pairs, given either as a set of (family, location)
    pairs or as a boolean mask of shape ``weights.shape``.  Returns
    ``(assignment, value)`` or ``None`` when no assignment satisfies the
    constraints.  Weights may be arbitrary reals; exactness does not rely on
    them being probabilities.
    """
    num_families, num_locations = weights.shape
    mask: Optional[np.ndarray]
    if forbidden is None:
        mask = None
    elif isinstance(forbidden, np.ndarray):
        mask = forbidden if forbidden.any() else None
    elif forbidden:
        mask = np.zeros((num_families, num_locations), dtype=bool)
        for i, j in forbidden:
            mask[i, j] = True
    else:
        mask = None

    counts = [0] * num_locations
    for i, j in pins.items():
        if mask is not None and mask[i, j]:
            return None
        counts[j] += 1
        if counts[j] > quotas[j]:
            return None

    free = [i for i in range(num_families) if i not in pins]
    residual = [q - c for q, c in zip(quotas, counts)]
    offset = float(sum(weights[i, j] for i, j in pins.items()))

    if exact and sum(residual) != len(free):
        return None
    if not exact and sum(residual) < len(free):
        return None

    assignment: list[Optional[int]] = [None] * num_families
    for i, j in pins.items():
        assignment[i] = j
    if not free:
        return assignment, offset

    slot_loc = np.repeat(np.arange(num_locations), residual)
    cost = -weights[np.ix_(free, slot_loc)]
    if mask is not None:
        cost[mask[np.ix_(free, slot_loc)]] = np.inf
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError:
        return None

    total = offset
    for r, s in zip(rows, cols):
        j = int(slot_loc[s])
        assignment[free[r]] = j
        total += float(weights[free[r], j])
    return assignment, total


def _solve_instance(
    inst: Instance,
    pin_map: Mapping[int, int],
    forbidden: AbstractSet[tuple[int, int]] = frozenset(),
) -> Optional[tuple[list[Optional[int]], float]]:
    return max_weight_assignment(
        inst.pi,
        inst.quotas,
        inst.quota_mode is QuotaMode.EXACT,
        pin_map,
        forbidden,
    )


def _validated(inst: Instance) -> None:
    report = validate_instance(inst)
    if not report.ok:
        raise InvalidInstance(report.violations)


def solve_assignment(inst: Instance, pins: PinsLike = None) -> AssignSolution:
    """Employment-optimal feasible matching respecting the pinned pairs.

    Among co-optimal matchings the lexicographically smallest assignment
    vector (by family id, locations ascending) is returned, which makes
    outputs reproducible regardless of how the underlying kernel breaks ties.
    """
    _validated(inst)
    pin_map = _pin_map(pins)
    _check_pins(inst, pin_map)
    base = _solve_instance(inst, pin_map)
    if base is None:
        raise InfeasibleAssignment("no feasible assignment completes the pins")
    current, best = base

    fixed = dict(pin_map)
    for i in inst.families:
        if i in fixed:
            continue
        for j in inst.locations:
            if j == current[i]:
                fixed[i] = j
                break
            trial = _solve_instance(inst, {**fixed, i: j})
            if trial is not None and trial[1] >= best - EPSILON:
                current, _ = trial
                fixed[i] = j
                break

    matching = Matching(tuple(current))
    return AssignSolution(matching=matching, objective=government_objective(inst, matching))


def solve_assignment_value(inst: Instance, pins: PinsLike = None) -> float:
    """Optimal objective of :func:`solve_assignment` without building the matching."""
    _validated(inst)
    pin_map = _pin_map(pins)
    _check_pins(inst, pin_map)
    res = _solve_instance(inst, pin_map)
    if res is None:
        raise InfeasibleAssignment("no feasible assignment completes the pins")
    return res[1]


def describe_reduced_problem(inst: Instance, pins: PinsLike = None) -> str:
    """Plain-text dump of the contracted problem a solve would hand the kernel.

    Format: a ``mode`` line, a ``pinned`` line (count and weight offset), one
    ``slots`` line listing ``location x residual-quota`` pairs, then one line
    per free family with its weight row, space-separated with 6 decimals.
    """
    pin_map = _pin_map(pins)
    _check_pins(inst, pin_map)
    counts = [0] * inst.num_locations
    for j in pin_map.values():
        counts[j] += 1
    residual = [q - c for q, c in zip(inst.quotas, counts)]
    offset = sum(float(inst.pi[i, j]) for i, j in pin_map.items())
    lines = [
        f"mode: {inst.quota_mode.value}",
        f"pinned: {len(pin_map)} pairs, weight offset {offset:.6f}",
        "slots: " + " ".join(f"{j}x{r}" for j, r in enumerate(residual) if r > 0),
    ]
    for i in inst.families:
        if i in pin_map:
            continue
        row = " ".join(f"{inst.pi[i, j]:.6f}" for j in inst.locations)
        lines.append(f"family {i}: {row}")
    return "\n".join(lines) + "\n"
