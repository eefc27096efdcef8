"""The four end-to-end mechanisms.

* constrained random serial dictatorship (CRSD): families pick in a seeded
  random order; a pick is granted only when an assignment that keeps at least
  ``alpha * z_star`` of the optimal employment objective can still be completed
  around it (checked by a pinned solve).  Strategyproof by construction.
* constrained rank value (CRV): one-shot rank-value maximization with the
  employment floor ``alpha * z_star``.  Weakly better family welfare, not
  strategyproof.
* top trading cycles (TTC) and family-proposing deferred acceptance (DA):
  classical benchmarks; location priorities order families by predicted
  employment probability, descending, ties by family id.
"""

from __future__ import annotations

import enum
import heapq
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import (
    IncompletePreferences,
    InvalidInstance,
    StrictIncompleteUnmatched,
)
from .assignment import max_weight_assignment, solve_assignment_value
from .cmrv import CmrvProblem, SolveLimits, SolveStatus, solve_cmrv
from .model import (
    EPSILON,
    AlphaParam,
    Instance,
    Matching,
    QuotaMode,
    RankValueFunction,
    validate_instance,
)


class IncompleteMode(enum.Enum):
    """What CRSD does with families that exhaust an incomplete list."""

    STRICT = "strict"
    GOV_OPT_FALLBACK = "gov_opt_fallback"


@dataclass(frozen=True)
class MechanismConfig:
    alpha: AlphaParam = AlphaParam(1.0)
    rank_value: Optional[RankValueFunction] = None  # CRV only; None means v(k)=1/k
    seed: int = 0
    incomplete_mode: IncompleteMode = IncompleteMode.GOV_OPT_FALLBACK

    def __post_init__(self):
        if not isinstance(self.alpha, AlphaParam):
            object.__setattr__(self, "alpha", AlphaParam(self.alpha))
        object.__setattr__(self, "seed", int(self.seed))


def _require_exact_valid(inst: Instance) -> None:
    report = validate_instance(inst)
    if not report.ok:
        raise InvalidInstance(report.violations)
    if inst.quota_mode is not QuotaMode.EXACT:
        raise InvalidInstance(("mechanisms require exact quota mode",))


def crsd_order(num_families: int, seed: int) -> tuple[int, ...]:
    """The picking order drawn for a seed (PCG64, one permutation draw)."""
    rng = np.random.default_rng(seed)
    return tuple(int(i) for i in rng.permutation(num_families))


def run_crsd(inst: Instance, cfg: MechanismConfig) -> Matching:
    """Constrained random serial dictatorship with a seeded picking order."""
    order = crsd_order(inst.num_families, cfg.seed)
    return run_crsd_with_order(
        inst, order, cfg.alpha.value, incomplete_mode=cfg.incomplete_mode
    )


def run_crsd_with_order(
    inst: Instance,
    order: Sequence[int],
    alpha: Union[AlphaParam, float],
    incomplete_mode: IncompleteMode = IncompleteMode.GOV_OPT_FALLBACK,
    denial_trace: Optional[list] = None,
) -> Matching:
    """CRSD with an explicit picking order (the deterministic core of CRSD).

    Each family walks its list top-down; location ``j`` is granted when it has
    residual quota and a pinned solve proves an ``alpha``-share completion is
    still possible.  Grants are permanent.  Families that exhaust their list
    stay unmatched until the fallback pass (or raise in strict mode).

    ``denial_trace``, when a list is passed, receives one
    ``(family, location, pins_snapshot, pinned_value)`` entry per denial.
    """
    _require_exact_valid(inst)
    alpha = alpha.value if isinstance(alpha, AlphaParam) else float(alpha)
    if sorted(order) != list(inst.families):
        raise ValueError("order must be a permutation of all families")

    z_star = solve_assignment_value(inst)
    threshold = alpha * z_star - EPSILON

    pins: dict[int, int] = {}
    counts = [0] * inst.num_locations
    for i in order:
        for j in inst.preferences[i]:
            if counts[j] >= inst.quotas[j]:
                continue
            res = max_weight_assignment(
                inst.pi, inst.quotas, True, {**pins, i: j}
            )
            assert res is not None  # exact mode with valid pins always completes
            if res[1] >= threshold:
                pins[i] = j
                counts[j] += 1
                break
            if denial_trace is not None:
                denial_trace.append((i, j, dict(pins), res[1]))

    unmatched = [i for i in inst.families if i not in pins]
    if unmatched:
        if incomplete_mode is IncompleteMode.STRICT:
            raise StrictIncompleteUnmatched(unmatched)
        res = max_weight_assignment(inst.pi, inst.quotas, True, pins)
        assert res is not None
        return Matching(tuple(res[0]))
    return Matching(tuple(pins[i] for i in inst.families))


def run_crv(inst: Instance, cfg: MechanismConfig) -> Matching:
    """Constrained rank value mechanism: maximal rank-value welfare subject to
    an employment floor of ``alpha`` times the optimum."""
    _require_exact_valid(inst)
    z_star = solve_assignment_value(inst)
    v = cfg.rank_value or RankValueFunction.inverse(inst.num_locations)
    prob = CmrvProblem(inst=inst, v=v, gamma=cfg.alpha.value * z_star)
    sol = solve_cmrv(prob, SolveLimits())
    if sol.status is not SolveStatus.OPTIMAL:  # pragma: no cover - floor <= z_star
        raise AssertionError("floor derived from z_star cannot be infeasible")
    return sol.matching


def location_priorities(inst: Instance) -> list[list[int]]:
    """Families ordered by predicted employment at each location (desc, ties by id)."""
    return [
        sorted(inst.families, key=lambda i, j=j: (-float(inst.pi[i, j]), i))
        for j in inst.locations
    ]


def _require_complete(inst: Instance) -> None:
    if not inst.has_complete_preferences:
        raise IncompletePreferences(
            "this mechanism needs every family to rank every location"
        )


def run_ttc(inst: Instance) -> Matching:
    """Capacitated top trading cycles with employment-derived priorities."""
    _require_exact_valid(inst)
    _require_complete(inst)

    priorities = location_priorities(inst)
    residual = list(inst.quotas)
    pref_pos = [0] * inst.num_families
    prio_pos = [0] * inst.num_locations
    assigned: dict[int, int] = {}

    def family_target(i: int) -> int:
        while residual[inst.preferences[i][pref_pos[i]]] == 0:
            pref_pos[i] += 1
        return inst.preferences[i][pref_pos[i]]

    def location_target(j: int) -> int:
        while priorities[j][prio_pos[j]] in assigned:
            prio_pos[j] += 1
        return priorities[j][prio_pos[j]]

    while len(assigned) < inst.num_families:
        start = min(i for i in inst.families if i not in assigned)
        seen: dict[int, int] = {}
        walk: list[tuple[int, int]] = []  # (family, target location)
        i = start
        while i not in seen:
            seen[i] = len(walk)
            j = family_target(i)
            walk.append((i, j))
            i = location_target(j)
        for fam, loc in walk[seen[i]:]:
            assigned[fam] = loc
            residual[loc] -= 1

    return Matching(tuple(assigned[i] for i in inst.families))


def run_da(inst: Instance) -> Matching:
    """Family-proposing deferred acceptance against quota-capped locations."""
    _require_exact_valid(inst)
    _require_complete(inst)

    next_choice = [0] * inst.num_families
    held: list[list[tuple[float, int, int]]] = [[] for _ in inst.locations]
    # held entries are (pi, -family, family); the worst proposer sorts first
    free = deque(inst.families)
    while free:
        i = free.popleft()
        j = inst.preferences[i][next_choice[i]]
        next_choice[i] += 1
        if inst.quotas[j] == 0:
            free.append(i)
            continue
        entry = (float(inst.pi[i, j]), -i, i)
        if len(held[j]) < inst.quotas[j]:
            heapq.heappush(held[j], entry)
        elif entry > held[j][0]:
            _, _, bumped = heapq.heapreplace(held[j], entry)
            free.append(bumped)
        else:
            free.append(i)

    assignment: list[Optional[int]] = [None] * inst.num_families
    for j in inst.locations:
        for _, _, i in held[j]:
            assignment[i] = j
    return Matching(tuple(assignment))


def run_government_optimal(inst: Instance) -> Matching:
    """The employment-optimal benchmark (no preference input)."""
    from .assignment import solve_assignment

    return solve_assignment(inst).matching
