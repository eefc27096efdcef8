"""Exact solver for rank-value maximization under an employment floor.

The problem: over feasible matchings, maximize the summed rank value
``sum_i v(rank_i(mu(i)))`` subject to ``z(mu) >= gamma``.  Unranked pairs carry
objective weight zero but stay assignable.  The floor constraint makes this
NP-hard (it encodes knapsack, see :func:`knapsack_to_cmrv`), so the solver is a
best-bound branch and bound:

* Bounds come from the Lagrangian relaxation of the floor: for any ``lam >= 0``
  the assignment-polytope optimum of ``w + lam*pi`` minus ``lam*gamma`` is a
  valid upper bound.  The dual is convex piecewise-linear in ``lam`` and is
  minimized over an initial bracket ``[0, lam_max]`` by bisection on the
  subgradient ``z(x) - gamma`` (with an interpolated probe point, capped at 60
  iterations; every probe yields a valid bound, so early exit never costs
  exactness).
* Branching dichotomizes one family's allowed locations by employment level:
  among families whose two bracket solutions sit at different ``pi`` values,
  the one with maximal ``pi`` in the bound solution (ties lexicographic) has
  its options split at the larger bracket level.  One child keeps only that
  family's at-or-above-threshold locations, the other only the rest, so the
  split stays informative even when many near-equivalent assignments tie.
* Nodes are explored best bound first with creation-index tie-breaks, so a
  solve is deterministic given identical inputs.
"""

from __future__ import annotations

import enum
import heapq
import math
import time
from dataclasses import dataclass, field
from typing import IO, Optional

import numpy as np

from .errors import InvalidInstance, InvalidKnapsack, LimitExceeded, MalformedMatching
from .assignment import max_weight_assignment
from .model import (
    EPSILON,
    Instance,
    Matching,
    QuotaMode,
    RankValueFunction,
    validate_instance,
)

#: nodes whose bound cannot beat the incumbent by more than the package-wide
#: objective tolerance are closed; reported optima are exact at that tolerance
_PRUNE_TOL = EPSILON


@dataclass(frozen=True)
class CmrvProblem:
    inst: Instance
    v: RankValueFunction
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        if self.gamma < 0.0:
            raise ValueError("gamma must be nonnegative")
        if len(self.v) != self.inst.num_locations:
            raise ValueError("rank value function must cover every preference position")


@dataclass(frozen=True)
class SolveLimits:
    max_nodes: int = 1_000_000
    max_seconds: Optional[float] = None


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class CmrvSolution:
    matching: Optional[Matching]
    welfare: float
    z: float
    status: SolveStatus


def rank_weight_matrix(inst: Instance, v: RankValueFunction) -> np.ndarray:
    """Per-pair welfare weights: v at the family's rank, 0 for unranked pairs."""
    w = np.zeros((inst.num_families, inst.num_locations))
    for i, prefs in enumerate(inst.preferences):
        for pos, j in enumerate(prefs, start=1):
            w[i, j] = v(pos)
    return w


def _initial_lambda_max(v_w: np.ndarray, pi: np.ndarray) -> float:
    """Bracket end for the dual search: (max v) / (min positive pi gap)."""
    vals = np.unique(np.concatenate([pi.ravel(), [0.0]]))
    gaps = np.diff(vals)
    gaps = gaps[gaps > 0]
    if gaps.size == 0:
        return 1.0
    lam = float(v_w.max()) / float(gaps.min())
    return min(max(lam, 1.0), 1e12)


@dataclass(order=True)
class _Node:
    sort_key: tuple = field(init=False, repr=False)
    bound: float
    index: int
    mask: Optional[np.ndarray] = field(compare=False)  # forbidden pairs
    lam_hint: Optional[float] = field(compare=False, default=None)

    def __post_init__(self):
        # heapq is a min-heap; explore the largest bound first, newest node on
        # ties (diving keeps tightening one subtree instead of sweeping plateaus)
        self.sort_key = (-self.bound, -self.index)


class _Search:
    def __init__(self, prob: CmrvProblem, limits: SolveLimits, node_log: Optional[IO[str]]):
        self.inst = prob.inst
        self.gamma = prob.gamma
        self.limits = limits
        self.node_log = node_log
        self.pi = prob.inst.pi
        self.v_w = rank_weight_matrix(prob.inst, prob.v)
        self.exact = prob.inst.quota_mode is QuotaMode.EXACT
        self.lam_max = _initial_lambda_max(self.v_w, self.pi)
        self.incumbent: Optional[tuple[list, float, float]] = None  # (x, welfare, z)
        self.evaluated = 0
        self.started = time.monotonic()
        if node_log is not None:
            node_log.write("node,bound,incumbent,lambda\n")

    # -- subproblem oracle ----------------------------------------------------

    def _solve(self, lam: float, mask):
        weights = self.v_w if lam == 0.0 else self.v_w + lam * self.pi
        res = max_weight_assignment(weights, self.inst.quotas, self.exact, {}, mask)
        if res is None:
            return None
        x, _ = res
        welfare = float(sum(self.v_w[i, a] for i, a in enumerate(x) if a is not None))
        z = float(sum(self.pi[i, a] for i, a in enumerate(x) if a is not None))
        return x, welfare, z

    def _offer(self, x, welfare, z) -> None:
        if z >= self.gamma - EPSILON:
            if self.incumbent is None or welfare > self.incumbent[1] + _PRUNE_TOL:
                self.incumbent = (list(x), welfare, z)

    @property
    def _inc_welfare(self) -> float:
        return self.incumbent[1] if self.incumbent is not None else -math.inf

    # -- node evaluation --------------------------------------------------------

    def evaluate(self, node: _Node):
        """Returns (bound, children, lam_at_bound); children None = node closed.

        Alternates the dual search with reduced-cost fixing: every fixing round
        shrinks the node's pair support, which can tighten the next dual bound,
        so plateaus of near-equivalent assignments often close without any
        branching at all.
        """
        mask, hint = node.mask, node.lam_hint
        best_bound = node.bound
        while True:
            out = self._dual_search(mask, hint)
            status, bound = out[0], out[1]
            best_bound = min(best_bound, bound)
            if status != "open":
                return best_bound, None, out[2]
            _, _, lam_at, x_bound, x_lo, x_hi = out
            hint = lam_at
            fixed = self._rc_fixings(mask, x_bound, best_bound, lam_at)
            if fixed is mask:
                children = self._split(x_lo, x_hi, x_bound, mask, best_bound, lam_at)
                return best_bound, children, lam_at
            mask = fixed

    def _dual_search(self, mask, lam_hint):
        """One pass of the bracketed dual minimization under a fixed mask.

        Returns ("infeasible", -inf, lam) | ("closed", bound, lam) |
        ("open", bound, lam_at, x_bound, x_lo, x_hi).
        """
        res0 = self._solve(0.0, mask)
        if res0 is None:
            return "infeasible", -math.inf, 0.0
        x0, w0, z0 = res0
        if z0 >= self.gamma - EPSILON:
            self._offer(x0, w0, z0)
            return "closed", w0, 0.0

        bound, lam_at, x_bound = w0, 0.0, x0
        if bound <= self._inc_welfare + _PRUNE_TOL:
            return "closed", bound, lam_at

        lo = (0.0, w0, z0 - self.gamma, x0)  # (lam, D, subgradient, solution)
        hi = None
        if lam_hint is not None and 0.0 < lam_hint < self.lam_max:
            res_h = self._solve(lam_hint, mask)
            assert res_h is not None
            x_h, w_h, z_h = res_h
            d_h = w_h + lam_hint * (z_h - self.gamma)
            g_h = z_h - self.gamma
            if d_h < bound:
                bound, lam_at, x_bound = d_h, lam_hint, x_h
            if g_h >= -EPSILON:
                self._offer(x_h, w_h, z_h)
            if g_h >= 0:
                hi = (lam_hint, d_h, g_h, x_h)
            else:
                lo = (lam_hint, d_h, g_h, x_h)

        if hi is None:
            res_top = self._solve(self.lam_max, mask)
            assert res_top is not None
            x_t, w_t, z_t = res_top
            d_t = w_t + self.lam_max * (z_t - self.gamma)
            g_t = z_t - self.gamma
            if d_t < bound:
                bound, lam_at, x_bound = d_t, self.lam_max, x_t
            if z_t < self.gamma - EPSILON:
                # even the heaviest weighting missed the floor; decide exactly
                res_z = max_weight_assignment(
                    self.pi, self.inst.quotas, self.exact, {}, mask
                )
                if res_z is None:
                    return "infeasible", -math.inf, lam_at
                x_z = res_z[0]
                wz = float(sum(self.v_w[i, a] for i, a in enumerate(x_z) if a is not None))
                zz = float(sum(self.pi[i, a] for i, a in enumerate(x_z) if a is not None))
                if zz < self.gamma - EPSILON:
                    return "infeasible", -math.inf, lam_at
                self._offer(x_z, wz, zz)
                if bound <= self._inc_welfare + _PRUNE_TOL:
                    return "closed", bound, lam_at
                return "open", bound, lam_at, x_bound, lo[3], x_z
            self._offer(x_t, w_t, z_t)
            hi = (self.lam_max, d_t, g_t, x_t)

        for _ in range(60):
            if bound <= self._inc_welfare + _PRUNE_TOL:
                return "closed", bound, lam_at
            (lo_l, d_lo, g_lo, _), (hi_l, d_hi, g_hi, _) = lo, hi
            denom = g_hi - g_lo
            if denom <= 0:
                break
            # crossing of the two supporting lines lower-bounds the dual optimum
            lam_star = (d_lo - d_hi + g_hi * hi_l - g_lo * lo_l) / denom
            crossing = d_lo + g_lo * (lam_star - lo_l)
            if bound - crossing <= _PRUNE_TOL:
                break
            if not lo_l < lam_star < hi_l:
                lam_star = 0.5 * (lo_l + hi_l)
            res_m = self._solve(lam_star, mask)
            assert res_m is not None
            x_m, w_m, z_m = res_m
            d_m = w_m + lam_star * (z_m - self.gamma)
            g_m = z_m - self.gamma
            if d_m < bound:
                bound, lam_at, x_bound = d_m, lam_star, x_m
            if g_m >= -EPSILON:
                self._offer(x_m, w_m, z_m)
            if g_m >= 0:
                hi = (lam_star, d_m, g_m, x_m)
            else:
                lo = (lam_star, d_m, g_m, x_m)

        if bound <= self._inc_welfare + _PRUNE_TOL:
            return "closed", bound, lam_at
        return "open", bound, lam_at, x_bound, lo[3], hi[3]

    def _rc_fixings(self, mask, x_bound, bound: float, lam_at: float):
        """Lagrangian variable fixing: forbid pairs that provably cannot beat
        the incumbent.

        Duals of the bound subproblem are recovered from its optimal assignment
        by Bellman-Ford relaxation of the complementary-slackness difference
        constraints; a pair whose reduced cost eats the bound-to-incumbent gap
        (with a 1e-9 safety margin) cannot appear in any improving solution.
        """
        if not self.exact or self.incumbent is None or not math.isfinite(bound):
            return mask
        n, m = self.pi.shape
        w = self.v_w if lam_at == 0.0 else self.v_w + lam_at * self.pi
        mu = np.asarray(x_bound, dtype=int)
        idx = np.arange(n)
        base = w[idx, mu]
        lengths = w - base[:, None]
        if mask is not None:
            lengths = np.where(mask, -np.inf, lengths)
        v = np.zeros(m)
        for _ in range(m):
            v = np.maximum(v, (v[mu][:, None] + lengths).max(axis=0))
        rc = (base - v[mu])[:, None] + v[None, :] - w
        fix = (bound - rc) < (self._inc_welfare - EPSILON)
        if not fix.any():
            return mask
        return fix if mask is None else (mask | fix)

    def _split(self, x_lo, x_hi, x_bound, mask, bound: float, lam_at: float):
        """Dichotomy on one family's employment level.

        Among families whose two bracket solutions sit at different pi values,
        take the one with maximal pi in the bound solution (ties lexicographic)
        and split its allowed locations at the larger of the two bracket
        levels.  Value-level splits stay informative when many near-equivalent
        assignments tie, where forbidding single pairs would not move bounds.
        """
        pi = self.pi
        cands = [
            i
            for i in range(self.inst.num_families)
            if pi[i, x_lo[i]] != pi[i, x_hi[i]]
        ]
        if not cands:  # pragma: no cover - bracket sides differ in z by construction
            cands = [i for i in range(self.inst.num_families) if x_lo[i] != x_hi[i]]
        i_star = min(cands, key=lambda i: (-float(pi[i, x_bound[i]]), i, x_bound[i]))
        t = max(float(pi[i_star, x_lo[i_star]]), float(pi[i_star, x_hi[i_star]]))

        base = mask if mask is not None else np.zeros(pi.shape, dtype=bool)
        mask_low = base.copy()
        mask_low[i_star, pi[i_star] >= t] = True  # keep only below-threshold pairs
        mask_high = base.copy()
        mask_high[i_star, pi[i_star] < t] = True  # keep only at-or-above pairs
        return (
            _Node(bound, -1, mask_high, lam_at),
            _Node(bound, -1, mask_low, lam_at),
        )

    # -- main loop --------------------------------------------------------------

    def run(self) -> CmrvSolution:
        heap: list[_Node] = []
        heapq.heappush(heap, _Node(math.inf, 0, None))
        next_index = 1

        while heap:
            node = heapq.heappop(heap)
            if node.bound <= self._inc_welfare + _PRUNE_TOL:
                continue
            self.evaluated += 1
            if self.evaluated > self.limits.max_nodes:
                raise LimitExceeded(
                    "node budget exhausted",
                    best_bound=node.bound,
                    incumbent_welfare=self._inc_welfare,
                    nodes=self.evaluated,
                )
            if (
                self.limits.max_seconds is not None
                and time.monotonic() - self.started > self.limits.max_seconds
            ):
                raise LimitExceeded(
                    "time budget exhausted",
                    best_bound=node.bound,
                    incumbent_welfare=self._inc_welfare,
                    nodes=self.evaluated,
                )

            bound, children, lam_at = self.evaluate(node)
            if self.node_log is not None:
                inc = "" if self.incumbent is None else repr(self._inc_welfare)
                self.node_log.write(f"{self.evaluated},{bound!r},{inc},{lam_at!r}\n")
            if children is None or bound <= self._inc_welfare + _PRUNE_TOL:
                continue
            for child in children:
                child.index = next_index
                child.sort_key = (-child.bound, -child.index)
                next_index += 1
                heapq.heappush(heap, child)

        if self.incumbent is None:
            return CmrvSolution(None, math.nan, math.nan, SolveStatus.INFEASIBLE)
        x, welfare, z = self.incumbent
        return CmrvSolution(Matching(tuple(x)), welfare, z, SolveStatus.OPTIMAL)


def solve_cmrv(
    prob: CmrvProblem,
    limits: SolveLimits = SolveLimits(),
    node_log: Optional[IO[str]] = None,
) -> CmrvSolution:
    """Solve the rank-value problem exactly.

    Returns an OPTIMAL solution whose matching satisfies ``z >= gamma - 1e-9``
    and maximizes welfare, or an INFEASIBLE solution when the floor is beyond
    the best achievable employment objective.  ``node_log`` optionally receives
    one CSV line per evaluated node (id, bound, incumbent, lambda).

    Raises :class:`LimitExceeded` when ``limits`` stop the search first.
    """
    report = validate_instance(prob.inst)
    if not report.ok:
        raise InvalidInstance(report.violations)
    return _Search(prob, limits, node_log).run()


# -- knapsack reduction (test surface for NP-hardness) ---------------------------


@dataclass(frozen=True)
class KnapsackInstance:
    """0/1 knapsack with real values/sizes, in the normalized form the
    matching encoding expects: values sorted descending and at most 2 (so
    half-values are valid rank values), sizes summing to 1/(4n), capacity
    strictly below 1/(4n)."""

    values: tuple[float, ...]
    sizes: tuple[float, ...]
    capacity: float

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(w) for w in self.values))
        object.__setattr__(self, "sizes", tuple(float(a) for a in self.sizes))
        object.__setattr__(self, "capacity", float(self.capacity))
        if len(self.values) != len(self.sizes) or not self.values:
            raise InvalidKnapsack("values and sizes must be equal-length and nonempty")
        if any(w < 0 for w in self.values) or any(a < 0 for a in self.sizes):
            raise InvalidKnapsack("values and sizes must be nonnegative")
        if self.capacity < 0:
            raise InvalidKnapsack("capacity must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.values)

    @classmethod
    def normalized(
        cls, values, sizes, capacity
    ) -> tuple["KnapsackInstance", float]:
        """Scale sizes and capacity so sizes sum to 1/(4n); returns the factor."""
        sizes = [float(a) for a in sizes]
        total = sum(sizes)
        if total <= 0:
            raise InvalidKnapsack("sizes must have positive sum to normalize")
        n = len(sizes)
        factor = 1.0 / (4 * n) / total
        inst = cls(
            tuple(values),
            tuple(a * factor for a in sizes),
            float(capacity) * factor,
        )
        return inst, factor


def knapsack_to_cmrv(k: KnapsackInstance) -> CmrvProblem:
    """Encode a normalized knapsack as a rank-value problem on 2n families.

    Families ``0..n-1`` mirror the items, families ``n..2n-1`` are their
    shadows; item ``i`` goes into the knapsack exactly when family ``i`` is
    matched to location ``i``.  Feasibility of the capacity constraint becomes
    the employment floor ``gamma = (2n+1)/(4n) - b``.
    """
    n = k.n
    fourn = 4 * n
    for a, b in zip(k.values, k.values[1:]):
        if a < b:
            raise InvalidKnapsack("values must be sorted descending")
    if any(w > 2.0 for w in k.values):
        raise InvalidKnapsack("values must be at most 2 so half-values are rank values")
    if abs(sum(k.sizes) - 1.0 / fourn) > 1e-12:
        raise InvalidKnapsack("sizes must sum to 1/(4n); use KnapsackInstance.normalized")
    if not k.capacity < 1.0 / fourn:
        raise InvalidKnapsack("capacity must be strictly below 1/(4n)")

    pi = np.zeros((2 * n, 2 * n))
    for i in range(n):
        pi[i, n + i] = k.sizes[i] + 1.0 / fourn
        pi[i, i] = 1.0 / fourn
        pi[n + i, i] = 1.0 / fourn
        pi[n + i, n + i] = 1.0 / fourn

    front = tuple(range(n))
    back = tuple(range(n, 2 * n))
    preferences = tuple(front + back for _ in range(n)) + tuple(
        back + front for _ in range(n)
    )
    inst = Instance(
        quotas=(1,) * (2 * n),
        pi=pi,
        preferences=preferences,
        quota_mode=QuotaMode.EXACT,
        family_labels=tuple(f"f{i + 1}" for i in range(n))
        + tuple(f"fb{i + 1}" for i in range(n)),
        location_labels=tuple(f"l{i + 1}" for i in range(n))
        + tuple(f"lb{i + 1}" for i in range(n)),
    )
    v = RankValueFunction(tuple(w / 2.0 for w in k.values) + (0.0,) * n)
    gamma = (2 * n + 1) / fourn - k.capacity
    return CmrvProblem(inst=inst, v=v, gamma=gamma)


def extract_induced_knapsack(mu: Matching, n: int) -> tuple[int, ...]:
    """Item selection induced by a matching of the encoded instance:
    item ``i`` is packed iff family ``i`` sits at location ``i``."""
    if len(mu.assignment) != 2 * n:
        raise MalformedMatching(
            f"expected a matching over {2 * n} families, got {len(mu.assignment)}"
        )
    if any(a is None for a in mu.assignment):
        raise MalformedMatching("matching must assign every family")
    return tuple(1 if mu.assignment[i] == i else 0 for i in range(n))
