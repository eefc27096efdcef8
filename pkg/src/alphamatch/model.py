"""Core domain types: instances, matchings, rank value functions.

Families and locations are dense 0-based integer ids throughout the package;
string labels only exist at the file-format boundary (see :mod:`alphamatch.io`).
All types are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import InfeasibleMatching

#: absolute tolerance for every objective comparison in the package;
#: objectives are sums of at most a few hundred values in [0, 1], so an
#: absolute tolerance is both safe and simple.
EPSILON = 1e-9


class QuotaMode(enum.Enum):
    """How location quotas constrain a feasible matching."""

    EXACT = "exact"
    UPPER_BOUND = "upper_bound"

    @classmethod
    def from_string(cls, s: str) -> "QuotaMode":
        for mode in cls:
            if mode.value == s:
                return mode
        raise ValueError(f"unknown quota mode {s!r}")


@dataclass(frozen=True, eq=False)
class Instance:
    """A matching market: quotas, predicted employment probabilities, preferences.

    ``pi[i, j]`` is the predicted probability that family ``i`` finds employment
    at location ``j``.  ``preferences[i]`` is family ``i``'s ranked list of
    location ids, best first; it may be shorter than the number of locations
    (incomplete preferences).  Construction only checks structure; value-level
    invariants are reported by :func:`validate_instance`.
    """

    quotas: tuple[int, ...]
    pi: np.ndarray
    preferences: tuple[tuple[int, ...], ...]
    quota_mode: QuotaMode = QuotaMode.EXACT
    family_labels: Optional[tuple[str, ...]] = None
    location_labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        pi = np.array(self.pi, dtype=float)
        if pi.ndim != 2:
            raise ValueError("pi must be a 2-d array (families x locations)")
        pi.flags.writeable = False
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "quotas", tuple(int(q) for q in self.quotas))
        object.__setattr__(
            self, "preferences", tuple(tuple(int(j) for j in p) for p in self.preferences)
        )
        if len(self.quotas) != pi.shape[1]:
            raise ValueError("quotas length must match pi columns")
        if len(self.preferences) != pi.shape[0]:
            raise ValueError("preferences length must match pi rows")
        if self.family_labels is not None:
            object.__setattr__(self, "family_labels", tuple(self.family_labels))
            if len(self.family_labels) != pi.shape[0]:
                raise ValueError("family_labels length must match pi rows")
        if self.location_labels is not None:
            object.__setattr__(self, "location_labels", tuple(self.location_labels))
            if len(self.location_labels) != pi.shape[1]:
                raise ValueError("location_labels length must match pi columns")

    @property
    def num_families(self) -> int:
        return self.pi.shape[0]

    @property
    def num_locations(self) -> int:
        return self.pi.shape[1]

    @property
    def families(self) -> range:
        return range(self.num_families)

    @property
    def locations(self) -> range:
        return range(self.num_locations)

    @property
    def has_complete_preferences(self) -> bool:
        return all(len(p) == self.num_locations for p in self.preferences)

    def family_label(self, i: int) -> str:
        return self.family_labels[i] if self.family_labels else str(i)

    def location_label(self, j: int) -> str:
        return self.location_labels[j] if self.location_labels else f"L{j}"


@dataclass(frozen=True)
class Matching:
    """A (possibly partial) assignment of families to locations.

    ``assignment[i]`` is family ``i``'s location id, or ``None`` when family
    ``i`` is unassigned.
    """

    assignment: tuple[Optional[int], ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "assignment",
            tuple(None if a is None else int(a) for a in self.assignment),
        )

    def __len__(self) -> int:
        return len(self.assignment)

    def __getitem__(self, family: int) -> Optional[int]:
        return self.assignment[family]

    def assigned_families(self) -> Iterator[int]:
        """Families with a location (the set F(mu))."""
        return (i for i, a in enumerate(self.assignment) if a is not None)

    def families_at(self, location: int) -> list[int]:
        return [i for i, a in enumerate(self.assignment) if a == location]

    def location_counts(self, num_locations: int) -> list[int]:
        counts = [0] * num_locations
        for a in self.assignment:
            if a is not None:
                counts[a] += 1
        return counts


@dataclass(frozen=True)
class RankValueFunction:
    """Monotone decreasing map from 1-based preference positions to [0, 1]."""

    values: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        for v in values:
            if not 0.0 <= v <= 1.0:
                raise ValueError("rank values must lie in [0, 1]")
        for a, b in zip(values, values[1:]):
            if a < b:
                raise ValueError("rank values must be monotonically decreasing")

    @classmethod
    def inverse(cls, num_positions: int) -> "RankValueFunction":
        """The default v(k) = 1/k."""
        return cls(tuple(1.0 / k for k in range(1, num_positions + 1)))

    def __call__(self, position: int) -> float:
        """Value of the 1-based preference position."""
        return self.values[position - 1]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class AlphaParam:
    """Employment-guarantee parameter: the matching must reach alpha * z_star."""

    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")

    @property
    def value(self) -> float:
        return self.alpha


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_instance(inst: Instance) -> ValidationReport:
    """Report every violated instance invariant (empty report = valid)."""
    violations: list[str] = []
    if any(q < 0 for q in inst.quotas):
        violations.append("negative quota")
    if inst.quota_mode is QuotaMode.EXACT and sum(inst.quotas) != inst.num_families:
        violations.append(
            f"quota sum mismatch: sum(q)={sum(inst.quotas)} != |F|={inst.num_families}"
        )
    if inst.num_families and (inst.pi.min() < 0.0 or inst.pi.max() > 1.0):
        violations.append("pi out of range [0, 1]")
    for i, prefs in enumerate(inst.preferences):
        if len(set(prefs)) != len(prefs):
            violations.append(f"duplicate location in preference list of family {i}")
        if any(j < 0 or j >= inst.num_locations for j in prefs):
            violations.append(f"invalid location id in preference list of family {i}")
    return ValidationReport(tuple(violations))


def government_objective(inst: Instance, mu: Matching) -> float:
    """z(mu): summed employment probability over assigned families."""
    total = 0.0
    for i, a in enumerate(mu.assignment):
        if a is not None:
            total += float(inst.pi[i, a])
    return total


def rank_of(inst: Instance, family: int, location: int) -> Optional[int]:
    """1-based position of ``location`` in the family's list; None if unranked."""
    prefs = inst.preferences[family]
    for pos, j in enumerate(prefs, start=1):
        if j == location:
            return pos
    return None


def feasibility_violations(inst: Instance, mu: Matching) -> list[str]:
    """Why ``mu`` is not feasible for ``inst`` (empty list = feasible)."""
    problems: list[str] = []
    if len(mu.assignment) != inst.num_families:
        return [f"matching covers {len(mu.assignment)} families, instance has {inst.num_families}"]
    unassigned = [i for i, a in enumerate(mu.assignment) if a is None]
    if unassigned:
        problems.append(f"unassigned families: {unassigned}")
    for i, a in enumerate(mu.assignment):
        if a is not None and not 0 <= a < inst.num_locations:
            problems.append(f"family {i} assigned to unknown location {a}")
            return problems
    counts = mu.location_counts(inst.num_locations)
    for j, (c, q) in enumerate(zip(counts, inst.quotas)):
        if inst.quota_mode is QuotaMode.EXACT:
            if c != q:
                problems.append(f"location {j} hosts {c} families, quota is {q}")
        elif c > q:
            problems.append(f"location {j} hosts {c} families, upper bound is {q}")
    return problems


def is_feasible(inst: Instance, mu: Matching) -> bool:
    return not feasibility_violations(inst, mu)


def require_feasible(inst: Instance, mu: Matching) -> None:
    problems = feasibility_violations(inst, mu)
    if problems:
        raise InfeasibleMatching("; ".join(problems))
