"""Synthetic instance generator: typed families and locations, uniform draws.

An instance has four family types and four location types.  Employment
probabilities and preference utilities are drawn uniformly on [0, omega] with
per-type-pair upper bounds; preference orders sort locations by utility.
Quotas follow 4:2:2:1 weights across location types.  Optionally each list is
truncated after a Gamma-distributed cut position (incomplete preferences).

All randomness comes from one numpy PCG64 stream (``default_rng(seed)``) with a
fixed draw order: employment probabilities row-major, then utilities row-major,
then one cut position per family.  Same seed, same instance, byte for byte.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import Instance, QuotaMode


class Regime(enum.Enum):
    """Sign of the typical correlation between employment odds and utilities."""

    POSITIVE = "positive"
    NEGATIVE = "negative"

    @classmethod
    def from_string(cls, s: str) -> "Regime":
        for regime in cls:
            if regime.value == s:
                return regime
        raise ValueError(f"unknown regime {s!r}")


#: upper bounds for employment-probability draws, family type x location type
POSITIVE_OMEGA_PI = (
    (0.6, 0.5, 0.5, 0.3),
    (0.3, 0.4, 0.2, 0.1),
    (0.3, 0.2, 0.4, 0.1),
    (0.1, 0.1, 0.1, 0.1),
)
NEGATIVE_OMEGA_PI = (
    (0.3, 0.5, 0.5, 0.6),
    (0.2, 0.1, 0.3, 0.4),
    (0.2, 0.3, 0.1, 0.4),
    (0.2, 0.2, 0.2, 0.2),
)
#: upper bounds for utility draws; identical in both regimes
OMEGA_U = (
    (1.0, 0.6, 0.6, 0.3),
    (0.8, 1.0, 0.6, 0.3),
    (0.8, 0.6, 1.0, 0.3),
    (1.0, 0.6, 0.6, 0.3),
)

DEFAULT_FAMILY_TYPE_COUNTS = (15, 25, 20, 40)
DEFAULT_LOCATION_TYPE_COUNTS = (1, 9, 6, 10)
QUOTA_WEIGHTS = (4.0, 2.0, 2.0, 1.0)


@dataclass(frozen=True)
class TruncationSpec:
    """Cut positions are Gamma(shape, scale) draws, rounded and clamped to
    [1, num_locations]; the default has mean 3."""

    gamma_shape: float = 2.0
    gamma_scale: float = 1.5


@dataclass(frozen=True)
class GeneratorSpec:
    regime: Regime = Regime.POSITIVE
    seed: int = 0
    family_type_counts: tuple[int, ...] = DEFAULT_FAMILY_TYPE_COUNTS
    location_type_counts: tuple[int, ...] = DEFAULT_LOCATION_TYPE_COUNTS
    omega_pi: Optional[tuple[tuple[float, ...], ...]] = None
    omega_u: Optional[tuple[tuple[float, ...], ...]] = None
    truncation: Optional[TruncationSpec] = None
    quota_mode: QuotaMode = QuotaMode.EXACT

    def __post_init__(self):
        if self.omega_pi is None:
            table = (
                POSITIVE_OMEGA_PI if self.regime is Regime.POSITIVE else NEGATIVE_OMEGA_PI
            )
            object.__setattr__(self, "omega_pi", table)
        if self.omega_u is None:
            object.__setattr__(self, "omega_u", OMEGA_U)
        if min(self.family_type_counts, default=0) < 0 or sum(self.family_type_counts) == 0:
            raise ValueError("family type counts must be nonnegative and sum > 0")
        if min(self.location_type_counts, default=0) < 0 or sum(self.location_type_counts) == 0:
            raise ValueError("location type counts must be nonnegative and sum > 0")
        for table in (self.omega_pi, self.omega_u):
            if len(table) != len(self.family_type_counts) or any(
                len(row) != len(self.location_type_counts) for row in table
            ):
                raise ValueError("omega tables must be family-types x location-types")

    @property
    def num_families(self) -> int:
        return sum(self.family_type_counts)

    @property
    def num_locations(self) -> int:
        return sum(self.location_type_counts)


def allocate_quotas(
    location_type_counts: Sequence[int],
    weights: Sequence[float] = QUOTA_WEIGHTS,
    total: int = 100,
) -> tuple[int, ...]:
    """Split ``total`` family seats across locations by type weight.

    Each location's real share is ``weight * total / sum-of-weights``; shares
    are integerized by the largest-remainder method with ties broken by
    ascending location id, so the result sums to ``total`` exactly.
    """
    if total < 0:
        raise ValueError("total must be nonnegative")
    loc_weights = [
        float(weights[t]) for t, c in enumerate(location_type_counts) for _ in range(c)
    ]
    weight_sum = sum(loc_weights)
    shares = [w * total / weight_sum for w in loc_weights]
    quotas = [math.floor(s) for s in shares]
    leftover = total - sum(quotas)
    by_remainder = sorted(range(len(quotas)), key=lambda j: (quotas[j] - shares[j], j))
    for j in by_remainder[:leftover]:
        quotas[j] += 1
    return tuple(quotas)


def generate_instance(spec: GeneratorSpec) -> Instance:
    """Draw one instance; fully determined by ``spec`` (including its seed)."""
    num_families = spec.num_families
    num_locations = spec.num_locations
    family_type = np.repeat(np.arange(len(spec.family_type_counts)), spec.family_type_counts)
    location_type = np.repeat(
        np.arange(len(spec.location_type_counts)), spec.location_type_counts
    )
    omega_pi = np.asarray(spec.omega_pi)[np.ix_(family_type, location_type)]
    omega_u = np.asarray(spec.omega_u)[np.ix_(family_type, location_type)]

    rng = np.random.default_rng(spec.seed)
    pi = rng.uniform(size=(num_families, num_locations)) * omega_pi
    u = rng.uniform(size=(num_families, num_locations)) * omega_u

    # descending utility; numpy's stable sort keeps ascending ids on ties
    orders = [tuple(int(j) for j in np.argsort(-u[i], kind="stable")) for i in range(num_families)]

    if spec.truncation is not None:
        cuts_raw = rng.gamma(
            spec.truncation.gamma_shape, spec.truncation.gamma_scale, size=num_families
        )
        cuts = np.clip(np.rint(cuts_raw), 1, num_locations).astype(int)
        orders = [order[: cuts[i]] for i, order in enumerate(orders)]

    label_width = len(str(num_locations - 1))
    return Instance(
        quotas=allocate_quotas(spec.location_type_counts, QUOTA_WEIGHTS, num_families),
        pi=pi,
        preferences=tuple(orders),
        quota_mode=spec.quota_mode,
        location_labels=tuple(f"L{j:0{label_width}d}" for j in range(num_locations)),
    )
