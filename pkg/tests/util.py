"""Shared builders for randomized small test instances."""

from __future__ import annotations

import numpy as np

from alphamatch import Instance, QuotaMode


def random_instance(
    rng: np.random.Generator,
    num_families: int,
    num_locations: int,
    complete: bool = True,
    quota_mode: QuotaMode = QuotaMode.EXACT,
) -> Instance:
    """A valid random instance with uniform pi and random strict preferences."""
    quotas = rng.multinomial(num_families, np.ones(num_locations) / num_locations)
    if quota_mode is QuotaMode.UPPER_BOUND:
        quotas = quotas + rng.integers(0, 2, size=num_locations)
    pi = rng.uniform(size=(num_families, num_locations))
    prefs = []
    for _ in range(num_families):
        order = [int(j) for j in rng.permutation(num_locations)]
        if not complete:
            order = order[: int(rng.integers(1, num_locations + 1))]
        prefs.append(tuple(order))
    return Instance(
        quotas=tuple(int(q) for q in quotas),
        pi=pi,
        preferences=tuple(prefs),
        quota_mode=quota_mode,
    )


def rank_weights(inst: Instance, v) -> list[list[float]]:
    """Plain-python welfare weight table for the oracles (0 when unranked)."""
    table = [[0.0] * inst.num_locations for _ in inst.families]
    for i, prefs in enumerate(inst.preferences):
        for pos, j in enumerate(prefs, start=1):
            table[i][j] = v(pos)
    return table
