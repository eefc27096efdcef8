"""Welfare and employment metrics for a single matching.

``rho`` averages preference positions over the families matched inside their
ranked list; with complete preferences that is every family.  When no family is
matched inside its list ``rho`` is reported as ``None`` rather than a fake 0.
``tau`` counts families placed outside their ranked list (0 when complete).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .model import EPSILON, Instance, Matching, government_objective, rank_of, require_feasible


@dataclass(frozen=True)
class MetricsReport:
    z: float
    rho: Optional[float]
    delta: tuple[int, ...]  # delta[k-1]: families at exactly their k-th choice
    cumulative: tuple[int, ...]  # cumulative[k-1]: at their k-th or better choice
    tau: int


def compute_metrics(inst: Instance, mu: Matching) -> MetricsReport:
    """All metrics for a feasible matching."""
    require_feasible(inst, mu)
    num_positions = inst.num_locations
    delta = [0] * num_positions
    ranks: list[int] = []
    for i, a in enumerate(mu.assignment):
        if a is None:
            continue
        r = rank_of(inst, i, a)
        if r is not None:
            delta[r - 1] += 1
            ranks.append(r)

    cumulative = []
    running = 0
    for d in delta:
        running += d
        cumulative.append(running)

    return MetricsReport(
        z=government_objective(inst, mu),
        rho=sum(ranks) / len(ranks) if ranks else None,
        delta=tuple(delta),
        cumulative=tuple(cumulative),
        tau=inst.num_families - len(ranks),
    )


# -- CSV row schema ----------------------------------------------------------------
#
# Column order is part of the tool's contract:
#   mechanism, alpha, seed, replication, z, z_star, z_ratio, rho, tau,
#   Delta_1, ..., Delta_<num locations>
# ``rho`` is the string "nan" when undefined.  ``z_ratio`` is z / z_star, or
# 1.0 when z_star is 0 (the guarantee is vacuous there).


def csv_header(num_locations: int) -> list[str]:
    return [
        "mechanism",
        "alpha",
        "seed",
        "replication",
        "z",
        "z_star",
        "z_ratio",
        "rho",
        "tau",
    ] + [f"Delta_{k}" for k in range(1, num_locations + 1)]


def z_ratio(z: float, z_star: float) -> float:
    return z / z_star if z_star > EPSILON else 1.0


def metrics_csv_row(
    mechanism: str,
    alpha: float,
    seed: int,
    replication: int,
    report: MetricsReport,
    z_star: float,
) -> list[str]:
    rho = math.nan if report.rho is None else report.rho
    cells: Sequence = [
        mechanism,
        float(alpha),
        int(seed),
        int(replication),
        report.z,
        z_star,
        z_ratio(report.z, z_star),
        rho,
        report.tau,
        *report.cumulative,
    ]
    return [c if isinstance(c, str) else repr(c) if isinstance(c, float) else str(c) for c in cells]
