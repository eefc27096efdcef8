"""Replicated mechanism sweeps over the trade-off parameter grid.

Replication ``r`` uses seed ``base_seed + r`` for both the generated instance
and the serial-dictatorship picking order.  Every (mechanism, alpha,
replication) cell yields one row; mechanisms that ignore alpha (ttc, da,
gov-opt) are computed once per replication and their row is repeated across the
grid so downstream plots see a uniform table.  Per-run failures are logged and
skipped, the sweep continues.
"""

from __future__ import annotations

import csv
import logging
import math
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import AlphamatchError, MalformedCsv
from .assignment import solve_assignment, solve_assignment_value
from .generator import GeneratorSpec, Regime, TruncationSpec, generate_instance
from .mechanisms import MechanismConfig, run_crsd, run_crv, run_da, run_ttc
from .metrics import MetricsReport, compute_metrics, csv_header, metrics_csv_row, z_ratio
from .model import Instance, Matching, RankValueFunction

log = logging.getLogger(__name__)

MECHANISMS = ("crsd", "crv", "ttc", "da", "gov-opt")
ALPHA_FREE = frozenset({"ttc", "da", "gov-opt"})
DEFAULT_ALPHAS = (0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


@dataclass(frozen=True)
class SweepSpec:
    mechanisms: tuple[str, ...] = MECHANISMS
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    replications: int = 20
    base_seed: int = 0
    regime: Regime = Regime.POSITIVE
    truncation: bool = False
    rank_value: Optional[RankValueFunction] = None

    def __post_init__(self):
        object.__setattr__(self, "mechanisms", tuple(self.mechanisms))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        unknown = [m for m in self.mechanisms if m not in MECHANISMS]
        if unknown:
            raise ValueError(f"unknown mechanisms: {unknown}")
        if any(not 0.0 <= a <= 1.0 for a in self.alphas) or not self.alphas:
            raise ValueError("alphas must be a nonempty list within [0, 1]")
        if self.replications <= 0:
            raise ValueError("replications must be positive")


@dataclass(frozen=True)
class SweepRow:
    mechanism: str
    alpha: float
    seed: int
    replication: int
    z: float
    z_star: float
    z_ratio: float
    rho: Optional[float]
    tau: int
    cumulative: tuple[int, ...]

    def csv_cells(self) -> list[str]:
        report = MetricsReport(
            z=self.z, rho=self.rho, delta=(), cumulative=self.cumulative, tau=self.tau
        )
        return metrics_csv_row(
            self.mechanism, self.alpha, self.seed, self.replication, report, self.z_star
        )


@dataclass
class SweepResult:
    spec: SweepSpec
    num_locations: int
    rows: list[SweepRow] = field(default_factory=list)
    #: (mechanism, alpha, replication) -> matching, when requested
    matchings: dict[tuple[str, float, int], Matching] = field(default_factory=dict)
    #: replication -> generated instance, when requested
    instances: dict[int, Instance] = field(default_factory=dict)


def _run_mechanism(mech: str, inst: Instance, alpha: float, seed: int, spec: SweepSpec):
    if mech == "crsd":
        return run_crsd(inst, MechanismConfig(alpha=alpha, seed=seed))
    if mech == "crv":
        return run_crv(inst, MechanismConfig(alpha=alpha, rank_value=spec.rank_value))
    if mech == "ttc":
        return run_ttc(inst)
    if mech == "da":
        return run_da(inst)
    if mech == "gov-opt":
        return solve_assignment(inst).matching
    raise ValueError(f"unknown mechanism {mech!r}")


def run_sweep(spec: SweepSpec, keep_details: bool = False) -> SweepResult:
    """Run the full (mechanism x alpha x replication) grid."""
    first = generate_instance(_generator_spec(spec, spec.base_seed))
    result = SweepResult(spec=spec, num_locations=first.num_locations)

    for r in range(spec.replications):
        seed = spec.base_seed + r
        inst = first if r == 0 else generate_instance(_generator_spec(spec, seed))
        if keep_details:
            result.instances[r] = inst
        z_star = solve_assignment_value(inst)
        for mech in spec.mechanisms:
            alphas = spec.alphas if mech not in ALPHA_FREE else spec.alphas[:1]
            outputs: dict[float, Matching] = {}
            for alpha in alphas:
                try:
                    outputs[alpha] = _run_mechanism(mech, inst, alpha, seed, spec)
                except AlphamatchError as e:
                    log.warning(
                        "skipping %s (alpha=%s, replication=%d): %s", mech, alpha, r, e
                    )
            for alpha in spec.alphas:
                mu = outputs.get(alpha if mech not in ALPHA_FREE else alphas[0])
                if mu is None:
                    continue
                report = compute_metrics(inst, mu)
                result.rows.append(
                    SweepRow(
                        mechanism=mech,
                        alpha=alpha,
                        seed=seed,
                        replication=r,
                        z=report.z,
                        z_star=z_star,
                        z_ratio=z_ratio(report.z, z_star),
                        rho=report.rho,
                        tau=report.tau,
                        cumulative=report.cumulative,
                    )
                )
                if keep_details:
                    result.matchings[(mech, alpha, r)] = mu

    result.rows.sort(key=lambda row: (row.mechanism, row.alpha, row.replication))
    return result


def _generator_spec(spec: SweepSpec, seed: int) -> GeneratorSpec:
    return GeneratorSpec(
        regime=spec.regime,
        seed=seed,
        truncation=TruncationSpec() if spec.truncation else None,
    )


def write_csv(result: SweepResult, path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(csv_header(result.num_locations))
        for row in result.rows:
            writer.writerow(row.csv_cells())


def read_csv(path) -> tuple[list[SweepRow], int]:
    """Rows and the location count implied by the Delta columns."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedCsv(f"{path}: empty CSV") from None
        fixed = csv_header(0)
        if header[: len(fixed)] != fixed:
            raise MalformedCsv(f"{path}: unexpected header {header[:len(fixed)]}")
        num_locations = len(header) - len(fixed)
        rows = []
        for cells in reader:
            if len(cells) != len(header):
                raise MalformedCsv(f"{path}: row with {len(cells)} cells")
            rho = float(cells[7])
            rows.append(
                SweepRow(
                    mechanism=cells[0],
                    alpha=float(cells[1]),
                    seed=int(cells[2]),
                    replication=int(cells[3]),
                    z=float(cells[4]),
                    z_star=float(cells[5]),
                    z_ratio=float(cells[6]),
                    rho=None if math.isnan(rho) else rho,
                    tau=int(cells[8]),
                    cumulative=tuple(int(c) for c in cells[9:]),
                )
            )
    if not rows:
        raise MalformedCsv(f"{path}: no data rows")
    return rows, num_locations


@dataclass(frozen=True)
class Aggregate:
    mechanism: str
    alpha: float
    count: int
    mean_z: float
    sd_z: float
    mean_z_ratio: float
    mean_rho: Optional[float]
    sd_rho: Optional[float]
    mean_tau: float
    mean_cumulative: tuple[float, ...]


def _mean_sd(xs: list[float]) -> tuple[float, float]:
    return (
        statistics.fmean(xs),
        statistics.stdev(xs) if len(xs) > 1 else 0.0,
    )


def aggregate(rows: list[SweepRow]) -> list[Aggregate]:
    """Replication means and sample standard deviations per (mechanism, alpha)."""
    groups: dict[tuple[str, float], list[SweepRow]] = {}
    for row in rows:
        groups.setdefault((row.mechanism, row.alpha), []).append(row)

    out = []
    for (mech, alpha), members in sorted(groups.items()):
        mean_z, sd_z = _mean_sd([m.z for m in members])
        rhos = [m.rho for m in members if m.rho is not None]
        mean_rho, sd_rho = _mean_sd(rhos) if rhos else (None, None)
        num_positions = len(members[0].cumulative)
        mean_cum = tuple(
            statistics.fmean([m.cumulative[k] for m in members])
            for k in range(num_positions)
        )
        out.append(
            Aggregate(
                mechanism=mech,
                alpha=alpha,
                count=len(members),
                mean_z=mean_z,
                sd_z=sd_z,
                mean_z_ratio=statistics.fmean([m.z_ratio for m in members]),
                mean_rho=mean_rho,
                sd_rho=sd_rho,
                mean_tau=statistics.fmean([m.tau for m in members]),
                mean_cumulative=mean_cum,
            )
        )
    return out


def format_aggregates(aggregates: list[Aggregate]) -> str:
    lines = []
    for a in aggregates:
        rho = "nan" if a.mean_rho is None else f"{a.mean_rho:.3f}±{a.sd_rho:.3f}"
        lines.append(
            f"{a.mechanism:8s} alpha={a.alpha:<4g} n={a.count:<3d} "
            f"z={a.mean_z:.3f}±{a.sd_z:.3f} z_ratio={a.mean_z_ratio:.4f} "
            f"rho={rho} tau={a.mean_tau:.2f} Delta_1={a.mean_cumulative[0]:.1f}"
        )
    return "\n".join(lines)
