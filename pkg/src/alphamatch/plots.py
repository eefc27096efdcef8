"""Figure building from sweep rows: the trade-off and rank-distribution charts."""

from __future__ import annotations

from pathlib import Path

from .sweep import ALPHA_FREE, SweepRow, aggregate
from .svg import Series, line_chart


def build_report(rows: list[SweepRow], outdir) -> list[Path]:
    """Write every applicable chart for the rows; returns the files written."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    aggs = aggregate(rows)
    mechanisms = sorted({a.mechanism for a in aggs})
    written: list[Path] = []

    def per_mechanism(metric) -> list[Series]:
        series = []
        for mech in mechanisms:
            points = [
                (a.alpha, metric(a))
                for a in aggs
                if a.mechanism == mech and metric(a) is not None
            ]
            if points:
                series.append(
                    Series(mech, [p[0] for p in points], [p[1] for p in points])
                )
        return series

    def write(name: str, svg_text: str) -> None:
        path = outdir / name
        path.write_text(svg_text)
        written.append(path)

    rho_series = per_mechanism(lambda a: a.mean_rho)
    if rho_series:
        write(
            "rank_vs_alpha.svg",
            line_chart(
                rho_series,
                title="Mean preference rank of the assigned location",
                xlabel="alpha",
                ylabel="mean rank (lower is better)",
            ),
        )
    write(
        "z_vs_alpha.svg",
        line_chart(
            per_mechanism(lambda a: a.mean_z),
            title="Employment objective",
            xlabel="alpha",
            ylabel="mean z",
        ),
    )

    for mech in mechanisms:
        mech_aggs = [a for a in aggs if a.mechanism == mech]
        if mech in ALPHA_FREE:
            mech_aggs = mech_aggs[:1]
        series = [
            Series(
                mech if mech in ALPHA_FREE else f"alpha={a.alpha:g}",
                list(range(1, len(a.mean_cumulative) + 1)),
                list(a.mean_cumulative),
            )
            for a in mech_aggs
        ]
        write(
            f"cumulative_rank_{mech.replace('-', '_')}.svg",
            line_chart(
                series,
                title=f"Cumulative rank distribution ({mech})",
                xlabel="rank k",
                ylabel="mean families at k-th or better choice",
            ),
        )

    if any(row.tau > 0 for row in rows):
        write(
            "tau_vs_alpha.svg",
            line_chart(
                per_mechanism(lambda a: a.mean_tau),
                title="Families placed outside their ranked list",
                xlabel="alpha",
                ylabel="mean tau",
            ),
        )
    return written
