"""Deterministic SVG line charts for benchmark output.

SVG is assembled by hand (no plotting library) so identical input yields
identical bytes, which the reproducibility checks rely on.  Two charts are
produced from a benchmark CSV: mean QoE vs. request count and mean
execution time vs. request count, one polyline per strategy.
"""

from __future__ import annotations

import os

from . import bench

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")

_WIDTH, _HEIGHT = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 160, 40, 50


def _fmt(value: float) -> str:
    return f"{value:g}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def render_line_chart(
    series: list[tuple[str, list[tuple[float, float]]]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """Render named (x, y) series as an SVG document string.

    Single-point series degrade to markers; the y axis always starts at 0.
    """
    if not series or all(not points for _, points in series):
        raise ValueError("nothing to plot: no data points")

    xs = [x for _, pts in series for x, _ in pts]
    ys = [y for _, pts in series for _, y in pts]
    x_lo, x_hi = min(xs), max(xs)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1, x_hi + 1
    y_lo = 0.0
    y_hi = max(ys) * 1.05 if max(ys) > 0 else 1.0

    plot_w = _WIDTH - _LEFT - _RIGHT
    plot_h = _HEIGHT - _TOP - _BOTTOM

    def px(x: float) -> float:
        return _LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<text x="{_WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]

    axis = f'{_LEFT},{_TOP} {_LEFT},{_TOP + plot_h} {_LEFT + plot_w},{_TOP + plot_h}'
    parts.append(f'<polyline points="{axis}" fill="none" stroke="black" stroke-width="1"/>')

    for t in _ticks(x_lo, x_hi):
        x = px(t)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_TOP + plot_h}" x2="{x:.2f}" '
            f'y2="{_TOP + plot_h + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_TOP + plot_h + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        parts.append(
            f'<line x1="{_LEFT - 5}" y1="{y:.2f}" x2="{_LEFT}" y2="{y:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )

    parts.append(
        f'<text x="{_LEFT + plot_w / 2:.2f}" y="{_HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{x_label}</text>'
    )
    parts.append(
        f'<text x="18" y="{_TOP + plot_h / 2:.2f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_TOP + plot_h / 2:.2f})">{y_label}</text>'
    )

    legend_x = _LEFT + plot_w + 20
    for idx, (name, points) in enumerate(series):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = [(px(x), py(y)) for x, y in sorted(points)]
        if len(coords) >= 2:
            joined = " ".join(f"{x:.2f},{y:.2f}" for x, y in coords)
            parts.append(
                f'<polyline points="{joined}" fill="none" stroke="{color}" stroke-width="2"/>'
            )
        for x, y in coords:
            parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3.5" fill="{color}"/>')
        ly = _TOP + 10 + idx * 20
        parts.append(
            f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 24}" y2="{ly}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{legend_x + 30}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="12">{name}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _load_aggregates(csv_path) -> list[bench.BenchAggregate]:
    """Accept either a records CSV (aggregated here) or an aggregate CSV."""
    with open(csv_path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
    if header == bench.RECORDS_HEADER:
        records = bench.read_records_csv(csv_path)
        if not records:
            raise ValueError(f"{csv_path}: no benchmark records to plot")
        return bench.aggregate(records)
    if header == bench.AGGREGATE_HEADER:
        aggregates = bench.read_aggregate_csv(csv_path)
        if not aggregates:
            raise ValueError(f"{csv_path}: no aggregate rows to plot")
        return aggregates
    raise ValueError(f"{csv_path}: unrecognized header {header!r}")


def plot_benchmark(csv_path, out_dir) -> tuple[str, str]:
    """Write qoe_vs_requests.svg and exec_time_vs_requests.svg under out_dir."""
    aggregates = _load_aggregates(csv_path)
    strategies = tuple(dict.fromkeys(a.strategy for a in aggregates))

    def series_of(metric) -> list[tuple[str, list[tuple[float, float]]]]:
        return [
            (
                name,
                [(float(a.n_requests), metric(a)) for a in aggregates if a.strategy == name],
            )
            for name in strategies
        ]

    os.makedirs(out_dir, exist_ok=True)
    qoe_path = os.path.join(out_dir, "qoe_vs_requests.svg")
    time_path = os.path.join(out_dir, "exec_time_vs_requests.svg")
    with open(qoe_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_line_chart(
            series_of(lambda a: a.mean_qoe),
            title="Mean QoE vs. number of requests",
            x_label="number of energy requests",
            y_label="mean QoE",
        ))
    with open(time_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_line_chart(
            series_of(lambda a: a.mean_exec_time_us),
            title="Mean composition time vs. number of requests",
            x_label="number of energy requests",
            y_label="mean execution time (microseconds)",
        ))
    return qoe_path, time_path
