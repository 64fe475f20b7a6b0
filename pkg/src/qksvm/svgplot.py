"""Standalone SVG charts for sweep CSVs, no renderer required.

Output depends only on the input rows: numbers are printed with fixed
precision and no timestamps or ids are emitted.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .exceptions import InvalidArgumentError

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]

WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 150, 50, 70


def _escape(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


class SweepCsvError(InvalidArgumentError):
    pass


def read_sweep_csv(path) -> tuple[list[str], list[dict]]:
    """Parse a sweep CSV; accuracy columns must be numeric."""
    path = Path(path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not any(cell.strip() for cell in rows[0]):
        raise SweepCsvError(f"{path}: line 1: empty file, expected a header")
    header = [h.strip() for h in rows[0]]
    for col in ("train_acc", "test_acc"):
        if col not in header:
            raise SweepCsvError(f"{path}: line 1: missing column {col!r}")
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise SweepCsvError(f"{path}: line {lineno}: {len(row)} fields, expected {len(header)}")
        rec = dict(zip(header, (c.strip() for c in row)))
        for col in ("train_acc", "test_acc"):
            try:
                rec[col] = float(rec[col])
            except ValueError:
                raise SweepCsvError(f"{path}: line {lineno}: {col} is not a number: {rec[col]!r}") from None
        records.append(rec)
    if not records:
        raise SweepCsvError(f"{path}: no data rows")
    return header, records


def _frame(title: str, x_label: str, y_label: str) -> list[str]:
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
        f'<text x="{LEFT + pw / 2:.1f}" y="28" text-anchor="middle" font-family="sans-serif" '
        f'font-size="16">{_escape(title)}</text>',
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="#000"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="#000"/>',
    ]
    for k in range(6):
        v = k / 5
        y = TOP + ph - v * ph
        out.append(f'<line x1="{LEFT - 4}" y1="{y:.1f}" x2="{LEFT + pw}" y2="{y:.1f}" stroke="#ddd"/>')
        out.append(
            f'<text x="{LEFT - 8}" y="{y + 4:.1f}" text-anchor="end" font-family="sans-serif" '
            f'font-size="11">{v:.1f}</text>'
        )
    out.append(
        f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 20}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{_escape(x_label)}</text>'
    )
    out.append(
        f'<text x="18" y="{TOP + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13" transform="rotate(-90 18 {TOP + ph / 2:.1f})">{_escape(y_label)}</text>'
    )
    return out


def _legend(names) -> list[str]:
    out = []
    x = WIDTH - RIGHT + 16
    for k, name in enumerate(names):
        y = TOP + 10 + 20 * k
        color = COLORS[k % len(COLORS)]
        out.append(f'<rect x="{x}" y="{y - 9}" width="12" height="12" fill="{color}"/>')
        out.append(
            f'<text x="{x + 18}" y="{y + 2}" font-family="sans-serif" font-size="12">{_escape(name)}</text>'
        )
    return out


def line_chart(x_values, series: dict, title: str, x_label: str, y_label: str = "accuracy") -> str:
    """Line chart, one polyline plus markers per named series; y spans [0, 1]."""
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    n = len(x_values)

    def px(i):
        return LEFT + (pw / 2 if n == 1 else i * pw / (n - 1))

    def py(v):
        return TOP + ph - max(0.0, min(1.0, v)) * ph

    out = _frame(title, x_label, y_label)
    for i, xv in enumerate(x_values):
        out.append(
            f'<text x="{px(i):.1f}" y="{TOP + ph + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_escape(xv)}</text>'
        )
    for k, (name, values) in enumerate(series.items()):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{px(i):.1f},{py(v):.1f}" for i, v in enumerate(values))
        out.append(f'<polyline class="series" fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        for i, v in enumerate(values):
            out.append(
                f'<circle class="point" data-series="{_escape(name)}" cx="{px(i):.1f}" '
                f'cy="{py(v):.1f}" r="4" fill="{color}"><title>{_escape(name)} {v:.4f}</title></circle>'
            )
    out.extend(_legend(series))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def bar_chart(groups, series: dict, title: str, x_label: str, y_label: str = "accuracy") -> str:
    """Grouped bar chart: one group per label in ``groups``, one bar per series."""
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    n_groups, n_series = len(groups), len(series)
    group_w = pw / n_groups
    bar_w = group_w * 0.8 / n_series
    out = _frame(title, x_label, y_label)
    for g, label in enumerate(groups):
        cx = LEFT + (g + 0.5) * group_w
        out.append(
            f'<text x="{cx:.1f}" y="{TOP + ph + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_escape(label)}</text>'
        )
    for k, (name, values) in enumerate(series.items()):
        color = COLORS[k % len(COLORS)]
        for g, v in enumerate(values):
            v = max(0.0, min(1.0, v))
            x = LEFT + g * group_w + group_w * 0.1 + k * bar_w
            h = v * ph
            out.append(
                f'<rect class="point" data-series="{_escape(name)}" x="{x:.1f}" y="{TOP + ph - h:.1f}" '
                f'width="{bar_w:.1f}" height="{h:.1f}" fill="{color}"><title>{_escape(name)} {v:.4f}</title></rect>'
            )
    out.extend(_legend(series))
    out.append("</svg>")
    return "\n".join(out) + "\n"


def plot_sweep(csv_path, title: str | None = None) -> str:
    """Chart for a depth sweep (line chart) or a kernel sweep (grouped bars)."""
    header, records = read_sweep_csv(csv_path)
    series = {
        "train": [r["train_acc"] for r in records],
        "test": [r["test_acc"] for r in records],
    }
    if "reps" in header:
        return line_chart([r["reps"] for r in records], series, title or "Accuracy vs circuit depth", "reps")
    if "kernel" in header:
        labels = [f"{r['kernel']} lr={r.get('learning_rate', '')}" for r in records]
        return bar_chart(labels, series, title or "Accuracy per kernel and learning rate", "kernel / learning rate")
    raise SweepCsvError(f"{csv_path}: line 1: need a 'reps' or 'kernel' column")
