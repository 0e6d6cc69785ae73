"""Hand-rolled SVG rendering for maps, planned paths and convergence curves.

String-built on purpose: identical inputs always produce byte-identical
files, which the benchmark determinism checks rely on.
"""

from __future__ import annotations

from typing import Sequence

from .geometry import Point
from .gridworld import GridMap

PATH_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"]


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _occupied_rects(grid: GridMap) -> list[str]:
    rects = []
    occ = grid.occupancy
    for row in range(grid.height):
        col = 0
        line = occ[row]
        while col < grid.width:
            if line[col]:
                run = col
                while run < grid.width and line[run]:
                    run += 1
                rects.append(
                    f'<rect x="{col}" y="{row}" width="{run - col}" height="1"/>'
                )
                col = run
            else:
                col += 1
    return rects


def render_map_svg(
    grid: GridMap,
    paths: Sequence[tuple[str, Sequence[Point]]],
    out_path,
) -> None:
    """Draw the occupancy grid with start/goal markers and path polylines."""
    w, h = grid.width, grid.height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" '
        f'width="{w * 3}" height="{h * 3}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
        '<g fill="#333333">',
    ]
    parts.extend(_occupied_rects(grid))
    parts.append("</g>")
    for idx, (name, pts) in enumerate(paths):
        color = PATH_COLORS[idx % len(PATH_COLORS)]
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" '
            f'stroke-width="1.2"><title>{name}</title></polyline>'
        )
    sx, sy = grid.start
    gx, gy = grid.goal
    parts.append(
        f'<circle cx="{_fmt(sx)}" cy="{_fmt(sy)}" r="2" fill="#2ca02c"/>'
    )
    parts.append(
        f'<circle cx="{_fmt(gx)}" cy="{_fmt(gy)}" r="2" fill="#1f77b4"/>'
    )
    parts.append("</svg>")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


def render_curves_svg(
    series: dict[str, Sequence[float | None]],
    out_path,
    title: str = "",
    xlabel: str = "iteration",
    ylabel: str = "best cost",
) -> None:
    """Line plot of per-iteration values; None entries are gaps."""
    width, height = 640, 420
    ml, mr, mt, mb = 60, 20, 30, 45
    pw, ph = width - ml - mr, height - mt - mb

    xs_max = max((len(v) for v in series.values()), default=1)
    ys = [v for vals in series.values() for v in vals if v is not None]
    y_lo = min(ys) if ys else 0.0
    y_hi = max(ys) if ys else 1.0
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def px(i: int) -> float:
        return ml + pw * i / max(xs_max - 1, 1)

    def py(v: float) -> float:
        return mt + ph * (1.0 - (v - y_lo) / (y_hi - y_lo))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#000000"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width // 2}" y="18" text-anchor="middle" '
            f'font-size="14">{title}</text>'
        )
    parts.append(
        f'<text x="{ml + pw // 2}" y="{height - 10}" text-anchor="middle" '
        f'font-size="12">{xlabel}</text>'
    )
    parts.append(
        f'<text x="14" y="{mt + ph // 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {mt + ph // 2})">{ylabel}</text>'
    )
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        yv = y_lo + frac * (y_hi - y_lo)
        parts.append(
            f'<text x="{ml - 6}" y="{_fmt(py(yv) + 4)}" text-anchor="end" '
            f'font-size="10">{_fmt(yv)}</text>'
        )
        xv = int(round(frac * (xs_max - 1)))
        parts.append(
            f'<text x="{_fmt(px(xv))}" y="{height - 28}" text-anchor="middle" '
            f'font-size="10">{xv + 1}</text>'
        )
    legend_y = mt + 14
    for idx, (name, vals) in enumerate(series.items()):
        color = PATH_COLORS[idx % len(PATH_COLORS)]
        segments: list[list[str]] = [[]]
        for i, v in enumerate(vals):
            if v is None:
                if segments[-1]:
                    segments.append([])
            else:
                segments[-1].append(f"{_fmt(px(i))},{_fmt(py(v))}")
        for seg in segments:
            if len(seg) >= 2:
                parts.append(
                    f'<polyline points="{" ".join(seg)}" fill="none" '
                    f'stroke="{color}" stroke-width="1.5"/>'
                )
        parts.append(
            f'<rect x="{ml + 8}" y="{legend_y - 9}" width="12" height="3" '
            f'fill="{color}"/>'
        )
        parts.append(
            f'<text x="{ml + 24}" y="{legend_y - 4}" font-size="11">{name}</text>'
        )
        legend_y += 16
    parts.append("</svg>")
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
