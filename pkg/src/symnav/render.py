"""Static SVG output: track renders with trajectories, and line charts.

World y points up; SVG y points down, so world points are drawn at (x, -y).
"""

from __future__ import annotations

import math
from typing import Mapping, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .track import Track

PAD = 0.05
COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def _f(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".") if math.isfinite(v) else "0"


def view_box(track: Track) -> tuple[float, float, float, float]:
    """(min_x, min_y, width, height) in SVG coordinates: track extent padded 5% per side."""
    xmin, ymin, xmax, ymax = track.bounds()
    w = xmax - xmin
    h = ymax - ymin
    px, py = PAD * w, PAD * h
    return xmin - px, -ymax - py, w + 2 * px, h + 2 * py


def track_svg(track: Track, states: Optional[np.ndarray] = None,
              scans: Optional[np.ndarray] = None, fov: float = math.pi,
              scan_every: int = 0) -> str:
    """Track walls and obstacles, start (green) and destination (red) markers, and
    the trajectory polyline from rows ``(tick, x, y, theta, delta, steer)``.

    With ``scan_every > 0`` and scans given, beam rays are drawn every that many ticks.
    """
    vx, vy, vw, vh = view_box(track)
    unit = max(vw, vh) / 400.0
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_f(vx)} {_f(vy)} {_f(vw)} {_f(vh)}" '
        f'width="{_f(min(1200.0, vw))}" height="{_f(min(1200.0, vw) * vh / vw)}">',
        f"<title>{escape(track.name)}</title>",
        f'<rect x="{_f(vx)}" y="{_f(vy)}" width="{_f(vw)}" height="{_f(vh)}" fill="white"/>',
        f'<g id="walls" stroke="black" stroke-width="{_f(2 * unit)}" stroke-linecap="round">',
    ]
    for w in track.walls:
        out.append(f'<line x1="{_f(w.a.x)}" y1="{_f(-w.a.y)}" x2="{_f(w.b.x)}" y2="{_f(-w.b.y)}"/>')
    out.append("</g>")
    out.append('<g id="obstacles" fill="#777">')
    for o in track.obstacles:
        out.append(
            f'<rect x="{_f(o.center.x - o.half_length)}" y="{_f(-(o.center.y + o.half_width))}" '
            f'width="{_f(2 * o.half_length)}" height="{_f(2 * o.half_width)}"/>'
        )
    out.append("</g>")
    r = 4 * unit
    if states is not None and len(states):
        if scans is not None and scan_every > 0 and scans.shape[1] >= 2:
            n = scans.shape[1]
            out.append(f'<g id="scans" stroke="#e8a" stroke-width="{_f(0.5 * unit)}">')
            for i in range(0, len(states), scan_every):
                _, x, y, th = states[i][:4]
                for k in range(n):
                    a = th + fov / 2 - k * fov / (n - 1)
                    d = scans[i, k]
                    out.append(f'<line x1="{_f(x)}" y1="{_f(-y)}" '
                               f'x2="{_f(x + d * math.cos(a))}" y2="{_f(-(y + d * math.sin(a)))}"/>')
            out.append("</g>")
        pts = [(track.start.x, track.start.y)] + [(float(s[1]), float(s[2])) for s in states]
        if len(states) > 1:
            path = " ".join(f"{_f(x)},{_f(-y)}" for x, y in pts)
            out.append(f'<polyline id="trajectory" points="{path}" fill="none" '
                       f'stroke="#1f77b4" stroke-width="{_f(1.5 * unit)}"/>')
        x, y = pts[-1]
        out.append(f'<circle id="pose" cx="{_f(x)}" cy="{_f(-y)}" r="{_f(r)}" fill="#1f77b4"/>')
    out.append(f'<circle id="start" cx="{_f(track.start.x)}" cy="{_f(-track.start.y)}" '
               f'r="{_f(r)}" fill="green"/>')
    out.append(f'<circle id="destination" cx="{_f(track.destination.x)}" '
               f'cy="{_f(-track.destination.y)}" r="{_f(r)}" fill="red"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def line_chart_svg(xs: Sequence[float], series: Mapping[str, Sequence[float]], title: str = "",
                   xlabel: str = "", ylabel: str = "", width: int = 640, height: int = 360) -> str:
    """Plain line chart with axes, min/max tick labels and a legend."""
    left, right, top, bottom = 70, 20, 30, 45
    pw, ph = width - left - right, height - top - bottom
    xs = [float(x) for x in xs]
    ys_all = [float(v) for vs in series.values() for v in vs if math.isfinite(float(v))]
    x0, x1 = (min(xs), max(xs)) if xs else (0.0, 1.0)
    y0, y1 = (min(ys_all), max(ys_all)) if ys_all else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:g}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        f'<text x="{left}" y="{top + ph + 14}" text-anchor="middle">{x0:g}</text>',
        f'<text x="{left + pw}" y="{top + ph + 14}" text-anchor="middle">{x1:g}</text>',
        f'<text x="{left - 4}" y="{top + ph}" text-anchor="end">{y0:.4g}</text>',
        f'<text x="{left - 4}" y="{top + 4}" text-anchor="end">{y1:.4g}</text>',
        f'<text x="{left + pw / 2:g}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{top + ph / 2:g}" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2:g})">{escape(ylabel)}</text>',
    ]
    if y0 < 0 < y1:
        out.append(f'<line x1="{left}" y1="{_f(sy(0))}" x2="{left + pw}" y2="{_f(sy(0))}" '
                   f'stroke="#bbb" stroke-dasharray="3,3"/>')
    for k, (label, vs) in enumerate(series.items()):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{_f(sx(x))},{_f(sy(float(v)))}" for x, v in zip(xs, vs))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        out.append(f'<text x="{left + pw - 4}" y="{top + 14 + 14 * k}" text-anchor="end" '
                   f'fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def steering_svg(states: np.ndarray, title: str = "steering command") -> str:
    ticks = states[:, 0] if len(states) else np.zeros(0)
    return line_chart_svg(
        ticks, {"steer_cmd (deg)": np.degrees(states[:, 5]) if len(states) else [],
                "delta (deg)": np.degrees(states[:, 4]) if len(states) else []},
        title=title, xlabel="tick", ylabel="angle (deg)",
    )
