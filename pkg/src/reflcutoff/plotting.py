"""Line plots of profile curves.

``render_svg`` writes a self-contained, byte-deterministic SVG (fixed
800x500 viewBox, hand-built axes).  ``render_figure`` draws the same curves
with matplotlib into any format it supports (png, pdf, ...), for reports.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

WIDTH, HEIGHT = 800, 500
MARGIN = dict(left=70, right=150, top=30, bottom=55)
PALETTE = ["#1f77b4", "#d62728", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]

Curve = tuple[str, Sequence[float], Sequence[float]]


def _nice_ticks(lo: float, hi: float, target: int = 8) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    k = 0
    while first + k * step <= hi + 1e-9 * span:
        ticks.append(round(first + k * step, 10))
        k += 1
    return ticks


def _num(v: float) -> str:
    out = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if out in ("-0", "") else out


def render_svg(curves: Sequence[Curve], title: str = "", xlabel: str = "c", ylabel: str = "",
               ylim: tuple[float, float] = (0.0, 1.0)) -> str:
    xs_all = np.concatenate([np.asarray(x, dtype=float) for _, x, _ in curves])
    x_lo, x_hi = float(xs_all.min()), float(xs_all.max())
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = ylim
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return MARGIN["top"] + (y_hi - y) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_num(MARGIN["left"] + pw / 2)}" y="18" text-anchor="middle" '
                   f'font-size="14">{_escape(title)}</text>')
    # axes box and ticks
    out.append(f'<rect x="{MARGIN["left"]}" y="{MARGIN["top"]}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="black" stroke-width="1"/>')
    for tx in _nice_ticks(x_lo, x_hi):
        X = _num(px(tx))
        out.append(f'<line x1="{X}" y1="{_num(py(y_lo))}" x2="{X}" y2="{_num(py(y_lo) + 5)}" stroke="black"/>')
        out.append(f'<text x="{X}" y="{_num(py(y_lo) + 19)}" text-anchor="middle">{_num(tx)}</text>')
    for ty in _nice_ticks(y_lo, y_hi, 5):
        Y = _num(py(ty))
        out.append(f'<line x1="{_num(px(x_lo) - 5)}" y1="{Y}" x2="{_num(px(x_lo))}" y2="{Y}" stroke="black"/>')
        out.append(f'<line x1="{_num(px(x_lo))}" y1="{Y}" x2="{_num(px(x_hi))}" y2="{Y}" '
                   f'stroke="#dddddd" stroke-width="0.5"/>')
        out.append(f'<text x="{_num(px(x_lo) - 8)}" y="{_num(py(ty) + 4)}" text-anchor="end">{_num(ty)}</text>')
    out.append(f'<text x="{_num(MARGIN["left"] + pw / 2)}" y="{HEIGHT - 12}" text-anchor="middle">'
               f'{_escape(xlabel)}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{_num(MARGIN["top"] + ph / 2)}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {_num(MARGIN["top"] + ph / 2)})">{_escape(ylabel)}</text>')

    for k, (label, x, y) in enumerate(curves):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_num(px(a))},{_num(py(min(max(b, y_lo), y_hi)))}"
                       for a, b in zip(np.asarray(x, float), np.asarray(y, float)) if np.isfinite(b))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.8" points="{pts}"/>')
        ly = MARGIN["top"] + 15 + 20 * k
        lx = WIDTH - MARGIN["right"] + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2.5"/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">{_escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def render_figure(curves: Sequence[Curve], path, title: str = "", xlabel: str = "c", ylabel: str = "",
                  ylim: tuple[float, float] = (0.0, 1.0)) -> None:
    """Draw ``curves`` with matplotlib and save to ``path`` (format from the suffix)."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 5))
    for k, (label, x, y) in enumerate(curves):
        ax.plot(x, y, label=label, color=PALETTE[k % len(PALETTE)], lw=1.6)
    ax.set_xlabel(xlabel)
    if ylabel:
        ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.set_ylim(*ylim)
    ax.grid(alpha=0.3)
    ax.legend(loc="upper right")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
