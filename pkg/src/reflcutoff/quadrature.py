"""Composite Gauss-Legendre quadrature on the arc ``[sqrt(s)-2, sqrt(s)+2]``.

Integrals against the continuous part of the free Meixner law are taken in
the angle ``theta`` with ``x = sqrt(s) + 2 cos(theta)``.  The Lebesgue density
times ``dx/dtheta`` becomes

    w_s(theta) = 2 sin(theta)^2 / (pi (s + 1 + 2 sqrt(s) cos(theta)))

which is smooth on ``[0, pi]`` (for ``s = 1`` it reduces to ``(1 - cos theta) / pi``).
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

PANEL_ORDER = 64
DEFAULT_NODES = 4096
VERIFY_NODES = 16384


@lru_cache(maxsize=8)
def _panel_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_rule(breaks: Sequence[float], nodes: int = DEFAULT_NODES,
                   order: int = PANEL_ORDER) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[breaks[0], breaks[-1]]`` with panels aligned to ``breaks``.

    About ``nodes`` points in total; panels are shared out in proportion to
    piece length, at least one per piece.
    """
    breaks = np.asarray(breaks, dtype=float)
    total = breaks[-1] - breaks[0]
    n_panels = max(1, nodes // order)
    ref_x, ref_w = _panel_rule(order)
    xs, ws = [], []
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        if hi <= lo:
            continue
        k = max(1, int(round(n_panels * (hi - lo) / total)))
        edges = np.linspace(lo, hi, k + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        xs.append((mid[:, None] + half[:, None] * ref_x[None, :]).ravel())
        ws.append((half[:, None] * ref_w[None, :]).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def arc_x(s: int, theta) -> np.ndarray:
    """``sqrt(s) + 2 cos(theta)`` in ``longdouble``.

    Densities with a pole at the right edge (the tilt at ``c = 0``) divide by
    ``x_edge - x``, which loses ``~eps / theta^2`` relative accuracy near ``theta = 0``.
    """
    theta = np.asarray(theta, dtype=np.longdouble)
    return np.sqrt(np.longdouble(s)) + 2 * np.cos(theta)


def arc_theta(s: int, x) -> np.ndarray:
    return np.arccos(np.clip((np.asarray(x, dtype=float) - math.sqrt(s)) / 2.0, -1.0, 1.0))


def arc_weight(s: int, theta) -> np.ndarray:
    """Continuous part of the free Meixner law, pulled back to ``theta``."""
    cos = np.cos(theta)
    if s == 1:
        return (1.0 - cos) / math.pi
    sin2 = np.sin(theta) ** 2
    return 2.0 * sin2 / (math.pi * (s + 1.0 + 2.0 * math.sqrt(s) * cos))


def arc_density(s: int, x) -> np.ndarray:
    """Lebesgue density ``sqrt(4 - (x - sqrt s)^2) / (2 pi (x sqrt s + 1))`` on the arc, zero off it."""
    x = np.asarray(x, dtype=float)
    y = x - math.sqrt(s)
    inside = np.abs(y) < 2.0
    out = np.zeros_like(x)
    xi = x[inside]
    out[inside] = np.sqrt(4.0 - y[inside] ** 2) / (2.0 * math.pi * (xi * math.sqrt(s) + 1.0))
    return out


def integrate_arc(s: int, ratio: Callable[[np.ndarray], np.ndarray], nodes: int = DEFAULT_NODES,
                  theta_breaks: Sequence[float] = ()) -> tuple[float, float]:
    """``int ratio(x) dnu_s^cont(x)`` and an error estimate from a half-resolution rerun."""
    breaks = sorted({0.0, math.pi, *(b for b in theta_breaks if 0.0 < b < math.pi)})

    def run(n):
        theta, w = composite_rule(breaks, n)
        vals = ratio(arc_x(s, theta)) * arc_weight(s, theta)
        return math.fsum((vals * w).astype(np.float64))

    fine = run(nodes)
    coarse = run(max(PANEL_ORDER, nodes // 2))
    return fine, abs(fine - coarse)
