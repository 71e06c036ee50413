"""Total variation distances and cutoff profiles.

``f_s(c) = d_TV(eta^s_{c - ln sqrt s}, nu_s)`` is the retranslated limit
profile of the Brownian motion on H_N^{s+}; ``f_inf(c) = e^-c / (1 + e^-c)``.
For ``c <= -ln(1 + 2/sqrt s)`` the tilted density never exceeds the Haar
density and the distance is the outer atom mass alone.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .measures import (
    DEFAULT_N_MAX,
    QuadratureWarning,
    SpectralMeasure,
    eta_cs,
    finite_n_measure,
    nu_s,
)
from .polynomials import q_poly_table
from .quadrature import DEFAULT_NODES, arc_weight, arc_x, composite_rule
from .semigroup import ModelParams

TV_TOL = 1e-9
SCAN_POINTS = 1024
ATOM_MATCH = 1e-12

COMMUTATIVE_TV = "commutative-subalgebra TV"


class Region(str, Enum):
    SINGULAR = "singular-only"
    MIXED = "mixed"
    ABS_CONT = "absolutely-continuous"


def _sign_changes(func, lo: float, hi: float, points: int) -> list[float]:
    """Roots of ``func`` on ``[lo, hi]``: scan for sign changes, then refine each bracket."""
    grid = np.linspace(lo, hi, points + 1)
    # densities may blow up at an arc endpoint; those samples carry no sign information
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = func(grid)
    def scalar(th):
        return float(func(np.array([th]))[0])

    roots = []
    for k in range(points):
        a, b = vals[k], vals[k + 1]
        if not (np.isfinite(a) and np.isfinite(b)):
            continue
        if a == 0.0 and 0 < k:
            roots.append(float(grid[k]))
        elif a * b < 0:
            # the batched and scalar evaluations can round differently right at a root
            fa, fb = scalar(grid[k]), scalar(grid[k + 1])
            if fa * fb < 0:
                roots.append(brentq(scalar, grid[k], grid[k + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
            else:
                roots.append(float(grid[k] if fa == 0 or abs(fa) < abs(fb) else grid[k + 1]))
    return roots


def _atom_difference(atoms1, atoms2) -> float:
    merged: list[list[float]] = []
    for sign, atoms in ((1.0, atoms1), (-1.0, atoms2)):
        for loc, mass in atoms:
            for entry in merged:
                if abs(entry[0] - float(loc)) <= ATOM_MATCH * max(1.0, abs(entry[0])):
                    entry[1] += sign * float(mass)
                    break
            else:
                merged.append([float(loc), sign * float(mass)])
    return math.fsum(abs(m) for _, m in merged)


def tv_distance(mu1: SpectralMeasure, mu2: SpectralMeasure, nodes: int = DEFAULT_NODES,
                tol: float = TV_TOL, with_error: bool = False):
    """Classical total variation distance between two spectral measures over the same arc.

    ``1/2 int |density1 - density2| + 1/2 sum |mass1 - mass2|`` over the union
    of atom locations.  The arc integral is split at every sign change of the
    density difference so each panel integrates a smooth function.
    """
    if mu1.s != mu2.s:
        raise ValueError(f"measures live on different arcs: s={mu1.s} and s={mu2.s}")
    s = mu1.s
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
    r1 = mu1.ratio or zero
    r2 = mu2.ratio or zero

    def diff_theta(theta):
        x = arc_x(s, theta)
        return r1(x) - r2(x)

    kinks = _sign_changes(diff_theta, 0.0, math.pi, SCAN_POINTS)
    breaks = [0.0, *kinks, math.pi]

    def run(n):
        theta, w = composite_rule(breaks, n)
        return math.fsum((np.abs(diff_theta(theta)) * arc_weight(s, theta) * w).astype(np.float64))

    fine = run(nodes)
    err = abs(fine - run(max(64, nodes // 2)))
    if err > tol:
        warnings.warn(f"tv quadrature error estimate {err:.2e}", QuadratureWarning, stacklevel=2)
    value = 0.5 * fine + 0.5 * _atom_difference(mu1.atoms, mu2.atoms)
    if with_error:
        return value, 0.5 * err
    return value


def f_inf(c: float) -> float:
    """``e^-c / (1 + e^-c)``, written to stay finite for large ``|c|``."""
    if c >= 0:
        e = math.exp(-c)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(c))


def singular_closed_form(s: int, c: float) -> float:
    """``(e^-c - e^c / s) / (e^-c + 1)``, valid for ``c <= singular_threshold(s)``."""
    return (math.exp(-c) - math.exp(c) / s) / (math.exp(-c) + 1.0)


def singular_threshold(s: int) -> float:
    """Largest ``c`` with the retranslated tilted density ``<= 1`` on the arc: ``-ln(1 + 2/sqrt s)``."""
    return -math.log1p(2.0 / math.sqrt(s))


def retranslated_eta(s: int, c: float) -> SpectralMeasure:
    return eta_cs(s, c - 0.5 * math.log(s))


def classify_region(s: int, c: float) -> Region:
    if c <= singular_threshold(s):
        return Region.SINGULAR
    if c - 0.5 * math.log(s) < 0:
        return Region.MIXED
    return Region.ABS_CONT


def limit_profile(s: int, c: float, nodes: int = DEFAULT_NODES) -> float:
    """``d_TV(eta_c^s, nu_s)``: the limit at ``t = N ln(sqrt(s) N) + c N`` (not retranslated)."""
    return tv_distance(eta_cs(s, c), nu_s(s), nodes)


@dataclass(frozen=True)
class ProfilePoint:
    c: float
    f_s: float
    f_inf: float
    closed_form: float | None
    region: Region


def profile_point(s: int, c: float, nodes: int = DEFAULT_NODES) -> ProfilePoint:
    value = tv_distance(retranslated_eta(s, c), nu_s(s), nodes)
    region = classify_region(s, c)
    closed = singular_closed_form(s, c) if region is Region.SINGULAR else None
    return ProfilePoint(c, min(max(value, 0.0), 1.0), f_inf(c), closed, region)


def c_grid(c_min: float, c_max: float, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    if c_max < c_min:
        raise ValueError(f"empty range [{c_min}, {c_max}]")
    count = int(math.floor((c_max - c_min) / step + 1e-9)) + 1
    return c_min + step * np.arange(count)


@dataclass
class ProfileTable:
    s: int
    points: list[ProfilePoint]

    @property
    def c(self) -> np.ndarray:
        return np.array([p.c for p in self.points])

    @property
    def f_s(self) -> np.ndarray:
        return np.array([p.f_s for p in self.points])

    @property
    def f_inf(self) -> np.ndarray:
        return np.array([p.f_inf for p in self.points])

    def to_csv(self, header: bool = True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(["s", "c", "f_s", "f_inf", "closed_form", "region"])
        for p in self.points:
            writer.writerow([
                self.s, _fmt(p.c), _fmt(p.f_s), _fmt(p.f_inf),
                "" if p.closed_form is None else _fmt(p.closed_form),
                p.region.value,
            ])
        return buf.getvalue()

    def to_records(self) -> list[dict]:
        rows = []
        for p in self.points:
            row = asdict(p)
            row["region"] = p.region.value
            rows.append(row)
        return rows


def _fmt(x: float) -> str:
    out = f"{x:.12g}"
    return "0" if out == "-0" else out


def profile_sweep(s: int, c_min: float = -4.0, c_max: float = 4.0, step: float = 0.05,
                  nodes: int = DEFAULT_NODES) -> ProfileTable:
    return ProfileTable(s, [profile_point(s, float(c), nodes) for c in c_grid(c_min, c_max, step)])


def finite_n_tv(params: ModelParams, n_max: int = DEFAULT_N_MAX, nodes: int = DEFAULT_NODES) -> float | None:
    """Distance from the finite-N law of ``x_1`` to ``nu_s``; ``None`` flags a diverged density."""
    fin = finite_n_measure(params, n_max, nodes)
    if fin.diverged:
        return None
    return tv_distance(fin.measure, nu_s(params.s), nodes)


def finite_n_sweep(s: int, Ns, cs, n_max: int = DEFAULT_N_MAX, nodes: int = DEFAULT_NODES) -> list[dict]:
    """Rows ``(N, c, t, tv, limit, gap)`` at ``t = N ln(sqrt(s) N) + c N``."""
    rows = []
    for c in cs:
        limit = limit_profile(s, c, nodes)
        for N in Ns:
            params = ModelParams.at_cutoff(N, s, c)
            tv = finite_n_tv(params, n_max, nodes)
            rows.append({
                "N": N, "c": c, "t": params.t,
                "tv": tv, "limit": limit,
                "gap": None if tv is None else abs(tv - limit),
            })
    return rows


def atom_mass_proxy(params: ModelParams, c_eff: float, moments: np.ndarray) -> float:
    """Mass the moment sequence places at the outer atom of the matching ``eta``.

    For ``c < 0`` the atom of ``eta_c^s`` sits at ``x* = e^c + sqrt s + e^-c``
    beyond the arc; moments there are dominated by ``mass * Q_n^s(x*)``, so
    ``m_n / Q_n^s(x*)`` at the first ``n`` where the arc contribution is
    negligible estimates that mass.
    """
    s = params.s
    x_star = math.exp(c_eff) + math.sqrt(s) + math.exp(-c_eff)
    n_max = len(moments) - 1
    q = q_poly_table(s, n_max, np.array([x_star]))[:, 0]
    arc_bound = (1.0 + math.sqrt(s)) * (np.arange(n_max + 1) + 1.0)
    dominant = np.nonzero(np.abs(q) >= 1e3 * arc_bound)[0]
    n = int(dominant[0]) if len(dominant) else n_max
    return float(moments[n] / q[n])


@dataclass
class WindowRow:
    N: int
    side: str
    t: float
    c_eff: float
    value: float
    lower_bound_only: bool


def cutoff_window_check(N_list, s: int, epsilon: float, n_max: int = DEFAULT_N_MAX,
                        nodes: int = DEFAULT_NODES) -> list[WindowRow]:
    """Distances at ``t = (1 +- epsilon) N ln N``.

    Where the density diverges (``c_eff < 0``) the reported value is the
    outer-atom mass proxy, a lower bound only.
    """
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    rows = []
    for N in N_list:
        for side, sign in (("lower", -1.0), ("upper", 1.0)):
            t = (1.0 + sign * epsilon) * N * math.log(N)
            c_eff = t / N - math.log(math.sqrt(s) * N)
            params = ModelParams(N, s, t)
            fin = finite_n_measure(params, n_max, nodes)
            if not fin.diverged:
                value = tv_distance(fin.measure, nu_s(s), nodes)
                rows.append(WindowRow(N, side, t, c_eff, value, False))
            elif c_eff < 0:
                rows.append(WindowRow(N, side, t, c_eff, atom_mass_proxy(params, c_eff, fin.moments), True))
            else:
                rows.append(WindowRow(N, side, t, c_eff, math.nan, True))
    return rows
