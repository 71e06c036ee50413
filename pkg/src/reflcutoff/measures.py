"""Spectral measures on the commutative subalgebra generated by ``x_1``.

A :class:`SpectralMeasure` is stored relative to the free Meixner law
``nu_s``: a nonnegative ``ratio`` multiplying the continuous part of
``nu_s`` on the arc ``[sqrt(s)-2, sqrt(s)+2]``, plus finitely many atoms.
The Lebesgue density is ``ratio(x) * arc_density(s, x)``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .polynomials import q_poly_table
from .quadrature import DEFAULT_NODES, arc_density, arc_weight, composite_rule, arc_x, integrate_arc
from .semigroup import ModelParams, phi_xn_all

Ratio = Callable[[np.ndarray], np.ndarray]

MOMENT_TOL = 1e-10
DEFAULT_N_MAX = 40
DROP_BELOW = 1e-14
L2_TAIL_THRESHOLD = 1e-10


class QuadratureWarning(RuntimeWarning):
    pass


def _one(x):
    return np.ones(np.shape(x))


@dataclass(frozen=True)
class SpectralMeasure:
    s: int
    ratio: Ratio | None
    atoms: tuple[tuple[float, float], ...] = ()
    label: str = ""

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.ratio is None:
            return np.zeros_like(x)
        return self.ratio(x) * arc_density(self.s, x)

    def continuous_mass(self, nodes: int = DEFAULT_NODES) -> float:
        if self.ratio is None:
            return 0.0
        return integrate_arc(self.s, self.ratio, nodes)[0]

    def total_mass(self, nodes: int = DEFAULT_NODES) -> float:
        return self.continuous_mass(nodes) + math.fsum(m for _, m in self.atoms)

    def to_dict(self, moments: int = 0, grid: int = 0, nodes: int = DEFAULT_NODES) -> dict:
        """JSON-ready ``{s, atoms, moments, grid}``; ``grid`` samples the Lebesgue density."""
        out = {
            "s": self.s,
            "label": self.label,
            "atoms": [[float(loc), float(mass)] for loc, mass in self.atoms],
            "moments": [moment(self, n, nodes) for n in range(moments)],
        }
        if grid:
            theta = np.linspace(math.pi, 0.0, grid + 2)[1:-1]
            x = arc_x(self.s, theta)
            out["grid"] = [[float(a), float(b)] for a, b in zip(x, self.density(x.astype(float)))]
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(**kwargs), indent=2)


def nu_s(s: int) -> SpectralMeasure:
    """Free Meixner law ``Meix+(sqrt s, 1)``: arc density plus ``(1 - 1/s) delta_{-1/sqrt s}``."""
    if s < 1:
        raise ValueError(f"s must be a positive integer, got {s}")
    atoms = () if s == 1 else ((-1.0 / math.sqrt(s), 1.0 - 1.0 / s),)
    return SpectralMeasure(s, _one, atoms, label=f"nu_{s}")


def tilt_ratio(s: int, c: float) -> Ratio:
    """``f_c(x) = (e^c + sqrt s) / (e^c + e^-c + sqrt s - x)``."""
    c = np.longdouble(c)
    ec, emc, root = np.exp(c), np.exp(-c), np.sqrt(np.longdouble(s))
    num = ec + root
    top = ec + emc + root

    def f(x):
        return num / (top - np.asarray(x))

    return f


def outer_atom(s: int, c: float) -> tuple[float, float] | None:
    """Atom of ``eta_c^s`` beyond the arc, present only for ``c < 0``.

    Location and mass are ``longdouble``: high moments ``Q_n^s(loc)`` amplify
    their rounding by roughly ``n``.
    """
    if c >= 0:
        return None
    c = np.longdouble(c)
    ec, emc, root = np.exp(c), np.exp(-c), np.sqrt(np.longdouble(s))
    return ec + root + emc, (emc - ec) / (emc + root)


def eta_cs(s: int, c: float) -> SpectralMeasure:
    """The tilted law with ``eta(Q_n^s) = e^{-cn}``."""
    f = tilt_ratio(s, c)
    atoms = []
    if s > 1:
        loc = -1.0 / math.sqrt(s)
        atoms.append((loc, (1.0 - 1.0 / s) * float(f(loc))))
    extra = outer_atom(s, c)
    if extra is not None:
        atoms.append(extra)
    return SpectralMeasure(s, f, tuple(atoms), label=f"eta_{c:g}^{s}")


def _atom_terms(atoms, s: int, n_max: int) -> np.ndarray:
    """``sum_atoms mass * Q_k^s(loc)`` for ``k <= n_max``, accumulated in ``longdouble``."""
    out = np.zeros(n_max + 1, dtype=np.longdouble)
    for loc, mass in atoms:
        out += np.longdouble(mass) * q_poly_table(s, n_max, np.array([loc]), dtype=np.longdouble)[:, 0]
    return out


def moment(mu: SpectralMeasure, n: int, nodes: int = DEFAULT_NODES, tol: float = MOMENT_TOL) -> float:
    """``int Q_n^s dmu``: arc quadrature plus the atoms."""
    s = mu.s
    total = 0.0
    if mu.ratio is not None:
        ratio = mu.ratio
        value, err = integrate_arc(s, lambda x: ratio(x) * q_poly_table(s, n, x)[n], nodes)
        if err > tol * max(1.0, abs(value)):
            warnings.warn(f"moment {n}: quadrature error estimate {err:.2e}", QuadratureWarning, stacklevel=2)
        total += value
    return float(np.longdouble(total) + _atom_terms(mu.atoms, s, n)[n])


def moments(mu: SpectralMeasure, n_max: int, nodes: int = DEFAULT_NODES) -> np.ndarray:
    """``int Q_k^s dmu`` for ``k = 0 .. n_max`` in one pass."""
    s = mu.s
    out = _atom_terms(mu.atoms, s, n_max)
    if mu.ratio is not None:
        theta, w = composite_rule([0.0, math.pi], nodes)
        x = arc_x(s, theta)
        weighted = mu.ratio(x) * arc_weight(s, theta) * w
        table = q_poly_table(s, n_max, x)
        out += np.array([math.fsum(row) for row in (table * weighted).astype(np.float64)], dtype=np.longdouble)
    return out.astype(np.float64)


def series_ratio(s: int, coeffs) -> Ratio:
    """``x -> sum_n coeffs[n] Q_n^s(x)``."""
    coeffs = np.asarray(coeffs, dtype=float)
    n_max = len(coeffs) - 1

    def f(x):
        x = np.asarray(x, dtype=float)
        return np.tensordot(coeffs, q_poly_table(s, n_max, x), axes=1)

    return f


def measure_from_moments(s: int, coeffs, nodes: int = DEFAULT_NODES) -> tuple[SpectralMeasure, float]:
    """Measure with density ``sum_n m_n Q_n^s`` relative to ``nu_s``, clipped at zero.

    Returns the measure and the mass removed by clipping.
    """
    raw = series_ratio(s, coeffs)

    def clipped(x):
        return np.maximum(raw(x), 0.0)

    negative_part, _ = integrate_arc(s, lambda x: np.maximum(-raw(x), 0.0), nodes)
    atoms = []
    if s > 1:
        loc = -1.0 / math.sqrt(s)
        value = float(raw(np.array([loc]))[0])
        mass = (1.0 - 1.0 / s) * value
        if mass < 0:
            negative_part += -mass
            mass = 0.0
        atoms.append((loc, mass))
    return SpectralMeasure(s, clipped, tuple(atoms), label="from moments"), negative_part


@dataclass
class FiniteNMeasure:
    """Law of ``x_1`` under ``phi_t`` at finite ``N``.

    ``measure`` is ``None`` when the moment sequence fails the square-summability
    test (``diverged``).
    """

    params: ModelParams
    moments: np.ndarray
    diverged: bool
    tail_estimate: float
    measure: SpectralMeasure | None = None
    clipped_mass: float = 0.0
    n_used: int = 0
    notes: list[str] = field(default_factory=list)


def l2_tail(m: np.ndarray) -> tuple[float, float]:
    """Geometric tail ``m_{n_max}^2 / (1 - r)``, ``r = (m_{n_max} / m_{n_max-1})^2``, and ``r`` itself.

    The last computed term is included, so the estimate bounds the truncation
    error from above for a geometric sequence.
    """
    if len(m) < 2 or m[-2] == 0:
        return 0.0, 0.0
    ratio = (m[-1] / m[-2]) ** 2
    if not np.isfinite(ratio) or ratio >= 1.0:
        return math.inf, float(ratio)
    return float(m[-1] ** 2 / (1.0 - ratio)), float(ratio)


def finite_n_measure(params: ModelParams, n_max: int = DEFAULT_N_MAX, nodes: int = DEFAULT_NODES,
                     threshold: float = L2_TAIL_THRESHOLD) -> FiniteNMeasure:
    """Moments ``phi_t(x_n)``, ``n <= n_max``, and the reconstructed measure when they are square-summable."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    m = phi_xn_all(params, n_max)
    small = np.nonzero(np.abs(m) < DROP_BELOW)[0]
    n_used = int(small[0]) if len(small) else n_max
    if len(small):
        tail, diverged = 0.0, False
    else:
        tail, _ = l2_tail(m)
        diverged = not (tail < threshold)
    result = FiniteNMeasure(params, m, diverged, tail, n_used=n_used)
    if diverged:
        result.notes.append("moment sequence not square-summable; no density")
        return result
    measure, clipped = measure_from_moments(params.s, m[: n_used + 1], nodes)
    result.measure = SpectralMeasure(params.s, measure.ratio, measure.atoms,
                                     label=f"phi_t(N={params.N}, s={params.s}, t={params.t:g})")
    result.clipped_mass = clipped
    return result
