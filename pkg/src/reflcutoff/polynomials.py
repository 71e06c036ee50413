"""Point evaluation of the Chebyshev-type polynomial families.

Three families are used throughout the package:

* ``P_n``: Chebyshev polynomials of the second kind in the normalisation
  ``P_0 = 1``, ``P_1 = x``, ``x P_n = P_{n+1} + P_{n-1}`` (so ``P_n(x) = U_n(x/2)``).
* ``Q_n^s``: the orthonormal family of the free Meixner law,
  ``Q_0 = 1``, ``Q_1 = x``, ``x Q_n = Q_{n+1} + sqrt(s) Q_n + Q_{n-1}``.
* ``Q_ell``: products ``P_{l_1}(sqrt X) ... P_{l_k}(sqrt X)`` indexed by block tuples.

Everything is evaluated pointwise by forward recurrence; no coefficient
representation is ever built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

LTuple = tuple[int, ...]


class VanishingFactorError(ZeroDivisionError):
    """A Chebyshev factor vanished where its logarithmic derivative was needed."""


@dataclass(frozen=True)
class PolyEval:
    """Value of a polynomial together with ``p'/p``.

    ``log_abs`` is ``log|value|``; it stays finite when ``value`` itself
    would overflow a double.
    """

    value: float
    logderiv: float
    log_abs: float = math.nan
    sign: int = 1


def chebyshev_eval(n: int, x: float, logderiv: bool = True) -> PolyEval:
    """Evaluate ``P_n(x)`` and ``P_n'(x) / P_n(x)``.

    The derivative runs alongside the value through
    ``P'_{k+1} = P_k + x P'_k - P'_{k-1}``.  For ``x >= 2`` every iterate is
    positive and the ratio is accumulated without ever forming large
    products: the pair ``(P_k, P'_k)`` is renormalised by ``P_k`` each step and
    the scale is kept as a running logarithm.
    """
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    if n == 0:
        return PolyEval(1.0, 0.0, 0.0, 1)

    # (p_prev, p_cur) and derivatives, all divided by a common scale exp(log_scale)
    p_prev, p_cur = 1.0, x
    d_prev, d_cur = 0.0, 1.0
    log_scale = 0.0
    peak = max(1.0, abs(x))
    for _ in range(1, n):
        p_next = x * p_cur - p_prev
        d_next = p_cur + x * d_cur - d_prev
        p_prev, p_cur = p_cur, p_next
        d_prev, d_cur = d_cur, d_next
        big = abs(p_cur)
        peak = max(peak, big)
        if big > 1e100:
            p_prev /= big
            p_cur /= big
            d_prev /= big
            d_cur /= big
            log_scale += math.log(big)

    # roots lie in (-2, 2), where the iterates stay bounded; anything within
    # rounding of the running peak is a root in floating point
    if abs(x) < 2.0 and abs(p_cur) <= 8 * n * np.finfo(float).eps * peak:
        p_cur = 0.0
    sign = 1 if p_cur > 0 else (-1 if p_cur < 0 else 0)
    if sign == 0:
        if logderiv:
            raise VanishingFactorError(f"P_{n}({x!r}) = 0; logarithmic derivative undefined")
        return PolyEval(0.0, math.nan, -math.inf, 0)
    log_abs = log_scale + math.log(abs(p_cur))
    value = sign * math.exp(log_abs) if log_abs < 709.0 else sign * math.inf
    ratio = d_cur / p_cur if logderiv else math.nan
    return PolyEval(value, ratio, log_abs, sign)


def _is_meixner_atom(s: int, x) -> np.ndarray:
    """Mask of points at ``-1/sqrt(s)`` (``s >= 2``).

    There ``Q_n^s = (-1)^n s^(-n/2)`` is the decaying solution of the
    recurrence, which forward iteration cannot follow: rounding grows like ``s^n``.
    """
    x = np.asarray(x)
    if s < 2:
        return np.zeros(x.shape, dtype=bool)
    atom = -1.0 / np.sqrt(np.longdouble(s))
    return np.abs(x - atom) <= 1e-15


def q_poly_eval(s: int, n: int, x: float) -> float:
    """``Q_n^s(x)`` by the three-term recurrence."""
    if n < 0:
        raise ValueError(f"degree must be nonnegative, got {n}")
    if n == 0:
        return 1.0
    if _is_meixner_atom(s, x):
        return (-1.0) ** n * s ** (-n / 2)
    root = math.sqrt(s)
    q_prev, q_cur = 1.0, float(x)
    for _ in range(1, n):
        q_prev, q_cur = q_cur, (x - root) * q_cur - q_prev
    return q_cur


def q_poly_table(s: int, n_max: int, x, dtype=np.float64) -> np.ndarray:
    """All of ``Q_0^s .. Q_{n_max}^s`` at the points ``x``; shape ``(n_max+1,) + x.shape``.

    Computed in ``longdouble`` and returned as ``dtype``.
    """
    x = np.asarray(x, dtype=np.longdouble)
    out = np.empty((n_max + 1,) + x.shape, dtype=np.longdouble)
    out[0] = 1
    if n_max >= 1:
        out[1] = x
    shift = x - np.sqrt(np.longdouble(s))
    for k in range(1, n_max):
        out[k + 1] = shift * out[k] - out[k - 1]
    atom = _is_meixner_atom(s, x)
    if np.any(atom):
        k = np.arange(n_max + 1, dtype=np.longdouble).reshape((-1,) + (1,) * x.ndim)
        exact = (-1.0) ** k * np.longdouble(s) ** (-k / 2)
        out = np.where(atom, exact, out)
    return out.astype(dtype)


def q_ell_eval(ell: Sequence[int], X: float) -> PolyEval:
    """Evaluate ``Q_ell(X) = prod_j P_{l_j}(sqrt X)`` and its log-derivative in ``X``.

    The log-derivative is the sum of the per-factor ratios
    ``P'_{l_j}(sqrt X) / (2 sqrt X P_{l_j}(sqrt X))``.
    """
    if X <= 0:
        raise ValueError(f"X must be positive, got {X}")
    root = math.sqrt(X)
    log_abs = 0.0
    sign = 1
    ratio = 0.0
    for block in ell:
        if block <= 0:
            raise ValueError(f"blocks must be positive integers, got {tuple(ell)}")
        factor = chebyshev_eval(block, root)
        log_abs += factor.log_abs
        sign *= factor.sign
        ratio += factor.logderiv / (2.0 * root)
    value = sign * math.exp(log_abs) if log_abs < 709.0 else sign * math.inf
    return PolyEval(value, ratio, log_abs, sign)
