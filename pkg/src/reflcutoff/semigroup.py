"""Brownian motion on H_N^{s+} evaluated on central characters.

The generating functional sends ``chi_w`` (``w`` in ``M`` with blocks ``ell``)
to ``-Q_ell'(N)`` and the Levy process is

    phi_t(chi_w) = Q_ell(N) * exp(-t * Q_ell'(N) / Q_ell(N)).

Because ``Q_ell`` is a product over blocks, ``phi_t`` factorises as
``prod_j g(l_j)`` with ``g(l) = P_l(sqrt N) exp(-t P_l'(sqrt N) / (2 sqrt N P_l(sqrt N)))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .characters import Word, ell_of, enumerate_type_classes
from .polynomials import chebyshev_eval, q_ell_eval


@dataclass(frozen=True)
class ModelParams:
    """Matrix size ``N``, reflection order ``s`` and time ``t``.

    All ``P_l(sqrt N)`` are positive only for ``N >= 4``; for ``N`` in {2, 3}
    some blocks vanish or change sign and evaluation raises
    :class:`~reflcutoff.polynomials.VanishingFactorError` on those blocks.
    """

    N: int
    s: int
    t: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"N must be an integer >= 2, got {self.N}")
        if int(self.s) != self.s or self.s < 1:
            raise ValueError(f"s must be a positive integer, got {self.s}")
        if not self.t >= 0:
            raise ValueError(f"t must be nonnegative, got {self.t}")

    @classmethod
    def at_cutoff(cls, N: int, s: int, c: float) -> "ModelParams":
        """Parameters at ``t = N ln(sqrt(s) N) + c N``."""
        return cls(N, s, cutoff_time(N, s, c))


def cutoff_time(N: int, s: int, c: float) -> float:
    return N * math.log(math.sqrt(s) * N) + c * N


def _log_phi_ell(params: ModelParams, ell: Sequence[int]) -> tuple[float, int]:
    q = q_ell_eval(ell, params.N)
    return q.log_abs - params.t * q.logderiv, q.sign


def generator_L(params: ModelParams, w: Word) -> float:
    """``L(chi_w) = -Q_ell'(N)``."""
    ell = ell_of(w)
    if not ell:
        return 0.0
    q = q_ell_eval(ell, params.N)
    return -q.value * q.logderiv


def phi_ell(params: ModelParams, ell: Sequence[int]) -> float:
    """``phi_t`` on any character with block tuple ``ell``."""
    if not ell:
        return 1.0
    log_abs, sign = _log_phi_ell(params, ell)
    return sign * math.exp(log_abs) if log_abs < 709.0 else sign * math.inf


def phi_char(params: ModelParams, w: Word) -> float:
    return phi_ell(params, ell_of(w))


def phi_xn_bruteforce(params: ModelParams, n: int) -> float:
    """``phi_t(x_n)`` by summing ``phi_t`` over every type class of ``M_n``.

    Terms are combined in log space so ``N^n``-sized values do not overflow.
    """
    if n == 0:
        return 1.0
    s = params.s
    logs, signs = [], []
    for cls in enumerate_type_classes(s, n):
        log_abs, sign = _log_phi_ell(params, cls.ell)
        logs.append(log_abs + math.log(cls.multiplicity))
        signs.append(sign)
    top = max(logs)
    total = math.fsum(sg * math.exp(lg - top) for lg, sg in zip(logs, signs))
    if total == 0:
        return 0.0
    log_result = top + math.log(abs(total)) - 0.5 * n * math.log(s)
    return math.copysign(math.exp(log_result), total)


@lru_cache(maxsize=256)
def _block_table(N: int, t: float, l_max: int) -> tuple[np.ndarray, np.ndarray]:
    """``log|g(l)|`` and ``sign g(l)`` for ``l = 0 .. l_max`` (index 0 unused)."""
    root = math.sqrt(N)
    log_abs = np.zeros(l_max + 1)
    sign = np.ones(l_max + 1)
    for l in range(1, l_max + 1):
        p = chebyshev_eval(l, root)
        log_abs[l] = p.log_abs - t * p.logderiv / (2.0 * root)
        sign[l] = p.sign
    return log_abs, sign


def phi_xn_all(params: ModelParams, n_max: int) -> np.ndarray:
    """``phi_t(x_n)`` for ``n = 0 .. n_max`` by dynamic programming over nonzero slots.

    With ``T[j]`` the weighted sum over slot sets whose last nonzero slot is
    ``j`` (blocks before and including that slot),

        T[j] = (s-1) * (g(2j-1) + sum_{i<j} T[i] g(2(j-i)))
        S_n  = g(2n) + sum_{j<=n} T[j] g(2(n-j)+1)

    and ``phi_t(x_n) = s^(-n/2) S_n``.  Each ``g(l)`` is rescaled by
    ``exp(-alpha l)``; every term of ``S_n`` carries total block length ``2n``,
    so the scale factors out exactly as ``exp(2 n alpha)``.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    out = np.ones(n_max + 1)
    if n_max == 0:
        return out
    s = params.s
    l_max = 2 * n_max + 1
    log_g, sign_g = _block_table(params.N, float(params.t), l_max)
    finite = np.isfinite(log_g[1:])
    alpha = float(np.max(log_g[1:][finite] / np.arange(1, l_max + 1)[finite]))
    ell_idx = np.arange(l_max + 1)
    g = sign_g * np.exp(log_g - alpha * ell_idx)
    g[0] = 0.0

    weight = s - 1
    T = np.zeros(n_max + 1)
    for j in range(1, n_max + 1):
        acc = g[2 * j - 1]
        for i in range(1, j):
            acc += T[i] * g[2 * (j - i)]
        T[j] = weight * acc

    for n in range(1, n_max + 1):
        acc = g[2 * n]
        for j in range(1, n + 1):
            acc += T[j] * g[2 * (n - j) + 1]
        if acc == 0:
            out[n] = 0.0
            continue
        log_result = 2 * n * alpha + math.log(abs(acc)) - 0.5 * n * math.log(s)
        out[n] = math.copysign(math.exp(log_result), acc) if log_result < 709.0 else math.copysign(math.inf, acc)
    return out


def phi_xn(params: ModelParams, n: int) -> float:
    """Fast ``phi_t(x_n)``; same contract as :func:`phi_xn_bruteforce`."""
    return float(phi_xn_all(params, n)[n])


def max_log_phi_by_type(params: ModelParams, n_max: int) -> np.ndarray:
    """``max_{w in M_n} log phi_t(chi_w)`` for ``n = 0 .. n_max``.

    Same slot recursion as :func:`phi_xn_all` in the (max, +) semiring; for
    ``s = 1`` only the single-block class ``(2n)`` exists.  Requires every block
    to be positive (``N >= 4``).
    """
    log_g, sign_g = _block_table(params.N, float(params.t), 2 * n_max + 1)
    if np.any(sign_g[1:] <= 0):
        raise ValueError("some P_l(sqrt N) are nonpositive; log phi undefined")
    out = np.zeros(n_max + 1)
    T = np.full(n_max + 1, -np.inf)
    if params.s > 1:
        for j in range(1, n_max + 1):
            best = log_g[2 * j - 1]
            for i in range(1, j):
                best = max(best, T[i] + log_g[2 * (j - i)])
            T[j] = best
    for n in range(1, n_max + 1):
        best = log_g[2 * n]
        for j in range(1, n + 1):
            best = max(best, T[j] + log_g[2 * (n - j) + 1])
        out[n] = best
    return out
