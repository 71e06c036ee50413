"""Invariant suites behind ``reflcutoff verify``.

Each suite returns ``{suite, cases, failures, max_error}``; ``max_error`` is
measured in the units of that suite's tolerance (absolute or relative, as
noted per suite).
"""

from __future__ import annotations

import itertools
import math
import time
from typing import Callable

import numpy as np

from .characters import Word, enumerate_type_classes, fuse, fusion_recurrence_defect, words_of_type
from .measures import eta_cs, moments, nu_s
from .polynomials import q_poly_table
from .profiles import f_inf, profile_sweep, singular_closed_form, singular_threshold
from .quadrature import VERIFY_NODES, arc_weight, arc_x, composite_rule
from .semigroup import ModelParams, max_log_phi_by_type, phi_xn_all, phi_xn_bruteforce


def _report(name, cases, failures, max_error, started):
    return {
        "suite": name,
        "cases": cases,
        "failures": failures,
        "max_error": float(max_error),
        "seconds": round(time.perf_counter() - started, 3),
    }


def orthonormality(nodes: int = VERIFY_NODES, n_max: int = 20, s_values=(1, 2, 3, 4, 9), tol: float = 1e-8):
    """Absolute error of the Gram matrix ``int Q_n Q_m dnu_s`` against the identity."""
    started = time.perf_counter()
    cases = failures = 0
    worst = 0.0
    for s in s_values:
        theta, w = composite_rule([0.0, math.pi], nodes)
        table = q_poly_table(s, n_max, arc_x(s, theta))
        gram = (table * (arc_weight(s, theta) * w)) @ table.T
        for loc, mass in nu_s(s).atoms:
            q = q_poly_table(s, n_max, np.array([loc]))[:, 0]
            gram += mass * np.outer(q, q)
        err = np.abs(gram - np.eye(n_max + 1))
        cases += err.size
        failures += int(np.sum(err >= tol))
        worst = max(worst, float(err.max()))
    return _report("orthonormality", cases, failures, worst, started)


def tilt_moments(nodes: int = VERIFY_NODES, n_max: int = 15, s_values=(1, 2, 4, 9),
                 c_values=(-1.0, -0.3, 0.0, 0.5, 2.0), tol: float = 1e-8):
    """Absolute error of ``eta_c^s(Q_n^s)`` against ``e^{-cn}``."""
    started = time.perf_counter()
    cases = failures = 0
    worst = 0.0
    for s, c in itertools.product(s_values, c_values):
        err = np.abs(moments(eta_cs(s, c), n_max, nodes) - np.exp(-c * np.arange(n_max + 1)))
        cases += err.size
        failures += int(np.sum(err >= tol))
        worst = max(worst, float(err.max()))
    return _report("tilt-moments", cases, failures, worst, started)


def fusion_recurrence(n_max: int = 8, s_values=(1, 2, 3)):
    """Exact check of ``x_1 x_n = x_{n+1} + sqrt(s) x_n + x_{n-1}``; error counts leftover terms."""
    started = time.perf_counter()
    cases = failures = 0
    worst = 0
    for s in s_values:
        for n in range(1, n_max + 1):
            defect = fusion_recurrence_defect(s, n)
            cases += 1
            failures += int(len(defect) > 0)
            worst = max(worst, len(defect))
    return _report("fusion-recurrence", cases, failures, worst, started)


def counting(n_max: int = 10, s_max: int = 5):
    started = time.perf_counter()
    cases = failures = 0
    worst = 0
    for s in range(1, s_max + 1):
        for n in range(n_max + 1):
            total = sum(cls.multiplicity for cls in enumerate_type_classes(s, n))
            cases += 1
            failures += int(total != s**n)
            worst = max(worst, abs(total - s**n))
    return _report("counting", cases, failures, worst, started)


def dp_oracle(n_max: int = 12, s_values=(1, 2, 3, 5), N_values=(5, 20, 100), tol: float = 1e-12):
    """Relative gap ``|dp - brute| / (1 + |brute|)`` between the fast and enumerated ``phi_t(x_n)``."""
    started = time.perf_counter()
    cases = failures = 0
    worst = 0.0
    for s, N in itertools.product(s_values, N_values):
        for t in (0.0, 1.0, N * math.log(N)):
            params = ModelParams(N, s, t)
            fast = phi_xn_all(params, n_max)
            for n in range(n_max + 1):
                brute = phi_xn_bruteforce(params, n)
                err = abs(fast[n] - brute) / (1.0 + abs(brute))
                cases += 1
                failures += int(not err <= tol)
                worst = max(worst, err)
    return _report("dp-oracle", cases, failures, worst, started)


def decay_bound(n_max: int = 15, s_values=(1, 2, 3), N_values=(10, 50, 200), c_values=(0.5, 1.0)):
    """``phi_t(chi_w)^2 <= e^{-2nc} / s^n`` at ``t = N ln(sqrt(s) N) + cN``; error is the worst log-excess (<= 0 passes)."""
    started = time.perf_counter()
    cases = failures = 0
    worst = -math.inf
    for s, N, c in itertools.product(s_values, N_values, c_values):
        params = ModelParams.at_cutoff(N, s, c)
        top = max_log_phi_by_type(params, n_max)
        for n in range(1, n_max + 1):
            excess = 2 * top[n] - (-2 * n * c - n * math.log(s))
            cases += 1
            failures += int(excess > 1e-12)
            worst = max(worst, excess)
    return _report("decay-bound", cases, failures, worst, started)


def closed_form(nodes: int = VERIFY_NODES, s_values=(1, 2, 4, 9), tol: float = 1e-6):
    """``|f_s(c) - (e^-c - e^c/s)/(e^-c + 1)|`` on the default grid below ``-ln(1 + 2/sqrt s)``."""
    started = time.perf_counter()
    cases = failures = 0
    worst = 0.0
    for s in s_values:
        table = profile_sweep(s, -4.0, singular_threshold(s), 0.05, nodes)
        for p in table.points:
            err = abs(p.f_s - singular_closed_form(s, p.c))
            cases += 1
            failures += int(err >= tol)
            worst = max(worst, err)
    return _report("closed-form", cases, failures, worst, started)


def f_inf_curve():
    started = time.perf_counter()
    grid = np.round(np.arange(-4.0, 4.0 + 1e-9, 0.05), 10)
    errs = [abs(f_inf(c) - math.exp(-c) / (1 + math.exp(-c))) for c in grid]
    errs.append(abs(f_inf(0.0) - 0.5))
    worst = max(errs)
    return _report("f-inf", len(errs), sum(e > 1e-15 for e in errs), worst, started)


def involution(max_type: int = 2, s_values=(1, 2, 3)):
    """``(chi_u chi_v)^* = chi_{v*} chi_{u*}`` over all words of type <= ``max_type``."""
    started = time.perf_counter()
    cases = failures = 0
    for s in s_values:
        words = [w for n in range(max_type + 1) for w in set(words_of_type(s, n))]
        words += [Word.from_blocks([("a", 1), ("z", r)], s) for r in range(1, s)]
        for u, v in itertools.product(words, repeat=2):
            cases += 1
            failures += int(fuse(u, v).star() != fuse(v.star(), u.star()))
    return _report("involution", cases, failures, failures, started)


SUITES: dict[str, Callable[..., dict]] = {
    "orthonormality": orthonormality,
    "tilt-moments": tilt_moments,
    "fusion-recurrence": fusion_recurrence,
    "counting": counting,
    "dp-oracle": dp_oracle,
    "decay-bound": decay_bound,
    "closed-form": closed_form,
    "f-inf": f_inf_curve,
    "involution": involution,
}

_NODE_SUITES = {"orthonormality", "tilt-moments", "closed-form"}


def run(suite: str = "all", nodes: int = VERIFY_NODES) -> list[dict]:
    names = list(SUITES) if suite == "all" else [suite]
    reports = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or 'all'")
        fn = SUITES[name]
        reports.append(fn(nodes=nodes) if name in _NODE_SUITES else fn())
    return reports
