import math

import numpy as np
import pytest
from scipy.optimize import least_squares

from reflcutoff.measures import eta_cs, nu_s, outer_atom
from reflcutoff.profiles import (
    ProfileTable,
    Region,
    atom_mass_proxy,
    c_grid,
    classify_region,
    cutoff_window_check,
    f_inf,
    finite_n_tv,
    limit_profile,
    profile_point,
    profile_sweep,
    retranslated_eta,
    singular_closed_form,
    singular_threshold,
    tv_distance,
)
from reflcutoff.semigroup import ModelParams


def midpoint_tv(s, c, nodes=1_000_000):
    """Independent oracle: TV(eta_c^s, nu_s) by the midpoint rule in theta, x = sqrt(s) + 2 cos(theta).

    Built straight from the densities; midpoints avoid the arc endpoints, where
    the s = 1 density has an integrable singularity.
    """
    r = math.sqrt(s)
    h = math.pi / nodes
    theta = (np.arange(nodes) + 0.5) * h
    x = r + 2 * np.cos(theta)
    density = np.sqrt(4 - (x - r) ** 2) / (2 * math.pi * (x * r + 1))
    ratio = (math.exp(c) + r) / (math.exp(c) + math.exp(-c) + r - x)
    arc = h * math.fsum(np.abs(ratio - 1) * density * 2 * np.sin(theta))
    atoms = 0.0
    if s > 1:
        loc = -1 / r
        atoms += (1 - 1 / s) * abs((math.exp(c) + r) / (math.exp(c) + math.exp(-c) + r - loc) - 1)
    if c < 0:
        atoms += (math.exp(-c) - math.exp(c)) / (math.exp(-c) + r)
    return 0.5 * arc + 0.5 * atoms


def bisect_threshold(s):
    """Oracle: largest c with the retranslated tilt <= 1 on the whole arc, by bisection on its maximum."""
    r = math.sqrt(s)

    def excess(c):
        cc = c - math.log(r)
        return (math.exp(cc) + r) / (math.exp(cc) + math.exp(-cc) + r - (r + 2)) - 1

    lo, hi = -5.0, -1e-9
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return lo


def test_tv_self_is_zero():
    for s in (1, 3):
        assert tv_distance(nu_s(s), nu_s(s)) == 0.0


def test_tv_large_c_small():
    for s in (1, 2, 9):
        assert tv_distance(eta_cs(s, 10.0), nu_s(s)) < 1e-3


def test_tv_symmetric():
    a, b = eta_cs(2, 0.3), eta_cs(2, -0.4)
    assert tv_distance(a, b) == pytest.approx(tv_distance(b, a), abs=1e-14)


def test_tv_rejects_mixed_s():
    with pytest.raises(ValueError):
        tv_distance(nu_s(1), nu_s(2))


@pytest.mark.parametrize("s,c", [(1, -2.0), (1, 0.5), (2, -0.2), (4, 1.0), (9, 0.0)])
def test_tv_matches_midpoint_oracle(s, c):
    assert limit_profile(s, c) == pytest.approx(midpoint_tv(s, c), abs=1e-6)


def test_profile_example_s1_cm2():
    expected = (math.exp(2) - math.exp(-2)) / (math.exp(2) + 1)
    assert expected == pytest.approx(0.8646647167633873, rel=1e-15)
    p = profile_point(1, -2.0)
    assert p.f_s == pytest.approx(expected, abs=1e-6)
    assert p.f_s == pytest.approx(midpoint_tv(1, -2.0), abs=1e-6)
    assert p.closed_form == pytest.approx(expected, rel=1e-15)
    assert p.region is Region.SINGULAR


def test_f_inf():
    assert f_inf(0.0) == 0.5
    for c in np.linspace(-30, 30, 61):
        assert f_inf(float(c)) == pytest.approx(math.exp(-c) / (1 + math.exp(-c)), rel=1e-15)
    assert f_inf(-800.0) == 1.0
    assert f_inf(800.0) == 0.0


@pytest.mark.parametrize("s", [1, 2, 3, 4, 9, 100])
def test_threshold_matches_bisection(s):
    assert singular_threshold(s) == pytest.approx(bisect_threshold(s), abs=1e-12)


def test_threshold_examples():
    assert singular_threshold(1) == pytest.approx(-math.log(3), rel=1e-15)
    assert singular_threshold(4) == pytest.approx(-math.log(2), rel=1e-15)
    values = [singular_threshold(s) for s in (10, 100, 10_000, 10**8)]
    assert all(v < 0 for v in values)
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] > -1e-3


def test_regions():
    assert classify_region(1, -2.0) is Region.SINGULAR
    assert classify_region(4, -0.5) is Region.MIXED
    assert classify_region(4, 0.8) is Region.ABS_CONT
    assert classify_region(1, 0.0) is Region.ABS_CONT


@pytest.mark.parametrize("s", [1, 2, 4, 9])
def test_closed_form_region(s):
    for c in c_grid(-4, singular_threshold(s), 0.25):
        assert profile_point(s, float(c)).f_s == pytest.approx(singular_closed_form(s, float(c)), abs=1e-6)


def test_retranslated_matches_shift():
    s, c = 4, 0.3
    assert profile_point(s, c).f_s == pytest.approx(limit_profile(s, c - math.log(2)), abs=1e-12)
    assert retranslated_eta(1, 0.7).label == eta_cs(1, 0.7).label


def test_sweep_s1_endpoints_and_monotone():
    table = profile_sweep(1)
    assert len(table.points) == 161
    assert table.f_s[0] > 0.95
    assert table.f_s[-1] < 0.05
    assert np.all(np.diff(table.f_s) <= 1e-9)


@pytest.mark.parametrize("s", [2, 4, 9])
def test_sweep_bounds_and_continuity(s):
    table = profile_sweep(s, -4, 4, 0.1)
    assert np.all((table.f_s >= 0) & (table.f_s <= 1))
    assert np.all(np.diff(table.f_s) <= 1e-9)
    lipschitz = np.max(np.abs(np.diff(table.f_s))) / 0.1
    assert lipschitz < 1.0


def fit_affine(s, r, grid):
    """Best (a, b) with f_r(a c + b) ~ f_s(c) over grid (closed forms below each threshold, quadrature above)."""
    target = np.array([singular_closed_form(s, c) for c in grid])

    def f_r(c):
        if c <= singular_threshold(r):
            return singular_closed_form(r, c)
        return profile_point(r, c, nodes=1024).f_s

    def resid(p):
        return np.array([f_r(p[0] * c + p[1]) for c in grid]) - target

    fit = least_squares(resid, x0=[1.0, 0.0], xtol=1e-14, ftol=1e-14)
    return np.max(np.abs(resid(fit.x)))


def test_profiles_distinct():
    tables = {s: profile_sweep(s, -4, 4, 0.1) for s in (1, 2, 4, 9)}
    for s in tables:
        for r in tables:
            if s < r:
                assert np.max(np.abs(tables[s].f_s - tables[r].f_s)) > 1e-3
                grid = [float(c) for c in c_grid(-4, min(singular_threshold(s), singular_threshold(r)), 0.2)]
                assert fit_affine(s, r, grid) > 1e-4


def test_c_grid():
    assert c_grid(0, 0, 1).tolist() == [0.0]
    assert len(c_grid(-4, 4, 0.05)) == 161
    with pytest.raises(ValueError):
        c_grid(0, 1, 0)
    with pytest.raises(ValueError):
        c_grid(1, 0, 0.1)


def test_csv_layout():
    table = profile_sweep(3, -1.5, 0.0, 0.25)
    lines = table.to_csv().splitlines()
    assert lines[0] == "s,c,f_s,f_inf,closed_form,region"
    assert lines[1].startswith("3,-1.5,")
    assert lines[1].endswith("singular-only")
    assert lines[-1].endswith(",absolutely-continuous") or lines[-1].endswith(",mixed")
    assert isinstance(table, ProfileTable)
    assert table.to_records()[0]["region"] == "singular-only"


def test_finite_n_tv_limits():
    assert finite_n_tv(ModelParams.at_cutoff(50, 1, 10.0)) < 1e-3
    assert finite_n_tv(ModelParams(50, 1, 0.0)) is None
    assert finite_n_tv(ModelParams.at_cutoff(50, 1, -1.0)) is None


def test_finite_n_gap_decreasing_s2():
    s, c = 2, 1.0
    limit = limit_profile(s, c)
    gaps = [abs(finite_n_tv(ModelParams.at_cutoff(N, s, c)) - limit) for N in (20, 50, 100, 200)]
    assert all(b <= a + 1e-3 for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < gaps[0]


@pytest.mark.parametrize("s,c", [(1, -0.7), (2, -1.2), (4, -0.3)])
def test_atom_proxy_recovers_exact_atom(s, c):
    m = np.exp(-c * np.arange(41))
    assert atom_mass_proxy(ModelParams(10, s, 1.0), c, m) == pytest.approx(float(outer_atom(s, c)[1]), rel=1e-6)


def test_window_rows():
    rows = cutoff_window_check([50], 1, 0.3)
    assert [r.side for r in rows] == ["lower", "upper"]
    lower, upper = rows
    assert lower.lower_bound_only and lower.c_eff < 0
    assert not upper.lower_bound_only
    assert 0 <= upper.value < lower.value <= 1
    with pytest.raises(ValueError):
        cutoff_window_check([50], 1, 1.5)
