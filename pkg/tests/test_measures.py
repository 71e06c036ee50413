import json
import math

import numpy as np
import pytest

from reflcutoff.measures import (
    QuadratureWarning,
    SpectralMeasure,
    eta_cs,
    finite_n_measure,
    l2_tail,
    measure_from_moments,
    moment,
    moments,
    nu_s,
    outer_atom,
    tilt_ratio,
)
from reflcutoff.profiles import tv_distance
from reflcutoff.quadrature import arc_density, arc_theta, arc_weight, arc_x, composite_rule, integrate_arc
from reflcutoff.semigroup import ModelParams, phi_xn_bruteforce


def test_nu_one_has_no_atom_and_known_density():
    mu = nu_s(1)
    assert mu.atoms == ()
    x = np.linspace(-0.9, 2.9, 9)
    expected = np.sqrt(4 - (x - 1) ** 2) / (2 * math.pi * (x + 1))
    np.testing.assert_allclose(mu.density(x), expected, rtol=1e-14)
    assert mu.density(np.array([-1.5, 3.5])).tolist() == [0.0, 0.0]


def test_nu_four_atom():
    assert nu_s(4).atoms == ((-0.5, 0.75),)


def test_nu_rejects_bad_s():
    with pytest.raises(ValueError):
        nu_s(0)


def test_arc_weight_pulls_back_density():
    s = 3
    theta = np.linspace(0.05, math.pi - 0.05, 11)
    x = arc_x(s, theta).astype(float)
    # dx = 2 sin(theta) dtheta
    np.testing.assert_allclose(arc_weight(s, theta), arc_density(s, x) * 2 * np.sin(theta), rtol=1e-12)
    np.testing.assert_allclose(arc_theta(s, x), theta, rtol=1e-12)


def test_composite_rule_integrates_polynomials():
    theta, w = composite_rule([0.0, 1.0, math.pi], 512)
    assert math.fsum(w) == pytest.approx(math.pi, rel=1e-15)
    assert math.fsum(w * theta**7) == pytest.approx(math.pi**8 / 8, rel=1e-13)


def test_eta_c_zero_s_one():
    mu = eta_cs(1, 0.0)
    assert mu.atoms == ()
    x = np.linspace(-0.9, 2.9, 7)
    np.testing.assert_allclose(mu.density(x), 2 / (3 - x) * nu_s(1).density(x), rtol=1e-14)


def test_eta_extra_atom_example():
    mu = eta_cs(1, -math.log(2))
    assert len(mu.atoms) == 1
    loc, mass = mu.atoms[0]
    assert float(loc) == pytest.approx(3.5, rel=1e-15)
    assert float(mass) == pytest.approx(0.5, rel=1e-15)
    assert outer_atom(1, 0.3) is None


def test_tilt_ratio_tends_to_one():
    x = np.linspace(-1.0, 3.0, 9)
    np.testing.assert_allclose(tilt_ratio(1, 30.0)(x).astype(float), 1.0, atol=1e-12)


@pytest.mark.parametrize("s", [1, 2, 3, 9])
def test_nu_moments(s):
    mu = nu_s(s)
    assert moment(mu, 0) == pytest.approx(1.0, abs=1e-12)
    for n in range(1, 13):
        assert abs(moment(mu, n)) < 1e-8


@pytest.mark.parametrize("s", [1, 4])
@pytest.mark.parametrize("c", [-1.0, -0.3, 0.0, 0.5, 2.0])
def test_eta_moments(s, c):
    m = moments(eta_cs(s, c), 15)
    np.testing.assert_allclose(m, np.exp(-c * np.arange(16)), rtol=0, atol=1e-8)


def test_single_moment_agrees_with_batch():
    mu = eta_cs(2, 0.4)
    batch = moments(mu, 6)
    for n in range(7):
        assert moment(mu, n) == pytest.approx(batch[n], abs=1e-13)


def test_mass_normalisation():
    for s in range(1, 10):
        for c in np.linspace(-3, 3, 13):
            assert eta_cs(s, float(c)).total_mass() == pytest.approx(1.0, abs=1e-10)
        assert nu_s(s).total_mass() == pytest.approx(1.0, abs=1e-10)


def test_eta_densities_nonnegative():
    theta, _ = composite_rule([0.0, math.pi], 4096)
    for s in (1, 2, 5):
        for c in (0.0, 0.1, 1.0, 4.0):
            assert np.all(eta_cs(s, c).ratio(arc_x(s, theta)) >= -1e-12)


def test_moment_warns_on_coarse_quadrature():
    mu = eta_cs(1, 0.0)
    with pytest.warns(QuadratureWarning):
        moment(mu, 200, nodes=128)


def test_reconstruction_coupling():
    # moments of eta rebuild eta: the two measures must be TV-close
    s, c = 2, 0.5
    eta = eta_cs(s, c)
    m = np.exp(-c * np.arange(41))
    rebuilt, clipped = measure_from_moments(s, m)
    assert clipped < 1e-6
    assert tv_distance(rebuilt, eta) < 1e-3


def test_l2_tail():
    m = 0.5 ** np.arange(20)
    tail, ratio = l2_tail(m)
    assert ratio == pytest.approx(0.25)
    assert tail == pytest.approx(sum(0.25**k for k in range(19, 400)), rel=1e-10)
    assert l2_tail(np.arange(1.0, 5.0))[0] == math.inf


def test_finite_n_convergent_at_cutoff():
    s, c = 1, 1.0
    errs = {}
    for N in (100, 200, 400):
        fin = finite_n_measure(ModelParams.at_cutoff(N, s, c), 40)
        assert not fin.diverged
        assert fin.measure is not None
        errs[N] = np.abs(fin.moments[1:5] - np.exp(-c * np.arange(1, 5)))
    # oracle: direct enumeration agrees with the moment vector
    p = ModelParams.at_cutoff(100, s, c)
    fin = finite_n_measure(p, 6)
    for n in range(4):
        assert fin.moments[n] == pytest.approx(phi_xn_bruteforce(p, n), rel=1e-12)
    # the gap shrinks with N, at rate (log N)/N
    for lo, hi in ((100, 200), (200, 400)):
        assert np.all(errs[hi] < errs[lo])
        rate = errs[hi] * hi / math.log(hi)
        assert np.all(rate < errs[lo] * lo / math.log(lo) * 1.2)


def test_finite_n_diverged_at_time_zero():
    fin = finite_n_measure(ModelParams(20, 2, 0.0), 20)
    assert fin.diverged
    assert fin.measure is None
    assert fin.notes


def test_finite_n_first_moment_is_one():
    fin = finite_n_measure(ModelParams(30, 3, 500.0), 1)
    assert fin.moments[0] == 1.0


def test_finite_n_density_nonnegative():
    theta, _ = composite_rule([0.0, math.pi], 2048)
    for s in (1, 2):
        for N in (20, 100):
            fin = finite_n_measure(ModelParams.at_cutoff(N, s, 0.5), 40)
            assert not fin.diverged
            raw = fin.measure.ratio(arc_x(s, theta))
            assert np.all(raw >= -1e-12)
            assert fin.clipped_mass < 1e-12


def test_n_max_validation():
    with pytest.raises(ValueError):
        finite_n_measure(ModelParams(10, 1, 1.0), 0)


def test_to_json_round_trip():
    mu = eta_cs(2, -0.5)
    data = json.loads(mu.to_json(moments=3, grid=4))
    assert data["s"] == 2
    assert len(data["atoms"]) == 2
    assert data["moments"][2] == pytest.approx(math.exp(1.0), abs=1e-8)
    assert len(data["grid"]) == 4
    assert mu.to_json(moments=3, grid=4) == eta_cs(2, -0.5).to_json(moments=3, grid=4)


def test_integrate_arc_error_estimate_small():
    value, err = integrate_arc(3, lambda x: np.ones(np.shape(x)))
    assert value == pytest.approx(1 - (1 - 1 / 3), abs=1e-14)
    assert err < 1e-14


def test_spectral_measure_without_ratio():
    mu = SpectralMeasure(2, None, ((0.0, 1.0),))
    assert mu.total_mass() == 1.0
    assert moment(mu, 2) == pytest.approx(-1.0)
