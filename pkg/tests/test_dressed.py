import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize_scalar

from qdslow.dressed import (
    absorbing_shift_exists,
    dressed_eigenvalues,
    quadrature_breakpoints,
    resonance_asymptotes,
)
from qdslow.materials import scheme_params
from qdslow.qdstructure import Config
from qdslow.susceptibility import chi


def test_symmetric_splitting():
    d = dressed_eigenvalues(0.0, 3.0)
    assert (d.lam_plus, d.lam_minus) == (3.0, -3.0)


def test_bare_states():
    d = dressed_eigenvalues(2.0, 0.0)
    assert d.lam_plus == 0.0 and d.lam_minus == -2.0


def test_far_detuned_shift():
    om = 1.0
    d = dressed_eigenvalues(1e6 * om, om)
    # Taylor: lam_plus = Omega^2/D2 - Omega^4/D2^3
    assert d.lam_plus == pytest.approx(om**2 / 1e6, rel=1e-6)


def test_bare_level_reported():
    assert dressed_eigenvalues(1.0, 1.0, delta1=0.5).lam1 == -0.5


@given(st.floats(-1e12, 1e12), st.floats(1e-3, 1e12))
def test_sum_difference_product(d2, om):
    d = dressed_eigenvalues(d2, om)
    scale = abs(d2) + 2 * om + 1e-300
    assert d.lam_plus >= d.lam_minus
    assert d.lam_plus + d.lam_minus == pytest.approx(-d2, abs=1e-12 * scale)
    assert d.lam_plus - d.lam_minus == pytest.approx(math.hypot(2 * om, d2), rel=1e-12)
    assert d.lam_plus * d.lam_minus == pytest.approx(-om * om, rel=1e-10, abs=1e-300)


def test_v_no_absorbing_shift():
    assert absorbing_shift_exists(Config.V, 1.0770821555371864, 1e9) is None


def test_lambda_absorbing_shifts():
    roots = absorbing_shift_exists(Config.LAMBDA, 0.0715, 1e9)
    assert roots is not None and roots[0] == -roots[1] < 0


@pytest.mark.parametrize("om", [1e-3, 1.0, 1e12])
def test_v_unit_kappa_never_absorbs(om):
    assert absorbing_shift_exists(Config.V, 1.0, om) is None


def test_absorbing_shift_needs_field():
    with pytest.raises(ValueError):
        absorbing_shift_exists(Config.XI, 0.1, 0.0)


@pytest.mark.parametrize("config", ["Xi", "Lambda"])
def test_crossing_height_limit(config):
    # kappa = 0: each dressed state carries half the strength with linewidth
    # (g13 + g12) / 2, so the height is 1 / (1 + g12/g13) of the bare peak
    p = scheme_params(config, kappa=0.0)
    om = 1e4 * p.g13
    peak = p.prefactor / p.g13
    for root in absorbing_shift_exists(p.topology, p.kappa, om):
        got = chi(0.0, 0.0, root, p, om).imag / peak
        assert got == pytest.approx(1 / (1 + p.g12 / p.g13), rel=1e-4)


@pytest.mark.parametrize("config", ["Xi", "Lambda"])
def test_absorbing_roots_absorb(config):
    p = scheme_params(config)
    om = 50 * p.g13
    peak = p.prefactor / p.g13
    for root in absorbing_shift_exists(p.topology, p.kappa, om):
        assert chi(0.0, 0.0, root, p, om).imag > 0.45 * peak


def test_v_crossings_population_limited():
    # the crossing dressed state of a V system is mostly the empty level
    p = scheme_params("AltV")
    om = 50 * p.g13
    peak = p.prefactor / p.g13
    for root in absorbing_shift_exists(p.topology, p.kappa, om):
        assert 0 < chi(0.0, 0.0, root, p, om).imag < 1e-2 * peak


def test_asymptote_slopes():
    assert resonance_asymptotes(Config.XI, 0.077).secondary_slope == pytest.approx(0.9285, abs=1e-4)
    v = resonance_asymptotes(Config.V, 1.077)
    assert v.secondary_slope == pytest.approx(-12.99, abs=0.01)
    z = resonance_asymptotes(Config.LAMBDA, 0.0)
    assert z.primary_slope == z.secondary_slope == 1.0


def test_vertical_asymptote_flag():
    assert resonance_asymptotes(Config.V, 1.0).vertical
    assert not resonance_asymptotes(Config.XI, 1.0).vertical


@pytest.mark.parametrize("topology,sign", [(Config.XI, 1), (Config.V, -1), (Config.LAMBDA, -1)])
def test_bare_breakpoints(topology, sign):
    kappa, dp = 0.3, 7.0
    got = quadrature_breakpoints(dp, 0.0, kappa, 0.0, topology, dedup=1e-9)
    np.testing.assert_allclose(got, sorted([dp, dp / (1 + sign * kappa)]), rtol=1e-14)


def test_v_above_unit_kappa_centre():
    assert quadrature_breakpoints(0.0, 0.0, 1.077, 1e9, Config.V) == [0.0]


def test_breakpoints_sorted_and_deduplicated():
    pts = quadrature_breakpoints(1e9, -2e9, 0.4, 3e9, Config.LAMBDA, dedup=1e8)
    assert all(b - a > 1e8 for a, b in zip(pts, pts[1:]))


def test_breakpoints_at_absorption_maxima():
    # crossings are transversal here; near kappa = 1 (V, Lambda) the resonance
    # grazes the probe line and the maximum spreads over many linewidths
    rng = np.random.default_rng(5)
    for _ in range(20):
        cfg = rng.choice(["Xi", "Lambda", "AltV"])
        p = scheme_params(cfg, kappa=rng.uniform(0, 0.5) if cfg == "AltV" else None)
        g = p.g13
        om, dp, dc = rng.uniform(5, 50) * g, *rng.uniform(-20, 20, 2) * g
        bps = quadrature_breakpoints(dp, dc, p.kappa, om, p.topology)
        width = 200 * g + 5 * max(abs(b) for b in bps)
        x = np.linspace(-width, width, 200001)
        y = np.abs(chi(dp, dc, x, p, om).imag)
        idx = np.nonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]) & (y[1:-1] > 1e-2 * y.max()))[0] + 1
        assert idx.size
        for k in idx:
            res = minimize_scalar(lambda s: -abs(chi(dp, dc, s, p, om).imag),
                                  bracket=(x[k - 1], x[k], x[k + 1]), method="golden")
            assert min(abs(res.x - b) for b in bps) < g
