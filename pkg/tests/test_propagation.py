import math

import numpy as np
import pytest
from scipy.special import voigt_profile

from qdslow.ensemble import EnsembleSpec
from qdslow.materials import REFERENCE, scheme_params
from qdslow.propagation import (
    PropagationGrid,
    ProbeColumn,
    coupling_alpha,
    coupling_recovery_rate,
    delay_at_fixed_transmission,
    delay_transmission_map,
    probe_metrics_along_z,
    propagate_coupling,
)
from qdslow.units import C_LIGHT, EPS0, HBAR, intensity_to_rabi

SPEC = EnsembleSpec("gaussian", REFERENCE.sigma_ih)
N_BG = REFERENCE.n_bg
V = scheme_params("V")


def voigt_alpha(p, intensity, dc=0.0):
    """Saturated Lorentzian of width sqrt(g^2 + 4 Om^2 g / G) folded with kappa * f."""
    om = intensity_to_rabi(intensity, p.mu23, N_BG)
    g, geff = p.g23, coupling_recovery_rate(p)
    w = math.sqrt(g * g + 4 * om * om * g / geff)
    chi_im = g / w * math.pi * voigt_profile(dc, abs(p.kappa) * SPEC.sd, w)
    pref = p.conf * p.mu23**2 / (p.v_qd * EPS0 * HBAR)
    return p.omega_c * pref * chi_im / (N_BG * C_LIGHT)


def test_grid_validation():
    assert PropagationGrid(1e-3, 5).z[-1] == 1e-3
    for args in ((0.0, 5), (1e-3, 1)):
        with pytest.raises(ValueError):
            PropagationGrid(*args)


def test_recovery_rate():
    p = V.evolve(G12=0.0)
    assert coupling_recovery_rate(p) == p.G23
    assert coupling_recovery_rate(V) == pytest.approx(V.G23 + 1 / (1 / V.G12 + 1 / V.G13))


@pytest.mark.parametrize("intensity", [0.0, 1e2, 1e4, 1e6])
@pytest.mark.parametrize("dc_rel", [0.0, 0.5])
def test_coupling_alpha_voigt(intensity, dc_rel):
    dc = dc_rel * SPEC.fwhm
    got = coupling_alpha(V, SPEC, intensity, dc, N_BG, rtol=1e-9)
    assert got == pytest.approx(voigt_alpha(V, intensity, dc), rel=1e-6)


def test_zero_dipole_lossless():
    z = np.linspace(0, 5e-3, 11)
    np.testing.assert_array_equal(propagate_coupling(1e3, z, V.evolve(mu23=0.0), SPEC), 1e3)


@pytest.mark.parametrize("config", ["Xi", "Lambda"])
def test_coupling_not_absorbed(config):
    z = np.linspace(0, 5e-3, 11)
    np.testing.assert_array_equal(propagate_coupling(1e3, z, scheme_params(config), SPEC), 1e3)


def test_beer_lambert():
    i0 = 1e-8
    z = np.linspace(0, 2e-3, 21)
    a0 = coupling_alpha(V, SPEC, 0.0, 0.0, N_BG)
    got = propagate_coupling(i0, z, V, SPEC)
    np.testing.assert_allclose(got, i0 * np.exp(-a0 * z), rtol=1e-6)


def test_saturated_linear_decay():
    i0 = 1e10
    z = np.linspace(0, 5e-3, 6)
    got = propagate_coupling(i0, z, V, SPEC)
    slope = np.diff(got) / np.diff(z)
    assert np.all(slope < 0)
    assert np.ptp(slope) < 1e-2 * abs(slope.mean())


def test_negative_intensity_rejected():
    with pytest.raises(ValueError):
        propagate_coupling(-1.0, np.linspace(0, 1e-3, 3), V, SPEC)


def test_constant_field_average_is_pointwise():
    p = scheme_params("Xi")
    z = np.linspace(0, 1e-3, 5)
    recs = probe_metrics_along_z(z, 1e5, p, SPEC)
    assert all(r.avg_alpha == recs[0].avg_alpha for r in recs[1:])
    assert all(r.avg_n_g == pytest.approx(recs[0].avg_n_g, rel=1e-14) for r in recs)


def test_no_probe_response():
    p = V.evolve(mu13=0.0)
    recs = probe_metrics_along_z(np.linspace(0, 1e-3, 5), 1e3, p, SPEC)
    assert all(r.delay == 0 and r.transmission_db == 0 for r in recs)


def test_delay_identity_and_monotone_transmission():
    z = np.linspace(0, 3e-3, 61)
    ic = propagate_coupling(1e3, z, V, SPEC)
    recs = probe_metrics_along_z(z, ic, V, SPEC)
    for r in recs:
        assert r.delay == r.z / C_LIGHT * (r.avg_n_g - N_BG)
        assert r.transmission_db <= 0
    t = [r.transmission_db for r in recs]
    assert all(b <= a for a, b in zip(t, t[1:]))


def test_prefix_additivity():
    z = np.linspace(0, 3e-3, 61)
    ic = propagate_coupling(1e3, z, V, SPEC)
    recs = probe_metrics_along_z(z, ic, V, SPEC)
    col = ProbeColumn(V, SPEC)
    alpha = np.array([V.omega_p * col.point(float(i)).chi_im / (2 * N_BG * C_LIGHT) for i in ic])
    for k1, k2 in ((10, 30), (0, 60), (45, 46)):
        lhs = recs[k2].avg_alpha * z[k2]
        rhs = recs[k1].avg_alpha * z[k1] + np.trapezoid(alpha[k1:k2 + 1], z[k1:k2 + 1])
        assert lhs == pytest.approx(rhs, rel=1e-9)


def test_linear_delay_without_broadening():
    p = scheme_params("Xi")
    z = np.linspace(0, 2e-3, 9)
    recs = probe_metrics_along_z(z, 1e6, p, EnsembleSpec.delta())
    rate = recs[1].delay / z[1]
    for r in recs[1:]:
        assert r.delay == pytest.approx(rate * r.z, rel=1e-12)


def test_single_cell_map():
    z = np.array([0.0, 1e-3])
    m = delay_transmission_map([1e3], z, V, SPEC)
    ic = propagate_coupling(1e3, z, V, SPEC)
    assert m[0] == probe_metrics_along_z(z, ic, V, SPEC)


def test_map_records_cell_errors():
    m = delay_transmission_map([1e3], np.array([0.0, 1e-3]), V.evolve(mu23=0.0), SPEC)
    assert all(r.error for r in m[0])


def test_v_delay_nanoseconds_at_millimetres():
    pt = delay_at_fixed_transmission(-10.0, 1e4, V, SPEC)
    assert pt.reachable and pt.transmission_db == pytest.approx(-10.0, abs=0.01)
    assert 1e-4 < pt.z_star < 1e-2
    assert 0.1e-9 < pt.delay < 10e-9


def test_unreachable_without_absorption():
    pt = delay_at_fixed_transmission(-10.0, 1e3, V.evolve(mu13=0.0), SPEC, z_limit=1e-2)
    assert not pt.reachable and math.isnan(pt.z_star) and pt.error


def test_target_must_be_negative():
    with pytest.raises(ValueError):
        delay_at_fixed_transmission(0.0, 1e3, V, SPEC)


@pytest.mark.slow
def test_grid_refinement():
    a = delay_at_fixed_transmission(-10.0, 1e3, V, SPEC, n_z=101)
    b = delay_at_fixed_transmission(-10.0, 1e3, V, SPEC, n_z=201)
    assert abs(a.delay - b.delay) < 5e-3 * abs(b.delay)


@pytest.mark.slow
def test_absorption_inverse_rabi_scaling():
    pts = [delay_at_fixed_transmission(-10.0, i, V, SPEC) for i in (1e5, 1e6)]
    prod = [10 / (20 * math.log10(math.e) * q.z_star) * intensity_to_rabi(q.intensity, V.mu23)
            for q in pts]
    assert 0.5 < prod[1] / prod[0] < 2
