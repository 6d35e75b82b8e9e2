import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from qdslow.ensemble import EnsembleSpec, average_chi
from qdslow.materials import REFERENCE, scheme_params
from qdslow.optics import (
    DerivativeError,
    absorption_coefficient,
    group_index,
    group_index_from_derivative,
    normalized_absorption,
    optical_metrics,
    refractive_index,
)
from qdslow.scenarios import decay_case_params
from qdslow.susceptibility import chi, dchi_ddp
from qdslow.units import C_LIGHT, intensity_to_rabi

N_BG = 3.5
W0 = 1.5e15
GAMMA = 2e9
SPEC = EnsembleSpec("gaussian", REFERENCE.sigma_ih)


def lorentzian(w, a=1e-3):
    return a * GAMMA / (W0 - w - 1j * GAMMA)


def lorentzian_group_index(w, a=1e-3):
    c = lorentzian(w, a)
    dc = a * GAMMA / (W0 - w - 1j * GAMMA) ** 2
    root = np.sqrt(N_BG**2 + c)
    return root.real + w * (dc / (2 * root)).real


def test_no_susceptibility():
    assert group_index(lambda w: 0j, W0, N_BG) == pytest.approx(N_BG, rel=1e-15)
    assert group_index_from_derivative(0j, 0j, W0, N_BG) == N_BG
    assert refractive_index(0j, N_BG) == N_BG


@pytest.mark.parametrize("offset", [-3.0, -0.5, 0.0, 0.7, 5.0])
def test_lorentzian_group_index(offset):
    w = W0 + offset * GAMMA
    got = group_index(lorentzian, w, N_BG, step=GAMMA / 100)
    assert got == pytest.approx(lorentzian_group_index(w), rel=1e-6)


def test_derivative_form_matches_lorentzian():
    w = W0 + 0.3 * GAMMA
    dc = 1e-3 * GAMMA / (W0 - w - 1j * GAMMA) ** 2
    assert group_index_from_derivative(lorentzian(w), dc, w, N_BG) == pytest.approx(
        lorentzian_group_index(w), rel=1e-14)


def test_discontinuous_response_rejected():
    with pytest.raises(DerivativeError):
        group_index(lambda w: 1e-3 * np.sign(w - W0), W0, N_BG, step=GAMMA)


def test_absorption_examples():
    assert absorption_coefficient(0.0, W0) == 0.0
    assert absorption_coefficient(2e-3, W0) == pytest.approx(2 * absorption_coefficient(1e-3, W0))


def test_two_level_peak_absorption():
    p = scheme_params("Xi")
    w = p.omega_p
    alpha = absorption_coefficient(chi(0.0, 0.0, 0.0, p, 0.0).imag, w, N_BG)
    assert alpha == pytest.approx(w * p.prefactor / (p.g13 * 2 * N_BG * C_LIGHT), rel=1e-14)


def test_normalized_absorption():
    assert normalized_absorption(0.3, 0.3) == 1.0
    with pytest.raises(ZeroDivisionError):
        normalized_absorption(0.3, 0.0)


def test_eit_limit_single_dot():
    p = scheme_params("Xi")
    a = [normalized_absorption(chi(0.0, 0.0, 0.0, p, om).imag, chi(0.0, 0.0, 0.0, p, 0.0).imag)
         for om in np.array([1e2, 1e3, 1e4]) * p.g13]
    assert a[0] > a[1] > a[2] and a[2] < 1e-7


def test_gain_with_fast_intraband_decay():
    p = decay_case_params("c")
    base = average_chi(SPEC, p, 0.0, 0.0, 0.0).chi
    got = average_chi(SPEC, p, 0.0, 0.0, intensity_to_rabi(1e5, p.mu23)).chi
    assert optical_metrics(got, 0j, p.omega_p, base).A_norm < 0


def test_square_root_matches_linearized():
    p = scheme_params("Xi")
    r = average_chi(SPEC, p, 0.0, 0.0, 20 * p.G13)
    w = p.omega_p
    lin = (r.chi.real + w * r.dchi.real) / (2 * N_BG)
    full = group_index_from_derivative(r.chi, r.dchi, w, N_BG) - N_BG
    assert abs(lin - full) <= 1e-4 * abs(full)


def test_kramers_kronig_alignment():
    p = scheme_params("Lambda")
    dp = np.linspace(-5, 5, 100001) * p.g13
    c = chi(dp, 0.0, 0.0, p, 0.0)
    peak = dp[np.argmax(c.imag)]
    zero = dp[np.argmin(np.abs(c.real))]
    assert abs(peak - zero) < p.g13 / 10


@settings(max_examples=200)
@given(st.sampled_from(["Xi", "V", "Lambda"]), st.floats(0, 30), st.floats(-60, 60))
def test_normal_dispersion_slows(config, om_rel, dp_rel):
    p = scheme_params(config)
    om, dp = om_rel * p.g13, dp_rel * p.g13
    c, d = chi(dp, 0.0, 0.0, p, om), dchi_ddp(dp, 0.0, 0.0, p, om)
    assume(c.real >= 0 and d.real >= 0)
    assert group_index_from_derivative(c, d, p.omega_p, N_BG) >= N_BG


def test_single_dot_deep_slow_light():
    p = scheme_params("Xi")
    oms = np.logspace(-1, 3, 200) * p.g13
    s = [group_index_from_derivative(chi(0.0, 0.0, 0.0, p, om), dchi_ddp(0.0, 0.0, 0.0, p, om),
                                     p.omega_p, N_BG) / N_BG for om in oms]
    assert max(s) > 1e2


def test_metrics_bundle():
    p = scheme_params("V")
    c, d = chi(0.0, 0.0, 0.0, p, 3 * p.G13), dchi_ddp(0.0, 0.0, 0.0, p, 3 * p.G13)
    m = optical_metrics(c, d, p.omega_p, c, N_BG)
    assert m.A_norm == 1.0
    assert m.S == m.n_g / N_BG
    assert m.n > 0
