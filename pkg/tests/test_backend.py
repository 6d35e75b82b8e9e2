import os
import subprocess
import sys

import numpy as np
import pytest

from qdslow import _backend
from qdslow.ensemble import EnsembleSpec, average_chi
from qdslow.materials import REFERENCE, scheme_params
from qdslow.propagation import coupling_alpha
from qdslow.scenarios import variant_params

compiled = pytest.mark.skipif("cython" not in _backend.BACKENDS, reason="extension not built")
SPEC = EnsembleSpec("gaussian", REFERENCE.sigma_ih)


@compiled
@pytest.mark.parametrize("config", ["Xi", "V", "Lambda", "FssLambda"])
def test_kernels_agree(config):
    p = scheme_params(config)
    rng = np.random.default_rng(1)
    dp, dc = rng.normal(0, 30 * p.g13, (2, 500))
    for deriv in (False, True):
        a = _backend.kernel(p.kernel_id, p.kernel_params(), dp, dc, 7 * p.G13, deriv=deriv,
                            backend="python")
        b = _backend.kernel(p.kernel_id, p.kernel_params(), dp, dc, 7 * p.G13, deriv=deriv,
                            backend="cython")
        np.testing.assert_allclose(b, a, rtol=1e-12, atol=1e-14 * np.abs(a).max())


@compiled
@pytest.mark.parametrize("config", ["Xi", "V", "Lambda"])
def test_ensemble_agrees(config):
    p = scheme_params(config)
    for om in (0.0, 10 * p.G13, 300 * p.G13):
        a = average_chi(SPEC, p, 2 * p.g13, -p.g13, om, backend="python")
        b = average_chi(SPEC, p, 2 * p.g13, -p.g13, om, backend="cython")
        assert abs(a.chi - b.chi) <= 1e-12 * abs(a.chi)
        # the derivative integrand cancels strongly; summation order shows at ~1e-11
        assert abs(a.dchi - b.dchi) <= 1e-9 * abs(a.dchi)
        assert a.n_evals == b.n_evals


@compiled
def test_saturated_kernel_agrees():
    p = scheme_params("V")
    a = coupling_alpha(p, SPEC, 1e3, backend="python")
    b = coupling_alpha(p, SPEC, 1e3, backend="cython")
    assert a == pytest.approx(b, rel=1e-12)


def _backend_name(value):
    env = dict(os.environ, QDSLOW_BACKEND=value)
    return subprocess.run([sys.executable, "-c", "import qdslow; print(qdslow.BACKEND)"],
                          env=env, capture_output=True, text=True)


def test_forced_python_backend():
    r = _backend_name("python")
    assert r.returncode == 0 and r.stdout.strip() == "python"


def test_unknown_backend_fails_loudly():
    r = _backend_name("fortran")
    assert r.returncode != 0 and "QDSLOW_BACKEND" in r.stderr


@pytest.mark.skipif(bool(os.environ.get("QDSLOW_BACKEND")), reason="backend forced")
def test_default_prefers_compiled():
    assert _backend.NAME == ("cython" if "cython" in _backend.BACKENDS else "python")


@pytest.mark.filterwarnings("ignore:invalid value:RuntimeWarning")
@pytest.mark.parametrize("name", sorted(_backend.BACKENDS))
def test_non_finite_integrand_fails_fast(name):
    params = [np.nan] * 6 + [0.0]
    res = _backend.ensemble_average(0, params, 0.0, 0.0, 0.1, 1e9, 1e12, 1.0, [-1e12, 1e12],
                                    rtol=1e-6, atol_chi=1e-20, atol_d=1e-30, max_panels=2000,
                                    deriv=True, backend=name)
    assert res[3] is False or res[3] == 0
    assert res[2] == 15 and res[6] == np.inf


@pytest.mark.parametrize("name", sorted(_backend.BACKENDS))
def test_uncoupled_limit_without_two_photon_dephasing(name):
    # a = 0 exactly: the closed form is 0/0 but the bare line is well defined
    p = variant_params("FssLambda", REFERENCE)
    assert p.g12 == 0
    got = _backend.kernel(p.kernel_id, p.kernel_params(), [0.3 * p.g13], [0.3 * p.g13], 0.0,
                          backend=name)[0]
    assert got == pytest.approx(-1 / (0.3 * p.g13 + 1j * p.g13), rel=1e-14)
    der = _backend.kernel(p.kernel_id, p.kernel_params(), [0.0], [0.0], 0.0, deriv=True,
                          backend=name)[0]
    assert der == pytest.approx(1 / (1j * p.g13) ** 2, rel=1e-14)
