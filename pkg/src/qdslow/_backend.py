"""Import-time choice between the compiled kernels and the NumPy fallback.

Set ``QDSLOW_BACKEND=python`` to force the fallback even when the extension
is built.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernels

XI, V, LAMBDA, TWO_LEVEL_SAT = (
    _pykernels.XI, _pykernels.V, _pykernels.LAMBDA, _pykernels.TWO_LEVEL_SAT,
)

BACKENDS = {"python": _pykernels}
try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None
else:
    BACKENDS["cython"] = _compiled


def _select():
    wanted = os.environ.get("QDSLOW_BACKEND", "").strip().lower()
    if wanted:
        if wanted not in BACKENDS:
            raise ImportError(
                f"QDSLOW_BACKEND={wanted!r} unavailable; built backends: {sorted(BACKENDS)}"
            )
        return wanted
    return "cython" if _compiled is not None else "python"


NAME = _select()
_impl = BACKENDS[NAME]


def get(name: str | None = None):
    """Backend module by name; the import-time choice when ``name`` is None."""
    return _impl if name is None else BACKENDS[name]


def kernel(kid, params, dp, dc, omega, *, deriv=False, backend=None):
    """Evaluate a kernel on broadcast detuning arrays."""
    dp, dc = np.broadcast_arrays(np.asarray(dp, dtype=float), np.asarray(dc, dtype=float))
    shape = dp.shape
    out = get(backend).kernel_flat(
        kid, np.asarray(params, dtype=float), np.ravel(dp), np.ravel(dc), float(omega), bool(deriv)
    )
    return out.reshape(shape)


def ensemble_average(kid, params, dp, dc, kappa, omega, sd, norm, edges, *,
                     rtol, atol_chi, atol_d, max_panels, deriv, backend=None):
    return get(backend).ensemble_average(
        kid, np.asarray(params, dtype=float), float(dp), float(dc), float(kappa),
        float(omega), float(sd), float(norm), np.asarray(edges, dtype=float),
        float(rtol), float(atol_chi), float(atol_d), int(max_panels), bool(deriv),
    )
