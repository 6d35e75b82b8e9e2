"""Shared oracles for the test suite.

``dm_chi`` solves the three-level Liouvillian directly (first order in a
tiny probe), independent of every closed form in the package.
``closed_form_chi`` is a separate transcription of the closed forms written
with the coupling strength entering as ``(2 Omega)^2``; it exists so the
brute-force ensemble oracle does not reuse package code.
"""

from __future__ import annotations

import sys

import numpy as np
import pytest

from qdslow.materials import REFERENCE, scheme_params
from qdslow.qdstructure import Config

PROBE = 1e-7


def dm_steady(topology, dp, dc, omega, G13, G23, G12, g13, g23, g12, probe=PROBE):
    """Steady-state density matrix; probe couples 1-3, coupling 2-3."""
    if topology == "V":
        d1, d2 = dp, dc
        decays = [(0, 2, G13), (1, 2, G23), (1, 0, G12)]
    elif topology == "Xi":
        d1, d2 = -dp, dc
        decays = [(2, 0, G13), (1, 2, G23), (1, 0, G12)]
    else:
        d1, d2 = -dp, -dc
        decays = [(2, 0, G13), (2, 1, G23), (1, 0, G12)]
    h = -np.array([[d1, 0, probe], [0, d2, omega], [probe, omega, 0]], dtype=complex)
    deph = {(0, 2): g13, (2, 0): g13, (1, 2): g23, (2, 1): g23, (0, 1): g12, (1, 0): g12}
    idx = lambda i, j: 3 * i + j  # noqa: E731
    L = np.zeros((9, 9), dtype=complex)
    for i in range(3):
        for j in range(3):
            r = idx(i, j)
            for k in range(3):
                L[r, idx(k, j)] += -1j * h[i, k]
                L[r, idx(i, k)] -= -1j * h[k, j]
            if i != j:
                L[r, r] -= deph[(i, j)]
    for f, t, g in decays:
        L[idx(f, f), idx(f, f)] -= g
        L[idx(t, t), idx(f, f)] += g
    L[0, :] = 0
    L[0, [0, 4, 8]] = 1
    b = np.zeros(9, dtype=complex)
    b[0] = 1
    return np.linalg.solve(L, b).reshape(3, 3)


def dm_chi(topology, dp, dc, omega, G13, G23, G12, g13, g23, g12):
    """Susceptibility in units of the two-level prefactor."""
    rho = dm_steady(topology, dp, dc, omega, G13, G23, G12, g13, g23, g12)
    coh = rho[0, 2] if topology == "V" else rho[2, 0]
    return coh / PROBE


def closed_form_chi(topology, dp, dc, omega, G13, G23, G12, g13, g23, g12):
    """Closed forms, vectorized, in units of the two-level prefactor."""
    W = (2.0 * omega) ** 2
    if topology == "Xi":
        d = dp + dc + 1j * g12
        return 2 * (2 * d / (W - 4 * d * (dp + 1j * g13)))
    if topology == "Lambda":
        d = dp - dc + 1j * g12
        return 2 * (2 * d / (W - 4 * d * (dp + 1j * g13)))
    d = dp - dc + 1j * g12
    G1, G2 = G13 - G12, G23 + G12
    zeta = 2 * G13 * G2 * (dc**2 + g23**2)
    num = (g23 * (1j * G13 * G2 - 2 * G1 * (dp + 1j * g12)) + dc * (G13 * G2 + 2 * g23 * G1)) * W \
        - 2 * d * zeta
    den = (4 * d * (1j * g13 + dp) - W) * (zeta + g23 * (2 * G13 + G12) * W)
    return 2 * num / den


def rates(p):
    return p.G13, p.G23, p.G12, p.g13, p.g23, p.g12


@pytest.fixture
def reference_params():
    return {c: scheme_params(c) for c in (Config.XI, Config.V, Config.LAMBDA)}


@pytest.fixture
def material():
    return REFERENCE


def dm_two_level(detuning, omega, gamma, recovery):
    """Saturated two-level coherence per unit Rabi frequency.

    Reuses the three-level solver with the spectator level drained so that
    it stays empty.
    """
    field = omega if omega > 0 else PROBE
    rho = dm_steady("Xi", detuning, 0.0, 0.0, recovery, 0.0, 1e12, gamma, gamma, gamma,
                    probe=field)
    return rho[2, 0] / field


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    report = getattr(mod, "REPORT", None)
    if report:
        terminalreporter.section("acceptance criteria")
        for k in sorted(report):
            terminalreporter.write_line(report[k])
