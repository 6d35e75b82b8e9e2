"""First-order probe susceptibility of a single quantum-dot subensemble.

Levels are labelled so that the probe drives 1<->3 and the coupling field
drives 2<->3 in every topology.  ``Omega`` everywhere is the off-diagonal
Hamiltonian element ``mu23 E_c / (2 hbar)``.

Results are dimensionless and normalized so that with the coupling field off
every topology reduces to ``chi = -pref / (dp + i g13)`` with
``pref = conf * mu13^2 / (V eps0 hbar)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .qdstructure import Config
from .units import EPS0, HBAR

_KERNEL_ID = {Config.XI: _backend.XI, Config.V: _backend.V, Config.LAMBDA: _backend.LAMBDA}


class SingularityError(ArithmeticError):
    """A susceptibility denominator vanished exactly."""


@dataclass(frozen=True)
class SchemeParams:
    """One excitation configuration.

    Rates are population decay rates ``G13, G23, G12`` and coherence
    dephasing rates ``g13, g23, g12``, all in rad/s.  Energies ``omega_p``
    and ``omega_c`` are the optical angular frequencies of the probe and
    coupling transitions.  ``lambda_verbatim`` switches the Lambda kernel to
    the numerator ``delta_- + i g12 / 2``.
    """

    config: Config
    mu13: float
    mu23: float
    G13: float
    G23: float
    G12: float
    g13: float
    g23: float
    g12: float
    conf: float
    v_qd: float
    kappa: float
    omega_p: float = 0.0
    omega_c: float = 0.0
    lambda_verbatim: bool = False

    def __post_init__(self):
        object.__setattr__(self, "config", Config(self.config))
        for name in ("G13", "G23", "G12", "g13", "g23", "g12"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be a finite non-negative rate, got {v!r}")
        if self.mu13 < 0 or self.mu23 < 0:
            raise ValueError("dipole moments must be non-negative")
        if not 0 < self.conf <= 1:
            raise ValueError(f"confinement factor must lie in (0, 1], got {self.conf!r}")
        if not self.v_qd > 0:
            raise ValueError(f"dot volume must be positive, got {self.v_qd!r}")
        if not np.isfinite(self.kappa):
            raise ValueError("kappa must be finite")

    @property
    def topology(self) -> Config:
        return self.config.topology

    @property
    def prefactor(self) -> float:
        """``conf * mu13^2 / (V eps0 hbar)`` in rad/s."""
        return self.conf * self.mu13**2 / (self.v_qd * EPS0 * HBAR)

    @property
    def kernel_id(self) -> int:
        return _KERNEL_ID[self.topology]

    def kernel_params(self) -> np.ndarray:
        return np.array([self.G13, self.G23, self.G12, self.g13, self.g23, self.g12,
                         1.0 if self.lambda_verbatim else 0.0])

    def with_lifetime_dephasing(self, g12_factor: float = 1.0) -> "SchemeParams":
        g13, g23, g12 = lifetime_limited_dephasing(self.topology, self.G13, self.G23, self.G12)
        return replace(self, g13=g13, g23=g23, g12=g12 * g12_factor)

    def evolve(self, **changes) -> "SchemeParams":
        return replace(self, **changes)


def lifetime_limited_dephasing(topology: Config, G13: float, G23: float, G12: float):
    """``(g13, g23, g12)``: each half the total population loss of its two levels.

    Decay channels: Xi 3->1, 2->3, 2->1; V 1->3, 2->3, 2->1; Lambda 3->1,
    3->2, 2->1.
    """
    topology = Config(topology).topology
    if topology is Config.XI:
        out = {1: 0.0, 2: G23 + G12, 3: G13}
    elif topology is Config.V:
        out = {1: G13, 2: G23 + G12, 3: 0.0}
    else:
        out = {1: 0.0, 2: G12, 3: G13 + G23}
    return (0.5 * (out[1] + out[3]), 0.5 * (out[2] + out[3]), 0.5 * (out[1] + out[2]))


def _evaluate(p: SchemeParams, dp, dc, omega, deriv=False):
    with np.errstate(divide="ignore", invalid="ignore"):
        k = _backend.kernel(p.kernel_id, p.kernel_params(), dp, dc, omega, deriv=deriv)
    if not np.all(np.isfinite(k)):
        raise SingularityError(
            f"{p.topology.value} susceptibility denominator vanished "
            f"(g13={p.g13:g}, g12={p.g12:g}, g23={p.g23:g}, G13={p.G13:g}, Omega={omega:g})"
        )
    return p.prefactor * k


def chi_xi(dp_eff, dc_eff, p: SchemeParams, omega: float):
    """Xi ladder: probe 1->3, coupling 3->2, two-photon detuning ``dp + dc``."""
    return _evaluate(_as(p, Config.XI), dp_eff, dc_eff, omega)


def chi_lambda(dp_eff, dc_eff, p: SchemeParams, omega: float):
    """Lambda: probe 1->3, coupling 2->3, Raman detuning ``dp - dc``."""
    return _evaluate(_as(p, Config.LAMBDA), dp_eff, dc_eff, omega)


def chi_v(dp_eff, dc_eff, p: SchemeParams, omega: float):
    """V: probe 3->1 and coupling 3->2 share the ground state.

    Includes the coupling-induced population redistribution, so unlike the
    Xi and Lambda kernels it is not a pure coherence response.  Needs
    ``G13 > 0`` or ``omega > 0``.
    """
    p = _as(p, Config.V)
    if p.G13 == 0 and omega == 0:
        raise SingularityError("V susceptibility needs G13 > 0 or a non-zero coupling field")
    return _evaluate(p, dp_eff, dc_eff, omega)


def _as(p: SchemeParams, topology: Config) -> SchemeParams:
    if p.topology is topology:
        return p
    return replace(p, config=topology)


def effective_detunings(dp, dc, d_ih, kappa):
    """Subensemble detunings for a probe-transition shift ``d_ih``."""
    d_ih = np.asarray(d_ih, dtype=float)
    return np.asarray(dp, dtype=float) - d_ih, np.asarray(dc, dtype=float) - kappa * d_ih


def chi(dp, dc, d_ih, p: SchemeParams, omega: float):
    """Susceptibility of the subensemble shifted by ``d_ih`` from the centre."""
    tp, tc = effective_detunings(dp, dc, d_ih, p.kappa)
    return _evaluate(p, tp, tc, omega)


def dchi_ddp(dp, dc, d_ih, p: SchemeParams, omega: float):
    """Analytic derivative of :func:`chi` with respect to the probe detuning."""
    tp, tc = effective_detunings(dp, dc, d_ih, p.kappa)
    return _evaluate(p, tp, tc, omega, deriv=True)


def chi_two_level_saturated(detuning, gamma: float, gamma_eff: float, omega: float, pref: float):
    """Steady-state two-level susceptibility with saturation.

    ``-pref (d - i gamma) / (d^2 + gamma^2 + 4 Omega^2 gamma / gamma_eff)``
    where ``gamma_eff`` is the population recovery rate of the upper level.
    """
    if gamma_eff <= 0:
        raise ValueError("population recovery rate must be positive")
    k = _backend.kernel(_backend.TWO_LEVEL_SAT, [gamma, gamma_eff], 0.0, detuning, omega)
    return pref * k
