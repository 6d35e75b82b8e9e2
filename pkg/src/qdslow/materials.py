"""Quantum-dot material parameters and their mapping onto three-level schemes.

The disc-potential dot has a valence level ``a`` and electron levels ``b``
(ground, 101) and ``c`` (excited, 111).  Each configuration picks which
transitions carry the probe and coupling fields and relabels the levels so
that the probe always drives 1<->3 and the coupling 2<->3.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .qdstructure import Config, kappa as _kappa
from .susceptibility import SchemeParams, lifetime_limited_dephasing
from .units import (
    N_BG_DEFAULT,
    dipole_from_enm,
    energy_to_angular_frequency as ev,
)


@dataclass(frozen=True)
class Material:
    """Transition energies (rad/s), dipoles (C m) and decay rates (rad/s)."""

    w_ab: float
    w_bc: float
    w_ac: float
    mu_ab: float
    mu_bc: float
    mu_ac: float
    G_ab: float
    G_bc: float
    G_ac: float
    eta: float
    conf: float
    v_qd: float
    sigma_ih: float
    n_bg: float = N_BG_DEFAULT

    def evolve(self, **changes) -> "Material":
        return replace(self, **changes)


#: default quantum-dot parameter set used by every builtin scenario
REFERENCE = Material(
    w_ab=ev(0.999), w_bc=ev(61e-3), w_ac=ev(1.06),
    mu_ab=dipole_from_enm(0.7), mu_bc=dipole_from_enm(4.7), mu_ac=dipole_from_enm(0.10),
    G_ab=ev(2.6e-6), G_bc=ev(0.16e-6), G_ac=ev(2.6e-6),
    eta=0.3, conf=6e-3, v_qd=1.2e-24, sigma_ih=ev(10e-3),
)

#: exciton-level parameters for the fine-structure schemes: equal bright
#: dipoles and decay rates on both polarizations, no decay between them
FSS_DIPOLE = dipole_from_enm(0.7)
FSS_RATE = ev(2.6e-6)


def scheme_params(config: Config | str, material: Material = REFERENCE, *,
                  kappa: float | None = None, g12_factor: float = 1.0,
                  G12: float | None = None, fss_slope: float = 0.0,
                  lambda_verbatim: bool = False) -> SchemeParams:
    """Build the scheme for ``config`` with lifetime-limited dephasing.

    ``G12`` overrides the 2->1 population rate before dephasing is derived;
    ``g12_factor`` then scales the resulting g12.  ``kappa`` overrides the
    disc-potential ratio.
    """
    config = Config(config)
    m = material
    if config is Config.XI:
        mu13, mu23, G = m.mu_ab, m.mu_bc, (m.G_ab, m.G_bc, m.G_ac)
        wp, wc = m.w_ab, m.w_bc
    elif config is Config.V:
        mu13, mu23, G = m.mu_ab, m.mu_ac, (m.G_ab, m.G_ac, m.G_bc)
        wp, wc = m.w_ab, m.w_ac
    elif config is Config.LAMBDA:
        mu13, mu23, G = m.mu_ac, m.mu_bc, (m.G_ac, m.G_bc, m.G_ab)
        wp, wc = m.w_ac, m.w_bc
    elif config is Config.ALT_V:
        mu13, mu23, G = m.mu_ac, m.mu_ab, (m.G_ac, m.G_ab, m.G_bc)
        wp, wc = m.w_ac, m.w_ab
    else:
        mu13 = mu23 = FSS_DIPOLE
        G = (FSS_RATE, FSS_RATE, 0.0)
        wp = wc = m.w_ab
    G13, G23, G12_ = G
    if G12 is not None:
        G12_ = G12
    g13, g23, g12 = lifetime_limited_dephasing(config.topology, G13, G23, G12_)
    if kappa is None:
        kappa = _kappa(config, m.eta, fss_slope=fss_slope)
    return SchemeParams(
        config=config, mu13=mu13, mu23=mu23, G13=G13, G23=G23, G12=G12_,
        g13=g13, g23=g23, g12=g12 * g12_factor, conf=m.conf, v_qd=m.v_qd,
        kappa=kappa, omega_p=wp, omega_c=wc, lambda_verbatim=lambda_verbatim,
    )
