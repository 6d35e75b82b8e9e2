"""Physical constants and the few unit conversions the package needs.

Everything internal is SI, with every rate, detuning and Rabi frequency in
rad/s.  Inputs arrive in the mixed units quantum-dot papers use (eV-family
energies, e*nm dipoles, W/cm^2 intensities) and are converted here once.
"""

from __future__ import annotations

import math
import re
from decimal import Decimal

from scipy import constants as _c

HBAR = _c.hbar
E_CHARGE = _c.e
EPS0 = _c.epsilon_0
C_LIGHT = _c.c
M_E = _c.m_e

#: default background refractive index (GaAs-like)
N_BG_DEFAULT = 3.5

INTENSITY_CONVENTION = (
    "plane wave: I = 1/2 n_bg c eps0 |E|^2, Rabi frequency Omega = mu |E| / (2 hbar)"
)


def _finite(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"{name} must be finite, got {x!r}")
    return x


def energy_to_angular_frequency(e_ev: float) -> float:
    """Energy in eV to angular frequency in rad/s."""
    return _finite(e_ev, "energy") * E_CHARGE / HBAR


def angular_frequency_to_energy(w: float) -> float:
    """Angular frequency in rad/s to energy in eV."""
    return _finite(w, "angular frequency") * HBAR / E_CHARGE


def dipole_from_enm(mu_enm: float) -> float:
    """Dipole moment e*nm -> C*m."""
    mu = _finite(mu_enm, "dipole moment")
    if mu < 0:
        raise ValueError("dipole moment must be non-negative")
    return mu * E_CHARGE * 1e-9


def dipole_to_enm(mu: float) -> float:
    return mu / (E_CHARGE * 1e-9)


def w_cm2_to_w_m2(i: float) -> float:
    return _finite(i, "intensity") * 1e4


def w_m2_to_w_cm2(i: float) -> float:
    return _finite(i, "intensity") * 1e-4


def intensity_to_rabi(intensity_w_cm2: float, mu: float, n_bg: float = N_BG_DEFAULT) -> float:
    """Rabi frequency (rad/s) of a plane wave of the given intensity.

    ``mu`` is in C*m.  Uses ``Omega = mu E / (2 hbar)`` with
    ``I = n_bg c eps0 E^2 / 2``.
    """
    i = _finite(intensity_w_cm2, "intensity")
    if i < 0:
        raise ValueError("intensity must be non-negative")
    if mu <= 0:
        raise ValueError("Rabi frequency is undefined for a zero dipole moment")
    field = math.sqrt(2.0 * w_cm2_to_w_m2(i) / (n_bg * C_LIGHT * EPS0))
    return mu * field / (2.0 * HBAR)


def rabi_to_intensity(rabi: float, mu: float, n_bg: float = N_BG_DEFAULT) -> float:
    """Inverse of :func:`intensity_to_rabi`; returns W/cm^2."""
    if mu <= 0:
        raise ValueError("Rabi frequency is undefined for a zero dipole moment")
    field = 2.0 * HBAR * _finite(rabi, "Rabi frequency") / mu
    return w_m2_to_w_cm2(0.5 * n_bg * C_LIGHT * EPS0 * field * field)


# --- unit-suffixed quantities used by config files -------------------------

_ENERGY = {"eV": 1.0, "meV": 1e-3, "ueV": 1e-6, "µeV": 1e-6, "μeV": 1e-6}
_LENGTH = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "nm": 1e-9}
_VOLUME = {"m3": 1.0, "nm3": 1e-27}
_DIPOLE = {"enm": None, "Cm": 1.0}
_INTENSITY = {"W/cm2": 1.0, "W/m2": 1e-4}

_QTY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-zµμ/0-9]+)\s*$")

# kind -> (table, SI unit name)
UNIT_KINDS = {
    "energy": (_ENERGY, "rad/s"),
    "length": (_LENGTH, "m"),
    "volume": (_VOLUME, "m3"),
    "dipole": (_DIPOLE, "C*m"),
    "intensity": (_INTENSITY, "W/cm2"),
}


def parse_quantity(text, kind: str) -> float:
    """Parse a unit-suffixed string such as ``"2.6ueV"`` or ``"1200nm3"``.

    Energies come back as angular frequency (rad/s), dipoles in C*m,
    intensities in W/cm^2, lengths in m, volumes in m^3.  Bare numbers are
    rejected so that no quantity enters without an explicit unit.
    """
    table, _ = UNIT_KINDS[kind]
    if not isinstance(text, str):
        raise ValueError(f"{kind} quantity needs an explicit unit suffix, got {text!r}")
    m = _QTY.match(text)
    if m is None:
        raise ValueError(f"cannot parse {kind} quantity {text!r}")
    number, unit = m.group(1), m.group(2)
    if unit not in table:
        raise ValueError(f"unknown {kind} unit {unit!r} in {text!r}; expected one of {sorted(table)}")
    if kind == "dipole":
        return dipole_from_enm(float(number)) if unit == "enm" else float(number)
    # scale in decimal so "1200nm3" gives the same double as the literal 1.2e-24
    value = float(Decimal(number) * Decimal(repr(table[unit])))
    if kind == "energy":
        return energy_to_angular_frequency(value)
    return value
