"""Observables derived from the probe susceptibility.

The background is real and dispersionless with ``eps_bg = n_bg^2``; the
probe sees ``eps = n_bg^2 + chi``.  Probe frequency derivatives equal
probe-detuning derivatives since the transition frequency is fixed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .units import C_LIGHT, N_BG_DEFAULT


class DerivativeError(ArithmeticError):
    """Finite-difference derivative failed its Richardson consistency check."""


def refractive_index(chi, n_bg: float = N_BG_DEFAULT):
    return np.sqrt(n_bg * n_bg + np.asarray(chi, dtype=complex)).real


def group_index_from_derivative(chi, dchi_domega, omega: float, n_bg: float = N_BG_DEFAULT):
    """``n_g = Re sqrt(eps) + omega * Re(d chi/d omega / (2 sqrt(eps)))``."""
    root = np.sqrt(n_bg * n_bg + np.asarray(chi, dtype=complex))
    return root.real + omega * (np.asarray(dchi_domega, dtype=complex) / (2.0 * root)).real


def group_index(chi_at: Callable[[float], complex], omega: float, n_bg: float = N_BG_DEFAULT,
                step: float | None = None, rtol: float = 1e-3) -> float:
    """Group index with a numerically differentiated refractive index.

    ``chi_at`` maps an absolute probe angular frequency to chi.  The central
    difference at ``step`` and ``step/2`` is Richardson-combined; the two
    estimates must agree to ``rtol`` of the refined derivative.
    """
    if step is None:
        step = max(abs(omega), 1.0) * 1e-9
    n = lambda w: float(refractive_index(chi_at(w), n_bg))  # noqa: E731

    def central(h):
        return (n(omega + h) - n(omega - h)) / (2.0 * h)

    d1 = central(step)
    d2 = central(0.5 * step)
    d = (4.0 * d2 - d1) / 3.0
    scale = max(abs(d), 1e-12 * n_bg / max(abs(omega), 1.0))
    if abs(d - d2) > rtol * scale:
        raise DerivativeError(
            f"Richardson estimates disagree: {d2:.6g} vs {d:.6g} at step {step:.3g} rad/s"
        )
    return n(omega) + omega * d


def slowdown(n_g, n_bg: float = N_BG_DEFAULT):
    return np.asarray(n_g) / n_bg


def absorption_coefficient(chi_im, omega: float, n_bg: float = N_BG_DEFAULT):
    """Field absorption coefficient ``omega chi'' / (2 n_bg c)`` in 1/m."""
    return omega * np.asarray(chi_im, dtype=float) / (2.0 * n_bg * C_LIGHT)


def normalized_absorption(chi_im, chi_im_uncoupled):
    """Absorption relative to the same ensemble with the coupling field off."""
    base = np.asarray(chi_im_uncoupled, dtype=float)
    if np.any(base == 0):
        raise ZeroDivisionError("absorption without coupling field is zero")
    return np.asarray(chi_im, dtype=float) / base


@dataclass(frozen=True)
class OpticalMetrics:
    n: float
    n_g: float
    S: float
    alpha: float
    A_norm: float


def optical_metrics(chi: complex, dchi: complex, omega: float, chi0: complex | None = None,
                    n_bg: float = N_BG_DEFAULT) -> OpticalMetrics:
    """All observables for one probe point; ``chi0`` is the uncoupled baseline."""
    ng = float(group_index_from_derivative(chi, dchi, omega, n_bg))
    a_norm = float("nan") if chi0 is None else float(normalized_absorption(chi.imag, chi0.imag))
    return OpticalMetrics(
        n=float(refractive_index(chi, n_bg)), n_g=ng, S=ng / n_bg,
        alpha=float(absorption_coefficient(chi.imag, omega, n_bg)), A_norm=a_norm,
    )
