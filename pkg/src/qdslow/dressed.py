"""Dressed-state resonances across the inhomogeneous ensemble.

A subensemble shifted by ``d_ih`` absorbs the probe where one of its dressed
states crosses the probe frequency.  The crossings also mark the narrow
integrand features of the ensemble average, so they double as quadrature
breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .qdstructure import Config


@dataclass(frozen=True)
class DressedShifts:
    """Dressed-resonance shifts; ``lam1`` is the shift of the uncoupled level."""

    lam_plus: float
    lam_minus: float
    lam1: float | None = None


def dressed_eigenvalues(delta2: float, omega: float, delta1: float | None = None) -> DressedShifts:
    """``lam_pm = (-delta2 +- sqrt(4 Omega^2 + delta2^2)) / 2``.

    The smaller-magnitude root is computed as ``-Omega^2 / lam_other`` to
    avoid cancellation when ``|delta2| >> Omega``.
    """
    root = math.hypot(2.0 * omega, delta2)
    if delta2 >= 0:
        lm = 0.5 * (-delta2 - root)
        lp = -omega * omega / lm if lm != 0 else 0.0
    else:
        lp = 0.5 * (-delta2 + root)
        lm = -omega * omega / lp
    return DressedShifts(lp, lm, None if delta1 is None else -delta1)


def _quadratic_coefficient(topology: Config, kappa: float) -> float:
    return 1.0 + kappa if Config(topology).topology is Config.XI else 1.0 - kappa


def absorbing_shift_exists(topology: Config, kappa: float, omega: float):
    """Shifts ``(-d, +d)`` whose dressed state sits on a centred probe, or None.

    At zero probe and coupling detuning the crossing condition reduces to
    ``c d^2 = Omega^2`` with ``c = 1 + kappa`` (Xi) or ``1 - kappa`` (V,
    Lambda); real shifts exist only for ``c > 0``.
    """
    if not omega > 0:
        raise ValueError("coupling Rabi frequency must be positive")
    c = _quadratic_coefficient(topology, kappa)
    if c <= 0:
        return None
    d = omega / math.sqrt(c)
    return (-d, d)


@dataclass(frozen=True)
class ResonanceAsymptotes:
    """Far-detuned resonance lines ``d_ih = slope * dp`` in the (dp, d_ih) plane."""

    primary_slope: float
    secondary_slope: float
    vertical: bool


def resonance_asymptotes(topology: Config, kappa: float) -> ResonanceAsymptotes:
    c = _quadratic_coefficient(topology, kappa)
    if c == 0:
        return ResonanceAsymptotes(1.0, math.inf, True)
    return ResonanceAsymptotes(1.0, 1.0 / c, False)


def _roots(a: float, b: float, c: float):
    """Real roots of ``a u^2 + b u + c = 0``, numerically stable."""
    if a == 0:
        return [] if b == 0 else [-c / b]
    disc = b * b - 4.0 * a * c
    if disc < 0:
        return []
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    if q == 0:
        return [0.0]
    return [q / a, c / q]


def quadrature_breakpoints(dp: float, dc: float, kappa: float, omega: float,
                           topology: Config, dedup: float = 0.0) -> list[float]:
    """Sorted shifts ``d_ih`` where a dressed or bare resonance meets the probe.

    Includes the bare line ``d_ih = dp``, the two-photon line and both
    dressed-state crossings.  Points closer than ``dedup`` are merged.
    """
    topology = Config(topology).topology
    pts = [dp]
    if topology is Config.XI:
        c = 1.0 + kappa
        us = _roots(c, dc - kappa * dp, -omega * omega)
        pts += [dp - u for u in us]  # u = dp - d_ih
        if c != 0:
            pts.append((dp + dc) / c)
    else:
        c = 1.0 - kappa
        if topology is Config.V:
            us = _roots(c, dc - kappa * dp, -omega * omega)
            pts += [dp + u for u in us]  # u = d_ih - dp
        else:
            us = _roots(c, kappa * dp - dc, -omega * omega)
            pts += [dp - u for u in us]
        if c != 0:
            pts.append((dp - dc) / c)
    pts = sorted(p for p in pts if math.isfinite(p))
    out: list[float] = []
    for p in pts:
        if not out or p - out[-1] > dedup:
            out.append(p)
    return out
