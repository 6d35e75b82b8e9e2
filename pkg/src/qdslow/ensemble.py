"""Inhomogeneous size distribution and the ensemble-averaged susceptibility."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .dressed import quadrature_breakpoints
from .susceptibility import SchemeParams, chi, dchi_ddp

FWHM_PER_SD = 2.0 * math.sqrt(2.0 * math.log(2.0))
DEFAULT_RTOL = 1e-6
DEFAULT_MAX_PANELS = 2000
_ATOL_FACTOR = 1e-10


class ConvergenceError(RuntimeError):
    """Adaptive quadrature ran out of panels before meeting its tolerance."""

    def __init__(self, message, lo, hi, residual):
        super().__init__(message)
        self.lo = lo
        self.hi = hi
        self.residual = residual


@dataclass(frozen=True)
class EnsembleSpec:
    """Distribution of the probe-transition shift ``d_ih`` across the ensemble.

    ``fwhm`` is in rad/s.  The Gaussian is cut at ``truncation`` FWHM on
    each side and renormalized.
    """

    distribution: str = "gaussian"
    fwhm: float = 0.0
    truncation: float = 4.0

    def __post_init__(self):
        if self.distribution not in ("gaussian", "delta"):
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.distribution == "gaussian" and not self.fwhm > 0:
            raise ValueError("gaussian distribution needs a positive FWHM")
        if not self.truncation > 0:
            raise ValueError("truncation must be positive")

    @classmethod
    def delta(cls) -> "EnsembleSpec":
        return cls("delta", 0.0)

    @property
    def is_delta(self) -> bool:
        return self.distribution == "delta"

    @property
    def sd(self) -> float:
        return self.fwhm / FWHM_PER_SD

    @property
    def half_width(self) -> float:
        return self.truncation * self.fwhm

    @property
    def norm(self) -> float:
        """Peak density of the truncated, renormalized Gaussian."""
        s = self.sd
        mass = math.erf(self.half_width / (s * math.sqrt(2.0)))
        return 1.0 / (s * math.sqrt(2.0 * math.pi) * mass)


def distribution_density(spec: EnsembleSpec, d_ih):
    """Density of ``d_ih`` in 1/(rad/s); zero outside the truncation window."""
    if spec.is_delta:
        raise ValueError("delta distribution has no density; average_chi evaluates it exactly")
    x = np.asarray(d_ih, dtype=float)
    f = spec.norm * np.exp(-0.5 * (x / spec.sd) ** 2)
    return np.where(np.abs(x) <= spec.half_width, f, 0.0)


@dataclass(frozen=True)
class AverageResult:
    chi: complex
    dchi: complex
    n_evals: int


def initial_edges(spec: EnsembleSpec, p: SchemeParams, dp, dc, omega, breakpoints=True):
    lim = spec.half_width
    pts = []
    if breakpoints:
        pts = quadrature_breakpoints(dp, dc, p.kappa, omega, p.topology, dedup=p.g13 / 10)
        pts = [x for x in pts if -lim < x < lim]
    return np.array([-lim, *pts, lim])


def average_chi(spec: EnsembleSpec, p: SchemeParams, dp: float, dc: float, omega: float, *,
                rtol: float = DEFAULT_RTOL, deriv: bool = True, breakpoints: bool = True,
                max_panels: int = DEFAULT_MAX_PANELS, backend: str | None = None) -> AverageResult:
    """Ensemble average of ``chi`` and of its probe-detuning derivative.

    The derivative is averaged under the integral sign so that one adaptive
    pass serves both.  Raises :class:`ConvergenceError` when the panel
    budget is exhausted.
    """
    if spec.is_delta:
        c = complex(chi(dp, dc, 0.0, p, omega))
        d = complex(dchi_ddp(dp, dc, 0.0, p, omega)) if deriv else 0j
        return AverageResult(c, d, 1)
    if not rtol > 0:
        raise ValueError("rtol must be positive")
    edges = initial_edges(spec, p, dp, dc, omega, breakpoints)
    scale = math.pi * spec.norm
    g = max(p.g13, 1e-300)
    res = _backend.ensemble_average(
        p.kernel_id, p.kernel_params(), dp, dc, p.kappa, omega, spec.sd, spec.norm, edges,
        rtol=rtol, atol_chi=_ATOL_FACTOR * scale, atol_d=_ATOL_FACTOR * scale / g,
        max_panels=max_panels, deriv=deriv, backend=backend,
    )
    c, d, nev, ok, lo, hi, resid = res
    if not ok:
        why = ("non-finite integrand" if not math.isfinite(resid)
               else f"no convergence within {max_panels} panels")
        raise ConvergenceError(
            f"ensemble quadrature failed ({why}); "
            f"worst panel [{lo:.6g}, {hi:.6g}] rad/s, residual {resid:.3g}",
            lo, hi, resid,
        )
    pref = p.prefactor
    return AverageResult(complex(c) * pref, complex(d) * pref, int(nev))
