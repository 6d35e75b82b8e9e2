"""Monochromatic propagation of the probe along a driven waveguide.

In the V configuration the coupling field is itself absorbed; it is treated
as a saturable two-level absorber whose upper level recovers through its
direct decay plus the series channel via the probe-excited level.  In the
Xi and Lambda configurations the coupling transition starts empty and the
coupling intensity stays constant.

Probe observables are z-averages: the group index and absorption
coefficient are accumulated as prefix integrals, so one coupling solution
serves every propagation length of a column.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .ensemble import DEFAULT_RTOL, EnsembleSpec, average_chi
from .qdstructure import Config
from .susceptibility import SchemeParams
from .units import C_LIGHT, EPS0, HBAR, N_BG_DEFAULT, intensity_to_rabi

LOG10_E = math.log10(math.e)


class PropagationError(RuntimeError):
    pass


@dataclass(frozen=True)
class PropagationGrid:
    z_max: float
    n_z: int

    def __post_init__(self):
        if not self.z_max > 0:
            raise ValueError("z_max must be positive")
        if self.n_z < 2:
            raise ValueError("grid needs at least two points")

    @property
    def z(self) -> np.ndarray:
        return np.linspace(0.0, self.z_max, self.n_z)


@dataclass(frozen=True)
class PropagationRecord:
    z: float
    intensity: float
    omega_c: float
    avg_n_g: float
    avg_alpha: float
    delay: float
    transmission_db: float
    error: str | None = None


def coupling_recovery_rate(p: SchemeParams) -> float:
    """Population recovery rate of the coupling-excited level.

    Direct decay ``G23`` plus the series path through the probe-excited level,
    ``(1/G12 + 1/G13)^-1``; the series path is absent if either rate is zero.
    """
    series = 0.0 if p.G12 <= 0 or p.G13 <= 0 else 1.0 / (1.0 / p.G12 + 1.0 / p.G13)
    return p.G23 + series


def coupling_absorbs(p: SchemeParams) -> bool:
    return p.topology is Config.V and p.mu23 > 0


def coupling_alpha(p: SchemeParams, spec: EnsembleSpec, intensity: float, dc: float = 0.0,
                   n_bg: float = N_BG_DEFAULT, rtol: float = DEFAULT_RTOL,
                   backend: str | None = None) -> float:
    """Ensemble-averaged intensity absorption coefficient of the coupling field, 1/m."""
    if not coupling_absorbs(p):
        return 0.0
    omega = intensity_to_rabi(max(intensity, 0.0), p.mu23, n_bg)
    geff = coupling_recovery_rate(p)
    if geff <= 0:
        raise PropagationError("coupling transition has no population recovery")
    pref = p.conf * p.mu23**2 / (p.v_qd * EPS0 * HBAR)
    params = [p.g23, geff]
    if spec.is_delta:
        k = _backend.kernel(_backend.TWO_LEVEL_SAT, params, 0.0, dc, omega, backend=backend)
        chi_im = float(k.imag)
    else:
        lim = spec.half_width
        edges = [-lim, lim]
        if p.kappa != 0 and -lim < dc / p.kappa < lim:
            edges = [-lim, dc / p.kappa, lim]
        scale = math.pi * spec.norm
        res = _backend.ensemble_average(
            _backend.TWO_LEVEL_SAT, params, 0.0, dc, p.kappa, omega, spec.sd, spec.norm, edges,
            rtol=rtol, atol_chi=1e-12 * scale, atol_d=1.0, max_panels=4000, deriv=False,
            backend=backend,
        )
        if not res[3]:
            raise PropagationError("coupling absorption quadrature did not converge")
        chi_im = float(res[0].imag)
    return p.omega_c * pref * chi_im / (n_bg * C_LIGHT)


def propagate_coupling(i0: float, z: np.ndarray, p: SchemeParams, spec: EnsembleSpec, *,
                       dc: float = 0.0, n_bg: float = N_BG_DEFAULT, rtol: float = 1e-6,
                       max_doublings: int = 12, backend: str | None = None) -> np.ndarray:
    """Coupling intensity (W/cm^2) on the grid ``z``.

    Fixed-step RK4 on ``dI/dz = -alpha_c(I) I``; the number of sub-steps per
    grid interval doubles until ``I(z_max)`` changes by less than ``rtol``.
    """
    z = np.asarray(z, dtype=float)
    if i0 < 0:
        raise ValueError("intensity must be non-negative")
    if not coupling_absorbs(p) or i0 == 0:
        return np.full(z.shape, float(i0))

    cache: dict[float, float] = {}

    def rhs(i):
        if i < 0:
            raise PropagationError(f"coupling intensity went negative ({i:.3g} W/cm^2)")
        a = cache.get(i)
        if a is None:
            a = coupling_alpha(p, spec, i, dc, n_bg, backend=backend)
            cache[i] = a
        return -a * i

    def solve(sub):
        out = np.empty_like(z)
        out[0] = i = float(i0)
        for k in range(1, z.size):
            h = (z[k] - z[k - 1]) / sub
            for _ in range(sub):
                k1 = rhs(i)
                k2 = rhs(i + 0.5 * h * k1)
                k3 = rhs(i + 0.5 * h * k2)
                k4 = rhs(i + h * k3)
                i = i + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
            out[k] = i
        return out

    sub = 1
    prev = solve(sub)
    for _ in range(max_doublings):
        sub *= 2
        cur = solve(sub)
        if abs(cur[-1] - prev[-1]) <= rtol * abs(cur[-1]):
            return cur
        prev = cur
    raise PropagationError(f"coupling propagation not converged after {sub} sub-steps")


@dataclass
class _Point:
    chi_im: float
    x: float  # chi' + omega d chi'/d omega


class ProbeColumn:
    """Pointwise probe response along z for one injected coupling intensity."""

    def __init__(self, p: SchemeParams, spec: EnsembleSpec, *, dp: float = 0.0, dc: float = 0.0,
                 n_bg: float = N_BG_DEFAULT, rtol: float = DEFAULT_RTOL,
                 backend: str | None = None):
        self.p, self.spec, self.dp, self.dc = p, spec, dp, dc
        self.n_bg, self.rtol, self.backend = n_bg, rtol, backend
        self._cache: dict[float, _Point] = {}

    def point(self, intensity: float) -> _Point:
        hit = self._cache.get(intensity)
        if hit is None:
            omega = intensity_to_rabi(intensity, self.p.mu23, self.n_bg)
            r = average_chi(self.spec, self.p, self.dp, self.dc, omega,
                            rtol=self.rtol, backend=self.backend)
            hit = _Point(r.chi.imag, r.chi.real + self.p.omega_p * r.dchi.real)
            self._cache[intensity] = hit
        return hit


def _records(z, intensity, pts, p: SchemeParams, n_bg: float):
    chi_im = np.array([q.chi_im for q in pts])
    x = np.array([q.x for q in pts])
    dz = np.diff(z)
    int_im = np.concatenate([[0.0], np.cumsum(0.5 * dz * (chi_im[1:] + chi_im[:-1]))])
    int_x = np.concatenate([[0.0], np.cumsum(0.5 * dz * (x[1:] + x[:-1]))])
    out = []
    for k in range(z.size):
        if z[k] > 0:
            avg_im = int_im[k] / z[k]
            avg_x = int_x[k] / z[k]
        else:
            avg_im, avg_x = chi_im[k], x[k]
        out.append(_record(z[k], intensity[k], avg_im, avg_x, p, n_bg))
    return out


def _record(z, intensity, avg_im, avg_x, p, n_bg):
    n_g = n_bg + avg_x / (2.0 * n_bg)
    alpha = p.omega_p * avg_im / (2.0 * n_bg * C_LIGHT)
    return PropagationRecord(
        z=float(z), intensity=float(intensity),
        omega_c=intensity_to_rabi(intensity, p.mu23, n_bg) if p.mu23 > 0 else 0.0,
        avg_n_g=float(n_g), avg_alpha=float(alpha),
        delay=float(z / C_LIGHT * (n_g - n_bg)),
        transmission_db=float(-20.0 * alpha * z * LOG10_E),
    )


def probe_metrics_along_z(z, intensity, p: SchemeParams, spec: EnsembleSpec, *,
                          dp: float = 0.0, dc: float = 0.0, n_bg: float = N_BG_DEFAULT,
                          rtol: float = DEFAULT_RTOL, backend: str | None = None):
    """z-averaged group index, absorption, delay and transmission on the grid."""
    z = np.asarray(z, dtype=float)
    intensity = np.broadcast_to(np.asarray(intensity, dtype=float), z.shape)
    col = ProbeColumn(p, spec, dp=dp, dc=dc, n_bg=n_bg, rtol=rtol, backend=backend)
    pts = [col.point(float(i)) for i in intensity]
    return _records(z, intensity, pts, p, n_bg)


def _column(i0, z, p, spec, n_bg, rtol, backend):
    try:
        ic = propagate_coupling(i0, z, p, spec, n_bg=n_bg, backend=backend)
        return probe_metrics_along_z(z, ic, p, spec, n_bg=n_bg, rtol=rtol, backend=backend)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        nan = float("nan")
        return [PropagationRecord(float(zk), float(i0), nan, nan, nan, nan, nan, str(exc))
                for zk in z]


def delay_transmission_map(i0_grid, z, p: SchemeParams, spec: EnsembleSpec, *,
                           n_bg: float = N_BG_DEFAULT, rtol: float = DEFAULT_RTOL,
                           jobs: int = 1, backend: str | None = None):
    """Records indexed ``[i0][z]``; failures are recorded per cell."""
    z = np.asarray(z, dtype=float)
    work = lambda i0: _column(float(i0), z, p, spec, n_bg, rtol, backend)  # noqa: E731
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as ex:
            return list(ex.map(work, i0_grid))
    return [work(i0) for i0 in i0_grid]


@dataclass(frozen=True)
class FixedTransmissionPoint:
    intensity: float
    z_star: float
    delay: float
    transmission_db: float
    reachable: bool
    error: str | None = None


def delay_at_fixed_transmission(target_db: float, i0: float, p: SchemeParams,
                                spec: EnsembleSpec, *, z_start: float = 1e-4,
                                z_limit: float = 1.0, n_z: int = 201, tol_db: float = 0.01,
                                n_bg: float = N_BG_DEFAULT, rtol: float = DEFAULT_RTOL,
                                backend: str | None = None) -> FixedTransmissionPoint:
    """Length ``z*`` at which the probe transmission reaches ``target_db``, and its delay.

    The grid length doubles from ``z_start`` until the target is crossed
    (up to ``z_limit``); the crossing interval is then bisected on the
    prefix integral extended by a partial trapezoid.
    """
    if not target_db < 0:
        raise ValueError("target transmission must be negative (dB)")
    col = ProbeColumn(p, spec, n_bg=n_bg, rtol=rtol, backend=backend)
    z_max = z_start
    while True:
        z = np.linspace(0.0, z_max, n_z)
        ic = propagate_coupling(i0, z, p, spec, n_bg=n_bg, backend=backend)
        pts = [col.point(float(i)) for i in ic]
        recs = _records(z, ic, pts, p, n_bg)
        t = np.array([r.transmission_db for r in recs])
        hit = np.nonzero(t <= target_db)[0]
        if hit.size:
            break
        if z_max >= z_limit:
            nan = float("nan")
            return FixedTransmissionPoint(i0, nan, nan, float(t[-1]), False,
                                          f"transmission {t[-1]:.3g} dB at z_limit")
        z_max = min(2.0 * z_max, z_limit)
    k = int(hit[0])
    if k == 0:
        r = recs[0]
        return FixedTransmissionPoint(i0, 0.0, 0.0, r.transmission_db, True)
    za, ia, pa = z[k - 1], ic[k - 1], pts[k - 1]
    rec_a = recs[k - 1]
    prefix_im = rec_a.avg_alpha * za * 2.0 * n_bg * C_LIGHT / p.omega_p
    prefix_x = (rec_a.avg_n_g - n_bg) * 2.0 * n_bg * za

    def at(zz):
        if zz == za:
            return rec_a
        seg = np.array([za, zz])
        iz = propagate_coupling(ia, seg, p, spec, n_bg=n_bg, backend=backend)[-1]
        q = col.point(float(iz))
        h = zz - za
        im = prefix_im + 0.5 * h * (pa.chi_im + q.chi_im)
        x = prefix_x + 0.5 * h * (pa.x + q.x)
        return _record(zz, iz, im / zz, x / zz, p, n_bg)

    lo, hi = za, z[k]
    rec = recs[k]
    while True:
        mid = 0.5 * (lo + hi)
        rec = at(mid)
        if abs(rec.transmission_db - target_db) <= tol_db or hi - lo <= 1e-12 * hi:
            break
        if rec.transmission_db > target_db:
            lo = mid
        else:
            hi = mid
    return FixedTransmissionPoint(i0, rec.z, rec.delay, rec.transmission_db, True)
