"""Named parameter sets and sweeps, and the code that turns them into tables.

Every scenario is a pure function of its definition: rerunning it gives the
same rows in the same order.  Point failures are recorded, not raised.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Callable

import numpy as np

from . import __version__, _backend
from .ensemble import DEFAULT_RTOL, EnsembleSpec, average_chi
from .materials import REFERENCE, Material, scheme_params
from .optics import group_index_from_derivative, normalized_absorption
from .propagation import delay_at_fixed_transmission, delay_transmission_map
from .qdstructure import Config
from .susceptibility import SchemeParams, chi
from .units import (
    INTENSITY_CONVENTION,
    angular_frequency_to_energy,
    dipole_to_enm,
    intensity_to_rabi,
)

TRANSMISSION_CONVENTION = "T_dB = 10 log10(I_out/I_in) = -20 <alpha> z log10(e), alpha = field coefficient"
N_INTENSITY = 61
N_DETUNING = 201


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[tuple] = field(default_factory=list)


@dataclass
class Dataset:
    scenario_id: str
    tables: list[Table]
    metadata: dict
    errors: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class Scenario:
    """One figure's worth of parameters and sweep axes.

    ``intensities`` are W/cm^2, ``detunings`` and ``shifts`` are in units of
    the probe population decay rate G13, ``z`` in m.
    """

    id: str
    family: str
    description: str
    material: Material = REFERENCE
    intensities: tuple = ()
    detunings: tuple = ()
    shifts: tuple = ()
    z: tuple = ()
    options: tuple = ()
    rtol: float = DEFAULT_RTOL

    def option(self, key, default=None):
        return dict(self.options).get(key, default)

    def evolve(self, **changes) -> "Scenario":
        return replace(self, **changes)


def log_grid(lo: float, hi: float, n: int) -> tuple:
    return tuple(float(x) for x in np.logspace(math.log10(lo), math.log10(hi), n))


def lin_grid(lo: float, hi: float, n: int) -> tuple:
    return tuple(float(x) for x in np.linspace(lo, hi, n))


def _builtin() -> dict[str, Scenario]:
    eta1 = REFERENCE.evolve(eta=1.0)
    det = lin_grid(-40.0, 40.0, N_DETUNING)
    spec_opts = (("rabi_over_G13", 10.0),)
    s = [
        Scenario("fig3", "scheme_comparison",
                 "normalized absorption and slow-down against coupling intensity, "
                 "three schemes with and without inhomogeneous broadening",
                 intensities=log_grid(1e-2, 1e9, N_INTENSITY)),
        Scenario("fig4", "spectra",
                 "averaged susceptibility spectra and single-dot maps for eta = 1",
                 material=eta1, detunings=det, shifts=det,
                 options=spec_opts + (("variants", ("Xi", "V", "Lambda")),)),
        Scenario("fig5a", "decay_case", "V scheme, lifetime-limited, no intraband decay",
                 intensities=log_grid(1e-1, 1e9, N_INTENSITY), options=(("case", "a"),)),
        Scenario("fig5b", "decay_case", "V scheme, intraband dephasing x1000",
                 intensities=log_grid(1e-1, 1e9, N_INTENSITY), options=(("case", "b"),)),
        Scenario("fig5c", "decay_case", "V scheme, intraband decay 25 x G13",
                 intensities=log_grid(1e-1, 1e9, N_INTENSITY), options=(("case", "c"),)),
        Scenario("fig6", "intraband_sweep",
                 "V-scheme averaged susceptibility against probe detuning and G12/G13",
                 detunings=lin_grid(-20.0, 20.0, N_DETUNING),
                 options=(("g12_ratios", log_grid(1e-2, 1e2, 41)), ("intensity_w_cm2", 1e3))),
        Scenario("fig7", "spectra",
                 "alternative V scheme (both kappa variants) against the standard V, eta = 1",
                 material=eta1, detunings=det, shifts=det,
                 options=spec_opts + (("variants", ("V", "AltV", "AltV@0.43")),
                                      ("equal_rates", True))),
        Scenario("fig9v", "spectra", "fine-structure V scheme, kappa = 1",
                 detunings=det, shifts=det, options=spec_opts + (("variants", ("FssV",)),)),
        Scenario("fig9l", "spectra", "fine-structure Lambda scheme, kappa = 1",
                 detunings=det, shifts=det, options=spec_opts + (("variants", ("FssLambda",)),)),
        Scenario("fig10", "propagation_map",
                 "delay and transmission against injected intensity and length",
                 intensities=log_grid(1.0, 1e6, N_INTENSITY), z=lin_grid(0.0, 5e-3, 101),
                 options=(("variants", ("Lambda", "V", "Xi")),)),
        Scenario("fig11", "fixed_transmission", "V-scheme delay at -10 dB transmission",
                 intensities=log_grid(10.0, 1e6, N_INTENSITY),
                 options=(("variant", "V"), ("target_db", -10.0))),
        Scenario("fig11-xi", "fixed_transmission", "Xi-scheme delay at -10 dB transmission",
                 intensities=log_grid(10.0, 1e6, N_INTENSITY),
                 options=(("variant", "Xi"), ("target_db", -10.0))),
    ]
    return {x.id: x for x in s}


BUILTIN = _builtin()


def builtin_scenario(scenario_id: str) -> Scenario:
    try:
        return BUILTIN[scenario_id]
    except KeyError:
        raise KeyError(
            f"unknown scenario {scenario_id!r}; available: {', '.join(sorted(BUILTIN))}"
        ) from None


# --- parameter builders ----------------------------------------------------

def variant_params(variant: str, material: Material, *, equal_rates: bool = False) -> SchemeParams:
    """Scheme for a variant name such as ``"V"`` or ``"AltV@0.43"`` (kappa override)."""
    name, _, k = variant.partition("@")
    kappa = float(k) if k else None
    if equal_rates:
        g = material.G_ab
        material = material.evolve(G_ab=g, G_ac=g, G_bc=0.0)
    return scheme_params(Config(name), material, kappa=kappa)


def decay_case_params(case: str, material: Material = REFERENCE) -> SchemeParams:
    """V-scheme decay cases: (a) no intraband decay, (b) g12 x1000, (c) G12 = 25 G13."""
    if case == "a":
        return scheme_params(Config.V, material, G12=0.0)
    if case == "b":
        return scheme_params(Config.V, material, G12=0.0, g12_factor=1000.0)
    if case == "c":
        return scheme_params(Config.V, material, G12=25.0 * material.G_ab)
    raise ValueError(f"unknown decay case {case!r}")


def ensemble_for(material: Material, ihb: bool = True) -> EnsembleSpec:
    return EnsembleSpec(fwhm=material.sigma_ih) if ihb else EnsembleSpec.delta()


# --- metadata --------------------------------------------------------------

_ENERGY_FIELDS = ("w_ab", "w_bc", "w_ac", "G_ab", "G_bc", "G_ac", "sigma_ih")
_DIPOLE_FIELDS = ("mu_ab", "mu_bc", "mu_ac")


def material_record(m: Material) -> dict:
    out = {}
    for k, v in asdict(m).items():
        if k in _ENERGY_FIELDS:
            out[k] = {"si": v, "si_unit": "rad/s", "input": f"{angular_frequency_to_energy(v)!r}eV"}
        elif k in _DIPOLE_FIELDS:
            out[k] = {"si": v, "si_unit": "C*m", "input": f"{dipole_to_enm(v)!r}enm"}
        elif k == "v_qd":
            out[k] = {"si": v, "si_unit": "m3", "input": f"{v * 1e27!r}nm3"}
        else:
            out[k] = {"si": v, "si_unit": "1"}
    return out


def _params_record(p: SchemeParams) -> dict:
    d = asdict(p)
    d["config"] = p.config.value
    return d


def _metadata(s: Scenario, params: dict[str, SchemeParams]) -> dict:
    return {
        "scenario": s.id,
        "family": s.family,
        "description": s.description,
        "code_version": __version__,
        "backend": _backend.NAME,
        "rtol": s.rtol,
        "material": material_record(s.material),
        "schemes": {k: _params_record(v) for k, v in params.items()},
        "options": {k: v for k, v in s.options},
        "conventions": {
            "intensity": INTENSITY_CONVENTION,
            "transmission": TRANSMISSION_CONVENTION,
            "susceptibility_unit": "conf * mu13^2 / (V eps0 hbar) where marked *_norm",
            "detuning_unit": "G13 of the listed scheme where marked *_over_G13",
        },
        "axes": {"intensities_w_cm2": list(s.intensities), "detunings": list(s.detunings),
                 "shifts": list(s.shifts), "z_m": list(s.z)},
    }


def _pmap(fn: Callable, items, jobs: int):
    items = list(items)
    if jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(jobs) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _safe(fn, *args):
    try:
        return fn(*args), None
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


NAN = float("nan")


# --- runners ---------------------------------------------------------------

def _slow_point(spec, p, intensity, rtol, n_bg):
    omega = intensity_to_rabi(intensity, p.mu23, n_bg)
    r = average_chi(spec, p, 0.0, 0.0, omega, rtol=rtol)
    r0 = average_chi(spec, p, 0.0, 0.0, 0.0, rtol=rtol)
    ng = float(group_index_from_derivative(r.chi, r.dchi, p.omega_p, n_bg))
    return float(normalized_absorption(r.chi.imag, r0.chi.imag)), ng / n_bg, r.chi


def run_scheme_comparison(s: Scenario, jobs: int) -> Dataset:
    t = Table(s.id, ["intensity_w_cm2", "scheme", "ihb", "norm_absorption", "slowdown"])
    params = {c: scheme_params(c, s.material) for c in ("Xi", "V", "Lambda")}
    work = [(c, ihb, i) for c in params for ihb in (True, False) for i in s.intensities]
    errors = []

    def one(item):
        c, ihb, i = item
        return _safe(_slow_point, ensemble_for(s.material, ihb), params[c], i, s.rtol,
                     s.material.n_bg)

    for (c, ihb, i), (res, err) in zip(work, _pmap(one, work, jobs)):
        if err:
            errors.append(f"{c} ihb={ihb} I={i!r}: {err}")
            t.rows.append((i, c, int(ihb), NAN, NAN))
        else:
            t.rows.append((i, c, int(ihb), res[0], res[1]))
    return Dataset(s.id, [t], _metadata(s, params), errors)


def run_decay_case(s: Scenario, jobs: int) -> Dataset:
    case = s.option("case", "a")
    p = decay_case_params(case, s.material)
    spec = ensemble_for(s.material)
    t = Table(s.id, ["intensity_w_cm2", "case", "norm_absorption", "slowdown", "chi_im_norm"])
    errors = []
    results = _pmap(lambda i: _safe(_slow_point, spec, p, i, s.rtol, s.material.n_bg),
                    s.intensities, jobs)
    for i, (res, err) in zip(s.intensities, results):
        if err:
            errors.append(f"I={i!r}: {err}")
            t.rows.append((i, case, NAN, NAN, NAN))
        else:
            t.rows.append((i, case, res[0], res[1], res[2].imag / p.prefactor))
    return Dataset(s.id, [t], _metadata(s, {"V": p}), errors)


def run_intraband_sweep(s: Scenario, jobs: int) -> Dataset:
    ratios = s.option("g12_ratios", ())
    intensity = s.option("intensity_w_cm2", 1e3)
    spec = ensemble_for(s.material)
    base = scheme_params(Config.V, s.material)
    t = Table(s.id, ["g12_over_G13", "probe_detuning_over_G13", "chi_re_norm", "chi_im_norm"])
    errors = []
    omega = intensity_to_rabi(intensity, base.mu23, s.material.n_bg)
    work = [(r, d) for r in ratios for d in s.detunings]

    def one(item):
        r, d = item
        p = scheme_params(Config.V, s.material, G12=r * base.G13)
        return _safe(lambda: average_chi(spec, p, d * p.G13, 0.0, omega, rtol=s.rtol,
                                         deriv=False).chi / p.prefactor)

    for (r, d), (res, err) in zip(work, _pmap(one, work, jobs)):
        if err:
            errors.append(f"G12/G13={r!r} dp={d!r}: {err}")
            t.rows.append((r, d, NAN, NAN))
        else:
            t.rows.append((r, d, res.real, res.imag))
    return Dataset(s.id, [t], _metadata(s, {"V": base}), errors)


def run_spectra(s: Scenario, jobs: int) -> Dataset:
    variants = s.option("variants", ())
    equal = bool(s.option("equal_rates", False))
    ratio = float(s.option("rabi_over_G13", 10.0))
    spec = ensemble_for(s.material)
    params = {v: variant_params(v, s.material, equal_rates=equal) for v in variants}
    avg = Table(s.id, ["variant", "kappa", "probe_detuning_over_G13", "chi_re_norm", "chi_im_norm"])
    grid = Table("map", ["variant", "probe_detuning_over_G13", "shift_over_G13",
                         "chi_re_norm", "chi_im_norm"])
    errors = []
    work = [(v, d) for v in variants for d in s.detunings]

    def one(item):
        v, d = item
        p = params[v]
        return _safe(lambda: average_chi(spec, p, d * p.G13, 0.0, ratio * p.G13,
                                         rtol=s.rtol, deriv=False).chi / p.prefactor)

    for (v, d), (res, err) in zip(work, _pmap(one, work, jobs)):
        if err:
            errors.append(f"{v} dp={d!r}: {err}")
            avg.rows.append((v, params[v].kappa, d, NAN, NAN))
        else:
            avg.rows.append((v, params[v].kappa, d, res.real, res.imag))
    if s.shifts:
        for v in variants:
            p = params[v]
            dp, dih = np.meshgrid(np.asarray(s.detunings), np.asarray(s.shifts), indexing="ij")
            res, err = _safe(lambda: chi(dp * p.G13, 0.0, dih * p.G13, p, ratio * p.G13)
                             / p.prefactor)
            if err:
                errors.append(f"{v} map: {err}")
                continue
            for a, b, c in zip(dp.ravel(), dih.ravel(), res.ravel()):
                grid.rows.append((v, float(a), float(b), float(c.real), float(c.imag)))
    tables = [avg, grid] if s.shifts else [avg]
    return Dataset(s.id, tables, _metadata(s, params), errors)


def run_propagation_map(s: Scenario, jobs: int) -> Dataset:
    variants = s.option("variants", ("V",))
    spec = ensemble_for(s.material)
    params = {v: scheme_params(v, s.material) for v in variants}
    t = Table(s.id, ["scheme", "intensity_w_cm2", "z_m", "coupling_w_cm2", "avg_group_index",
                     "avg_alpha_per_m", "delay_s", "transmission_db"])
    errors = []
    for v, p in params.items():
        cols = delay_transmission_map(s.intensities, s.z, p, spec, n_bg=s.material.n_bg,
                                      rtol=s.rtol, jobs=jobs)
        for i0, col in zip(s.intensities, cols):
            for r in col:
                if r.error:
                    errors.append(f"{v} I0={i0!r} z={r.z!r}: {r.error}")
                t.rows.append((v, i0, r.z, r.intensity, r.avg_n_g, r.avg_alpha, r.delay,
                               r.transmission_db))
    return Dataset(s.id, [t], _metadata(s, params), errors)


def run_fixed_transmission(s: Scenario, jobs: int) -> Dataset:
    v = s.option("variant", "V")
    target = float(s.option("target_db", -10.0))
    p = scheme_params(v, s.material)
    spec = ensemble_for(s.material)
    t = Table(s.id, ["intensity_w_cm2", "z_star_m", "delay_s", "transmission_db"])
    errors = []

    def one(i0):
        return _safe(lambda: delay_at_fixed_transmission(target, i0, p, spec,
                                                         n_bg=s.material.n_bg, rtol=s.rtol))

    for i0, (res, err) in zip(s.intensities, _pmap(one, s.intensities, jobs)):
        if err or not res.reachable:
            errors.append(f"I0={i0!r}: {err or res.error}")
            t.rows.append((i0, NAN, NAN, NAN if res is None else res.transmission_db))
        else:
            t.rows.append((i0, res.z_star, res.delay, res.transmission_db))
    return Dataset(s.id, [t], _metadata(s, {v: p}), errors)


RUNNERS: dict[str, Callable[[Scenario, int], Dataset]] = {
    "scheme_comparison": run_scheme_comparison,
    "decay_case": run_decay_case,
    "intraband_sweep": run_intraband_sweep,
    "spectra": run_spectra,
    "propagation_map": run_propagation_map,
    "fixed_transmission": run_fixed_transmission,
}


def run_scenario(s: Scenario, jobs: int = 1) -> Dataset:
    """Evaluate a scenario; an empty sweep yields a metadata-only dataset."""
    if not (s.intensities or s.detunings or s.z):
        return Dataset(s.id, [], _metadata(s, {}), [])
    return RUNNERS[s.family](s, max(1, int(jobs)))


def option_value(options: Any) -> tuple:
    """Normalize a mapping of options into the hashable form scenarios store."""
    def freeze(v):
        return tuple(freeze(x) for x in v) if isinstance(v, (list, tuple)) else v
    return tuple((k, freeze(v)) for k, v in dict(options).items())
