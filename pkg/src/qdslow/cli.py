"""Command-line front end: ``qdslow run|validate|list|version``.

Exit codes: 0 success, 1 fatal error, 2 finished with per-point failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import re
import sys
from dataclasses import fields

from . import __version__, _backend
from .materials import Material
from .scenarios import BUILTIN, Dataset, Scenario, builtin_scenario, option_value, run_scenario
from .units import parse_quantity

EXIT_OK, EXIT_FATAL, EXIT_PARTIAL = 0, 1, 2

# material field -> quantity kind (None: dimensionless number)
MATERIAL_KINDS = {
    "w_ab": "energy", "w_bc": "energy", "w_ac": "energy",
    "mu_ab": "dipole", "mu_bc": "dipole", "mu_ac": "dipole",
    "G_ab": "energy", "G_bc": "energy", "G_ac": "energy",
    "sigma_ih": "energy", "v_qd": "volume",
    "eta": None, "conf": None, "n_bg": None,
}
_TOP_KEYS = {"scenario", "id", "material", "intensity_grid", "detuning_grid", "shift_grid",
             "z_grid", "options", "rtol"}


class ConfigError(ValueError):
    """Invalid configuration; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line

    def __str__(self):
        msg = super().__str__()
        return f"line {self.line}: {msg}" if self.line else msg


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _grid(spec, kind, text, key):
    line = _line_of(text, key)
    conv = (lambda v: parse_quantity(v, kind)) if kind else float
    try:
        if isinstance(spec, list):
            vals = [conv(v) for v in spec]
        elif isinstance(spec, dict):
            unknown = set(spec) - {"start", "stop", "num", "spacing"}
            if unknown:
                raise ConfigError(f"{key}: unknown keys {sorted(unknown)}", line)
            start, stop, num = conv(spec["start"]), conv(spec["stop"]), int(spec["num"])
            if num < 0:
                raise ConfigError(f"{key}.num must be non-negative", line)
            spacing = spec.get("spacing", "linear")
            if spacing == "log":
                if start <= 0 or stop <= 0:
                    raise ConfigError(f"{key}: log spacing needs positive bounds", line)
                vals = [start * (stop / start) ** (k / max(num - 1, 1)) for k in range(num)]
            elif spacing == "linear":
                vals = [start + (stop - start) * k / max(num - 1, 1) for k in range(num)]
            else:
                raise ConfigError(f"{key}.spacing must be 'linear' or 'log'", line)
        else:
            raise ConfigError(f"{key} must be a list or a start/stop/num object", line)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{key}: {exc}", line) from None
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError(f"{key} must be strictly increasing", line)
    return tuple(vals)


def load_config(text: str) -> Scenario:
    """Parse a JSON run configuration into a scenario."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc.msg} (column {exc.colno})", exc.lineno) from None
    if not isinstance(doc, dict):
        raise ConfigError("top level must be an object", 1)
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        k = sorted(unknown)[0]
        raise ConfigError(f"unknown key {k!r}; allowed: {sorted(_TOP_KEYS)}", _line_of(text, k))
    if "scenario" not in doc:
        raise ConfigError("missing 'scenario' (a builtin id to start from)", 1)
    try:
        s = builtin_scenario(doc["scenario"])
    except KeyError as exc:
        raise ConfigError(exc.args[0], _line_of(text, "scenario")) from None

    mat = doc.get("material", {})
    if not isinstance(mat, dict):
        raise ConfigError("material must be an object", _line_of(text, "material"))
    changes = {}
    for k, v in mat.items():
        line = _line_of(text, k)
        if k not in MATERIAL_KINDS:
            raise ConfigError(f"unknown material field {k!r}", line)
        kind = MATERIAL_KINDS[k]
        try:
            val = parse_quantity(v, kind) if kind else float(v)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"material.{k}: {exc}", line) from None
        if not math.isfinite(val):
            raise ConfigError(f"material.{k} must be finite", line)
        if k.startswith("G_") and val < 0:
            raise ConfigError(f"material.{k}: decay rate must be non-negative", line)
        if k == "eta" and val <= 0:
            raise ConfigError("material.eta: aspect ratio must be positive "
                              "(disc shift coefficients diverge at eta = 0)", line)
        if k in ("sigma_ih", "v_qd", "n_bg") and val <= 0:
            raise ConfigError(f"material.{k} must be positive", line)
        if k == "conf" and not 0 < val <= 1:
            raise ConfigError("material.conf must lie in (0, 1]", line)
        changes[k] = val
    upd = {"material": s.material.evolve(**changes)}

    for key, attr, kind in (("intensity_grid", "intensities", "intensity"),
                            ("detuning_grid", "detunings", None),
                            ("shift_grid", "shifts", None),
                            ("z_grid", "z", "length")):
        if key in doc:
            upd[attr] = _grid(doc[key], kind, text, key)
    if upd.get("intensities") and upd["intensities"][0] < 0:
        raise ConfigError("intensity_grid values must be non-negative", _line_of(text, "intensity_grid"))
    if "options" in doc:
        if not isinstance(doc["options"], dict):
            raise ConfigError("options must be an object", _line_of(text, "options"))
        merged = dict(s.options)
        merged.update(doc["options"])
        upd["options"] = option_value(merged)
    if "rtol" in doc:
        try:
            rtol = float(doc["rtol"])
        except (TypeError, ValueError):
            rtol = -1.0
        if not rtol > 0:
            raise ConfigError("rtol must be a positive number", _line_of(text, "rtol"))
        upd["rtol"] = rtol
    if "id" in doc:
        if not re.fullmatch(r"[A-Za-z0-9_.-]+", str(doc["id"])):
            raise ConfigError("id may contain only letters, digits, '.', '_' and '-'",
                              _line_of(text, "id"))
        upd["id"] = str(doc["id"])
    return s.evolve(**upd)


def normalized_echo(s: Scenario) -> dict:
    return {
        "id": s.id,
        "family": s.family,
        "material_si": {f.name: getattr(s.material, f.name) for f in fields(Material)},
        "intensities_w_cm2": list(s.intensities),
        "detunings_over_G13": list(s.detunings),
        "shifts_over_G13": list(s.shifts),
        "z_m": list(s.z),
        "options": {k: v for k, v in s.options},
        "rtol": s.rtol,
    }


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_dataset(ds: Dataset, out_dir: str) -> list[str]:
    """Write every table as CSV plus one ``.meta.json`` sidecar; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    names = {}
    for k, t in enumerate(ds.tables):
        fname = f"{ds.scenario_id}.csv" if k == 0 else f"{ds.scenario_id}.{t.name}.csv"
        path = os.path.join(out_dir, fname)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(t.columns)
            for row in t.rows:
                w.writerow([_fmt(v) for v in row])
        names[t.name] = fname
        paths.append(path)
    meta = dict(ds.metadata)
    meta["tables"] = names
    meta["errors"] = list(ds.errors)
    path = os.path.join(out_dir, f"{ds.scenario_id}.meta.json")
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    paths.append(path)
    return paths


def cmd_run(args) -> int:
    try:
        if args.config:
            with open(args.config) as fh:
                s = load_config(fh.read())
        else:
            s = builtin_scenario(args.scenario)
    except (OSError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_FATAL
    if args.tol is not None:
        if not args.tol > 0:
            print("error: --tol must be positive", file=sys.stderr)
            return EXIT_FATAL
        s = s.evolve(rtol=args.tol)
    try:
        os.makedirs(args.out, exist_ok=True)
        if not os.access(args.out, os.W_OK):
            raise PermissionError(f"output directory {args.out!r} is not writable")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    ds = run_scenario(s, jobs=args.jobs)
    try:
        paths = write_dataset(ds, args.out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    for p in paths:
        print(p)
    if ds.errors:
        print(f"{len(ds.errors)} point(s) failed; see {paths[-1]}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        with open(args.path) as fh:
            s = load_config(fh.read())
    except (OSError, ConfigError) as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        return EXIT_FATAL
    print(json.dumps(normalized_echo(s), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_list(args) -> int:
    for sid in sorted(BUILTIN):
        print(f"{sid:10s} {BUILTIN[sid].description}")
    return EXIT_OK


def cmd_version(args) -> int:
    print(f"qdslow {__version__} (backend: {_backend.NAME})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qdslow", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a builtin scenario or a config file")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="builtin scenario id (see 'list')")
    src.add_argument("--config", help="JSON config file")
    r.add_argument("--out", default=".", help="output directory (default: .)")
    r.add_argument("--jobs", type=int, default=1, help="concurrent sweep points")
    r.add_argument("--tol", type=float, default=None, help="relative quadrature tolerance")
    r.add_argument("--format", choices=["csv"], default="csv")
    r.set_defaults(func=cmd_run)

    v = sub.add_parser("validate", help="check a config file and echo it normalized")
    v.add_argument("path")
    v.set_defaults(func=cmd_validate)

    sub.add_parser("list", help="list builtin scenarios").set_defaults(func=cmd_list)
    sub.add_parser("version", help="print version and kernel backend").set_defaults(func=cmd_version)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
