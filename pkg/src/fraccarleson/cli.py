"""Command-line experiment runner.

Every subcommand writes its table(s) and a ``<command>.manifest.json`` that
echoes the resolved configuration, the tool version, the SHA-256 of each
table and the wall-clock duration.  ``replay`` re-runs a manifest and checks
the tables are bit-identical.

Exit codes: 0 success, 1 numeric failure (partial results are flagged in the
manifest), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass

import numpy as np
import yaml

from . import __version__
from .curves2d import CurveField, band_limited_2d, plancherel_check
from .kernel import (BADSET_HEADER, KERNEL_HEADER, KernelParams, bad_set_measure,
                     badset_exponent_check, decay_fit, uniform_kernel_check)
from .multiplier import blowup_probe_even_at_one, signed_log_grid, sweep
from .operators import (default_a_grid, domination_check, norm_estimate, seeded_pair,
                        single_scale_sweep)
from .oscquad import OscQuadError
from .records import Table, atomic_write, load_manifest, sha256_text, write_manifest

OUT_ENV = "FRACCARLESON_OUT"
DEFAULT_OUT = "fraccarleson-runs"
EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class Opt:
    type: type
    default: object
    help: str
    many: bool = False
    choices: tuple = None


COMMON = {
    "seed": Opt(int, 0, "seed for every random draw"),
    "workers": Opt(int, 1, "worker processes (results do not depend on it)"),
    "format": Opt(str, "csv", "table format", choices=("csv", "json")),
    "out": Opt(str, None, f"output directory (default ${OUT_ENV} or ./{DEFAULT_OUT})"),
}

PARITY = Opt(str, "odd", "kernel parity", choices=("even", "odd"))

SCHEMAS = {
    "multiplier-sweep": {
        "parity": PARITY,
        "eps": Opt(float, [0.8], "exponents", many=True),
        "lambda": Opt(float, None, "explicit frequencies (default: signed log grid)", many=True),
        "lambda_lo": Opt(float, 1e-3, "smallest |lambda| of the log grid"),
        "lambda_hi": Opt(float, 1e3, "largest |lambda| of the log grid"),
        "per_decade": Opt(int, 64, "log-grid points per decade"),
        "tol": Opt(float, 1e-9, "absolute tolerance"),
    },
    "blowup-probe": {
        "k_min": Opt(int, 4, "first k"),
        "k_max": Opt(int, 10, "last k"),
        "tol": Opt(float, 1e-9, "absolute tolerance"),
    },
    "kernel-decay": {
        "eps": Opt(float, 2.0, "exponent"),
        "h": Opt(float, 0.7, "modulation ratio in (0, 1]"),
        "j_min": Opt(int, -8, "finest scale"),
        "j_max": Opt(int, -2, "coarsest scale"),
        "refine": Opt(int, 1, "xi-grid refinement factor"),
        "tol": Opt(float, 1e-9, "absolute tolerance"),
    },
    "badset": {
        "eps": Opt(float, 2.0, "exponent"),
        "j": Opt(int, 0, "scale"),
        "h": Opt(float, 0.5, "modulation ratio in (0, 1]"),
        "xi": Opt(float, -1.0, "frequency offset"),
        "threshold": Opt(float, None, "smallness level (default 2**(theta2 j))"),
        "samples": Opt(int, 1_000_000, "sample count on (1/2, 5/2)"),
    },
    "badset-fit": {
        "eps": Opt(float, 2.0, "exponent"),
        "j_min": Opt(int, -8, "finest scale"),
        "j_max": Opt(int, -2, "coarsest scale"),
        "h_points": Opt(int, 18, "h grid size on (1/10, 1]"),
        "xi_points": Opt(int, 241, "xi grid size on [-3, 3]"),
        "samples": Opt(int, 100_000, "sample count on (1/2, 5/2)"),
    },
    "uniform-kernel": {
        "n": Opt(int, 8, "exponent n >= 4 (base 2**(1/n))"),
        "h": Opt(float, 0.95, "modulation ratio"),
        "j_min": Opt(int, 0, "first scale"),
        "j_max": Opt(int, 12, "last scale"),
        "tol": Opt(float, 1e-9, "absolute tolerance"),
    },
    "carleson-norm": {
        "eps": Opt(float, 1.0, "exponent"),
        "parity": PARITY,
        "trials": Opt(int, 50, "random test functions"),
        "window": Opt(float, 64.0, "window length"),
        "n": Opt(int, 1024, "samples"),
        "a_per_decade": Opt(int, 48, "A-grid points per decade"),
        "a_lo_log2": Opt(float, -20.0, "log2 of the smallest A"),
        "a_hi_log2": Opt(float, 20.0, "log2 of the largest A"),
        "witness": Opt(float, [], "frequencies of tapered exponential witnesses", many=True),
    },
    "single-scale": {
        "eps": Opt(float, 2.0, "exponent"),
        "parity": Opt(str, "even", "kernel parity", choices=("even", "odd")),
        "j_min": Opt(int, -8, "finest scale"),
        "j_max": Opt(int, 0, "coarsest scale"),
        "trials": Opt(int, 20, "random test functions per scale"),
    },
    "high-low-check": {
        "eps": Opt(float, 2.0, "exponent"),
        "parity": Opt(str, "even", "kernel parity", choices=("even", "odd")),
        "pairs": Opt(int, 50, "seeded (f, A) pairs"),
        "n": Opt(int, 1024, "samples"),
        "window": Opt(float, 64.0, "window length"),
        "j_cap": Opt(int, 30, "low-part scale cap J"),
    },
    "plancherel-2d": {
        "eps": Opt(float, [0.5, 1.0, 2.0], "exponents", many=True),
        "fields": Opt(int, 10, "random curve fields"),
        "n1": Opt(int, 32, "x1 samples"),
        "n2": Opt(int, 32, "x2 samples"),
    },
}


# ------------------------------------------------------------------ runners

def _j_range(cfg):
    if cfg["j_min"] > cfg["j_max"]:
        raise UsageError("j_min: must not exceed j_max")
    return list(range(cfg["j_min"], cfg["j_max"] + 1))


def run_multiplier_sweep(cfg):
    """Multiplier values over an exponent and frequency grid."""
    lam = cfg["lambda"]
    if lam is None:
        lam = signed_log_grid(cfg["lambda_lo"], cfg["lambda_hi"], cfg["per_decade"])
    res = sweep(cfg["parity"], cfg["eps"], lam, cfg["tol"], cfg["workers"])
    summary = res.summary()
    summary["failure_details"] = res.failures
    return {"multiplier": res.table}, summary, not res.failures


def run_blowup_probe(cfg):
    """Even eps = 1 multiplier near lambda = 1 against its log growth."""
    res = blowup_probe_even_at_one(cfg["k_max"], cfg["tol"], cfg["k_min"])
    rel = np.abs(res.real_parts() / res.closed_forms() - 1.0)
    return ({"blowup": res.table},
            {"max_relative_error": float(rel.max()), "strictly_increasing": res.strictly_increasing()},
            True)


def run_kernel_decay(cfg):
    """Outside-band decay fit of the TT* kernel sup over scales."""
    fit = decay_fit(KernelParams(cfg["eps"], cfg["j_max"], cfg["h"]), _j_range(cfg),
                    tol=cfg["tol"], refine=cfg["refine"])
    table = Table(KERNEL_HEADER)
    for t in fit.extra.pop("tables"):
        for row in t.rows:
            table.append(row)
    return {"kernel": table, "decay": _fit_table(fit)}, fit.summary(), True


def _fit_table(fit):
    return Table(("j", "sup"), fit.rows)


def run_badset(cfg):
    """Measure of the bad set at one (eps, j, h, xi)."""
    p = KernelParams(cfg["eps"], cfg["j"], cfg["h"])
    m = bad_set_measure(p, cfg["xi"], cfg["samples"], cfg["threshold"])
    table = Table(BADSET_HEADER, [(p.j, p.h, cfg["xi"], m)])
    thr = p.threshold if cfg["threshold"] is None else cfg["threshold"]
    return {"badset": table}, {"measure": m, "threshold": thr}, True


def run_badset_fit(cfg):
    """Decay fit of the largest bad set over scales."""
    h_grid = np.linspace(0.1, 1.0, cfg["h_points"] + 1)[1:]
    xs = np.linspace(-3.0, 3.0, cfg["xi_points"])
    fit = badset_exponent_check(KernelParams(cfg["eps"], cfg["j_max"]), _j_range(cfg), h_grid,
                                lambda p: np.concatenate([xs, [-p.band, p.band]]),
                                cfg["samples"])
    table = fit.extra.pop("table")
    return {"badset": table, "decay": Table(("j", "max_measure"), fit.rows)}, fit.summary(), True


def run_uniform_kernel(cfg):
    """Inside-band constant and outside-band decay of the uniform variant."""
    res = uniform_kernel_check(cfg["n"], _j_range(cfg), tol=cfg["tol"], h=cfg["h"])
    table = Table(KERNEL_HEADER)
    for prof in res.profiles:
        for row in prof.table.rows:
            table.append(row)
    summary = res.fit.summary()
    summary.update({"inside_sup": res.inside_sup, "inside_constant": res.inside_constant})
    return {"kernel": table, "decay": _fit_table(res.fit)}, summary, True


def run_carleson_norm(cfg):
    """Randomized lower bound for the maximal operator norm."""
    grid = default_a_grid(cfg["a_per_decade"], 2.0 ** cfg["a_lo_log2"], 2.0 ** cfg["a_hi_log2"])
    est = norm_estimate(cfg["eps"], cfg["parity"], grid, cfg["trials"], cfg["seed"],
                        cfg["window"], cfg["n"], cfg["witness"], cfg["workers"])
    return {"norm": est.table}, est.summary(), True


def run_single_scale(cfg):
    """Single-scale operator norms and their decay in j."""
    js = list(range(cfg["j_max"], cfg["j_min"] - 1, -1))
    if not js or cfg["j_max"] > 0:
        raise UsageError("j_max: scales must satisfy j_min <= j_max <= 0")
    res = single_scale_sweep(cfg["eps"], cfg["parity"], js, cfg["trials"], cfg["seed"],
                             cfg["workers"])
    return {"single_scale": res.table}, res.summary(), True


def run_high_low_check(cfg):
    """Domination constant of the low part by maximal functions."""
    table = Table(("pair", "constant", "flagged"))
    for i in range(cfg["pairs"]):
        f, a = seeded_pair(cfg["seed"] + i, cfg["n"], cfg["window"])
        r = domination_check(f, a, cfg["parity"], cfg["eps"], cfg["j_cap"])
        table.append((i, r.constant, r.flagged))
    flagged = sum(table.column("flagged"))
    summary = {"constant": max(table.column("constant"), default=0.0), "flagged": flagged}
    return {"domination": table}, summary, flagged == 0


def run_plancherel_2d(cfg):
    """Direct against fiberwise curve transforms in 2D."""
    table = Table(("field", "epsilon", "direct", "fiberwise", "rel_diff"))
    rng = np.random.default_rng(cfg["seed"])
    for i in range(cfg["fields"]):
        f = band_limited_2d(cfg["seed"] + i, cfg["n1"], cfg["n2"])
        u = CurveField(rng.uniform(-2.0, 2.0, cfg["n1"]))
        for eps in cfg["eps"]:
            a, b = plancherel_check(f, u, eps)
            table.append((i, eps, a, b, abs(a - b) / b if b else 0.0))
    return {"plancherel": table}, {"max_rel_diff": max(table.column("rel_diff"), default=0.0)}, True


RUNNERS = {
    "multiplier-sweep": run_multiplier_sweep,
    "blowup-probe": run_blowup_probe,
    "kernel-decay": run_kernel_decay,
    "badset": run_badset,
    "badset-fit": run_badset_fit,
    "uniform-kernel": run_uniform_kernel,
    "carleson-norm": run_carleson_norm,
    "single-scale": run_single_scale,
    "high-low-check": run_high_low_check,
    "plancherel-2d": run_plancherel_2d,
}


# ------------------------------------------------------------ configuration

def _flag(name):
    return "--" + name.replace("_", "-")


def _schema(command):
    return {**SCHEMAS[command], **COMMON}


def _coerce(command, key, value):
    opt = _schema(command).get(key)
    if opt is None:
        raise UsageError(f"{key}: unknown option for {command}")
    if value is None:
        return None
    try:
        if opt.many:
            items = value if isinstance(value, (list, tuple)) else [value]
            value = [opt.type(v) for v in items]
        else:
            if isinstance(value, (list, dict)):
                raise TypeError("expected a scalar")
            value = opt.type(value)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{key}: {exc}") from None
    if opt.choices and value not in opt.choices:
        raise UsageError(f"{key}: must be one of {', '.join(opt.choices)}")
    if isinstance(value, float) and not math.isfinite(value):
        raise UsageError(f"{key}: must be finite")
    return value


def _load_config_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"config: {exc}") from None
    try:
        data = json.loads(text) if path.endswith(".json") else yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise UsageError(f"config: cannot parse {path}: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise UsageError("config: top level must be a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def resolve(command, file_values, flag_values):
    """Defaults, overridden by the config file, overridden by flags."""
    cfg = {k: (list(o.default) if isinstance(o.default, list) else o.default)
           for k, o in _schema(command).items()}
    for source in (file_values, flag_values):
        for k, v in source.items():
            if v is not None or k not in cfg:
                cfg[k] = _coerce(command, k, v)
    if cfg["workers"] < 1:
        raise UsageError("workers: must be at least 1")
    if cfg["seed"] < 0:
        raise UsageError("seed: must be a non-negative integer")
    if cfg["out"] is None:
        cfg["out"] = os.environ.get(OUT_ENV) or DEFAULT_OUT
    return cfg


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser():
    parser = _Parser(prog="fraccarleson", description="Fractional Carleson experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for command in SCHEMAS:
        p = sub.add_parser(command, help=RUNNERS[command].__doc__)
        p.add_argument("--config", help="JSON or YAML file; flags override its values")
        for key, opt in _schema(command).items():
            kw = {"dest": key, "default": None, "help": opt.help}
            if opt.many:
                kw["nargs"] = "+"
            if opt.choices:
                kw["choices"] = opt.choices
            p.add_argument(_flag(key), type=opt.type, **kw)
    rp = sub.add_parser("replay", help="re-run a manifest and compare its tables")
    rp.add_argument("manifest")
    rp.add_argument("--out", default=None, help="directory for the re-run (default: temporary)")
    return parser


# ------------------------------------------------------------------ running

def _serialize(table, fmt):
    if fmt == "csv":
        return table.to_csv()
    from .records import _jsonable
    return json.dumps(_jsonable({"header": list(table.header), "rows": table.rows})) + "\n"


def execute(command, cfg):
    """Run one configured experiment and write its files; returns (exit code, manifest)."""
    start = time.perf_counter()
    status, code = "ok", EXIT_OK
    tables, summary = {}, {}
    try:
        tables, summary, clean = RUNNERS[command](dict(cfg))
        if not clean:
            status, code = "partial", EXIT_NUMERIC
    except OscQuadError as exc:
        status, code = "failed", EXIT_NUMERIC
        summary = {"error": f"{type(exc).__name__}: {exc}"}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = cfg["out"]
    ext = "csv" if cfg["format"] == "csv" else "json"
    stem = command.replace("-", "_")
    records = {}
    for name, table in tables.items():
        fname = f"{stem}.{name}.{ext}"
        text = _serialize(table, cfg["format"])
        atomic_write(os.path.join(out, fname), text)
        records[name] = {"path": fname, "sha256": sha256_text(text), "rows": len(table.rows)}
    manifest = write_manifest(os.path.join(out, f"{stem}.manifest.json"), command, cfg, records,
                              summary, time.perf_counter() - start, status)
    return code, manifest


def replay(path, out=None):
    """Re-run a manifest; exit 0 when every table is bit-identical."""
    try:
        old = load_manifest(path)
        command, cfg = old["command"], dict(old["config"])
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"manifest: cannot read {path}: {exc}") from None
    if command not in RUNNERS:
        raise UsageError(f"manifest: unknown command {command!r}")
    cfg = resolve(command, {k: v for k, v in cfg.items() if k != "out"}, {})
    cfg["out"] = out or tempfile.mkdtemp(prefix="fraccarleson-replay-")
    code, new = execute(command, cfg)
    same = {name: rec["sha256"] == new["tables"].get(name, {}).get("sha256")
            for name, rec in old["tables"].items()}
    for name, ok in same.items():
        print(f"{name}: {'identical' if ok else 'DIFFERS'}")
    print(f"replay written to {cfg['out']}")
    if code != EXIT_OK:
        return code
    return EXIT_OK if same and all(same.values()) else EXIT_NUMERIC


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "replay":
            return replay(args.manifest, args.out)
        flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
        file_values = _load_config_file(args.config) if args.config else {}
        cfg = resolve(args.command, file_values, flags)
        code, manifest = execute(args.command, cfg)
    except UsageError as exc:
        print(f"fraccarleson: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(json.dumps(manifest["summary"], indent=2, default=str))
    print(f"status: {manifest['status']}; files in {cfg['out']}")
    return code


if __name__ == "__main__":
    sys.exit(main())
