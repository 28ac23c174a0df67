"""Batch driver: every experiment behind one config-file interface.

Each invocation reads a flat INI config, runs at most one experiment,
writes its CSV artifacts plus a JSON manifest into the output directory,
and exits 0 on success, 2 on configuration errors, 3 on numerical
errors, 4 on structural errors.  Given the same config and seed the CSV
bodies are byte-identical between runs (the manifest carries the wall
time and is excluded from that guarantee).
"""

import argparse
import configparser
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import families as F
from . import lab as L
from . import pairs as P
from . import rotation as R
from .chains import CollisionWarning
from .errors import (CircrenError, ConfigError, NumericalError,
                     StructuralError)

SUBCOMMANDS = ("rotnum", "signature", "partition", "extract", "renorm",
               "converge", "bounds", "fixedpoint", "spectrum", "cocycle",
               "collision")


# ---------------------------------------------------------------------------
# configuration


DEFAULTS = {
    "family": "trig",
    "omega": 0.6841353647950825,      # golden-tuned defaults
    "c": 0.45186614990234375,
    "beta": 0.0,
    "phase": 0.0,
    "depth": 12,
    "degree": 32,
    "level": 3,
    "n_max": 8,
    "n_iter": 14,
    "steps": 100,
    "orbit_len": 200000,
    "delta_orbit": 10**6,
    "digits": "1",
    "delta": 0.3819660112501051,
    "deltas": "",
    "degrees": "32,48,64",
    "omega2": None,
    "c2": None,
    "beta2": None,
    "phase2": None,
    "precision_dps": 60,
}

_TYPES = {k: type(v) for k, v in DEFAULTS.items() if v is not None}
_TYPES.update({"omega2": float, "c2": float, "beta2": float,
               "phase2": float})


def load_config(path):
    """Flat key=value file; a [run] section header is optional."""
    cfg = dict(DEFAULTS)
    if path is None:
        return cfg
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    if not text.lstrip().startswith("["):
        text = "[run]\n" + text
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError("config parse failure: %s" % exc)
    for section in parser.sections():
        for key, raw in parser[section].items():
            if key not in cfg:
                raise ConfigError("unknown config key %r" % key)
            try:
                cfg[key] = _TYPES.get(key, str)(raw)
            except ValueError:
                raise ConfigError(
                    "config key %r: cannot parse %r as %s"
                    % (key, raw, _TYPES.get(key, str).__name__))
    if cfg["degree"] < 8:
        raise ConfigError("degree %d below minimum 8" % cfg["degree"])
    return cfg


def _parse_int_list(raw, what):
    try:
        return tuple(int(t) for t in str(raw).split(",") if t.strip())
    except ValueError:
        raise ConfigError("cannot parse %s list %r" % (what, raw))


def _parse_float_list(raw, what):
    try:
        return tuple(float(t) for t in str(raw).split(",") if t.strip())
    except ValueError:
        raise ConfigError("cannot parse %s list %r" % (what, raw))


def build_lift(cfg, suffix=""):
    family = cfg["family"]
    if family != "trig":
        raise ConfigError("cli drives the trig family; got %r" % family)

    def get(key):
        val = cfg.get(key + suffix)
        if val is None:
            raise ConfigError("config key %r required for the second map"
                              % (key + suffix))
        return val

    params = F.TrigParams(omega=get("omega"), c=get("c"),
                          beta=get("beta"), phase=get("phase"))
    return F.trig_lift(params)


# ---------------------------------------------------------------------------
# experiments


def run_rotnum(cfg, out):
    lift = build_lift(cfg)
    value, cf = F.rotation_number(lift, depth=cfg["depth"])
    digits = cf.digits(cfg["depth"])
    L.write_csv(out / "rotnum.csv",
                ["a%d" % j for j in range(len(digits))],
                [tuple(digits)])
    return ["rotnum.csv"], {"value": value}


def run_signature(cfg, out):
    lift = build_lift(cfg)
    sig, value, err = F.map_signature(lift, n_orbit=cfg["delta_orbit"],
                                      depth=cfg["depth"])
    L.write_csv(out / "signature.csv",
                ["rho", "delta", "delta_err"],
                [(value, sig.delta, err)])
    return ["signature.csv"], {"digits": list(sig.rho.digits(cfg["depth"]))}


def run_partition(cfg, out):
    lift = build_lift(cfg)
    cells = F.dynamical_partition(lift, cfg["level"])
    L.write_csv(out / "partition.csv",
                ["index", "lo", "hi", "label"],
                [(idx, lo, hi, label) for lo, hi, label, idx in cells])
    return ["partition.csv"], {"cells": len(cells)}


def run_extract(cfg, out):
    lift = build_lift(cfg)
    pair = P.extract_pair(lift, cfg["level"], degree=cfg["degree"])
    rep = P.pair_validate(pair)
    L.write_csv(out / "extract.csv",
                ["level", "eta0", "xi0", "height", "commutation"],
                [(cfg["level"], pair.eta0, pair.xi0,
                  P._height_int(pair), rep.commutation_residual)])
    return ["extract.csv"], {"validation": {
        "ok": rep.ok,
        "commutation": rep.commutation_residual,
        "failures": list(rep.failures),
    }}


def run_renorm(cfg, out):
    lift = build_lift(cfg)
    pair = P.normalize(P.extract_pair(lift, 0, degree=cfg["degree"]),
                       degree=cfg["degree"])
    rows = []
    for n in range(cfg["n_max"] + 1):
        rows.append((n, pair.eta0, pair.xi0, P._height_int(pair)))
        if n < cfg["n_max"]:
            pair = P.renormalize(pair, degree=cfg["degree"])
    L.write_csv(out / "renorm.csv", ["n", "eta0", "xi0", "height"], rows)
    return ["renorm.csv"], {}


def run_converge(cfg, out):
    f1 = build_lift(cfg)
    f2 = build_lift(cfg, suffix="2")
    ns, ds, lam, r2 = L.convergence_experiment(f1, f2, n_max=cfg["n_max"],
                                               degree=cfg["degree"])
    L.write_csv(out / "convergence.csv", ["n", "distance"],
                list(zip(ns, [float(d) for d in ds])))
    return ["convergence.csv"], {"rate": lam, "r2": r2}


def run_bounds(cfg, out):
    lift = build_lift(cfg)
    rows = L.real_bounds_monitor(lift, n_max=cfg["n_max"],
                                 degree=cfg["degree"])
    L.write_csv(out / "bounds.csv", ["n", "ratio", "c1norm"],
                [(n, float(r), float(c)) for n, r, c in rows])
    return ["bounds.csv"], {}


def run_fixedpoint(cfg, out):
    lift = build_lift(cfg)
    pair, rep = L.fixed_point_refine(lift, n_iter=cfg["n_iter"],
                                     degree=cfg["degree"])
    L.write_csv(out / "fixedpoint.csv", ["n", "distance"],
                [(n, float(d)) for n, d in rep["iteration_history"]])
    return ["fixedpoint.csv"], {
        "residual": rep["residual"],
        "newton_residuals": rep["newton_residuals"],
        "heights": list(rep["heights"]),
    }


def run_spectrum(cfg, out):
    lift = build_lift(cfg)
    degrees = _parse_int_list(cfg["degrees"], "degrees")
    res = L.spectrum_sweep(lift, degrees=degrees, n_iter=cfg["n_iter"])
    rows = []
    meta = {}
    for d in degrees:
        sp, rep = res[d]
        for idx, ev in enumerate(sp.eigenvalues):
            rows.append((float(np.real(ev)), float(np.imag(ev)),
                         float(abs(ev)), idx, d))
        meta[str(d)] = {"unstable_count": sp.unstable_count,
                        "neutral_band": [str(z) for z in sp.neutral_band],
                        "degree_drift": sp.degree_drift,
                        "residual": rep["residual"]}
    L.write_csv(out / "spectrum.csv",
                ["re", "im", "modulus", "index", "degree"], rows)
    return ["spectrum.csv"], meta


def _snap_periodic_delta(cf, period, d0, dps):
    """Nearest delta fixed by `period` cocycle steps, at dps digits.

    The cocycle expands by 1/rho per step, so a fixed point seeded from a
    rounded double drifts to O(1) within ~50 steps; long orbits are only
    meaningful started from the root itself at extended precision.
    """
    import mpmath

    from .rotation import _mod_norm, gauss_shift

    with mpmath.workdps(dps):
        depth = 3 * dps

        def step_p(d):
            c, x = cf, d
            for _ in range(period):
                x = _mod_norm(x / c.mp_value(depth), R.NEAREST)
                c = gauss_shift(c)
            return x

        try:
            root = mpmath.findroot(lambda d: step_p(d) - d, mpmath.mpf(d0))
        except (ValueError, ZeroDivisionError):
            return None
        if abs(float(root) - d0) > 1e-6 or not 0.0 < float(root) < 1.0:
            return None
        return root


def run_cocycle(cfg, out):
    digits = _parse_int_list(cfg["digits"], "digits")
    if not digits:
        raise ConfigError("cocycle needs a nonempty digit word")
    cf = R.ContinuedFraction(period=digits)
    dps = cfg["precision_dps"]
    start = _snap_periodic_delta(cf, len(digits), cfg["delta"], dps)
    snapped = start is not None
    if not snapped:
        start = cfg["delta"]
    deltas = R.cocycle_orbit(cf, start, cfg["steps"], dps=dps)
    L.write_csv(out / "cocycle.csv", ["step", "delta"],
                [(k + 1, d) for k, d in enumerate(deltas)])
    ref = float(start)
    return ["cocycle.csv"], {"delta_start": ref,
                             "snapped": snapped,
                             "drift": max(abs(d - ref) for d in deltas)}


def run_collision(cfg, out):
    deltas = _parse_float_list(cfg["deltas"], "deltas")
    if not deltas:
        raise ConfigError("collision needs a nonempty delta list")
    digits = _parse_int_list(cfg["digits"], "digits")
    cf = R.ContinuedFraction(period=digits)
    targets = [R.Signature(cf, d) for d in deltas]
    rows = L.collision_probe(targets, degree=cfg["degree"],
                             n_iter=cfg["n_iter"])
    L.write_csv(out / "collision.csv",
                ["delta", "unstable_count", "angle"],
                [(float(r["delta"]),
                  -1 if r["unstable_count"] is None else r["unstable_count"],
                  float("nan") if r["angle"] is None else float(r["angle"]))
                 for r in rows])
    return ["collision.csv"], {"status": [r["status"] for r in rows]}


RUNNERS = {
    "rotnum": run_rotnum,
    "signature": run_signature,
    "partition": run_partition,
    "extract": run_extract,
    "renorm": run_renorm,
    "converge": run_converge,
    "bounds": run_bounds,
    "fixedpoint": run_fixedpoint,
    "spectrum": run_spectrum,
    "cocycle": run_cocycle,
    "collision": run_collision,
}


# ---------------------------------------------------------------------------
# driver


def make_parser():
    ap = argparse.ArgumentParser(
        prog="circren",
        description="renormalization experiments for bi-cubic circle maps")
    ap.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS,
                    help="experiment to run; omit for a manifest-only no-op")
    ap.add_argument("--config", default=None, help="INI config file")
    ap.add_argument("--out", default=".", help="output directory")
    ap.add_argument("--seed", type=int, default=0,
                    help="RNG seed for probe points (recorded in manifest)")
    ap.add_argument("--degree", type=int, default=None,
                    help="override the working degree from the config")
    ap.add_argument("--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    t0 = time.time()
    try:
        cfg = load_config(args.config)
        if args.degree is not None:
            if args.degree < 8:
                raise ConfigError("degree %d below minimum 8" % args.degree)
            cfg["degree"] = args.degree
        cfg["seed"] = args.seed
        cfg["subcommand"] = args.subcommand or ""
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        np.random.seed(args.seed)

        artifacts, extra = [], {}
        if args.subcommand is not None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", CollisionWarning)
                artifacts, extra = RUNNERS[args.subcommand](cfg, out)
        manifest_cfg = dict(cfg)
        manifest_cfg.update({"results": extra})
        L.write_manifest(out / "manifest.json", manifest_cfg, artifacts, t0)
        if args.verbose:
            for name in artifacts + ["manifest.json"]:
                print(out / name)
        return 0
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2
    except NumericalError as exc:
        print("numerical error: %s" % exc, file=sys.stderr)
        return 3
    except (StructuralError, CircrenError) as exc:
        print("structural error: %s" % exc, file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
