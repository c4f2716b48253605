"""Command-line interface.

Exit status is 0 when every check passes, 2 when a check fails and 1 on a
usage or configuration error.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import families
from .experiments import CSV_FIELDS, ConfigError, ExperimentConfig, ExperimentRecord, run
from .interp import (
    CoupleSpec,
    InterpParams,
    ParameterError,
    identification_json,
    k_functional_grid,
    verify_identification,
)
from .plap import ConvergenceError, GradientField, Grid, PotentialSpec, solve_weak
from .rearrange import DivergenceError, SimpleFunction
from .spaces import SpaceSpec, SpecError, embedding_report, equivalence_report, space_norm


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _load_text(text):
    """Inline JSON, or the contents of a file when ``text`` names one."""
    if os.path.isfile(text):
        with open(text, encoding="utf-8") as fh:
            return fh.read()
    return text


def _json(text, what):
    try:
        return json.loads(_load_text(text))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: invalid JSON ({exc.msg})") from None


def parse_function(text):
    """Simple function from JSON pieces, a file, or ``indicator:m``, ``const:c``, ``power:rho[,delta]``."""
    if ":" in text and not text.lstrip().startswith(("[", "{")) and not os.path.isfile(text):
        name, _, arg = text.partition(":")
        try:
            args = [float(a) for a in arg.split(",")]
        except ValueError:
            raise UsageError(f"function: bad arguments {arg!r}") from None
        if name == "indicator":
            return families.indicator(args[0])
        if name == "const":
            return SimpleFunction.from_pieces([(args[0], 1.0)])
        if name == "power":
            return families.power_log(args[0], args[1] if len(args) > 1 else 0.0)
        raise UsageError(f"function: unknown generator {name!r}")
    data = _json(text, "function")
    try:
        return SimpleFunction.from_json(data)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"function: {exc}") from None


def parse_family(desc, seed=None):
    kind = desc.get("kind")
    if kind == "power_log":
        return families.power_log_family(desc["rhos"], desc.get("deltas", [0.0]), desc.get("n", 2048))
    if kind == "random":
        return families.random_family(int(desc.get("count", 100)), seed if seed is not None else desc.get("seed", 0))
    if kind == "indicator":
        return families.indicator_family(int(desc.get("count", 12)))
    raise ConfigError(f"config.family.kind: unknown family {kind!r}")


def _grid_data(grid, text, seed):
    name, _, arg = text.partition(":")
    if name == "const":
        return grid.constant(float(arg or 1.0))
    if name == "random":
        from .experiments import sample_data
        return sample_data(grid, np.random.default_rng([seed or 0, int(arg or 0)]),
                           {"A": 20.0, "gamma_frac": [0.5, 0.9]}, 1.0)
    if name == "file":
        from .plap import GridFunction
        with open(arg, encoding="utf-8") as fh:
            g = GridFunction.from_json(fh.read())
        if g.grid != grid:
            raise UsageError("f: stored grid differs from the requested grid")
        return g
    raise UsageError(f"f: unknown datum {text!r}")


def _emit(args, payload_csv, payload_json):
    text = payload_csv if args.format == "csv" else payload_json
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _num_out(x):
    return x if math.isfinite(x) else str(x)


# ----------------------------------------------------------------------
# subcommands


def cmd_norm(args):
    f = parse_function(args.function)
    spec = SpaceSpec.from_dict(_json(args.space, "space"))
    try:
        v = space_norm(f, spec)
    except DivergenceError:
        v = math.inf
    _emit(args, f"norm\n{v!r}\n", json.dumps({"space": spec.to_dict(), "norm": _num_out(v)}))
    return 0


def cmd_kfunc(args):
    f = parse_function(args.function)
    couple = CoupleSpec.from_dict(_json(args.couple, "couple"))
    try:
        ts = np.array([float(t) for t in args.t.split(",")])
    except ValueError:
        raise UsageError("t: expected a comma-separated list of numbers") from None
    K = k_functional_grid(f, ts, couple)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "K"])
    for t, k in zip(ts, K):
        w.writerow([repr(float(t)), repr(float(k))])
    _emit(args, buf.getvalue(), json.dumps({"t": ts.tolist(), "K": K.tolist()}))
    return 0


def cmd_identify(args):
    couple = CoupleSpec.from_dict(_json(args.couple, "couple"))
    params = InterpParams(args.theta, args.q, args.alpha)
    text = identification_json(couple, params, args.gamma)
    _emit(args, text, text)
    return 0


def _rows_from_ratio_report(name, h, norms_a, norms_b, ratios, excluded, passed):
    recs, j = [], 0
    for i, (a, b) in enumerate(zip(norms_a, norms_b)):
        if i in excluded:
            recs.append(ExperimentRecord(name, h, str(i), a, b, math.nan, False, 0.0))
        else:
            r = ratios[j]
            j += 1
            recs.append(ExperimentRecord(name, h, str(i), a, b, r, passed and math.isfinite(r), 0.0))
    return recs


def cmd_verify(args):
    cfg = _json(args.config, "config")
    if not isinstance(cfg, dict):
        raise ConfigError("config: expected a JSON object")
    mode = cfg.get("mode")
    h = hashlib.sha256(json.dumps({**cfg, "seed": args.seed}, sort_keys=True).encode()).hexdigest()[:16]
    if "family" not in cfg:
        raise ConfigError("config.family: missing")
    fam = parse_family(cfg["family"], args.seed)
    budget = float(cfg.get("budget", 1e3))
    t0 = time.perf_counter()
    try:
        if mode == "identification":
            couple = CoupleSpec.from_dict(cfg["couple"])
            p = cfg.get("params", {})
            params = InterpParams(float(p.get("theta", 0.5)), float(p.get("q", 1.0)), float(p.get("alpha", 0.0)))
            rep = verify_identification(couple, params, fam, budget=budget)
            passed = rep.passed and rep.limit_ok
            recs = _rows_from_ratio_report("identification", h, rep.interp_norms, rep.space_norms, rep.ratios,
                                           rep.excluded, passed)
            summary = {"identified": rep.identified.to_dict(), "case": rep.case, "spread": rep.spread,
                       "quotients": {str(k): v for k, v in rep.quotients.items()}, "limit_ok": rep.limit_ok}
        elif mode in ("embedding", "equivalence"):
            a = SpaceSpec.from_dict(cfg["source" if mode == "embedding" else "a"])
            b = SpaceSpec.from_dict(cfg["target" if mode == "embedding" else "b"])
            rep = embedding_report(a, b, fam) if mode == "embedding" else equivalence_report(a, b, fam, budget)
            passed = rep.passed
            recs = _rows_from_ratio_report(mode, h, rep.norms_a, rep.norms_b, rep.ratios, rep.excluded, passed)
            summary = {k: v for k, v in rep.detail.items()}
        else:
            raise ConfigError("config.mode: expected identification, embedding or equivalence")
    except KeyError as exc:
        raise ConfigError(f"config.{exc.args[0]}: missing") from None
    dt = time.perf_counter() - t0
    for r in recs:
        r.seconds = dt / max(len(recs), 1)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in recs:
        w.writerow(r.row())
    payload = json.dumps({"config_hash": h, "records": [r.to_dict() for r in recs], "summary": summary,
                          "passed": passed}, default=float)
    _emit(args, buf.getvalue(), payload)
    return 0 if passed else 2


def cmd_solve(args):
    grid = Grid.disk(args.n) if args.mask == "disk" else Grid(args.dim, args.n)
    V = PotentialSpec(args.potential_c, args.potential_m1 if args.potential_m1 is not None else max(args.p - 1.0, 1e-12))
    f = _grid_data(grid, args.f, args.seed)
    try:
        u = solve_weak(grid, args.p, V, f, args.tol)
    except ConvergenceError as exc:
        sys.stderr.write(f"solve: {exc}\n")
        return 2
    grad = GradientField.of(u)
    if args.out:
        with open(args.out + "_solution.json", "w", encoding="utf-8") as fh:
            fh.write(u.to_json())
        with open(args.out + "_gradient.json", "w", encoding="utf-8") as fh:
            fh.write(json.dumps({"grid": grid.header(), "vectors": grad.vectors.tolist()}))
    summary = {"max_u": u.max_abs(), "iterations": u.info.iterations, "residual": u.info.residual,
               "grad_max": float(np.max(grad.magnitude)) if grad.magnitude.size else 0.0}
    sys.stdout.write(json.dumps(summary) + "\n")
    return 0


def _experiment(kind):
    def cmd(args):
        overrides = {"seed": args.seed, "out": args.out}
        d = _json(args.config, "config") if args.config else {}
        if not isinstance(d, dict):
            raise ConfigError("config: expected a JSON object")
        cfg = ExperimentConfig.from_dict({"kind": kind, **d}, **overrides)
        if cfg.kind != kind:
            raise ConfigError(f"config.kind: expected {kind!r} for this subcommand")
        rep = run(cfg)
        _emit(args, rep.to_csv(), rep.to_json())
        return 0 if rep.passed else 2
    return cmd


def build_parser():
    parser = _Parser(prog="rispace", description="Rearrangement-invariant norms, interpolation and p-Laplacian experiments.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON configuration (inline or a file path)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        return p

    p = common(sub.add_parser("norm", help="norm of a simple function"))
    p.add_argument("--function", required=True)
    p.add_argument("--space", required=True)
    p.set_defaults(func=cmd_norm)

    p = common(sub.add_parser("kfunc", help="K-functional on a list of t values"))
    p.add_argument("--function", required=True)
    p.add_argument("--couple", required=True)
    p.add_argument("--t", required=True, help="comma-separated t values")
    p.set_defaults(func=cmd_kfunc)

    p = common(sub.add_parser("identify", help="identify an interpolation space"))
    p.add_argument("--couple", required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.0)
    p.set_defaults(func=cmd_identify)

    p = common(sub.add_parser("verify", help="identification, embedding or equivalence sweep"))
    p.set_defaults(func=cmd_verify, format="csv")

    p = common(sub.add_parser("solve", help="solve a p-Laplacian Dirichlet problem"))
    p.add_argument("--dim", type=int, choices=(1, 2), default=1)
    p.add_argument("--n", type=int, default=1024, help="cells per axis")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--f", default="const:1", help="const:c, random:k or file:path")
    p.add_argument("--mask", choices=("square", "disk"), default="square")
    p.add_argument("--potential-c", type=float, default=0.0)
    p.add_argument("--potential-m1", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_solve)

    for kind, name, text in (("holder", "holder", "Hoelder-constant experiment"),
                             ("table", "table", "regularity table"),
                             ("bounds", "bounds", "boundedness checks")):
        p = common(sub.add_parser(name, help=text))
        p.set_defaults(func=_experiment(kind), format="csv")
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help(sys.stderr)
            return 1
        if args.command == "verify" and not args.config:
            raise UsageError("verify needs --config")
        return args.func(args)
    except (UsageError, ConfigError, SpecError, ParameterError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
