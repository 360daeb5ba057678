"""Command-line front end.

    socpoly moment  --n 1 --M 1,10,100 --s 1,2
    socpoly dist    [--n 2 --M 6] [--x-min ... --x-max ... --x-points ... --x-log]
    socpoly tail    --n 1 --M 6 --X 1e-3,1e-2
    socpoly density [--theta-max 3 --theta-points 600]
    socpoly sample  --n 2 --M 6 --samples 1000 --seed 7
    socpoly verify  [--quick]

Every command accepts --format csv|json, --output PATH, --config FILE
(key=value lines; command-line flags win) and --dump-config, which prints the
fully resolved configuration in the same key=value form and exits.

Exit status: 0 on success, 1 when an argument violates a precondition, 2 when
``verify`` finds a failing check.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .ensemble import Model, SamplerConfig, derivative_values, sample
from .errors import DomainError
from .moments import EnsembleSpec, log_moment, moment_asymptotic, moment_exact
from .value_dist import (
    MellinContour,
    cdf_at,
    density_at,
    density_grid,
    small_x_coefficient,
    tail_probability,
)
from .level_density import scaled_one_level
from .verify import format_line, format_report, run_checks

EXIT_OK, EXIT_PRECONDITION, EXIT_VERIFY = 0, 1, 2

# Illustrative panels for the value-distribution figure: full curves for
# n = 1..4 at M = 6 and near-origin zooms for n = 2 and n = 4.
DEFAULT_DIST_PANELS = ((1, 6), (2, 6), (3, 6), (4, 6))
DEFAULT_ZOOM_PANELS = ((2, 6), (4, 6))
ZOOM_X_MIN = 1e-6
ZOOM_FRACTION_OF_MEAN = 0.1
TAIL_MASS = 1e-10

_CONTROL_KEYS = {"config", "dump_config", "command", "output"}


class PreconditionError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are precondition violations (exit 1), not argparse's exit 2
    def error(self, message):
        raise PreconditionError(message)


# ---------------------------------------------------------------------------
# argument types


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_list(text: str) -> list[float]:
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default="-", help="output file (default: stdout)")
    p.add_argument("--config", default=None, help="key=value file; flags override it")
    p.add_argument("--dump-config", action="store_true", help="print the resolved configuration and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="socpoly",
        description="Moments, value distributions and level densities for SO(N) with eigenvalues forced at 1.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moment", help="exact and large-M moments")
    p.add_argument("--n", type=_int_list, default=[1])
    p.add_argument("--M", type=_int_list, default=[1])
    p.add_argument("--s", type=_float_list, default=[1.0])
    _common(p)

    p = sub.add_parser("dist", help="value distribution P(n, M, x)")
    p.add_argument("--n", type=_int_list, default=None)
    p.add_argument("--M", type=_int_list, default=None)
    p.add_argument("--x-min", type=float, default=None)
    p.add_argument("--x-max", type=float, default=None)
    p.add_argument("--x-points", type=int, default=1600)
    p.add_argument("--x-log", type=_bool, nargs="?", const=True, default=False)
    p.add_argument("--contour-c", type=float, default=None, help="use a vertical line Re s = c")
    p.add_argument("--t-max", type=float, default=200.0)
    p.add_argument("--steps", type=int, default=4096)
    _common(p)

    p = sub.add_parser("tail", help="small-X probability P(|Lambda| <= X)")
    p.add_argument("--n", type=_int_list, default=[1])
    p.add_argument("--M", type=_int_list, default=[6])
    p.add_argument("--X", type=_float_list, default=[1e-3])
    _common(p)

    p = sub.add_parser("density", help="scaled one-level densities near the forced eigenvalue")
    p.add_argument("--n", type=_int_list, default=[1, 2, 3, 4, 5])
    p.add_argument("--theta-max", type=float, default=3.0)
    p.add_argument("--theta-points", type=int, default=600)
    _common(p)

    p = sub.add_parser("sample", help="Metropolis samples of the eigenangles")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--M", type=int, default=6)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--thinning", type=int, default=10)
    p.add_argument("--step-scale", type=float, default=None)
    p.add_argument("--model", choices=[m.value for m in Model], default=Model.INTERACTION.value)
    _common(p)

    p = sub.add_parser("verify", help="run the cross-validation suite")
    p.add_argument("--quick", type=_bool, nargs="?", const=True, default=False)
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    return parser


# ---------------------------------------------------------------------------
# config files


def _read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise PreconditionError(f"{path}:{lineno}: expected key=value")
            key, val = line.split("=", 1)
            out[key.strip().replace("-", "_")] = val.strip()
    return out


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command]
    raise KeyError(command)


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if args.config is None:
        return args
    values = _read_config(args.config)
    cmd = values.pop("command", args.command)
    if cmd != args.command:
        raise PreconditionError(f"config file is for '{cmd}', not '{args.command}'")
    sub = _subparser(parser, args.command)
    known = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, text in values.items():
        if key not in known or key in _CONTROL_KEYS:
            raise PreconditionError(f"unknown config key {key!r} for '{args.command}'")
        action = known[key]
        defaults[key] = None if text == "" else (action.type(text) if action.type else text)
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ",".join(_format_value(x) for x in v)
    return "" if v is None else str(v)


def dump_config(args: argparse.Namespace) -> str:
    lines = [f"command={args.command}"]
    for key in sorted(vars(args)):
        if key in _CONTROL_KEYS:
            continue
        lines.append(f"{key}={_format_value(getattr(args, key))}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def render(columns: list[str], rows: list[list], meta: dict, fmt: str) -> str:
    if fmt == "json":
        payload = {"metadata": meta, "columns": columns, "rows": [[_jsonable(v) for v in r] for r in rows]}
        return json.dumps(payload, indent=1) + "\n"
    out = [f"# {k}={_format_value(v)}" for k, v in meta.items()]
    out.append(",".join(columns))
    out.extend(",".join(_fmt(v) for v in r) for r in rows)
    return "\n".join(out) + "\n"


def _jsonable(v):
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.floating):
        return float(v)
    return v


def _write(text: str, path: str) -> None:
    if path in ("-", ""):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SOC_THREADS", "1")))
    except ValueError:
        return 1


def _spec(n: int, M: int) -> EnsembleSpec:
    try:
        return EnsembleSpec(n, M)
    except DomainError as exc:
        raise PreconditionError(str(exc))


# ---------------------------------------------------------------------------
# commands


def cmd_moment(args) -> tuple[list[str], list[list], dict]:
    rows = []
    for n in args.n:
        for M in args.M:
            spec = _spec(n, M)
            for s in args.s:
                if not s > -(n + 0.5):
                    raise PreconditionError(f"s = {s} must exceed -(n + 1/2) = {-(n + 0.5)}")
                log_exact = moment_exact(spec, s).log_modulus
                if M >= 1 and s + n + 0.5 > 0:
                    log_asym = moment_asymptotic(spec, s).log_modulus
                    asym, ratio = math.exp(log_asym), math.exp(log_exact - log_asym)
                else:
                    asym = ratio = math.nan
                rows.append([n, M, s, math.exp(log_exact), asym, ratio, log_exact])
    return ["n", "M", "s", "exact", "asymptotic", "ratio", "log_exact"], rows, {}


def _markov_x_max(spec: EnsembleSpec, mass: float = TAIL_MASS) -> float:
    # P(X > t) <= E X^k / t^k; take the best k and never exceed the support
    bounds = [math.exp((float(log_moment(spec.n, spec.M, k).real) - math.log(mass)) / k) for k in range(1, 13)]
    return min(min(bounds), math.exp(spec.log_support_max))


def default_x_grid(spec: EnsembleSpec, points: int, pilot: int = 160, log_share: float = 0.25) -> np.ndarray:
    """Grid for a full value-distribution panel.

    A quarter of the points are log-spaced from 1e-8 of the mean (to show
    the x^{n-1/2} law near the origin); the rest are placed by equidistributing
    |P''|^{1/3}, estimated on a coarse pilot grid, which minimises the
    trapezoid error of the emitted curve.
    """
    mean = math.exp(float(log_moment(spec.n, spec.M, 1.0).real))
    lo, hi = 1e-8 * mean, _markov_x_max(spec)
    xp = np.geomspace(lo, hi, pilot)
    p = density_grid(spec, xp).values
    h = np.diff(xp)
    d2 = 2 * np.diff(np.diff(p) / h) / (h[:-1] + h[1:])
    rho = np.abs(d2) ** (1.0 / 3.0)
    rho = np.concatenate([[rho[0]], rho, [rho[-1]]])
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (rho[:-1] + rho[1:]) * h)])
    n_log = max(int(points * log_share), 2)
    bulk = np.interp(np.linspace(0.0, cum[-1], points - n_log), cum, xp)
    return np.unique(np.concatenate([bulk, np.geomspace(lo, hi, n_log)]))


def _panels(args) -> list[tuple[str, int, int, np.ndarray]]:
    custom = args.n is not None or args.M is not None
    pairs = (
        [(n, M) for n in (args.n or [1]) for M in (args.M or [6])] if custom else list(DEFAULT_DIST_PANELS)
    )
    if args.x_points < 2:
        raise PreconditionError("--x-points must be at least 2")
    panels = []
    for n, M in pairs:
        spec = _spec(n, M)
        if spec.M < 1:
            raise PreconditionError("the value distribution needs M >= 1")
        if args.x_min is None and args.x_max is None:
            grid = default_x_grid(spec, args.x_points)
        else:
            lo = args.x_min if args.x_min is not None else 1e-6
            hi = args.x_max if args.x_max is not None else _markov_x_max(spec)
            if not 0 < lo < hi:
                raise PreconditionError("need 0 < x-min < x-max")
            grid = np.geomspace(lo, hi, args.x_points) if args.x_log else np.linspace(lo, hi, args.x_points)
        panels.append(("full", n, M, grid))
    if not custom and args.x_min is None and args.x_max is None:
        for n, M in DEFAULT_ZOOM_PANELS:
            mean = math.exp(float(log_moment(n, M, 1.0).real))
            grid = np.geomspace(ZOOM_X_MIN, ZOOM_FRACTION_OF_MEAN * mean, max(args.x_points // 4, 2))
            panels.append(("zoom", n, M, grid))
    return panels


def cmd_dist(args) -> tuple[list[str], list[list], dict]:
    contour = None
    if args.contour_c is not None:
        try:
            contour = MellinContour(args.contour_c, args.t_max, args.steps)
        except DomainError as exc:
            raise PreconditionError(str(exc))
        meta = {"contour": "vertical", "c": contour.c, "t_max": contour.t_max, "steps": contour.steps}
    else:
        meta = {"contour": "saddle-parabola"}
    rows = []
    panels = _panels(args)
    for idx, (kind, n, M, grid) in enumerate(panels):
        spec = _spec(n, M)
        with ThreadPoolExecutor(max_workers=_threads()) as pool:
            vals = list(pool.map(lambda x: density_at(spec, x, contour), grid))
        rows.extend([idx, kind, n, M, float(x), float(v)] for x, v in zip(grid, vals))
    meta["panels"] = len(panels)
    return ["panel", "kind", "n", "M", "x", "P"], rows, meta


def cmd_tail(args) -> tuple[list[str], list[list], dict]:
    rows = []
    for n in args.n:
        for M in args.M:
            spec = _spec(n, M)
            if spec.M < 1:
                raise PreconditionError("the tail law needs M >= 1")
            f = small_x_coefficient(spec)
            for X in args.X:
                if not X > 0:
                    raise PreconditionError(f"X must be positive, got {X}")
                with warnings.catch_warnings():
                    warnings.simplefilter("always")
                    approx = tail_probability(spec, X)
                rows.append([n, M, X, approx, cdf_at(spec, X), f])
    return ["n", "M", "X", "tail_approx", "cdf_numeric", "f"], rows, {}


def cmd_density(args) -> tuple[list[str], list[list], dict]:
    if args.theta_points < 1 or not args.theta_max > 0:
        raise PreconditionError("need --theta-points >= 1 and --theta-max > 0")
    for n in args.n:
        if n < 1:
            raise PreconditionError(f"scaled densities need n >= 1, got {n}")
    theta = args.theta_max * np.arange(1, args.theta_points + 1) / args.theta_points
    cols = [scaled_one_level(n, theta) for n in args.n]
    rows = [[float(t)] + [float(c[i]) for c in cols] for i, t in enumerate(theta)]
    return ["theta"] + [f"n{n}" for n in args.n], rows, {}


def cmd_sample(args) -> tuple[list[str], list[list], dict]:
    spec = _spec(args.n, args.M)
    if spec.M < 1:
        raise PreconditionError("nothing to sample when M = 0")
    if args.samples < 1:
        raise PreconditionError("--samples must be positive")
    try:
        cfg = SamplerConfig(
            seed=args.seed,
            burn_in=args.burn_in,
            thinning=args.thinning,
            step_scale=args.step_scale,
            chains=args.chains,
            model=Model(args.model),
        )
    except DomainError as exc:
        raise PreconditionError(str(exc))
    res = sample(spec, cfg, args.samples, workers=_threads())
    vals = derivative_values(spec, res.angles)
    rows = []
    for c in range(res.angles.shape[0]):
        for i in range(res.angles.shape[1]):
            rows.append([c, i] + [float(t) for t in res.angles[c, i]] + [float(vals[c, i])])
    meta = {"acceptance": [float(a) for a in res.acceptance]}
    cols = ["chain", "index"] + [f"theta_{j + 1}" for j in range(spec.M)] + ["value"]
    return cols, rows, meta


COMMANDS = {
    "moment": cmd_moment,
    "dist": cmd_dist,
    "tail": cmd_tail,
    "density": cmd_density,
    "sample": cmd_sample,
}


def _run_verify(args) -> int:
    checks = run_checks(quick=args.quick, seed=args.seed, progress=lambda c: print(format_line(c), file=sys.stderr))
    if args.output not in ("-", "") or args.format == "json":
        cols = ["check", "error", "tolerance", "passed"]
        rows = [[c.name, c.error, c.tolerance, str(c.passed).lower()] for c in checks]
        _write(render(cols, rows, {"quick": args.quick, "seed": args.seed}, args.format), args.output)
    else:
        print(format_report(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
        if args.dump_config:
            _write(dump_config(args), args.output)
            return EXIT_OK
        if args.command == "verify":
            return _run_verify(args)
        cols, rows, meta = COMMANDS[args.command](args)
        meta = {"command": args.command, **meta}
        _write(render(cols, rows, meta, args.format), args.output)
    except (PreconditionError, DomainError, OSError) as exc:
        print(f"socpoly {argv[0] if argv else ''}: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
