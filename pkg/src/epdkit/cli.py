"""Command-line interface.

    epdkit solve --config FILE [--out FILE] [--reflect]
    epdkit verify --config FILE [--suite all|translation|epd|hankel]
    epdkit compare-routes --config FILE
    epdkit example --id 1|2 [--out FILE] [--reflect]

Exit status: 0 success, 1 a verification check failed, 2 invalid usage or
configuration, 3 a numerical or precondition failure in a solver.
"""
import argparse
import sys
import warnings

import numpy as np

from . import __version__
from ._backend import BACKEND
from .epd import classify, pde_residual, solve, solver_for
from .errors import ConfigError, EPDError, TruncationWarning, UsageError
from .gridfield import GridField
from .hankel import SpectralGrid, decay_check
from .scenario import example_config, load_config
from .verify import SUITES, route_equivalence, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3


def run_solve(cfg, residual=None):
    """Evaluate the scenario grid; returns a GridField with metadata."""
    spec = cfg.problem()
    regime = classify(spec)
    num = cfg.numerics
    meta = {
        "route": str(regime),
        "n": cfg.n,
        "gamma": ",".join(f"{g:.17g}" for g in cfg.gamma),
        "k": f"{cfg.k:.17g}",
        "datum": spec.datum.name,
        "config_sha256": cfg.digest,
        "quad_n": num.quad_n,
    }
    if cfg.window is not None:
        meta["window_scale"] = f"{cfg.window:.17g}"
    field = GridField.evaluate([a.values() for a in cfg.x_axes], cfg.t_axis.values(),
                               lambda x, t: solve(spec, x, t, num)[0], meta)
    if cfg.residual if residual is None else residual:
        field.metadata["max_residual"] = f"{_grid_residual(cfg, spec, field):.6e}"
    return field


def _grid_residual(cfg, spec, field):
    """Max PDE residual over interior grid points (at most 9 per axis)."""
    def pick(axis):
        inner = axis[(axis > 0)]
        if inner.size > 9:
            inner = inner[np.linspace(0, inner.size - 1, 9).round().astype(int)]
        return inner
    xs = [pick(a) for a in field.x_axes]
    ts = pick(field.t_axis)
    ts = ts[ts > 3 * cfg.numerics.fd_step] if ts.size else ts
    if not ts.size or not all(a.size for a in xs):
        return float("nan")
    mesh = np.meshgrid(ts, *xs, indexing="ij")
    x = np.stack([m.ravel() for m in mesh[1:]], axis=1)
    return float(np.max(pde_residual(spec, solver_for(spec, cfg.numerics), x, mesh[0].ravel(),
                                     cfg.numerics.fd_step)))


def _emit(field, out, reflect):
    if reflect:
        field = field.reflected()
    if out in (None, "-"):
        sys.stdout.write(field.to_csv())
    else:
        field.write_csv(out)
        print(f"wrote {out} ({field.values.size} values, route {field.metadata['route']})",
              file=sys.stderr)


def cmd_solve(args):
    cfg = load_config(args.config)
    _emit(run_solve(cfg), args.out or cfg.output_path, args.reflect)
    return EXIT_OK


def cmd_example(args):
    cfg = example_config(args.id)
    _emit(run_solve(cfg), args.out or cfg.output_path, args.reflect)
    return EXIT_OK


def _report(checks, header):
    for line in header:
        print(f"# {line}")
    print("check_name,status,measured,tolerance")
    for c in checks:
        print(c.line())
    return EXIT_FAIL if any(c.status == "fail" for c in checks) else EXIT_OK


def cmd_verify(args):
    cfg = load_config(args.config)
    checks = run_suites(cfg, args.suite)
    regime = classify(cfg.problem())
    return _report(checks, [f"route={regime}", f"config_sha256={cfg.digest}", f"backend={BACKEND}"])


def cmd_compare(args):
    cfg = load_config(args.config)
    if cfg.n != 1:
        raise UsageError("compare-routes needs n = 1 (the spectral route is one-dimensional)")
    grid = SpectralGrid.build(cfg.gamma[0], cfg.numerics.spectral_m, cfg.numerics.spectral_r)
    spec = cfg.problem()
    msg = decay_check(spec.datum.f, grid)
    if msg is not None and cfg.window is None:
        raise UsageError(f"{msg}. Set problem.window (for example 'problem.window = 8') "
                         "to compare a windowed datum, or choose a decaying preset")
    header = [f"route={classify(spec)}", f"spectral_modes={grid.modes}",
              f"spectral_radius={grid.radius:g}", f"config_sha256={cfg.digest}"]
    if cfg.window is not None:
        header.append(f"window_scale={cfg.window:g}")
    if msg is not None:
        header.append(f"truncation={msg}")
    return _report([route_equivalence(cfg, grid)], header)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="epdkit",
        description="Solve and cross-check the singular Euler-Poisson-Darboux Cauchy problem.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="evaluate a scenario on its grid and write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="output CSV path ('-' for stdout)")
    p.add_argument("--reflect", action="store_true", help="continue evenly to negative x and t")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run verification checks for a scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare-routes", help="spectral route against quadrature route (n = 1)")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("example", help="built-in worked examples")
    p.add_argument("--id", required=True, type=int, choices=(1, 2))
    p.add_argument("--out", help="output CSV path ('-' for stdout)")
    p.add_argument("--reflect", action="store_true", help="continue evenly to negative x and t")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default", TruncationWarning)
            return args.func(args)
    except (ConfigError, UsageError) as exc:
        print(f"epdkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except EPDError as exc:
        print(f"epdkit: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
