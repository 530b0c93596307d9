"""
Command line interface.

Subcommands: validate, eval, table, plot, converge. Exit status is 0 on
success, 1 on a failed validation or an operator/signal mismatch, 2 on
usage errors.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import estimate_rate, fmt, pointwise_errors
from .kernels import parse_kernel, validate_kernel_pair
from .operators import OPERATORS, OperatorParams
from .quadrature import QuadratureSpec
from .signals import parse_signal
from .svg import line_plot

TABLE_Z = (0.3, 0.8, 1.5, 2.2, 2.8)
TABLE_N = (5, 10, 15, 20)
RATE_N = (5, 10, 20, 40, 80)
DEFAULT_DOMAIN = "0.1:3"
#: signals whose sample integrals are cut to DEFAULT_DOMAIN unless --domain says otherwise
DOMAIN_SIGNALS = ("f", "g")


@dataclass
class RunConfig:
    """Everything a run depends on; ``to_argv`` gives its textual form."""

    command: str
    operators: tuple[str, ...] = ("max-product",)
    signal: str = "f"
    kernel_phi: str = "bspline:2"
    kernel_psi: str = "fejer:pi:0"
    n_list: tuple[int, ...] = TABLE_N
    z_list: tuple[float, ...] | None = None
    z_grid: tuple[float, float, int] | None = None
    domain: tuple[float, float] | None = (0.1, 3.0)
    quad_tol: float = 1e-9
    panels: int = 64
    radius: float = 256.0
    out: str | None = None
    format: str | None = None
    jobs: int = 1

    def z_values(self) -> list[float]:
        if self.z_list is not None:
            return list(self.z_list)
        if self.z_grid is not None:
            lo, hi, count = self.z_grid
            return [float(z) for z in np.linspace(lo, hi, count)]
        raise ValueError("no z values configured")

    def params(self, n: int) -> OperatorParams:
        phi = parse_kernel(self.kernel_phi, "phi")
        psi = parse_kernel(self.kernel_psi, "psi")
        quad = QuadratureSpec(truncation_radius=self.radius, panels=self.panels, abs_tol=self.quad_tol)
        return OperatorParams(n=n, phi=phi, psi=psi, quad=quad, integration_domain=self.domain)

    def to_argv(self) -> list[str]:
        argv = [self.command, "--op", ",".join(self.operators), "--signal", self.signal,
                "--phi", self.kernel_phi, "--psi", self.kernel_psi,
                "--n", ",".join(str(n) for n in self.n_list)]
        if self.z_list is not None:
            argv += ["--z", ",".join(repr(float(z)) for z in self.z_list)]
        if self.z_grid is not None:
            lo, hi, count = self.z_grid
            argv += ["--z-grid", f"{lo!r}:{hi!r}:{count}"]
        argv += ["--domain", "none" if self.domain is None else f"{self.domain[0]!r}:{self.domain[1]!r}"]
        argv += ["--quad-tol", repr(self.quad_tol), "--panels", str(self.panels), "--radius", repr(self.radius),
                 "--jobs", str(self.jobs)]
        if self.out is not None:
            argv += ["--out", self.out]
        if self.format is not None:
            argv += ["--format", self.format]
        return argv


# ---------------------------------------------------------------------------
# argument parsing

def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("n values must be positive")
    return vals


def _float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError("z values must be positive")
    return vals


def _z_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}") from None
    if not (0 < lo < hi) or count < 2:
        raise argparse.ArgumentTypeError("need 0 < lo < hi and count >= 2")
    return lo, hi, count


def _domain(text: str):
    if text.strip().lower() == "auto":
        return "auto"
    if text.strip().lower() in ("none", "all", "full"):
        return None
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi or 'none', got {text!r}") from None
    if not 0 < lo < hi < math.inf:
        raise argparse.ArgumentTypeError("domain must satisfy 0 < lo < hi")
    return lo, hi


def _ops(text: str) -> tuple[str, ...]:
    ops = tuple(o.strip() for o in text.split(",") if o.strip())
    bad = [o for o in ops if o not in OPERATORS]
    if bad or not ops:
        raise argparse.ArgumentTypeError(f"unknown operator(s) {bad}; choose from {sorted(OPERATORS)}")
    return ops


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--phi", default="bspline:2", help="discrete kernel: bspline:<order> or fejer:<beta>:<t>")
    common.add_argument("--psi", default="fejer:pi:0", help="integral kernel identifier")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--op", type=_ops, default=("max-product",),
                     help="max-product, max-min, linear, kantorovich (comma list for plot)")
    run.add_argument("--signal", default="f", help="f, g, const:<c> or file:<path>")
    run.add_argument("--n", type=_int_list, default=None, help="comma list of n")
    zs = run.add_mutually_exclusive_group()
    zs.add_argument("--z", type=_float_list, default=None, help="comma list of evaluation points")
    zs.add_argument("--z-grid", type=_z_grid, default=None, help="lo:hi:count uniform grid")
    run.add_argument("--domain", type=_domain, default="auto",
                     help=f"integration domain lo:hi for the sample integrals, or 'none' for the whole half-line "
                          f"(default {DEFAULT_DOMAIN} for the built-in f and g, 'none' otherwise)")
    run.add_argument("--quad-tol", type=float, default=1e-9)
    run.add_argument("--panels", type=int, default=64, help="Simpson panels per log unit (even)")
    run.add_argument("--radius", type=float, default=256.0, help="explicit log-domain truncation radius")
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=("csv", "svg"), default=None)
    run.add_argument("--jobs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="expsampling",
                                     description="Max-product / max-min Durrmeyer exponential sampling operators")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="check kernel admissibility")
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--order", type=int, default=2, help="order of the discrete moment checked for phi")

    sub.add_parser("eval", parents=[common, run], help="evaluate an operator at points")
    sub.add_parser("table", parents=[common, run], help="pointwise absolute error table (CSV)")
    sub.add_parser("plot", parents=[common, run], help="SVG plot plus sample CSV")
    sub.add_parser("converge", parents=[common, run], help="empirical convergence rate")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cmd = args.command
    n_default = RATE_N if cmd == "converge" else TABLE_N
    z_list, z_grid = args.z, args.z_grid
    if z_list is None and z_grid is None:
        if cmd == "plot":
            z_grid = (0.05, 3.0, 301)
        elif cmd == "converge":
            z_grid = (0.3, 2.8, 20)
        else:
            z_list = TABLE_Z
    domain = args.domain
    if domain == "auto":
        domain = _domain(DEFAULT_DOMAIN) if args.signal.strip() in DOMAIN_SIGNALS else None
    return RunConfig(
        command=cmd, operators=args.op, signal=args.signal, kernel_phi=args.phi, kernel_psi=args.psi,
        n_list=args.n if args.n is not None else n_default, z_list=z_list, z_grid=z_grid, domain=domain,
        quad_tol=args.quad_tol, panels=args.panels, radius=args.radius, out=args.out, format=args.format,
        jobs=args.jobs,
    )


def parse_run_config(argv: list[str]) -> RunConfig:
    return config_from_args(build_parser().parse_args(argv))


# ---------------------------------------------------------------------------
# commands

def _write(text: str, out: str | None, stdout) -> None:
    if out is None:
        stdout.write(text)
    else:
        with open(out, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(text)


def cmd_validate(args, stdout) -> int:
    phi = parse_kernel(args.phi, "phi")
    psi = parse_kernel(args.psi, "psi")
    report = validate_kernel_pair(phi, psi, tol=args.tol, order=args.order)
    for line in report.lines():
        print(line, file=stdout)
    print("admissible" if report.passed else "NOT admissible", file=stdout)
    return 0 if report.passed else 1


def _check_fuzzy(cfg: RunConfig, signal, stderr) -> bool:
    if "max-min" in cfg.operators and not signal.is_fuzzy:
        print(f"error: max-min needs a [0, 1]-valued signal; {signal.name} declares {signal.range_bounds}",
              file=stderr)
        return False
    return True


def _report(cfg: RunConfig, op: str, signal):
    return pointwise_errors(op, signal, cfg.z_values(), cfg.n_list, cfg.params(cfg.n_list[0]), jobs=cfg.jobs)


def cmd_table(cfg: RunConfig, signal, stdout, stderr) -> int:
    if len(cfg.operators) != 1:
        print("error: table takes exactly one operator", file=stderr)
        return 2
    report = _report(cfg, cfg.operators[0], signal)
    for (i, j), msg in sorted(report.failures.items()):
        print(f"warning: z={report.z_values[i]} n={report.n_values[j]}: {msg}", file=stderr)
    _write(report.to_csv(), cfg.out, stdout)
    return 0


def cmd_plot(cfg: RunConfig, signal, stdout, stderr) -> int:
    z = cfg.z_values()
    reports = {op: _report(cfg, op, signal) for op in cfg.operators}
    exact = np.asarray(signal.evaluate(np.asarray(z)), dtype=float)
    series = [(f"{signal.name} (exact)", z, exact)]
    columns = [("exact", exact)]
    for op, rep in reports.items():
        for j, n in enumerate(rep.n_values):
            label = f"n={n}" if len(cfg.operators) == 1 else f"{op} n={n}"
            series.append((label, z, rep.approx[:, j]))
            columns.append((f"{op}_n{n}", rep.approx[:, j]))
    title = f"{' vs '.join(cfg.operators)} approximation of {signal.name}"
    svg = line_plot(series, title=title, xlabel="z", ylabel="value")

    buf = io.StringIO()
    buf.write("z," + ",".join(name for name, _ in columns) + "\n")
    for i, zi in enumerate(z):
        buf.write(fmt(zi) + "," + ",".join(fmt(col[i]) for _, col in columns) + "\n")

    out = Path(cfg.out if cfg.out is not None else "plot.svg")
    try:
        _write(svg, str(out), stdout)
        _write(buf.getvalue(), str(out.with_suffix(".csv")), stdout)
    except OSError as exc:
        print(f"error: cannot write {out}: {exc}", file=stderr)
        return 1
    print(f"wrote {out} and {out.with_suffix('.csv')}", file=stdout)
    return 0


def cmd_eval(cfg: RunConfig, signal, stdout, stderr) -> int:
    buf = io.StringIO()
    buf.write("op,z,n,approx,exact,abs_error\n")
    for op in cfg.operators:
        rep = _report(cfg, op, signal)
        err = rep.errors
        for i, zi in enumerate(rep.z_values):
            for j, n in enumerate(rep.n_values):
                buf.write(f"{op},{fmt(zi)},{n},{fmt(rep.approx[i, j])},{fmt(rep.exact[i])},{fmt(err[i, j])}\n")
        for (i, j), msg in sorted(rep.failures.items()):
            print(f"warning: z={rep.z_values[i]} n={rep.n_values[j]}: {msg}", file=stderr)
    _write(buf.getvalue(), cfg.out, stdout)
    return 0


def cmd_converge(cfg: RunConfig, signal, stdout, stderr) -> int:
    if len(cfg.operators) != 1:
        print("error: converge takes exactly one operator", file=stderr)
        return 2
    rep = _report(cfg, cfg.operators[0], signal)
    try:
        est = estimate_rate(rep)
    except ValueError as exc:
        print(f"error: {exc}", file=stderr)
        return 2 if "four" in str(exc) else 1
    if est.defined:
        print(f"slope={est.slope:.6f} intercept={est.intercept:.6f} r2={est.r_squared:.6f}", file=stdout)
    else:
        print("slope=undefined (zero error on the whole grid)", file=stdout)
    buf = io.StringIO()
    buf.write("n,sup_error\n")
    for n, e in zip(rep.n_values, rep.sup_errors()):
        buf.write(f"{n},{fmt(e)}\n")
    _write(buf.getvalue(), cfg.out, stdout)
    return 0


COMMANDS = {"table": cmd_table, "plot": cmd_plot, "eval": cmd_eval, "converge": cmd_converge}


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        parse_kernel(args.phi, "phi")
        parse_kernel(args.psi, "psi")
    except ValueError as exc:
        parser.error(str(exc))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if args.command == "validate":
            return cmd_validate(args, stdout)

        cfg = config_from_args(args)
        if not cfg.n_list:
            parser.error("--n must list at least one value")
        expected = "svg" if cfg.command == "plot" else "csv"
        if cfg.format not in (None, expected):
            parser.error(f"{cfg.command} writes {expected}, not {cfg.format}")
        if cfg.panels < 2 or cfg.panels % 2:
            parser.error("--panels must be a positive even integer")
        try:
            signal = parse_signal(cfg.signal)
        except (ValueError, OSError) as exc:
            parser.error(str(exc))
        if not _check_fuzzy(cfg, signal, stderr):
            return 1
        return COMMANDS[cfg.command](cfg, signal, stdout, stderr)


if __name__ == "__main__":
    sys.exit(main())
