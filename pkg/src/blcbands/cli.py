"""Command-line front end.

Subcommands: ``band`` (confidence band from data), ``check`` (shape
diagnostics for an analytic family), ``functionals`` (bounds on moments and
moment generating functions from a band), ``quantile`` (Monte Carlo critical
values), ``simulate`` (coverage studies).

Output is tab-delimited text with a one-line header plus a ``<out>.meta``
sidecar echoing the configuration and library versions, so a rerun with the
same flags is byte-identical.  Floats are written with ``repr`` and parse
back to the same IEEE value.  Exit status: 0 success (band feasible),
2 band infeasible (a valid statistical conclusion, not an error), 1 error.
"""

import argparse
import math
import sys
from dataclasses import dataclass, field

import numpy as np
import scipy

from . import __version__
from ._backend import USING_COMPILED_KERNELS
from .bands import BandSpec, ks_band, massart_kappa, mc_quantile, odw_band, wks_band
from .checks import check_blc_iii, check_blc_iv, check_grid
from .core import BandFn, Grid, Sample, build_grid
from .families import exponential, logistic, mixture_normal, normal, sine_density
from .functionals import (
    band_to_loglinear,
    loglinear_from_band,
    mgf_bounds,
    moment_bounds,
)
from .refine import refine_blc
from .sim import run_coverage

__all__ = ["CliError", "RunConfig", "ingest", "main"]

_BUILDERS = {"KS": ks_band, "WKS": wks_band, "ODW": odw_band}


class CliError(Exception):
    """User-facing failure: bad flags, unreadable input, impossible request."""


class _Parser(argparse.ArgumentParser):
    # route all argparse failures through CliError so main() exits 1, not 2
    def error(self, message):
        raise CliError(message)


@dataclass
class RunConfig:
    """Parsed invocation; numeric ranges are validated by the wrapped
    modules."""

    command: str
    out: str
    input: str | None = None
    band: str = "KS"
    alpha: float = 0.1
    gamma: float = 0.4
    nu: float = 3.0
    grid_fill: int = 512
    margin: float = 0.5
    transform: str = "none"
    censor_offset: float = 0.0
    seed: int = 0
    reps: int = 100_000
    kappa: float | None = None
    # subcommand extras
    n: int | None = None
    family: str | None = None
    delta: float | None = None
    k: int | None = None
    a: float | None = None
    points: int = 2001
    t_list: tuple = ()
    moments: tuple = ()
    center: float = 0.0
    band_file: str | None = None
    cal_reps: int = 100_000
    extra: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# ingestion


def ingest(path: str, transform: str = "none", censor_offset: float = 0.0) -> Sample:
    """Read one observation per line (or a two-column lower/upper interval),
    apply the transform, and attach censoring intervals.

    With ``censor_offset > 0`` each single-column value ``y`` is only known
    to lie in ``(y - censor_offset, y + censor_offset)``; the interval is
    formed on the raw scale and then transformed, so under ``log10`` the
    lower endpoint must stay positive.  Lines starting with ``#`` and blank
    lines are skipped; parse errors report the line number.
    """
    if transform not in ("none", "log10"):
        raise CliError(f"unknown transform {transform!r} (choose none or log10)")
    if not censor_offset >= 0.0:
        raise CliError("censor offset must be >= 0")

    def trans(v, lineno):
        if transform == "none":
            return v
        if v <= 0.0:
            raise CliError(f"{path}:{lineno}: log10 requires positive values (got {v:g})")
        return math.log10(v)

    rows = []
    ncols = None
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            try:
                nums = [float(p) for p in parts]
            except ValueError:
                raise CliError(f"{path}:{lineno}: cannot parse {s!r}") from None
            if not all(math.isfinite(v) for v in nums):
                raise CliError(f"{path}:{lineno}: values must be finite")
            if len(nums) not in (1, 2):
                raise CliError(
                    f"{path}:{lineno}: expected 1 or 2 columns, got {len(nums)}"
                )
            if ncols is None:
                ncols = len(nums)
            elif len(nums) != ncols:
                raise CliError(f"{path}:{lineno}: mixed 1- and 2-column records")
            if ncols == 2:
                if censor_offset > 0.0:
                    raise CliError(
                        f"{path}:{lineno}: censor offset applies to "
                        "single-column input only"
                    )
                lo, hi = nums
                if not lo < hi:
                    raise CliError(f"{path}:{lineno}: interval needs lower < upper")
            elif censor_offset > 0.0:
                lo, hi = nums[0] - censor_offset, nums[0] + censor_offset
            else:
                lo = hi = None
            rows.append((lineno, nums[0], lo, hi))
    if not rows:
        raise CliError(f"{path}: no data rows")

    censored = rows[0][2] is not None
    values = np.empty(len(rows))
    c_lo = np.empty(len(rows)) if censored else None
    c_hi = np.empty(len(rows)) if censored else None
    for i, (lineno, y, lo, hi) in enumerate(rows):
        if censored:
            c_lo[i] = trans(lo, lineno)
            c_hi[i] = trans(hi, lineno)
            values[i] = 0.5 * (c_lo[i] + c_hi[i])
        else:
            values[i] = trans(y, lineno)
    return Sample(values, censor_lo=c_lo, censor_hi=c_hi)


# ---------------------------------------------------------------------------
# output plumbing


def _fmt(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (tuple, list, np.ndarray)):
        return ",".join(_fmt(x) for x in v)
    return repr(float(v))


def _write_table(out: str, header, rows) -> None:
    try:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write("\t".join(header) + "\n")
            for row in rows:
                fh.write("\t".join(_fmt(v) for v in row) + "\n")
    except OSError as exc:
        raise CliError(f"cannot write {out}: {exc}") from exc


def _write_meta(config: RunConfig, **extra) -> None:
    pairs = [
        ("command", config.command),
        ("input", config.input),
        ("out", config.out),
        ("band", config.band),
        ("alpha", config.alpha),
        ("gamma", config.gamma),
        ("nu", config.nu),
        ("grid_fill", config.grid_fill),
        ("margin", config.margin),
        ("transform", config.transform),
        ("censor_offset", config.censor_offset),
        ("seed", config.seed),
        ("reps", config.reps),
    ]
    pairs += sorted(extra.items())
    pairs += [
        ("version", __version__),
        ("numpy", np.__version__),
        ("scipy", scipy.__version__),
        ("backend", "compiled" if USING_COMPILED_KERNELS else "pure-python"),
    ]
    path = config.out + ".meta"
    try:
        with open(path, "w", encoding="utf-8") as fh:
            for key, val in pairs:
                fh.write(f"{key}={_fmt(val)}\n")
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# shared pipeline pieces


def _resolve_kappa(config: RunConfig, n: int) -> float:
    if config.kappa is not None:
        return config.kappa
    if config.band == "KS":
        return massart_kappa(config.alpha)
    return mc_quantile(
        config.band,
        n,
        config.alpha,
        reps=config.reps,
        seed=config.seed,
        gamma=config.gamma,
        nu=config.nu,
    )


def _raw_band(config: RunConfig):
    sample = ingest(config.input, config.transform, config.censor_offset)
    kappa = _resolve_kappa(config, sample.n)
    spec = BandSpec(
        kind=config.band, alpha=config.alpha, kappa=kappa,
        gamma=config.gamma, nu=config.nu,
    )
    grid = build_grid(sample, n_fill=config.grid_fill, margin_frac=config.margin)
    return grid, _BUILDERS[config.band](sample, spec, grid), kappa


def _build_family(config: RunConfig):
    fam = config.family
    if fam == "normal":
        return normal()
    if fam == "logistic":
        return logistic()
    if fam == "exponential":
        return exponential()
    if fam == "mixture":
        if config.delta is None:
            raise CliError("--family mixture requires --delta")
        return mixture_normal(config.delta)
    if fam == "sine":
        if config.k is None or config.a is None:
            raise CliError("--family sine requires --k and --a")
        return sine_density(config.k, config.a)
    raise CliError(f"unknown family {fam!r}")


def _read_band_file(path: str) -> BandFn:
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    with fh:
        header = fh.readline().split()
        cols = {name: i for i, name in enumerate(header)}
        if "x" not in cols:
            raise CliError(f"{path}: missing 'x' column")
        if "refined_lower" in cols and "refined_upper" in cols:
            lo_c, hi_c = cols["refined_lower"], cols["refined_upper"]
        elif "lower" in cols and "upper" in cols:
            lo_c, hi_c = cols["lower"], cols["upper"]
        else:
            raise CliError(f"{path}: need refined_lower/refined_upper or lower/upper")
        xs, los, his = [], [], []
        for lineno, line in enumerate(fh, 2):
            s = line.strip()
            if not s:
                continue
            parts = s.split()
            try:
                xs.append(float(parts[cols["x"]]))
                los.append(float(parts[lo_c]))
                his.append(float(parts[hi_c]))
            except (ValueError, IndexError):
                raise CliError(f"{path}:{lineno}: cannot parse band row") from None
    if any(math.isnan(v) for v in los + his):
        raise CliError(f"{path}: band rows contain nan (infeasible band?)")
    return BandFn(Grid(np.array(xs)), np.array(los), np.array(his))


# ---------------------------------------------------------------------------
# subcommands (each returns the process exit status)


def cmd_band(config: RunConfig) -> int:
    grid, raw, kappa = _raw_band(config)
    res = refine_blc(raw)
    if res.feasible:
        ref_lo, ref_hi = res.band.lower, res.band.upper
    else:
        ref_lo = ref_hi = np.full(grid.m, math.nan)
    header = ["x", "raw_lower", "raw_upper", "refined_lower", "refined_upper",
              "feasible", "iterations"]
    rows = [
        (grid.points[i], raw.lower[i], raw.upper[i], ref_lo[i], ref_hi[i],
         res.feasible, res.iterations)
        for i in range(grid.m)
    ]
    _write_table(config.out, header, rows)
    _write_meta(config, kappa=kappa, feasible=res.feasible,
                iterations=res.iterations, converged=res.converged)
    return 0 if res.feasible else 2


def cmd_check(config: RunConfig) -> int:
    dist = _build_family(config)
    x = check_grid(dist, num=config.points)
    rows = []
    for name, verdict in (
        ("hazard-monotonicity", check_blc_iii(dist, x)),
        ("density-derivative", check_blc_iv(dist, x)),
    ):
        rows.append((name, verdict.passed, verdict.where, verdict.margin,
                     verdict.detail or "-"))
    header = ["check", "passed", "where", "margin", "detail"]
    _write_table(config.out, header, rows)
    _write_meta(config, family=config.family, delta=config.delta, k=config.k,
                a=config.a, points=config.points)
    return 0


def cmd_functionals(config: RunConfig) -> int:
    if (config.band_file is None) == (config.input is None):
        raise CliError("functionals needs a data file or --band-file (not both)")
    if config.band_file is not None:
        # band files hold already-refined boundaries; re-refining would only
        # trip on the rounding noise of the probability-scale round trip
        llb = loglinear_from_band(_read_band_file(config.band_file))
        kappa = None
    else:
        _, raw, kappa = _raw_band(config)
        res = refine_blc(raw)
        if not res.feasible:
            _write_table(config.out, ["quantity", "arg", "lo", "hi"], [])
            _write_meta(config, kappa=kappa, feasible=False)
            return 2
        llb = band_to_loglinear(res)
    rows = []
    for t in config.t_list:
        b = mgf_bounds(llb, t)
        rows.append(("mgf", t, b.lo, b.hi))
    for k in config.moments:
        b = moment_bounds(llb, k, center=config.center)
        rows.append(("moment", k, b.lo, b.hi))
    _write_table(config.out, ["quantity", "arg", "lo", "hi"], rows)
    _write_meta(config, kappa=kappa, feasible=True, center=config.center,
                rate_left=llb.rate_left, rate_right=llb.rate_right)
    return 0


def cmd_quantile(config: RunConfig) -> int:
    if config.n is None:
        raise CliError("quantile requires --n")
    kappa = mc_quantile(
        config.band, config.n, config.alpha,
        reps=config.reps, seed=config.seed,
        gamma=config.gamma, nu=config.nu,
    )
    header = ["kind", "n", "alpha", "reps", "seed", "kappa"]
    rows = [(config.band, config.n, config.alpha, config.reps, config.seed, kappa)]
    _write_table(config.out, header, rows)
    _write_meta(config, kappa=kappa, n=config.n)
    return 0


def cmd_simulate(config: RunConfig) -> int:
    if config.n is None:
        raise CliError("simulate requires --n")
    dist = _build_family(config)
    report = run_coverage(
        dist, config.n, config.alpha, config.band, config.reps,
        seed=config.seed, gamma=config.gamma, nu=config.nu,
        n_fill=config.grid_fill, margin_frac=config.margin,
        cal_reps=config.cal_reps,
    )
    header = ["scenario", "kind", "n", "alpha", "reps", "seed", "kappa",
              "coverage_raw", "coverage_refined", "infeasible_rate",
              "disagreements", "probe_quantiles", "median_width_raw",
              "median_width_refined"]
    rows = [(report.scenario, report.kind, report.n, report.alpha, report.reps,
             report.seed, report.kappa, report.coverage_raw,
             report.coverage_refined, report.infeasible_rate,
             report.disagreements, report.probe_quantiles,
             report.median_width_raw, report.median_width_refined)]
    _write_table(config.out, header, rows)
    _write_meta(config, family=config.family, delta=config.delta, k=config.k,
                a=config.a, n=config.n, cal_reps=config.cal_reps,
                kappa=report.kappa)
    return 0


_DISPATCH = {
    "band": cmd_band,
    "check": cmd_check,
    "functionals": cmd_functionals,
    "quantile": cmd_quantile,
    "simulate": cmd_simulate,
}


# ---------------------------------------------------------------------------
# argument parsing


def _float_list(text: str):
    try:
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise CliError(f"cannot parse list {text!r}") from None


def _int_list(text: str):
    try:
        return tuple(int(p) for p in text.split(",") if p.strip())
    except ValueError:
        raise CliError(f"cannot parse list {text!r}") from None


def _build_parser() -> _Parser:
    top = _Parser(prog="blcbands", description=__doc__.split("\n\n")[0])
    sub = top.add_subparsers(dest="command", required=True, metavar="command")

    common = _Parser(add_help=False)
    common.add_argument("--out", required=True, help="output file path")
    common.add_argument("--band", choices=["ks", "wks", "odw"], default="ks")
    common.add_argument("--alpha", type=float, default=0.1)
    common.add_argument("--gamma", type=float, default=0.4)
    common.add_argument("--nu", type=float, default=3.0)
    common.add_argument("--seed", type=int, default=0)

    data = _Parser(add_help=False)
    data.add_argument("--grid-fill", type=int, default=None,
                      help="filler points added between data min and max")
    data.add_argument("--margin", type=float, default=0.5,
                      help="grid margin as a fraction of the data range")
    data.add_argument("--transform", choices=["none", "log10"], default="none")
    data.add_argument("--censor-offset", type=float, default=0.0)
    data.add_argument("--kappa", type=float, default=None,
                      help="override the calibrated critical value")
    data.add_argument("--reps", type=int, default=100_000,
                      help="Monte Carlo repetitions for calibration")

    family = _Parser(add_help=False)
    family.add_argument("--family", required=True,
                        choices=["normal", "logistic", "exponential",
                                 "mixture", "sine"])
    family.add_argument("--delta", type=float, default=None,
                        help="mixture separation parameter")
    family.add_argument("--k", type=int, default=None,
                        help="sine frequency parameter")
    family.add_argument("--a", type=float, default=None,
                        help="sine amplitude parameter")

    p = sub.add_parser("band", parents=[common, data],
                       help="confidence band for a CDF from data")
    p.add_argument("input", help="data file, one observation per line")

    p = sub.add_parser("check", parents=[common, family],
                       help="bi-log-concavity diagnostics for a family")
    p.add_argument("--points", type=int, default=2001)

    p = sub.add_parser("functionals", parents=[common, data],
                       help="moment / MGF bounds from a refined band")
    p.add_argument("input", nargs="?", default=None,
                   help="data file (omit when using --band-file)")
    p.add_argument("--band-file", default=None,
                   help="existing band table (output of the band subcommand)")
    p.add_argument("--t", type=_float_list, default=(-0.25, 0.25, 0.5),
                   help="comma-separated MGF arguments")
    p.add_argument("--moments", type=_int_list, default=(1, 2),
                   help="comma-separated moment orders")
    p.add_argument("--center", type=float, default=0.0,
                   help="moments are of (X - center)^k")

    p = sub.add_parser("quantile", parents=[common],
                       help="Monte Carlo critical value for a band kind")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=100_000)

    p = sub.add_parser("simulate", parents=[common, family],
                       help="coverage study against a known truth")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--reps", type=int, default=500,
                   help="simulation replications")
    p.add_argument("--cal-reps", type=int, default=100_000,
                   help="Monte Carlo repetitions for calibration")
    p.add_argument("--grid-fill", type=int, default=None)
    p.add_argument("--margin", type=float, default=0.5)

    return top


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    d = vars(args)
    fill_default = 128 if d["command"] == "simulate" else 512
    cfg = RunConfig(
        command=d["command"],
        out=d["out"],
        input=d.get("input"),
        band=d.get("band", "ks").upper(),
        alpha=d.get("alpha", 0.1),
        gamma=d.get("gamma", 0.4),
        nu=d.get("nu", 3.0),
        grid_fill=d.get("grid_fill") or fill_default,
        margin=d.get("margin", 0.5),
        transform=d.get("transform", "none"),
        censor_offset=d.get("censor_offset", 0.0),
        seed=d.get("seed", 0),
        reps=d.get("reps", 100_000),
        kappa=d.get("kappa"),
        n=d.get("n"),
        family=d.get("family"),
        delta=d.get("delta"),
        k=d.get("k"),
        a=d.get("a"),
        points=d.get("points", 2001),
        t_list=d.get("t", ()),
        moments=d.get("moments", ()),
        center=d.get("center", 0.0),
        band_file=d.get("band_file"),
        cal_reps=d.get("cal_reps", 100_000),
    )
    return cfg


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
        return _DISPATCH[config.command](config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
