"""Command-line experiment runner.

Every command writes a plot-ready table (CSV by default, JSON with
``--format json``) to ``--out`` or stdout.  Exit status: 0 on success,
2 for bad input, 3 for numerical or convergence failures.
"""
import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import inference, minimal
from .errors import CtGrangerError, InputError
from .var_core import gc_instantaneous

EXIT_INPUT = 2
EXIT_NUMERIC = 3

PRESETS = {
    "reference": dict(a=1 / 5, b=1 / 6, c=1 / 8, rho=0.0, tau=30.0),
}


# ---------------------------------------------------------------- arguments

def parse_grid(text, name="grid"):
    """``start:stop:step`` (inclusive) or a comma-separated ascending list."""
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(t) for t in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError
            start, stop, step = parts
            n = int(math.floor((stop - start) / step + 1e-9))
            values = [start + i * step for i in range(n + 1)]
            values = [round(v, 12) for v in values]
        else:
            values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"cannot parse {name} {text!r}") from None
    if not values:
        raise InputError(f"{name} is empty")
    if any(not math.isfinite(v) for v in values) or np.any(np.diff(values) <= 0):
        raise InputError(f"{name} must be finite and strictly ascending")
    return values


def _params(args):
    base = dict(PRESETS[args.preset])
    for key in ("a", "b", "c", "rho", "tau"):
        val = getattr(args, key)
        if val is not None:
            base[key] = val
    return minimal.MinimalCtvarParams(**base)


def _model_flags(p):
    p.add_argument("--preset", choices=sorted(PRESETS), default="reference",
                   help="base parameter set (reference: a=1/5, b=1/6, c=1/8 per ms, tau=30 ms)")
    p.add_argument("--a", type=float, help="x relaxation rate (1/ms)")
    p.add_argument("--b", type=float, help="y relaxation rate (1/ms)")
    p.add_argument("--c", type=float, help="feedback coupling y -> x (1/ms)")
    p.add_argument("--rho", type=float, help="noise correlation")
    p.add_argument("--tau", type=float, help="causal delay (ms)")


def _output_flags(p):
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    ap = argparse.ArgumentParser(prog="ctgranger", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ct-curves", help="continuous-time GC against prediction horizon")
    _model_flags(p)
    p.add_argument("--h-grid", default="0:100:1", help="horizons in ms")
    _output_flags(p)

    p = sub.add_parser("subsample-sweep", help="subsampled GC against sample interval")
    _model_flags(p)
    p.add_argument("--dt-grid", default="1:60:1", help="sample intervals in ms")
    _output_flags(p)

    p = sub.add_parser("detectability", help="theoretical Type II error rates")
    _model_flags(p)
    p.add_argument("--dt-grid", default="1:60:1")
    p.add_argument("--T", default="2000", help="durations in ms (grid syntax)")
    p.add_argument("--alpha", type=float, default=0.05)
    _output_flags(p)

    p = sub.add_parser("validate", help="Monte Carlo check of estimates against theory")
    _model_flags(p)
    p.add_argument("--dt-grid", default="5,20,30,45")
    p.add_argument("--T", type=float, default=8000.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sim-dt", type=float, default=0.01, help="integration step (ms)")
    p.add_argument("--bonferroni", action="store_true", help="halve alpha for the two directions")
    _output_flags(p)

    p = sub.add_parser("analyze", help="GC analysis of a CSV time series")
    p.add_argument("input", help="CSV file: header row, one numeric row per observation")
    p.add_argument("--dt", type=float, required=True, help="sample interval (ms)")
    p.add_argument("--target", help="target column name (default: first column)")
    p.add_argument("--source", help="source column name (default: second column)")
    p.add_argument("--order", default="auto", help="'auto' (AIC) or a positive integer")
    p.add_argument("--p-max", type=int, default=20, help="largest order tried by AIC")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out", help="output path (default stdout)")
    return ap


# ---------------------------------------------------------------- output

def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_table(rows, columns, units, fmt, out):
    if fmt == "json":
        data = [{c: (bool(r[c]) if isinstance(r[c], (bool, np.bool_)) else r[c]) for c in columns}
                for r in rows]
        text = json.dumps(data, indent=1, default=float) + "\n"
    else:
        buf = io.StringIO()
        for line in units:
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in columns])
        text = buf.getvalue()
    _emit(text, out)


def _emit(text, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _param_line(p):
    return f"params: a={p.a!r} b={p.b!r} c={p.c!r} rho={p.rho!r} tau={p.tau!r}"


# ---------------------------------------------------------------- commands

def cmd_ct_curves(args):
    p = _params(args)
    h = np.array(parse_grid(args.h_grid, "h grid"))
    if h[0] < 0:
        raise InputError("horizons must be nonnegative")
    full = np.atleast_1d(minimal.mse_full_xx(p, h))
    red = np.atleast_1d(minimal.mse_reduced_xx(p, h))
    gc = np.atleast_1d(minimal.gc_horizon(p, h))
    rows = [dict(h=a, gc_yx_h=b, mse_full=c, mse_reduced=d) for a, b, c, d in zip(h, gc, full, red)]
    units = [_param_line(p), "h: ms; gc_yx_h: nats; mse_full, mse_reduced: x^2"]
    write_table(rows, ["h", "gc_yx_h", "mse_full", "mse_reduced"], units, args.format, args.out)


def _sweep_row(p, dt):
    ct = float(minimal.gc_horizon(p, dt))
    if p.rho == 0:
        f = minimal.subsampled_factorize_closed(p, dt)
        yx, xy, inst = minimal.subsampled_gc(p, dt)
        return dict(dt=dt, gc_yx_sub=yx, gc_yx_ct_at_dt=ct, gc_xy_sub=xy,
                    sigma_xx=f.sigma_xx / dt, sigma_r_xx=f.sigma_r_xx / dt, gc_inst=inst,
                    minphase_ok=bool(minimal.minphase_ok(p, dt)))
    full, rx, _ = minimal.subsampled_factorize_numeric(p, dt)
    yx, xy, inst = minimal.subsampled_gc_numeric(p, dt)
    return dict(dt=dt, gc_yx_sub=max(yx, 0.0), gc_yx_ct_at_dt=ct, gc_xy_sub=max(xy, 0.0),
                sigma_xx=full.sigma[0, 0], sigma_r_xx=rx.sigma[0, 0], gc_inst=inst,
                minphase_ok=bool(full.is_stable()))


def cmd_subsample_sweep(args):
    p = _params(args)
    dts = parse_grid(args.dt_grid, "dt grid")
    if dts[0] <= 0:
        raise InputError("sample intervals must be positive")
    rows = [_sweep_row(p, dt) for dt in dts]
    cols = ["dt", "gc_yx_sub", "gc_yx_ct_at_dt", "gc_xy_sub", "sigma_xx", "sigma_r_xx",
            "gc_inst", "minphase_ok"]
    units = [_param_line(p), "dt: ms; gc_*: nats; sigma_*: innovations intensity x^2/ms; "
             "minphase_ok: 1/0", "route: " + ("closed form" if p.rho == 0 else "numeric (Whittle)")]
    write_table(rows, cols, units, args.format, args.out)


def cmd_detectability(args):
    p = _params(args)
    dts = parse_grid(args.dt_grid, "dt grid")
    durations = parse_grid(args.T, "T grid")
    if dts[0] <= 0 or durations[0] <= 0:
        raise InputError("dt and T must be positive")
    rows = []
    for T in durations:
        for pt in inference.detectability_curve(p, T, args.alpha, dts):
            rows.append(dict(T=T, dt=pt.dt, m=pt.m, p=pt.order, gc_true=pt.gc_true, p_ii=pt.p_ii))
    units = [_param_line(p) + f" alpha={args.alpha!r}", "T, dt: ms; gc_true: nats; p_ii: probability"]
    write_table(rows, ["T", "dt", "m", "p", "gc_true", "p_ii"], units, args.format, args.out)


def cmd_validate(args):
    p = _params(args)
    dts = parse_grid(args.dt_grid, "dt grid")
    if dts[0] <= 0:
        raise InputError("sample intervals must be positive")
    res = inference.validate_sweep(p, dts, args.T, args.trials, args.alpha, args.seed,
                                   sim_dt=args.sim_dt, bonferroni=args.bonferroni)
    rows = [dict(dt=r.dt, mean_gc_debiased=r.mean_debiased, ci_lo=r.ci_lo, ci_hi=r.ci_hi,
                 gc_closed_form=inference.true_subsampled_gc(p, r.dt), type1=r.type1,
                 type2=r.type2, type2_theory=r.type2_theory, median_aic_order=r.median_order)
            for r in res]
    cols = ["dt", "mean_gc_debiased", "ci_lo", "ci_hi", "gc_closed_form", "type1", "type2",
            "type2_theory", "median_aic_order"]
    units = [_param_line(p) + f" T={args.T!r} trials={args.trials} alpha={args.alpha!r} seed={args.seed}",
             "dt: ms; gc columns: nats; type1/type2: fractions of trials"]
    write_table(rows, cols, units, args.format, args.out)


def read_series_csv(path):
    """Header row plus numeric rows; returns (names, m × n array)."""
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    with fh:
        # keep physical line numbers for error messages
        lines = [(i, line) for i, line in enumerate(fh, start=1)
                 if line.strip() and not line.lstrip().startswith("#")]
    if not lines:
        raise InputError(f"{path}: empty file")
    parsed = zip((i for i, _ in lines), csv.reader(line for _, line in lines))
    _, header = next(parsed)
    header = [h.strip() for h in header]
    if len(header) < 2 or len(set(header)) != len(header) or not all(header):
        raise InputError(f"{path}: header needs at least two distinct column names")
    rows = []
    for line, row in parsed:
        if len(row) != len(header):
            raise InputError(f"{path}: line {line}: expected {len(header)} fields, got {len(row)}")
        try:
            vals = [float(c) for c in row]
        except ValueError:
            raise InputError(f"{path}: line {line}: non-numeric value") from None
        if not all(math.isfinite(v) for v in vals):
            raise InputError(f"{path}: line {line}: non-finite value")
        rows.append(vals)
    if len(rows) < 3:
        raise InputError(f"{path}: too few observations")
    return header, np.array(rows)


def _column(names, key, default):
    if key is None:
        return default
    if key not in names:
        raise InputError(f"no column named {key!r}")
    return names.index(key)


def cmd_analyze(args):
    names, x = read_series_csv(args.input)
    t = _column(names, args.target, 0)
    s = _column(names, args.source, 1 if t != 1 else 0)
    if s == t:
        raise InputError("source and target must differ")
    names = [names[t], names[s]]
    data = inference.TimeSeriesData(x[:, [t, s]], args.dt)
    t, s = 0, 1
    if args.order == "auto":
        p_max = max(1, min(args.p_max, (data.m - 1) // (data.n + 1) - 1))
        order = inference.select_order_aic(data, p_max)
    else:
        try:
            order = int(args.order)
        except ValueError:
            raise InputError("--order must be 'auto' or a positive integer") from None
        if order < 1:
            raise InputError("--order must be positive")
    model, _ = inference.fit_var(data, order)
    estimates = []
    for src, tgt in ((s, t), (t, s)):
        e = inference.estimate_gc(data, [tgt], [src], model=model)
        estimates.append(dict(source=names[src], target=names[tgt], gc=e.value,
                              debiased=e.debiased, dof=e.dof, pvalue=e.pvalue))
    inst = gc_instantaneous(model.sigma[np.ix_([t, s], [t, s])], [0], [1]).value
    report = dict(order=order, dt=data.dt, m=data.m, estimates=estimates,
                  instantaneous=dict(gc=inst, pvalue=None))
    _emit(json.dumps(report, indent=1) + "\n", args.out)


COMMANDS = {
    "ct-curves": cmd_ct_curves,
    "subsample-sweep": cmd_subsample_sweep,
    "detectability": cmd_detectability,
    "validate": cmd_validate,
    "analyze": cmd_analyze,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except InputError as exc:
        print(f"ctgranger: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CtGrangerError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"ctgranger: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return 0


if __name__ == "__main__":
    sys.exit(main())
