"""
Command-line interface.

Every command writes CSV (default) or JSON. CSV files start with ``#``
metadata lines carrying the resolved parameters, followed by a header row;
floats are printed with 12 significant digits. JSON output is
``{"metadata": {...}, "data": [{...}, ...]}`` with shortest round-trip floats.

Exit codes: 0 success, 2 invalid input, 3 singular matrix, 4 I/O failure.
Errors are reported on stderr as a one-line JSON object.
"""

import argparse
import io
import json
import math
import sys

import numpy as np

from . import __version__, analytics, ar1
from .core import TridiagSpec, full_inverse, inverse_element, inverse_factors, preset
from .errors import DimensionMismatch, DomainError, IndexOutOfRange, SingularMatrix

EXIT_OK, EXIT_INPUT, EXIT_SINGULAR, EXIT_IO = 0, 2, 3, 4
FULL_MAX_N = 5000


class InputError(Exception):
    """Bad flag combination or unreadable input data."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


# ---------------------------------------------------------------- output


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".12g")
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    return x


def render(columns, metadata, fmt):
    """Serialize named columns (dict of equal-length sequences) with metadata."""
    names = list(columns)
    rows = list(zip(*(columns[k] for k in names)))
    if fmt == "json":
        doc = {"metadata": _jsonable(metadata), "data": [_jsonable(dict(zip(names, r))) for r in rows]}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write("# %s: %s\n" % (key, json.dumps(_jsonable(value), sort_keys=True, allow_nan=False)))
    buf.write(",".join(names) + "\n")
    for r in rows:
        buf.write(",".join(_fmt(v) for v in r) + "\n")
    return buf.getvalue()


def read_series(text):
    """Parse a CSV/JSON document written by this tool; return ``(metadata, columns)``."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(stripped)
        data = doc.get("data", [])
        names = list(data[0]) if data else []
        return doc.get("metadata", {}), {k: [row[k] for row in data] for k in names}
    metadata, lines = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            try:
                metadata[key.strip()] = json.loads(value)
            except ValueError:
                metadata[key.strip()] = value.strip()
        elif line.strip():
            lines.append(line)
    if not lines:
        return metadata, {}
    names = lines[0].split(",")
    cols = {k: [] for k in names}
    for line in lines[1:]:
        for k, v in zip(names, line.split(",")):
            cols[k].append(float(v) if v else math.nan)
    return metadata, cols


# ---------------------------------------------------------------- parameters


def _add_spec_flags(p):
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b", type=int, choices=(-1, 1))
    p.add_argument("--c", type=float)
    p.add_argument("--d", type=float)
    p.add_argument("--e", type=float, default=1.0, help="off-diagonal magnitude (matrix is scaled to e=1)")
    p.add_argument("--preset", choices=("spline", "car", "ar1"))
    p.add_argument("--rho", type=float, help="CAR dependence parameter")
    p.add_argument("--phi", type=float, help="AR(1) coefficient")
    p.add_argument("--gamma", type=float, help="signal-to-noise ratio")


def _add_format_flags(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="output path (default stdout)")


def resolve_spec(args):
    """Return ``(spec, scale)``; the general matrix equals ``scale * spec``'s matrix."""
    if args.n < 1:
        raise InputError("--n must be >= 1")
    if args.preset:
        if any(v is not None for v in (args.b, args.c, args.d)) or args.e != 1.0:
            raise InputError("--preset cannot be combined with --b/--c/--d/--e")
        params = {}
        if args.preset == "car":
            params = {"rho": args.rho}
        elif args.preset == "ar1":
            params = {"phi": args.phi, "gamma": args.gamma}
        if any(v is None for v in params.values()):
            raise InputError("preset %s needs %s" % (args.preset, ", ".join("--" + k for k in params)))
        return preset(args.preset, args.n, **params), 1.0
    if args.c is None or args.d is None:
        raise InputError("give --c and --d (or --preset)")
    e = args.e
    if not (math.isfinite(e) and e > 0):
        raise InputError("--e must be a positive off-diagonal magnitude")
    b = 1 if args.b is None else args.b
    return TridiagSpec(args.n, b, args.c / e, args.d / e), e


def _spec_meta(command, spec, scale):
    return {
        "tool": "tridinv",
        "version": __version__,
        "command": command,
        "spec": spec.as_dict(),
        "offdiag_scale": scale,
    }


def _cfg_meta(command, cfg, **extra):
    meta = {"tool": "tridinv", "version": __version__, "command": command, "config": cfg.as_dict()}
    meta.update(extra)
    return meta


# ---------------------------------------------------------------- commands


def cmd_invert(args):
    spec, e = resolve_spec(args)
    meta = _spec_meta("invert", spec, e)
    if args.entry:
        i, j = args.entry
        f = inverse_factors(spec)
        return {"i": [i], "j": [j], "value": [inverse_element(f, i, j) / e]}, meta
    if args.factors:
        f = inverse_factors(spec)
        meta.update(denom=f.denom * e, growth=f.growth)
        return {
            "i": list(range(1, spec.n + 1)),
            "u": f.u,
            "v": f.v / e,
            "u_scaled": f.u_scaled,
            "v_scaled": f.v_scaled / e,
        }, meta
    if spec.n > FULL_MAX_N:
        raise InputError("--full refuses n > %d" % FULL_MAX_N)
    m = full_inverse(spec) / e
    cols = {"i": list(range(1, spec.n + 1))}
    for j in range(spec.n):
        cols["c%d" % (j + 1)] = m[:, j]
    return cols, meta


def cmd_rowsums(args):
    spec, e = resolve_spec(args)
    rs = analytics.row_sums(spec)
    meta = _spec_meta("rowsums", spec, e)
    meta.update(case=rs.case_tag, method=rs.method)
    return {"i": list(range(1, spec.n + 1)), "s": rs.s / e}, meta


def cmd_trace(args):
    spec, e = resolve_spec(args)
    rep = analytics.trace_report(spec)

    def scaled(x, p):
        return None if x is None else x / e ** p

    cols = {
        "n": [rep.n],
        "trace_inv": [rep.trace_inv / e],
        "trace_inv_sq": [rep.trace_inv_sq / e ** 2],
        "normalized_trace": [rep.normalized_trace / e],
        "normalized_trace_sq": [rep.normalized_trace_sq / e ** 2],
        "limit_normalized_trace": [scaled(rep.limit_normalized_trace, 1)],
        "limit_normalized_trace_sq": [scaled(rep.limit_normalized_trace_sq, 2)],
    }
    return cols, _spec_meta("trace", spec, e)


def cmd_fig1(args):
    if args.n < 1:
        raise InputError("--n must be >= 1")
    cfg = ar1.AR1Config.from_gamma(args.phi, args.gamma, args.n)
    w = ar1.w_opt_known_variances(cfg)
    lo, hi = ar1.w_opt_bounds(cfg)
    n = cfg.n
    meta = _cfg_meta("fig1", cfg, spec=ar1.ar1_spec(cfg).as_dict())
    return {"i": list(range(1, n + 1)), "w_opt": w, "lower": [lo] * n, "upper": [hi] * n}, meta


def parse_grid(text):
    """``'1000:10000:1000'`` (inclusive) or ``'10,20,50'``."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) == 2:
                parts.append(1)
            start, stop, step = parts
            if step <= 0:
                raise ValueError
            grid = list(range(start, stop + 1, step))
        else:
            grid = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError("bad --grid %r" % (text,))
    if not grid or min(grid) < 1:
        raise InputError("--grid needs positive integers")
    return grid


def cmd_fig2(args):
    grid = parse_grid(args.grid)
    rows = {"n": [], "mean_a_opt": [], "var_a_opt": [], "limit_mean": [], "limit_var": []}
    cfg = None
    for n in grid:
        cfg = ar1.AR1Config.from_gamma(args.phi, args.gamma, n)
        mean, var = ar1.a_opt_moments(cfg)
        rows["n"].append(n)
        rows["mean_a_opt"].append(mean)
        rows["var_a_opt"].append(var)
        rows["limit_mean"].append(ar1.a_opt_limit(cfg))
        rows["limit_var"].append(0.0)
    meta = {"tool": "tridinv", "version": __version__, "command": "fig2",
            "phi": args.phi, "gamma": args.gamma, "grid": grid}
    return rows, meta


def _model_config(args, n):
    if args.sigma_eps2 is None or not args.sigma_eps2 > 0:
        raise InputError("--sigma-eps2 must be positive")
    return ar1.AR1Config.from_gamma(args.phi, args.gamma, n, sigma_eps_sq=args.sigma_eps2, mu=args.mu)


def cmd_simulate(args):
    if args.n < 1:
        raise InputError("--n must be >= 1")
    cfg = _model_config(args, args.n)
    y = ar1.simulate(cfg, args.seed)
    return {"t": list(range(1, cfg.n + 1)), "y": y}, _cfg_meta("simulate", cfg, seed=args.seed)


def cmd_a_opt(args):
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    try:
        meta_in, cols = read_series(text)
    except (ValueError, KeyError) as exc:
        raise InputError("cannot parse input: %s" % exc)
    if args.column not in cols:
        raise InputError("input has no column %r" % args.column)
    y = np.array(cols[args.column], dtype=float)
    base = dict(meta_in.get("config") or {})
    for key, flag in (("phi", args.phi), ("gamma", args.gamma), ("sigma_eps_sq", args.sigma_eps2), ("mu", args.mu)):
        if flag is not None:
            base[key] = flag
    missing = [k for k in ("phi", "gamma", "sigma_eps_sq", "mu") if base.get(k) is None]
    if missing:
        raise InputError("missing model parameters: %s" % ", ".join(missing))
    cfg = ar1.AR1Config.from_gamma(base["phi"], base["gamma"], len(y), sigma_eps_sq=base["sigma_eps_sq"], mu=base["mu"])
    a = ar1.a_opt_from_data(cfg, y)
    meta = _cfg_meta("a-opt", cfg, input=args.input)
    if args.w_opt:
        w = ar1.w_opt_known_mu(cfg, y, a)
        meta["a_opt"] = a
        return {"t": list(range(1, cfg.n + 1)), "w_opt": w}, meta
    return {"a_opt": [a]}, meta


# ---------------------------------------------------------------- wiring


def build_parser():
    p = _Parser(prog="tridinv", description="Explicit inverse of near-Toeplitz tridiagonal matrices.")
    p.add_argument("--version", action="version", version="tridinv " + __version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("invert", help="entries, factors or the full inverse")
    _add_spec_flags(q)
    what = q.add_mutually_exclusive_group(required=True)
    what.add_argument("--entry", nargs=2, type=int, metavar=("I", "J"))
    what.add_argument("--factors", action="store_true")
    what.add_argument("--full", action="store_true")
    _add_format_flags(q)
    q.set_defaults(func=cmd_invert)

    q = sub.add_parser("rowsums", help="row sums of the inverse")
    _add_spec_flags(q)
    _add_format_flags(q)
    q.set_defaults(func=cmd_rowsums)

    q = sub.add_parser("trace", help="traces of Q^-1 and Q^-2 with limits")
    _add_spec_flags(q)
    _add_format_flags(q)
    q.set_defaults(func=cmd_trace)

    q = sub.add_parser("fig1", help="w_opt curve with its bounds")
    q.add_argument("--phi", type=float, required=True)
    q.add_argument("--gamma", type=float, default=0.2)
    q.add_argument("--n", type=int, default=100)
    _add_format_flags(q)
    q.set_defaults(func=cmd_fig1)

    q = sub.add_parser("fig2", help="mean and variance of a_opt over a grid of n")
    q.add_argument("--phi", type=float, default=0.95)
    q.add_argument("--gamma", type=float, default=0.2)
    q.add_argument("--grid", default="1000:10000:1000")
    _add_format_flags(q)
    q.set_defaults(func=cmd_fig2)

    q = sub.add_parser("simulate", help="draw y from the AR(1)-plus-noise model")
    q.add_argument("--phi", type=float, default=0.95)
    q.add_argument("--gamma", type=float, default=0.2)
    q.add_argument("--sigma-eps2", type=float, default=0.1)
    q.add_argument("--mu", type=float, default=3.0)
    q.add_argument("--n", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    _add_format_flags(q)
    q.set_defaults(func=cmd_simulate)

    q = sub.add_parser("a-opt", help="a_opt (or w_opt with known mu) for an observed series")
    q.add_argument("--input", required=True, help="CSV/JSON file from `simulate`, or - for stdin")
    q.add_argument("--column", default="y")
    q.add_argument("--phi", type=float)
    q.add_argument("--gamma", type=float)
    q.add_argument("--sigma-eps2", type=float)
    q.add_argument("--mu", type=float)
    q.add_argument("--w-opt", action="store_true", help="emit w_opt for known mu instead of a_opt")
    _add_format_flags(q)
    q.set_defaults(func=cmd_a_opt)
    return p


def _fail(stderr, code, kind, message):
    stderr.write(json.dumps({"error": kind, "message": str(message), "exit_code": code}) + "\n")
    return code


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        columns, meta = args.func(args)
        text = render(columns, meta, args.format)
    except InputError as exc:
        return _fail(stderr, EXIT_INPUT, "ValidationError", exc)
    except (DomainError, DimensionMismatch, IndexOutOfRange) as exc:
        return _fail(stderr, EXIT_INPUT, type(exc).__name__, exc)
    except SingularMatrix as exc:
        return _fail(stderr, EXIT_SINGULAR, "SingularMatrix", exc)
    except OSError as exc:
        return _fail(stderr, EXIT_IO, "IOError", exc)
    try:
        if args.out:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except OSError as exc:
        return _fail(stderr, EXIT_IO, "IOError", exc)
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
