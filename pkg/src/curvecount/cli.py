"""Batch command-line frontend.

Subcommands: count, measure, orbit, unfold, fit.  Primary output is
delimited (CSV for counting grids, JSON reports elsewhere); ``--plot``
renders a matplotlib figure next to the ``--out`` file.  A JSON config
file can replace flags; explicit flags win.  Exit codes: 0 success,
2 configuration error, 3 numeric diagnostic.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import counting, torus, unfolding
from .errors import (
    ConfigError,
    CurveCountError,
    InsufficientSeries,
    NumericDiagnostic,
    UnsupportedOrbit,
)
from .surfaces import CoordinateSpace, SurfaceSignature

SCHEMA = 1


def _fmt(v) -> str:
    """Deterministic number formatting: integers bare, floats via repr."""
    if isinstance(v, bool):
        raise TypeError("no booleans in tables")
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    f = float(v)
    if f.is_integer() and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def _write_text(path, text):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _write_json(path, obj):
    _write_text(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    _write_text(path, "\n".join(lines) + "\n")


def _plot_path(out):
    if out is None:
        raise ConfigError("--plot needs --out to place the figure alongside")
    stem, _ = os.path.splitext(out)
    return stem + ".png"


def _parse_json_flag(value, what):
    if value is None or isinstance(value, dict):
        return value
    try:
        return json.loads(value)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed {what} JSON: {exc}") from exc


def _parse_surface(cfg) -> SurfaceSignature:
    obj = _parse_json_flag(cfg.get("surface"), "surface")
    if obj is None:
        obj = {"genus": 1, "cusps": 1, "boundary": 0}
    try:
        return SurfaceSignature(
            genus=int(obj.get("genus", 0)),
            cusps=int(obj.get("cusps", 0)),
            boundary=int(obj.get("boundary", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad surface {obj!r}: {exc}") from exc


def _parse_chart(cfg, required=False):
    obj = _parse_json_flag(cfg.get("chart"), "chart")
    if obj is None:
        if required:
            raise ConfigError("chart required")
        return None
    try:
        if "markov" in obj:
            x, y, z = (float(v) for v in obj["markov"])
            return torus.MarkovChart(x, y, z)
        if "fn" in obj:
            fn = obj["fn"]
            return torus.fn_to_markov(
                torus.FNChart(float(fn["l"]), float(fn.get("tau", 0.0)))
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad chart {obj!r}: {exc}") from exc
    raise ConfigError('chart must be {"markov": [x,y,z]} or {"fn": {"l":..,"tau":..}}')


def _parse_floats(value, what):
    try:
        vals = [float(v) for v in str(value).split(",") if v != ""]
    except ValueError as exc:
        raise ConfigError(f"bad {what} list {value!r}") from exc
    if not vals:
        raise ConfigError(f"empty {what} list")
    return vals


def _is_torus(sig: SurfaceSignature) -> bool:
    return (sig.genus, sig.cusps + sig.boundary) == (1, 1)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_count(cfg) -> int:
    chart = _parse_chart(cfg, required=True)
    if cfg.get("lengths"):
        grid = _parse_floats(cfg["lengths"], "lengths")
    elif cfg.get("max_length"):
        lmax = float(cfg["max_length"])
        n = int(cfg.get("grid") or 1)
        if n == 1:
            grid = [lmax]
        else:
            lmin = float(cfg.get("min_length") or lmax / 8.0)
            ratio = (lmax / lmin) ** (1.0 / (n - 1))
            grid = [lmin * ratio**i for i in range(n)]
    else:
        raise ConfigError("count needs --lengths or --max-length")
    depth_cap = int(cfg["depth_cap"]) if cfg.get("depth_cap") else None
    lens = torus.ball_slope_lengths(chart, max(grid), depth_cap)
    rows = []
    for L in grid:
        sel = lens[lens <= L]
        n_simple = int(sel.size)
        n_multi = 0 if sel.size == 0 else int(np.floor(L / sel).sum())
        rows.append((L, n_simple, n_multi))
    _write_csv(cfg.get("out"), ["L", "n_simple", "n_multicurves"], rows)
    if cfg.get("plot"):
        from . import plots

        report = {
            "L": [r[0] for r in rows],
            "n_simple": [r[1] for r in rows],
            "n_multicurves": [r[2] for r in rows],
        }
        plots.render_count(report, _plot_path(cfg.get("out")))
    return 0


def _measure_model(cfg, length):
    surface = _parse_surface(cfg)
    if _is_torus(surface):
        chart = _parse_chart(cfg, required=(length == "hyperbolic"))
        return counting.TorusPlane(chart), surface
    if length != "l1":
        raise ConfigError("only the l1 length is implemented off the torus")
    space = CoordinateSpace.for_signature(surface)
    return counting.DehnLattice(space), surface


def cmd_measure(cfg) -> int:
    length = cfg.get("length") or "l1"
    if length not in ("l1", "hyperbolic"):
        raise ConfigError(f"unknown length {length!r} (want l1 or hyperbolic)")
    model, surface = _measure_model(cfg, length)
    ts = _parse_floats(cfg.get("t") or "50,100,200,400,800", "t")
    if isinstance(model, counting.TorusPlane):
        series = counting.lambda_series(model, ts, length=length)
    else:
        series = counting.lambda_series(model, ts)
    tail = int(cfg["tail"]) if cfg.get("tail") else None
    model = cfg.get("model") or "1/t"
    try:
        series = counting.extrapolate(series, tail=tail, model=model)
    except InsufficientSeries:
        pass  # short schedules still report the raw series
    report = {
        "schema": SCHEMA,
        "kind": "measure",
        "surface": {"genus": surface.genus, "cusps": surface.cusps,
                    "boundary": surface.boundary},
        "length": length,
        "t": list(series.t_values),
        "counts": list(series.counts),
        "lambda_t": list(series.lambda_t),
        "extrapolated": series.extrapolated,
        "error_bar": series.error_bar,
    }
    _write_json(cfg.get("out"), report)
    if cfg.get("csv"):
        _write_csv(cfg["csv"], ["t", "lambda_t"],
                   list(zip(series.t_values, series.lambda_t)))
    if cfg.get("plot"):
        from . import plots

        plots.render_measure(report, _plot_path(cfg.get("out")))
    return 0


def cmd_orbit(cfg) -> int:
    length = cfg.get("length") or "l1"
    if length not in ("l1", "hyperbolic"):
        raise ConfigError(f"unknown length {length!r} (want l1 or hyperbolic)")
    model, surface = _measure_model(cfg, length)
    if not isinstance(model, counting.TorusPlane):
        raise UnsupportedOrbit(
            "no mapping-class orbit implemented for this surface"
        )
    base_raw = cfg.get("base") or "1,0"
    try:
        p, q = (int(v) for v in str(base_raw).split(","))
        base = torus.Slope(p, q)
    except ValueError as exc:
        raise ConfigError(f"bad base slope {base_raw!r}: {exc}") from exc
    ts = _parse_floats(cfg.get("t") or "125,250,500,1000,2000", "t")
    lam = counting.lambda_series(model, ts, length=length)
    mu = counting.mu_series(model, ts, base, length=length)
    ratio = [
        (m / l if l else 0.0) for m, l in zip(mu.mu_t, lam.lambda_t)
    ]
    report = {
        "schema": SCHEMA,
        "kind": "orbit",
        "surface": {"genus": surface.genus, "cusps": surface.cusps,
                    "boundary": surface.boundary},
        "length": length,
        "base": [base.p, base.q],
        "t": list(mu.t_values),
        "mu_counts": list(mu.counts),
        "lambda_counts": list(lam.counts),
        "mu_t": list(mu.mu_t),
        "lambda_t": list(lam.lambda_t),
        "ratio": ratio,
    }
    _write_json(cfg.get("out"), report)
    if cfg.get("csv"):
        _write_csv(cfg["csv"], ["t", "mu_t"], list(zip(mu.t_values, mu.mu_t)))
    if cfg.get("plot"):
        from . import plots

        plots.render_orbit(report, _plot_path(cfg.get("out")))
    return 0


def cmd_unfold(cfg) -> int:
    if cfg.get("seed") is None:
        raise ConfigError("seed required for Monte-Carlo commands")
    seed = int(cfg["seed"])
    samples = int(cfg.get("samples") or 100000)
    lengths = _parse_floats(cfg.get("lengths") or "4,6,8,12", "lengths")
    threads = int(cfg["threads"]) if cfg.get("threads") else (os.cpu_count() or 1)
    batches = 16
    box = None
    if cfg.get("box"):
        vals = _parse_floats(cfg["box"], "box")
        if len(vals) != 4:
            raise ConfigError("box wants l_lo,l_hi,tau_lo,tau_hi")
        box = unfolding.SamplerBox(*vals)
    rows = []
    for i, L in enumerate(lengths):
        est = unfolding.estimate_average_count(
            L, samples, seed, box=box, batches=batches, threads=threads,
            stream_offset=i * batches,
        )
        rows.append(est)
    kappas = np.array([r.kappa for r in rows])
    errs = np.array([max(r.kappa_stderr, 1e-12) for r in rows])
    weights = 1.0 / errs**2
    kmean = float((kappas * weights).sum() / weights.sum())
    kerr = float(math.sqrt(1.0 / weights.sum()))
    maxz = 0.0
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            z = abs(kappas[i] - kappas[j]) / math.sqrt(errs[i] ** 2 + errs[j] ** 2)
            maxz = max(maxz, float(z))
    degree = None
    if len(rows) >= 4:
        fit = counting.fit_power_law(
            [(r.max_length, r.integral_estimate) for r in rows],
            window=(min(lengths), max(lengths)),
        )
        degree = {"exponent": fit.exponent, "constant": fit.constant,
                  "stderr": fit.stderr, "window": list(fit.window)}
    report = {
        "schema": SCHEMA,
        "kind": "unfold",
        "seed": seed,
        "samples": samples,
        "estimates": [
            {
                "L": r.max_length,
                "estimate": r.integral_estimate,
                "stderr": r.stderr,
                "predicted": r.predicted,
                "kappa": r.kappa,
                "kappa_stderr": r.kappa_stderr,
                "effective_sample_size": r.effective_sample_size,
                "samples_with_curves": r.samples_with_curves,
                "box": [r.box.l_lo, r.box.l_hi, r.box.tau_lo, r.box.tau_hi],
            }
            for r in rows
        ],
        "kappa_summary": {"mean": kmean, "stderr": kerr, "max_pairwise_z": maxz},
        "degree_fit": degree,
    }
    _write_json(cfg.get("out"), report)
    if cfg.get("csv"):
        _write_csv(
            cfg["csv"],
            ["L", "estimate", "stderr", "predicted", "kappa"],
            [(r.max_length, r.integral_estimate, r.stderr, r.predicted, r.kappa)
             for r in rows],
        )
    if cfg.get("plot"):
        from . import plots

        plots.render_unfold(report, _plot_path(cfg.get("out")))
    return 0


def cmd_fit(cfg) -> int:
    path = cfg.get("input")
    if not path:
        raise ConfigError("fit needs an input CSV of L,count rows")
    points = []
    try:
        with open(path) as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    for ln in lines[1:]:  # header mandatory
        parts = ln.split(",")
        try:
            points.append((float(parts[0]), float(parts[1])))
        except (IndexError, ValueError) as exc:
            raise ConfigError(f"bad CSV row {ln!r}") from exc
    window = None
    if cfg.get("window"):
        vals = _parse_floats(cfg["window"], "window")
        if len(vals) != 2:
            raise ConfigError("window wants lo,hi")
        window = (vals[0], vals[1])
    fit = counting.fit_power_law(points, window=window)
    report = {
        "schema": SCHEMA,
        "kind": "fit",
        "exponent": fit.exponent,
        "constant": fit.constant,
        "stderr": fit.stderr,
        "window": list(fit.window),
        "points": [[a, b] for a, b in points],
    }
    _write_json(cfg.get("out"), report)
    if cfg.get("plot"):
        from . import plots

        plots.render_fit({**report, "points": points}, _plot_path(cfg.get("out")))
    return 0


# ---------------------------------------------------------------------------
# Argument plumbing
# ---------------------------------------------------------------------------


def _add_common(sub):
    sub.add_argument("--config", help="JSON file of option values (flags win)")
    sub.add_argument("--surface", help='{"genus":g,"cusps":c,"boundary":p}')
    sub.add_argument("--chart", help='{"markov":[x,y,z]} or {"fn":{"l":..,"tau":..}}')
    sub.add_argument("--out", help="output file (default stdout)")
    sub.add_argument("--plot", action="store_true", default=None,
                     help="render a PNG figure alongside --out")
    sub.add_argument("--threads", type=int, help="worker cap (default: all cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvecount",
        description="geodesic and multicurve counting on hyperbolic surfaces",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("count", help="simple/multicurve counts over an L grid")
    _add_common(p)
    p.add_argument("--lengths", help="comma list of length bounds")
    p.add_argument("--max-length", dest="max_length", type=float)
    p.add_argument("--min-length", dest="min_length", type=float)
    p.add_argument("--grid", type=int, help="number of geometric grid points")
    p.add_argument("--depth-cap", dest="depth_cap", type=int,
                   help="override the enumeration depth cap (diagnostic)")
    p.set_defaults(handler=cmd_count)

    p = subs.add_parser("measure", help="lambda_t series and extrapolation")
    _add_common(p)
    p.add_argument("--length", choices=["l1", "hyperbolic"])
    p.add_argument("--t", help="comma list of dilation parameters")
    p.add_argument("--tail", type=int, help="extrapolate on the last N points")
    p.add_argument("--model", choices=list(counting.EXTRAPOLATION_MODELS),
                   help="finite-size extrapolation model (default 1/t)")
    p.add_argument("--csv", help="also write the t,lambda_t series as CSV")
    p.set_defaults(handler=cmd_measure)

    p = subs.add_parser("orbit", help="orbit density mu_t and ratio series")
    _add_common(p)
    p.add_argument("--length", choices=["l1", "hyperbolic"])
    p.add_argument("--base", help="base slope p,q (default 1,0)")
    p.add_argument("--t", help="comma list of dilation parameters")
    p.add_argument("--csv", help="also write the t,mu_t series as CSV")
    p.set_defaults(handler=cmd_orbit)

    p = subs.add_parser("unfold", help="Monte-Carlo moduli average of n(L)")
    _add_common(p)
    p.add_argument("--lengths", help="comma list of length bounds (default 4,6,8,12)")
    p.add_argument("--samples", type=int, help="samples per length bound")
    p.add_argument("--seed", type=int, help="Monte-Carlo seed (required)")
    p.add_argument("--box", help="sampler box l_lo,l_hi,tau_lo,tau_hi")
    p.add_argument("--csv", help="also write the estimate series as CSV")
    p.set_defaults(handler=cmd_unfold)

    p = subs.add_parser("fit", help="power-law fit of an L,count CSV")
    _add_common(p)
    p.add_argument("input", nargs="?", help="CSV file of L,count rows")
    p.add_argument("--window", help="fit window lo,hi (default: log top half)")
    p.set_defaults(handler=cmd_fit)

    return parser


def _merge_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        cfg.update(loaded)
    for key, value in vars(args).items():
        if key in ("config", "handler", "command"):
            continue
        if value is not None:
            cfg[key] = value
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(_merge_config(args))
    except NumericDiagnostic as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CurveCountError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
