"""Figure rendering for the CLI report path.

Each renderer takes the same report dictionary the command writes as
CSV/JSON and draws a single diagnostic figure next to it.  Rendering is
deterministic for fixed inputs (fixed size, dpi, no timestamps).
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_FIGSIZE = (6.0, 4.0)
_DPI = 120


def _new_axes(title, xlabel, ylabel):
    fig, ax = plt.subplots(figsize=_FIGSIZE)
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    return fig, ax


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_count(report: dict, path: str):
    """Log-log counting curves with an L^2 guide line."""
    ls = report["L"]
    fig, ax = _new_axes("geodesic counts", "length bound L", "count")
    ax.loglog(ls, [max(v, 0.5) for v in report["n_simple"]], "o-", label="simple")
    ax.loglog(ls, [max(v, 0.5) for v in report["n_multicurves"]], "s-",
              label="multicurves")
    nref = max(report["n_simple"][-1], 1)
    ax.loglog(ls, [nref * (l / ls[-1]) ** 2 for l in ls], "k--", alpha=0.5,
              label="~L^2")
    ax.legend()
    _save(fig, path)


def render_measure(report: dict, path: str):
    ts = report["t"]
    fig, ax = _new_axes("lattice measure", "dilation t", "lambda_t")
    ax.semilogx(ts, report["lambda_t"], "o-", label="lambda_t")
    if report.get("extrapolated") is not None:
        ax.axhline(report["extrapolated"], color="k", linestyle="--", alpha=0.6,
                   label=f"limit {report['extrapolated']:.4g}")
    ax.legend()
    _save(fig, path)


def render_orbit(report: dict, path: str):
    ts = report["t"]
    fig, ax = _new_axes("orbit density", "dilation t", "ratio mu_t / lambda_t")
    ax.semilogx(ts, report["ratio"], "o-", label="mu_t/lambda_t")
    ax.axhline(6.0 / math.pi**2, color="k", linestyle="--", alpha=0.6,
               label="6/pi^2")
    ax.legend()
    _save(fig, path)


def render_unfold(report: dict, path: str):
    rows = report["estimates"]
    ls = [r["L"] for r in rows]
    fig, ax = _new_axes("unfolding identity", "length bound L",
                        "moduli integral of n(L)")
    ax.errorbar(ls, [r["estimate"] for r in rows],
                yerr=[3 * r["stderr"] for r in rows], fmt="o", capsize=3,
                label="estimate (3 sigma)")
    grid = [ls[0] + i * (ls[-1] - ls[0]) / 64 for i in range(65)]
    ax.plot(grid, [g * g / 2 for g in grid], "k--", alpha=0.6,
            label="predicted L^2/2")
    ax.legend()
    _save(fig, path)


def render_fit(report: dict, path: str):
    data = report["points"]
    fig, ax = _new_axes("power-law fit", "L", "count")
    ax.loglog([a for a, _ in data], [b for _, b in data], "o", label="data")
    lo, hi = report["window"]
    c, e = report["constant"], report["exponent"]
    grid = [lo * (hi / lo) ** (i / 64) for i in range(65)]
    ax.loglog(grid, [c * g**e for g in grid], "k--",
              label=f"{c:.3g} * L^{e:.3f}")
    ax.legend()
    _save(fig, path)
