"""Figure rendering for sweep results: size/accuracy trade-off curves and pareto views."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)

from .evaluation import SimplificationReport

__all__ = ["pareto_front", "render_sweep_figures"]

_METHOD_STYLE = {
    "exact": dict(color="black", marker="*"),
    "sigma": dict(color="tab:blue", marker="o"),
    "exceptions": dict(color="tab:red", marker="s"),
    "kmeans": dict(color="tab:green", marker="^"),
}


def _parameter(report: SimplificationReport) -> float:
    if report.method == "sigma":
        return report.sigma
    if report.method == "exceptions":
        return report.exception_ratio
    if report.method == "kmeans":
        return float(report.k or 0)
    return 0.0


def pareto_front(reports) -> list[int]:
    """Indices of reports not dominated in both size ratio and accuracy ratio."""
    usable = [
        (i, r) for i, r in enumerate(reports)
        if r.size_ratio is not None and r.accuracy_ratio is not None
    ]
    front = []
    for i, r in usable:
        dominated = any(
            (o.size_ratio <= r.size_ratio and o.accuracy_ratio >= r.accuracy_ratio)
            and (o.size_ratio < r.size_ratio or o.accuracy_ratio > r.accuracy_ratio)
            for j, o in usable
            if j != i
        )
        if not dominated:
            front.append(i)
    return front


def render_sweep_figures(reports, out_dir: str | Path, stem: str = "sweep") -> list[Path]:
    """Write the trade-off curve and pareto figures next to the sweep CSV; returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    by_method: dict[str, list[SimplificationReport]] = {}
    for report in reports:
        by_method.setdefault(report.method, []).append(report)

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for method, rows in by_method.items():
        rows = sorted(rows, key=_parameter)
        xs = [r.size_ratio for r in rows]
        ys = [r.accuracy_ratio for r in rows]
        if any(x is None for x in xs) or any(y is None for y in ys):
            continue
        style = _METHOD_STYLE.get(method, {})
        ax.plot(xs, ys, linestyle="-" if len(rows) > 1 else "none", label=method, **style)
    ax.set_xlabel("size ratio (distinct conditions after / before)")
    ax.set_ylabel("accuracy ratio (after / before)")
    ax.set_xscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    curve_path = out_dir / f"{stem}_tradeoff.png"
    fig.savefig(curve_path, dpi=150)
    plt.close(fig)
    paths.append(curve_path)

    front = set(pareto_front(reports))
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for i, report in enumerate(reports):
        if report.size_ratio is None or report.accuracy_ratio is None:
            continue
        style = _METHOD_STYLE.get(report.method, {})
        ax.scatter(
            report.size_ratio,
            report.accuracy_ratio,
            s=90 if i in front else 25,
            edgecolors="black" if i in front else "none",
            label=None,
            **style,
        )
    handles = [
        plt.Line2D([], [], linestyle="none", label=m, **_METHOD_STYLE.get(m, {}))
        for m in by_method
    ]
    ax.set_xlabel("size ratio (distinct conditions after / before)")
    ax.set_ylabel("accuracy ratio (after / before)")
    ax.set_xscale("log")
    ax.grid(True, alpha=0.3)
    ax.legend(handles=handles, title="pareto points outlined")
    fig.tight_layout()
    pareto_path = out_dir / f"{stem}_pareto.png"
    fig.savefig(pareto_path, dpi=150)
    plt.close(fig)
    paths.append(pareto_path)
    return paths
