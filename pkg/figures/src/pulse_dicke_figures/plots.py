"""Figure builders and the render() entry point.

Three figure kinds, one per CSV schema: the two-panel fidelity-vs-speed
curves, the (speed, time) entropy heatmap with the coupling annotated on
the top axis, and the per-kappa negativity time series with line style
keyed to the attacker count.  Rendering is read-only over the inputs and
deterministic: fixed figure size, fixed colormap, pinned SVG hash salt
and metadata, so identical inputs give byte-identical images in a pinned
environment.
"""

from dataclasses import dataclass

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .schemas import (ENTROPY_HEADER, FIDELITY_HEADER, NEGATIVITY_HEADER,
                      FigureDataError, load_tables)

__all__ = ["PlotSpec", "KINDS", "build_figure", "render"]

KINDS = ("fidelity-curves", "entropy-heatmap", "negativity-traces")

COLORMAP = "inferno"
_RC = {
    "svg.hashsalt": "pulse-dicke-figures",
    "font.size": 9,
    "axes.titlesize": 9,
    "figure.dpi": 100,
}

_DEFAULTS = {
    "fidelity-curves": ("Survival probability after a coupling pulse",
                        r"pulse speed $\upsilon$", "final fidelity"),
    "entropy-heatmap": ("Qubit-cavity entanglement entropy",
                        "pulse fraction", r"pulse speed $\upsilon$"),
    "negativity-traces": ("Entanglement through a leaky cavity",
                          "time", "negativity"),
}


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: input CSV path(s), figure kind, output base path.

    output may carry a .png or .svg suffix; both formats are always
    written next to each other.  Labels default per kind when None.
    """

    kind: str
    inputs: tuple
    output: str
    title: str = None
    xlabel: str = None
    ylabel: str = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {', '.join(KINDS)}, "
                             f"got {self.kind!r}")
        if isinstance(self.inputs, str):
            object.__setattr__(self, "inputs", (self.inputs,))
        else:
            object.__setattr__(self, "inputs", tuple(self.inputs))
        if not self.inputs:
            raise ValueError("inputs must name at least one CSV file")

    def labels(self):
        t, x, y = _DEFAULTS[self.kind]
        return (self.title if self.title is not None else t,
                self.xlabel if self.xlabel is not None else x,
                self.ylabel if self.ylabel is not None else y)


def _fidelity_figure(spec):
    table = load_tables(spec.inputs, FIDELITY_HEADER)
    table = table[~np.isnan(table[:, 3])]
    if table.size == 0:
        raise FigureDataError("every row has nan fidelity (all FAILED?)")
    lone = table[table[:, 0] == 1]
    group = table[table[:, 0] >= 2]
    if len(lone) == 0 or len(group) == 0:
        raise FigureDataError(
            "two-panel layout needs both an N=1 series and at least one "
            "N>=2 series in the fidelity CSV")

    title, xlabel, ylabel = spec.labels()
    fig, (axg, axl) = plt.subplots(1, 2, figsize=(8.0, 3.2), sharex=True)
    for n in np.unique(group[:, 0]):
        part = group[group[:, 0] == n]
        part = part[np.argsort(part[:, 1])]
        axg.plot(part[:, 1], part[:, 3], marker="o", ms=3,
                 label=f"$N={int(n)}$")
    lone = lone[np.argsort(lone[:, 1])]
    axl.plot(lone[:, 1], lone[:, 3], marker="o", ms=3, color="C3",
             label="$N=1$")
    axg.set_title("coordinated attackers")
    axl.set_title("single attacker")
    for ax in (axg, axl):
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.legend(frameon=False)
    axg.set_ylabel(ylabel)
    fig.suptitle(title)
    fig.tight_layout()
    return fig


def _entropy_figure(spec):
    table = load_tables(spec.inputs, ENTROPY_HEADER)
    ns = np.unique(table[:, 0])
    if len(ns) != 1:
        raise FigureDataError(
            f"one heatmap per attacker count; file mixes N = "
            f"{', '.join(str(int(n)) for n in ns)}")
    n = int(ns[0])
    speeds = np.unique(table[:, 1])
    per_speed = [table[table[:, 1] == u] for u in speeds]
    counts = {len(p) for p in per_speed}
    if len(counts) != 1:
        raise FigureDataError("ragged table: every speed needs the same "
                              "number of time samples")
    rows = []
    for part in per_speed:
        part = part[np.argsort(part[:, 2])]
        rows.append(part[:, 4])
    grid = np.vstack(rows)
    first = per_speed[0][np.argsort(per_speed[0][:, 2])]
    frac = first[:, 2] / first[-1, 2]
    lam = first[:, 3]

    title, xlabel, ylabel = spec.labels()
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    mesh = ax.pcolormesh(frac, speeds, grid, cmap=COLORMAP, vmin=0.0,
                         vmax=np.log(n + 1), shading="nearest")
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(f"{title} ($N={n}$)")
    ticks = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    top = ax.secondary_xaxis("top")
    top.set_xticks(ticks)
    top.set_xticklabels([f"{v:.3g}" for v in np.interp(ticks, frac, lam)])
    top.set_xlabel(r"coupling $\lambda(t)$")
    fig.colorbar(mesh, ax=ax, label="entropy")
    fig.tight_layout()
    return fig


def _negativity_figure(spec):
    table = load_tables(spec.inputs, NEGATIVITY_HEADER)
    speeds = np.unique(table[:, 1])
    if len(speeds) != 1:
        raise FigureDataError(
            f"one figure per pulse speed; file mixes upsilon = "
            f"{', '.join(f'{u:g}' for u in speeds)}")
    ns = np.unique(table[:, 0])
    kappas = np.unique(table[:, 2])
    styles = ["-", "--", ":", "-."]
    cmap = plt.get_cmap(COLORMAP)
    shade = np.linspace(0.1, 0.75, len(kappas))

    title, xlabel, ylabel = spec.labels()
    fig, ax = plt.subplots(figsize=(6.0, 3.6))
    for i, n in enumerate(ns):
        for j, kap in enumerate(kappas):
            part = table[(table[:, 0] == n) & (table[:, 2] == kap)]
            if len(part) == 0:
                continue
            part = part[np.argsort(part[:, 3])]
            ax.plot(part[:, 3], part[:, 5], styles[i % len(styles)],
                    color=cmap(shade[j]),
                    label=f"$N={int(n)}$, $\\kappa={kap:g}$")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(f"{title} ($\\upsilon={speeds[0]:g}$)")
    ax.legend(frameon=False, ncols=max(1, len(ns)), fontsize=7)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "fidelity-curves": _fidelity_figure,
    "entropy-heatmap": _entropy_figure,
    "negativity-traces": _negativity_figure,
}


def build_figure(spec: PlotSpec):
    """Validate the inputs and return the matplotlib Figure, unsaved."""
    with matplotlib.rc_context(_RC):
        return _BUILDERS[spec.kind](spec)


def render(spec: PlotSpec):
    """Build the figure and write it as both PNG and SVG.

    Returns the two written paths.  Nothing is written if the inputs fail
    validation.
    """
    base = spec.output
    for suffix in (".png", ".svg"):
        if base.endswith(suffix):
            base = base[:-len(suffix)]
    with matplotlib.rc_context(_RC):
        fig = _BUILDERS[spec.kind](spec)
        try:
            png = base + ".png"
            svg = base + ".svg"
            fig.savefig(png, dpi=150,
                        metadata={"Software": "pulse-dicke-figures"})
            fig.savefig(svg, metadata={"Date": None})
        finally:
            plt.close(fig)
    return png, svg
