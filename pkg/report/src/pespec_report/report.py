"""Static figures from the spectral toolkit's CSV artifacts.

Four figure types, one per CSV schema:

* ``energy``   -- energy.csv: energy/dissipation traces and the signed
  energy-balance residual.
* ``norms``    -- norms.csv: recorded Besov norm histories at the
  snapshot cadence.
* ``decay``    -- commutators.csv: log2 commutator-term norms against
  the cutoff level, with least-squares fits and the reference slopes
  -(1+2/p), -(1+1/p), -(1-2/gamma) overlaid.
* ``gronwall`` -- gronwall.csv: squared trajectory separation under its
  fitted exponential envelope.

Rendering is read-only over the inputs and deterministic: identical
CSVs produce identical figure dimensions and plotted data.
"""

import csv
import math
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURES = ("energy", "norms", "decay", "gronwall")
FORMATS = ("png", "svg")
DPI = 120

I_KEYS = tuple(f"I{m}" for m in range(1, 9))


class SchemaError(ValueError):
    """A required CSV column is absent."""


@dataclass(frozen=True)
class ReportSpec:
    """What to render: source directory, figure list, image format."""

    input_dir: str
    figures: tuple = FIGURES
    fmt: str = "png"
    out_dir: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "figures", tuple(self.figures))
        for name in self.figures:
            if name not in FIGURES:
                raise ValueError(
                    f"unknown figure {name!r}; choose from {', '.join(FIGURES)}"
                )
        if self.fmt not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}")

    @property
    def target_dir(self) -> str:
        return self.out_dir if self.out_dir is not None else self.input_dir


def read_columns(path: str, required: tuple) -> dict:
    """Load a CSV as float column arrays, verifying the required names."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        names = reader.fieldnames or []
        for col in required:
            if col not in names:
                raise SchemaError(
                    f"{os.path.basename(path)}: missing column {col!r}"
                )
        rows = list(reader)
    return {
        name: np.array([float(row[name]) for row in rows]) for name in names
    }


def fit_line(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and intercept."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    return slope, float(y.mean() - slope * x.mean())


def build_energy_figure(path: str):
    data = read_columns(path, ("time", "energy", "dissipation", "residual"))
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6.4, 6.0))
    top.plot(data["time"], data["energy"], label="energy", color="tab:blue")
    twin = top.twinx()
    twin.plot(data["time"], data["dissipation"], label="dissipation",
              color="tab:orange")
    top.set_ylabel("energy")
    twin.set_ylabel("dissipation")
    top.legend(loc="upper right")
    bottom.plot(data["time"], data["residual"], color="tab:red")
    bottom.axhline(0.0, color="gray", lw=0.8)
    bottom.set_xlabel("t")
    bottom.set_ylabel("energy-balance residual")
    fig.suptitle("Energy balance along the run")
    return fig


def build_norms_figure(path: str):
    data = read_columns(path, ("time",))
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    skip = {"time", "energy", "dissipation"}
    curves = [name for name in data if name not in skip]
    for name in curves:
        ax.plot(data["time"], data[name], marker="o", ms=3, label=name)
    if curves:
        ax.legend(fontsize=8)
    ax.set_xlabel("t")
    ax.set_ylabel("norm")
    ax.set_title("Recorded norm histories")
    return fig


def build_decay_figure(path: str):
    """Log2 commutator norms vs cutoff level, with fits and references.

    Returns the figure and the fitted slope per term; the fitted lines
    carry labels ``fit-I<m>`` so tests can recover exactly what was
    drawn.
    """
    data = read_columns(path, ("N",) + I_KEYS + ("p", "gamma"))
    order = np.argsort(data["N"])
    levels = data["N"][order]
    p = float(data["p"][0])
    gamma = float(data["gamma"][0])

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    slopes = {}
    for key in I_KEYS:
        y = np.log2(data[key][order])
        slope, intercept = fit_line(levels, y)
        slopes[key] = slope
        pts = ax.plot(levels, y, "o", ms=4)[0]
        ax.plot(levels, slope * levels + intercept, "-", lw=1.2,
                color=pts.get_color(), label=f"fit-{key}",
                gid=f"slope={slope:.17g}")

    references = (
        ("I1-I4", -(1.0 + 2.0 / p), "I1"),
        ("I5-I6", -(1.0 + 1.0 / p), "I5"),
        ("I7-I8", -(1.0 - 2.0 / gamma), "I7"),
    )
    for label, ref_slope, anchor_key in references:
        y0 = math.log2(data[anchor_key][order][0])
        ax.plot(levels, ref_slope * (levels - levels[0]) + y0, "--",
                color="gray", lw=1.0,
                label=f"ref {label}: {ref_slope:+.2f}")

    handles, labels = ax.get_legend_handles_labels()
    shown = [
        (h, f"{lab[4:]}: {slopes[lab[4:]]:+.2f}" if lab.startswith("fit-") else lab)
        for h, lab in zip(handles, labels)
    ]
    ax.legend([h for h, _ in shown], [t for _, t in shown],
              fontsize=7, ncols=2)
    ax.set_xlabel("cutoff level N")
    ax.set_ylabel("log2 norm")
    ax.set_title(f"Commutator-term decay (p={p:g}, gamma={gamma:g})")
    return fig, slopes


def build_gronwall_figure(path: str):
    data = read_columns(path, ("t", "lhs", "envelope", "C"))
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    positive = (data["lhs"] > 0).all() and (data["envelope"] > 0).all()
    plot = ax.semilogy if positive else ax.plot
    plot(data["t"], data["lhs"], label="squared separation", color="tab:blue")
    plot(data["t"], data["envelope"], label="envelope", color="tab:orange",
         ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("squared separation")
    ax.set_title(f"Separation vs fitted envelope (C = {data['C'][0]:g})")
    ax.legend()
    return fig


_BUILDERS = {
    "energy": ("energy.csv", build_energy_figure),
    "norms": ("norms.csv", build_norms_figure),
    "decay": ("commutators.csv", lambda path: build_decay_figure(path)[0]),
    "gronwall": ("gronwall.csv", build_gronwall_figure),
}


def render(spec: ReportSpec) -> list:
    """Write one image per requested figure; return the paths in order."""
    paths = []
    if spec.figures:
        os.makedirs(spec.target_dir, exist_ok=True)
    for name in spec.figures:
        csv_name, builder = _BUILDERS[name]
        fig = builder(os.path.join(spec.input_dir, csv_name))
        out_path = os.path.join(spec.target_dir, f"{name}.{spec.fmt}")
        fig.savefig(out_path, dpi=DPI)
        plt.close(fig)
        paths.append(out_path)
    return paths
