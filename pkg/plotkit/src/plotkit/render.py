"""Render figures from mechqubit CSV outputs.

Pure consumption: no physics is recomputed here.  Every image embeds a
SHA-256 checksum of its input CSV in the PNG metadata so figures stay
traceable to the data they were drawn from.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = ("cool-curves", "cool-minima", "pipulse-band", "wigner-map")

REQUIRED_COLUMNS = {
    "cool-curves": ["tau", "lambda", "infidelity"],
    "cool-minima": ["lambda", "infidelity_min"],
    "pipulse-band": ["lambda", "F_min", "F_max", "F_mean",
                     "F_asymptotic_min", "F_asymptotic_max"],
    "wigner-map": ["x", "p", "W"],
}

# Achievable range of the cooling figure of merit for the demonstration
# device; drawn as a shaded band on request.
DEVICE_LAMBDA_BAND = (34.0, 3400.0)


class MissingColumnError(Exception):
    def __init__(self, column: str, path):
        super().__init__(f"column {column!r} missing from {path}")
        self.column = column


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    csv_path: Path
    out_path: Path
    log_x: bool = True
    log_y: bool = True
    lambda_band: tuple[float, float] | None = None
    title: str = ""

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not Path(self.csv_path).exists():
            raise FileNotFoundError(f"input CSV {self.csv_path} does not exist")


@dataclass(frozen=True)
class RenderResult:
    out_path: Path
    checksum: str
    zero_contour_drawn: bool = False


def load_columns(path: Path, required: list[str]) -> dict[str, np.ndarray]:
    """Read a headered CSV into float arrays; empty cells become NaN."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        for col in required:
            if col not in header:
                raise MissingColumnError(col, path)
        rows = [row for row in reader if row]
    data = {}
    for name in header:
        idx = header.index(name)
        data[name] = np.array(
            [float(r[idx]) if r[idx] != "" else np.nan for r in rows])
    return data


def file_checksum(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _shade_lambda_band(ax, band):
    if band is not None:
        ax.axvspan(band[0], band[1], color="0.85", zorder=0,
                   label="device range")


def _draw_cool_curves(ax, data, spec):
    lams = np.unique(data["lambda"])
    for lam in lams:
        mask = data["lambda"] == lam
        tau = data["tau"][mask]
        inf = data["infidelity"][mask]
        pos = tau > 0
        label = "lambda = inf" if np.isinf(lam) else f"lambda = {lam:g}"
        (line,) = ax.plot(tau[pos], inf[pos], label=label)
        if np.any(inf[pos] > 0):
            k = int(np.nanargmin(np.where(inf[pos] > 0, inf[pos], np.nan)))
            ax.plot(tau[pos][k], inf[pos][k], "o", color=line.get_color())
    ax.set_xlabel("tau")
    ax.set_ylabel("infidelity")
    ax.legend()
    return False


def _draw_cool_minima(ax, data, spec):
    order = np.argsort(data["lambda"])
    lam = data["lambda"][order]
    inf = data["infidelity_min"][order]
    finite = np.isfinite(lam)
    ax.plot(lam[finite], inf[finite], "-o")
    _shade_lambda_band(ax, spec.lambda_band)
    ax.set_xlabel("lambda")
    ax.set_ylabel("minimum infidelity")
    return False


def _draw_pipulse_band(ax, data, spec):
    order = np.argsort(data["lambda"])
    lam = data["lambda"][order]
    ax.fill_between(lam, data["F_min"][order], data["F_max"][order],
                    alpha=0.3, label="reduced-model range")
    ax.plot(lam, data["F_min"][order], "k-", lw=1)
    ax.plot(lam, data["F_max"][order], "k-", lw=1)
    ax.plot(lam, data["F_mean"][order], "k-", lw=2, label="mean")
    ax.plot(lam, data["F_asymptotic_min"][order], "b--", lw=1,
            label="asymptote")
    ax.plot(lam, data["F_asymptotic_max"][order], "b--", lw=1)
    for name, marker in (("F_full_min", "v"), ("F_full_max", "^"),
                         ("F_full_mean", "o")):
        if name in data:
            have = np.isfinite(data[name][order])
            if np.any(have):
                ax.plot(lam[have], data[name][order][have], marker,
                        color="C3", ls="none",
                        label="full model" if name == "F_full_mean" else None)
    _shade_lambda_band(ax, spec.lambda_band)
    ax.set_xlabel("lambda")
    ax.set_ylabel("pulse fidelity")
    ax.set_ylim(0.0, 1.02)
    ax.legend(loc="lower right")
    return False


def _draw_wigner_map(ax, data, spec):
    x = np.unique(data["x"])
    p = np.unique(data["p"])
    w = np.full((len(x), len(p)), np.nan)
    xi = np.searchsorted(x, data["x"])
    pi_ = np.searchsorted(p, data["p"])
    w[xi, pi_] = data["W"]
    scale = float(np.nanmax(np.abs(w)))
    mesh = ax.pcolormesh(x, p, w.T, cmap="RdBu_r", vmin=-scale, vmax=scale,
                         shading="nearest")
    plt.colorbar(mesh, ax=ax, label="W")
    drew_zero = False
    if np.nanmin(w) < 0.0 < np.nanmax(w):
        ax.contour(x, p, w.T, levels=[0.0], colors="k", linewidths=0.8)
        drew_zero = True
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    ax.set_aspect("equal")
    return drew_zero


_DRAWERS = {
    "cool-curves": _draw_cool_curves,
    "cool-minima": _draw_cool_minima,
    "pipulse-band": _draw_pipulse_band,
    "wigner-map": _draw_wigner_map,
}


def render(spec: FigureSpec) -> RenderResult:
    """Draw the figure described by ``spec`` and write a PNG."""
    data = load_columns(spec.csv_path, REQUIRED_COLUMNS[spec.kind])
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    try:
        drew_zero = _DRAWERS[spec.kind](ax, data, spec)
        if spec.kind != "wigner-map":
            if spec.log_x:
                ax.set_xscale("log")
            if spec.log_y and spec.kind != "pipulse-band":
                ax.set_yscale("log")
        if spec.title:
            ax.set_title(spec.title)
        checksum = file_checksum(spec.csv_path)
        fig.savefig(spec.out_path, dpi=150,
                    metadata={"csv_sha256": checksum,
                              "Software": "plotkit"})
    finally:
        plt.close(fig)
    return RenderResult(Path(spec.out_path), checksum, drew_zero)
