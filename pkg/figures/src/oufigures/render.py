"""The five figure kinds, each a pure function of artifact files.

Plotted numbers come straight from the artifacts; the only
transformations applied are presentation ones (odd mirroring of
half-line profiles, max-normalization for shape overlays).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .readers import read_csv_columns, read_json, read_manifest_value
from .spec import FigureSpec, SpecError


def _single(spec: FigureSpec, key: str):
    paths = spec.inputs[key]
    if len(paths) != 1:
        raise SpecError(f"input {key!r} expects exactly one path, got {len(paths)}")
    return paths[0]


def _mirror(t, u, sign):
    # odd (sign = -1) or even (sign = +1) reflection of half-line data
    return (
        np.concatenate([-t[::-1][:-1], t]),
        np.concatenate([sign * u[::-1][:-1], u]),
    )


def render_profile(spec: FigureSpec, ax) -> None:
    cols = read_csv_columns(_single(spec, "profile"), ("t", "U", "Uprime"))
    t, u = _mirror(cols["t"], cols["U"], -1.0)
    _, du = _mirror(cols["t"], cols["Uprime"], 1.0)
    ax.plot(t, u, color="tab:blue", lw=1.8, label="U")
    ax.set_xlabel("t")
    ax.set_ylabel("U", color="tab:blue")
    ax.axhline(1.0, color="gray", lw=0.6, ls=":")
    ax.axhline(-1.0, color="gray", lw=0.6, ls=":")
    ax2 = ax.twinx()
    ax2.plot(t, du, color="tab:orange", lw=1.2, label="U'")
    ax2.set_ylabel("U'", color="tab:orange")
    ax.set_title("connection profile with derivative overlay")


def render_eigen_overlay(spec: FigureSpec, ax) -> None:
    eig = read_csv_columns(_single(spec, "eigenfunction"), ("node", "value"))
    prof = read_csv_columns(_single(spec, "profile"), ("t", "Uprime"))
    t, du = _mirror(prof["t"], prof["Uprime"], 1.0)
    node, psi = eig["node"], eig["value"]
    window = np.abs(node) <= t.max()
    node, psi = node[window], psi[window]
    scale_psi = np.max(np.abs(psi))
    scale_du = np.max(np.abs(du))
    if scale_psi == 0 or scale_du == 0:
        raise SpecError("degenerate eigenfunction or derivative data (all zeros)")
    sign = np.sign(psi[np.argmax(np.abs(psi))])
    ax.plot(t, du / scale_du, color="tab:orange", lw=2.4, alpha=0.6,
            label="U' (normalized)")
    ax.plot(node, sign * psi / scale_psi, color="tab:blue", lw=1.0, ls="--",
            label="ground eigenfunction (normalized)")
    ax.set_xlabel("t")
    ax.set_ylabel("shape (max-normalized)")
    ax.legend(loc="upper right", fontsize=8)
    ax.set_title("ground eigenfunction against the profile derivative")


def render_sweep(spec: FigureSpec, ax) -> None:
    cols = read_csv_columns(
        _single(spec, "sweep"),
        ("A", "G_min", "G0", "assen_satisfied", "remark_lhs", "remark_rhs"),
    )
    a_star = float(
        read_manifest_value(_single(spec, "manifest"), "headline", "remark_threshold_A_star")
    )
    A = cols["A"]
    ax.plot(A, cols["G_min"], "o-", color="tab:blue", label="G_min")
    ax.plot(A, cols["G0"], "s--", color="tab:gray", label="G(0)")
    ok = cols["assen_satisfied"] > 0.5
    ax.plot(A[ok], cols["G_min"][ok], "o", color="tab:green", ms=10, mfc="none",
            label="energy condition met")
    ax.axvline(a_star, color="tab:red", lw=1.0, ls=":",
               label=f"A* = {a_star:.4f}")
    ax.set_xlabel("amplitude A")
    ax.set_ylabel("energy")
    ax.legend(fontsize=8)
    ax.set_title("amplitude sweep")
    ax._marker_a_star = a_star  # exposed for tests


def render_heatmap(spec: FigureSpec, ax) -> None:
    cols = read_csv_columns(_single(spec, "field"), ("x", "y", "u"))
    flat = read_json(_single(spec, "flatness"))
    if "direction" not in flat:
        raise SpecError("flatness report lacks 'direction'")
    x = np.unique(cols["x"])
    y = np.unique(cols["y"])
    if len(x) * len(y) != len(cols["u"]):
        raise SpecError("field.csv is not a full tensor grid")
    U = cols["u"].reshape(len(x), len(y))
    mesh = ax.pcolormesh(x, y, U.T, cmap=matplotlib.colormaps[spec.colormap],
                         shading="auto")
    plt.colorbar(mesh, ax=ax, label="u")
    ax.contour(x, y, U.T, levels=np.linspace(-0.9, 0.9, 7), colors="k",
               linewidths=0.5)
    dx, dy = flat["direction"]
    ax.annotate(
        "",
        xy=(2.0 * dx, 2.0 * dy),
        xytext=(0.0, 0.0),
        arrowprops=dict(arrowstyle="->", color="white", lw=2.0),
    )
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal")
    ax.set_title("relaxed field, level lines, flatness direction")


def render_poincare_bars(spec: FigureSpec, ax) -> None:
    reports = [read_json(p) for p in spec.inputs["poincare"]]
    for i, rep in enumerate(reports):
        for key in ("lhs_integral", "rhs_integral", "R"):
            if key not in rep or rep[key] is None:
                raise SpecError(f"poincare report {spec.inputs['poincare'][i]}: missing {key!r}")
    idx = np.arange(len(reports))
    lhs = [rep["lhs_integral"] for rep in reports]
    rhs = [rep["rhs_integral"] for rep in reports]
    width = 0.38
    ax.bar(idx - width / 2, lhs, width, color="tab:blue", label="curvature side")
    ax.bar(idx + width / 2, rhs, width, color="tab:orange", label="gradient side")
    ax.set_xticks(idx)
    ax.set_xticklabels([f"R = {rep['R']:g}" for rep in reports])
    ax.set_ylabel("weighted integral")
    ax.legend(fontsize=8)
    ax.set_title("geometric Poincare inequality, both sides")


_RENDERERS = {
    "profile": render_profile,
    "eigen-overlay": render_eigen_overlay,
    "sweep": render_sweep,
    "heatmap": render_heatmap,
    "poincare-bars": render_poincare_bars,
}


def render(spec: FigureSpec):
    """Render one spec to its output path; returns the path."""
    spec.validate()
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    try:
        _RENDERERS[spec.kind](spec, ax)
        fig.tight_layout()
        spec.output.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(spec.output, dpi=spec.dpi)
    finally:
        plt.close(fig)
    return spec.output
