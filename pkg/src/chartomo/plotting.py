"""Figure data (gnuplot matrices) and PNG renderings of a pipeline bundle.

PNGs are drawn on a bare Agg canvas with fixed metadata, so reruns give
identical bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from . import dataio
from .phasespace import wigner_fn
from .states import make_state

PNG_METADATA = {"Software": None}
DPI = 110


def emit_plotdata(bundle, out_dir) -> list[Path]:
    """Dense matrices for Re chi, Im chi and W (rows = Im axis, cols = Re axis).

    A quadrant-measured grid has been mirrored by the time it reaches the
    bundle, so its matrices cover the full square.
    """
    if bundle is None or (bundle.chi is None and bundle.wigner is None):
        raise ValueError("bundle has no grids to emit")
    from .pipeline import file_header

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if bundle.chi is not None:
        mat, xs, ys = bundle.chi.as_matrix()
        h = file_header(bundle, bundle.chi.bias_subtracted)
        paths.append(dataio.write_matrix(out / "chi_re.dat", mat.real, xs, ys, h))
        paths.append(dataio.write_matrix(out / "chi_im.dat", mat.imag, xs, ys, h))
    if bundle.wigner is not None:
        mat, xs, ys = bundle.wigner.as_matrix()
        h = file_header(bundle, bool(bundle.wigner.meta.get("bias_subtracted")))
        paths.append(dataio.write_matrix(out / "wigner.dat", mat, xs, ys, h))
    return paths


def _image(ax, mat, xs, ys, title, cmap="RdBu_r", limit=None):
    limit = limit if limit is not None else float(np.nanmax(np.abs(mat))) or 1.0
    d = xs[1] - xs[0] if len(xs) > 1 else 1.0
    extent = (xs[0] - d / 2, xs[-1] + d / 2, ys[0] - d / 2, ys[-1] + d / 2)
    im = ax.imshow(mat, origin="lower", extent=extent, cmap=cmap, vmin=-limit, vmax=limit,
                   interpolation="nearest", aspect="equal")
    ax.set_title(title, fontsize=9)
    ax.set_xlabel("Re", fontsize=8)
    ax.set_ylabel("Im", fontsize=8)
    ax.tick_params(labelsize=7)
    return im


def _save(fig, path) -> Path:
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=DPI, metadata=PNG_METADATA)
    return Path(path)


def render_figures(bundle, out_dir) -> list[Path]:
    """``overview.png`` (Re chi, Im chi, W) and ``wigner_cuts.png`` (axis cuts vs analytic W)."""
    out = Path(out_dir)
    paths = []
    name = bundle.config.get("name", "")
    if bundle.chi is not None and bundle.wigner is not None:
        fig = Figure(figsize=(10, 3.4))
        axes = fig.subplots(1, 3)
        mat, xs, ys = bundle.chi.as_matrix()
        wm, wx, wy = bundle.wigner.as_matrix()
        panels = ((mat.real, xs, ys, r"Re $\chi(\beta)$", 1.0), (mat.imag, xs, ys, r"Im $\chi(\beta)$", 1.0),
                  (wm, wx, wy, r"$W(\gamma)$ (DFT)", 2 / np.pi))
        for ax, (m, x, y, title, lim) in zip(axes, panels):
            cbar = fig.colorbar(_image(ax, m, x, y, title, limit=lim), ax=ax, shrink=0.8)
            cbar.ax.tick_params(labelsize=7)
        fig.suptitle(name, fontsize=10)
        fig.tight_layout()
        paths.append(_save(fig, out / "overview.png"))

    if bundle.wigner is not None:
        state = make_state(bundle.config["state"]["family"], bundle.config["state"].get("params", {}))
        wm, wx, wy = bundle.wigner.as_matrix()
        fig = Figure(figsize=(7, 3))
        axes = fig.subplots(1, 2)
        iy, ix = int(np.argmin(np.abs(wy))), int(np.argmin(np.abs(wx)))
        fine_x = np.linspace(wx[0], wx[-1], 400)
        fine_y = np.linspace(wy[0], wy[-1], 400)
        axes[0].plot(fine_x, wigner_fn(state, fine_x + 1j * wy[iy]), color="0.3", lw=1, label="analytic")
        axes[0].plot(wx, wm[iy], ".", ms=3, color="C3", label="DFT")
        axes[0].set_xlabel(f"Re γ  (Im γ = {wy[iy]:.2f})", fontsize=8)
        axes[1].plot(fine_y, wigner_fn(state, wx[ix] + 1j * fine_y), color="0.3", lw=1, label="analytic")
        axes[1].plot(wy, wm[:, ix], ".", ms=3, color="C0", label="DFT")
        axes[1].set_xlabel(f"Im γ  (Re γ = {wx[ix]:.2f})", fontsize=8)
        for ax in axes:
            ax.set_ylabel("W", fontsize=8)
            ax.tick_params(labelsize=7)
            ax.legend(fontsize=7, frameon=False)
        fig.tight_layout()
        paths.append(_save(fig, out / "wigner_cuts.png"))
    return paths
