"""Config-driven runs: simulate, reconstruct, fit, compare, and write the artifact bundle."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import dataio
from .config import config_hash
from .fitting import CalibrationComparison, FitError, FitResult, StateModel, compare_calibration, fit, format_comparison
from .measurement import RNG_ID, ReadoutRecord
from .recon import (ChiGrid, GridSpec, WignerGrid, complete_by_symmetry, default_mirror, default_quadratures,
                    dft_error_oracle, dft_wigner, grid_from_records, parity_from_grid, simulate_records,
                    subtract_bias)
from .states import make_state

STAGES = ("simulate", "reconstruct", "fit", "report")


class PipelineError(RuntimeError):
    """A pipeline stage failed; the message names the stage."""


@dataclass
class Bundle:
    config: dict
    config_hash: str
    records: list[ReadoutRecord] = field(default_factory=list)
    chi_raw: ChiGrid | None = None
    chi: ChiGrid | None = None
    wigner: WignerGrid | None = None
    fit: FitResult | None = None
    comparison: CalibrationComparison | None = None
    metrics: dict = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not self.records and self.chi is None and self.wigner is None


def _stage(name):
    def wrap(fn):
        def inner(*a, **kw):
            try:
                return fn(*a, **kw)
            except PipelineError:
                raise
            except Exception as exc:
                raise PipelineError(f"{name}: {type(exc).__name__}: {exc}") from exc
        return inner
    return wrap


def _specs(config):
    measure = GridSpec.from_dict(config["grid"])
    out = GridSpec.from_dict(config["output_grid"]) if "output_grid" in config else None
    return measure, out


def _thetas(config, measure):
    return tuple(config["quadratures"]) if "quadratures" in config else default_quadratures(measure)


def _mirror(config, measure):
    m = config["pipeline"]["mirror"]
    if m == "auto":
        return default_mirror(measure)
    return None if m == "none" else m


@_stage("simulate")
def simulate(config) -> list[ReadoutRecord]:
    state = make_state(config["state"]["family"], config["state"].get("params", {}))
    measure, _ = _specs(config)
    return simulate_records(state, measure, config["shots"], config["bias"], config["seed"],
                            _thetas(config, measure))


@_stage("reconstruct")
def reconstruct(config, records, bias_value: float | None):
    measure, out = _specs(config)
    grid = grid_from_records(records, measure.spacing)
    mirror = _mirror(config, measure)
    if mirror:
        grid = complete_by_symmetry(grid, mirror)
    chi = subtract_bias(grid, bias_value) if bias_value is not None else grid
    p = config["pipeline"]
    wig = dft_wigner(chi, p["pad_factor"], out, "wigner", p["dft_method"])
    return grid, chi, wig


@_stage("fit")
def run_fit(config, records):
    fcfg = config["pipeline"].get("fit")
    if not fcfg:
        return None, None
    fixed = dict(fcfg.get("fixed", {}))
    if "free" in fcfg:
        model = StateModel(fcfg["model"], tuple(fcfg["free"]), fixed)
    else:
        model = StateModel.floating(fcfg["model"], fixed)
    calibrated = dict(fcfg.get("calibrated", {}))
    initial = dict(fcfg.get("initial", calibrated))
    try:
        result = fit(records, model, initial)
    except FitError as exc:
        raise PipelineError(f"fit: {exc}") from exc
    return result, compare_calibration(records, model, calibrated, result)


def run_experiment(config: dict, until: str = "report", records=None) -> Bundle:
    """Run the pipeline on a validated config up to and including stage ``until``.

    Identical configs give identical bundles: every random draw comes from
    the seeded per-point streams of the measurement simulator. Passing
    ``records`` skips the simulation and analyses those readouts instead.
    """
    if until not in STAGES:
        raise ValueError(f"unknown stage {until!r}")
    stop = STAGES.index(until)
    bundle = Bundle(config, config_hash(config))
    bundle.records = list(records) if records is not None else simulate(config)
    p = config["pipeline"]

    if stop >= STAGES.index("fit") and p.get("fit"):
        bundle.fit, bundle.comparison = run_fit(config, bundle.records)

    if stop == STAGES.index("fit"):
        _fit_metrics(bundle)
        return bundle

    if stop >= STAGES.index("reconstruct"):
        bias_value = None
        if p["subtract_bias"]:
            if p["bias_source"] == "fit":
                if bundle.fit is None:
                    bundle.fit, bundle.comparison = run_fit(config, bundle.records)
                if bundle.fit is None:
                    raise PipelineError("reconstruct: bias_source 'fit' needs a fit section")
                bias_value = bundle.fit.params["b"]
            else:
                bias_value = config["bias"]
        bundle.chi_raw, bundle.chi, bundle.wigner = reconstruct(config, bundle.records, bias_value)
        bundle.metrics["parity_unsubtracted"] = parity_from_grid(bundle.chi_raw)
        bundle.metrics["parity"] = parity_from_grid(bundle.chi)
        bundle.metrics["subtracted_bias"] = bias_value if bias_value is not None else 0.0
        bundle.metrics["wigner_at_origin"] = _wigner_origin(bundle.wigner)

    if stop >= STAGES.index("report") and p["oracle"]:
        bundle.metrics["dft_error_percent"] = oracle(config)
    _fit_metrics(bundle)
    return bundle


def _fit_metrics(bundle: Bundle) -> None:
    if bundle.comparison is not None:
        bundle.metrics["c_r_calibrated"] = bundle.comparison.c_r_calibrated
        bundle.metrics["c_r_fitted"] = bundle.comparison.c_r_fitted
        bundle.metrics["fidelity"] = bundle.comparison.fidelity


def _wigner_origin(wg: WignerGrid) -> float:
    i = int(np.argmin(np.abs(wg.gamma)))
    return float(wg.value[i]) if abs(wg.gamma[i]) < 1e-9 else float("nan")


@_stage("oracle")
def oracle(config) -> float:
    """DFT error of the configured measurement on the noise-only ideal state, percent of 4/pi."""
    state = make_state(config["state"]["family"], config["state"].get("params", {}))
    measure, out = _specs(config)
    if out is None:
        out = GridSpec("full_square", measure.extent, measure.spacing)
    mirror = _mirror(config, measure)
    return dft_error_oracle(state, measure, out, config["shots"], config["seed"],
                            config["pipeline"]["pad_factor"], _thetas(config, measure), mirror)


# -- writing -----------------------------------------------------------------


def file_header(bundle: Bundle, bias_subtracted: bool | None = None) -> dict:
    cfg = bundle.config
    h = {
        "generator": f"chartomo {__version__}",
        "config_name": cfg.get("name", ""),
        "config_sha256": bundle.config_hash,
        "seed": cfg["seed"],
        "rng": RNG_ID,
        "shots": cfg["shots"],
        "pad_factor": float(cfg["pipeline"]["pad_factor"]),
        "grid": cfg["grid"],
    }
    if bias_subtracted is not None:
        h["bias_subtracted"] = bias_subtracted
        h["subtracted_bias"] = float(bundle.metrics.get("subtracted_bias", 0.0)) if bias_subtracted else 0.0
    return h


def report_text(bundle: Bundle) -> str:
    cfg = bundle.config
    lines = [f"experiment: {cfg.get('name', '')}",
             f"config_sha256: {bundle.config_hash}",
             f"seed: {cfg['seed']}   shots/point: {cfg['shots']}   bias: {cfg['bias']}",
             f"records: {len(bundle.records)}"]
    for key in ("parity", "parity_unsubtracted", "subtracted_bias", "wigner_at_origin", "dft_error_percent",
                "c_r_calibrated", "c_r_fitted", "fidelity"):
        if key in bundle.metrics:
            lines.append(f"{key}: {bundle.metrics[key]:.6g}")
    if bundle.comparison is not None:
        lines += ["", format_comparison(bundle.comparison)]
    return "\n".join(lines) + "\n"


def metrics_rows(bundle: Bundle) -> list[tuple[str, str]]:
    """``(key, value)`` pairs for delimited output."""
    rows = [("experiment", bundle.config.get("name", "")), ("config_sha256", bundle.config_hash),
            ("records", str(len(bundle.records)))]
    rows += [(k, repr(float(v))) for k, v in bundle.metrics.items()]
    return rows


def write_bundle(bundle: Bundle, out_dir, figures: bool = True) -> list[Path]:
    """Write every artifact present in ``bundle``; returns the paths in write order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if bundle.records:
        h = file_header(bundle)
        paths.append(dataio.write_records_csv(out / "records.csv", bundle.records, h))
        paths.append(dataio.write_records_json(out / "records.json", bundle.records, h))
    if bundle.chi is not None:
        h = file_header(bundle, bundle.chi.bias_subtracted)
        paths.append(dataio.write_chi_csv(out / "chi_grid.csv", bundle.chi, h))
        paths.append(dataio.write_chi_json(out / "chi_grid.json", bundle.chi, h))
    if bundle.wigner is not None:
        h = file_header(bundle, bool(bundle.wigner.meta.get("bias_subtracted")))
        paths.append(dataio.write_wigner_csv(out / "wigner_grid.csv", bundle.wigner, h))
        paths.append(dataio.write_wigner_json(out / "wigner_grid.json", bundle.wigner, h))
    if bundle.fit is not None:
        payload = {"fit": bundle.fit.to_dict()}
        if bundle.comparison is not None:
            payload["comparison"] = bundle.comparison.to_dict()
        paths.append(dataio.write_json(out / "fit_result.json", file_header(bundle), payload))
    if bundle.metrics or bundle.fit is not None:
        (out / "report.txt").write_text(report_text(bundle), encoding="utf-8")
        paths.append(out / "report.txt")
    if figures and (bundle.chi is not None or bundle.wigner is not None):
        from .plotting import emit_plotdata, render_figures

        paths += emit_plotdata(bundle, out)
        paths += render_figures(bundle, out)
    return paths
