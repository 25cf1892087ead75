"""Weighted least-squares fits of parametric state models to readout records."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .lm import LMError, levenberg_marquardt
from .measurement import ConvergenceError, ReadoutRecord, biased_expectation, records_to_arrays
from .states import OscillatorState, fidelity, make_state

SEM_FLOOR = 1e-12
AMPLITUDE_LIMIT = 8.0
# b lives in the open interval (-0.5, 0.5); the box keeps a hair inside it
BIAS_LIMIT = 0.5 - 1e-9

_DISPLACED = ("r", "theta", "re_delta", "im_delta", "b")
FAMILY_PARAMS = {
    "squeezed": _DISPLACED,
    "displaced_squeezed": _DISPLACED,
    "cat": ("r", "theta", "re_alpha", "im_alpha", "re_delta", "im_delta", "b"),
    "gkp": ("r", "theta", "re_l", "im_l", "re_delta", "im_delta", "b"),
}
_STATE_FAMILY = {"squeezed": "displaced_squeezed", "displaced_squeezed": "displaced_squeezed",
                 "cat": "cat", "gkp": "gkp"}
_PAIRS = (("re_delta", "im_delta"), ("re_alpha", "im_alpha"), ("re_l", "im_l"))


class FitError(ConvergenceError):
    """The optimiser failed; ``best`` holds the best-so-far parameters if any."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


def param_bounds(name: str) -> tuple[float, float]:
    if name == "r":
        return 0.0, 3.0
    if name == "theta":
        return -np.pi / 2, np.pi / 2
    if name == "b":
        return -BIAS_LIMIT, BIAS_LIMIT
    return -AMPLITUDE_LIMIT, AMPLITUDE_LIMIT


def check_params(family: str, params: dict) -> None:
    """Raise ``ValueError`` if any given parameter lies outside the model bounds."""
    for name in FAMILY_PARAMS[family]:
        if name not in params:
            continue
        v = float(params[name])
        lo, hi = param_bounds(name)
        inside = lo <= v <= hi
        if name == "b":
            inside = abs(v) < 0.5
        if not (np.isfinite(v) and inside):
            raise ValueError(f"parameter {name}={v} outside its bounds [{lo}, {hi}]")
    for re_key, im_key in _PAIRS:
        if re_key in params and abs(complex(params[re_key], params.get(im_key, 0.0))) > AMPLITUDE_LIMIT:
            raise ValueError(f"|{re_key[3:]}| exceeds {AMPLITUDE_LIMIT}")


@dataclass(frozen=True)
class StateModel:
    """A state family with a free/fixed split of its parameters.

    ``fixed`` supplies values for every parameter not listed in ``free``.
    """

    family: str
    free: tuple[str, ...]
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILY_PARAMS:
            raise ValueError(f"unknown model family {self.family!r}; expected one of {tuple(FAMILY_PARAMS)}")
        names = FAMILY_PARAMS[self.family]
        free = tuple(self.free)
        object.__setattr__(self, "free", free)
        unknown = (set(free) | set(self.fixed)) - set(names)
        if unknown:
            raise ValueError(f"parameters {sorted(unknown)} do not belong to family {self.family}")
        if set(free) & set(self.fixed):
            raise ValueError(f"parameters {sorted(set(free) & set(self.fixed))} are both free and fixed")
        if len(set(free)) != len(free):
            raise ValueError("duplicate free parameter")

    @classmethod
    def floating(cls, family: str, fixed: dict | None = None) -> "StateModel":
        """All parameters free except those given in ``fixed``."""
        fixed = dict(fixed or {})
        return cls(family, tuple(p for p in FAMILY_PARAMS[family] if p not in fixed), fixed)

    @property
    def names(self) -> tuple[str, ...]:
        return FAMILY_PARAMS[self.family]

    def complete(self, params: dict) -> dict:
        """Full parameter dict: ``params`` for free names, ``fixed`` for the rest, zero otherwise."""
        out = {}
        for name in self.names:
            if name in self.fixed:
                out[name] = float(self.fixed[name])
            elif name in params:
                out[name] = float(params[name])
            else:
                out[name] = 0.0
        return out

    def vector(self, params: dict) -> np.ndarray:
        return np.array([float(params[n]) for n in self.free])

    def unpack(self, x) -> dict:
        return self.complete(dict(zip(self.free, map(float, x))))

    def state(self, params: dict) -> OscillatorState:
        full = self.complete(params)
        return make_state(_STATE_FAMILY[self.family], {k: v for k, v in full.items() if k != "b"})


def model_predict(model: StateModel, params: dict, beta, theta):
    """Biased quadrature expectation ``quad(chi_model) (1 - |b|) + b``.

    Identical to :func:`chartomo.measurement.biased_expectation` for the
    model's state, so simulated records are fitted by their own generator.
    """
    full = model.complete(params)
    check_params(model.family, full)
    return biased_expectation(model.state(full), beta, theta, full["b"])


def _arrays(records):
    beta, theta, est, sem = records_to_arrays(records)
    return beta, theta, est, np.where(sem > 0, sem, SEM_FLOOR)


def weighted_residuals(records, model: StateModel, params: dict) -> np.ndarray:
    beta, theta, est, sem = _arrays(records)
    return (model_predict(model, params, beta, theta) - est) / sem


def reduced_chi_squared(records: list[ReadoutRecord], model: StateModel, params: dict) -> float:
    """``1/(N - nu) sum (E_i - model_i)^2 / sem_i^2`` with ``nu`` the free-parameter count."""
    n, nu = len(records), len(model.free)
    if n <= nu:
        raise ValueError(f"need more records ({n}) than free parameters ({nu})")
    res = weighted_residuals(records, model, params)
    return float(res @ res / (n - nu))


@dataclass
class FitResult:
    family: str
    params: dict
    stderr: dict
    cov: np.ndarray
    c_r: float
    n_points: int
    n_free: int
    converged: bool
    free: tuple = ()
    message: str = ""

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": {k: float(v) for k, v in self.params.items()},
            "stderr": {k: float(v) for k, v in self.stderr.items()},
            "free": list(self.free),
            "covariance": [float(v) for v in np.asarray(self.cov).ravel()],
            "c_r": float(self.c_r),
            "n_points": int(self.n_points),
            "n_free": int(self.n_free),
            "converged": bool(self.converged),
            "message": self.message,
        }

    @classmethod
    def from_dict(cls, d) -> "FitResult":
        k = int(d["n_free"])
        cov = np.array(d["covariance"], dtype=float).reshape(k, k)
        return cls(d["family"], dict(d["params"]), dict(d["stderr"]), cov, float(d["c_r"]),
                   int(d["n_points"]), k, bool(d["converged"]), tuple(d.get("free", ())), d.get("message", ""))


def _canonical_representative(model: StateModel, params: dict) -> dict:
    """Choose ``Re alpha >= 0`` (and ``Re l >= 0``): alpha and -alpha give the same state."""
    out = dict(params)
    for re_key, im_key in (("re_alpha", "im_alpha"), ("re_l", "im_l")):
        if re_key not in out or re_key in model.fixed or im_key in model.fixed:
            continue
        re, im = out[re_key], out[im_key]
        if re < 0 or (re == 0 and im < 0):
            out[re_key], out[im_key] = -re, -im
    return out


def fit(records: list[ReadoutRecord], model: StateModel, initial: dict, max_iter: int = 200,
        ftol: float = 1e-12) -> FitResult:
    """Float the model's free parameters to minimise the weighted squared residuals.

    Starts from ``initial`` (typically the calibrated values). The
    covariance is the inverse weighted normal matrix at the optimum,
    without rescaling by ``c_r``. Raises :class:`FitError` if the
    optimiser does not converge or the parameters are not identifiable.
    """
    if not model.free:
        raise ValueError("model has no free parameters")
    n, nu = len(records), len(model.free)
    if n <= nu:
        raise ValueError(f"need more records ({n}) than free parameters ({nu})")
    start = model.complete(initial)
    check_params(model.family, start)
    beta, theta, est, sem = _arrays(records)
    bounds = np.array([param_bounds(p) for p in model.free])

    def resid(x):
        full = model.unpack(x)
        pred = biased_expectation(model.state(full), beta, theta, full["b"])
        return (pred - est) / sem

    try:
        res = levenberg_marquardt(resid, model.vector(start), bounds[:, 0], bounds[:, 1],
                                  max_iter=max_iter, ftol=ftol)
    except LMError as exc:
        best = None if exc.best is None else model.unpack(exc.best.x)
        raise FitError(f"{model.family} fit failed: {exc}", best=best) from exc
    params = _canonical_representative(model, model.unpack(res.x))
    err = np.sqrt(np.clip(np.diag(res.cov), 0, None))
    return FitResult(model.family, params, dict(zip(model.free, map(float, err))), res.cov,
                     float(res.cost / (n - nu)), n, nu, res.converged, model.free, res.message)


def grid_search_init(records, model: StateModel, base: dict, r_values=None, theta_values=None) -> dict:
    """Best ``(r, theta)`` on a coarse grid with every other parameter from ``base``.

    Meant for blind fits, where no calibrated starting point exists.
    """
    r_values = np.linspace(0.0, 1.5, 16) if r_values is None else r_values
    theta_values = np.linspace(-np.pi / 2, np.pi / 2, 13, endpoint=False) if theta_values is None else theta_values
    best, best_cost = None, np.inf
    for r, th in product(r_values, theta_values):
        trial = dict(model.complete(base), r=float(r), theta=float(th))
        res = weighted_residuals(records, model, trial)
        cost = float(res @ res)
        if cost < best_cost:
            best, best_cost = trial, cost
    return best


@dataclass
class CalibrationComparison:
    family: str
    calibrated: dict
    fitted: dict
    stderr: dict
    c_r_calibrated: float
    c_r_fitted: float
    deltas: dict
    fidelity: float

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("family", "calibrated", "fitted", "stderr", "c_r_calibrated",
                                               "c_r_fitted", "deltas", "fidelity")}


def compare_calibration(records, model: StateModel, calibrated: dict, fitted: FitResult) -> CalibrationComparison:
    """Both reduced chi-squared values, fitted-minus-calibrated shifts in standard errors, and fidelity.

    Calibrated parameters that are not given (often ``b`` and the
    displacements) are taken as zero.
    """
    cal = model.complete({n: calibrated.get(n, 0.0) for n in model.names})
    fit_params = model.complete(fitted.params)
    deltas = {}
    for name in fitted.free:
        se = fitted.stderr.get(name, 0.0)
        diff = fit_params[name] - cal[name]
        deltas[name] = float(diff / se) if se > 0 else (0.0 if diff == 0 else float("inf"))
    fid = fidelity(model.state(cal), model.state(fit_params))
    return CalibrationComparison(model.family, cal, fit_params, dict(fitted.stderr),
                                 reduced_chi_squared(records, model, cal), fitted.c_r, deltas, fid)


def format_comparison(cmp: CalibrationComparison) -> str:
    """Plain-text table: calibrated value, fitted value +- error, shift in errors."""
    lines = [f"state: {cmp.family}",
             f"{'param':<10} {'calibrated':>11} {'fitted':>11} {'stderr':>9} {'shift/se':>9}"]
    for name in FAMILY_PARAMS[cmp.family]:
        se = cmp.stderr.get(name)
        se_s = f"{se:9.4f}" if se is not None else f"{'fixed':>9}"
        d = cmp.deltas.get(name)
        d_s = f"{d:9.2f}" if d is not None else f"{'':>9}"
        lines.append(f"{name:<10} {cmp.calibrated[name]:11.4f} {cmp.fitted[name]:11.4f} {se_s} {d_s}")
    lines.append(f"c_r calibrated = {cmp.c_r_calibrated:.3f}   c_r fitted = {cmp.c_r_fitted:.3f}")
    lines.append(f"fidelity(calibrated, fitted) = {cmp.fidelity:.4f}")
    return "\n".join(lines)
