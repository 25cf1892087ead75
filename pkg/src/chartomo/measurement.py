"""Readout simulation for the characteristic-function measurement circuit.

A carrier rotation by ``theta`` followed by the state-dependent displacement
maps ``cos(theta) Re chi(beta) + sin(theta) Im chi(beta)`` onto the spin
expectation. The closed-form statistic is used directly; no gate-level spin
dynamics are simulated.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .phasespace import char_fn
from .states import OscillatorState

RNG_ID = "numpy-philox4x64/seedsequence[master_seed,point_index]"


class ConvergenceError(RuntimeError):
    """A fit failed to converge or its model is degenerate for the data."""


def make_rng(master_seed: int, index: int = 0) -> np.random.Generator:
    """Counter-based generator for one point of a seeded experiment.

    The stream is Philox4x64 keyed by ``SeedSequence([master_seed, index])``,
    so every point of a grid can be drawn independently and in any order.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(master_seed), int(index)])))


def _check_bias(b: float) -> float:
    b = float(b)
    if not abs(b) < 1:
        raise ValueError(f"bias must satisfy |b| < 1, got {b}")
    return b


def quadrature(chi, theta):
    """``cos(theta) Re chi + sin(theta) Im chi``."""
    chi = np.asarray(chi, dtype=complex)
    return np.cos(theta) * chi.real + np.sin(theta) * chi.imag


def apply_bias(value, b: float):
    """Affine SPAM model ``value (1 - |b|) + b``."""
    b = _check_bias(b)
    return np.asarray(value) * (1 - abs(b)) + b


def ideal_expectation(state: OscillatorState, beta, theta):
    return quadrature(char_fn(state, beta), theta)


def biased_expectation(state: OscillatorState, beta, theta, bias: float = 0.0):
    return apply_bias(ideal_expectation(state, beta, theta), bias)


@dataclass(frozen=True)
class ReadoutRecord:
    beta: complex
    theta: float
    shots: int
    ups: int
    estimate: float
    sem: float

    CSV_COLUMNS = ("re_beta", "im_beta", "theta", "shots", "ups", "estimate", "sem")

    def row(self) -> tuple:
        return (self.beta.real, self.beta.imag, self.theta, self.shots, self.ups, self.estimate, self.sem)

    def to_dict(self) -> dict:
        d = asdict(self)
        beta = d.pop("beta")
        return {"re_beta": beta.real, "im_beta": beta.imag, **d}

    @classmethod
    def from_dict(cls, d) -> "ReadoutRecord":
        return cls(complex(float(d["re_beta"]), float(d["im_beta"])), float(d["theta"]),
                   int(d["shots"]), int(d["ups"]), float(d["estimate"]), float(d["sem"]))


def estimate_from_counts(ups, shots):
    """Spin expectation estimate and its standard error from bright counts.

    When every shot lands in one outcome the binomial standard error is
    zero; it is floored to ``1/shots`` (half a count, times two for the
    +-1 scale) so the point keeps a finite fit weight.
    """
    ups = np.asarray(ups)
    shots = np.asarray(shots)
    p = ups / shots
    est = 2 * p - 1
    sem = 2 * np.sqrt(p * (1 - p) / shots)
    sem = np.where((ups == 0) | (ups == shots), 1.0 / shots, sem)
    return est, sem


def sample_readout(state: OscillatorState, beta, theta, shots: int, bias: float = 0.0,
                   seed: int = 0, index: int = 0) -> ReadoutRecord:
    """Draw one finite-shot readout of the biased expectation."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    e = float(biased_expectation(state, complex(beta), theta, bias))
    p_up = min(max((e + 1) / 2, 0.0), 1.0)
    ups = int(make_rng(seed, index).binomial(shots, p_up))
    est, sem = estimate_from_counts(ups, shots)
    return ReadoutRecord(complex(beta), float(theta), int(shots), ups, float(est), float(sem))


def sample_records(state: OscillatorState, betas, thetas, shots: int, bias: float = 0.0,
                   seed: int = 0) -> list[ReadoutRecord]:
    """Readouts at every (beta, theta) setting; point ``i`` uses stream ``(seed, i)``.

    ``betas`` and ``thetas`` broadcast against each other; the setting list
    is enumerated beta-major so stream indices are independent of chunking.
    """
    betas = np.atleast_1d(np.asarray(betas, dtype=complex))
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if betas.shape != thetas.shape:
        betas, thetas = [a.ravel() for a in np.meshgrid(betas, thetas, indexing="ij")]
    if shots < 1:
        raise ValueError("shots must be >= 1")
    e = biased_expectation(state, betas, thetas, bias)
    p_up = np.clip((e + 1) / 2, 0.0, 1.0)
    ups = np.array([make_rng(seed, i).binomial(shots, p) for i, p in enumerate(p_up)])
    est, sem = estimate_from_counts(ups, shots)
    return [ReadoutRecord(complex(b), float(t), int(shots), int(u), float(x), float(s))
            for b, t, u, x, s in zip(betas, thetas, ups, est, sem)]


def records_to_arrays(records):
    """Columns ``(beta, theta, estimate, sem)`` of a record list as arrays."""
    beta = np.array([r.beta for r in records], dtype=complex)
    theta = np.array([r.theta for r in records], dtype=float)
    est = np.array([r.estimate for r in records], dtype=float)
    sem = np.array([r.sem for r in records], dtype=float)
    return beta, theta, est, sem


# -- SDF calibration ----------------------------------------------------------


def simulate_sdf_trace(c: float, times, n_fock: int = 1):
    """Spin signal ``1 - exp(-2 (ct)^2) (1 - (2ct)^2)`` for a Fock-1 probe."""
    if n_fock != 1:
        raise ValueError("only the Fock-1 calibration probe is supported")
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be non-negative")
    x = c * times
    return 1 - np.exp(-2 * x**2) * (1 - 4 * x**2)


def fit_sdf_calibration(times, values, sems, c0: float | None = None):
    """Weighted least-squares estimate of the SDF proportionality ``c``.

    Returns ``(c, stderr)``. Raises :class:`ConvergenceError` if the data do
    not constrain ``c`` (e.g. a flat trace).
    """
    from .lm import LMError, levenberg_marquardt

    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    sems = np.asarray(sems, dtype=float)
    if len(times) < 5:
        raise ValueError("need at least 5 trace points")
    if np.any(sems <= 0):
        raise ValueError("standard errors must be positive")

    def resid(p):
        return (simulate_sdf_trace(abs(p[0]), times) - values) / sems

    if c0 is None:
        tmax = times.max()
        if tmax <= 0:
            raise ConvergenceError("trace has no time extent")
        cands = np.geomspace(0.05 / tmax, 20 / tmax, 400)
        costs = [np.sum(resid([c]) ** 2) for c in cands]
        c0 = float(cands[int(np.argmin(costs))])
    try:
        res = levenberg_marquardt(resid, np.array([c0]), lower=np.array([0.0]))
    except LMError as exc:
        raise ConvergenceError(f"SDF calibration fit failed: {exc}") from exc
    c = float(res.x[0])
    err = float(np.sqrt(res.cov[0, 0]))
    if not err < c:
        raise ConvergenceError(f"SDF calibration is degenerate: c = {c:.3g} +- {err:.3g}")
    return c, err
