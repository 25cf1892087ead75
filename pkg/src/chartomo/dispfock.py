"""Displaced Fock-state populations, blue-sideband Rabi traces and Leibfried parity.

This is the older point-by-point Wigner reconstruction: displace by
``-gamma``, read the motional populations from a sideband Rabi flop, and
form the parity. It is kept for cross-checks and for the shot-cost
comparison with direct characteristic-function readout.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .states import TAIL_TOL, FockTruncationError, OscillatorState, fock_expand

# base sideband Rabi frequency, rad per ms (2 pi x 20 kHz)
DEFAULT_OMEGA = 2 * np.pi * 20.0
COND_LIMIT = 1e8


class TailError(FockTruncationError):
    """Population mass beyond ``n_max`` exceeds the tail tolerance."""


class IllConditionedError(ValueError):
    """The cosine design matrix cannot separate the requested Fock frequencies."""


@dataclass(frozen=True, eq=False)
class PopulationVector:
    """Probabilities ``p(n)`` for ``n = 0..n_max`` at displacement ``gamma``."""

    probs: np.ndarray
    gamma: complex = 0j
    tail_tol: float = TAIL_TOL

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or not len(p):
            raise ValueError("populations must be a non-empty vector")
        if np.any(~np.isfinite(p)) or np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise ValueError("populations must lie in [0, 1]")
        object.__setattr__(self, "probs", np.clip(p, 0.0, 1.0))
        object.__setattr__(self, "gamma", complex(self.gamma))

    @property
    def n_max(self) -> int:
        return len(self.probs) - 1

    @property
    def total(self) -> float:
        return float(np.sum(self.probs))

    def is_complete(self) -> bool:
        return 1 - self.tail_tol <= self.total <= 1 + 1e-12


def displaced_populations(state: OscillatorState, gamma: complex, n_max: int = 300,
                          tail_tol: float = TAIL_TOL) -> PopulationVector:
    """``p(n) = |<n| D(-gamma) |psi>|^2`` for ``n <= n_max``."""
    exp = fock_expand(state.displaced(-complex(gamma)), n_max, tail_tol, strict=False)
    pops = exp.populations
    missing = 1 - float(np.sum(pops))
    if missing > tail_tol:
        raise TailError(f"population {missing:.2e} lies above n_max={n_max} at gamma={complex(gamma)}")
    return PopulationVector(pops, gamma, tail_tol)


@dataclass(frozen=True, eq=False)
class RabiTrace:
    """Spin contrast ``P(up) - P(down)`` versus pulse time (ms)."""

    times: np.ndarray
    values: np.ndarray
    omega: float = DEFAULT_OMEGA
    gamma: complex = 0j
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be vectors of equal length")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


def frequencies(omega: float, n_max: int) -> np.ndarray:
    """Sideband frequencies ``omega sqrt(n + 1)``."""
    return omega * np.sqrt(np.arange(n_max + 1) + 1.0)


def design_matrix(times, omega: float, n_max: int) -> np.ndarray:
    return np.cos(np.outer(np.asarray(times, dtype=float), frequencies(omega, n_max)))


def beat_period(omega: float, n_max: int) -> float:
    """Period of the slowest beat, between the two highest resolved frequencies.

    The fractional spacing of neighbouring frequencies falls as ``1/(2n)``,
    so resolving ``n_max`` needs traces that grow with it.
    """
    if n_max < 1:
        return 2 * np.pi / omega
    f = frequencies(omega, n_max)
    return float(2 * np.pi / (f[-1] - f[-2]))


def synthesize_rabi_trace(pops: PopulationVector, omega: float = DEFAULT_OMEGA, times=None,
                          n_beats: float = 4.0, n_points: int | None = None) -> RabiTrace:
    """Exact cosine sum ``sum_n p(n) cos(omega sqrt(n+1) t)``.

    Without ``times`` the trace spans ``n_beats`` beat periods of the
    highest populated pair, sampled well above the Nyquist rate.
    """
    if times is None:
        duration = n_beats * beat_period(omega, pops.n_max)
        f_top = frequencies(omega, pops.n_max)[-1]
        n_points = n_points or int(np.ceil(4 * duration * f_top / (2 * np.pi))) + 1
        times = np.linspace(0.0, duration, n_points)
    values = design_matrix(times, omega, pops.n_max) @ pops.probs
    return RabiTrace(np.asarray(times, dtype=float), values, omega, pops.gamma)


def extract_populations(trace: RabiTrace, n_max: int, cond_limit: float = COND_LIMIT,
                        tail_tol: float = TAIL_TOL) -> PopulationVector:
    """Non-negative least-squares populations from a Rabi trace.

    Raises :class:`IllConditionedError` if the cosine design matrix has a
    condition number above ``cond_limit``: the trace is too short or too
    sparse to tell neighbouring Fock frequencies apart.
    """
    A = design_matrix(trace.times, trace.omega, n_max)
    if A.shape[0] < A.shape[1]:
        raise IllConditionedError(f"{A.shape[0]} trace points cannot determine {A.shape[1]} populations")
    cond = float(np.linalg.cond(A))
    if not cond <= cond_limit:
        raise IllConditionedError(f"design matrix condition number {cond:.3g} exceeds {cond_limit:.3g} "
                                  f"for n_max={n_max} over {trace.times[-1]:.3g} ms")
    p, _ = nnls(A, trace.values)
    return PopulationVector(np.clip(p, 0.0, 1.0), trace.gamma, tail_tol)


def design_condition(times, omega: float, n_max: int) -> float:
    return float(np.linalg.cond(design_matrix(times, omega, n_max)))


def leibfried_parity(pops: PopulationVector) -> float:
    """``sum_n (-1)^n p(n)``."""
    signs = np.where(np.arange(len(pops.probs)) % 2, -1.0, 1.0)
    return float(signs @ pops.probs)


def wigner_point_from_pops(pops: PopulationVector) -> float:
    """``W(gamma) = (2/pi) sum_n (-1)^n p(n)``."""
    return 2 / np.pi * leibfried_parity(pops)


def cost_ratio(t_wig_per_point: float, t_char_per_point: float, p_ps: float) -> float:
    """Time per Wigner point over post-selection-corrected time per chi point."""
    if t_wig_per_point <= 0 or t_char_per_point <= 0:
        raise ValueError("times per point must be positive")
    if not 0 < p_ps <= 1:
        raise ValueError("post-selection probability must lie in (0, 1]")
    return t_wig_per_point / (p_ps * t_char_per_point)
