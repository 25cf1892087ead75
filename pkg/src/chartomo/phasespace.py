"""Analytic phase-space functions of canonical oscillator states.

All functions accept scalar or array phase-space points and broadcast.
Exponents of each component pair are accumulated before exponentiating.
"""

from __future__ import annotations

import enum
from math import comb

import numpy as np

from .states import OscillatorState, SqueezeParam, gaussian_overlap, squeeze_map


class QuasiKind(enum.Enum):
    """Ordering parameter ``l`` of the quasiprobability family."""

    WIGNER = 0
    HUSIMI_Q = -1
    GLAUBER_P = 1

    @property
    def ordering(self) -> int:
        return self.value

    @classmethod
    def parse(cls, value) -> "QuasiKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"wigner": cls.WIGNER, "w": cls.WIGNER, "q": cls.HUSIMI_Q, "husimi": cls.HUSIMI_Q,
                   "husimi_q": cls.HUSIMI_Q, "p": cls.GLAUBER_P, "glauber_p": cls.GLAUBER_P}
        if key not in aliases:
            raise ValueError(f"unknown quasiprobability kind {value!r}")
        return aliases[key]


def _pair_sum(state: OscillatorState, exponent_fn, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    c, g = state.coeffs, state.centers
    total = np.zeros(z.shape, dtype=complex)
    for j in range(len(c)):
        for k in range(len(c)):
            w = np.conj(c[j]) * c[k]
            total += w * np.exp(exponent_fn(g[j], g[k], z))
    return total / state.norm


def char_fn(state: OscillatorState, beta) -> np.ndarray | complex:
    """Symmetric characteristic function ``<D(beta)>``."""
    beta = np.asarray(beta, dtype=complex)
    bt = squeeze_map(beta, state.r, state.theta)

    def expo(d, e, b):
        return (-np.conj(b) * e + np.conj(d) * b + np.conj(d) * e
                - 0.5 * (abs(d) ** 2 + np.abs(b) ** 2 + abs(e) ** 2))

    out = _pair_sum(state, expo, bt)
    # exact at the origin regardless of rounding in the pair sum
    out = np.where(beta == 0, 1.0 + 0j, out)
    return out[()] if out.ndim == 0 else out


def wigner_fn(state: OscillatorState, gamma) -> np.ndarray | float:
    """Analytic Wigner function, real valued."""
    gamma = np.asarray(gamma, dtype=complex)
    gt = squeeze_map(gamma, state.r, state.theta)

    def expo(d, e, z):
        return (-np.conj(d) * e + 2 * np.conj(d) * z + 2 * e * np.conj(z) - 2 * np.abs(z) ** 2
                - 0.5 * (abs(d) ** 2 + abs(e) ** 2))

    out = (2 / np.pi) * _pair_sum(state, expo, gt).real
    return out[()] if out.ndim == 0 else out


def q_fn(state: OscillatorState, beta) -> np.ndarray | float:
    """Husimi Q function ``|<beta|psi>|^2 / pi``."""
    beta = np.asarray(beta, dtype=complex)
    vac = SqueezeParam()
    amp = np.zeros(beta.shape, dtype=complex)
    for c, g in zip(state.coeffs, state.centers):
        amp += c * gaussian_overlap(beta, vac, g, state.squeeze)
    out = np.abs(amp) ** 2 / (np.pi * state.norm)
    return out[()] if out.ndim == 0 else out


def quasi_fn(state: OscillatorState, point, kind) -> np.ndarray | float:
    kind = QuasiKind.parse(kind)
    if kind is QuasiKind.WIGNER:
        return wigner_fn(state, point)
    if kind is QuasiKind.HUSIMI_Q:
        return q_fn(state, point)
    raise ValueError("Glauber-Sudarshan P function can be singular and is not evaluated")


def cat_midline(alpha: float, phi: float, m, kind) -> np.ndarray | float:
    """Closed-form W or Q of ``(|0> + e^{i phi}|alpha>)/sqrt(N)`` on ``alpha/2 + i m``.

    ``alpha`` must be real. Used to exhibit the ``exp(-alpha^2/4)`` suppression
    of interference fringes in Q relative to W.
    """
    kind = QuasiKind.parse(kind)
    m = np.asarray(m, dtype=float)
    norm = 2 * (1 + np.cos(phi) * np.exp(-alpha**2 / 2))
    if kind is QuasiKind.WIGNER:
        out = 4 / (np.pi * norm) * np.exp(-2 * m**2) * (np.exp(-alpha**2 / 2) + np.cos(phi - 2 * m * alpha))
    elif kind is QuasiKind.HUSIMI_Q:
        out = 2 / (np.pi * norm) * np.exp(-alpha**2 / 4 - m**2) * (1 + np.cos(phi - m * alpha))
    else:
        raise ValueError("cat_midline supports Wigner and Husimi Q only")
    return out[()] if out.ndim == 0 else out


def cat_from_origin(alpha: float, phi: float = 0.0) -> OscillatorState:
    """The state ``(|0> + e^{i phi}|alpha>)/sqrt(N)`` used by :func:`cat_midline`."""
    from .states import make_state

    return make_state("custom", components=[(1, 0), (np.exp(1j * phi), alpha)])


# -- symmetric moments ------------------------------------------------------

# second-order accurate central stencils, offset -> weight
_STENCILS = {
    0: {0: 1.0},
    1: {-1: -0.5, 1: 0.5},
    2: {-1: 1.0, 0: -2.0, 1: 1.0},
    3: {-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5},
    4: {-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0},
}


def _partial(state, p: int, q: int, h: float) -> complex:
    """Central-difference estimate of d^p/dx^p d^q/dy^q chi at 0."""
    sx, sy = _STENCILS[p], _STENCILS[q]
    pts = np.array([i * h + 1j * j * h for i in sx for j in sy])
    wts = np.array([sx[i] * sy[j] for i in sx for j in sy])
    return complex(np.sum(wts * char_fn(state, pts)) / h ** (p + q))


def symmetric_moment(state: OscillatorState, m: int, n: int, h: float | None = None) -> complex:
    """Symmetrically ordered moment ``<a^dag^m a^n>_S`` from the noiseless analytic chi.

    Evaluates ``(d/dbeta)^m (-d/dbeta^*)^n chi(beta)`` at the origin with
    Wirtinger derivatives ``d/dbeta = (d_x - i d_y)/2`` and
    ``d/dbeta^* = (d_x + i d_y)/2``, using central differences with one
    Richardson halving. ``h`` defaults to 1e-3 for total order <= 2 and 0.05
    above, where a tiny step would be dominated by rounding.
    """
    if m < 0 or n < 0 or m > 2 or n > 2:
        raise ValueError("symmetric_moment supports 0 <= m, n <= 2")
    if m + n > 4:
        raise ValueError("total order above 4 is not supported")
    if m + n == 0:
        return 1.0 + 0j
    if h is None:
        h = 1e-3 if m + n <= 2 else 5e-2
    if h <= 0:
        raise ValueError("finite-difference step must be positive")

    # (d_x - i d_y)^m (d_x + i d_y)^n expanded into d_x^p d_y^q terms
    poly: dict[tuple[int, int], complex] = {}
    for i in range(m + 1):
        for j in range(n + 1):
            key = (i + j, (m - i) + (n - j))
            coeff = comb(m, i) * comb(n, j) * (-1j) ** (m - i) * (1j) ** (n - j)
            poly[key] = poly.get(key, 0) + coeff

    def estimate(step):
        total = 0j
        for (p, q), coeff in poly.items():
            if coeff == 0:
                continue
            total += coeff * _partial(state, p, q, step)
        return total * (-1) ** n / 2 ** (m + n)

    coarse, fine = estimate(h), estimate(h / 2)
    return (4 * fine - coarse) / 3
