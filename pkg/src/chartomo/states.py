"""Pure oscillator states written as a squeezing operator acting on a coherent superposition.

Every state handled by the package is stored in the canonical form

    |psi> = S(r e^{i theta}) sum_k c_k |g_k> / sqrt(N)

where ``|g_k>`` are coherent states, ``S`` is the squeezing operator
``exp((-xi a^dag^2 + xi^* a^2)/2)`` and ``N`` is the squared norm of the
unnormalised superposition. Displacements applied outside the squeezer are
moved inside with the interchange relation ``D(a) S = S D(a')`` and merged
with the displacement composition law, so the analytic phase-space formulas
only ever see coherent superpositions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

DEFAULT_NMAX = 500
TAIL_TOL = 1e-8
MERGE_TOL = 1e-10
ZERO_COEFF_TOL = 1e-14

FAMILIES = ("vacuum", "displaced_squeezed", "cat", "gkp", "custom")


class StateError(ValueError):
    """Invalid state construction."""


class FockTruncationError(StateError):
    """Too much of the state lies above the Fock cutoff."""


class FockOverflowError(ArithmeticError):
    """Fock amplitudes could not be represented in double precision."""


def _wrap_angle(theta: float) -> float:
    wrapped = (theta + np.pi) % (2 * np.pi) - np.pi
    return float(wrapped)


@dataclass(frozen=True)
class SqueezeParam:
    r: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.r) or not np.isfinite(self.theta):
            raise StateError("squeezing parameters must be finite")
        if self.r < 0:
            raise StateError(f"squeezing magnitude must be >= 0, got {self.r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "theta", _wrap_angle(self.theta))

    @property
    def xi(self) -> complex:
        return self.r * np.exp(1j * self.theta)


def squeeze_map(z, r: float, theta: float):
    """Linear phase-space map ``z cosh r + z^* e^{i theta} sinh r``.

    This is the argument substitution for squeezed characteristic and Wigner
    functions and the interchange rule ``D(z) S = S D(squeeze_map(z))``.
    """
    return np.cosh(r) * z + np.exp(1j * theta) * np.sinh(r) * np.conj(z)


def unsqueeze_map(z, r: float, theta: float):
    """Inverse of :func:`squeeze_map`."""
    return np.cosh(r) * z - np.exp(1j * theta) * np.sinh(r) * np.conj(z)


def coherent_overlap(b, a):
    """<b|a> for coherent states (broadcasting)."""
    b = np.asarray(b)
    a = np.asarray(a)
    return np.exp(-0.5 * (np.abs(b) ** 2 + np.abs(a) ** 2 - 2 * np.conj(b) * a))


def _gram(centers: np.ndarray) -> np.ndarray:
    return coherent_overlap(centers[:, None], centers[None, :])


@dataclass(frozen=True, eq=False)
class OscillatorState:
    """Canonical state ``S(xi) sum_k coeffs[k] |centers[k]> / sqrt(norm)``.

    Instances are immutable; build them with :func:`make_state` or
    :func:`canonicalize` rather than directly.
    """

    coeffs: np.ndarray
    centers: np.ndarray
    squeeze: SqueezeParam
    norm: float

    @property
    def r(self) -> float:
        return self.squeeze.r

    @property
    def theta(self) -> float:
        return self.squeeze.theta

    def __len__(self):
        return len(self.coeffs)

    def components(self):
        return list(zip(self.coeffs.tolist(), self.centers.tolist()))

    def displaced(self, beta: complex) -> "OscillatorState":
        """Return ``D(beta)|psi>`` in canonical form."""
        inner = complex(squeeze_map(complex(beta), self.r, self.theta))
        phases = np.exp(0.5 * (inner * np.conj(self.centers) - np.conj(inner) * self.centers))
        return canonicalize(self.coeffs * phases, self.centers + inner, self.squeeze)

    def with_phase(self, phi: float) -> "OscillatorState":
        return canonicalize(self.coeffs * np.exp(1j * phi), self.centers, self.squeeze)

    def __repr__(self):
        comps = ", ".join(f"({c:.4g}, {g:.4g})" for c, g in self.components())
        return f"OscillatorState(r={self.r:.4g}, theta={self.theta:.4g}, components=[{comps}])"


def normalization(state_or_coeffs, centers=None) -> float:
    """Squared norm ``N = sum c_j^* c_k <g_j|g_k>`` of a coherent superposition.

    Squeezing is unitary and does not enter. Accepts either a state or the
    raw ``(coeffs, centers)`` pair.
    """
    if centers is None:
        coeffs = state_or_coeffs.coeffs
        centers = state_or_coeffs.centers
    else:
        coeffs = np.asarray(state_or_coeffs, dtype=complex)
        centers = np.asarray(centers, dtype=complex)
    n = np.conj(coeffs) @ _gram(centers) @ coeffs
    return float(n.real)


def canonicalize(coeffs, centers, squeeze: SqueezeParam | None = None) -> OscillatorState:
    """Merge coincident centers, drop vanishing weights, cache the norm."""
    squeeze = squeeze or SqueezeParam()
    coeffs = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    centers = np.atleast_1d(np.asarray(centers, dtype=complex))
    if coeffs.shape != centers.shape:
        raise StateError("coefficient and center lists differ in length")
    if not (np.all(np.isfinite(coeffs)) and np.all(np.isfinite(centers))):
        raise StateError("state components must be finite")

    merged_c: list[complex] = []
    merged_g: list[complex] = []
    for c, g in zip(coeffs, centers):
        for i, h in enumerate(merged_g):
            if abs(g - h) < MERGE_TOL:
                merged_c[i] += c
                break
        else:
            merged_c.append(complex(c))
            merged_g.append(complex(g))
    keep = [i for i, c in enumerate(merged_c) if abs(c) >= ZERO_COEFF_TOL]
    if not keep:
        raise StateError("all superposition coefficients vanish")
    c_arr = np.array([merged_c[i] for i in keep], dtype=complex)
    g_arr = np.array([merged_g[i] for i in keep], dtype=complex)
    norm = normalization(c_arr, g_arr)
    if not norm > 0:
        raise StateError("superposition has zero norm")
    c_arr.setflags(write=False)
    g_arr.setflags(write=False)
    return OscillatorState(c_arr, g_arr, squeeze, norm)


def _superposition(delta: complex, terms, r: float, theta: float) -> OscillatorState:
    """Canonical form of ``D(delta) [sum_k c_k D(mu_k)] S(r e^{i theta}) |0>``."""
    sq = SqueezeParam(r, theta)
    delta = complex(delta)
    coeffs, centers = [], []
    for c, mu in terms:
        c, mu = complex(c), complex(mu)
        # D(delta) D(mu) = exp((delta mu^* - delta^* mu)/2) D(delta + mu)
        phase = np.exp(0.5 * (delta * mu.conjugate() - delta.conjugate() * mu))
        coeffs.append(c * phase)
        centers.append(delta + mu)
    centers = squeeze_map(np.array(centers, dtype=complex), sq.r, sq.theta)
    return canonicalize(coeffs, centers, sq)


def _complex_param(params: Mapping, name: str, default=0.0) -> complex:
    if name in params:
        return complex(params[name])
    re_key, im_key = f"re_{name}", f"im_{name}"
    if re_key in params or im_key in params:
        return complex(float(params.get(re_key, 0.0)), float(params.get(im_key, 0.0)))
    return complex(default)


def make_state(family: str, params: Mapping | None = None, **kwargs) -> OscillatorState:
    """Build a canonical state of one of the standard families.

    Parameters are given as a mapping (or keywords). Complex parameters
    ``delta``, ``alpha`` and ``l`` may be passed directly or split into
    ``re_*``/``im_*`` parts.

    * ``vacuum``: no parameters.
    * ``displaced_squeezed``: ``D(delta) S(r e^{i theta})|0>``.
    * ``cat``: ``D(delta) [D(-alpha/2) + D(alpha/2)] S|0>``.
    * ``gkp``: ``D(delta) [D(-l) + 2 + D(l)] S|0>``.
    * ``custom``: ``D(delta) [sum_k c_k D(mu_k)] S|0>`` with
      ``components=[(c_k, mu_k), ...]``; complex entries may be given as
      ``[re, im]`` pairs.
    """
    p = dict(params or {})
    p.update(kwargs)
    if family not in FAMILIES:
        raise StateError(f"unknown state family {family!r}; expected one of {FAMILIES}")
    r = float(p.get("r", 0.0))
    theta = float(p.get("theta", 0.0))
    if r < 0:
        raise StateError(f"squeezing magnitude must be >= 0, got {r}")
    delta = _complex_param(p, "delta")

    if family == "vacuum":
        return _superposition(0, [(1, 0)], 0.0, 0.0)
    if family == "displaced_squeezed":
        return _superposition(delta, [(1, 0)], r, theta)
    if family == "cat":
        if not any(k in p for k in ("alpha", "re_alpha", "im_alpha")):
            raise StateError("cat state requires alpha")
        alpha = _complex_param(p, "alpha")
        return _superposition(delta, [(1, -alpha / 2), (1, alpha / 2)], r, theta)
    if family == "gkp":
        if not any(k in p for k in ("l", "re_l", "im_l")):
            raise StateError("gkp state requires l")
        ell = _complex_param(p, "l")
        return _superposition(delta, [(1, -ell), (2, 0), (1, ell)], r, theta)

    comps = p.get("components")
    if not comps:
        raise StateError("custom state requires a non-empty 'components' list")
    terms = [(_as_complex(c), _as_complex(mu)) for c, mu in comps]
    return _superposition(delta, terms, r, theta)


def _as_complex(value) -> complex:
    if isinstance(value, (list, tuple)):
        re, im = value
        return complex(float(re), float(im))
    return complex(value)


# -- Fock basis ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FockExpansion:
    amplitudes: np.ndarray
    n_max: int
    tail_tol: float = TAIL_TOL

    @property
    def weight(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def displaced_squeezed_fock(alpha: complex, r: float, theta: float, n_max: int) -> np.ndarray:
    """Amplitudes ``<n|D(alpha) S(r e^{i theta})|0>`` for ``n = 0..n_max``.

    Uses the Hermite three-term recurrence rescaled so that each step mixes
    quantities of order one:

        u_{n+1} = (g u_n / cosh r - t sqrt(n) u_{n-1}) / sqrt(n+1)

    with ``g = alpha cosh r + alpha^* e^{i theta} sinh r`` and
    ``t = e^{i theta} tanh r``. The Gaussian prefactor
    ``exp(-|alpha|^2/2 - alpha^*^2 t/2) / sqrt(cosh r)`` multiplies ``u_0``;
    it is kept as a logarithm, and the iterates are renormalised whenever
    they grow past 1e150, so neither the prefactor nor the recurrence can
    overflow. The form is well defined at ``r = 0``, where the textbook
    Hermite expression is singular.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    alpha = complex(alpha)
    ch = np.cosh(r)
    t = np.exp(1j * theta) * np.tanh(r)
    g = complex(squeeze_map(alpha, r, theta))
    log_pref = -0.5 * abs(alpha) ** 2 - 0.5 * alpha.conjugate() ** 2 * t - 0.5 * np.log(ch)
    if not np.isfinite(log_pref):
        raise FockOverflowError(f"Gaussian prefactor not finite for alpha={alpha}, r={r}")
    vals = np.empty(n_max + 1, dtype=complex)
    logs = np.empty(n_max + 1)
    vals[0], logs[0] = 1.0, 0.0
    lead = g / ch
    prev, cur, log_scale = 0j, 1.0 + 0j, 0.0
    for n in range(n_max):
        nxt = (lead * cur - t * np.sqrt(n) * prev) / np.sqrt(n + 1)
        prev, cur = cur, nxt
        mag = abs(cur)
        if mag > 1e150:
            prev, cur = prev / mag, cur / mag
            log_scale += np.log(mag)
        vals[n + 1], logs[n + 1] = cur, log_scale
    with np.errstate(under="ignore"):
        out = vals * np.exp(log_pref + logs)
    if not np.all(np.isfinite(out)):
        raise FockOverflowError(
            f"Fock amplitudes overflowed for alpha={alpha}, r={r} at n_max={n_max}"
        )
    return out


def fock_expand(state: OscillatorState, n_max: int = DEFAULT_NMAX, tail_tol: float = TAIL_TOL,
                strict: bool = True) -> FockExpansion:
    """Fock-basis amplitudes of ``state`` truncated at ``n_max``.

    With ``strict`` (the default) a truncated weight below ``1 - tail_tol``
    raises :class:`FockTruncationError` instead of returning an expansion
    that silently misses part of the state.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    amps = np.zeros(n_max + 1, dtype=complex)
    for c, g in zip(state.coeffs, state.centers):
        # S|g> = D(a) S|0> with a the inverse interchange of g
        a = complex(unsqueeze_map(g, state.r, state.theta))
        amps += c * displaced_squeezed_fock(a, state.r, state.theta, n_max)
    amps /= np.sqrt(state.norm)
    if not np.all(np.isfinite(amps)):
        raise FockOverflowError("non-finite Fock amplitude")
    amps.setflags(write=False)
    exp = FockExpansion(amps, n_max, tail_tol)
    if strict and exp.weight < 1 - tail_tol:
        raise FockTruncationError(f"weight {exp.weight:.10f} below n_max={n_max} misses more than {tail_tol:g}")
    return exp


def fidelity(a: OscillatorState, b: OscillatorState, n_max: int = DEFAULT_NMAX) -> float:
    """Squared overlap ``|<a|b>|^2`` from truncated Fock expansions."""
    fa = fock_expand(a, n_max).amplitudes
    fb = fock_expand(b, n_max).amplitudes
    return float(abs(np.vdot(fa, fb)) ** 2)


# -- closed-form Gaussian overlaps -------------------------------------------


def _bargmann(g, r: float, theta: float):
    """Coefficients of the Bargmann function ``P exp(B z - t z^2 / 2)`` of S|g>."""
    g = np.asarray(g, dtype=complex)
    t = np.exp(1j * theta) * np.tanh(r)
    a = unsqueeze_map(g, r, theta)
    log_p = -0.5 * np.abs(a) ** 2 - 0.5 * np.conj(a) ** 2 * t - 0.5 * np.log(np.cosh(r))
    return log_p, g / np.cosh(r), t


def gaussian_overlap(g1, sq1: SqueezeParam, g2, sq2: SqueezeParam):
    """``<g1| S(xi1)^dag S(xi2) |g2>`` evaluated by a Gaussian integral.

    Broadcasts over ``g1`` and ``g2``. Independent of the Fock recurrence:
    only the Bargmann generating function of a displaced squeezed state is
    shared.
    """
    lp1, b1, t1 = _bargmann(g1, sq1.r, sq1.theta)
    lp2, b2, t2 = _bargmann(g2, sq2.r, sq2.theta)
    # (1/pi) int exp(-|z|^2 + mu z + nu z* + A z^2/2 + B z*^2/2) d^2z
    mu, nu = b2, np.conj(b1)
    big_a, big_b = -t2, -np.conj(t1)
    det = 1 - big_a * big_b
    expo = (mu * nu + 0.5 * (big_a * nu**2 + big_b * mu**2)) / det
    return np.exp(np.conj(lp1) + lp2 + expo) / np.sqrt(det)


def overlap(a: OscillatorState, b: OscillatorState) -> complex:
    """Inner product ``<a|b>`` of two normalised states."""
    gram = gaussian_overlap(a.centers[:, None], a.squeeze, b.centers[None, :], b.squeeze)
    val = np.conj(a.coeffs) @ gram @ b.coeffs
    return complex(val / np.sqrt(a.norm * b.norm))


def fidelity_overlap_oracle(a: OscillatorState, b: OscillatorState) -> float:
    """Fidelity from closed-form displaced-squeezed overlaps, no Fock truncation."""
    return float(abs(overlap(a, b)) ** 2)
