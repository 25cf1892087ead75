"""Sampling grids, symmetry completion and DFT reconstruction of quasiprobabilities."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

import numpy as np

from .measurement import ReadoutRecord, biased_expectation, records_to_arrays, sample_records
from .phasespace import QuasiKind, wigner_fn
from .states import OscillatorState

LATTICE_TOL = 1e-6


class CoverageError(ValueError):
    """The grid does not cover the region an operation needs."""


class DataConsistencyError(ValueError):
    """Symmetry-related measurements disagree beyond their errors."""


class GridKind(str, enum.Enum):
    FULL_SQUARE = "full_square"
    HALF_PLANE = "half_plane"
    POSITIVE_QUADRANT = "positive_quadrant"
    AXIS_SCAN_RE = "axis_scan_re"
    AXIS_SCAN_IM = "axis_scan_im"


class Provenance(str, enum.Enum):
    MEASURED = "measured"
    SYMMETRY_COMPLETED = "symmetry_completed"
    ZERO_PADDED = "zero_padded"
    RESAMPLED = "resampled"


@dataclass(frozen=True)
class GridSpec:
    """Square-lattice sampling pattern.

    ``extent`` bounds ``|Re beta|`` and, unless ``extent_im`` is given,
    ``|Im beta|`` as well. A separate ``extent_im`` gives a rectangular
    window on the same square lattice, which suits squeezed states whose
    characteristic function is long along one axis.
    """

    kind: GridKind
    extent: float
    spacing: float
    extent_im: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GridKind(self.kind))
        if not self.spacing > 0:
            raise ValueError(f"grid spacing must be positive, got {self.spacing}")
        if self.extent < self.spacing or (self.extent_im is not None and self.extent_im < self.spacing):
            raise ValueError("grid extent must be at least one spacing")

    @property
    def half_width(self) -> int:
        """Lattice steps from the origin to the edge along Re."""
        return int(np.floor(self.extent / self.spacing + 1e-9))

    @property
    def half_height(self) -> int:
        ext = self.extent if self.extent_im is None else self.extent_im
        return int(np.floor(ext / self.spacing + 1e-9))

    def to_dict(self):
        d = {"kind": self.kind.value, "extent": self.extent, "spacing": self.spacing}
        if self.extent_im is not None:
            d["extent_im"] = self.extent_im
        return d

    @classmethod
    def from_dict(cls, d) -> "GridSpec":
        return cls(d["kind"], float(d["extent"]), float(d["spacing"]),
                   None if d.get("extent_im") is None else float(d["extent_im"]))


def build_grid(spec: GridSpec) -> np.ndarray:
    """Lattice points of ``spec`` in row-major order (Re fastest, Im rows ascending).

    ``half_plane`` keeps ``Im >= 0`` and, on the real axis, only ``Re >= 0``.
    """
    Kx, Ky = spec.half_width, spec.half_height
    full_x, full_y = np.arange(-Kx, Kx + 1), np.arange(-Ky, Ky + 1)
    pos_x, pos_y = np.arange(0, Kx + 1), np.arange(0, Ky + 1)
    kind = spec.kind
    if kind is GridKind.FULL_SQUARE:
        jj, kk = np.meshgrid(full_x, full_y)
    elif kind is GridKind.POSITIVE_QUADRANT:
        jj, kk = np.meshgrid(pos_x, pos_y)
    elif kind is GridKind.HALF_PLANE:
        jj, kk = np.meshgrid(full_x, pos_y)
        keep = (kk > 0) | (jj >= 0)
        jj, kk = jj[keep], kk[keep]
    elif kind is GridKind.AXIS_SCAN_RE:
        jj, kk = full_x, np.zeros_like(full_x)
    else:
        jj, kk = np.zeros_like(full_y), full_y
    return spec.spacing * (jj.ravel() + 1j * kk.ravel())


# -- characteristic-function grids -------------------------------------------


@dataclass(frozen=True, eq=False)
class ChiGrid:
    """Estimated characteristic-function values on phase-space points.

    ``sem`` packs the standard errors of the real and imaginary parts into
    one complex number. ``has_imag`` is false where only the real quadrature
    was measured (the imaginary part is then stored as zero). ``imag_sign``
    is -1 for points whose imaginary part was obtained by conjugating a
    measured value; bias subtraction needs it.
    """

    beta: np.ndarray
    value: np.ndarray
    sem: np.ndarray
    provenance: np.ndarray
    has_imag: np.ndarray
    imag_sign: np.ndarray
    spacing: float
    bias_subtracted: bool = False
    subtracted_bias: float = 0.0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.beta)

    def lattice_index(self) -> np.ndarray:
        """Integer lattice coordinates ``(j, k)`` with ``beta = spacing (j + i k)``."""
        scaled = self.beta / self.spacing
        idx = np.stack([np.round(scaled.real), np.round(scaled.imag)], axis=1).astype(int)
        return idx

    def on_lattice(self) -> bool:
        scaled = self.beta / self.spacing
        return bool(np.all(np.abs(scaled - np.round(scaled.real) - 1j * np.round(scaled.imag)) < LATTICE_TOL))

    def sorted(self) -> "ChiGrid":
        order = np.lexsort((self.beta.real, self.beta.imag))
        return self._take(order)

    def _take(self, idx) -> "ChiGrid":
        return replace(self, beta=self.beta[idx], value=self.value[idx], sem=self.sem[idx],
                       provenance=self.provenance[idx], has_imag=self.has_imag[idx],
                       imag_sign=self.imag_sign[idx])

    def half_extents(self) -> tuple[int, int]:
        idx = self.lattice_index()
        return int(np.max(np.abs(idx[:, 0]))), int(np.max(np.abs(idx[:, 1])))

    def is_full_square(self) -> bool:
        """True if the points fill a lattice rectangle centred on the origin."""
        if not len(self) or not self.on_lattice():
            return False
        idx = self.lattice_index()
        Kx, Ky = self.half_extents()
        keys = {tuple(p) for p in idx}
        return len(keys) == len(idx) == (2 * Kx + 1) * (2 * Ky + 1)

    def as_matrix(self):
        """Dense array of values, rows = Im index, cols = Re index, plus both axes."""
        if not self.is_full_square():
            raise CoverageError("grid does not cover a full lattice rectangle")
        idx = self.lattice_index()
        Kx, Ky = self.half_extents()
        mat = np.zeros((2 * Ky + 1, 2 * Kx + 1), dtype=complex)
        mat[idx[:, 1] + Ky, idx[:, 0] + Kx] = self.value
        return mat, self.spacing * np.arange(-Kx, Kx + 1), self.spacing * np.arange(-Ky, Ky + 1)


def _make_grid(beta, value, sem, provenance, has_imag, spacing, imag_sign=None, **kw) -> ChiGrid:
    beta = np.asarray(beta, dtype=complex)
    n = len(beta)
    prov = np.asarray(provenance if not isinstance(provenance, (str, Provenance)) else [provenance] * n,
                      dtype=object)
    prov = np.array([Provenance(p).value for p in prov], dtype=object)
    if imag_sign is None:
        imag_sign = np.ones(n)
    return ChiGrid(beta, np.asarray(value, dtype=complex), np.asarray(sem, dtype=complex), prov,
                   np.asarray(has_imag, dtype=bool), np.asarray(imag_sign, dtype=float), float(spacing), **kw)


def grid_from_records(records: list[ReadoutRecord], spacing: float) -> ChiGrid:
    """Combine quadrature readouts into complex chi estimates per phase-space point.

    Points read at a single angle 0 get only a real part. Two or more
    distinct angles are inverted by weighted least squares on
    ``cos(theta) Re + sin(theta) Im``; any pair of angles differing by
    pi/2 determines chi exactly.
    """
    beta, theta, est, sem = records_to_arrays(records)
    if not len(beta):
        raise CoverageError("no records")
    scaled = beta / spacing
    keys = np.stack([np.round(scaled.real * 1e6), np.round(scaled.imag * 1e6)], axis=1).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    n = len(first)
    w = 1 / np.where(sem > 0, sem, 1e-12) ** 2
    c, s = np.cos(theta), np.sin(theta)
    c = np.where(np.abs(c) < 1e-12, 0.0, c)
    s = np.where(np.abs(s) < 1e-12, 0.0, s)

    def acc(v):
        return np.bincount(inverse, weights=v, minlength=n)

    scc, scs, sss = acc(w * c * c), acc(w * c * s), acc(w * s * s)
    scy, ssy = acc(w * c * est), acc(w * s * est)
    det = scc * sss - scs**2
    two_angles = det > 1e-10 * (scc + sss) ** 2
    real_only = ~two_angles & (sss == 0)
    bad = ~two_angles & ~real_only
    if np.any(bad):
        b = beta[first[np.flatnonzero(bad)[0]]]
        raise ValueError(f"point {b} has a single readout angle that does not isolate Re chi")

    safe_det = np.where(two_angles, det, 1.0)
    re = np.where(two_angles, (sss * scy - scs * ssy) / safe_det, scy / np.where(scc > 0, scc, 1.0))
    im = np.where(two_angles, (scc * ssy - scs * scy) / safe_det, 0.0)
    re_sem = np.where(two_angles, np.sqrt(np.abs(sss / safe_det)), 1 / np.sqrt(np.where(scc > 0, scc, 1.0)))
    im_sem = np.where(two_angles, np.sqrt(np.abs(scc / safe_det)), 0.0)
    grid = _make_grid(beta[first], re + 1j * im, re_sem + 1j * im_sem, Provenance.MEASURED, two_angles, spacing)
    return grid.sorted()


def complete_by_symmetry(grid: ChiGrid, mode: str = "hermitian") -> ChiGrid:
    """Fill the full square from a partial measurement using known symmetries.

    ``hermitian`` adds ``chi(-beta) = chi(beta)^*`` for every point.
    ``quadrant_mirror`` additionally assumes ``chi(beta^*) = chi(beta)^*``,
    which holds for states with a real, reflection-symmetric chi
    (undisplaced, unrotated squeezing); a measured quadrant then yields all
    four. Points already present are kept; a symmetric partner that
    disagrees with them by more than three combined standard errors raises
    :class:`DataConsistencyError`. Targets reached from several sources
    (the axes under mirroring) are averaged, never duplicated.
    """
    if mode not in ("hermitian", "quadrant_mirror"):
        raise ValueError(f"unknown mirror mode {mode!r}")
    if not grid.on_lattice():
        raise ValueError("symmetry completion needs lattice points; resample first")
    idx = grid.lattice_index()
    present = {tuple(p): i for i, p in enumerate(idx)}

    # (sign_re, sign_im, conj) maps of lattice coordinates
    maps = [((-1, -1), True)]
    if mode == "quadrant_mirror":
        maps += [((1, -1), True), ((-1, 1), False)]

    pending: dict[tuple, list] = {}
    for i, (j, k) in enumerate(idx):
        for (sj, sk), conj in maps:
            tgt = (sj * j, sk * k)
            v = np.conj(grid.value[i]) if conj else grid.value[i]
            sign = -grid.imag_sign[i] if conj else grid.imag_sign[i]
            if tgt in present:
                m = present[tgt]
                _check_consistent(grid, m, v, grid.sem[i], grid.has_imag[i])
                continue
            pending.setdefault(tgt, []).append((v, grid.sem[i], grid.has_imag[i], sign))

    if not pending:
        return grid
    new_beta, new_val, new_sem, new_im, new_sign = [], [], [], [], []
    for (j, k), items in sorted(pending.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        vals = np.array([it[0] for it in items])
        sems = np.array([it[1] for it in items])
        new_beta.append(grid.spacing * (j + 1j * k))
        new_val.append(vals.mean())
        # identical copies carry the same error; averaging does not shrink it
        new_sem.append(complex(np.max(sems.real), np.max(sems.imag)))
        new_im.append(all(it[2] for it in items))
        new_sign.append(items[0][3])
    extra = _make_grid(new_beta, new_val, new_sem, Provenance.SYMMETRY_COMPLETED, new_im, grid.spacing,
                       imag_sign=new_sign)
    merged = replace(
        grid,
        beta=np.concatenate([grid.beta, extra.beta]),
        value=np.concatenate([grid.value, extra.value]),
        sem=np.concatenate([grid.sem, extra.sem]),
        provenance=np.concatenate([grid.provenance, extra.provenance]),
        has_imag=np.concatenate([grid.has_imag, extra.has_imag]),
        imag_sign=np.concatenate([grid.imag_sign, extra.imag_sign]),
    )
    return merged.sorted()


def _check_consistent(grid: ChiGrid, m: int, v: complex, s: complex, has_imag: bool):
    diff = grid.value[m] - v
    tol_re = 3 * np.hypot(grid.sem[m].real, s.real) + 1e-12
    tol_im = 3 * np.hypot(grid.sem[m].imag, s.imag) + 1e-12
    bad = abs(diff.real) > tol_re
    if has_imag and grid.has_imag[m] and grid.beta[m] != 0:
        bad = bad or abs(diff.imag) > tol_im
    if bad:
        raise DataConsistencyError(
            f"symmetric partners disagree at beta={grid.beta[m]}: {grid.value[m]} vs {v}"
        )


def subtract_bias(grid: ChiGrid, b: float) -> ChiGrid:
    """Invert the SPAM map: each measured quadrature ``e -> (e - b) / (1 - |b|)``."""
    if grid.bias_subtracted:
        raise ValueError("bias has already been subtracted from this grid")
    b = float(b)
    if not abs(b) < 1:
        raise ValueError(f"bias must satisfy |b| < 1, got {b}")
    scale = 1 - abs(b)
    re = (grid.value.real - b) / scale
    # conjugated copies store -(measured); undo that before removing b
    im = np.where(grid.has_imag, grid.imag_sign * ((grid.imag_sign * grid.value.imag) - b) / scale, 0.0)
    return replace(grid, value=re + 1j * im, sem=grid.sem / scale, bias_subtracted=True, subtracted_bias=b)


def resample(grid: ChiGrid, spacing: float | None = None) -> ChiGrid:
    """Bilinearly interpolate off-lattice data onto an equidistant square lattice.

    Rectilinear input uses tensor-product linear interpolation; scattered
    input falls back to piecewise-linear interpolation on a triangulation.
    Points outside the data hull are zero.
    """
    from scipy.interpolate import LinearNDInterpolator, RegularGridInterpolator

    spacing = float(spacing or grid.spacing)
    xs, ys = np.unique(grid.beta.real), np.unique(grid.beta.imag)
    Kx = int(np.floor(np.max(np.abs(xs)) / spacing + 1e-9))
    Ky = int(np.floor(np.max(np.abs(ys)) / spacing + 1e-9))
    gx, gy = np.meshgrid(spacing * np.arange(-Kx, Kx + 1), spacing * np.arange(-Ky, Ky + 1))
    targets = np.stack([gx.ravel(), gy.ravel()], axis=1)

    def interp(values):
        if len(xs) * len(ys) == len(grid.beta):
            mat = np.zeros((len(ys), len(xs)))
            ix = np.searchsorted(xs, grid.beta.real)
            iy = np.searchsorted(ys, grid.beta.imag)
            mat[iy, ix] = values
            f = RegularGridInterpolator((ys, xs), mat, bounds_error=False, fill_value=0.0)
            return f(targets[:, ::-1])
        f = LinearNDInterpolator(np.stack([grid.beta.real, grid.beta.imag], axis=1), values, fill_value=0.0)
        return f(targets)

    val = interp(grid.value.real) + 1j * interp(grid.value.imag)
    sem = interp(grid.sem.real) + 1j * interp(grid.sem.imag)
    has_imag = np.full(len(val), bool(np.all(grid.has_imag)))
    return _make_grid(targets[:, 0] + 1j * targets[:, 1], val, sem, Provenance.RESAMPLED, has_imag, spacing,
                      bias_subtracted=grid.bias_subtracted, subtracted_bias=grid.subtracted_bias,
                      meta=dict(grid.meta))


# -- Fourier reconstruction ---------------------------------------------------


@dataclass(frozen=True, eq=False)
class WignerGrid:
    gamma: np.ndarray
    value: np.ndarray
    imag_residual: np.ndarray
    kind: QuasiKind = QuasiKind.WIGNER
    meta: dict = field(default_factory=dict)

    def as_matrix(self):
        """Dense array (rows = Im gamma, cols = Re gamma) if the points form a tensor grid."""
        xs, ys = np.unique(np.round(self.gamma.real, 12)), np.unique(np.round(self.gamma.imag, 12))
        if len(xs) * len(ys) != len(self.gamma):
            raise CoverageError("output points do not form a rectangular grid")
        mat = np.full((len(ys), len(xs)), np.nan)
        mat[np.searchsorted(ys, np.round(self.gamma.imag, 12)), np.searchsorted(xs, np.round(self.gamma.real, 12))] = self.value
        return mat, xs, ys


def _prepare_lattice(grid: ChiGrid, pad_factor: float):
    if pad_factor < 1:
        raise ValueError("pad factor must be >= 1")
    if not grid.on_lattice():
        grid = resample(grid)
    if not grid.is_full_square():
        raise CoverageError("DFT reconstruction needs a full lattice rectangle; complete by symmetry first")
    mat, _, _ = grid.as_matrix()
    Kx, Ky = grid.half_extents()
    Px, Py = int(np.ceil(pad_factor * Kx)), int(np.ceil(pad_factor * Ky))
    padded = np.zeros((2 * Py + 1, 2 * Px + 1), dtype=complex)
    padded[Py - Ky:Py + Ky + 1, Px - Kx:Px + Kx + 1] = mat
    return grid, padded, grid.spacing, Px, Py


def _kernel_weight(kind: QuasiKind, spacing: float, Px: int, Py: int):
    if kind is QuasiKind.GLAUBER_P:
        raise ValueError("Glauber-Sudarshan P reconstruction refused: the e^{|beta|^2/2} kernel "
                         "amplifies truncation and noise without bound")
    if kind is QuasiKind.WIGNER:
        return 1.0
    bx, by = np.meshgrid(spacing * np.arange(-Px, Px + 1), spacing * np.arange(-Py, Py + 1))
    return np.exp(kind.ordering * (bx**2 + by**2) / 2)


def native_output_axes(spacing: float, Px: int, Py: int):
    """Re and Im gamma axes natural to an FFT of a ``(2Py+1, 2Px+1)`` padded lattice."""
    # the Re(gamma) frequency pairs with the Im(beta) index and vice versa
    d_re = np.pi / ((2 * Py + 1) * spacing)
    d_im = np.pi / ((2 * Px + 1) * spacing)
    return d_re * np.arange(-Py, Py + 1), d_im * np.arange(-Px, Px + 1)


def dft_wigner(grid: ChiGrid, pad_factor: float = 4.0, out_spec: GridSpec | None = None,
               kind=QuasiKind.WIGNER, method: str = "separable") -> WignerGrid:
    """Discrete Fourier transform of a sampled chi grid into W (or Q).

    ``W_l(gamma) = (d^2/pi^2) sum_j chi(beta_j) e^{l |beta_j|^2/2} e^{gamma beta_j^* - gamma^* beta_j}``

    The grid is resampled onto an equidistant lattice if needed and zero
    padded to ``pad_factor`` times its extent. ``method`` selects the
    literal double sum (``direct``), the same sum factorised along the two
    axes (``separable``), or an FFT on the padded lattice (``fft``), which
    evaluates on its native gamma lattice and ignores ``out_spec``. Zero
    padding changes only the native FFT lattice; the direct and separable
    sums at fixed output points are unaffected by it.
    """
    kind = QuasiKind.parse(kind)
    grid, A, d, Px, Py = _prepare_lattice(grid, pad_factor)
    A = A * _kernel_weight(kind, d, Px, Py)
    pref = d**2 / np.pi**2
    jdx = np.arange(-Px, Px + 1)  # Re beta index, axis 1 of A
    kdx = np.arange(-Py, Py + 1)  # Im beta index, axis 0 of A

    if method == "fft":
        re_axis, im_axis = native_output_axes(d, Px, Py)
        # exponent 2i d (Im(gamma) j - Re(gamma) k): forward DFT over k, inverse over j
        F = np.fft.ifftshift(A)
        F = np.fft.fft(F, axis=0)
        F = np.fft.ifft(F, axis=1) * A.shape[1]
        F = np.fft.fftshift(F) * pref  # F[p (Re gamma), q (Im gamma)]
        W = F.T
        gx, gy = np.meshgrid(re_axis, im_axis)
        gamma = (gx + 1j * gy).ravel()
        vals = W.ravel()
    else:
        if out_spec is None:
            Kx, Ky = grid.half_extents()
            out_spec = GridSpec(GridKind.FULL_SQUARE, Kx * d, d, Ky * d)
        gamma = build_grid(out_spec)
        # zero padding contributes nothing to a sum at fixed gamma
        Kx, Ky = grid.half_extents()
        A = A[Py - Ky:Py + Ky + 1, Px - Kx:Px + Kx + 1]
        jdx, kdx = np.arange(-Kx, Kx + 1), np.arange(-Ky, Ky + 1)
        if method == "direct":
            bx, by = np.meshgrid(jdx * d, kdx * d)
            beta = (bx + 1j * by).ravel()
            a = A.ravel()
            nz = a != 0
            beta, a = beta[nz], a[nz]
            vals = np.empty(len(gamma), dtype=complex)
            for s in range(0, len(gamma), 256):
                g = gamma[s:s + 256, None]
                vals[s:s + 256] = np.exp(g * np.conj(beta) - np.conj(g) * beta) @ a
            vals *= pref
        elif method == "separable":
            e_re = np.exp(2j * d * np.outer(gamma.imag, jdx))
            e_im = np.exp(-2j * d * np.outer(gamma.real, kdx))
            vals = pref * np.einsum("gk,kj,gj->g", e_im, A, e_re, optimize=True)
        else:
            raise ValueError(f"unknown DFT method {method!r}")
    meta = {"pad_factor": pad_factor, "method": method, "kind": kind.name.lower(),
            "bias_subtracted": grid.bias_subtracted}
    return WignerGrid(gamma, vals.real.copy(), vals.imag.copy(), kind, meta)


def parity_from_grid(grid: ChiGrid) -> float:
    """Riemann sum ``(d^2 / 2 pi) sum Re chi`` over a full square grid."""
    if not grid.is_full_square():
        raise CoverageError("parity needs a full lattice rectangle; complete by symmetry first")
    return float(grid.spacing**2 / (2 * np.pi) * np.sum(grid.value.real))


def purity_from_grid(grid: ChiGrid) -> float:
    """``(d^2 / pi) sum |chi|^2``, close to one for pure states on an adequate grid."""
    if not grid.is_full_square():
        raise CoverageError("purity needs a full square grid")
    return float(grid.spacing**2 / np.pi * np.sum(np.abs(grid.value) ** 2))


# -- simulated acquisition ----------------------------------------------------


MEASUREMENT_PLANS = {
    GridKind.FULL_SQUARE: ((0.0, np.pi / 2), None),
    GridKind.HALF_PLANE: ((0.0, np.pi / 2), "hermitian"),
    GridKind.POSITIVE_QUADRANT: ((0.0,), "quadrant_mirror"),
    GridKind.AXIS_SCAN_RE: ((0.0, np.pi / 2), None),
    GridKind.AXIS_SCAN_IM: ((0.0, np.pi / 2), None),
}


def default_quadratures(spec: GridSpec) -> tuple[float, ...]:
    return MEASUREMENT_PLANS[spec.kind][0]


def default_mirror(spec: GridSpec) -> str | None:
    return MEASUREMENT_PLANS[spec.kind][1]


def noiseless_grid(state: OscillatorState, spec: GridSpec, bias: float = 0.0, thetas=None) -> ChiGrid:
    """Exact (biased) expectations on the grid, zero standard errors."""
    thetas = default_quadratures(spec) if thetas is None else tuple(thetas)
    beta = build_grid(spec)
    cols = {float(t): biased_expectation(state, beta, t, bias) for t in thetas}
    records = []
    for i, b in enumerate(beta):
        for t in thetas:
            records.append(ReadoutRecord(complex(b), float(t), 1, 0, float(cols[float(t)][i]), 0.0))
    return grid_from_records(records, spec.spacing)


def simulate_records(state: OscillatorState, spec: GridSpec, shots: int, bias: float = 0.0,
                     seed: int = 0, thetas=None) -> list[ReadoutRecord]:
    thetas = default_quadratures(spec) if thetas is None else tuple(thetas)
    return sample_records(state, build_grid(spec), np.array(thetas), shots, bias, seed)


def dft_error_oracle(state: OscillatorState, measure_spec: GridSpec, out_spec: GridSpec, shots: int,
                     seed: int = 0, pad_factor: float = 4.0, thetas=None, mirror: str | None = "auto") -> float:
    """Mean |W_dft - W_analytic| over the output points, in percent of 4/pi.

    The ideal chi of ``state`` is sampled with binomial projection noise on
    the measurement grid, completed by symmetry, transformed, and compared
    with the analytic Wigner function.
    """
    records = simulate_records(state, measure_spec, shots, 0.0, seed, thetas)
    grid = grid_from_records(records, measure_spec.spacing)
    mirror = default_mirror(measure_spec) if mirror == "auto" else mirror
    if mirror:
        grid = complete_by_symmetry(grid, mirror)
    rec = dft_wigner(grid, pad_factor, out_spec)
    truth = wigner_fn(state, rec.gamma)
    return float(np.mean(np.abs(rec.value - truth)) / (4 / np.pi) * 100)
