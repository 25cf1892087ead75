"""Characteristic-function tomography of trapped-ion motional states.

Simulates direct readout of the symmetric characteristic function,
reconstructs Wigner and Husimi functions by discrete Fourier transform,
and fits parametric state models with a readout bias.
"""

__version__ = "0.1.0"

from .measurement import ReadoutRecord, biased_expectation, sample_records  # noqa: E402
from .phasespace import QuasiKind, char_fn, q_fn, quasi_fn, symmetric_moment, wigner_fn  # noqa: E402
from .recon import ChiGrid, GridSpec, WignerGrid, complete_by_symmetry, dft_wigner, grid_from_records  # noqa: E402
from .states import OscillatorState, fidelity, fidelity_overlap_oracle, fock_expand, make_state  # noqa: E402

__all__ = [
    "ChiGrid", "GridSpec", "OscillatorState", "QuasiKind", "ReadoutRecord", "WignerGrid",
    "biased_expectation", "char_fn", "complete_by_symmetry", "dft_wigner", "fidelity",
    "fidelity_overlap_oracle", "fock_expand", "grid_from_records", "make_state", "q_fn", "quasi_fn",
    "sample_records", "symmetric_moment", "wigner_fn",
]
