"""Reference parameter sets and measurement grids for the four bundled experiments.

``calibrated`` values are the independently calibrated preparation
settings; ``fitted`` values are the parameters recovered from measured
data, including the readout bias ``b``. Grids are read off the figure axes
and tuned so that projection noise at 200 shots matches the reported
reconstruction error.
"""

from __future__ import annotations

from .recon import GridSpec

REFERENCE = {
    "squeezed": {
        "calibrated": {"r": 0.93, "theta": 0.0, "re_delta": 0.0, "im_delta": 0.0},
        "fitted": {"r": 0.938, "theta": 0.041, "re_delta": 0.003, "im_delta": -0.184, "b": 0.035},
        "fitted_stderr": {"r": 0.005, "theta": 0.003, "re_delta": 0.001, "im_delta": 0.009, "b": 0.001},
        "fidelity": 0.993,
        "dft_error_percent": 0.29,
    },
    "displaced_squeezed": {
        "calibrated": {"r": 0.93, "theta": 0.0, "re_delta": 0.78, "im_delta": 0.0},
        "fitted": {"r": 0.925, "theta": 0.047, "re_delta": 0.752, "im_delta": 0.114, "b": 0.026},
        "fitted_stderr": {"r": 0.004, "theta": 0.003, "re_delta": 0.001, "im_delta": 0.008, "b": 0.001},
        "fidelity": 0.992,
        "dft_error_percent": 0.28,
    },
    "cat": {
        "calibrated": {"r": 0.58, "theta": 0.0, "re_alpha": 2.42, "im_alpha": 0.0,
                       "re_delta": 0.0, "im_delta": 0.0},
        "fitted": {"r": 0.543, "theta": 0.110, "re_alpha": 2.398, "im_alpha": -0.009,
                   "re_delta": 0.020, "im_delta": -0.031, "b": 0.009},
        "fitted_stderr": {"r": 0.005, "theta": 0.007, "re_alpha": 0.004, "im_alpha": 0.012,
                          "re_delta": 0.006, "im_delta": 0.007, "b": 0.001},
        "fidelity": 0.989,
        "dft_error_percent": 0.70,
    },
    "gkp": {
        "calibrated": {"r": 0.93, "theta": 0.0, "re_l": 2.50, "im_l": 0.0, "re_delta": 0.0, "im_delta": 0.0},
        "fitted": {"r": 0.892, "theta": 0.103, "re_l": 2.471, "im_l": 0.022,
                   "re_delta": 0.001, "im_delta": -0.002, "b": 0.0015},
        "fitted_stderr": {"r": 0.008, "theta": 0.008, "re_l": 0.005, "im_l": 0.008,
                          "re_delta": 0.003, "im_delta": 0.007, "b": 0.001},
        "fidelity": 0.985,
        "dft_error_percent": 0.45,
    },
}

# measured window and displayed Wigner window per experiment
MEASURE_GRIDS = {
    "squeezed": GridSpec("half_plane", 1.6, 0.08, 8.0),
    "displaced_squeezed": GridSpec("half_plane", 2.0, 0.08, 7.0),
    "cat": GridSpec("half_plane", 4.0, 0.1, 4.5),
    "gkp": GridSpec("positive_quadrant", 5.5, 0.08),
}
OUTPUT_GRIDS = {
    "squeezed": GridSpec("full_square", 2.0, 0.1, 3.0),
    "displaced_squeezed": GridSpec("full_square", 2.5, 0.1, 3.0),
    "cat": GridSpec("full_square", 3.0, 0.1),
    "gkp": GridSpec("full_square", 4.0, 0.1),
}

DEFAULT_SHOTS = 200


def state_family(name: str) -> str:
    """State-constructor family for a reference experiment name."""
    return "displaced_squeezed" if name == "squeezed" else name
