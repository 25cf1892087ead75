import numpy as np
import pytest
from hypothesis import given, strategies as st

from chartomo.states import (FockTruncationError, SqueezeParam, StateError, canonicalize, coherent_overlap,
                             displaced_squeezed_fock, fidelity, fidelity_overlap_oracle, fock_expand, make_state,
                             normalization, overlap, squeeze_map, unsqueeze_map)

finite = st.floats(-3, 3)


def test_vacuum_is_single_component():
    s = make_state("vacuum")
    assert len(s) == 1 and s.r == 0 and abs(s.centers[0]) == 0 and np.isclose(s.norm, 1)


def test_unknown_family_rejected():
    with pytest.raises(StateError):
        make_state("squeezed_kitten")


def test_negative_r_rejected():
    with pytest.raises(StateError):
        make_state("displaced_squeezed", r=-0.1)


def test_cat_needs_alpha():
    with pytest.raises(StateError):
        make_state("cat", r=0.5)


def test_theta_wrapped():
    assert SqueezeParam(0.3, 3 * np.pi / 2).theta == pytest.approx(-np.pi / 2)


@given(finite, finite, st.floats(0, 2), st.floats(-np.pi, np.pi))
def test_squeeze_maps_are_inverse(x, y, r, th):
    z = complex(x, y)
    assert unsqueeze_map(squeeze_map(z, r, th), r, th) == pytest.approx(z, abs=1e-9)


def test_coherent_overlap_magnitude():
    assert abs(coherent_overlap(1.0, 0.0)) ** 2 == pytest.approx(np.exp(-1))


def test_equal_centres_merge():
    s = canonicalize([1, 1], [0.5, 0.5])
    assert len(s) == 1


def test_cancelling_superposition_is_error():
    with pytest.raises(StateError):
        canonicalize([1, -1], [0.5, 0.5])


def test_normalization_of_cat_formula():
    a = 2.0
    s = make_state("cat", alpha=a)
    # unnormalised |a/2> + |-a/2>: N = 2 + 2 exp(-a^2/2)
    assert normalization(s) == pytest.approx(2 + 2 * np.exp(-a**2 / 2))


def test_fock_matches_matrix_model(oracle):
    st_ = make_state("gkp", r=0.5, theta=0.7, re_l=1.2, im_l=0.4, re_delta=0.3, im_delta=-0.2)
    psi = oracle.ket([(1, -(1.2 + 0.4j)), (2, 0), (1, 1.2 + 0.4j)], 0.5, 0.7, 0.3 - 0.2j)
    f = fock_expand(st_, 80).amplitudes
    assert np.abs(f - psi[:81]).max() < 1e-12


def test_fock_at_zero_squeezing_is_poisson():
    amps = displaced_squeezed_fock(1.5, 0.0, 0.0, 30)
    from math import factorial
    p = np.abs(amps) ** 2
    assert p[3] == pytest.approx(np.exp(-2.25) * 2.25**3 / factorial(3), rel=1e-12)


def test_fock_tail_within_tolerance_for_reference_states():
    for fam, kw in [("displaced_squeezed", dict(r=0.93)), ("displaced_squeezed", dict(r=0.93, re_delta=0.78)),
                    ("cat", dict(r=0.58, alpha=2.42)), ("gkp", dict(r=0.93, l=2.5))]:
        assert fock_expand(make_state(fam, **kw), 500).weight >= 1 - 1e-8


def test_extreme_parameters_stay_finite():
    amps = displaced_squeezed_fock(40.0, 3.0, 0.0, 500)
    assert np.all(np.isfinite(amps))


def test_truncated_expansion_is_an_error():
    with pytest.raises(FockTruncationError):
        fock_expand(make_state("displaced_squeezed", delta=10.0), 50)
    assert fock_expand(make_state("displaced_squeezed", delta=10.0), 50, strict=False).weight < 1e-6


def test_large_displacement_recovers_poisson():
    p = fock_expand(make_state("displaced_squeezed", delta=12.0), 400).populations
    assert np.sum(np.arange(401) * p) == pytest.approx(144.0, rel=1e-9)


def test_vacuum_odd_amplitudes_zero_for_squeezed():
    a = fock_expand(make_state("displaced_squeezed", r=0.93), 60).amplitudes
    assert np.all(a[1::2] == 0)
    assert abs(a[0]) ** 2 == pytest.approx(1 / np.cosh(0.93))


def test_fidelity_oracles_agree():
    a = make_state("cat", r=0.58, alpha=2.42)
    b = make_state("cat", r=0.543, theta=0.11, re_alpha=2.398, im_alpha=-0.009, re_delta=0.02, im_delta=-0.031)
    assert fidelity(a, b) == pytest.approx(fidelity_overlap_oracle(a, b), abs=1e-10)


def test_overlap_matches_matrix_model(oracle):
    a = make_state("displaced_squeezed", r=0.4, theta=0.3, delta=0.5 + 0.2j)
    b = make_state("cat", r=0.2, theta=-1.0, alpha=1.5j)
    pa = oracle.ket([(1, 0)], 0.4, 0.3, 0.5 + 0.2j)
    pb = oracle.ket([(1, -0.75j), (1, 0.75j)], 0.2, -1.0)
    assert overlap(a, b) == pytest.approx(np.vdot(pa, pb), abs=1e-10)


def test_global_phase_irrelevant_to_fidelity():
    a = make_state("gkp", r=0.5, l=2.0)
    assert fidelity_overlap_oracle(a, a.with_phase(1.3)) == pytest.approx(1.0)


def test_displaced_matches_delta_parameter():
    a = make_state("cat", alpha=2.0, r=0.3).displaced(0.4 - 0.1j)
    b = make_state("cat", alpha=2.0, r=0.3, delta=0.4 - 0.1j)
    assert fidelity_overlap_oracle(a, b) == pytest.approx(1.0, abs=1e-12)
