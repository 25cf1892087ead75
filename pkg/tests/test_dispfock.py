import numpy as np
import pytest
from scipy.stats import poisson

from chartomo.dispfock import (IllConditionedError, PopulationVector, RabiTrace, TailError, beat_period,
                               cost_ratio, design_condition, displaced_populations, extract_populations,
                               leibfried_parity, synthesize_rabi_trace, wigner_point_from_pops)
from chartomo.phasespace import wigner_fn
from chartomo.states import make_state


def vacuum():
    return make_state("vacuum")


def test_coherent_populations_are_poisson():
    gamma = 1.3 - 0.4j
    pops = displaced_populations(vacuum(), -gamma, n_max=60)
    ref = poisson.pmf(np.arange(61), abs(gamma) ** 2)
    assert np.abs(pops.probs - ref).max() < 1e-14
    assert pops.is_complete()


@pytest.mark.parametrize("gamma", [0.0, 0.4 + 0.3j, -1.1j, 2.0])
def test_parity_matches_wigner(gamma):
    st = make_state("cat", r=0.58, alpha=2.42)
    pops = displaced_populations(st, gamma, n_max=200)
    assert wigner_point_from_pops(pops) == pytest.approx(wigner_fn(st, gamma), abs=1e-9)


def test_gkp_needs_many_fock_states():
    st = make_state("gkp", r=0.93, l=2.5)
    pops = displaced_populations(st, 3 + 3j, n_max=300)
    assert pops.probs[40:].sum() > 1e-3


def test_tail_error():
    with pytest.raises(TailError):
        displaced_populations(vacuum(), 5.0, n_max=10)


def test_population_vector_validation():
    with pytest.raises(ValueError):
        PopulationVector(np.array([1.2]))
    with pytest.raises(ValueError):
        PopulationVector(np.array([]))
    assert not PopulationVector(np.array([0.5, 0.3])).is_complete()


def test_rabi_round_trip():
    pops = PopulationVector(poisson.pmf(np.arange(9), 1.0) / poisson.cdf(8, 1.0))
    trace = synthesize_rabi_trace(pops)
    back = extract_populations(trace, 8)
    assert np.abs(back.probs - pops.probs).max() < 1e-8
    assert leibfried_parity(back) == pytest.approx(leibfried_parity(pops), abs=1e-8)


def test_short_traces_are_ill_conditioned():
    pops = PopulationVector(np.full(61, 1 / 61))
    trace = synthesize_rabi_trace(pops, times=np.linspace(0, 0.2, 400))
    with pytest.raises(IllConditionedError):
        extract_populations(trace, 60)
    with pytest.raises(IllConditionedError):
        extract_populations(RabiTrace(np.linspace(0, 1, 5), np.zeros(5)), 10)


def test_conditioning_degrades_with_n_max():
    t = np.linspace(0, 0.5, 600)
    conds = [design_condition(t, 2 * np.pi * 20, n) for n in (5, 10, 15, 20)]
    assert all(a < b for a, b in zip(conds, conds[1:]))
    assert beat_period(2 * np.pi * 20, 40) > beat_period(2 * np.pi * 20, 10)


def test_trace_validation():
    with pytest.raises(ValueError):
        RabiTrace(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        RabiTrace(np.array([0.0, 1.0]), np.array([1.0]))


def test_cost_ratio():
    assert cost_ratio(15, 1, 0.75) == pytest.approx(20)
    with pytest.raises(ValueError):
        cost_ratio(15, 1, 0)
    with pytest.raises(ValueError):
        cost_ratio(-1, 1, 0.5)
