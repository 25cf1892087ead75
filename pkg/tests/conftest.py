import sys

import numpy as np
import pytest
from hypothesis import settings
from scipy.linalg import expm

from chartomo.states import make_state

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

N_ORACLE = 160


class MatrixOracle:
    """Truncated-Fock matrix model built with expm: independent of the package's closed forms."""

    def __init__(self, n=N_ORACLE):
        self.n = n
        self.a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
        self.ad = self.a.conj().T
        self.vac = np.zeros(n, dtype=complex)
        self.vac[0] = 1

    def D(self, alpha):
        return expm(alpha * self.ad - np.conj(alpha) * self.a)

    def S(self, r, theta):
        xi = r * np.exp(1j * theta)
        return expm(0.5 * (np.conj(xi) * self.a @ self.a - xi * self.ad @ self.ad))

    def ket(self, terms, r=0.0, theta=0.0, delta=0.0):
        op = sum(c * self.D(mu) for c, mu in terms)
        psi = self.D(delta) @ op @ self.S(r, theta) @ self.vac
        return psi / np.linalg.norm(psi)

    def parity(self):
        return np.diag((-1.0) ** np.arange(self.n))


@pytest.fixture(scope="session")
def oracle():
    return MatrixOracle()


def random_state(rng, max_components=5, r_max=1.5, center_max=3.0):
    k = int(rng.integers(1, max_components + 1))
    comps = []
    for _ in range(k):
        c = complex(rng.normal(), rng.normal())
        mu = center_max * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        comps.append(([c.real, c.imag], [mu.real, mu.imag]))
    return make_state("custom", components=comps, r=float(rng.uniform(0, r_max)),
                      theta=float(rng.uniform(-np.pi, np.pi)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
