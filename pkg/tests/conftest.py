import cmath
import math

import mpmath
import numpy as np
import pytest

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def series_coherent(alpha, cutoff, adds=0, dps=40):
    """Fock coefficients of (a^dag)^adds |alpha> evaluated term by term in mpmath."""
    with mpmath.workdps(dps):
        a = mpmath.mpc(alpha)
        pref = mpmath.exp(-abs(a) ** 2 / 2)
        out = []
        for n in range(cutoff + 1):
            k = n - adds
            if k < 0:
                out.append(0j)
                continue
            c = pref * a**k / mpmath.sqrt(mpmath.factorial(k))
            if adds:
                c *= mpmath.sqrt(n)
            out.append(complex(c))
    return np.array(out)


def product_vector(factors, cutoff):
    """Dense tensor of a product of (alpha, adds) single-mode factors."""
    out = np.array(1.0 + 0j)
    for alpha, adds in factors:
        out = np.multiply.outer(out, series_coherent(alpha, cutoff, adds))
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_amplitude(rng, rmax):
    return rmax * math.sqrt(rng.uniform()) * cmath.exp(2j * math.pi * rng.uniform())
