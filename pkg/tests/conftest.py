import math

import numpy as np
import pytest
from hypothesis import settings

from chebforge import Basis

settings.register_profile("ci", max_examples=40, deadline=None)
settings.load_profile("ci")

ACCEPTANCE_LINES = {}


def gauss_chebyshev_coeffs(func, n_max, basis=Basis.STANDARD, nodes=512):
    """Stored coefficients a_0..a_{n_max} of func by Gauss-Chebyshev quadrature.

    ``a_n = (2/M) sum_j f(cos t_j) cos(n t_j)`` with ``t_j = (j + 1/2) pi / M``;
    exact for polynomials of degree < 2M - n and spectrally accurate otherwise.
    """
    t = (np.arange(nodes) + 0.5) * math.pi / nodes
    u = np.cos(t)
    x = u if Basis(basis) is Basis.STANDARD else (u + 1) / 2
    fx = np.asarray(func(x))
    n = np.arange(n_max + 1)[:, None]
    return (2.0 / nodes) * (fx[None, :] * np.cos(n * t[None, :])).sum(axis=1)


@pytest.fixture
def gc_coeffs():
    return gauss_chebyshev_coeffs


def record_acceptance(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
