import math

import numpy as np
import pytest

from qwalk import CoinSpec, evolve, make_initial

R2 = math.sqrt(2.0)
R3 = math.sqrt(3.0)
SPINOR_2 = (1 / R2, 1j / R2)
SPINOR_3 = (1 / R3, 1j / R3, 1j / R3)


def random_spinor(rng, dim):
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)


@pytest.fixture(scope="session")
def hadamard():
    return CoinSpec.family_a(math.pi / 4)


@pytest.fixture(scope="session")
def grover():
    return CoinSpec.grover()


@pytest.fixture(scope="session")
def hadamard_t1000(hadamard):
    """Family A, theta = pi/4, (1/sqrt2, i/sqrt2) at the origin, t = 1000."""
    return evolve(make_initial(2, 0, SPINOR_2), hadamard, 1000)


@pytest.fixture(scope="session")
def grover_t1000(grover):
    """Grover walk, (1, i, i)/sqrt3 at the origin, t = 1000."""
    return evolve(make_initial(3, 0, SPINOR_3), grover, 1000)


ACCEPTANCE = {}


def record(number, title, ok, detail=""):
    """Store and print one acceptance verdict."""
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
    if detail:
        line += f"  ({detail})"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
