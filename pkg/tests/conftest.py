import numpy as np
import pytest

from newton_cradle.core import make_cradle, random_hermitian, random_unit_vector


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_cradle(n, rng, scale=1.0):
    return make_cradle(random_hermitian(n, rng, scale), random_unit_vector(n, rng))


ACCEPTANCE = []


def report(number, ok, detail):
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
