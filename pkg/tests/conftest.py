import sys

import numpy as np
import pytest

from ncharm import norms


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def small_grid():
    return norms.NormSearchGrid(centers=64, levels=8, disk_radii=16, disk_angles=64)


def cplx(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for msg in sorted(acc.LINES, key=lambda m: int(m.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(msg)
