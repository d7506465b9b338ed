import numpy as np
import pytest

from diskcouple.farfield import polarizability_from_hole
from diskcouple.modes import Polarization, resonant_mode

LAM = 637e-9
N = 2.41
UNIT = LAM / N  # lambda'

_ACCEPTANCE = []


def record(number, title, ok, detail=""):
    """Register one acceptance line; printed in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}" + (f" -- {detail}" if detail else "")
    _ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def mode13():
    return resonant_mode(13, LAM, 0.57 * UNIT)


@pytest.fixture(scope="session")
def mode13_tm():
    return resonant_mode(13, LAM, 0.57 * UNIT, polarization=Polarization.TM_Z)


@pytest.fixture(scope="session")
def hole_A(mode13):
    # fully etched 30 nm holes, the far-field test model
    return polarizability_from_hole(30e-9, mode13.geometry.h, N)
