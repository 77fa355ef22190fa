import numpy as np
import pytest

from ase_lab.models import (ElevatedPowerLaw, ExpDecay, InversePoly, LosNlosComposite,
                            MinPowerLaw, MultiSlope, ShiftedPowerLaw, StretchedExp)

# outcome lines of the acceptance suite, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def table1_models():
    return {
        "L1": MinPowerLaw(1.0, 1.0, 4.0),
        "L2": ShiftedPowerLaw(1.0, 1.0, 4.0),
        "L3": InversePoly(1.0, 1.0, 4.0),
        "L4": ElevatedPowerLaw(1.0, 1.0, 4.0),
        "L5": StretchedExp(1.0, 1.0, 1.0),
    }


def urban_composite():
    """LoS/NLoS law with a shared elevation; the NLoS gain never exceeds the LoS gain."""
    los = MultiSlope.continuous(1.0, (2.09, 3.75), (20.0,), elevation=1.0)
    nlos = MultiSlope.continuous(0.1, (3.0, 4.0), (30.0,), elevation=1.0)
    return LosNlosComposite(los, nlos, ExpDecay(18.0))


def three_slope():
    return MultiSlope.continuous(1.0, (0.0, 3.0, 4.0), (1.0, 10.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def record_acceptance():
    def record(number: int, title: str, passed: bool, detail: str):
        ACCEPTANCE_LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} | {detail}")
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
