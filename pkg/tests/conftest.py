import pytest

from memwindow import Activation, MemristorModel, PulseTrain, WindowSpec

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def sym_drive():
    """Symmetric pulses, gamma*I*tau = 0.01, tau = 0.2 T, T = 1 (gamma = 1)."""
    return PulseTrain(0.05, 0.2, -0.05, 0.2, 1.0)


@pytest.fixture
def biolek1():
    return MemristorModel(WindowSpec.biolek(1), Activation("linear", 1.0))


@pytest.fixture
def joglekar1():
    return MemristorModel(WindowSpec.joglekar(1), Activation("linear", 1.0))
