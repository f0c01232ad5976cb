import pytest

from dehnkit import compiler, normalize, presentation, tm


@pytest.fixture(scope="session")
def Ma():
    return tm.machine_Ma()


@pytest.fixture(scope="session")
def SMa(Ma):
    return compiler.compile_machine(Ma)


@pytest.fixture(scope="session")
def P1(SMa):
    return presentation.build_presentation(SMa, 1)


@pytest.fixture(scope="session")
def P6(SMa):
    return presentation.build_presentation(SMa, 6)


@pytest.fixture(scope="session")
def NMa(Ma):
    return normalize.normalize(Ma)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
