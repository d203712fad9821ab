import pytest

from potatopack.packing import GasketConfig, generate_gasket

_ACCEPTANCE: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def gasket10():
    return generate_gasket(GasketConfig(max_depth=10))


@pytest.fixture(scope="session")
def gasket6(gasket10):
    return gasket10.up_to_generation(6)
