import pytest

from dirpoly.arith import sieve_primes

# One line per acceptance criterion, echoed in the terminal summary so the
# verdicts stay visible even when pytest captures per-test stdout.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def table_100():
    return sieve_primes(100)


@pytest.fixture(scope="session")
def table_10k():
    return sieve_primes(10_000)


@pytest.fixture(scope="session")
def table_1m():
    return sieve_primes(1_000_000)
