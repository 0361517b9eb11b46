"""Shared fixtures: every eigenvalue solved during the run is checked against the constant-function bound."""

import pytest

from robin_eigen import secular

BOUND_SLACK = 1e-12


class BoundLedger:
    def __init__(self):
        self.checked = 0
        self.violations = []

    def __call__(self, p, result):
        bound = secular.variational_bound(p)
        self.checked += 1
        if result.lambda1 > bound + BOUND_SLACK * max(1.0, abs(bound)):
            self.violations.append((p, result.lambda1, bound))


LEDGER = BoundLedger()

# criterion number -> (passed, detail), filled by the acceptance suite
ACCEPTANCE = {}
N_CRITERIA = 8


def pytest_configure(config):
    secular.add_observer(LEDGER)
    config.addinivalue_line("markers", "run_last: run after every other test in the session")


def pytest_collection_modifyitems(session, config, items):
    items.sort(key=lambda item: item.get_closest_marker("run_last") is not None)


def pytest_unconfigure(config):
    if LEDGER in secular._observers:
        secular.remove_observer(LEDGER)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for n in range(1, N_CRITERIA + 1):
            passed, detail = ACCEPTANCE.get(n, (False, "not run"))
            terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {n}: {detail}")
    terminalreporter.write_line(
        f"bound ledger: {LEDGER.checked} eigenvalues checked, {len(LEDGER.violations)} violations"
    )


def pytest_sessionfinish(session, exitstatus):
    if LEDGER.violations:
        session.exitstatus = 1


@pytest.fixture
def bound_ledger():
    return LEDGER


@pytest.fixture
def acceptance_report():
    """Record (and print) the outcome of one acceptance criterion."""

    def report(n, passed, detail):
        ACCEPTANCE[n] = (bool(passed), detail)
        print(f"{'PASS' if passed else 'FAIL'} criterion {n}: {detail}")
        return passed

    return report
