from __future__ import annotations

import pytest

from migrascope import resources
from migrascope.assessor import assess
from migrascope.chainsim.run import load_config, run_case_study
from migrascope.features import load_feature_profile
from migrascope.mapper import build_dependency_sets, load_bindings
from migrascope.profiler import load_registry


@pytest.fixture(scope="session")
def registry():
    return load_registry()


@pytest.fixture(scope="session")
def ethereum(registry):
    return registry.lookup("ethereum")


@pytest.fixture(scope="session")
def solana(registry):
    return registry.lookup("solana")


@pytest.fixture(scope="session")
def golden():
    return load_feature_profile(resources.GOLDEN_PROFILE)


@pytest.fixture(scope="session")
def eth_bindings():
    return load_bindings(resources.ETHEREUM_BINDINGS)


@pytest.fixture(scope="session")
def eth_sets(golden, eth_bindings, ethereum):
    return build_dependency_sets(golden, eth_bindings, ethereum)


@pytest.fixture(scope="session")
def case_report(golden, eth_sets, ethereum, solana):
    return assess(golden, eth_sets, ethereum, solana)


@pytest.fixture(scope="session")
def case_run():
    return run_case_study(load_config())


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
