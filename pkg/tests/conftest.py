import pathlib

import pytest

HERE = pathlib.Path(__file__).parent


@pytest.fixture
def sample_schema():
    return (HERE / "fixtures" / "sample.schema").read_text()


@pytest.fixture
def sample_data():
    return (HERE / "fixtures" / "sample.data").read_text()


@pytest.fixture
def sample_tab():
    return (HERE / "golden" / "sample.tab").read_text()


def pytest_terminal_summary(terminalreporter):
    """One pass/fail line per acceptance criterion."""
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, (ok, title, elapsed) in sorted(module.RESULTS.items()):
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {title}")
