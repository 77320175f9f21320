import pytest

from acceptance_log import RESULTS


def pytest_addoption(parser):
    parser.addoption("--long", action="store_true", default=False,
                     help="run the full-length kink experiment (T = 100, about 20 minutes)")


def pytest_configure(config):
    config.addinivalue_line("markers", "long: full-length kink run, enabled by --long")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--long"):
        return
    skip = pytest.mark.skip(reason="needs --long")
    for item in items:
        if "long" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
