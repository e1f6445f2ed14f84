import numpy as np
import pytest

from mvdromp import AngleGrid, build_ula_dictionary


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_dictionary(rng, m, n):
    from mvdromp import Dictionary

    a = crandn(rng, m, n)
    return Dictionary(atoms=a / np.linalg.norm(a, axis=0))


@pytest.fixture(scope="session")
def paper_dict():
    return build_ula_dictionary(12, 0.5, AngleGrid(0.0, 30.0, 0.2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion check")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    number, title = mark.args
    failed = _criteria.get(number, (title, []))[1]
    if rep.failed or (rep.when == "call" and rep.skipped):
        failed = failed + [item.name]
    _criteria[number] = (title, failed)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, failed = _criteria[number]
        status = "PASS" if not failed else "FAIL"
        detail = "" if not failed else f"  ({', '.join(failed)})"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}{detail}")
