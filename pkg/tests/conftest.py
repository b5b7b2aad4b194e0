import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from affine_wehrl.grids import PhaseGridSpec, build_phase_grid
from affine_wehrl.optimizer import default_kgrid

settings.register_profile(
    "numeric",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("numeric")


@pytest.fixture(scope="session")
def kgrid():
    return default_kgrid()


@pytest.fixture(scope="session")
def phase():
    return build_phase_grid(PhaseGridSpec())


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


# one pass/fail line per acceptance criterion, printed after the run
_criteria: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    details = [str(v) for k, v in item.user_properties if k == "detail"]
    _, prev_ok, prev_details = _criteria.get(number, (title, True, []))
    _criteria[number] = (title, prev_ok and rep.passed, prev_details + details)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok, detail = _criteria[number]
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}"
        terminalreporter.write_line(line + (f" ({'; '.join(detail)})" if detail else ""))
