import numpy as np
import pytest
from hypothesis import settings

from vacrad.model import ModelParams

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    prev = _CRITERIA.get(num, (title, True, ""))
    failed = rep.failed
    reason = ""
    if failed and call.excinfo is not None:
        reason = str(call.excinfo.value).splitlines()[0][:120] if str(call.excinfo.value) else call.excinfo.typename
    _CRITERIA[num] = (title, prev[1] and not failed, prev[2] or reason)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok, reason = _CRITERIA[num]
        line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if not ok and reason:
            line += f"  [{reason}]"
        tr.write_line(line)


@pytest.fixture
def resonant():
    """Factory for resonant-drive parameters given as ratios."""

    def make(eta=0.8, gamma=3e-2, eps=5.0 / 3.0 * 1e-2, th=0.0, n=8):
        return ModelParams.from_ratios(
            gamma_over_omega_a=gamma,
            eta_over_eta_c=eta,
            epsilon_over_gamma=eps,
            omega_d="resonant",
            omega_th_over_omega_a=th,
            n_harmonics=n,
        )

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20260415)
