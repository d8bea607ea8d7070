import numpy as np
import pytest
from hypothesis import strategies as st

from housemarket import Instance, generate_instance

NATURAL5 = (1, 2, 3, 4, 5)


def five_agent_instance():
    prefs = (
        (3, 4, 5, 2, 1),
        (3, 4, 5, 2, 1),
        (4, 5, 3, 2, 1),
        (3, 4, 5, 2, 1),
        (1, 2, 3, 4, 5),
    )
    return Instance(prefs, NATURAL5, NATURAL5)


def three_agent_unreachable():
    # a swap-reachability counterexample; endowment r3, r2, r1
    prefs = ((1, 2, 3), (1, 2, 3), (2, 3, 1))
    return Instance(prefs, (3, 2, 1))


def three_agent_manipulable():
    prefs = ((2, 3, 1), (2, 3, 1), (1, 2, 3))
    return Instance(prefs, (3, 1, 2), (1, 2, 3))


def random_instance(n, rng, culture="ic-sp", shuffle_endowment=True):
    mode = "random" if shuffle_endowment else "identity"
    return generate_instance(n, culture, rng, mode)


def random_unrestricted(n, rng):
    prefs = tuple(tuple(int(r) for r in rng.permutation(n) + 1) for _ in range(n))
    endow = tuple(int(r) for r in rng.permutation(n) + 1)
    return Instance(prefs, endow)


@pytest.fixture
def ex5():
    return five_agent_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@st.composite
def sp_instances(draw, min_n=2, max_n=7):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    culture = draw(st.sampled_from(["ic-sp", "up-sp"]))
    return random_instance(n, np.random.default_rng(seed), culture)


@st.composite
def any_instances(draw, min_n=2, max_n=6):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_unrestricted(n, np.random.default_rng(seed))


# --- acceptance reporting -------------------------------------------------------

def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")
    config._criteria = {}


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        report.config_criteria[crit[0]] = (crit[1], report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        report.criterion = marker.args
        report.config_criteria = item.config._criteria


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_criteria", {})
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(results):
        title, outcome = results[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2} {verdict}: {title}")
