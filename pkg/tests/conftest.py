import numpy as np
import pytest

import raodist as rd

# one instance per registered family, with the hyperparameters used across the suite
FAMILY_INSTANCES = [
    ("binomial", {"n": 1}),
    ("binomial", {"n": 6}),
    ("poisson", {}),
    ("geometric", {}),
    ("negative_binomial", {"r": 3}),
    ("categorical", {"categories": 3}),
    ("categorical", {"categories": 5}),
    ("multinomial", {"categories": 4, "trials": 3}),
    ("negative_multinomial", {"categories": 3, "x_n": 2}),
    ("exponential", {}),
    ("rayleigh", {}),
    ("erlang", {"k": 4}),
    ("log_gaussian", {}),
    ("inverse_gaussian", {}),
    ("gumbel", {}),
    ("frechet", {}),
    ("weibull", {}),
    ("reversed_weibull", {}),
    ("pareto", {}),
    ("power_function", {}),
    ("gaussian", {}),
    ("laplace", {}),
    ("logistic", {}),
    ("cauchy", {}),
    ("generalised_gaussian", {"beta": 0.75}),
    ("generalised_gaussian", {"beta": 3.0}),
    ("student_t", {"nu": 3.0}),
    ("wishart", {"m": 2, "n": 3}),
    ("inverse_wishart", {"m": 3, "n": 5}),
]


def instance_id(item):
    name, hyper = item
    return name + "".join(f"-{k}{v}" for k, v in hyper.items())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=FAMILY_INSTANCES, ids=instance_id)
def family(request):
    name, hyper = request.param
    return rd.get_family(name, **hyper)


# -- acceptance summary -------------------------------------------------------

_criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "ran": False, "failed": []})
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry["ran"] = True
        if report.outcome != "passed":
            entry["ok"] = False
            entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        status = "PASS" if e["ok"] and e["ran"] else "FAIL"
        line = f"criterion {number}: {status}  {e['title']}"
        if e["failed"]:
            line += "  (failed: " + ", ".join(e["failed"]) + ")"
        terminalreporter.write_line(line)
