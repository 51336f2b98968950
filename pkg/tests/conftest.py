# nodeid -> criterion name, and criterion name -> outcome
_criteria: dict = {}
_results: dict = {}


def pytest_collection_finish(session):
    for item in session.items:
        m = item.get_closest_marker("criterion")
        if m:
            _criteria[item.nodeid] = m.args[0]


def pytest_runtest_logreport(report):
    name = _criteria.get(report.nodeid)
    if name is None:
        return
    # a failing setup or teardown counts against the criterion too
    if report.when == "call" or report.failed:
        if _results.get(name) != "failed":
            _results[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in _criteria.values():
        outcome = _results.get(name, "not run")
        verdict = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{verdict:5s} {name}")
