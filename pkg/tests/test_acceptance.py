"""The twelve acceptance criteria, each at its stated tolerance.

The suite runs once per module; every criterion is its own test, and the
[PASS]/[FAIL] lines are echoed to the terminal after the module finishes.
"""

import pytest

from ceslab.suite import CRITERIA, SuiteConfig, run_suite


@pytest.fixture(scope="module")
def results(request):
    res = {r.number: r for r in run_suite(SuiteConfig(seed=0))}
    yield res
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    if tr is None:
        return
    tr.write_line("")
    tr.write_line("acceptance criteria:")
    for k in sorted(res):
        r = res[k]
        tr.write_line(f"  {r.line()}  ({r.runtime:.1f}s)")
        for note in r.notes:
            tr.write_line(f"        note: {note}")


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(results, number):
    r = results[number]
    assert r.passed, f"{r.line()}: {r.metrics}"
