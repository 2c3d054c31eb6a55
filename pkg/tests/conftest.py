import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

# criterion number -> (description, list of outcomes)
_ACCEPTANCE: dict[int, list] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(number, description): test belongs to an acceptance criterion"
    )


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    marker = _MARKERS.get(report.nodeid)
    if marker is None:
        return
    number, desc = marker
    _ACCEPTANCE.setdefault(number, [desc, []])[1].append((report.nodeid, report.outcome))


_MARKERS: dict[str, tuple[int, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("acceptance")
        if m is not None:
            _MARKERS[item.nodeid] = (m.args[0], m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        desc, outcomes = _ACCEPTANCE[number]
        failed = [nid.split("::")[-1] for nid, out in outcomes if out != "passed"]
        status = "PASS" if not failed else "FAIL"
        line = f"criterion {number}: {status}  {desc}"
        if failed:
            line += f"  (failing: {', '.join(failed)})"
        tr.write_line(line)
