"""Collects acceptance outcomes and prints one PASS/FAIL line per criterion."""

import re

_ACCEPTANCE: dict[int, dict] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    entry = _ACCEPTANCE.setdefault(int(m.group(1)), {"name": m.group(2).replace("_", " "),
                                                    "ok": True, "detail": ""})
    if report.when == "call" or report.failed:
        entry["ok"] = entry["ok"] and report.passed
        detail = dict(report.user_properties).get("detail")
        if detail:
            entry["detail"] = detail
        elif report.failed:
            entry["detail"] = str(report.longrepr).strip().splitlines()[-1]


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        e = _ACCEPTANCE[num]
        line = f"criterion {num} ({e['name']}): {'PASS' if e['ok'] else 'FAIL'}"
        if e["detail"]:
            line += f" | {e['detail']}"
        terminalreporter.write_line(line)
