from collections import OrderedDict

import pytest

_CRITERIA: "OrderedDict[int, dict]" = OrderedDict()


class CriterionRecorder:
    def __init__(self, number: int, title: str):
        self.entry = _CRITERIA.setdefault(number, {"title": title, "parts": []})

    def check(self, label: str, ok: bool, detail: str = "") -> None:
        """Record the outcome, then assert it so pytest reports the same verdict."""
        self.entry["parts"].append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"


@pytest.fixture
def criterion():
    return CriterionRecorder


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        ok = all(p[1] for p in entry["parts"])
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {entry['title']}")
        for label, part_ok, detail in entry["parts"]:
            tr.write_line(f"        {'ok ' if part_ok else 'BAD'} {label}: {detail}")
