"""Collects the acceptance verdicts and prints one line per criterion after the run."""
import re

import pytest

_VERDICTS = {}


@pytest.fixture
def verdict():
    """``verdict(label, status, detail)`` records one acceptance outcome.

    ``label`` is the criterion number, optionally with a part letter such as
    ``"8c"``. ``status`` is ``"PASS"``, ``"FAIL"``, ``"BLOCKED"`` or ``"INFO"``.
    """
    def record(label, status, detail):
        _VERDICTS[label] = (status, detail)
    return record


def _key(label):
    m = re.match(r"(\d+)(.*)", label)
    return int(m.group(1)), m.group(2)


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    groups = {}
    for label in sorted(_VERDICTS, key=_key):
        groups.setdefault(_key(label)[0], []).append(label)
    terminalreporter.section("acceptance criteria")
    for number, labels in groups.items():
        graded = [_VERDICTS[l][0] for l in labels if _VERDICTS[l][0] != "INFO"]
        if "FAIL" in graded:
            status = "FAIL"
        elif "BLOCKED" in graded:
            status = "PASS/BLOCKED" if "PASS" in graded else "BLOCKED"
        else:
            status = "PASS" if graded else "INFO"
        parts = [f"{_key(l)[1] + ': ' if _key(l)[1] else ''}{_VERDICTS[l][0]} {_VERDICTS[l][1]}"
                 if len(labels) > 1 else _VERDICTS[l][1] for l in labels]
        terminalreporter.write_line(f"criterion {number:2d}: {status:<12} " + "; ".join(parts))
