import pytest

_RESULTS = {}


@pytest.fixture
def criterion():
    """Record ``(label, ok, detail)`` for the acceptance summary."""

    def record(label, ok, detail=""):
        prev = _RESULTS.get(label)
        ok = bool(ok) and (prev is None or prev[0])
        _RESULTS[label] = (ok, detail if prev is None else f"{prev[1]}; {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_RESULTS, key=lambda s: [int(p) if p.isdigit() else p for p in s.replace(".", " ").split()]):
        ok, detail = _RESULTS[label]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {label}: {detail}")
