import pytest

RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[RESULTS] = {}


@pytest.fixture
def criterion(request):
    """Record the outcome of one acceptance criterion for the end-of-run summary."""
    table = request.config.stash[RESULTS]

    def record(number: int, title: str, checks: dict[str, bool], detail: str = "") -> bool:
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        table[number] = (title, ok, detail if ok else f"{detail} failed: {', '.join(failed)}")
        return ok

    return record


def pytest_runtest_makereport(item, call):
    # a criterion that raised before recording still gets a FAIL line
    if call.when == "call" and call.excinfo is not None:
        num = getattr(item.function, "criterion_number", None)
        table = item.config.stash[RESULTS]
        if num is not None and num not in table:
            table[num] = (item.function.criterion_title, False, f"raised {call.excinfo.typename}")


def pytest_terminal_summary(terminalreporter, config):
    table = config.stash.get(RESULTS, {})
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(table):
        title, ok, detail = table[num]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {num}. {title}  ({detail})")
