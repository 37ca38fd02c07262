import pytest

CRITERIA = {
    1: "roundtrip over all four schemes",
    2: "dlog attack and separating monomials agree on b",
    3: "two-variable reduction never misses a separating invariant",
    4: "kernel lattice equals brute-force invariant set",
    5: "linear-algebra attack calibration and degree guard",
    6: "atom attack breaks Z keys, refuses Z[sqrt(-5)]",
    7: "simultaneous diagonalization is exact",
    8: "conjugation and direct-product degree properties",
    9: "measured expansion ratio equals the formula",
    10: "coset lift is invariant under the whole group",
}

_outcomes = {}
_details = {}


def _criterion(item):
    mark = item.get_closest_marker("acceptance")
    return mark.args[0] if mark else None


@pytest.fixture
def detail(request):
    """Attach a one-line measurement to the criterion of the running test."""
    n = _criterion(request.node)

    def record(text):
        _details.setdefault(n, []).append(text)

    return record


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    n = _criterion(item)
    if n is None:
        return
    if rep.when == "call" or rep.failed:
        ok = rep.passed if rep.when == "call" else False
        _outcomes[n] = _outcomes.get(n, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        if n not in _outcomes:
            status = "NOT RUN"
        else:
            status = "PASS" if _outcomes[n] else "FAIL"
        extra = "; ".join(_details.get(n, []))
        tr.write_line(f"AC{n:<2} {status:<7} {title}" + (f"  [{extra}]" if extra else ""))
