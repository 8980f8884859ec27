import pytest

from diracwalk.lattice import build_armchair_nanotube, build_sheet, build_torus


@pytest.fixture(scope="session")
def torus12():
    return build_torus(12, 12)


@pytest.fixture(scope="session")
def torus6():
    return build_torus(6, 6)


@pytest.fixture(scope="session")
def bearded():
    return build_sheet(10, 10, "bearded")


@pytest.fixture(scope="session")
def zigzag():
    return build_sheet(10, 10, "zigzag")


@pytest.fixture(scope="session")
def tube():
    return build_armchair_nanotube(20, 8)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, title, ok, detail, elapsed, limit)``."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, {})

    def report(n, title, ok, detail, elapsed, limit):
        ok = bool(ok) and elapsed < limit
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title} | {detail} | {elapsed:.2f}s (limit {limit}s)"
        lines[n] = line
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for n in sorted(lines):
            terminalreporter.write_line(lines[n])
