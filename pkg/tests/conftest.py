import numpy as np
import pytest

from coamoeba.arrangement import calibrate_by_area, relative_index_map
from coamoeba.harness import random_dual_arrangement
from coamoeba.lattice import newton_polygon
from coamoeba.poly import SupportedPolynomial
from coamoeba.shell import calibrate_index, shell

LINE = SupportedPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1})
SQUARE_POLY = SupportedPolynomial({(0, 0): 1, (1, 0): 1, (0, 1): 1, (1, 1): 1j})
HARNACK = SupportedPolynomial({(0, 0): 1, (1, 0): 2, (2, 0): 1, (0, 1): -1, (1, 1): 1})
DILATED = newton_polygon([(0, 0), (2, 0), (0, 2)])


@pytest.fixture(scope="session")
def line_shell():
    arr = shell(LINE)
    return arr, calibrate_index(arr, LINE)


@pytest.fixture(scope="session")
def square_shell():
    arr = shell(SQUARE_POLY)
    return arr, calibrate_index(arr, SQUARE_POLY)


def index_two_arrangements(count, seed=0, polygon=DILATED):
    """Random dilated-simplex arrangements that carry an index +-2 triangle."""
    from coamoeba.graph import yang_baxter_sites
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        arr = random_dual_arrangement(polygon, rng)
        idx = calibrate_by_area(arr, relative_index_map(arr))
        if idx.max_abs() == 2 and yang_baxter_sites(arr, idx):
            out.append((arr, idx))
    return out


ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


@pytest.fixture
def report_criterion(request):
    """Record one PASS/FAIL line and assert on it; the lines are repeated in the terminal summary."""
    def record(number: int, ok: bool, detail: str, seconds: float | None = None, limit: float | None = None):
        within = limit is None or seconds is None or seconds < limit
        timing = "" if seconds is None else f" [{seconds:.2f} s" + ("" if limit is None else f" < {limit:g} s") + "]"
        line = f"{'PASS' if ok and within else 'FAIL'} criterion {number}: {detail}{timing}"
        request.config.stash[ACCEPTANCE_LINES].append(line)
        print(line)
        assert ok, line
        assert within, line

    def info(number: int, detail: str):
        line = f"INFO criterion {number}: {detail}"
        request.config.stash[ACCEPTANCE_LINES].append(line)
        print(line)

    record.info = info
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: (int(s.split("criterion ")[1].split(":")[0]), s)):
            terminalreporter.write_line(line)
