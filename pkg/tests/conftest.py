import random
import time

import pytest

from e8anomaly.charforms import random_geometry


@pytest.fixture
def geometry():
    """Factory for seeded random evaluated geometries."""

    def make(dim=14, lbar=2, n_e8=1, order=3, seed=0):
        return random_geometry(dim, lbar, n_e8, order, random.Random(seed))

    return make


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(n, title)`` returns a context manager."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    class _Record:
        def __init__(self, number, title, budget):
            self.number, self.title, self.budget = number, title, budget

        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, exc_type, exc, tb):
            elapsed = time.perf_counter() - self.start
            over = self.budget is not None and elapsed > self.budget
            ok = exc_type is None and not over
            line = f"criterion {self.number}: {'PASS' if ok else 'FAIL'}  {self.title}  ({elapsed:.2f} s"
            line += f", budget {self.budget:g} s)" if self.budget is not None else ")"
            lines.append(line)
            print(line)
            if exc_type is None and over:
                raise AssertionError(f"criterion {self.number} exceeded its {self.budget:g} s budget")
            return False

    return lambda number, title, budget=None: _Record(number, title, budget)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
