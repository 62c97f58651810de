import numpy as np
import pytest

from losarray.exhaustive import es_search
from losarray.rounding import discrete_objective, round_top_k, swap_search
from losarray.solver import solve_alternating

from .helpers import RHO, section4_stack

# criterion number -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


class Design:
    """CO, CO+RR (and optionally ES) results on one stack."""

    def __init__(self, stack, with_es=False):
        self.stack = stack
        self.wt, self.wr, self.trace = solve_alternating(stack, 4, 4, RHO)
        self.co = (round_top_k(self.wt), round_top_k(self.wr))
        self.co_rr = swap_search(stack, *self.co, RHO, self.wt, self.wr)
        self.co_obj = discrete_objective(stack, *self.co, RHO)
        self.co_rr_obj = discrete_objective(stack, *self.co_rr, RHO)
        if with_es:
            tx, rx, self.es_obj = es_search(stack, 4, 4, RHO)
            self.es = (tx, rx)


@pytest.fixture(scope="session")
def section4_full():
    """Full-resolution range (Q = 181), 16-point grids."""
    stack, grid = section4_stack(step=0.5)
    d = Design(stack)
    d.grid = grid
    return d


@pytest.fixture(scope="session")
def section4_q19():
    """Reduced range (Q = 19) with exhaustive search."""
    stack, grid = section4_stack(step=5.0)
    d = Design(stack, with_es=True)
    d.grid = grid
    return d


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
