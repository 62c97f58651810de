import itertools
from math import comb

import numpy as np
import pytest

from losarray.channel import ChannelStack, capacity_selected
from losarray.exhaustive import EsBudget, EsBudgetExceeded, es_cost, es_search

from .helpers import RHO, random_channel


def stack_of(h):
    return ChannelStack(h, np.arange(1.0, h.shape[0] + 1))


def naive_es(h, n, m):
    """Nested loops; first pass finds the maximum, second keeps the
    lexicographically smallest selection within 1e-12 of it."""
    q, m_f, n_f = h.shape
    scores = {}
    for tx in itertools.combinations(range(n_f), n):
        for rx in itertools.combinations(range(m_f), m):
            caps = [capacity_selected(h[k][np.ix_(rx, tx)], RHO) for k in range(q)]
            scores[(tx, rx)] = min(caps)
    best = max(scores.values())
    key = min(k for k, v in scores.items() if v >= best - 1e-12)
    return key, best


@pytest.mark.parametrize("seed, shape, n, m", [(0, (3, 5, 6), 2, 2), (1, (2, 6, 5), 3, 2), (2, (4, 4, 4), 1, 3)])
def test_matches_nested_loop_oracle(seed, shape, n, m):
    h = random_channel(np.random.default_rng(seed), *shape)
    tx, rx, val = es_search(stack_of(h), n, m, RHO)
    (otx, orx), oval = naive_es(h, n, m)
    assert val == pytest.approx(oval, abs=1e-9)
    assert (tx.indices, rx.indices) == (otx, orx)


def test_full_grid_selection(rng):
    h = random_channel(rng, 3, 4, 5)
    tx, rx, val = es_search(stack_of(h), 5, 4, RHO)
    assert tx.indices == tuple(range(5)) and rx.indices == tuple(range(4))
    assert val == pytest.approx(capacity_selected(h, RHO).min(), rel=1e-12)


def test_ties_resolve_lexicographically():
    # identical columns and rows: every selection scores the same
    h = np.ones((2, 4, 4), dtype=complex)
    tx, rx, _ = es_search(stack_of(h), 2, 2, RHO)
    assert tx.indices == (0, 1) and rx.indices == (0, 1)


def test_cost_and_budget(rng):
    assert es_cost(16, 4, 16, 4, 181) == comb(16, 4) ** 2 * 181
    assert es_cost(16, 4, 16, 4, 181) == 599_544_400
    stk = stack_of(random_channel(rng, 3, 5, 5))
    with pytest.raises(EsBudgetExceeded) as err:
        es_search(stk, 2, 2, RHO, EsBudget(max_evaluations=10))
    assert err.value.cost == comb(5, 2) ** 2 * 3 and err.value.budget == 10
    tx, rx, val = es_search(stk, 2, 2, RHO, EsBudget(max_evaluations=10, force=True))
    assert val == es_search(stk, 2, 2, RHO)[2]


def test_swapping_roles_preserves_objective(rng):
    # det(I + c H H^H) = det(I + c H^H H): with N = M the objective is
    # unchanged when Tx and Rx trade places
    h = random_channel(rng, 3, 5, 6)
    tx, rx, val = es_search(stack_of(h), 2, 2, RHO)
    ttx, trx, tval = es_search(stack_of(np.swapaxes(h, 1, 2)), 2, 2, RHO)
    assert tval == pytest.approx(val, abs=1e-9)
    assert (ttx.indices, trx.indices) == (rx.indices, tx.indices)


def test_rejects_bad_sizes(rng):
    with pytest.raises(ValueError):
        es_search(stack_of(random_channel(rng, 1, 3, 3)), 4, 1, RHO)


def test_progress_goes_to_stderr(rng, capsys):
    es_search(stack_of(random_channel(rng, 2, 4, 6)), 2, 2, RHO, progress=True, progress_interval=0.2)
    out = capsys.readouterr()
    assert out.out == ""
    assert out.err.count("es: ") == 5
