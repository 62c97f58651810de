"""Exhaustive search over all Tx/Rx location subsets (exact max-min oracle)."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from losarray.channel import ChannelStack
from losarray.rounding import BinarySelection

__all__ = ["EsBudget", "EsBudgetExceeded", "es_cost", "es_search"]

# objectives within this of the maximum count as ties (lexicographic winner)
TIE_TOL = 1e-12


class EsBudgetExceeded(RuntimeError):
    def __init__(self, cost: int, budget: int):
        self.cost = cost
        self.budget = budget
        super().__init__(
            f"exhaustive search needs {cost:.3e} capacity evaluations, budget is {budget:.3e}"
            " (raise the budget or force the run)"
        )


@dataclass(frozen=True)
class EsBudget:
    max_evaluations: int = 10**9
    force: bool = False

    def __post_init__(self):
        if self.max_evaluations <= 0:
            raise ValueError("max_evaluations must be positive")


def es_cost(n_tx_grid: int, n_tx: int, n_rx_grid: int, n_rx: int, n_dist: int) -> int:
    return comb(n_tx_grid, n_tx) * comb(n_rx_grid, n_rx) * n_dist


def es_search(stack: ChannelStack, n_tx: int, n_rx: int, rho: float,
              budget: EsBudget = EsBudget(), progress: bool = False,
              progress_interval: float = 0.01):
    """Best ``(tx, rx)`` selection for the worst-case capacity over all distances.

    Combinations are visited in lexicographic order; among objectives tied
    within ``TIE_TOL`` the lexicographically smallest ``(tx, rx)`` wins.

    Returns
    -------
    tx, rx : BinarySelection
    objective : float
        Worst-case capacity in bpcu (``rho / N`` normalization).

    Raises
    ------
    EsBudgetExceeded
        If the evaluation count exceeds the budget and ``budget.force`` is off.
    """
    q, m_f, n_f = stack.matrices.shape
    if not (1 <= n_tx <= n_f and 1 <= n_rx <= m_f):
        raise ValueError(f"cannot select ({n_tx}, {n_rx}) from a ({n_f}, {m_f}) grid")
    cost = es_cost(n_f, n_tx, m_f, n_rx, q)
    if cost > budget.max_evaluations and not budget.force:
        raise EsBudgetExceeded(cost, budget.max_evaluations)

    rx_combos = np.array(list(combinations(range(m_f), n_rx)), dtype=int)
    rows, cols = rx_combos[:, :, None], rx_combos[:, None, :]
    eye = np.eye(m_f)
    scale = rho / n_tx
    n_tx_combos = comb(n_f, n_tx)
    every = max(1, int(n_tx_combos * progress_interval))

    best_val, best_key = -np.inf, None
    for i, tx in enumerate(combinations(range(n_f), n_tx)):
        ht = stack.matrices[:, :, tx]
        # Rx-grid Gram for this Tx subset, shared by every Rx subset
        kmat = eye + scale * (ht @ np.swapaxes(ht, -1, -2).conj())
        sub = kmat[:, rows, cols]  # (Q, R, M, M)
        chol = np.linalg.cholesky(sub)
        logdet = 2.0 * np.log(np.diagonal(chol, axis1=-2, axis2=-1).real).sum(axis=-1)
        vals = logdet.min(axis=0) / np.log(2.0)
        vmax = vals.max()
        if vmax > best_val + TIE_TOL:
            j = int(np.flatnonzero(vals >= vmax - TIE_TOL)[0])
            best_val, best_key = float(vals[j]), (tx, tuple(rx_combos[j]))
        if progress and (i + 1) % every == 0:
            print(f"es: {i + 1}/{n_tx_combos} Tx subsets, best {best_val:.6f} bpcu",
                  file=sys.stderr, flush=True)

    tx, rx = best_key
    return BinarySelection(tx, n_f), BinarySelection(rx, m_f), best_val
