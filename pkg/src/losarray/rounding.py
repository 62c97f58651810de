"""From relaxed weights to antenna selections: top-k rounding and swap search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from losarray.channel import ChannelStack, SelectionWeights, capacity_selected
from losarray.geometry import ArrayLayout

__all__ = [
    "BinarySelection",
    "discrete_capacities",
    "discrete_objective",
    "round_top_k",
    "selection_to_layout",
    "swap_search",
]

# a swap must beat the incumbent by more than this to be committed
IMPROVEMENT_TOL = 1e-9


@dataclass(frozen=True)
class BinarySelection:
    """Sorted grid indices of the selected antenna locations."""

    indices: tuple[int, ...]
    grid_size: int

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("selection indices must be distinct")
        if idx and (idx[0] < 0 or idx[-1] >= self.grid_size):
            raise IndexError(f"indices {idx} out of range for grid of {self.grid_size}")
        object.__setattr__(self, "indices", idx)

    @property
    def k(self) -> int:
        return len(self.indices)

    def to_weights(self) -> SelectionWeights:
        return SelectionWeights.from_indices(self.indices, self.grid_size)


def round_top_k(w: SelectionWeights) -> BinarySelection:
    """Keep the ``target_sum`` largest weights; ties go to the smaller index."""
    order = np.lexsort((np.arange(len(w)), -w.w))
    return BinarySelection(tuple(order[: w.target_sum]), len(w))


def discrete_capacities(stack: ChannelStack, tx, rx, rho: float) -> np.ndarray:
    """Per-distance capacity of the selected subarrays (``rho / N`` normalization)."""
    tx = tx.indices if isinstance(tx, BinarySelection) else tx
    rx = rx.indices if isinstance(rx, BinarySelection) else rx
    return np.atleast_1d(capacity_selected(stack.select(tx, rx), rho))


def discrete_objective(stack: ChannelStack, tx, rx, rho: float) -> float:
    return float(discrete_capacities(stack, tx, rx, rho).min())


def _batch_objectives(stack, tx_sets, rx_sets, rho):
    """Worst-case capacity for each (tx_set, rx_set) pair, all of equal sizes."""
    tx = np.asarray(tx_sets, dtype=int)
    rx = np.asarray(rx_sets, dtype=int)
    h = stack.matrices[:, rx[:, :, None], tx[:, None, :]]  # (Q, B, M, N)
    return capacity_selected(h, rho).min(axis=0)


def _swap_pass(stack, own, other, side, weights, rho, best, target):
    """One first-improvement pass over the selected elements of ``side``."""
    own = list(own)
    grid_size = stack.n_tx if side == "tx" else stack.n_rx
    visit = sorted(own, key=lambda i: (weights[i], i))
    for original in visit:
        slot = own.index(original)
        candidates = [c for c in range(grid_size) if c not in own]
        pos = 0
        while pos < len(candidates):
            trial_sets = []
            for c in candidates[pos:]:
                trial = own.copy()
                trial[slot] = c
                trial_sets.append(sorted(trial))
            others = [other] * len(trial_sets)
            if side == "tx":
                vals = _batch_objectives(stack, trial_sets, others, rho)
            else:
                vals = _batch_objectives(stack, others, trial_sets, rho)
            hits = np.flatnonzero(vals > best + IMPROVEMENT_TOL)
            if hits.size == 0:
                break
            j = int(hits[0])
            own[slot] = candidates[pos + j]
            best = float(vals[j])
            pos += j + 1
            if target is not None and best >= target:
                return sorted(own), best, True
    return sorted(own), best, False


def swap_search(stack: ChannelStack, sel_t: BinarySelection, sel_r: BinarySelection, rho: float,
                w_t=None, w_r=None, repeat: bool = False, target: float | None = None):
    """Refine selections by committing improving single-element swaps.

    Tx first, then Rx. Selected elements are visited in ascending order of
    their relaxed weight (ties by index); for each, unselected locations are
    tried in ascending index order and a swap is committed as soon as it
    raises the worst-case capacity. Scanning then continues with the
    swapped-in element in the same slot.

    Parameters
    ----------
    w_t, w_r : SelectionWeights or array_like, optional
        Relaxed weights defining the visiting order. Without them the order is
        by index.
    repeat : bool
        Repeat Tx/Rx passes until one full round commits no swap.
    target : float, optional
        Stop as soon as the objective reaches this value.

    Returns
    -------
    (BinarySelection, BinarySelection)
    """
    def as_array(w, size):
        if w is None:
            return np.zeros(size)
        return np.asarray(w.w if isinstance(w, SelectionWeights) else w, dtype=float)

    wt = as_array(w_t, sel_t.grid_size)
    wr = as_array(w_r, sel_r.grid_size)
    tx, rx = list(sel_t.indices), list(sel_r.indices)
    best = discrete_objective(stack, tx, rx, rho)
    if target is not None and best >= target:
        return sel_t, sel_r
    while True:
        start = best
        tx, best, done = _swap_pass(stack, tx, rx, "tx", wt, rho, best, target)
        if not done:
            rx, best, done = _swap_pass(stack, rx, tx, "rx", wr, rho, best, target)
        if done or not repeat or best <= start:
            break
    return BinarySelection(tuple(tx), sel_t.grid_size), BinarySelection(tuple(rx), sel_r.grid_size)


def selection_to_layout(sel: BinarySelection, grid: ArrayLayout) -> ArrayLayout:
    """Coordinates of the selected grid points, in grid order."""
    if sel.grid_size != len(grid):
        raise ValueError(f"selection over {sel.grid_size} points applied to a {len(grid)}-point grid")
    return grid.subset(sel.indices)
