import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from losarray.channel import ChannelStack, SelectionWeights
from losarray.exhaustive import es_search
from losarray.geometry import aperture, min_spacing
from losarray.rounding import (
    BinarySelection,
    discrete_objective,
    round_top_k,
    selection_to_layout,
    swap_search,
)
from losarray.uniform import build_ula

from .helpers import RHO, random_channel


def stack_of(h):
    return ChannelStack(h, np.arange(1.0, h.shape[0] + 1))


def naive_swap(stk, t0, r0, w_t, w_r):
    """Scalar first-improvement swap pass, Tx then Rx."""
    sel = {"tx": list(t0.indices), "rx": list(r0.indices)}
    sizes = {"tx": t0.grid_size, "rx": r0.grid_size}
    weights = {"tx": w_t, "rx": w_r}
    best = discrete_objective(stk, sel["tx"], sel["rx"], RHO)
    for side in ("tx", "rx"):
        own = sel[side]
        for orig in sorted(own, key=lambda i: (weights[side][i], i)):
            slot = own.index(orig)
            for c in [c for c in range(sizes[side]) if c not in own]:
                trial = own.copy()
                trial[slot] = c
                pair = (sorted(trial), sel["rx"]) if side == "tx" else (sel["tx"], sorted(trial))
                val = discrete_objective(stk, *pair, RHO)
                if val > best + 1e-9:
                    own[slot], best = c, val
    return BinarySelection(tuple(sel["tx"]), sizes["tx"]), BinarySelection(tuple(sel["rx"]), sizes["rx"])


class TestTopK:
    def test_example(self):
        w = SelectionWeights(np.array([0.9, 0.1, 0.8, 0.2]), 2)
        assert round_top_k(w).indices == (0, 2)

    def test_ties_go_to_smaller_index(self):
        w = SelectionWeights(np.array([0.5, 0.5, 0.5, 0.5]), 2)
        assert round_top_k(w).indices == (0, 1)

    def test_binary_input_is_fixed(self):
        sel = BinarySelection((1, 4, 5), 8)
        assert round_top_k(sel.to_weights()) == sel

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(0, 1), min_size=2, max_size=12), st.data())
    def test_keeps_largest(self, vals, data):
        v = np.array(vals)
        k = data.draw(st.integers(1, v.size))
        # SelectionWeights needs the right sum; top-k only reads the order
        w = SelectionWeights.__new__(SelectionWeights)
        object.__setattr__(w, "w", v)
        object.__setattr__(w, "target_sum", k)
        sel = round_top_k(w)
        assert sel.k == k
        rest = np.setdiff1d(np.arange(v.size), sel.indices)
        if rest.size:
            assert v[list(sel.indices)].min() >= v[rest].max()


class TestBinarySelection:
    def test_sorted_and_validated(self):
        assert BinarySelection((3, 1, 2), 5).indices == (1, 2, 3)
        with pytest.raises(ValueError):
            BinarySelection((1, 1), 5)
        with pytest.raises(IndexError):
            BinarySelection((0, 5), 5)

    def test_to_weights(self):
        w = BinarySelection((0, 3), 4).to_weights()
        assert np.array_equal(w.w, [1, 0, 0, 1]) and w.target_sum == 2


class TestSwapSearch:
    @pytest.mark.parametrize("seed", range(4))
    def test_bracketed_by_start_and_exhaustive(self, seed):
        rng = np.random.default_rng(seed)
        stk = stack_of(random_channel(rng, 3, 6, 6))
        t0 = BinarySelection(tuple(rng.choice(6, 2, replace=False)), 6)
        r0 = BinarySelection(tuple(rng.choice(6, 2, replace=False)), 6)
        start = discrete_objective(stk, t0, r0, RHO)
        t1, r1 = swap_search(stk, t0, r0, RHO)
        _, _, es = es_search(stk, 2, 2, RHO)
        assert start - 1e-12 <= discrete_objective(stk, t1, r1, RHO) <= es + 1e-9

    def test_exhaustive_optimum_is_fixed(self, rng):
        stk = stack_of(random_channel(rng, 3, 6, 6))
        tx, rx, _ = es_search(stk, 2, 2, RHO)
        assert swap_search(stk, tx, rx, RHO, repeat=True) == (tx, rx)

    def test_result_is_single_swap_local_optimum_with_repeat(self, rng):
        stk = stack_of(random_channel(rng, 2, 7, 7))
        t, r = swap_search(stk, BinarySelection((0, 1, 2), 7), BinarySelection((0, 1, 2), 7), RHO, repeat=True)
        best = discrete_objective(stk, t, r, RHO)
        for side in ("tx", "rx"):
            own = t if side == "tx" else r
            for i in own.indices:
                for c in set(range(7)) - set(own.indices):
                    trial = BinarySelection(tuple(set(own.indices) - {i} | {c}), 7)
                    pair = (trial, r) if side == "tx" else (t, trial)
                    assert discrete_objective(stk, *pair, RHO) <= best + 1e-9

    def test_strict_improvement_on_crafted_instance(self):
        # one distance, Tx location 3 is a copy of location 0: starting from
        # {0, 3} the Tx pass must replace one of them
        base = np.exp(2j * np.pi * np.random.default_rng(3).uniform(size=(1, 2, 5)))
        base[:, :, 3] = base[:, :, 0]
        stk = ChannelStack(base, np.array([10.0]))
        t0, r0 = BinarySelection((0, 3), 5), BinarySelection((0, 1), 2)
        t1, r1 = swap_search(stk, t0, r0, RHO)
        assert discrete_objective(stk, t1, r1, RHO) > discrete_objective(stk, t0, r0, RHO) + 1.0

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive_rule(self, seed):
        rng = np.random.default_rng(100 + seed)
        stk = stack_of(random_channel(rng, 3, 6, 7))
        t0 = BinarySelection(tuple(rng.choice(7, 3, replace=False)), 7)
        r0 = BinarySelection(tuple(rng.choice(6, 2, replace=False)), 6)
        w_t, w_r = rng.uniform(size=7), rng.uniform(size=6)
        assert swap_search(stk, t0, r0, RHO, w_t, w_r) == naive_swap(stk, t0, r0, w_t, w_r)

    def test_target_stops_early(self, rng):
        stk = stack_of(random_channel(rng, 3, 6, 6))
        t0, r0 = BinarySelection((0, 1), 6), BinarySelection((0, 1), 6)
        start = discrete_objective(stk, t0, r0, RHO)
        assert swap_search(stk, t0, r0, RHO, target=start - 1.0) == (t0, r0)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 10**6))
    def test_never_decreases(self, seed):
        rng = np.random.default_rng(seed)
        stk = stack_of(random_channel(rng, 2, 5, 5))
        t0 = BinarySelection(tuple(rng.choice(5, 2, replace=False)), 5)
        r0 = BinarySelection(tuple(rng.choice(5, 3, replace=False)), 5)
        t1, r1 = swap_search(stk, t0, r0, RHO)
        assert discrete_objective(stk, t1, r1, RHO) >= discrete_objective(stk, t0, r0, RHO) - 1e-12
        assert t1.k == 2 and r1.k == 3


class TestLayout:
    def test_full_selection_is_grid(self):
        grid = build_ula(16, 1 / 15)
        sel = BinarySelection(tuple(range(16)), 16)
        assert np.array_equal(selection_to_layout(sel, grid).points, grid.points)

    def test_edges_span_aperture(self):
        grid = build_ula(16, 1 / 15)
        lay = selection_to_layout(BinarySelection((0, 15), 16), grid)
        assert aperture(lay) == pytest.approx(1.0)

    def test_grid_size_mismatch(self):
        with pytest.raises(ValueError):
            selection_to_layout(BinarySelection((0, 1), 4), build_ula(5, 0.1))

    @settings(max_examples=40, deadline=None)
    @given(st.sets(st.integers(0, 15), min_size=2, max_size=16))
    def test_subset_properties(self, idx):
        grid = build_ula(16, 1 / 15)
        lay = selection_to_layout(BinarySelection(tuple(idx), 16), grid)
        assert aperture(lay) <= aperture(grid) + 1e-12
        assert min_spacing(lay) >= min_spacing(grid) - 1e-12
        assert all(any(np.allclose(p, g) for g in grid.points) for p in lay.points)


@pytest.mark.slow
def test_section4_co_is_symmetric(section4_full):
    tx, rx = section4_full.co
    assert tx.indices == rx.indices
