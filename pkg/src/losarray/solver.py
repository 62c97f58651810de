"""Relaxed max-min design: alternating concave maximization over Tx/Rx weights.

Each inner problem maximizes a log-sum-exp smoothed minimum of the relaxed
per-distance capacities over a capped simplex ``{0 <= w <= 1, sum w = k}``
by projected gradient ascent with Armijo backtracking, annealing the
smoothing temperature ``tau`` (in bpcu) down to ``tau_min``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from losarray.channel import (
    ChannelStack,
    PowerNorm,
    SelectionWeights,
    relaxed_capacity_raw,
    relaxed_value_and_gradient,
    snr_scale,
)

__all__ = [
    "InnerResult",
    "SolverConfig",
    "SolverTrace",
    "TraceEntry",
    "project_capped_simplex",
    "softmin_objective",
    "solve_alternating",
    "solve_inner",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    outer_threshold: float = 0.01
    max_outer_iters: int = 50
    inner_tol: float = 1e-6
    inner_max_iters: int = 500
    tau_start: float = 1.0
    tau_factor: float = 0.5
    tau_min: float = 0.01
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    first_side: str = "tx"
    power_norm: PowerNorm = PowerNorm.PAPER_NF

    def __post_init__(self):
        object.__setattr__(self, "power_norm", PowerNorm(self.power_norm))
        positive = (
            "outer_threshold", "max_outer_iters", "inner_tol", "inner_max_iters",
            "tau_start", "tau_factor", "tau_min", "armijo_c", "backtrack_factor",
        )
        bad = [name for name in positive if not getattr(self, name) > 0]
        if bad:
            raise ValueError(f"solver settings must be positive: {', '.join(bad)}")
        if not (self.tau_factor < 1 and self.backtrack_factor < 1):
            raise ValueError("tau_factor and backtrack_factor must be below 1")
        if self.tau_min > self.tau_start:
            raise ValueError("tau_min must not exceed tau_start")
        if self.first_side not in ("tx", "rx"):
            raise ValueError("first_side must be 'tx' or 'rx'")


@dataclass
class TraceEntry:
    iteration: int
    side: str
    objective: float
    inner_iters: int
    converged: bool = True


@dataclass
class SolverTrace:
    """Outer-iteration history of :func:`solve_alternating`.

    ``entries[0]`` is the initial point (side ``init``); each outer iteration
    adds one entry per optimized side, sharing the iteration number.
    """

    entries: list[TraceEntry] = field(default_factory=list)
    smoothing_gap: float = float("nan")
    warnings: list[str] = field(default_factory=list)

    @property
    def objectives(self) -> np.ndarray:
        return np.array([e.objective for e in self.entries])

    @property
    def n_outer(self) -> int:
        return max((e.iteration for e in self.entries), default=0)

    def to_log(self) -> str:
        lines = [f"{e.iteration} {e.side} {e.objective:.9g} {e.inner_iters}" for e in self.entries]
        return "".join(line + "\n" for line in lines)


def project_capped_simplex(v, target_sum: float, tol: float = 1e-10) -> np.ndarray:
    """Euclidean projection onto ``{x : 0 <= x <= 1, sum(x) = target_sum}``.

    The projection is ``clip(v - mu, 0, 1)`` where the shift ``mu`` is found
    by bisection on the (monotone) sum.
    """
    v = np.asarray(v, dtype=float).ravel()
    n = v.size
    if not (0 < target_sum < n):
        raise ValueError(f"target sum must lie strictly between 0 and {n}, got {target_sum}")
    lo, hi = v.min() - 1.0, v.max()  # sum(lo) = n, sum(hi) = 0
    x = np.clip(v - 0.5 * (lo + hi), 0.0, 1.0)
    for _ in range(200):
        mu = 0.5 * (lo + hi)
        x = np.clip(v - mu, 0.0, 1.0)
        s = x.sum()
        if abs(s - target_sum) <= tol:
            break
        if s > target_sum:
            lo = mu
        else:
            hi = mu
    # exact shift on the free set found by bisection, so the sum holds to rounding
    free = (x > 0.0) & (x < 1.0)
    if free.any():
        mu = (v[free].sum() + np.count_nonzero(x >= 1.0) - target_sum) / np.count_nonzero(free)
        exact = np.clip(v - mu, 0.0, 1.0)
        if np.array_equal(exact > 0.0, x > 0.0) and np.array_equal(exact < 1.0, x < 1.0):
            x = exact
    return x


def _softmin(caps: np.ndarray, tau: float) -> tuple[float, np.ndarray]:
    """Smoothed minimum ``-tau ln sum exp(-C/tau)`` and its softmax weights."""
    m = caps.min()
    e = np.exp(-(caps - m) / tau)
    s = e.sum()
    return float(m - tau * np.log(s)), e / s


def softmin_objective(stack: ChannelStack, wt, wr, rho: float, tau: float, side: str = "tx",
                      power_norm=PowerNorm.PAPER_NF):
    """Smoothed worst-case relaxed capacity and its gradient w.r.t. ``side``.

    The value satisfies ``value <= min_q C_q <= value + tau * ln Q``.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    c = snr_scale(rho, wt, power_norm)
    w_t = wt.w if isinstance(wt, SelectionWeights) else np.asarray(wt, dtype=float)
    w_r = wr.w if isinstance(wr, SelectionWeights) else np.asarray(wr, dtype=float)
    caps, grads = relaxed_value_and_gradient(stack.matrices, w_t, w_r, c, side)
    value, p = _softmin(caps, tau)
    return value, p @ grads


@dataclass
class InnerResult:
    weights: SelectionWeights
    objective: float
    iterations: int
    converged: bool


class _SideProblem:
    """Relaxed capacities as a function of one side's weights, other side fixed."""

    def __init__(self, stack, fixed, side, k, rho, power_norm):
        self.h = stack.matrices
        self.side = side
        self.fixed = np.asarray(fixed, dtype=float)
        n_tx = stack.n_tx
        self.size = n_tx if side == "tx" else stack.n_rx
        self.k = k
        if PowerNorm(power_norm) is PowerNorm.PAPER_NF:
            self.c = rho / n_tx
        else:
            self.c = rho / (k if side == "tx" else self.fixed.sum())

    def _split(self, x):
        return (x, self.fixed) if self.side == "tx" else (self.fixed, x)

    def caps(self, x):
        wt, wr = self._split(x)
        return relaxed_capacity_raw(self.h, wt, wr, self.c)

    def value_grad(self, x, tau):
        wt, wr = self._split(x)
        caps, grads = relaxed_value_and_gradient(self.h, wt, wr, self.c, self.side)
        value, p = _softmin(caps, tau)
        return value, p @ grads


def solve_inner(stack: ChannelStack, fixed, side: str, k: int, rho: float,
                config: SolverConfig = SolverConfig(), start=None) -> InnerResult:
    """Maximize the worst-case relaxed capacity over one side's weights.

    Parameters
    ----------
    fixed : SelectionWeights or array_like
        Weights of the other side, held constant.
    side : {'tx', 'rx'}
        Which weights are optimized.
    k : int
        Number of antennas to select on ``side``.
    start : SelectionWeights or array_like, optional
        Feasible starting point; uniform ``k/size`` by default.

    The best iterate (by the true, unsmoothed minimum) is returned, so the
    result never falls below the starting objective.
    """
    fixed_w = fixed.w if isinstance(fixed, SelectionWeights) else fixed
    prob = _SideProblem(stack, fixed_w, side, k, rho, config.power_norm)
    n = prob.size
    if k == n:
        x = np.ones(n)
        return InnerResult(SelectionWeights(x, k), float(prob.caps(x).min()), 0, True)

    if start is None:
        x = np.full(n, k / n)
    else:
        x = np.asarray(start.w if isinstance(start, SelectionWeights) else start, dtype=float).copy()
    best_x, best_obj = x.copy(), float(prob.caps(x).min())
    total_iters, converged = 0, True
    step = 1.0

    tau = config.tau_start
    while True:
        f, g = prob.value_grad(x, tau)
        stage_converged = False
        for _ in range(config.inner_max_iters):
            if np.linalg.norm(x - project_capped_simplex(x + g, k)) <= config.inner_tol:
                stage_converged = True
                break
            total_iters += 1
            while True:
                x_new = project_capped_simplex(x + step * g, k)
                f_new, g_new = prob.value_grad(x_new, tau)
                if f_new >= f + config.armijo_c * (g @ (x_new - x)):
                    break
                step *= config.backtrack_factor
                if step < 1e-14:
                    break
            if step < 1e-14:
                # no ascent possible at machine precision: treat as stationary
                step = 1.0
                stage_converged = True
                break
            x, f, g = x_new, f_new, g_new
            step = min(step / config.backtrack_factor, 1e6)
        converged = converged and stage_converged
        obj = float(prob.caps(x).min())
        if obj > best_obj:
            best_x, best_obj = x.copy(), obj
        if tau <= config.tau_min:
            break
        tau = max(tau * config.tau_factor, config.tau_min)

    best_x = project_capped_simplex(best_x, k) if not np.isclose(best_x.sum(), k, atol=1e-9) else best_x
    return InnerResult(SelectionWeights(best_x, k), best_obj, total_iters, converged)


def solve_alternating(stack: ChannelStack, n_tx: int, n_rx: int, rho: float,
                      config: SolverConfig = SolverConfig()):
    """Alternate Tx and Rx inner solves until the worst-case relaxed capacity
    improves by less than ``config.outer_threshold``.

    Returns
    -------
    wt, wr : SelectionWeights
    trace : SolverTrace
    """
    if not (1 <= n_tx <= stack.n_tx and 1 <= n_rx <= stack.n_rx):
        raise ValueError(f"cannot select ({n_tx}, {n_rx}) from a ({stack.n_tx}, {stack.n_rx}) grid")
    wt = SelectionWeights.uniform(stack.n_tx, n_tx)
    wr = SelectionWeights.uniform(stack.n_rx, n_rx)
    c = snr_scale(rho, wt, config.power_norm)

    def objective(a, b):
        return float(relaxed_capacity_raw(stack.matrices, a.w, b.w, c).min())

    trace = SolverTrace()
    obj = objective(wt, wr)
    trace.entries.append(TraceEntry(0, "init", obj, 0))

    sides = [s for s in (config.first_side, "rx" if config.first_side == "tx" else "tx")
             if (s == "tx" and n_tx < stack.n_tx) or (s == "rx" and n_rx < stack.n_rx)]
    if not sides:
        trace.smoothing_gap = 0.0
        return wt, wr, trace

    # one outer iteration is a full sweep: every free side is re-optimized once
    for it in range(1, config.max_outer_iters + 1):
        start_obj = obj
        for side in sides:
            if side == "tx":
                res = solve_inner(stack, wr, "tx", n_tx, rho, config, start=wt)
                wt = res.weights
            else:
                res = solve_inner(stack, wt, "rx", n_rx, rho, config, start=wr)
                wr = res.weights
            obj = objective(wt, wr)
            trace.entries.append(TraceEntry(it, side, obj, res.iterations, res.converged))
            if not res.converged:
                trace.warnings.append(f"iteration {it} ({side}): inner solver hit the iteration cap")
            log.debug("outer %d %s objective=%.6f inner=%d", it, side, obj, res.iterations)
        if obj - start_obj < config.outer_threshold:
            break
    else:
        trace.warnings.append("outer iteration cap reached")

    caps = relaxed_capacity_raw(stack.matrices, wt.w, wr.w, c)
    smooth, _ = _softmin(caps, config.tau_min)
    trace.smoothing_gap = float(caps.min() - smooth)
    return wt, wr, trace
