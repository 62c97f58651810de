"""Experiment driver: run the design methods of a :class:`RunConfig` and write reports.

Reported capacities always use the ``rho / N`` normalization, whatever the
solver optimized internally.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from losarray.channel import build_channel, capacity_selected
from losarray.config import RunConfig
from losarray.exhaustive import es_search
from losarray.files import atomic_write_text
from losarray.geometry import ArrayLayout, format_coordinates
from losarray.rounding import BinarySelection, discrete_capacities, round_top_k, selection_to_layout, swap_search
from losarray.solver import SolverTrace, solve_alternating
from losarray.uniform import build_ula, ula_spacing

__all__ = ["DesignResult", "SummaryStats", "emit_csv", "format_csv", "run", "summarize", "write_outputs"]

log = logging.getLogger(__name__)

CSV_HEADER = "distance_m,capacity_bpcu"


@dataclass(frozen=True)
class SummaryStats:
    """Mean, population standard deviation and minimum of a capacity curve (bpcu)."""

    mean: float
    std: float
    min: float
    argmin_distance: float


def summarize(capacities, distances=None) -> SummaryStats:
    caps = np.asarray(capacities, dtype=float)
    if caps.size == 0:
        raise ValueError("cannot summarize an empty capacity curve")
    d = np.arange(caps.size, dtype=float) if distances is None else np.asarray(distances, dtype=float)
    q = int(np.argmin(caps))
    return SummaryStats(float(caps.mean()), float(caps.std()), float(caps[q]), float(d[q]))


@dataclass
class DesignResult:
    method: str
    distances: np.ndarray
    capacities: np.ndarray
    tx_layout: ArrayLayout
    rx_layout: ArrayLayout
    tx_selection: BinarySelection | None = None
    rx_selection: BinarySelection | None = None
    trace: SolverTrace | None = None
    relaxed_tx: np.ndarray | None = None
    relaxed_rx: np.ndarray | None = None
    extras: dict = field(default_factory=dict)

    @property
    def stats(self) -> SummaryStats:
        return summarize(self.capacities, self.distances)

    @property
    def min_capacity(self) -> float:
        return float(self.capacities.min())


def run(config: RunConfig, progress: bool = False) -> dict[str, DesignResult]:
    """Run every requested method in order; results are keyed by method name."""
    results: dict[str, DesignResult] = {}
    if not config.methods:
        log.warning("no design method requested; nothing to do")
        return results

    scenario = config.scenario()
    rho = scenario.rho
    n_tx, n_rx = config.tx.n_select, config.rx.n_select
    stack = None
    relaxed = None

    for method in config.methods:
        log.info("running method %s", method)
        if method == "ula":
            spacing = ula_spacing(scenario.wavelength, config.design_distance, max(n_tx, n_rx))
            tx = build_ula(n_tx, spacing, label="ula_tx")
            rx = build_ula(n_rx, spacing, label="ula_rx")
            h = build_channel(type(scenario)(scenario.carrier_frequency, scenario.snr_db, tx, rx,
                                             scenario.distances))
            caps = np.atleast_1d(capacity_selected(h.matrices, rho))
            results[method] = DesignResult(method, scenario.distances, caps, tx, rx,
                                           extras={"spacing_m": spacing})
            continue

        if stack is None:
            stack = build_channel(scenario)

        if method in ("co", "co_rr"):
            if relaxed is None:
                relaxed = solve_alternating(stack, n_tx, n_rx, rho, config.solver)
                for msg in relaxed[2].warnings:
                    log.warning("solver: %s", msg)
            wt, wr, trace = relaxed
            sel_t, sel_r = round_top_k(wt), round_top_k(wr)
            if method == "co_rr":
                sel_t, sel_r = swap_search(stack, sel_t, sel_r, rho, wt, wr,
                                           repeat=config.swap_repeat, target=config.swap_target)
            extras = {"relaxed_objective_bpcu": float(trace.objectives[-1]), "outer_iterations": trace.n_outer}
        elif method == "es":
            sel_t, sel_r, _ = es_search(stack, n_tx, n_rx, rho, config.es_budget, progress=progress)
            wt = wr = trace = None
            extras = {}
        else:
            raise ValueError(f"unknown method {method!r}")

        caps = discrete_capacities(stack, sel_t, sel_r, rho)
        results[method] = DesignResult(
            method, scenario.distances, caps,
            selection_to_layout(sel_t, scenario.tx_grid), selection_to_layout(sel_r, scenario.rx_grid),
            sel_t, sel_r, trace,
            None if wt is None else np.array(wt.w), None if wr is None else np.array(wr.w),
            extras,
        )
    return results


def _g9(x: float) -> str:
    return f"{x:.9g}"


def format_csv(result: DesignResult) -> str:
    rows = [CSV_HEADER] + [f"{_g9(d)},{_g9(c)}" for d, c in zip(result.distances, result.capacities)]
    return "".join(row + "\n" for row in rows)


def emit_csv(result: DesignResult, path) -> Path:
    """Write the capacity curve as ``distance_m,capacity_bpcu`` rows."""
    path = Path(path)
    atomic_write_text(path, format_csv(result))
    return path


def _summary_record(result: DesignResult) -> dict:
    s = result.stats
    rec = {
        "mean_bpcu": s.mean,
        "std_bpcu": s.std,
        "min_bpcu": s.min,
        "argmin_distance_m": s.argmin_distance,
        "tx_aperture_m": result.tx_layout.aperture,
        "rx_aperture_m": result.rx_layout.aperture,
    }
    if result.tx_selection is not None:
        rec["tx_indices"] = list(result.tx_selection.indices)
        rec["rx_indices"] = list(result.rx_selection.indices)
    rec.update(result.extras)
    return rec


def write_outputs(results: dict[str, DesignResult], config: RunConfig) -> list[Path]:
    """Write CSV curves, coordinates, solver logs and ``summary.json``.

    Returns the written paths. Output depends only on the config and results.
    """
    out = Path(config.output_dir)
    written = []
    for method, res in results.items():
        written.append(emit_csv(res, out / f"{method}_capacity.csv"))
        for side, layout in (("tx", res.tx_layout), ("rx", res.rx_layout)):
            p = out / f"{method}_{side}.txt"
            atomic_write_text(p, format_coordinates(layout))
            written.append(p)
        if res.trace is not None:
            p = out / f"{method}_trace.log"
            atomic_write_text(p, res.trace.to_log())
            written.append(p)
    summary = {
        "schema_version": 1,
        "snr_db": config.snr_db,
        "carrier_frequency_hz": config.carrier_frequency_hz,
        "n_distances": len(config.distances()),
        "report_power_norm": "selected_N",
        "methods": {m: _summary_record(r) for m, r in results.items()},
    }
    p = out / "summary.json"
    atomic_write_text(p, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(p)
    if config.plot and results:
        from losarray.plotting import plot_capacity_curves, plot_layouts

        tx_grid, rx_grid = config.grids()
        written.append(plot_capacity_curves(results, out / "capacity.png"))
        for method, res in results.items():
            written.append(plot_layouts(res, tx_grid, rx_grid, out / f"{method}_layout.png"))
    return written
