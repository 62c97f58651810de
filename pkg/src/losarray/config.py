"""Run configuration: YAML schema, validation and grid construction.

Schema version 1::

    schema_version: 1
    carrier_frequency_hz: 62.0e9
    snr_db: 20
    range: {min_m: 10, max_m: 100, step_m: 0.5}
    D_star_m: 92                 # required by the ``ula`` method and by eta-only grids
    tx: {geometry: linear, N: 4, N_f: 16, aperture_m: 1.0}
    rx: {geometry: linear, N: 4, eta: 5, aperture_m: 1.0}
    methods: [ula, co, co_rr, es]
    solver: {outer_threshold: 0.01}   # any SolverConfig field
    swap: {repeat: false, target_bpcu: null}
    es: {max_evaluations: 1.0e9, force: false}
    output_dir: out
    plot: false

Array sections (``tx``/``rx``) take ``geometry`` (linear, planar, circular),
the selection size ``N`` and one grid description:

* linear: ``N_f`` or ``eta`` (``N_f = eta (N - 1) + 1``), plus ``spacing_m``
  or ``aperture_m``; with ``eta`` alone the pitch is the optimum ULA spacing
  divided by ``eta``.
* planar: ``counts: [nx, ny]`` and ``spacing_m: [sx, sy]`` (or a scalar).
* circular: ``N_f`` and ``radius_m``.

Optional ``center_m``, ``normal`` and ``rotation_rad`` place the grid; Rx
grids are translated along +z by each transmit distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

import yaml

from losarray.channel import LinkScenario, quantize_range, wavelength
from losarray.exhaustive import EsBudget, es_cost
from losarray.geometry import ArrayLayout, Geometry, GridSpec, candidate_count, check_spacing, generate_grid
from losarray.solver import SolverConfig
from losarray.uniform import ula_spacing

__all__ = ["METHODS", "SCHEMA_VERSION", "ConfigError", "ArraySpec", "RunConfig", "load_config", "parse_config"]

SCHEMA_VERSION = 1
METHODS = ("ula", "co", "co_rr", "es")

_TOP_KEYS = {
    "schema_version", "carrier_frequency_hz", "snr_db", "range", "D_star_m", "tx", "rx",
    "methods", "solver", "swap", "es", "output_dir", "plot",
}
_ARRAY_KEYS = {
    "geometry", "N", "N_f", "eta", "spacing_m", "aperture_m", "counts", "radius_m",
    "center_m", "normal", "rotation_rad",
}


class ConfigError(ValueError):
    """Invalid run configuration; ``problems`` lists every violated field."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))


@dataclass(frozen=True)
class ArraySpec:
    geometry: Geometry
    n_select: int
    grid: GridSpec
    eta: int | None = None

    @property
    def grid_size(self) -> int:
        return math.prod(self.grid.counts)


@dataclass(frozen=True)
class RunConfig:
    carrier_frequency_hz: float
    snr_db: float
    d_min: float
    d_max: float
    d_step: float
    tx: ArraySpec
    rx: ArraySpec
    methods: tuple[str, ...] = METHODS
    design_distance: float | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    swap_repeat: bool = False
    swap_target: float | None = None
    es_budget: EsBudget = field(default_factory=EsBudget)
    output_dir: Path = Path("out")
    plot: bool = False

    @property
    def wavelength(self) -> float:
        return wavelength(self.carrier_frequency_hz)

    def distances(self):
        return quantize_range(self.d_min, self.d_max, self.d_step)

    def grids(self) -> tuple[ArrayLayout, ArrayLayout]:
        return generate_grid(self.tx.grid), generate_grid(self.rx.grid)

    def scenario(self) -> LinkScenario:
        tx, rx = self.grids()
        return LinkScenario(self.carrier_frequency_hz, self.snr_db, tx, rx, self.distances())

    def with_overrides(self, methods=None, output_dir=None, es_force=None, plot=None) -> "RunConfig":
        changes = {}
        if methods is not None:
            changes["methods"] = tuple(methods)
        if output_dir is not None:
            changes["output_dir"] = Path(output_dir)
        if es_force:
            changes["es_budget"] = EsBudget(self.es_budget.max_evaluations, True)
        if plot is not None:
            changes["plot"] = bool(plot)
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        cfg = RunConfig(**data)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        problems = []
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            problems.append(f"methods: unknown {unknown}, choose from {list(METHODS)}")
        if "ula" in self.methods and self.design_distance is None:
            problems.append("D_star_m: required by the 'ula' method")
        lam = self.wavelength
        for side, spec in (("tx", self.tx), ("rx", self.rx)):
            layout = generate_grid(spec.grid)
            if spec.n_select > len(layout):
                problems.append(f"{side}.N: {spec.n_select} exceeds the {len(layout)} grid locations")
            if not check_spacing(layout, lam):
                problems.append(f"{side}: grid spacing is below half a wavelength ({lam / 2:.6g} m)")
        if "es" in self.methods and not self.es_budget.force and not problems:
            q = len(self.distances())
            cost = es_cost(self.tx.grid_size, self.tx.n_select, self.rx.grid_size, self.rx.n_select, q)
            if cost > self.es_budget.max_evaluations:
                problems.append(
                    f"es: needs {cost:.3e} capacity evaluations, budget is "
                    f"{self.es_budget.max_evaluations:.3e} (use --es-force or raise es.max_evaluations)"
                )
        if problems:
            raise ConfigError(problems)


def load_config(path, validate: bool = True) -> RunConfig:
    """Read a YAML config; relative ``output_dir`` resolves against its directory.

    With ``validate=False`` the cross-field checks (grid spacing, ES budget)
    are left to :meth:`RunConfig.with_overrides` or :meth:`RunConfig.validate`.
    """
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError([f"{path}: not valid YAML ({exc})"]) from exc
    return parse_config(raw, base_dir=path.parent, validate=validate)


def _number(raw, key, problems, required=True, positive=True, integer=False):
    if key not in raw or raw[key] is None:
        if required:
            problems.append(f"{key}: missing")
        return None
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        # YAML 1.1 reads "62e9" as a string
        try:
            value = float(value)
        except (TypeError, ValueError):
            problems.append(f"{key}: expected a number, got {raw[key]!r}")
            return None
    if integer:
        if float(value) != int(value):
            problems.append(f"{key}: expected an integer, got {value!r}")
            return None
        value = int(value)
    if positive and not value > 0:
        problems.append(f"{key}: must be positive, got {value!r}")
        return None
    return value


def _array_spec(raw, side, lam, design_distance, problems) -> ArraySpec | None:
    if not isinstance(raw, dict):
        problems.append(f"{side}: missing or not a mapping")
        return None
    sub: list[str] = []
    for key in sorted(set(raw) - _ARRAY_KEYS):
        sub.append(f"{key}: unknown key")
    try:
        geometry = Geometry(raw.get("geometry", "linear"))
    except ValueError:
        sub.append(f"geometry: expected one of {[g.value for g in Geometry]}")
        geometry = None
    n = _number(raw, "N", sub, integer=True)
    center = tuple(float(c) for c in raw.get("center_m", (0.0, 0.0, 0.0)))
    normal = tuple(float(c) for c in raw.get("normal", (0.0, 0.0, 1.0)))
    rotation = float(raw.get("rotation_rad", 0.0))
    counts = spacing = eta = None

    if geometry is Geometry.LINEAR:
        n_f = _number(raw, "N_f", sub, required=False, integer=True)
        eta = _number(raw, "eta", sub, required=False, integer=True)
        if n_f is None and eta is None:
            sub.append("N_f or eta: one is required for a linear grid")
        elif n is not None and eta is not None:
            if n < 2:
                sub.append("eta: needs N >= 2")
            else:
                from_eta = candidate_count(n, eta)
                if n_f is not None and n_f != from_eta:
                    sub.append(f"N_f: {n_f} disagrees with eta={eta} (gives {from_eta})")
                n_f = from_eta
        s = _number(raw, "spacing_m", sub, required=False)
        ap = _number(raw, "aperture_m", sub, required=False)
        if s is not None and ap is not None:
            sub.append("spacing_m and aperture_m are mutually exclusive")
        elif n_f is not None:
            if s is None and ap is not None:
                s = ap / (n_f - 1) if n_f > 1 else ap
            elif s is None and eta is not None and design_distance is not None and n is not None:
                s = ula_spacing(lam, design_distance, n) / eta
            elif s is None:
                sub.append("spacing_m, aperture_m, or eta with D_star_m: one is required")
            if s is not None:
                counts, spacing = (n_f,), (s,)
    elif geometry is Geometry.PLANAR:
        c = raw.get("counts")
        if not (isinstance(c, (list, tuple)) and len(c) == 2 and all(isinstance(x, int) and x >= 1 for x in c)):
            sub.append("counts: expected two positive integers [nx, ny]")
        else:
            counts = tuple(c)
        s = raw.get("spacing_m")
        s = [s, s] if isinstance(s, (int, float)) else s
        if not (isinstance(s, (list, tuple)) and len(s) == 2 and all(isinstance(x, (int, float)) and x > 0 for x in s)):
            sub.append("spacing_m: expected a positive number or [sx, sy]")
        else:
            spacing = tuple(float(x) for x in s)
    elif geometry is Geometry.CIRCULAR:
        n_f = _number(raw, "N_f", sub, integer=True)
        radius = _number(raw, "radius_m", sub)
        if n_f is not None and radius is not None:
            counts, spacing = (n_f,), (radius,)

    problems.extend(f"{side}.{p}" for p in sub)
    if sub or counts is None or spacing is None:
        return None
    grid = GridSpec(geometry, counts, spacing, center=center, normal=normal, rotation=rotation, label=f"{side}_grid")
    return ArraySpec(geometry, n, grid, eta)


def parse_config(raw, base_dir=None, validate: bool = True) -> RunConfig:
    """Validate a decoded config mapping and build a :class:`RunConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError(["top level: expected a mapping"])
    problems: list[str] = []
    for key in sorted(set(raw) - _TOP_KEYS):
        problems.append(f"{key}: unknown key")
    version = raw.get("schema_version")
    if version != SCHEMA_VERSION:
        problems.append(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")

    fc = _number(raw, "carrier_frequency_hz", problems)
    snr_db = _number(raw, "snr_db", problems, positive=False)
    design_distance = _number(raw, "D_star_m", problems, required=False)

    rng = raw.get("range")
    d_min = d_max = d_step = None
    if not isinstance(rng, dict):
        problems.append("range: expected a mapping with min_m, max_m, step_m")
    else:
        sub: list[str] = []
        d_min = _number(rng, "min_m", sub)
        d_max = _number(rng, "max_m", sub)
        d_step = _number(rng, "step_m", sub)
        if not sub:
            try:
                quantize_range(d_min, d_max, d_step)
            except ValueError as exc:
                sub.append(str(exc))
        problems.extend(f"range.{p}" for p in sub)

    lam = wavelength(fc) if fc else None
    tx = _array_spec(raw.get("tx"), "tx", lam, design_distance, problems) if lam else None
    rx = _array_spec(raw.get("rx"), "rx", lam, design_distance, problems) if lam else None

    methods = raw.get("methods", list(METHODS))
    if isinstance(methods, str):
        methods = [methods]
    if not isinstance(methods, list) or not all(isinstance(m, str) for m in methods):
        problems.append("methods: expected a list of method names")
        methods = []

    solver_raw = raw.get("solver") or {}
    solver = SolverConfig()
    if not isinstance(solver_raw, dict):
        problems.append("solver: expected a mapping")
    else:
        known = {f.name for f in fields(SolverConfig)}
        bad = sorted(set(solver_raw) - known)
        if bad:
            problems.append(f"solver: unknown keys {bad}")
        else:
            try:
                solver = SolverConfig(**solver_raw)
            except (TypeError, ValueError) as exc:
                problems.append(f"solver: {exc}")

    swap_raw = raw.get("swap") or {}
    swap_repeat = bool(swap_raw.get("repeat", False)) if isinstance(swap_raw, dict) else False
    swap_target = swap_raw.get("target_bpcu") if isinstance(swap_raw, dict) else None
    if not isinstance(swap_raw, dict):
        problems.append("swap: expected a mapping")
    elif swap_target is not None and not isinstance(swap_target, (int, float)):
        problems.append("swap.target_bpcu: expected a number or null")

    es_raw = raw.get("es") or {}
    budget = EsBudget()
    if not isinstance(es_raw, dict):
        problems.append("es: expected a mapping")
    else:
        max_eval = _number(es_raw, "max_evaluations", problems, required=False)
        budget = EsBudget(int(max_eval) if max_eval else EsBudget().max_evaluations, bool(es_raw.get("force", False)))

    out = Path(raw.get("output_dir", "out"))
    if base_dir is not None and not out.is_absolute():
        out = Path(base_dir) / out

    if problems:
        raise ConfigError(problems)
    cfg = RunConfig(
        carrier_frequency_hz=float(fc),
        snr_db=float(snr_db),
        d_min=float(d_min),
        d_max=float(d_max),
        d_step=float(d_step),
        tx=tx,
        rx=rx,
        methods=tuple(methods),
        design_distance=None if design_distance is None else float(design_distance),
        solver=solver,
        swap_repeat=swap_repeat,
        swap_target=None if swap_target is None else float(swap_target),
        es_budget=budget,
        output_dir=out,
        plot=bool(raw.get("plot", False)),
    )
    if validate:
        cfg.validate()
    return cfg
