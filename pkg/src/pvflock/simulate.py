"""Fleet simulation driver, trace serialization and scenario metrics.

A run wires N identical buildings (each with its own iP controller) to the
coordinator and marches the configured horizon at the control rate.  Initial
air temperatures are drawn uniformly from the configured range with a seeded
generator; interior mass starts at the air temperature and the wall core one
degree above, so a hot start really is a hot building.

The trace CSV layout (one row per control period, LF line endings, floats at
6 significant digits):

    t_hours,pv_kw,sum_p_kw,band_lo_kw,band_hi_kw,infeasible,
    then per building i (1-based): T1_i,T2_i,T3_i,u_i_kw,p_i_kw,clamped_i

A (config, seed) pair fully determines every byte of the trace.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .control import IpController
from .coordinator import StepRecord, coordinator_step
from .errors import ProfileError
from .plant import BuildingState
from .scenario import (
    Profile,
    ScenarioConfig,
    load_profile_csv,
    synth_disturbances,
    synth_pv,
)


@dataclass
class SimulationTrace:
    """Column-oriented record of a run; arrays are (steps,) or (steps, n)."""

    n_buildings: int
    t: np.ndarray
    pv: np.ndarray
    sum_p: np.ndarray
    band_lo: np.ndarray
    band_hi: np.ndarray
    infeasible: np.ndarray
    t1: np.ndarray
    t2: np.ndarray
    t3: np.ndarray
    u: np.ndarray
    p: np.ndarray
    clamped: np.ndarray

    @property
    def n_steps(self) -> int:
        return len(self.t)

    @classmethod
    def from_records(cls, records: list[StepRecord], n_buildings: int) -> "SimulationTrace":
        def col(getter):
            return np.array([getter(r) for r in records], dtype=float)

        def grid(getter):
            out = np.array([getter(r) for r in records], dtype=float)
            return out.reshape(len(records), n_buildings)

        return cls(
            n_buildings=n_buildings,
            t=col(lambda r: r.t),
            pv=col(lambda r: r.pv),
            sum_p=col(lambda r: r.sum_p),
            band_lo=col(lambda r: r.band.lower),
            band_hi=col(lambda r: r.band.upper),
            infeasible=np.array([r.infeasible for r in records], dtype=bool),
            t1=grid(lambda r: r.t1),
            t2=grid(lambda r: r.t2),
            t3=grid(lambda r: r.t3),
            u=grid(lambda r: r.u),
            p=grid(lambda r: r.p),
            clamped=np.array([r.clamped for r in records], dtype=bool).reshape(
                len(records), n_buildings
            ),
        )


def _empty_trace(n_buildings: int) -> SimulationTrace:
    z = np.zeros(0)
    zg = np.zeros((0, n_buildings))
    return SimulationTrace(
        n_buildings=n_buildings,
        t=z, pv=z.copy(), sum_p=z.copy(), band_lo=z.copy(), band_hi=z.copy(),
        infeasible=np.zeros(0, dtype=bool),
        t1=zg, t2=zg.copy(), t3=zg.copy(), u=zg.copy(), p=zg.copy(),
        clamped=np.zeros((0, n_buildings), dtype=bool),
    )


def build_fleet(cfg: ScenarioConfig) -> list[tuple[IpController, BuildingState]]:
    """Instantiate controllers and seeded initial states for every building."""
    rng = np.random.default_rng(cfg.seed)
    t1_init = rng.uniform(cfg.initial_t1_low, cfg.initial_t1_high, cfg.fleet.n_buildings)
    fleet = []
    for t1 in t1_init:
        ctrl = IpController(
            alpha=cfg.alpha,
            kp=cfg.kp,
            setpoint=cfg.setpoint,
            dt=cfg.fleet.sample_dt,
            window_capacity=cfg.window_capacity,
            estimator=cfg.estimator,
            ramp_hours=cfg.ramp_hours,
        )
        state = BuildingState(t1=float(t1), t2=float(t1), t3=float(t1) + 1.0)
        fleet.append((ctrl, state))
    return fleet


def _pv_lookup(cfg: ScenarioConfig):
    if cfg.pv.kind == "off":
        return lambda t: 0.0
    if cfg.pv.kind == "csv":
        profile: Profile = load_profile_csv(cfg.pv.csv_path, non_negative=True)
        return profile.value_at
    peak = cfg.pv.peak
    return lambda t: synth_pv(t, peak)


def run_simulation(cfg: ScenarioConfig, seed: int | None = None) -> SimulationTrace:
    """Run the configured scenario; an explicit seed overrides the config's."""
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    n = cfg.fleet.n_buildings
    if cfg.n_steps == 0:
        return _empty_trace(n)
    fleet = build_fleet(cfg)
    pv_at = _pv_lookup(cfg)
    dt = cfg.fleet.sample_dt
    records: list[StepRecord] = []
    for k in range(cfg.n_steps):
        t = k * dt
        pv = pv_at(t)
        w = synth_disturbances(t, cfg.disturbance)
        records.append(
            coordinator_step(fleet, pv, w, cfg.fleet, t, cfg.building, cfg.substeps)
        )
    return SimulationTrace.from_records(records, n)


# ---------------------------------------------------------------------------
# metrics

#: slack added to the epsilon comparison so boundary-clamped steps are not
#: misclassified by accumulated rounding
_EPS_SLACK = 1e-9


@dataclass(frozen=True)
class MetricsReport:
    """Scenario-level summary; tracking fields are None when PV never ran."""

    empty: bool
    comfort_violation_steps: int
    comfort_max_depth: float
    tracking_rms: float | None
    tracking_within_eps_pct: float | None
    peak_sum_p: float
    infeasible_steps: int

    def lines(self) -> list[str]:
        def fmt(value) -> str:
            if value is None:
                return "n/a"
            if isinstance(value, (bool, np.bool_)):
                return str(bool(value)).lower()
            if isinstance(value, (int, np.integer)):
                return str(int(value))
            return f"{value:.6g}"

        return [
            f"empty={fmt(self.empty)}",
            f"comfort_violation_steps={fmt(self.comfort_violation_steps)}",
            f"comfort_max_depth_c={fmt(self.comfort_max_depth)}",
            f"tracking_rms_kw={fmt(self.tracking_rms)}",
            f"tracking_within_eps_pct={fmt(self.tracking_within_eps_pct)}",
            f"peak_sum_p_kw={fmt(self.peak_sum_p)}",
            f"infeasible_steps={fmt(self.infeasible_steps)}",
        ]


def compute_metrics(
    trace: SimulationTrace, cfg: ScenarioConfig, transient_hours: float | None = None
) -> MetricsReport:
    """Summarize comfort and tracking over a trace.

    Comfort counts building-steps with T1 outside [comfort_low, comfort_high]
    after the start-up transient.  Tracking statistics cover PV-active steps
    only and are reported as not-applicable when PV never produced.
    """
    if transient_hours is None:
        transient_hours = cfg.transient_hours
    if trace.n_steps == 0:
        return MetricsReport(
            empty=True,
            comfort_violation_steps=0,
            comfort_max_depth=0.0,
            tracking_rms=None,
            tracking_within_eps_pct=None,
            peak_sum_p=0.0,
            infeasible_steps=0,
        )

    settled = trace.t >= transient_hours
    t1 = trace.t1[settled]
    below = np.maximum(cfg.comfort_low - t1, 0.0)
    above = np.maximum(t1 - cfg.comfort_high, 0.0)
    depth = np.maximum(below, above)
    violation_steps = int(np.count_nonzero(depth > 0))
    max_depth = float(depth.max()) if depth.size else 0.0

    active = trace.pv > 0
    if np.any(active):
        err = trace.sum_p[active] - trace.pv[active]
        rms = float(np.sqrt(np.mean(err**2)))
        within = float(
            100.0 * np.mean(np.abs(err) <= cfg.fleet.epsilon + _EPS_SLACK)
        )
    else:
        rms = None
        within = None

    return MetricsReport(
        empty=False,
        comfort_violation_steps=violation_steps,
        comfort_max_depth=max_depth,
        tracking_rms=rms,
        tracking_within_eps_pct=within,
        peak_sum_p=float(trace.sum_p.max()),
        infeasible_steps=int(np.count_nonzero(trace.infeasible)),
    )


# ---------------------------------------------------------------------------
# trace serialization

def _g6(value: float) -> str:
    return f"{value:.6g}"


def trace_header(n_buildings: int) -> str:
    cols = ["t_hours", "pv_kw", "sum_p_kw", "band_lo_kw", "band_hi_kw", "infeasible"]
    for i in range(1, n_buildings + 1):
        cols += [f"T1_{i}", f"T2_{i}", f"T3_{i}", f"u_{i}_kw", f"p_{i}_kw", f"clamped_{i}"]
    return ",".join(cols)


def write_trace(trace: SimulationTrace, path: str | Path) -> None:
    """Serialize a trace; floats at 6 significant digits, flags as 0/1, LF."""
    lines = [trace_header(trace.n_buildings)]
    for k in range(trace.n_steps):
        row = [
            _g6(trace.t[k]),
            _g6(trace.pv[k]),
            _g6(trace.sum_p[k]),
            _g6(trace.band_lo[k]),
            _g6(trace.band_hi[k]),
            str(int(trace.infeasible[k])),
        ]
        for i in range(trace.n_buildings):
            row += [
                _g6(trace.t1[k, i]),
                _g6(trace.t2[k, i]),
                _g6(trace.t3[k, i]),
                _g6(trace.u[k, i]),
                _g6(trace.p[k, i]),
                str(int(trace.clamped[k, i])),
            ]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def read_trace(path: str | Path) -> SimulationTrace:
    """Load a trace CSV back into arrays (used by the metrics subcommand)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ProfileError(f"cannot read trace {path}: {exc}") from exc
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ProfileError(f"{path}: empty file, not a trace")
    header = lines[0].split(",")
    if len(header) < 6 or header[:6] != [
        "t_hours", "pv_kw", "sum_p_kw", "band_lo_kw", "band_hi_kw", "infeasible",
    ]:
        raise ProfileError(f"{path}: unrecognized trace header")
    per_building = len(header) - 6
    if per_building % 6 != 0:
        raise ProfileError(f"{path}: trace header has a partial building group")
    n = per_building // 6
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(header):
            raise ProfileError(f"{path}:{lineno}: expected {len(header)} fields")
        try:
            rows.append([float(x) for x in parts])
        except ValueError as exc:
            raise ProfileError(f"{path}:{lineno}: non-numeric field: {exc}") from exc
    data = np.array(rows, dtype=float) if rows else np.zeros((0, len(header)))
    group = data[:, 6:].reshape(len(rows), n, 6) if n else np.zeros((len(rows), 0, 6))
    return SimulationTrace(
        n_buildings=n,
        t=data[:, 0],
        pv=data[:, 1],
        sum_p=data[:, 2],
        band_lo=data[:, 3],
        band_hi=data[:, 4],
        infeasible=data[:, 5] != 0,
        t1=group[:, :, 0],
        t2=group[:, :, 1],
        t3=group[:, :, 2],
        u=group[:, :, 3],
        p=group[:, :, 4],
        clamped=group[:, :, 5] != 0,
    )
