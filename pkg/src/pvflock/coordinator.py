"""Fleet coordination: turn a PV profile into per-building power bounds.

The aggregate target is a band around the current PV generation: when the
plant produces pv > 0 kW the fleet's total consumption must land inside
[max(0, pv - epsilon), pv + epsilon].  With n identical buildings the band
is divided evenly, so each building's electrical draw p = -u (COP 1, so
thermal extraction and electrical consumption coincide in magnitude) is
clamped to

    [pv/n - epsilon/n, pv/n + epsilon/n]  intersected with  [0, hvac_max].

Summing n values from the per-building interval can never leave the
aggregate band, which is the whole tracking argument: no optimization, no
communication beyond the shared bounds.  When pv = 0 the band is inert and
buildings regulate freely inside [0, hvac_max].  If the intersection above
is empty (PV so large that even hvac_max per building cannot absorb it)
the bounds collapse to the nearest feasible point and the step is flagged
infeasible.

Per control period and per building the order is fixed: ask the iP
controller for a raw control, clamp it to the bounds, integrate the plant
under the clamped value, then push the applied value into the controller's
estimator window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .control import IpController
from .errors import ConfigurationError, PlantDivergenceError
from .plant import (
    SANITY_RANGE,
    BuildingParams,
    BuildingState,
    DisturbanceSample,
    rk4_fleet,
)


@dataclass(frozen=True)
class FleetConfig:
    """Sizing and timing shared by every building in the fleet."""

    n_buildings: int = 13
    epsilon: float = 1.0
    hvac_max: float = 3.0
    sample_dt: float = 1.0 / 6.0

    def __post_init__(self) -> None:
        if self.n_buildings < 1:
            raise ConfigurationError("n_buildings must be >= 1")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ConfigurationError("epsilon must be positive")
        if not (self.hvac_max > 0 and math.isfinite(self.hvac_max)):
            raise ConfigurationError("hvac_max must be positive")
        if not (self.sample_dt > 0 and math.isfinite(self.sample_dt)):
            raise ConfigurationError("sample_dt must be positive")


@dataclass(frozen=True)
class PowerBand:
    """Aggregate consumption band for one step (kW)."""

    lower: float
    upper: float
    pv_active: bool


@dataclass(frozen=True)
class BuildingBounds:
    """Per-building electrical bounds for one step (kW)."""

    lower: float
    upper: float
    infeasible: bool = False


@dataclass
class StepRecord:
    """Everything the trace keeps for one control period.

    Temperatures are the measurements at t (before actuation); u/p are the
    controls applied over [t, t + dt).
    """

    t: float
    pv: float
    band: PowerBand
    infeasible: bool
    t1: list[float] = field(default_factory=list)
    t2: list[float] = field(default_factory=list)
    t3: list[float] = field(default_factory=list)
    u: list[float] = field(default_factory=list)
    p: list[float] = field(default_factory=list)
    clamped: list[bool] = field(default_factory=list)

    @property
    def sum_p(self) -> float:
        return sum(self.p)


def power_band(pv: float, epsilon: float) -> PowerBand:
    """Aggregate band for the current PV output."""
    if not (math.isfinite(pv) and pv >= 0):
        raise ConfigurationError(f"pv must be finite and >= 0, got {pv}")
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise ConfigurationError("epsilon must be positive")
    if pv == 0:
        return PowerBand(lower=0.0, upper=0.0, pv_active=False)
    return PowerBand(lower=max(0.0, pv - epsilon), upper=pv + epsilon, pv_active=True)


def per_building_bounds(band: PowerBand, cfg: FleetConfig) -> BuildingBounds:
    """Split the aggregate band evenly and intersect with the HVAC range."""
    if not band.pv_active:
        return BuildingBounds(lower=0.0, upper=cfg.hvac_max)
    n = cfg.n_buildings
    pv = band.upper - cfg.epsilon  # band.upper is always pv + epsilon
    raw_lo = (pv - cfg.epsilon) / n
    raw_hi = (pv + cfg.epsilon) / n
    lo = max(0.0, raw_lo)
    hi = min(raw_hi, cfg.hvac_max)
    if lo > hi:
        # PV beyond what the fleet can absorb: pin to the nearest limit.
        if raw_lo > cfg.hvac_max:
            return BuildingBounds(lower=cfg.hvac_max, upper=cfg.hvac_max, infeasible=True)
        return BuildingBounds(lower=0.0, upper=0.0, infeasible=True)
    return BuildingBounds(lower=lo, upper=hi)


def clamp_to_bounds(u_raw: float, b: BuildingBounds) -> tuple[float, float, bool]:
    """Project a raw thermal control onto the electrical bounds.

    Returns (p, u_applied, clamped) with p = -u_applied in [b.lower, b.upper].
    A positive u_raw (a heating wish) maps to the smallest admissible draw.
    """
    if not math.isfinite(u_raw):
        raise ConfigurationError("u_raw must be finite")
    p_want = -u_raw
    p = min(max(p_want, b.lower), b.upper)
    return p, -p, p != p_want


def coordinator_step(
    fleet: list[tuple[IpController, BuildingState]],
    pv: float,
    w: DisturbanceSample,
    cfg: FleetConfig,
    t: float,
    params: BuildingParams,
    substeps: int = 10,
) -> StepRecord:
    """Advance every building by one control period; states mutate in place.

    Raises PlantDivergenceError naming the offending building if any state
    leaves the sane temperature range.
    """
    if len(fleet) != cfg.n_buildings:
        raise ConfigurationError(
            f"fleet has {len(fleet)} buildings, config says {cfg.n_buildings}"
        )
    band = power_band(pv, cfg.epsilon)
    bounds = per_building_bounds(band, cfg)
    record = StepRecord(t=t, pv=pv, band=band, infeasible=bounds.infeasible)

    controls = np.empty(len(fleet))
    states = np.empty((3, len(fleet)))
    for i, (ctrl, state) in enumerate(fleet):
        u_raw = ctrl.step(state.t1, t)
        p, u_applied, clamped = clamp_to_bounds(u_raw, bounds)
        record.t1.append(state.t1)
        record.t2.append(state.t2)
        record.t3.append(state.t3)
        record.u.append(u_applied)
        record.p.append(p)
        record.clamped.append(clamped)
        controls[i] = u_applied
        states[0, i] = state.t1
        states[1, i] = state.t2
        states[2, i] = state.t3

    advanced = rk4_fleet(states, controls, w, params, cfg.sample_dt, substeps)

    lo, hi = SANITY_RANGE
    for i, (ctrl, state) in enumerate(fleet):
        t1, t2, t3 = advanced[:, i]
        if not all(math.isfinite(v) and lo <= v <= hi for v in (t1, t2, t3)):
            raise PlantDivergenceError(
                f"building {i} left the sane range at t = {t + cfg.sample_dt:.4f} h "
                f"(T = {t1:.2f}, {t2:.2f}, {t3:.2f})"
            )
        state.t1, state.t2, state.t3 = float(t1), float(t2), float(t3)
        ctrl.record_applied(record.u[i])

    return record
