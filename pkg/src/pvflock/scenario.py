"""Scenario assembly: synthetic profiles, CSV profiles and the config file.

The synthetic day used by the fleet simulations:

    outdoor temp   d1(h) = d1_mean + d1_amp * sin(2*pi*(h - 9)/24)     (peak ~15:00)
    solar gain     d2(h) = d2_peak * max(0, sin(pi*(h - 6)/14))^2      for h in [6, 20]
    internal gain  d3(h) = d3_day for h in [8, 18], else d3_night
    pv output      pv(h) = peak * max(0, sin(pi*(h - 6)/14))^2         for h in [6, 20]

with h = t mod 24.  Real measurements can replace the PV shape through a
two-column CSV (header "t_hours,value", uniform time grid, linear
interpolation between rows).

The fleet's default building is a residential-scale realization of the RC
structure in plant.py, sized so that a 0..3 kW cooling unit has real
authority over the air node (3600/c1 = 2.4 degC/h per kW, the same order
as the controller gain alpha = 5) while interior mass and wall core filter
the day on multi-hour scales.  The literature office-scale constants remain
available via the `building.` config section.

Config files are flat "section.key = value" text; see CONFIG_KEYS for the
schema.  Unknown keys are rejected so typos cannot silently fall back to
defaults.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .coordinator import FleetConfig
from .control import Estimator
from .errors import ConfigurationError, ProfileError
from .plant import BuildingParams, DisturbanceSample


def scenario_building_defaults() -> BuildingParams:
    """Residential-scale RC constants used by the fleet simulations."""
    return BuildingParams(
        c1=1500.0,
        c2=6000.0,
        c3=4500.0,
        k1=0.25,
        k2=0.65,
        k3=5.0,
        k4=0.035,
        k5=0.12,
    )


@dataclass(frozen=True)
class DisturbanceParams:
    """Magnitudes of the synthetic disturbance day."""

    d1_mean: float = 28.0
    d1_amp: float = 6.0
    d2_peak: float = 0.04
    d3_day: float = 0.1
    d3_night: float = 0.05

    def __post_init__(self) -> None:
        for name in ("d1_mean", "d1_amp", "d2_peak", "d3_day", "d3_night"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"{name} must be finite")
        if self.d2_peak < 0 or self.d3_day < 0 or self.d3_night < 0:
            raise ConfigurationError("gain magnitudes must be >= 0")


def _solar_shape(h: float) -> float:
    if not 6.0 <= h <= 20.0:
        return 0.0
    return max(0.0, math.sin(math.pi * (h - 6.0) / 14.0)) ** 2


def synth_disturbances(t: float, params: DisturbanceParams) -> DisturbanceSample:
    """Disturbance triple at time t (hours, 24 h periodic)."""
    h = t % 24.0
    d1 = params.d1_mean + params.d1_amp * math.sin(2.0 * math.pi * (h - 9.0) / 24.0)
    d2 = params.d2_peak * _solar_shape(h)
    d3 = params.d3_day if 8.0 <= h <= 18.0 else params.d3_night
    return DisturbanceSample(d1=d1, d2=d2, d3=d3)


def synth_pv(t: float, peak: float) -> float:
    """Synthetic PV output (kW) at time t, same bell as the solar gain."""
    if not (peak >= 0 and math.isfinite(peak)):
        raise ConfigurationError("pv peak must be >= 0 and finite")
    return peak * _solar_shape(t % 24.0)


class Profile:
    """Uniformly sampled scalar profile with linear interpolation."""

    def __init__(self, t: np.ndarray, values: np.ndarray):
        if len(t) < 2:
            raise ProfileError("profile needs at least two rows")
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise ProfileError("profile times must be strictly increasing")
        # 0.01% relative slack absorbs decimal rounding of the time column
        # (e.g. a 10-minute grid written as 0.166667) without letting a
        # genuinely irregular grid through
        mean_dt = float(dt.mean())
        if np.any(np.abs(dt - mean_dt) > 1e-4 * mean_dt):
            raise ProfileError("profile times must be uniformly spaced")
        self.t = np.asarray(t, dtype=float)
        self.values = np.asarray(values, dtype=float)

    @property
    def span(self) -> tuple[float, float]:
        return float(self.t[0]), float(self.t[-1])

    def value_at(self, t: float) -> float:
        lo, hi = self.span
        if t < lo or t > hi:
            raise ProfileError(f"query t = {t} h outside the profile span [{lo}, {hi}] h")
        return float(np.interp(t, self.t, self.values))


def load_profile_csv(path: str | Path, *, non_negative: bool = False) -> Profile:
    """Read a "t_hours,value" CSV; optionally reject negative values (PV)."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as exc:
        raise ProfileError(f"cannot read profile {path}: {exc}") from exc
    lines = [ln.strip() for ln in raw.splitlines() if ln.strip()]
    if not lines or lines[0].replace(" ", "") != "t_hours,value":
        raise ProfileError(f"{path}: first line must be the header 't_hours,value'")
    times: list[float] = []
    values: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 2:
            raise ProfileError(f"{path}:{lineno}: expected 't,value', got {line!r}")
        try:
            t = float(parts[0])
            v = float(parts[1])
        except ValueError as exc:
            raise ProfileError(f"{path}:{lineno}: non-numeric row {line!r}") from exc
        if not (math.isfinite(t) and math.isfinite(v)):
            raise ProfileError(f"{path}:{lineno}: non-finite row {line!r}")
        if non_negative and v < 0:
            raise ProfileError(f"{path}:{lineno}: negative value {v} not allowed here")
        times.append(t)
        values.append(v)
    return Profile(np.array(times), np.array(values))


@dataclass(frozen=True)
class PvSourceConfig:
    """Where the PV profile comes from: 'synthetic' (peak) or 'csv' (path)."""

    kind: str = "synthetic"
    peak: float = 12.0
    csv_path: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("synthetic", "csv", "off"):
            raise ConfigurationError(f"pv.source must be synthetic, csv or off, got {self.kind!r}")
        if self.kind == "synthetic" and not (self.peak >= 0 and math.isfinite(self.peak)):
            raise ConfigurationError("pv.peak_kw must be >= 0")
        if self.kind == "csv" and not self.csv_path:
            raise ConfigurationError("pv.source = csv requires pv.csv_path")


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a simulation run needs; defaults describe the headline fleet day."""

    fleet: FleetConfig = field(default_factory=FleetConfig)
    building: BuildingParams = field(default_factory=scenario_building_defaults)
    disturbance: DisturbanceParams = field(default_factory=DisturbanceParams)
    pv: PvSourceConfig = field(default_factory=PvSourceConfig)
    horizon: float = 72.0
    setpoint: float = 23.0
    comfort_low: float = 22.0
    comfort_high: float = 24.0
    transient_hours: float = 6.0
    alpha: float = 5.0
    kp: float = 2.0
    window_capacity: int = 3
    estimator: Estimator = Estimator.ALGEBRAIC
    ramp_hours: float = 0.0
    initial_t1_low: float = 22.5
    initial_t1_high: float = 26.5
    seed: int = 1
    substeps: int = 10
    output_path: str = "trace.csv"

    def __post_init__(self) -> None:
        if self.horizon < 0 or not math.isfinite(self.horizon):
            raise ConfigurationError("horizon must be >= 0")
        steps = self.horizon / self.fleet.sample_dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ConfigurationError("horizon must be a multiple of the sampling interval")
        if not self.comfort_low < self.setpoint < self.comfort_high:
            raise ConfigurationError("need comfort_low < setpoint < comfort_high")
        if self.initial_t1_low > self.initial_t1_high:
            raise ConfigurationError("initial temperature range is inverted")
        if self.transient_hours < 0:
            raise ConfigurationError("transient_hours must be >= 0")
        if self.substeps < 1:
            raise ConfigurationError("substeps must be >= 1")
        if self.window_capacity < 3 or self.window_capacity % 2 == 0:
            raise ConfigurationError("window_capacity must be odd and >= 3")

    @property
    def n_steps(self) -> int:
        return round(self.horizon / self.fleet.sample_dt)


# ---------------------------------------------------------------------------
# config file parsing

def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _parse_estimator(raw: str) -> Estimator:
    try:
        return Estimator(raw.lower())
    except ValueError:
        raise ValueError(f"unknown estimator {raw!r} (algebraic or closed_loop)") from None


#: config key -> (target object, attribute, parser)
CONFIG_KEYS: dict[str, tuple[str, str, type | object]] = {
    "scenario.horizon_hours": ("", "horizon", float),
    "scenario.setpoint_c": ("", "setpoint", float),
    "scenario.comfort_low_c": ("", "comfort_low", float),
    "scenario.comfort_high_c": ("", "comfort_high", float),
    "scenario.transient_hours": ("", "transient_hours", float),
    "scenario.ramp_hours": ("", "ramp_hours", float),
    "scenario.initial_t1_low_c": ("", "initial_t1_low", float),
    "scenario.initial_t1_high_c": ("", "initial_t1_high", float),
    "scenario.seed": ("", "seed", int),
    "scenario.substeps": ("", "substeps", int),
    "fleet.n_buildings": ("fleet", "n_buildings", int),
    "fleet.epsilon_kw": ("fleet", "epsilon", float),
    "fleet.hvac_max_kw": ("fleet", "hvac_max", float),
    "fleet.sample_dt_hours": ("fleet", "sample_dt", float),
    "controller.alpha": ("", "alpha", float),
    "controller.kp": ("", "kp", float),
    "controller.window_capacity": ("", "window_capacity", int),
    "controller.estimator": ("", "estimator", _parse_estimator),
    "building.c1": ("building", "c1", float),
    "building.c2": ("building", "c2", float),
    "building.c3": ("building", "c3", float),
    "building.k1": ("building", "k1", float),
    "building.k2": ("building", "k2", float),
    "building.k3": ("building", "k3", float),
    "building.k4": ("building", "k4", float),
    "building.k5": ("building", "k5", float),
    "disturbance.d1_mean_c": ("disturbance", "d1_mean", float),
    "disturbance.d1_amp_c": ("disturbance", "d1_amp", float),
    "disturbance.d2_peak_kw": ("disturbance", "d2_peak", float),
    "disturbance.d3_day_kw": ("disturbance", "d3_day", float),
    "disturbance.d3_night_kw": ("disturbance", "d3_night", float),
    "pv.source": ("pv", "kind", str),
    "pv.peak_kw": ("pv", "peak", float),
    "pv.csv_path": ("pv", "csv_path", str),
    "output.path": ("", "output_path", str),
}


def parse_config_text(text: str, origin: str = "<config>") -> ScenarioConfig:
    """Parse flat "section.key = value" lines into a ScenarioConfig."""
    top: dict[str, object] = {}
    nested: dict[str, dict[str, object]] = {
        "fleet": {},
        "building": {},
        "disturbance": {},
        "pv": {},
    }
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{origin}:{lineno}: expected 'key = value', got {raw_line!r}")
        key, _, raw_value = line.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in CONFIG_KEYS:
            raise ConfigurationError(f"{origin}:{lineno}: unknown config key {key!r}")
        target, attr, parser = CONFIG_KEYS[key]
        try:
            value = parser(raw_value)  # type: ignore[operator]
        except (ValueError, TypeError) as exc:
            raise ConfigurationError(f"{origin}:{lineno}: bad value for {key}: {exc}") from exc
        if target:
            nested[target][attr] = value
        else:
            top[attr] = value
    try:
        fleet = replace(FleetConfig(), **nested["fleet"])
        building = replace(scenario_building_defaults(), **nested["building"])
        disturbance = replace(DisturbanceParams(), **nested["disturbance"])
        pv = replace(PvSourceConfig(), **nested["pv"])
        return ScenarioConfig(
            fleet=fleet, building=building, disturbance=disturbance, pv=pv, **top
        )
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"{origin}: {exc}") from exc


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a config file; an empty file yields pure defaults."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    return parse_config_text(text, origin=str(path))
