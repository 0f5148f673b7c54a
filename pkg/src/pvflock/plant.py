"""Three-state RC thermal model of one building.

States are the room air temperature T1, an interior-mass temperature T2
(floors, partitions, furnishings) and a wall-core temperature T3.  Inputs
are the cooling power u (kW, <= 0 extracts heat) and the disturbance triple
w = (d1, d2, d3): outdoor temperature (degC), solar gain (kW) and internal
gain (kW).  With capacitances c1..c3 (kJ/degC) and conductances k1..k5
(kW/degC) the dynamics are, in degC per second,

    dT1/dt = [ (k1 + k2) * (T2 - T1) + k5 * (T3 - T1) + u + d2 + d3 ] / c1
    dT2/dt = [ (k1 + k2) * (T1 - T2) + d2 ] / c2
    dT3/dt = [ k5 * (T1 - T3) + k4 * (d1 - T3) ] / c3

scaled by 3600 so the package-wide time base is hours.  The solar gain d2
feeds both the air and the mass node; k3 is carried for completeness but
does not enter the dynamics.  Default constants are the literature set for
a large office building; the scenario layer substitutes a residential-scale
set for the fleet simulations (see scenario.py).

Integration is classical RK4 with zero-order-hold inputs over each control
period, split into substeps so the fastest node stays well resolved.  The
model is linear, so dx/dt = A x + B u + C w with the matrices returned by
build_matrices(); the nonlinear-form derivative and the matrix form are
kept as two separately written routines and cross-checked in the tests.
Because the plant is linear and the inputs are held constant over the
period, the whole substep loop collapses to a single affine update
x+ = x + S (A x + f) whose matrix S rk4_fleet() precomputes once per
parameter set; the
plain per-substep loop is retained as rk4_fleet_reference() and the two
are cross-checked in the tests as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, PlantDivergenceError

#: temperatures outside this range mean the integration has gone nonsensical
SANITY_RANGE = (-20.0, 60.0)


@dataclass(frozen=True)
class BuildingParams:
    """RC constants: capacitances in kJ/degC, conductances in kW/degC."""

    c1: float = 9.356e5
    c2: float = 2.970e6
    c3: float = 6.695e5
    k1: float = 16.48
    k2: float = 108.5
    k3: float = 5.0  # unused by the dynamics, kept for structural fidelity
    k4: float = 30.5
    k5: float = 23.04

    def __post_init__(self) -> None:
        for name in ("c1", "c2", "c3"):
            if not (getattr(self, name) > 0 and math.isfinite(getattr(self, name))):
                raise ConfigurationError(f"{name} must be positive and finite")
        for name in ("k1", "k2", "k4", "k5"):
            if not (getattr(self, name) > 0 and math.isfinite(getattr(self, name))):
                raise ConfigurationError(f"{name} must be positive and finite")


@dataclass
class BuildingState:
    """Node temperatures in degC."""

    t1: float
    t2: float
    t3: float

    def as_array(self) -> np.ndarray:
        return np.array([self.t1, self.t2, self.t3], dtype=float)


@dataclass(frozen=True)
class DisturbanceSample:
    """Exogenous inputs at one instant: outdoor temp, solar gain, internal gain."""

    d1: float
    d2: float
    d3: float

    def __post_init__(self) -> None:
        for name in ("d1", "d2", "d3"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigurationError(f"disturbance {name} must be finite")
        if self.d2 < 0 or self.d3 < 0:
            raise ConfigurationError("heat gains d2 and d3 must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.d1, self.d2, self.d3], dtype=float)


def plant_derivative(
    x: BuildingState, u: float, w: DisturbanceSample, p: BuildingParams
) -> tuple[float, float, float]:
    """Right-hand side in degC per hour, written straight from the ODEs."""
    k12 = p.k1 + p.k2
    dt1 = (k12 * (x.t2 - x.t1) + p.k5 * (x.t3 - x.t1) + u + w.d2 + w.d3) / p.c1
    dt2 = (k12 * (x.t1 - x.t2) + w.d2) / p.c2
    dt3 = (p.k5 * (x.t1 - x.t3) + p.k4 * (w.d1 - x.t3)) / p.c3
    return 3600.0 * dt1, 3600.0 * dt2, 3600.0 * dt3


def build_matrices(p: BuildingParams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """State-space form dx/dt = A x + B u + C w, per-hour units.

    A is 3x3, B is the length-3 input vector, C maps (d1, d2, d3).
    """
    k12 = p.k1 + p.k2
    a = np.array(
        [
            [-(k12 + p.k5) / p.c1, k12 / p.c1, p.k5 / p.c1],
            [k12 / p.c2, -k12 / p.c2, 0.0],
            [p.k5 / p.c3, 0.0, -(p.k5 + p.k4) / p.c3],
        ]
    )
    b = np.array([1.0 / p.c1, 0.0, 0.0])
    c = np.array(
        [
            [0.0, 1.0 / p.c1, 1.0 / p.c1],
            [0.0, 1.0 / p.c2, 0.0],
            [p.k4 / p.c3, 0.0, 0.0],
        ]
    )
    return 3600.0 * a, 3600.0 * b, 3600.0 * c


@lru_cache(maxsize=16)
def _transition_map(p: BuildingParams, dt: float, substeps: int) -> np.ndarray:
    """Precomputed RK4 update over one control period, in increment form.

    For the linear plant with constant forcing f = B u + C w, one RK4
    substep of size h is exactly the affine map

        x+ = phi x + gamma f,   phi = I + P + P^2/2 + P^3/6 + P^4/24,
                                gamma = h (I + P/2 + P^2/6 + P^3/24),

    with P = h A; note phi = I + gamma A.  Chaining n substeps gives
    x+ = M x + S f with M = phi^n and S = (phi^(n-1) + ... + I) gamma, and
    M = I + S A carries over, so the whole period is the increment

        x+ = x + S (A x + f).

    This is the same polynomial a per-substep loop evaluates, just without
    the loop, and the increment form makes any state where the derivative
    evaluates to exactly zero an exact fixed point of the update.
    """
    a, _, _ = build_matrices(p)
    h = dt / substeps
    eye = np.eye(3)
    pw = h * a
    phi = eye + pw + pw @ pw / 2.0 + pw @ pw @ pw / 6.0 + pw @ pw @ pw @ pw / 24.0
    gamma = h * (eye + pw / 2.0 + pw @ pw / 6.0 + pw @ pw @ pw / 24.0)
    s = np.zeros((3, 3))
    for _ in range(substeps):
        s = phi @ s + gamma
    s.setflags(write=False)
    return s


def rk4_fleet(
    states: np.ndarray,
    u: np.ndarray,
    w: DisturbanceSample,
    p: BuildingParams,
    dt: float,
    substeps: int,
) -> np.ndarray:
    """Advance a (3, n) block of building states by dt hours under ZOH inputs.

    All buildings share the parameter set and the disturbance; u is one
    control per building.  Returns a new array.  Evaluates the classical
    RK4 substep recursion through the precomputed transition map.
    """
    if substeps < 1:
        raise ConfigurationError("substeps must be >= 1")
    a, b, c = build_matrices(p)
    forcing = (b[:, None] * u[None, :]) + (c @ w.as_array())[:, None]
    s = _transition_map(p, float(dt), int(substeps))
    return states + s @ (a @ states + forcing)


def rk4_fleet_reference(
    states: np.ndarray,
    u: np.ndarray,
    w: DisturbanceSample,
    p: BuildingParams,
    dt: float,
    substeps: int,
) -> np.ndarray:
    """Plain per-substep RK4 loop, kept as an independent route.

    Same contract as rk4_fleet(); the tests check the two stay within
    floating-point noise of each other.
    """
    if substeps < 1:
        raise ConfigurationError("substeps must be >= 1")
    a, b, c = build_matrices(p)
    forcing = (b[:, None] * u[None, :]) + (c @ w.as_array())[:, None]

    def deriv(x: np.ndarray) -> np.ndarray:
        return a @ x + forcing

    h = dt / substeps
    x = states.astype(float, copy=True)
    for _ in range(substeps):
        k1 = deriv(x)
        k2 = deriv(x + 0.5 * h * k1)
        k3 = deriv(x + 0.5 * h * k2)
        k4 = deriv(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def plant_step(
    x: BuildingState,
    u: float,
    w: DisturbanceSample,
    p: BuildingParams,
    dt: float,
    substeps: int = 10,
) -> BuildingState:
    """One ZOH control period of RK4 integration for a single building."""
    if not (dt > 0 and math.isfinite(dt)):
        raise ConfigurationError("dt must be positive and finite")
    out = rk4_fleet(x.as_array()[:, None], np.array([u], dtype=float), w, p, dt, substeps)
    state = BuildingState(t1=float(out[0, 0]), t2=float(out[1, 0]), t3=float(out[2, 0]))
    check_sane(state)
    return state


def check_sane(state: BuildingState) -> None:
    lo, hi = SANITY_RANGE
    for name, value in (("T1", state.t1), ("T2", state.t2), ("T3", state.t3)):
        if not (math.isfinite(value) and lo <= value <= hi):
            raise PlantDivergenceError(
                f"{name} = {value} left the sane range [{lo}, {hi}] degC"
            )


def equilibrium(
    u: float, w: DisturbanceSample, p: BuildingParams
) -> BuildingState:
    """Steady state for constant inputs: x = -A^-1 (B u + C w)."""
    a, b, c = build_matrices(p)
    x = np.linalg.solve(a, -(b * u + c @ w.as_array()))
    return BuildingState(t1=float(x[0]), t2=float(x[1]), t3=float(x[2]))
