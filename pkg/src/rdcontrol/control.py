"""Control synthesis: static strategies, the staircase method along a
discrete path of steady states, controllability verdicts and
minimal-time scans.

The staircase walks the path built by :func:`steady.build_steady_path`.
Each leg applies clamped boundary feedback toward the next member's
boundary trace; a leg succeeds once the sup-error to its target drops
below half the staircase tolerance, so errors cannot accumulate from
leg to leg.  Exact local controllability is replaced by this feedback
surrogate; the clamp enforces the [0, 1] control constraint exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import ControlSchedule, asymptotic_verdict
from .errors import InvalidInput, SolverFailure
from .model import BistableNonlinearity, DomainGeometry, DriftField, GridProfile
from .steady import Barrier, SteadyPath, build_steady_path, find_barrier_one, find_barrier_zero

__all__ = [
    "StaircaseResult",
    "MinTimeResult",
    "staircase_to_theta",
    "controllability_report",
    "minimal_time_to_theta",
    "mintime_scan",
]


@dataclass(frozen=True)
class LegRecord:
    index: int
    s_target: float
    duration: float
    sup_error: float
    control_min: float
    control_max: float


@dataclass(frozen=True)
class StaircaseResult:
    success: bool
    total_time: float
    stage: Optional[str] = None      # failing stage on failure ("step1" or "leg<i>")
    reason: Optional[str] = None
    terminal_error: float = math.inf
    legs: tuple = ()
    control_min: float = math.inf
    control_max: float = -math.inf
    path: Optional[SteadyPath] = field(default=None, repr=False)
    final: Optional[GridProfile] = field(default=None, repr=False)


@dataclass(frozen=True)
class MinTimeResult:
    parameter: float
    T_min: float            # +inf sentinel when infeasible on the grid
    strategy: str


def _run_leg(state_vals, nl, drift, geometry, target: GridProfile, gain: float,
             budget: float, dt: float, tol: float):
    """Feedback leg toward a steady target; returns (values, time_used,
    success, err, u_min, u_max)."""
    schedule = ControlSchedule.feedback(target, gain)
    vals = state_vals
    t_used = 0.0
    u_min, u_max = math.inf, -math.inf
    n_steps = max(1, int(round(budget / dt)))
    check = max(1, int(round(0.25 / dt)))
    from .dynamics import _stepper  # shared cached operator

    st = _stepper(geometry, target.n, drift, nl, dt)
    prof = GridProfile(geometry, vals)
    err = float(np.max(np.abs(vals - target.values)))
    for k in range(n_steps):
        uL, uR = schedule.boundary_values(t_used, prof)
        u_min = min(u_min, uL, uR)
        u_max = max(u_max, uL, uR)
        vals = st.advance(vals, uL, uR)
        prof = GridProfile(geometry, vals)
        t_used += dt
        if (k + 1) % check == 0 or k == n_steps - 1:
            err = float(np.max(np.abs(vals - target.values)))
            if err <= tol:
                return vals, t_used, True, err, u_min, u_max
    return vals, t_used, False, err, u_min, u_max


def staircase_to_theta(p0: GridProfile, nl: BistableNonlinearity, drift: DriftField,
                       geometry: DomainGeometry, delta1: float = 0.05, T1: float = 20.0,
                       T_max: float = 300.0, dt: float = 0.02, gain: float = 1.0,
                       n_grid: Optional[int] = None,
                       path: Optional[SteadyPath] = None) -> StaircaseResult:
    """Drive any admissible initial state to the Allee constant.

    Step 1 applies the static control 0 until sup|p| <= delta1/2 (skipped
    when already there); the remaining steps walk the steady-state path
    with per-leg budget T1 and leg tolerance delta1/2.  Failure reports
    the stage: Step-1 stalls are labelled "barrier-to-0" (the blocking
    mechanism), leg stalls carry the leg index.
    """
    if delta1 <= 0.0:
        raise InvalidInput("invalid-scalar: delta1 must be positive")
    n = n_grid or p0.n
    if p0.n != n:
        p0 = GridProfile(geometry, np.interp(geometry.grid(n), p0.x, p0.values))
    vals = np.clip(p0.values.copy(), 0.0, 1.0)
    total = 0.0
    u_min, u_max = math.inf, -math.inf

    # Step 1: static zero control toward the trivial state
    gap = float(np.max(vals))
    if gap > delta1 / 2.0:
        from .dynamics import _stepper

        st = _stepper(geometry, n, drift, nl, dt)
        budget = T_max
        check = max(1, int(round(0.5 / dt)))
        last_gap = gap
        k = 0
        while total < budget:
            vals = st.advance(vals, 0.0, 0.0)
            u_min, u_max = min(u_min, 0.0), max(u_max, 0.0)
            total += dt
            k += 1
            if k % check == 0:
                gap = float(np.max(vals))
                if gap <= delta1 / 2.0:
                    break
                if k % (20 * check) == 0:
                    if last_gap - gap < delta1 / 200.0:
                        return StaircaseResult(False, total, stage="step1",
                                               reason="barrier-to-0", terminal_error=gap,
                                               control_min=u_min, control_max=u_max,
                                               final=GridProfile(geometry, vals))
                    last_gap = gap
        else:
            pass
        gap = float(np.max(vals))
        if gap > delta1 / 2.0:
            return StaircaseResult(False, total, stage="step1", reason="barrier-to-0",
                                   terminal_error=gap, control_min=u_min, control_max=u_max,
                                   final=GridProfile(geometry, vals))

    # Steps 2-3: walk the path of steady states
    if path is None:
        path = build_steady_path(nl, drift, geometry, K=9, delta=delta1 / 2.0, n_grid=n)
    if not path.admissible:
        return StaircaseResult(False, total, stage="path", reason="path-inadmissible",
                               control_min=u_min, control_max=u_max, path=path)
    legs = []
    for i, target in enumerate(path.profiles[1:], start=1):
        remaining = T_max - total
        if remaining <= dt:
            return StaircaseResult(False, total, stage=f"leg{i}", reason="budget-exhausted",
                                   terminal_error=math.inf, legs=tuple(legs),
                                   control_min=u_min, control_max=u_max, path=path)
        vals, used, ok, err, lo, hi = _run_leg(vals, nl, drift, geometry, target, gain,
                                               min(T1, remaining), dt, delta1 / 2.0)
        total += used
        u_min, u_max = min(u_min, lo), max(u_max, hi)
        legs.append(LegRecord(index=i, s_target=float(path.s_values[i]), duration=used,
                              sup_error=err, control_min=lo, control_max=hi))
        if not ok:
            return StaircaseResult(False, total, stage=f"leg{i}", reason="leg-stall",
                                   terminal_error=err, legs=tuple(legs),
                                   control_min=u_min, control_max=u_max, path=path,
                                   final=GridProfile(geometry, vals))
    terminal = float(np.max(np.abs(vals - nl.theta)))
    return StaircaseResult(True, total, terminal_error=terminal, legs=tuple(legs),
                           control_min=u_min, control_max=u_max, path=path,
                           final=GridProfile(geometry, vals))


@dataclass(frozen=True)
class TargetVerdict:
    target: float
    status: str                 # "converged" | "blocked" | "failure"
    time: Optional[float]
    witness: Optional[Barrier] = field(default=None, repr=False)
    detail: object = field(default=None, repr=False)


def controllability_report(nl: BistableNonlinearity, drift: DriftField,
                           geometry: DomainGeometry, sigma: Optional[float] = None,
                           n: int = 201, dt: float = 0.02, T_max: float = 150.0,
                           tol: float = 1e-3, delta1: float = 0.05, T1: float = 20.0
                           ) -> dict:
    """Verdicts for the three homogeneous targets with blocking witnesses.

    Targets 0 and 1 run static controls from the extreme data (p0 = 1,
    resp. 0), which dominate every admissible initial state by the
    comparison principle; theta runs the staircase from p0 = 1.  Blocked
    verdicts attach the matching barrier as a witness when one is found.
    """
    sig = drift.sigma if sigma is None else sigma
    R = geometry.inradius()
    d = geometry.d if geometry.kind == "ball" else 1
    ones = GridProfile(geometry, np.ones(n))
    zeros = GridProfile(geometry, np.zeros(n))
    report = {}

    v0 = asymptotic_verdict(ones, nl, drift, 0.0, T_max, dt, tol)
    w0 = find_barrier_zero(nl, drift, sig, R, d, n_grid=n) if v0.status == "blocked" else None
    report["to_zero"] = TargetVerdict(0.0, v0.status, v0.time, w0, v0)

    v1 = asymptotic_verdict(zeros, nl, drift, 1.0, T_max, dt, tol)
    w1 = find_barrier_one(nl, drift, sig, R, d, n_grid=n) if v1.status == "blocked" else None
    report["to_one"] = TargetVerdict(1.0, v1.status, v1.time, w1, v1)

    sc = staircase_to_theta(ones, nl, drift, geometry, delta1=delta1, T1=T1,
                            T_max=T_max, dt=dt)
    if sc.success:
        report["to_theta"] = TargetVerdict(nl.theta, "converged", sc.total_time, None, sc)
    else:
        wt = None
        if sc.reason == "barrier-to-0":
            wt = find_barrier_zero(nl, drift, sig, R, d, n_grid=n)
        elif sc.reason in ("leg-stall", "path-inadmissible"):
            wt = find_barrier_one(nl, drift, sig, R, d, n_grid=n)
        report["to_theta"] = TargetVerdict(nl.theta, "blocked" if wt is not None else "failure",
                                           None, wt, sc)
    return report


def minimal_time_to_theta(nl: BistableNonlinearity, drift: DriftField,
                          geometry: DomainGeometry, horizon_grid,
                          n: int = 101, dt: float = 0.02, delta1: float = 0.05,
                          gain: float = 1.0) -> MinTimeResult:
    """Smallest feasible horizon on the grid for controlling 0 to theta.

    A horizon T is feasible when the staircase (per-leg budget scaled to
    fit T) succeeds within T.  Feasibility is monotone in T; the binary
    search asserts the monotonicity of everything it probes.
    """
    horizons = np.sort(np.asarray(horizon_grid, dtype=float))
    if horizons.size == 0 or np.any(horizons <= 0.0):
        raise InvalidInput("invalid-grid: horizons must be positive")
    zeros = GridProfile(geometry, np.zeros(n))
    try:
        path = build_steady_path(nl, drift, geometry, K=9, delta=delta1 / 2.0, n_grid=n)
    except SolverFailure:
        return MinTimeResult(parameter=drift.sigma, T_min=math.inf,
                             strategy="staircase (path construction failed)")
    if not path.admissible:
        return MinTimeResult(parameter=drift.sigma, T_min=math.inf,
                             strategy="staircase (path inadmissible)")
    n_legs = max(1, len(path) - 1)
    probed: dict[float, bool] = {}

    def feasible(T: float) -> bool:
        if T not in probed:
            res = staircase_to_theta(zeros, nl, drift, geometry, delta1=delta1,
                                     T1=T / n_legs, T_max=T, dt=dt, gain=gain, path=path)
            probed[T] = bool(res.success and res.total_time <= T + 1e-9)
        return probed[T]

    lo, hi = 0, horizons.size - 1
    if not feasible(horizons[hi]):
        _assert_monotone(probed)
        return MinTimeResult(parameter=drift.sigma, T_min=math.inf, strategy="staircase")
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(horizons[mid]):
            hi = mid
        else:
            lo = mid + 1
    _assert_monotone(probed)
    return MinTimeResult(parameter=drift.sigma, T_min=float(horizons[lo]), strategy="staircase")


def _assert_monotone(probed: dict) -> None:
    items = sorted(probed.items())
    best_true = math.inf
    for T, ok in items:
        if ok:
            best_true = min(best_true, T)
    for T, ok in items:
        if T > best_true and not ok:
            raise SolverFailure(f"solver-failure: feasibility not monotone at T={T}")


def mintime_scan(drift_family: str, sigma_grid, nl: BistableNonlinearity,
                 geometry: DomainGeometry, horizon_grid, n: int = 101,
                 dt: float = 0.02, delta1: float = 0.05, jobs: int = 1) -> list[MinTimeResult]:
    """One minimal-time search per drift intensity for a named family."""
    if drift_family not in ("gauss_out", "gauss_in", "abs_exp", "sin"):
        raise InvalidInput(f"invalid-family: {drift_family}")

    def point(sig: float) -> MinTimeResult:
        drift = DriftField.radial(drift_family, sig)
        return minimal_time_to_theta(nl, drift, geometry, horizon_grid, n=n, dt=dt,
                                     delta1=delta1)

    sigmas = list(np.asarray(sigma_grid, dtype=float))
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(point, sigmas))
    return [point(s) for s in sigmas]
