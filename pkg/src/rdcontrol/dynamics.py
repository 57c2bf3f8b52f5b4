"""Time integration of the controlled reaction-diffusion equation.

IMEX scheme: diffusion and drift are implicit (one tridiagonal solve per
step, the same spatial operator the steady solvers assemble), the
reaction explicit.  Boundary rows are pinned to the control values,
which are always clamped to [0, 1].  With controls and data in [0, 1]
and dt * ||f'||_inf < 1 the update is monotone, so the discrete
comparison principle and the invariant region survive exactly; discrete
steady states are exact fixed points of the step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .elliptic import assemble_operator, solve_tridiagonal
from .errors import InvalidInput, SolverFailure
from .model import BistableNonlinearity, DomainGeometry, DriftField, GridProfile, lipschitz_and_sup_fprime

__all__ = [
    "PdeState",
    "ControlSchedule",
    "SimulationResult",
    "Verdict",
    "default_dt",
    "step",
    "simulate",
    "asymptotic_verdict",
]


@dataclass(frozen=True)
class PdeState:
    t: float
    profile: GridProfile
    drift: DriftField
    cfl: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ControlSchedule:
    """Boundary control law; every emitted value is clamped to [0, 1].

    kinds: "static" (u = value), "piecewise" (list of (t_i, u_i), each
    value applied from t_i on) and "feedback" (target boundary trace
    plus gain times the mismatch at the boundary-adjacent node).
    """

    kind: str
    value: float = 0.0
    pieces: tuple = ()
    target: Optional[GridProfile] = None
    gain: float = 0.0

    @classmethod
    def static(cls, a: float) -> "ControlSchedule":
        return cls(kind="static", value=float(a))

    @classmethod
    def piecewise(cls, pieces) -> "ControlSchedule":
        pc = tuple(sorted((float(t), float(u)) for t, u in pieces))
        if not pc:
            raise InvalidInput("invalid-schedule: empty piecewise schedule")
        return cls(kind="piecewise", pieces=pc)

    @classmethod
    def feedback(cls, target: GridProfile, gain: float) -> "ControlSchedule":
        return cls(kind="feedback", target=target, gain=float(gain))

    def boundary_values(self, t: float, profile: GridProfile) -> tuple[float, float]:
        if self.kind == "static":
            u = min(max(self.value, 0.0), 1.0)
            return u, u
        if self.kind == "piecewise":
            u = self.pieces[0][1]
            for ti, ui in self.pieces:
                if t >= ti:
                    u = ui
            u = min(max(u, 0.0), 1.0)
            return u, u
        tgt = self.target.values
        state = profile.values
        u_left = tgt[0] + self.gain * (tgt[1] - state[1])
        u_right = tgt[-1] + self.gain * (tgt[-2] - state[-2])
        return (min(max(float(u_left), 0.0), 1.0),
                min(max(float(u_right), 0.0), 1.0))


@dataclass(frozen=True)
class SimulationResult:
    times: np.ndarray
    snapshots: list
    sup_dist: dict          # distance to the constants 0, theta, 1 over time
    control_log: np.ndarray  # rows (t, u_left, u_right)
    final: GridProfile


@dataclass(frozen=True)
class Verdict:
    status: str  # "converged" | "blocked"
    time: Optional[float]
    residual_sup: float
    residual_profile: Optional[GridProfile]


def default_dt(nl: BistableNonlinearity, h: float) -> float:
    """Conservative default step: 0.4 min(h^2/2, 1/||f'||_inf)."""
    M, _ = lipschitz_and_sup_fprime(nl)
    return 0.4 * min(0.5 * h * h, 1.0 / M)


class _Stepper:
    """Caches the factoring-ready implicit operator for fixed (grid, drift, dt)."""

    def __init__(self, geometry: DomainGeometry, n: int, drift: DriftField,
                 nl: BistableNonlinearity, dt: float):
        M, _ = lipschitz_and_sup_fprime(nl)
        if dt <= 0.0:
            raise InvalidInput("invalid-scalar: dt must be positive")
        if dt * M >= 1.0:
            raise InvalidInput(f"dt-too-large: dt*||f'|| = {dt * M:.3g} >= 1 "
                               "breaks the monotone reaction bound")
        lower, diag, upper, peclet = assemble_operator(geometry, n, drift)
        self.lo = -dt * lower
        self.di = 1.0 - dt * diag
        self.up = -dt * upper
        ball = geometry.kind == "ball"
        self.pin_left = not ball
        self.lo[-1], self.di[-1], self.up[-1] = 0.0, 1.0, 0.0
        if self.pin_left:
            self.lo[0], self.di[0], self.up[0] = 0.0, 1.0, 0.0
        self.dt = dt
        self.peclet = peclet
        self.geometry = geometry
        self.nl = nl
        self.drift = drift

    def advance(self, vals: np.ndarray, u_left: float, u_right: float) -> np.ndarray:
        rhs = vals + self.dt * np.asarray(self.nl.f(vals))
        rhs[-1] = u_right
        if self.pin_left:
            rhs[0] = u_left
        out = solve_tridiagonal(self.lo, self.di, self.up, rhs)
        if not np.all(np.isfinite(out)):
            raise SolverFailure("solver-failure: non-finite state after implicit solve")
        return out


_STEPPER_CACHE: dict = {}


def _stepper(geometry, n, drift, nl, dt) -> _Stepper:
    key = (geometry, n, drift, id(nl), round(dt, 14))
    st = _STEPPER_CACHE.get(key)
    if st is None:
        st = _Stepper(geometry, n, drift, nl, dt)
        if len(_STEPPER_CACHE) > 64:
            _STEPPER_CACHE.clear()
        _STEPPER_CACHE[key] = st
    return st


def step(state: PdeState, nl: BistableNonlinearity, u_left: float, u_right: float,
         dt: float) -> PdeState:
    """One IMEX step with the boundary rows pinned to the controls."""
    for u in (u_left, u_right):
        if not (0.0 <= u <= 1.0):
            raise InvalidInput(f"invalid-control: u={u} outside [0,1]")
    st = _stepper(state.profile.geometry, state.profile.n, state.drift, nl, dt)
    vals = st.advance(state.profile.values, u_left, u_right)
    return PdeState(t=state.t + dt, profile=GridProfile(state.profile.geometry, vals),
                    drift=state.drift, cfl={"peclet_max": st.peclet, "dt": dt})


def simulate(p0: GridProfile, nl: BistableNonlinearity, drift: DriftField,
             schedule: ControlSchedule, T: float, dt: float,
             snapshot_every: int = 10) -> SimulationResult:
    """March the controlled equation to time T, keeping periodic snapshots
    and the sup-distance to the three homogeneous states."""
    geometry = p0.geometry
    st = _stepper(geometry, p0.n, drift, nl, dt)
    vals = p0.values.copy()
    n_steps = max(1, int(round(T / dt)))
    times = [0.0]
    snaps = [GridProfile(geometry, vals.copy())]
    dist = {0.0: [float(np.max(np.abs(vals)))],
            nl.theta: [float(np.max(np.abs(vals - nl.theta)))],
            1.0: [float(np.max(np.abs(vals - 1.0)))]}
    controls = []
    t = 0.0
    for k in range(n_steps):
        uL, uR = schedule.boundary_values(t, GridProfile(geometry, vals))
        controls.append((t, uL, uR))
        vals = st.advance(vals, uL, uR)
        t = (k + 1) * dt
        if (k + 1) % snapshot_every == 0 or k == n_steps - 1:
            times.append(t)
            snaps.append(GridProfile(geometry, vals.copy()))
            for a in dist:
                dist[a].append(float(np.max(np.abs(vals - a))))
    return SimulationResult(times=np.asarray(times), snapshots=snaps,
                            sup_dist={a: np.asarray(v) for a, v in dist.items()},
                            control_log=np.asarray(controls),
                            final=GridProfile(geometry, vals))


def asymptotic_verdict(p0: GridProfile, nl: BistableNonlinearity, drift: DriftField,
                       a: float, T_max: float, dt: float, tol: float = 1e-3) -> Verdict:
    """Run the static control u = a and classify the long-time behaviour.

    converged: sup|p - a| < tol at some time (reported).
    blocked:   the state stalled (sup-change over the last 10% of the
               horizon < tol/10) while still tol-far from the target.
    Anything else raises horizon-too-short.
    """
    if tol <= 0.0:
        raise InvalidInput("invalid-scalar: tol must be positive")
    geometry = p0.geometry
    st = _stepper(geometry, p0.n, drift, nl, dt)
    u = min(max(float(a), 0.0), 1.0)
    vals = p0.values.copy()
    n_steps = max(2, int(round(T_max / dt)))
    check_every = max(1, n_steps // 400)
    mark = None
    t_mark = 0.9 * T_max
    for k in range(n_steps):
        vals = st.advance(vals, u, u)
        t = (k + 1) * dt
        if (k + 1) % check_every == 0 or k == n_steps - 1:
            gap = float(np.max(np.abs(vals - a)))
            if gap < tol:
                return Verdict(status="converged", time=t, residual_sup=gap,
                               residual_profile=None)
        if mark is None and t >= t_mark:
            mark = vals.copy()
    gap = float(np.max(np.abs(vals - a)))
    stall = float(np.max(np.abs(vals - mark))) if mark is not None else np.inf
    if stall < tol / 10.0 and gap >= tol:
        return Verdict(status="blocked", time=None, residual_sup=gap,
                       residual_profile=GridProfile(geometry, vals))
    raise SolverFailure(f"horizon-too-short: neither converged (gap {gap:.3g}) "
                        f"nor stalled (drift {stall:.3g}) by T={T_max}")
