"""Radial steady states: the shooting integrator, barrier search,
critical radii, weighted radial solves and discrete steady-state paths.

The shooting problem is the initial value problem

    p'' = -f(p) - ( (2/sigma) b(r) + (d-1)/r ) p',   p(0) = alpha, p'(0) = 0,

integrated outward with an adaptive step-doubling RK4.  At the origin the
singular term is regularized by the analytic limit p''(0) = -f(alpha)/d
and the first step is taken by second-order Taylor expansion.

Barriers (non-trivial steady states with constant boundary value 0 or 1)
are located by bisection on alpha and then polished by a damped Newton
solve on the discrete elliptic system, so every returned barrier is an
exact fixed point of the package's own time stepper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .elliptic import newton_steady, resample_to_grid, steady_residual
from .errors import InvalidInput, SolverFailure
from .model import BistableNonlinearity, DomainGeometry, DriftField, GridProfile

__all__ = [
    "RadialTrajectory",
    "Barrier",
    "SteadyPath",
    "shoot_radial",
    "find_barrier_one",
    "find_barrier_zero",
    "critical_radius_R_star",
    "solve_radial_weighted",
    "build_steady_path",
]

NONTRIVIAL_MARGIN = 0.1  # sup distance from the constant boundary state


@dataclass(frozen=True)
class RadialTrajectory:
    """Output of the shooting integrator: samples of (r, p, p')."""

    sigma: float
    alpha: float
    d: int
    r: np.ndarray
    p: np.ndarray
    v: np.ndarray
    events: dict
    blow_up: bool
    exit_reason: str

    def first_crossing(self, level: str) -> Optional[float]:
        return self.events.get(level)


@dataclass(frozen=True)
class Barrier:
    """Non-trivial steady state pinned to boundary value 0 or 1."""

    profile: GridProfile
    boundary_value: float
    residual: float
    p_min: float
    p_max: float
    alpha: Optional[float] = None
    trajectory: Optional[RadialTrajectory] = field(default=None, repr=False)

    def deviation(self) -> float:
        return float(np.max(np.abs(self.profile.values - self.boundary_value)))


@dataclass(frozen=True)
class SteadyPath:
    """Chain of discrete steady states linking ~0 to the Allee state."""

    profiles: list
    s_values: np.ndarray
    delta: float
    admissible: bool
    max_residual: float

    def __len__(self) -> int:
        return len(self.profiles)

    def max_gap(self) -> float:
        gaps = [self.profiles[i].sup_distance(self.profiles[i + 1])
                for i in range(len(self.profiles) - 1)]
        return float(max(gaps)) if gaps else 0.0


# ---------------------------------------------------------------------------
# shooting integrator
# ---------------------------------------------------------------------------

def _scalar_f(nl: BistableNonlinearity) -> Callable:
    """Plain-float reaction closure; the integrator loop is scalar-hot."""
    if nl.kind == "cubic":
        th = nl.theta
        return lambda p: p * (p - th) * (1.0 - p)
    interp = nl._f_interp
    return lambda p: 0.0 if (p < 0.0 or p > 1.0) else float(interp(p))


def _scalar_b(drift: DriftField) -> Callable:
    if drift.kind == "homogeneous" or drift.kind == "infection":
        return lambda r: 0.0
    if drift.kind == "radial":
        fam = drift.family
        if fam == "gauss_out":
            return lambda r: -r
        if fam == "gauss_in":
            return lambda r: r
        if fam == "abs_exp":
            return lambda r: 1.0 if r > 0 else (-1.0 if r < 0 else 0.0)
        return math.sin
    b = drift.b_func
    return lambda r: float(b(r))


def _rhs_factory(nl: BistableNonlinearity, drift: DriftField, sigma: float, d: int) -> Callable:
    two_over_sigma = 2.0 / sigma
    f = _scalar_f(nl)
    b = _scalar_b(drift)
    dm1 = d - 1

    def rhs(r: float, p: float, v: float):
        c = two_over_sigma * b(r)
        if dm1:
            c += dm1 / r
        return v, -f(p) - c * v

    return rhs


def _rk4(rhs, r, p, v, h):
    k1p, k1v = rhs(r, p, v)
    k2p, k2v = rhs(r + 0.5 * h, p + 0.5 * h * k1p, v + 0.5 * h * k1v)
    k3p, k3v = rhs(r + 0.5 * h, p + 0.5 * h * k2p, v + 0.5 * h * k2v)
    k4p, k4v = rhs(r + h, p + h * k3p, v + h * k3v)
    return (p + h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p),
            v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v))


def shoot_radial(nl: BistableNonlinearity, drift: DriftField, sigma: float,
                 alpha: float, d: int, r_max: float, h: float,
                 v_limit: float = 1e3) -> RadialTrajectory:
    """Integrate the radial steady ODE outward from the center.

    Stops at ``r_max``, when p leaves [-0.1, 1.1] or |p'| exceeds
    ``v_limit``.  First crossings of theta, theta/2, 1 and 0 are located
    by linear interpolation between the stored samples and recorded in
    ``events``.
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidInput(f"invalid-alpha: {alpha} not in (0,1)")
    if r_max <= 0.0 or h <= 0.0:
        raise InvalidInput("invalid-scalar: r_max and h must be positive")
    h_max = min(h, 1e-3 * r_max if 1e-3 * r_max > 0 else h, sigma / 10.0)
    h_max = max(h_max, 1e-9)
    rhs = _rhs_factory(nl, drift, sigma, d)
    theta = nl.theta
    levels = {"r_theta": theta, "r_theta_half": theta / 2.0, "r_one": 1.0, "r_zero": 0.0}
    events: dict = {}

    # second-order Taylor start around the regularized origin
    r0 = h_max
    a0 = -float(nl.f(alpha)) / d
    rs = [0.0, r0]
    ps = [alpha, alpha + 0.5 * a0 * r0**2]
    vs = [0.0, a0 * r0]

    r, p, v = r0, ps[-1], vs[-1]
    h_cur = h_max
    exit_reason = "r-max"
    blow_up = False
    h_floor = h_max * 1e-8
    while r < r_max:
        h_step = min(h_cur, r_max - r)
        p_full, v_full = _rk4(rhs, r, p, v, h_step)
        p_h, v_h = _rk4(rhs, r, p, v, 0.5 * h_step)
        p_half, v_half = _rk4(rhs, r + 0.5 * h_step, p_h, v_h, 0.5 * h_step)
        err = max(abs(p_full - p_half), abs(v_full - v_half)) / 15.0
        scale = max(1.0, abs(p), abs(v))
        if not np.isfinite(err) or err > 1e-10 * scale:
            h_cur = 0.5 * h_step
            if h_cur < h_floor:
                raise SolverFailure(
                    f"stiff-failure: step collapse at r={r:.4g} (alpha={alpha:.4g}, sigma={sigma:.4g})")
            continue
        p_new = p_half + (p_half - p_full) / 15.0
        v_new = v_half + (v_half - v_full) / 15.0
        r_new = r + h_step
        for name, level in levels.items():
            if name not in events and (p - level) * (p_new - level) <= 0.0 and p != p_new:
                frac = (level - p) / (p_new - p)
                if 0.0 <= frac <= 1.0:
                    events[name] = r + frac * h_step
        rs.append(r_new)
        ps.append(p_new)
        vs.append(v_new)
        r, p, v = r_new, p_new, v_new
        if err < 1e-12 * scale:
            h_cur = min(2.0 * h_step, h_max)
        if p < -0.1 or p > 1.1:
            exit_reason = "range-exit"
            break
        if abs(v) > v_limit:
            exit_reason = "blow-up"
            blow_up = True
            break

    return RadialTrajectory(sigma=sigma, alpha=alpha, d=d,
                            r=np.asarray(rs), p=np.asarray(ps), v=np.asarray(vs),
                            events=events, blow_up=blow_up, exit_reason=exit_reason)


# ---------------------------------------------------------------------------
# barrier search
# ---------------------------------------------------------------------------

def _monotone_reach(traj: RadialTrajectory, target: str, tol_v: float = 1e-10) -> float:
    """First radius where the trajectory reaches the target level having
    stayed monotone on the way; +inf when it never does.

    A blow-up exit (|p'| > v_limit) moving toward the target is within
    O(1/v_limit) of crossing it, so the crossing radius is completed by
    one linear step.
    """
    r_star = traj.events.get(target)
    if r_star is None and traj.blow_up:
        p_end, v_end, r_end = traj.p[-1], traj.v[-1], traj.r[-1]
        if target == "r_one" and v_end > 0.0 and p_end < 1.0:
            r_star = r_end + (1.0 - p_end) / v_end
        if target == "r_zero" and v_end < 0.0 and p_end > 0.0:
            r_star = r_end + (0.0 - p_end) / v_end
    if r_star is None:
        return math.inf
    mask = traj.r <= r_star + 1e-12
    v = traj.v[mask]
    if target == "r_one" and np.min(v) < -tol_v:
        return math.inf
    if target == "r_zero" and np.max(v) > tol_v:
        return math.inf
    return float(r_star)


def _polish_barrier(nl, drift, sigma, geometry, n_grid, traj, boundary_value):
    """Resample a shooting trajectory and Newton-polish it into an exact
    discrete steady state; returns None for trivial/invalid results."""
    drift_eff = DriftField(kind=drift.kind, sigma=sigma, family=drift.family,
                           b_func=drift.b_func, ln_N_func=drift.ln_N_func,
                           eps=drift.eps) if drift.kind != "homogeneous" else drift
    prof = resample_to_grid(geometry, n_grid, traj.r, np.clip(traj.p, 0.0, 1.0))
    seed = prof.values.copy()
    seed[-1] = boundary_value
    if geometry.kind == "interval":
        seed[0] = boundary_value
    try:
        vals, residual = newton_steady(geometry, drift_eff, nl, seed,
                                       bc_left=boundary_value, bc_right=boundary_value)
    except SolverFailure:
        return None
    if np.min(vals) < -1e-9 or np.max(vals) > 1.0 + 1e-9:
        return None
    vals = np.clip(vals, 0.0, 1.0)
    barrier = Barrier(profile=GridProfile(geometry, vals), boundary_value=boundary_value,
                      residual=residual, p_min=float(np.min(vals)), p_max=float(np.max(vals)),
                      alpha=traj.alpha, trajectory=traj)
    if barrier.deviation() <= NONTRIVIAL_MARGIN:
        return None
    return barrier


def _feasible_alphas(reach, alphas, R: float, tol: float = 1e-10) -> list[float]:
    """Roots of reach(alpha) = R located by scanning the feasibility
    predicate reach <= R and bisecting every edge of the feasible band.

    reach(alpha) is continuous where finite but the feasible band sits
    strictly inside the alpha range (trajectories linger near the
    equilibria at either end), so infeasible includes reach = +inf.
    """
    feas = [reach(a) <= R for a in alphas]
    roots = []
    for i in range(len(alphas) - 1):
        if feas[i] == feas[i + 1]:
            continue
        lo, hi = alphas[i], alphas[i + 1]  # lo infeasible or feasible; track predicate
        f_lo = feas[i]
        while abs(hi - lo) > tol:
            mid = 0.5 * (lo + hi)
            if (reach(mid) <= R) == f_lo:
                lo = mid
            else:
                hi = mid
        root = hi if f_lo else lo  # the feasible side of the edge
        roots.append(root)
    return roots


def find_barrier_one(nl: BistableNonlinearity, drift: DriftField, sigma: float,
                     R: float, d: int, n_grid: int = 801, h: float = 1e-3) -> Optional[Barrier]:
    """Barrier with boundary value 1 on a domain of radius R, if any.

    Solves R(sigma, 1, alpha) = R by bisection on the feasibility band
    of the monotone-reach radius over alpha in (0, theta); the lower
    edge of the band is the branch where the reach is non-increasing in
    alpha.  Returns None when no admissible monotone trajectory reaches
    1 by radius R.
    """
    theta = nl.theta
    geometry = DomainGeometry.interval(R) if d == 1 else DomainGeometry.ball(R, d)
    r_cap = 1.02 * R

    def reach(alpha: float) -> float:
        traj = shoot_radial(nl, drift, sigma, alpha, d, r_cap, h)
        return _monotone_reach(traj, "r_one")

    # strong drifts push the feasibility edge to exponentially small
    # alpha (Gronwall: theta <= alpha e^{2 r^2/sigma + ...}); extend the
    # scan floor until the edge is inside
    lo = 1e-7
    for _ in range(16):
        if not (reach(lo) <= R) or lo < 1e-90:
            break
        lo *= 1e-6
    alphas = np.geomspace(lo, theta * (1.0 - 1e-9), 48)
    roots = sorted(_feasible_alphas(reach, alphas, R))
    if not roots:
        # every probe reaches before R: seed the Newton solve from the
        # feasible trajectory whose crossing lies closest to R (its
        # clipped extension by 1 is the classical supersolution seed)
        reaches = [(reach(a), a) for a in alphas]
        feasible = [(ra, a) for ra, a in reaches if ra <= R]
        if not feasible:
            return None
        roots = [max(feasible)[1]]
    for a in roots:
        traj = shoot_radial(nl, drift, sigma, a, d, r_cap, h)
        if _monotone_reach(traj, "r_one") is math.inf:
            continue
        barrier = _polish_barrier(nl, drift, sigma, geometry, n_grid, traj, 1.0)
        if barrier is not None:
            return barrier
    return None


def find_barrier_zero(nl: BistableNonlinearity, drift: DriftField, sigma: float,
                      R: float, d: int, n_grid: int = 801, h: float = 1e-3) -> Optional[Barrier]:
    """Barrier with boundary value 0, found by shooting from alpha in
    (theta, 1) and cross-validated against the energy minimizer.

    The first-hit radius r0(alpha) is not monotone over the whole range,
    so every edge of the feasibility band r0 <= R is bisected.  Of the
    surviving candidates and the polished energy minimizer the profile
    with the smaller residual is returned.
    """
    theta = nl.theta
    geometry = DomainGeometry.interval(R) if d == 1 else DomainGeometry.ball(R, d)
    r_cap = 1.02 * R

    def hit_zero(alpha: float) -> float:
        traj = shoot_radial(nl, drift, sigma, alpha, d, r_cap, h)
        return _monotone_reach(traj, "r_zero")

    alphas = np.linspace(theta + 0.01, 1.0 - 1e-6, 64)
    roots = _feasible_alphas(hit_zero, alphas, R)

    barriers = []
    for a in roots:
        traj = shoot_radial(nl, drift, sigma, a, d, r_cap, h)
        if _monotone_reach(traj, "r_zero") is math.inf:
            continue
        b = _polish_barrier(nl, drift, sigma, geometry, n_grid, traj, 0.0)
        if b is not None:
            barriers.append(b)

    energy_candidate = _energy_route_barrier(nl, drift, sigma, geometry, n_grid)
    if energy_candidate is not None:
        barriers.append(energy_candidate)
    if not barriers:
        return None
    return min(barriers, key=lambda b: b.residual)


def _energy_route_barrier(nl, drift, sigma, geometry, n_grid):
    """Energy route of the boundary-0 search: projected-gradient descent
    of the weighted energy from the plateau test function, then Newton."""
    from .energy import minimize_energy_sigma, plateau_ramp_eta

    try:
        eta = plateau_ramp_eta(geometry.inradius() / 4.0, geometry, n_grid)
    except InvalidInput:
        return None
    try:
        prof, _ = minimize_energy_sigma(nl, drift, sigma, geometry, n_grid,
                                        p_init=eta, max_iter=4000)
    except SolverFailure:
        return None
    if float(np.max(prof.values)) <= NONTRIVIAL_MARGIN:
        return None
    drift_eff = DriftField(kind=drift.kind, sigma=sigma, family=drift.family,
                           b_func=drift.b_func, ln_N_func=drift.ln_N_func,
                           eps=drift.eps) if drift.kind != "homogeneous" else drift
    try:
        vals, residual = newton_steady(geometry, drift_eff, nl, prof.values, 0.0, 0.0)
    except SolverFailure:
        return None
    if np.min(vals) < -1e-9 or np.max(vals) > 1.0 + 1e-9 or np.max(vals) <= NONTRIVIAL_MARGIN:
        return None
    vals = np.clip(vals, 0.0, 1.0)
    return Barrier(profile=GridProfile(geometry, vals), boundary_value=0.0,
                   residual=residual, p_min=float(np.min(vals)), p_max=float(np.max(vals)))


def critical_radius_R_star(nl: BistableNonlinearity, drift: DriftField, sigma: float,
                           d: int, R_probe_grid) -> float:
    """Smallest probed radius from which boundary-1 barriers persist for
    every larger probe; +inf when no probe succeeds."""
    probes = np.asarray(R_probe_grid, dtype=float)
    if np.any(np.diff(probes) <= 0.0):
        raise InvalidInput("invalid-grid: probe grid must increase")
    success = [find_barrier_one(nl, drift, sigma, R, d) is not None for R in probes]
    r_star = math.inf
    for ok, R in zip(reversed(success), reversed(probes)):
        if not ok:
            break
        r_star = float(R)
    return r_star


# ---------------------------------------------------------------------------
# weighted radial solve and the steady-state path
# ---------------------------------------------------------------------------

def solve_radial_weighted(nl: BistableNonlinearity, N_radial, s: float, d: int,
                          R: float, h: float) -> GridProfile:
    """Solve -(r^{d-1} N^2 p')' = f(p) N^2 r^{d-1}, p(0) = s*theta, p'(0) = 0.

    ``N_radial`` is a positive callable (or a DriftField, whose base N is
    used).  A Picard fixed point of the integral form runs on a short
    initial segment [0, r1]; the rest is marched by fixed-step RK4.
    """
    if not (0.0 <= s <= 1.0):
        raise InvalidInput(f"invalid-scalar: s={s} not in [0,1]")
    N_func = N_radial.N if isinstance(N_radial, DriftField) else N_radial
    f_scalar = _scalar_f(nl)
    n_out = max(9, int(round(R / h)) + 1)
    grid = np.linspace(0.0, R, n_out)
    p0 = s * nl.theta
    if s == 0.0:
        return GridProfile(DomainGeometry.ball(R, d) if d > 1 else DomainGeometry.interval(R),
                           np.zeros(n_out))

    def logderiv(r):
        eps = 1e-6
        rl = max(r - eps, 1e-12)
        return (math.log(float(N_func(r + eps))) - math.log(float(N_func(rl)))) / (r + eps - rl)

    # Picard fixed point on [0, r1]
    r1 = min(R, 0.5)
    for _ in range(30):
        m = 129
        t = np.linspace(0.0, r1, m)
        w = np.asarray(N_func(t), dtype=float) ** 2
        meas = t ** (d - 1) if d > 1 else np.ones_like(t)
        phi = np.full(m, p0)
        converged = False
        for _ in range(80):
            inner = _cumtrapz(np.asarray(nl.f(phi)) * w * meas, t)
            with np.errstate(divide="ignore", invalid="ignore"):
                integrand = np.where(t > 0.0, -inner / (w * np.where(meas > 0, meas, 1.0)), 0.0)
            phi_new = p0 + _cumtrapz(integrand, t)
            change = float(np.max(np.abs(phi_new - phi)))
            prev = phi
            phi = phi_new
            if change < 1e-14:
                converged = True
                break
        if converged:
            break
        r1 *= 0.5
        if r1 < 1e-6 * R:
            raise SolverFailure("contraction-failure: Picard segment shrank below 1e-6 R")
    v1 = float(np.where(t[-1] > 0, integrand[-1], 0.0))

    # RK4 march on [r1, R]
    def rhs(r, p, v):
        c = (d - 1) / r + 2.0 * logderiv(r)
        return v, -f_scalar(p) - c * v

    rs = [0.0] + list(t[1:])
    ps = [p0] + list(phi[1:])
    r, p, v = r1, float(phi[-1]), v1
    n_steps = max(1, int(math.ceil((R - r1) / h)))
    hh = (R - r1) / n_steps
    for _ in range(n_steps):
        p, v = _rk4(rhs, r, p, v, hh)
        r += hh
        rs.append(r)
        ps.append(p)
        if not (math.isfinite(p) and math.isfinite(v)) or abs(p) > 5.0 or abs(v) > 1e6:
            raise SolverFailure("stiff-failure: weighted radial march left the admissible range")
    geom = DomainGeometry.ball(R, d) if d > 1 else DomainGeometry.interval(R)
    if geom.kind == "interval":
        return resample_to_grid(geom, n_out, np.asarray(rs), np.asarray(ps))
    return GridProfile(geom, np.interp(grid, np.asarray(rs), np.asarray(ps)))


def _cumtrapz(y, x):
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))
    return out


def build_steady_path(nl: BistableNonlinearity, drift: DriftField,
                      geometry: DomainGeometry, K: int = 9, delta: float = 0.05,
                      n_grid: int = 401, max_members: int = 1024) -> SteadyPath:
    """Discrete path of steady states from ~0 to the Allee constant.

    Members are the radial solutions with center value s*theta on an
    s-grid that is refined until consecutive sup-gaps stay below
    ``delta``; each member is polished into an exact discrete steady
    state with its own boundary trace pinned.  Slowly-varying drifts are
    handled by switching the advection term on gradually under Newton
    continuation; a failed continuation retries once on a 5% inflated
    domain before reporting the resonant parameter.
    """
    if K < 2:
        raise InvalidInput("invalid-scalar: K must be >= 2")
    if delta <= 0.0:
        raise InvalidInput("invalid-scalar: delta must be positive")
    R = geometry.inradius()
    d = geometry.d if geometry.kind == "ball" else 1
    h = min(1e-3 * max(R, 1.0), R / (4 * n_grid))

    def member(s: float) -> GridProfile:
        if drift.kind in ("homogeneous", "radial"):
            N_eff = (lambda r: np.ones_like(np.asarray(r, dtype=float))) if drift.kind == "homogeneous" \
                else (lambda r: np.exp(drift.ln_N(r) / drift.sigma))
            ivp = solve_radial_weighted(nl, N_eff, s, d, R, h)
            seed = np.interp(np.abs(geometry.grid(n_grid)) if geometry.kind == "interval"
                             else geometry.grid(n_grid), ivp.x if ivp.geometry.kind == "ball"
                             else ivp.x[ivp.n // 2:], ivp.values if ivp.geometry.kind == "ball"
                             else ivp.values[ivp.n // 2:])
            trace = float(seed[-1])
            vals, _ = newton_steady(geometry, drift, nl, seed, trace, trace)
            return GridProfile(geometry, vals)
        if drift.kind == "spatial-log":
            base = member_homog(s)
            trace_l, trace_r = float(base.values[0]), float(base.values[-1])
            vals = base.values
            for tau in (0.25, 0.5, 0.75, 1.0):
                scaled = DriftField(kind="spatial-log", sigma=drift.sigma / tau,
                                    b_func=drift.b_func, ln_N_func=drift.ln_N_func)
                try:
                    vals, _ = newton_steady(geometry, scaled, nl, vals, trace_l, trace_r)
                except SolverFailure:
                    vals = _inflated_retry(s, scaled, trace_l, trace_r)
            return GridProfile(geometry, vals)
        raise InvalidInput("invalid-drift-kind: paths need homogeneous, radial or spatial-log drift")

    def member_homog(s: float) -> GridProfile:
        ivp = solve_radial_weighted(nl, lambda r: np.ones_like(np.asarray(r, dtype=float)), s, d, R, h)
        seed = ivp.values
        trace = float(seed[-1])
        homog = DriftField.homogeneous()
        src = seed if ivp.n == n_grid else np.interp(
            np.linspace(0, 1, n_grid), np.linspace(0, 1, ivp.n), seed)
        vals, _ = newton_steady(geometry, homog, nl, src, trace, trace)
        return GridProfile(geometry, vals)

    def _inflated_retry(s, scaled, trace_l, trace_r):
        R_inf = 1.05 * R
        geom_inf = (DomainGeometry.ball(R_inf, d) if geometry.kind == "ball"
                    else DomainGeometry.interval(R_inf))
        ivp = solve_radial_weighted(nl, lambda r: np.ones_like(np.asarray(r, dtype=float)),
                                    s, d, R_inf, h)
        seed_inf = resample_to_grid(geom_inf, n_grid, ivp.x if ivp.geometry.kind == "ball"
                                    else ivp.x[ivp.n // 2:], ivp.values if ivp.geometry.kind == "ball"
                                    else ivp.values[ivp.n // 2:]).values
        try:
            vals_inf, _ = newton_steady(geom_inf, scaled, nl, seed_inf,
                                        float(seed_inf[0]), float(seed_inf[-1]))
        except SolverFailure as exc:
            raise SolverFailure(f"continuation-failure: resonant member s={s:.6g}") from exc
        x_inf = geom_inf.grid(n_grid)
        x = geometry.grid(n_grid)
        restricted = np.interp(x, x_inf, vals_inf)
        vals, _ = newton_steady(geometry, scaled, nl, restricted,
                                float(restricted[0]), float(restricted[-1]))
        return vals

    s_values = list(np.linspace(0.0, 1.0, K))
    profiles = {s: member(s) for s in s_values}
    while True:
        inserts = []
        for a, b in zip(s_values[:-1], s_values[1:]):
            if profiles[a].sup_distance(profiles[b]) > delta:
                inserts.append(0.5 * (a + b))
        if not inserts:
            break
        if len(s_values) + len(inserts) > max_members:
            raise SolverFailure("continuation-failure: path refinement exceeded member cap")
        for s in inserts:
            profiles[s] = member(s)
        s_values = sorted(s_values + inserts)

    ordered = [profiles[s] for s in s_values]
    max_res = max(steady_residual(geometry, drift, nl, pr.values) for pr in ordered)
    admissible = all(np.min(pr.values) >= -1e-9 and np.max(pr.values) <= 1.0 + 1e-9
                     for pr in ordered)
    return SteadyPath(profiles=ordered, s_values=np.asarray(s_values), delta=delta,
                      admissible=admissible, max_residual=float(max_res))
