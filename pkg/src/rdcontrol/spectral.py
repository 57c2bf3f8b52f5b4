"""First Dirichlet eigenvalues, plain and weighted, and the uniqueness
certificates built on them.

The discrete eigenproblem is the variational one: minimize

    sum_cells w_{i+1/2} m_{i+1/2} (p_{i+1}-p_i)^2 / h
    -----------------------------------------------
    sum_nodes w_i m_i p_i^2 h

over grid functions vanishing at Dirichlet nodes, where m = r^{d-1} is
the radial cell measure (1 on an interval).  The stiffness matrix is
symmetric positive definite and tridiagonal; the smallest eigenvalue is
found by inverse power iteration with the weighted mass matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .elliptic import solve_tridiagonal
from .errors import InvalidInput, SolverFailure
from .model import BistableNonlinearity, DomainGeometry, DriftField, GridProfile, lipschitz_and_sup_fprime

__all__ = [
    "EigenResult",
    "Certificate",
    "dirichlet_lambda1",
    "weighted_lambda1",
    "lambda_sigma",
    "lambda1_whole_space",
    "uniqueness_certificate",
]


@dataclass(frozen=True)
class EigenResult:
    lambda_: float
    eigenprofile: GridProfile
    iterations: int
    residual: float


def _weight_on_grid(weight, x: np.ndarray) -> np.ndarray:
    w = np.asarray(weight(x) if callable(weight) else weight, dtype=float)
    if w.shape != x.shape:
        raise InvalidInput("invalid-weight: weight shape does not match grid")
    if np.any(w <= 0.0) or not np.all(np.isfinite(w)):
        raise InvalidInput("invalid-weight: weight must be positive and finite")
    return w


def weighted_lambda1(geometry: DomainGeometry, weight, n: int, tol: float = 1e-12,
                     max_iter: int = 10000) -> EigenResult:
    """Smallest eigenvalue of the weighted Dirichlet form.

    ``weight`` is a callable or an array of positive values on the
    geometry grid (w = N^2 or N^{2/sigma}); the quotient is invariant
    under rescaling of w.
    """
    if n < 32:
        raise InvalidInput("invalid-grid: eigenvalue solves need n >= 32")
    x = geometry.grid(n)
    h = x[1] - x[0]
    w = _weight_on_grid(weight, x)
    w = w / np.max(w)  # scale invariance; keeps strong drifts in range

    if geometry.kind == "ball":
        measure = np.maximum(x, 0.0) ** (geometry.d - 1) if geometry.d > 1 else np.ones_like(x)
        free = np.arange(0, n - 1)  # r = 0 is a natural (Neumann) node
    else:
        measure = np.ones_like(x)
        free = np.arange(1, n - 1)

    w_mid = 0.5 * (w[:-1] + w[1:])
    m_mid = 0.5 * (measure[:-1] + measure[1:])
    k_edge = w_mid * m_mid / h  # stiffness contribution of each cell

    nf = free.size
    diag = np.zeros(nf)
    lower = np.zeros(nf)
    upper = np.zeros(nf)
    pos = {j: i for i, j in enumerate(free)}
    for i, j in enumerate(free):
        if j > 0:
            diag[i] += k_edge[j - 1]
            if (j - 1) in pos:
                lower[i] = -k_edge[j - 1]
        if j < n - 1:
            diag[i] += k_edge[j]
            if (j + 1) in pos:
                upper[i] = -k_edge[j]

    mass = w[free] * measure[free] * h
    if geometry.kind == "ball" and geometry.d > 1:
        # origin node: lumped mass of the half cell [0, h/2]
        mass[0] = w[0] * (h / 2.0) ** geometry.d / geometry.d
    if np.any(mass <= 0.0):
        raise InvalidInput("invalid-weight: degenerate mass matrix")

    u = np.sin(np.pi * (np.arange(nf) + 1) / (nf + 1))
    u /= np.sqrt(u @ (mass * u))
    lam_prev = np.inf
    lam = 0.0
    for it in range(1, max_iter + 1):
        rhs = mass * u
        v = solve_tridiagonal(lower, diag, upper, rhs)
        ku = diag * v
        ku[1:] += lower[1:] * v[:-1]
        ku[:-1] += upper[:-1] * v[1:]
        lam = float((v @ ku) / (v @ (mass * v)))
        u = v / np.sqrt(v @ (mass * v))
        if abs(lam - lam_prev) < tol:
            break
        lam_prev = lam
    else:
        raise SolverFailure("eigen-stall: inverse iteration did not converge")

    ku = diag * u
    ku[1:] += lower[1:] * u[:-1]
    ku[:-1] += upper[:-1] * u[1:]
    residual = float(np.max(np.abs(ku - lam * mass * u)) / np.max(np.abs(ku)))
    full = np.zeros(n)
    full[free] = u if u[np.argmax(np.abs(u))] > 0 else -u
    full /= np.max(np.abs(full))
    return EigenResult(lambda_=lam, eigenprofile=GridProfile(geometry, full),
                       iterations=it, residual=residual)


def dirichlet_lambda1(geometry: DomainGeometry, n: int) -> EigenResult:
    """First Laplace-Dirichlet eigenvalue of the geometry."""
    return weighted_lambda1(geometry, lambda x: np.ones_like(x), n)


def lambda_sigma(geometry: DomainGeometry, drift: DriftField, n: int) -> EigenResult:
    """Weighted eigenvalue with the drift's own weight N^{2/sigma}."""
    shift = float(np.max((2.0 / drift.sigma) * drift.ln_N(geometry.grid(n))))
    return weighted_lambda1(geometry, lambda x: drift.weight_sigma(x, shift=shift), n)


def lambda1_whole_space(drift: DriftField, d: int, n_per_unit: int = 96,
                        tol: float = 1e-3, r_start: float = 2.0, r_max: float = 64.0) -> float:
    """Whole-space weighted eigenvalue, approximated on growing balls
    until the value changes by less than ``tol`` relative."""
    R = r_start
    prev = None
    while R <= r_max:
        geom = DomainGeometry.ball(R, d) if d > 1 else DomainGeometry.interval(R)
        n = max(65, int(n_per_unit * R) | 1)
        lam = weighted_lambda1(geom, lambda x: drift.weight2(x), n).lambda_
        if prev is not None and abs(lam - prev) <= tol * max(abs(lam), 1e-30):
            return lam
        prev = lam
        R *= 2.0
    return float(prev)


@dataclass(frozen=True)
class Certificate:
    holds: bool
    lhs: float
    rhs: float
    which: str
    lipschitz_M: float
    sup_fprime: float


def uniqueness_certificate(nl: BistableNonlinearity, drift: DriftField,
                           geometry: DomainGeometry, which: str = "zero-bc",
                           n: int = 513) -> Certificate:
    """Sufficient uniqueness conditions for the steady problem.

    zero-bc: lambda_1^D(Omega) > M * exp(eps ||n||_inf), the conservative
    slowly-varying criterion (homogeneous drifts have eps ||n||_inf = 0).
    general: weighted lambda with weight N^{2/sigma} > M.

    M is the Lipschitz constant of f; for a C^1 nonlinearity on [0,1] it
    coincides with sup |f'|, which is reported alongside.
    """
    M, sup_fp = lipschitz_and_sup_fprime(nl)
    if which == "zero-bc":
        if drift.kind not in ("homogeneous", "spatial-log"):
            raise InvalidInput("assumption-inapplicable: zero-bc certificate needs "
                               "a homogeneous or slowly-varying drift")
        lam = dirichlet_lambda1(geometry, n).lambda_
        amp = drift.eps_n_inf(geometry.grid(n))
        rhs = M * float(np.exp(amp))
        return Certificate(holds=lam > rhs, lhs=lam, rhs=rhs, which=which,
                           lipschitz_M=M, sup_fprime=sup_fp)
    if which == "general":
        lam = lambda_sigma(geometry, drift, n).lambda_
        return Certificate(holds=lam > M, lhs=lam, rhs=M, which=which,
                           lipschitz_M=M, sup_fprime=sup_fp)
    raise InvalidInput(f"invalid-certificate: {which}")
