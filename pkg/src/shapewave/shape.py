"""Elastic membrane side: bending energy, equilibrium shape-equation
residual, the translationally-invariant reduced ODE, its analytic
solutions, and a damped-Newton boundary-value solver.

The reduced equation in arclength form is

    d^2 H / ds^2 + alpha * H^3 = eps^2 * H

with ``alpha = 2`` for the elastic coupling and ``alpha = 1`` for the
quantum one.  It has the constant solution ``H = eps/sqrt(alpha)`` (the
uniform circular cylinder) and the localized solution

    H(s) = eps * sqrt(2/alpha) * sech(eps * s).

Note the sech amplitude: direct substitution fixes it to
``eps*sqrt(2/alpha)``.  The value ``eps/sqrt(alpha)`` sometimes quoted for
this equation coincides with the constant solution's amplitude and does
not satisfy the ODE; the test suite demonstrates both facts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidInputError, InvariantViolationError, NoConvergenceError
from .geometry import (Grid1D, MongePatch, _as_float_array, curvature_fields,
                       laplace_beltrami_apply)

#: Default max-norm tolerance for the Newton iteration on the reduced ODE.
TOL_NEWTON = 1e-10


@dataclass(frozen=True)
class MembraneParams:
    """Material constants of the bending-energy functional."""

    k_c: float = 1.0      # bending rigidity
    lam: float = 0.0      # surface tension
    delta_p: float = 0.0  # pressure difference across the membrane
    c0: float = 0.0       # spontaneous curvature

    def __post_init__(self):
        for name in ("k_c", "lam", "delta_p", "c0"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (np.isfinite(self.k_c) and self.k_c > 0.0):
            raise InvariantViolationError(f"bending rigidity k_c must be positive, got {self.k_c}")
        if not (np.isfinite(self.lam) and self.lam >= 0.0):
            raise InvariantViolationError(f"surface tension must be >= 0, got {self.lam}")
        if not (np.isfinite(self.delta_p) and np.isfinite(self.c0)):
            raise InvariantViolationError("delta_p and c0 must be finite")

    @property
    def eps(self) -> float:
        """Inverse decay length, eps^2 = tension / rigidity."""
        return math.sqrt(self.lam / self.k_c)


@dataclass(frozen=True)
class ReducedProblem:
    """Reduced translationally-invariant problem on an arclength grid."""

    alpha: float
    eps: float
    s: Grid1D

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "eps", float(self.eps))
        if self.alpha not in (1.0, 2.0):
            raise InvariantViolationError(f"coupling alpha must be exactly 1 or 2, got {self.alpha}")
        if not (np.isfinite(self.eps) and self.eps > 0.0):
            raise InvariantViolationError(f"eps must be positive, got {self.eps}")


class HelfrichEnergy(NamedTuple):
    bending: float
    tension: float
    total: float


@dataclass(frozen=True)
class BvpResult:
    """Outcome of the reduced-ODE Newton solve.

    ``trivial_branch`` flags convergence to the identically-zero solution,
    which is a valid fixed point but usually not the intended one.
    """

    H: np.ndarray
    iterations: int
    residual_norm: float
    trivial_branch: bool


def helfrich_energy(patch: MongePatch, params: MembraneParams) -> HelfrichEnergy:
    """Bending and tension energy of a patch by midpoint quadrature.

    Sums ``(1/2) k_c (2H - c0)^2 sqrt(g)`` and ``lam * sqrt(g)`` over the
    valid (interior) nodes with cell weight hx*hy.  The pressure-volume
    term is omitted: open membranes in a homogeneous medium carry no
    pressure difference.
    """
    fld = curvature_fields(patch)
    v = fld.valid
    cell = patch.hx * patch.hy
    bending = 0.5 * params.k_c * float(np.sum((2.0 * fld.H[v] - params.c0) ** 2
                                              * fld.sqrt_g[v])) * cell
    tension = params.lam * float(np.sum(fld.sqrt_g[v])) * cell
    return HelfrichEnergy(bending=bending, tension=tension, total=bending + tension)


def shape_residual_general(patch: MongePatch, params: MembraneParams) -> np.ndarray:
    """Residual of the general equilibrium shape equation per node.

        2 lam H - delta_p - 2 k_c Lap_S(H) - k_c (2H^2 - 2K - c0 H)(2H + c0)

    H itself is differenced, so the two outermost node rings are NaN.
    Equilibrium surfaces drive the valid-node residual to zero at O(h^2).
    """
    if patch.nx < 5 or patch.ny < 5:
        raise InvalidInputError("patch too small for the doubly-differenced residual")
    fld = curvature_fields(patch)
    H, K = fld.H, fld.K
    lap_H = laplace_beltrami_apply(patch, H)
    res = (2.0 * params.lam * H - params.delta_p - 2.0 * params.k_c * lap_H
           - params.k_c * (2.0 * H**2 - 2.0 * K - params.c0 * H) * (2.0 * H + params.c0))
    res[:2, :] = np.nan
    res[-2:, :] = np.nan
    res[:, :2] = np.nan
    res[:, -2:] = np.nan
    return res


def reduced_ode_residual(Hvals, problem: ReducedProblem) -> np.ndarray:
    """Pointwise residual ``H'' + alpha H^3 - eps^2 H`` on the grid.

    Centered second differences; the two endpoint entries are NaN.  The
    symmetric association (H[i+1] + H[i-1]) - 2 H[i] keeps the residual
    bitwise even for even input.
    """
    H = _as_float_array(Hvals, "Hvals", 1)
    if H.shape != (problem.s.n,):
        raise InvalidInputError(f"Hvals must have shape ({problem.s.n},), got {H.shape}")
    if not np.all(np.isfinite(H)):
        raise InvalidInputError("Hvals must be finite")
    h = problem.s.spacing
    res = np.full(problem.s.n, np.nan)
    res[1:-1] = ((H[2:] + H[:-2] - 2.0 * H[1:-1]) / h**2
                 + problem.alpha * H[1:-1] ** 3 - problem.eps**2 * H[1:-1])
    return res


def constant_solution(problem: ReducedProblem) -> float:
    """Amplitude eps/sqrt(alpha) of the constant (uniform cylinder) solution."""
    return problem.eps / math.sqrt(problem.alpha)


def soliton_profile(problem: ReducedProblem) -> np.ndarray:
    """Localized solution ``eps*sqrt(2/alpha) * sech(eps*s)`` on the grid.

    The amplitude is the one fixed by substitution into the reduced ODE:
    A^2 = 2 eps^2 / alpha.
    """
    amp = problem.eps * math.sqrt(2.0 / problem.alpha)
    return amp / np.cosh(problem.eps * problem.s.nodes)


def _flip_averaged_solve(diag: np.ndarray, off: float, rhs: np.ndarray) -> np.ndarray:
    # Solve the symmetric tridiagonal system twice, once on the flipped
    # system, and average.  Mathematically a no-op; in floating point it
    # removes the directional bias of the banded LU, so an even problem
    # yields a bitwise-even step.
    m = diag.size
    ab = np.zeros((3, m))
    ab[0, 1:] = off
    ab[1] = diag
    ab[2, :-1] = off
    x1 = solve_banded((1, 1), ab, rhs)
    abf = np.zeros((3, m))
    abf[0, 1:] = off
    abf[1] = diag[::-1]
    abf[2, :-1] = off
    x2 = solve_banded((1, 1), abf, rhs[::-1])[::-1]
    return 0.5 * (x1 + x2)


def solve_reduced_bvp(problem: ReducedProblem, init, tol: float = TOL_NEWTON,
                      max_iter: int = 100, max_halvings: int = 30) -> BvpResult:
    """Damped Newton iteration for the reduced ODE with H = 0 at both ends.

    The Jacobian is the tridiagonal ``D2 + diag(3 alpha H^2 - eps^2)``.
    Steps are halved until the residual max-norm decreases.  Convergence to
    the zero solution is reported via ``trivial_branch`` rather than as an
    error.

    Raises
    ------
    NoConvergenceError
        If the iteration exhausts ``max_iter`` or produces non-finite
        values; carries the last residual norm.
    """
    H0 = _as_float_array(init, "init", 1)
    if H0.shape != (problem.s.n,):
        raise InvalidInputError(f"init must have shape ({problem.s.n},), got {H0.shape}")
    if not np.all(np.isfinite(H0)):
        raise InvalidInputError("init must be finite")

    h = problem.s.spacing
    alpha, eps2 = problem.alpha, problem.eps**2
    H = H0.copy()
    H[0] = H[-1] = 0.0

    def interior_residual(Hv):
        return ((Hv[2:] + Hv[:-2] - 2.0 * Hv[1:-1]) / h**2
                + alpha * Hv[1:-1] ** 3 - eps2 * Hv[1:-1])

    r = interior_residual(H)
    rnorm = float(np.max(np.abs(r)))
    iterations = 0
    while rnorm > tol:
        if iterations >= max_iter or not np.isfinite(rnorm):
            raise NoConvergenceError(
                f"Newton iteration did not converge: residual {rnorm:.3e} after "
                f"{iterations} iterations", residual_norm=rnorm, iterations=iterations)
        iterations += 1
        jac_diag = -2.0 / h**2 + 3.0 * alpha * H[1:-1] ** 2 - eps2
        step = _flip_averaged_solve(jac_diag, 1.0 / h**2, -r)
        scale = 1.0
        for _ in range(max_halvings):
            trial = H.copy()
            trial[1:-1] += scale * step
            r_trial = interior_residual(trial)
            rnorm_trial = float(np.max(np.abs(r_trial)))
            if rnorm_trial < rnorm:
                break
            scale *= 0.5
        H, r, rnorm = trial, r_trial, rnorm_trial

    amp_scale = problem.eps * math.sqrt(2.0 / problem.alpha)
    trivial = bool(np.max(np.abs(H)) < 1e-3 * amp_scale)
    return BvpResult(H=H, iterations=iterations, residual_norm=rnorm,
                     trivial_branch=trivial)
