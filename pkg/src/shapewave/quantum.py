"""Quantum side: curvature-induced potential, discrete Hamiltonian on a
generalized cylinder, bound-state spectrum, and the wavefunction/mean-
curvature correspondence metric.

The dimensionless eigenproblem solved here is

    [ d^2/ds^2 + coupling * H(s)^2 ] psi = E psi,      E = eps_q^2,

the arclength form of the surface operator on a translationally-invariant
surface (K = 0), with Dirichlet walls one spacing outside the grid.  Bound
states are the eigenvalues above the continuum edge (0 for decaying H).
Conversion to a physical energy is a pure output step, see
:func:`physical_energies`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import InvalidInputError, InvariantViolationError, NoConvergenceError
from .geometry import CurvatureField, Grid1D, _as_float_array

#: Eigenpair residual contract: ||L psi - E psi|| <= EIG_RTOL * ||L||.
EIG_RTOL = 1e-9


@dataclass(frozen=True)
class QuantumParams:
    """Planck constant and effective mass entering the potential scale."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "hbar", float(self.hbar))
        object.__setattr__(self, "mass", float(self.mass))
        for name in ("hbar", "mass"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0.0):
                raise InvariantViolationError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal operator on a uniform grid."""

    diag: np.ndarray
    offdiag: np.ndarray
    grid: Grid1D

    def __post_init__(self):
        d = _as_float_array(self.diag, "diag", 1)
        e = _as_float_array(self.offdiag, "offdiag", 1)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)
        if d.size != self.grid.n:
            raise InvalidInputError(f"diag length {d.size} does not match grid n {self.grid.n}")
        if e.size != d.size - 1:
            raise InvalidInputError(f"offdiag must have length n-1 = {d.size - 1}, got {e.size}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise InvalidInputError("operator entries must be finite")

    @property
    def n(self) -> int:
        return self.diag.size

    def apply(self, vec: np.ndarray) -> np.ndarray:
        out = self.diag * vec
        out[:-1] += self.offdiag * vec[1:]
        out[1:] += self.offdiag * vec[:-1]
        return out

    def norm_bound(self) -> float:
        """Infinity-norm bound max|d| + 2 max|e|."""
        return float(np.max(np.abs(self.diag)) + 2.0 * np.max(np.abs(self.offdiag)))


@dataclass(frozen=True)
class SpectrumResult:
    """Bound-state eigenvalues (descending) with normalized eigenvectors.

    Eigenvectors have unit L2 norm under trapezoid weights and are mutually
    orthogonal under the same inner product.  ``max_residual`` is the worst
    relative eigenpair residual; ``degenerate_pairs`` counts adjacent
    eigenvalues closer than the bisection can separate.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    continuum_edge: float
    n_found: int
    max_residual: float
    degenerate_pairs: int

    def __post_init__(self):
        if self.eigenvalues.size > 1 and not np.all(np.diff(self.eigenvalues) < 0.0):
            raise InvariantViolationError("eigenvalues must be strictly descending")


def geometric_potential(field: CurvatureField, params: QuantumParams) -> np.ndarray:
    """Curvature-induced potential ``-(hbar^2 / 2 mass) (H^2 - K)`` per node.

    Zero on planes and on umbilic (sphere-like) fields where H^2 = K,
    strictly negative wherever the principal curvatures differ.
    """
    return -(params.hbar**2 / (2.0 * params.mass)) * (field.H**2 - field.K)


def build_hamiltonian_1d(Hvals, s: Grid1D, coupling: float = 1.0) -> TridiagonalOperator:
    """Discrete operator ``D2 + coupling * diag(H^2)`` with Dirichlet ends.

    ``coupling`` selects which member of the operator family is assembled:
    1 is the bare surface Schroedinger operator, 2 the elastic one.  A
    profile solving the reduced ODE at a given coupling is an eigenvector
    of the operator assembled at that same coupling, with eigenvalue
    eps^2; this is the solvable equivalence the toolkit verifies.
    """
    H = _as_float_array(Hvals, "Hvals", 1)
    if H.shape != (s.n,):
        raise InvalidInputError(f"Hvals must have shape ({s.n},), got {H.shape}")
    if not np.all(np.isfinite(H)):
        raise InvalidInputError("Hvals must be finite")
    h = s.spacing
    diag = -2.0 / h**2 + float(coupling) * H**2
    offdiag = np.full(s.n - 1, 1.0 / h**2)
    return TridiagonalOperator(diag=diag, offdiag=offdiag, grid=s)


def bound_states(op: TridiagonalOperator, kmax: int = 8,
                 continuum_edge: float = 0.0) -> SpectrumResult:
    """All eigenvalues above ``continuum_edge`` (at most ``kmax``), with
    eigenvectors.

    Backed by bisection on Sturm sequences plus inverse iteration (LAPACK
    stebz/stein via ``eigh_tridiagonal``); every returned pair is checked
    against the residual contract ``||L psi - E psi|| <= 1e-9 ||L||``.
    An empty spectrum is a valid result, not an error.

    For a constant background H = c the continuum edge sits at c^2, not 0;
    pass it explicitly to exclude the box modes below it.
    """
    if kmax < 1:
        raise InvalidInputError(f"kmax must be >= 1, got {kmax}")
    upper = op.norm_bound() + 1.0
    n = op.n
    if upper <= continuum_edge:
        return SpectrumResult(eigenvalues=np.empty(0), eigenvectors=np.empty((0, n)),
                              continuum_edge=continuum_edge, n_found=0,
                              max_residual=0.0, degenerate_pairs=0)
    try:
        w, v = eigh_tridiagonal(op.diag, op.offdiag, select="v",
                                select_range=(continuum_edge, upper))
    except LinAlgError as exc:
        raise NoConvergenceError(f"eigensolver failed: {exc}") from exc

    # descending, truncated to kmax
    w = w[::-1][:kmax].copy()
    v = v[:, ::-1][:, :kmax].copy()
    k = w.size

    norm = op.norm_bound()
    gap_floor = 1e-12 * norm
    degenerate = int(np.sum(np.abs(np.diff(w)) < gap_floor)) if k > 1 else 0

    weights = op.grid.trapezoid_weights()
    vectors = np.empty((k, n))
    max_rel_residual = 0.0
    for i in range(k):
        psi = v[:, i]
        residual = float(np.linalg.norm(op.apply(psi) - w[i] * psi)
                         / np.linalg.norm(psi))
        max_rel_residual = max(max_rel_residual, residual / norm)
        if residual > EIG_RTOL * norm:
            raise NoConvergenceError(
                f"eigenpair {i} violates the residual contract: "
                f"{residual:.3e} > {EIG_RTOL * norm:.3e}",
                residual_norm=residual, iterations=i)
        # orthonormalize under the trapezoid inner product
        for j in range(i):
            psi = psi - np.sum(weights * psi * vectors[j]) * vectors[j]
        psi = psi / np.sqrt(np.sum(weights * psi * psi))
        if psi[np.argmax(np.abs(psi))] < 0.0:
            psi = -psi
        vectors[i] = psi

    return SpectrumResult(eigenvalues=w, eigenvectors=vectors,
                          continuum_edge=continuum_edge, n_found=k,
                          max_residual=max_rel_residual, degenerate_pairs=degenerate)


def correspondence_metric(psi, Hvals, s: Grid1D) -> float:
    """Sign-minimized L2 distance between unit-normalized psi and H.

    Both fields are normalized under trapezoid weights; the result is
    ``min over signs ||sigma psi_hat - H_hat|| / ||H_hat||``, zero exactly
    when psi is proportional to H.
    """
    p = _as_float_array(psi, "psi", 1)
    H = _as_float_array(Hvals, "Hvals", 1)
    if p.shape != (s.n,) or H.shape != (s.n,):
        raise InvalidInputError(
            f"psi and Hvals must both have shape ({s.n},), got {p.shape} and {H.shape}")
    weights = s.trapezoid_weights()
    norm_p = np.sqrt(np.sum(weights * p * p))
    norm_H = np.sqrt(np.sum(weights * H * H))
    if norm_H == 0.0:
        raise InvalidInputError("correspondence undefined for identically-zero H (flat case)")
    if norm_p == 0.0:
        raise InvalidInputError("psi must not be identically zero")
    p_hat = p / norm_p
    H_hat = H / norm_H
    return float(min(np.sqrt(np.sum(weights * (sigma * p_hat - H_hat) ** 2))
                     for sigma in (1.0, -1.0)))


def physical_energies(result: SpectrumResult, params: QuantumParams) -> np.ndarray:
    """Convert dimensionless eigenvalues eps_q^2 to E = hbar^2 eps_q^2 / (2 mass)."""
    return params.hbar**2 * result.eigenvalues / (2.0 * params.mass)
