"""Differential entropies of gridded densities (nats) and the bounds they obey."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import GridSpec
from .report import VerificationReport
from .symplectic import CommutatorMatrix, SymplecticMatrix, log_abs_det_commutator, log_abs_det_or_neginf

ALPHA_ONE_ATOL = 1e-6


def _check_density(density: np.ndarray, grid: GridSpec, tol: float = 1e-6) -> np.ndarray:
    p = np.asarray(density, dtype=float)
    if p.shape != grid.shape:
        raise ValueError(f"density shape {p.shape} does not match grid {grid.shape}")
    if np.min(p) < -1e-12:
        raise ValueError(f"density has negative entries (min {np.min(p):.3e})")
    p = np.clip(p, 0.0, None)
    mass = p.sum() * grid.cell_volume
    if abs(mass - 1.0) > tol:
        raise ValueError(f"density integrates to {mass:.8f}, expected 1")
    return p


def shannon_entropy(density: np.ndarray, grid: GridSpec) -> float:
    """-sum p ln p * cell volume, with 0 ln 0 = 0."""
    p = _check_density(density, grid)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)) * grid.cell_volume)


def renyi_entropy(density: np.ndarray, grid: GridSpec, alpha: float) -> float:
    """ln(sum p^alpha * cell volume) / (1 - alpha); Shannon within 1e-6 of alpha = 1."""
    if not alpha > 0:
        raise ValueError(f"Renyi order must be positive, got {alpha}")
    if abs(alpha - 1.0) < ALPHA_ONE_ATOL:
        return shannon_entropy(density, grid)
    p = _check_density(density, grid)
    nz = p[p > 0]
    return float(np.log(np.sum(nz**alpha) * grid.cell_volume) / (1.0 - alpha))


def gaussian_entropy(cov) -> float:
    """Shannon entropy of an n-variate Gaussian: ln((2 pi e)^n det cov) / 2."""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0 or np.linalg.eigvalsh(0.5 * (cov + cov.T))[0] <= 0:
        raise ValueError("covariance matrix is not positive definite")
    n = cov.shape[0]
    return 0.5 * (n * np.log(2 * np.pi * np.e) + logdet)


def renyi_log_term(alpha: float) -> float:
    """ln(alpha) / (2 (alpha - 1)), continuous at alpha = 1 where it equals 1/2."""
    if alpha == 1.0:
        return 0.5
    return float(np.log1p(alpha - 1.0) / (2.0 * (alpha - 1.0)))


def gaussian_renyi_entropy(cov, alpha: float) -> float:
    """Renyi entropy of order alpha of an n-variate Gaussian density."""
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    n = cov.shape[0]
    sign, logdet = np.linalg.slogdet(cov)
    if sign <= 0:
        raise ValueError("covariance matrix is not positive definite")
    return 0.5 * (n * np.log(2 * np.pi) + logdet) + n * renyi_log_term(alpha)


@dataclass(frozen=True)
class RenyiOrderPair:
    """Conjugate orders with 1/alpha + 1/beta = 2."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > 0 and self.beta > 0):
            raise ValueError("Renyi orders must be positive")
        if abs(1 / self.alpha + 1 / self.beta - 2) > 1e-12:
            raise ValueError(f"orders ({self.alpha}, {self.beta}) are not conjugate")

    @classmethod
    def conjugate(cls, alpha: float) -> "RenyiOrderPair":
        """Partner order beta = alpha / (2 alpha - 1); needs alpha > 1/2."""
        if not alpha > 0.5:
            raise ValueError("conjugate order exists only for alpha > 1/2")
        return cls(alpha, alpha / (2 * alpha - 1))


def renyi_bound(A: SymplecticMatrix, B: SymplecticMatrix, pair: RenyiOrderPair) -> float:
    """n ln(alpha)/(2(alpha-1)) + n ln(beta)/(2(beta-1)) + n ln(pi) + ln|det K|."""
    n = A.n
    return n * (renyi_log_term(pair.alpha) + renyi_log_term(pair.beta) + np.log(np.pi)) + log_abs_det_commutator(A, B)


def entropy_power(h: float, n: int) -> float:
    """exp(2 h / n) / (2 pi e): per-axis variance of the Gaussian with entropy h."""
    if not np.isfinite(h):
        raise ValueError("entropy power needs a finite entropy")
    return float(np.exp(2.0 * h / n) / (2 * np.pi * np.e))


def _check_pd(g: np.ndarray, name: str) -> np.ndarray:
    g = np.atleast_2d(np.asarray(g, dtype=float))
    if g.shape[0] != g.shape[1] or not np.allclose(g, g.T, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(g)))):
        raise ValueError(f"{name} must be a symmetric matrix")
    if np.linalg.eigvalsh(0.5 * (g + g.T))[0] <= 0:
        raise ValueError(f"{name} is not positive definite")
    return g


def covariance_bound_check(
    gammaA, gammaB, K: CommutatorMatrix, tolerance: float = 1e-9, scale: float = 1.0
) -> VerificationReport:
    """sqrt(det gammaA det gammaB) against |det K| / 2^n.

    ``scale`` sets the det K = 0 threshold (see log_abs_det_or_neginf); a
    vanishing det K marks the report vacuous.
    """
    gA = _check_pd(gammaA, "gammaA")
    gB = _check_pd(gammaB, "gammaB")
    n = gA.shape[0]
    if gB.shape != gA.shape or K.n != n:
        raise ValueError("covariances and commutator matrix must all be n x n")
    lhs = float(np.sqrt(np.linalg.det(gA) * np.linalg.det(gB)))
    rhs = K.abs_det / 2**n
    degenerate = log_abs_det_or_neginf(K.m, scale) == -np.inf
    return VerificationReport("theorem3", n=n, N=n, lhs=lhs, bound=rhs, tolerance=tolerance, degenerate=degenerate)
