"""Gaussian states with closed-form statistics, plus non-Gaussian grid states.

Covariances use gamma_ij = <{r_i, r_j}>/2 - <r_i><r_j> with vacuum gamma = 1/2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .entropy import gaussian_entropy
from .errors import DimensionError, NotPure
from .grid import GridSpec, GriddedWaveFunction, broadcast_axes, check_edges
from .lct import chirp_apply
from .symplectic import SymplecticMatrix, random_symplectic, symplectic_form


@dataclass(frozen=True)
class GaussianState:
    mean: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).ravel().copy()
        gamma = np.atleast_2d(np.asarray(self.gamma, dtype=float)).copy()
        if gamma.shape != (mean.size, mean.size) or mean.size % 2:
            raise DimensionError(f"need 2N mean and 2N x 2N gamma, got {mean.shape}, {gamma.shape}")
        if not np.allclose(gamma, gamma.T, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(gamma)))):
            raise ValueError("covariance matrix must be symmetric")
        gamma = 0.5 * (gamma + gamma.T)
        mean.setflags(write=False)
        gamma.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "gamma", gamma)

    @property
    def N(self) -> int:
        return self.mean.size // 2

    def is_admissible(self, tol: float = 1e-10) -> bool:
        """gamma > 0 and gamma + i J / 2 >= 0."""
        if np.linalg.eigvalsh(self.gamma)[0] <= 0:
            return False
        herm = self.gamma + 0.5j * symplectic_form(self.N)
        return bool(np.linalg.eigvalsh(herm)[0] >= -tol * max(1.0, np.max(np.abs(self.gamma))))

    def is_pure(self, rtol: float = 1e-8) -> bool:
        return abs(np.linalg.det(self.gamma) * 4.0**self.N - 1.0) <= rtol

    def transformed(self, S: SymplecticMatrix) -> "GaussianState":
        if S.n != self.N:
            raise DimensionError(f"{S.n}-mode matrix on a {self.N}-mode state")
        return GaussianState(S.entries @ self.mean, S.entries @ self.gamma @ S.entries.T)

    def to_dict(self) -> dict:
        return {"N": self.N, "mean": self.mean.tolist(), "gamma": self.gamma.ravel().tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianState":
        N = int(data["N"])
        mean = np.asarray(data.get("mean", np.zeros(2 * N)), dtype=float)
        gamma = np.asarray(data["gamma"], dtype=float)
        if gamma.size != 4 * N * N or mean.size != 2 * N:
            raise DimensionError(f"state arrays do not match N={N}")
        return cls(mean, gamma.reshape(2 * N, 2 * N))


def vacuum(N: int) -> GaussianState:
    return GaussianState(np.zeros(2 * N), 0.5 * np.eye(2 * N))


def squeezed(N: int, s) -> GaussianState:
    """x-squeezed vacuum: gamma = diag(e^{-2s}/2 (x), e^{2s}/2 (p)) per mode."""
    s = np.broadcast_to(np.asarray(s, dtype=float), (N,))
    return GaussianState(np.zeros(2 * N), 0.5 * np.diag(np.concatenate([np.exp(-2 * s), np.exp(2 * s)])))


def correlated_gaussian(N: int, seed: int, displacement: float = 0.5) -> GaussianState:
    """Pure Gaussian S (1/2) S^T with S = random_symplectic(N, seed) and a random mean."""
    S = random_symplectic(N, seed)
    mean = np.random.default_rng(seed + 7919).uniform(-displacement, displacement, 2 * N)
    return GaussianState(mean, 0.5 * S.entries @ S.entries.T)


def marginal_covariance(state: GaussianState, S: SymplecticMatrix, n: int | None = None) -> np.ndarray:
    """Covariance of the first n output quadratures of S: top-left block of S gamma S^T."""
    if S.n != state.N:
        raise DimensionError(f"{S.n}-mode matrix on a {state.N}-mode state")
    n = state.N if n is None else n
    if not 1 <= n <= state.N:
        raise DimensionError(f"cannot measure {n} of {state.N} modes")
    top = S.entries[:n]
    return top @ state.gamma @ top.T


def gaussian_measurement_entropy(state: GaussianState, S: SymplecticMatrix, n: int | None = None) -> float:
    """Shannon entropy of the outcome distribution of the first n quadratures of S."""
    return gaussian_entropy(marginal_covariance(state, S, n))


def gaussian_wavefunction(state: GaussianState, grid: GridSpec) -> GriddedWaveFunction:
    """Sample a pure Gaussian state as exp(-(x-x0)^T (Vr + i Vi) (x-x0)/2 + i p0.x).

    Vr = gamma_xx^{-1} / 2 and Vi = -gamma_xx^{-1} gamma_xp, which reproduce
    gamma_xx, gamma_xp and (for a pure state) gamma_pp.
    """
    N = state.N
    if grid.n != N:
        raise DimensionError(f"{N}-mode state on a {grid.n}-D grid")
    if not state.is_pure():
        raise NotPure(f"det(gamma) * 4^N = {np.linalg.det(state.gamma) * 4.0**N:.6g}")
    gxx = state.gamma[:N, :N]
    gxp = state.gamma[:N, N:]
    gxx_inv = np.linalg.inv(gxx)
    Vr = 0.5 * gxx_inv
    Vi = -gxx_inv @ gxp
    Vi = 0.5 * (Vi + Vi.T)
    x0, p0 = state.mean[:N], state.mean[N:]

    axes = broadcast_axes([ax - c for ax, c in zip(grid.axes(), x0)])
    quad = np.zeros(grid.shape)
    for i in range(N):
        for j in range(N):
            quad = quad + Vr[i, j] * axes[i] * axes[j]
    lin = sum(p * ax for p, ax in zip(p0, broadcast_axes(grid.axes())))
    norm = (np.linalg.det(Vr) / np.pi**N) ** 0.25
    wf = GriddedWaveFunction(grid, norm * np.exp(-0.5 * quad + 1j * lin))
    # the x0-centred chirp exp(-i (x-x0)^T Vi (x-x0)/2) differs from a chirp
    # about 0 by a linear phase, added here
    shift = Vi @ x0
    wf = chirp_apply(wf, -Vi)
    if np.any(shift):
        wf = GriddedWaveFunction(grid, wf.amplitudes * np.exp(1j * sum(v * ax for v, ax in zip(shift, broadcast_axes(grid.axes())))))
    check_edges(wf, "gaussian_wavefunction")
    return wf


def hermite_functions(kmax: int, x: np.ndarray) -> np.ndarray:
    """Normalized Hermite functions psi_0..psi_kmax at x, by the stable recurrence

    psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1, *x.shape))
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x**2)
    if kmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for k in range(1, kmax):
        out[k + 1] = np.sqrt(2.0 / (k + 1)) * x * out[k] - np.sqrt(k / (k + 1)) * out[k - 1]
    return out


def _product_state(grid: GridSpec, factors) -> GriddedWaveFunction:
    amp = np.ones(grid.shape, dtype=complex)
    for v in broadcast_axes(factors):
        amp = amp * v
    return GriddedWaveFunction(grid, amp)


def fock_wavefunction(k, grid: GridSpec) -> GriddedWaveFunction:
    """Number state |k> on every axis (pass a sequence for per-axis k)."""
    ks = np.broadcast_to(np.asarray(k, dtype=int), (grid.n,))
    if np.any(ks < 0):
        raise ValueError("Fock index must be non-negative")
    wf = _product_state(grid, [hermite_functions(int(kk), ax)[-1] for kk, ax in zip(ks, grid.axes())])
    check_edges(wf, "fock_wavefunction")
    return wf


def coherent_amplitudes(alpha: complex, x: np.ndarray) -> np.ndarray:
    """<x|alpha> with <x> = sqrt(2) Re(alpha), <p> = sqrt(2) Im(alpha)."""
    x0, p0 = np.sqrt(2) * alpha.real, np.sqrt(2) * alpha.imag
    return np.pi**-0.25 * np.exp(-0.5 * (x - x0) ** 2 + 1j * p0 * x - 0.5j * x0 * p0)


def cat_wavefunction(amplitude: complex, grid: GridSpec) -> GriddedWaveFunction:
    """Even cat (|alpha> + |-alpha>) / sqrt(2 (1 + exp(-2|alpha|^2))) on every axis."""
    alpha = complex(amplitude)
    norm = np.sqrt(2 * (1 + np.exp(-2 * abs(alpha) ** 2)))
    factors = [(coherent_amplitudes(alpha, ax) + coherent_amplitudes(-alpha, ax)) / norm for ax in grid.axes()]
    wf = _product_state(grid, factors)
    check_edges(wf, "cat_wavefunction")
    return wf
