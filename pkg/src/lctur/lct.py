"""Linear canonical transforms of gridded wavefunctions.

F_S[f](y) = C_{d b^-1} D_{b^-1} F C_{b^-1 a} [f](y) for S = [[a, b], [c, d]],
with the continuous Fourier convention (2 pi)^{-n/2} int f(x) exp(-i k.x) dx.
Only the principal square-root prefactor (2 pi)^{-n/2} |det b|^{-1/2} is used;
global phases are not part of any contract.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage

from .errors import DimensionError, NonInvertibleBBlock, SizeGuardExceeded
from .grid import GridSpec, GriddedWaveFunction, broadcast_axes
from .symplectic import (
    SymplecticMatrix,
    b_block_singular,
    compose,
    decompose,
    fourier_form,
    inverse,
    rotation,
)

DIRECT_MAX_SAMPLES = 2**16
_DIRECT_CHUNK = 2**22  # kernel entries evaluated per block


def _is_diagonal(m: np.ndarray) -> bool:
    return not np.any(m - np.diag(np.diag(m)))


def fourier_grid(grid: GridSpec) -> GridSpec:
    """Conjugate grid: spacing 2 pi / (points * spacing) on each axis."""
    return GridSpec(grid.points, tuple(2 * np.pi / (p * s) for p, s in zip(grid.points, grid.spacing)))


def fourier_nd(wf: GriddedWaveFunction) -> GriddedWaveFunction:
    """Continuous-convention Fourier transform on symmetric grids.

    With x_m = x0 + m dx and k_j = k0 + j dk, dx dk = 2 pi / N, the sum
    sum_m f_m exp(-i x_m k_j) is an ordinary DFT once f is modulated by
    exp(-i k0 dx m) and the output by exp(-i x0 (k0 + j dk)). The result is
    exactly unitary, and four applications return the input.
    """
    grid = wf.grid
    kgrid = fourier_grid(grid)
    pre, post = [], []
    for p, x0, k0, dx, dk in zip(grid.points, grid.origin, kgrid.origin, grid.spacing, kgrid.spacing):
        idx = np.arange(p)
        pre.append(np.exp(-1j * k0 * dx * idx))
        post.append(np.exp(-1j * x0 * (k0 + dk * idx)))
    g = wf.amplitudes
    for v in broadcast_axes(pre):
        g = g * v
    g = np.fft.fftn(g)
    for v in broadcast_axes(post):
        g = g * v
    g *= np.prod(grid.spacing) / (2 * np.pi) ** (grid.n / 2)
    return GriddedWaveFunction(kgrid, g)


def _quadratic_form(grid: GridSpec, r: np.ndarray) -> np.ndarray:
    axes = broadcast_axes(grid.axes())
    q = np.zeros(grid.shape)
    for i in range(grid.n):
        for j in range(grid.n):
            if r[i, j]:
                q = q + r[i, j] * axes[i] * axes[j]
    return q


def chirp_apply(wf: GriddedWaveFunction, r) -> GriddedWaveFunction:
    """Multiply by exp(i x^T r x / 2); |f| is unchanged pointwise."""
    r = np.atleast_2d(np.asarray(r, dtype=float))
    if r.shape != (wf.grid.n, wf.grid.n):
        raise DimensionError(f"chirp matrix {r.shape} does not match a {wf.grid.n}-D grid")
    if np.max(np.abs(r - r.T), initial=0.0) > 1e-10 * max(1.0, np.max(np.abs(r))):
        raise ValueError("chirp matrix must be symmetric")
    if not np.any(r):
        return wf
    return GriddedWaveFunction(wf.grid, wf.amplitudes * np.exp(0.5j * _quadratic_form(wf.grid, r)))


def dilation_grid(grid: GridSpec, b: np.ndarray) -> GridSpec:
    """Natural output grid of D_b: the input grid mapped through x -> b^{-1} x.

    Exact for diagonal b; for mixing b the grid covers the image of the input
    box with the same number of points per axis.
    """
    binv = np.linalg.inv(b)
    if _is_diagonal(b):
        return GridSpec(grid.points, tuple(s * abs(v) for s, v in zip(grid.spacing, np.diag(binv))))
    half = np.abs(binv) @ (np.array(grid.spacing) * (np.array(grid.points) - 1) / 2)
    return GridSpec(grid.points, tuple(2 * half / (np.array(grid.points) - 1)))


def dilate(wf: GriddedWaveFunction, b, out_grid: GridSpec | None = None) -> GriddedWaveFunction:
    """D_b[f](x) = sqrt|det b| f(b x).

    Diagonal b relabels the samples (spacing divided by |b_ii|, axis flipped
    for negative entries), so it is exact. Mixing b resamples with cubic
    splines and zero fill outside the input grid, which is not exactly
    norm-preserving.
    """
    b = np.atleast_2d(np.asarray(b, dtype=float))
    grid = wf.grid
    if b.shape != (grid.n, grid.n):
        raise DimensionError(f"dilation matrix {b.shape} does not match a {grid.n}-D grid")
    det = np.linalg.det(b)
    if det == 0 or not np.isfinite(det):
        raise np.linalg.LinAlgError("dilation matrix is singular")
    scale = np.sqrt(abs(det))

    if _is_diagonal(b) and out_grid is None:
        amp = wf.amplitudes * scale
        flips = tuple(i for i, v in enumerate(np.diag(b)) if v < 0)
        if flips:
            amp = np.flip(amp, axis=flips)
        return GriddedWaveFunction(dilation_grid(grid, b), amp)

    out = out_grid if out_grid is not None else dilation_grid(grid, b)
    if out.n != grid.n:
        raise DimensionError("output grid dimension mismatch")
    src = out.coordinates() @ b.T  # b x for every output sample
    index = (src - np.array(grid.origin)) / np.array(grid.spacing)
    coords = index.T.reshape((grid.n, *out.shape))
    re = ndimage.map_coordinates(wf.amplitudes.real, coords, order=3, mode="constant", cval=0.0)
    im = ndimage.map_coordinates(wf.amplitudes.imag, coords, order=3, mode="constant", cval=0.0)
    return GriddedWaveFunction(out, scale * (re + 1j * im))


def fast_output_grid(grid: GridSpec, S: SymplecticMatrix) -> GridSpec:
    """Grid produced by :func:`lct_apply_fast` for an input on ``grid``."""
    if b_block_singular(S):
        raise NonInvertibleBBlock(f"det(b) = {np.linalg.det(S.b):.3e}")
    return dilation_grid(fourier_grid(grid), np.linalg.inv(S.b))


def lct_apply_fast(wf: GriddedWaveFunction, S: SymplecticMatrix) -> GriddedWaveFunction:
    """chirp(b^-1 a) -> Fourier -> dilate(b^-1) -> chirp(d b^-1)."""
    if S.n != wf.grid.n:
        raise DimensionError(f"{S.n}-mode matrix applied to a {wf.grid.n}-D grid")
    chirp_in, b, chirp_out = decompose(S)
    g = chirp_apply(wf, chirp_in)
    g = fourier_nd(g)
    g = dilate(g, np.linalg.inv(b))
    return chirp_apply(g, chirp_out)


def lct_apply_direct(
    wf: GriddedWaveFunction, S: SymplecticMatrix, out_grid: GridSpec | None = None
) -> GriddedWaveFunction:
    """Riemann-sum quadrature of the LCT kernel onto ``out_grid``.

    Defaults to the grid the fast pipeline would produce. Cost is
    O(input samples * output samples); inputs above 2**16 samples are refused.
    """
    grid = wf.grid
    if S.n != grid.n:
        raise DimensionError(f"{S.n}-mode matrix applied to a {grid.n}-D grid")
    if grid.size > DIRECT_MAX_SAMPLES:
        raise SizeGuardExceeded(f"{grid.size} input samples exceeds {DIRECT_MAX_SAMPLES}")
    chirp_in, b, chirp_out = decompose(S)
    out = out_grid if out_grid is not None else fast_output_grid(grid, S)

    X = grid.coordinates()
    Y = out.coordinates()
    binv = np.linalg.inv(b)
    f = wf.amplitudes.ravel() * np.exp(0.5j * np.einsum("mi,ij,mj->m", X, chirp_in, X))
    Ky = Y @ binv.T  # rows b^{-1} y
    out_phase = np.exp(0.5j * np.einsum("mi,ij,mj->m", Y, chirp_out, Y))
    pref = grid.cell_volume / np.sqrt((2 * np.pi) ** grid.n * abs(np.linalg.det(b)))

    result = np.empty(len(Y), dtype=complex)
    step = max(1, _DIRECT_CHUNK // max(len(X), 1))
    for start in range(0, len(Y), step):
        sl = slice(start, start + step)
        kernel = np.exp(-1j * (Ky[sl] @ X.T))
        result[sl] = kernel @ f
    result *= pref * out_phase
    return GriddedWaveFunction(out, result.reshape(out.shape))


def fallback_factor(S: SymplecticMatrix) -> SymplecticMatrix:
    """Pick T with det(b) != 0 for both T and S T^{-1}, trying J first."""
    n = S.n
    candidates = [fourier_form(n)] + [rotation(t, n) for t in (np.pi / 3, np.pi / 4, np.pi / 6, 2 * np.pi / 5, 0.9)]
    best, best_score = None, -np.inf
    for T in candidates:
        rest = compose(S, inverse(T))
        if b_block_singular(rest):
            continue
        # prefer factors whose b-blocks are well conditioned
        score = min(abs(np.linalg.det(T.b)), abs(np.linalg.det(rest.b)) / max(1.0, np.linalg.norm(rest.entries, 2)) ** n)
        if score > 1e-3:
            return T
        if score > best_score:
            best, best_score = T, score
    if best is None:
        raise NonInvertibleBBlock("no composition chart found")
    return best


def lct_apply(wf: GriddedWaveFunction, S: SymplecticMatrix) -> GriddedWaveFunction:
    """LCT with a fallback for singular b: F_S = F_{S T^-1} F_T."""
    if not b_block_singular(S):
        return lct_apply_fast(wf, S)
    T = fallback_factor(S)
    return lct_apply_fast(lct_apply_fast(wf, T), compose(S, inverse(T)))
