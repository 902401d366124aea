"""Uniform centered grids and sampled wavefunctions."""
from __future__ import annotations

import base64
import csv
import io
import json
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AliasingWarning, DimensionError

EDGE_CELLS = 3
EDGE_MASS_WARN = 1e-6


@dataclass(frozen=True)
class GridSpec:
    """Grid symmetric about 0: sample k on an axis sits at (k - (N-1)/2) * spacing."""

    points: tuple[int, ...]
    spacing: tuple[float, ...]

    def __post_init__(self):
        points = tuple(int(p) for p in np.atleast_1d(self.points))
        spacing = tuple(float(s) for s in np.atleast_1d(self.spacing))
        if len(points) != len(spacing):
            raise DimensionError("points and spacing need one entry per axis")
        if any(p < 1 for p in points):
            raise ValueError(f"points must be positive, got {points}")
        if any(not s > 0 for s in spacing):
            raise ValueError(f"spacing must be positive, got {spacing}")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "spacing", spacing)

    @classmethod
    def symmetric(cls, points, extent, n: int | None = None) -> "GridSpec":
        """Grid whose first and last samples sit at -extent and +extent."""
        points = np.atleast_1d(points)
        extent = np.atleast_1d(np.asarray(extent, dtype=float))
        if n is not None:
            points = np.broadcast_to(points, (n,))
            extent = np.broadcast_to(extent, (n,))
        return cls(tuple(points), tuple(2 * extent / (points - 1)))

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def origin(self) -> tuple[float, ...]:
        return tuple(-s * (p - 1) / 2 for p, s in zip(self.points, self.spacing))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def axis(self, i: int) -> np.ndarray:
        p, s = self.points[i], self.spacing[i]
        return (np.arange(p) - (p - 1) / 2) * s

    def axes(self) -> list[np.ndarray]:
        return [self.axis(i) for i in range(self.n)]

    def mesh(self) -> list[np.ndarray]:
        return np.meshgrid(*self.axes(), indexing="ij")

    def coordinates(self) -> np.ndarray:
        """All sample coordinates, shape (size, n), C order."""
        return np.stack([m.ravel() for m in self.mesh()], axis=1)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "points": list(self.points),
            "spacing": list(self.spacing),
            "origin": list(self.origin),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        grid = cls(tuple(data["points"]), tuple(data["spacing"]))
        if "origin" in data and not np.allclose(data["origin"], grid.origin, rtol=1e-12, atol=1e-12):
            raise ValueError("only grids symmetric about 0 are supported")
        return grid


@dataclass(frozen=True)
class GriddedWaveFunction:
    grid: GridSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != self.grid.shape:
            raise DimensionError(f"amplitudes {amp.shape} do not match grid {self.grid.shape}")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sum(self.density()) * self.grid.cell_volume)

    def normalized(self) -> "GriddedWaveFunction":
        return GriddedWaveFunction(self.grid, self.amplitudes / np.sqrt(self.norm()))


def probability_density(wf: GriddedWaveFunction) -> np.ndarray:
    """|psi|^2 on the grid."""
    return wf.density()


def edge_mass(density: np.ndarray, grid: GridSpec, cells: int = EDGE_CELLS) -> float:
    """Largest probability mass within ``cells`` samples of any grid face."""
    worst = 0.0
    for ax in range(density.ndim):
        k = min(cells, density.shape[ax])
        lo = np.take(density, range(k), axis=ax).sum()
        hi = np.take(density, range(density.shape[ax] - k, density.shape[ax]), axis=ax).sum()
        worst = max(worst, float(max(lo, hi)) * grid.cell_volume)
    return worst


def check_edges(wf: GriddedWaveFunction, what: str = "wavefunction") -> float:
    mass = edge_mass(wf.density(), wf.grid)
    if mass > EDGE_MASS_WARN:
        warnings.warn(f"{what}: {mass:.2e} probability mass near grid edge", AliasingWarning, stacklevel=3)
    return mass


def density_moments(density: np.ndarray, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and covariance matrix of a gridded density (Riemann sums)."""
    w = density.ravel() * grid.cell_volume
    X = grid.coordinates()
    total = w.sum()
    mean = (w @ X) / total
    Xc = X - mean
    cov = (Xc * w[:, None]).T @ Xc / total
    return mean, cov


# file formats


def wavefunction_to_dict(wf: GriddedWaveFunction, encoding: str = "base64") -> dict:
    interleaved = np.empty(2 * wf.grid.size)
    flat = wf.amplitudes.ravel()
    interleaved[0::2] = flat.real
    interleaved[1::2] = flat.imag
    if encoding == "base64":
        body = base64.b64encode(interleaved.astype("<f8").tobytes()).decode("ascii")
    elif encoding == "array":
        body = interleaved.tolist()
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    return {"schema": 1, "grid": wf.grid.to_dict(), "encoding": encoding, "data": body}


def wavefunction_from_dict(data: dict) -> GriddedWaveFunction:
    grid = GridSpec.from_dict(data["grid"])
    encoding = data.get("encoding", "array")
    if encoding == "base64":
        interleaved = np.frombuffer(base64.b64decode(data["data"]), dtype="<f8")
    elif encoding == "array":
        interleaved = np.asarray(data["data"], dtype=float)
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    if interleaved.size != 2 * grid.size:
        raise DimensionError(f"expected {2 * grid.size} doubles, got {interleaved.size}")
    amp = (interleaved[0::2] + 1j * interleaved[1::2]).reshape(grid.shape)
    return GriddedWaveFunction(grid, amp)


def save_wavefunction(wf: GriddedWaveFunction, path, encoding: str = "base64") -> None:
    with open(path, "w") as fh:
        json.dump(wavefunction_to_dict(wf, encoding), fh)


def load_wavefunction(path) -> GriddedWaveFunction:
    with open(path) as fh:
        return wavefunction_from_dict(json.load(fh))


def wavefunction_to_csv(wf: GriddedWaveFunction) -> str:
    """CSV rows: index per axis, coordinate per axis, re, im."""
    n = wf.grid.n
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow([f"i{k}" for k in range(n)] + [f"x{k}" for k in range(n)] + ["re", "im"])
    coords = wf.grid.coordinates()
    flat = wf.amplitudes.ravel()
    for flat_idx, idx in enumerate(np.ndindex(*wf.grid.shape)):
        z = flat[flat_idx]
        writer.writerow([*idx, *(repr(float(v)) for v in coords[flat_idx]), repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def l2_distance(f: np.ndarray, g: np.ndarray, grid: GridSpec) -> float:
    """sqrt(sum |f - g|^2 * cell volume)."""
    return float(np.sqrt(np.sum(np.abs(f - g) ** 2) * grid.cell_volume))


def l1_distance(f: np.ndarray, g: np.ndarray, grid: GridSpec) -> float:
    return float(np.sum(np.abs(f - g)) * grid.cell_volume)


def same_grid(g1: GridSpec, g2: GridSpec, rtol: float = 1e-12) -> bool:
    return g1.points == g2.points and np.allclose(g1.spacing, g2.spacing, rtol=rtol, atol=0)


def broadcast_axes(vectors: Sequence[np.ndarray]) -> list[np.ndarray]:
    """Reshape 1-D per-axis vectors so they broadcast over an n-D array."""
    n = len(vectors)
    out = []
    for i, v in enumerate(vectors):
        shape = [1] * n
        shape[i] = v.size
        out.append(np.reshape(v, shape))
    return out
