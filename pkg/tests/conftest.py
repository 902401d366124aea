import numpy as np
import pytest

from lctur.grid import GridSpec, GriddedWaveFunction

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def grid256():
    return GridSpec.symmetric(256, 12.0)


@pytest.fixture
def vacuum_wf(grid256):
    x = grid256.axis(0)
    return GriddedWaveFunction(grid256, np.pi**-0.25 * np.exp(-0.5 * x**2))


def phase_aligned_l2(f, g, grid):
    """L2 distance after removing the best global phase between f and g."""
    overlap = np.vdot(g, f)
    phase = overlap / abs(overlap) if overlap else 1.0
    return float(np.sqrt(np.sum(np.abs(f - phase * g) ** 2) * grid.cell_volume))


def gaussian_density(grid, cov, mean=None):
    """Closed-form n-variate normal density on a grid."""
    cov = np.atleast_2d(cov)
    n = cov.shape[0]
    X = grid.coordinates()
    if mean is not None:
        X = X - mean
    prec = np.linalg.inv(cov)
    q = np.einsum("mi,ij,mj->m", X, prec, X)
    dens = np.exp(-0.5 * q) / np.sqrt((2 * np.pi) ** n * np.linalg.det(cov))
    return dens.reshape(grid.shape)
