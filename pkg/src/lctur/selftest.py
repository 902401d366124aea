"""Quick invariant checks behind ``lctur selftest``."""
from __future__ import annotations

import numpy as np

from . import symplectic as sp
from .grid import GriddedWaveFunction, GridSpec, l2_distance
from .harness import verify_theorem1, verify_theorem3
from .lct import fourier_nd, lct_apply_direct, lct_apply_fast
from .states import correlated_gaussian, vacuum


def _closure():
    worst = 0.0
    for seed in range(60):
        n = 1 + seed % 3
        A, B = sp.random_symplectic(n, seed), sp.random_symplectic(n, seed + 1000)
        worst = max(worst, sp.symplectic_error(sp.compose(A, B).entries))
    return worst <= 1e-10, f"max |SJS^T - J| = {worst:.2e}"


def _inverse():
    worst = 0.0
    for seed in range(60):
        A = sp.random_symplectic(1 + seed % 3, seed)
        worst = max(worst, np.max(np.abs(sp.compose(A, sp.inverse(A)).entries - np.eye(2 * A.n))))
    return worst <= 1e-10, f"max |A A^-1 - 1| = {worst:.2e}"


def _bound_invariance():
    worst = 0.0
    for seed in range(60):
        n = 1 + seed % 3
        A, B, T = (sp.random_symplectic(n, seed + k) for k in (0, 500, 900))
        worst = max(worst, abs(sp.shannon_bound(A @ T, B @ T) - sp.shannon_bound(A, B)))
    return worst <= 1e-9, f"max bound change = {worst:.2e}"


def _fourier_unitary():
    grid = GridSpec.symmetric(256, 12.0)
    x = grid.axis(0)
    wf = GriddedWaveFunction(grid, np.pi**-0.25 * np.exp(-0.5 * x**2))
    out = fourier_nd(wf)
    err = l2_distance(out.amplitudes, np.pi**-0.25 * np.exp(-0.5 * out.grid.axis(0) ** 2), out.grid)
    return err <= 1e-8 and abs(out.norm() - 1) <= 1e-10, f"Gaussian L2 error = {err:.2e}"


def _fast_vs_direct():
    grid = GridSpec.symmetric(256, 10.0)
    x = grid.axis(0)
    wf = GriddedWaveFunction(grid, np.pi**-0.25 * np.exp(-0.5 * x**2 + 0.3j * x))
    S = sp.random_symplectic(1, 11)
    fast, direct = lct_apply_fast(wf, S), lct_apply_direct(wf, S)
    err = l2_distance(fast.density(), direct.density(), fast.grid)
    return err <= 1e-6, f"density L2 = {err:.2e}"


def _birula():
    worst = 0.0
    for n in (1, 2, 3):
        rep = verify_theorem1(vacuum(n), sp.identity(n), sp.fourier_form(n))
        worst = max(worst, abs(rep.slack))
    return worst <= 1e-9, f"max |slack| = {worst:.2e}"


def _random_theorems():
    worst = np.inf
    for seed in range(60):
        n = 1 + seed % 3
        state = correlated_gaussian(n, seed)
        A, B = sp.random_symplectic(n, seed + 1), sp.random_symplectic(n, seed + 2)
        worst = min(worst, verify_theorem1(state, A, B).slack, verify_theorem3(state, A, B).slack)
    return worst >= -1e-9, f"min slack = {worst:.2e}"


CHECKS = [
    ("group closure", _closure),
    ("inverse law", _inverse),
    ("bound invariance", _bound_invariance),
    ("fourier unitarity", _fourier_unitary),
    ("fast vs direct LCT", _fast_vs_direct),
    ("birula saturation", _birula),
    ("random theorem 1/3 slack", _random_theorems),
]


def run_selftest() -> list[tuple[str, bool, str]]:
    results = []
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
