"""Verification experiments for the commutator-matrix uncertainty relations.

Each ``verify_*`` function returns a :class:`VerificationReport`. Gaussian
states use closed forms unless a grid is forced; gridded wavefunctions are
pushed through the LCT engine and their entropies estimated from densities.
"""
from __future__ import annotations

import csv
import functools
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from typing import Iterable, Union

import numpy as np

from .entropy import (
    RenyiOrderPair,
    covariance_bound_check,
    entropy_power,
    gaussian_entropy,
    gaussian_renyi_entropy,
    renyi_entropy,
    renyi_log_term,
    shannon_entropy,
)
from .errors import DimensionError
from .grid import GridSpec, GriddedWaveFunction, density_moments, edge_mass, load_wavefunction
from .lct import lct_apply
from .report import ANALYTIC_TOL, CSV_FIELDS, GRID_TOL, VerificationReport, digest
from .states import (
    GaussianState,
    cat_wavefunction,
    correlated_gaussian,
    fock_wavefunction,
    gaussian_wavefunction,
    marginal_covariance,
    squeezed,
    vacuum,
)
from .symplectic import (
    CommutatorMatrix,
    QuadratureRowSet,
    SymplecticMatrix,
    fourier_form,
    identity,
    log_abs_det_or_neginf,
    random_symplectic,
    rotation,
    row_commutator,
    symplectic_completion,
    symplectic_error,
)

State = Union[GaussianState, GriddedWaveFunction]

RELATIONS = ("lemma1", "theorem1", "theorem1_extended", "theorem2", "theorem3", "birula", "huang", "guanlei")
DEFAULT_POINTS = 512
DEFAULT_EXTENT = 12.0


# shared pieces


def restricted_commutator(A: SymplecticMatrix, B: SymplecticMatrix, n: int | None = None) -> CommutatorMatrix:
    """Commutators between the first n output quadratures of A and of B."""
    if A.n != B.n:
        raise DimensionError(f"mode counts differ: {A.n} vs {B.n}")
    n = A.n if n is None else n
    if not 1 <= n <= A.n:
        raise DimensionError(f"cannot measure {n} of {A.n} modes")
    return row_commutator(A.entries[:n], B.entries[:n])


def _log_det(K: CommutatorMatrix, rows_a: np.ndarray, rows_b: np.ndarray) -> float:
    scale = float(np.linalg.norm(rows_a, 2) * np.linalg.norm(rows_b, 2))
    return log_abs_det_or_neginf(K.m, scale)


def random_isotropic_rows(n: int, N: int, seed: int) -> QuadratureRowSet:
    """n commuting quadratures on N modes: an invertible mix of the top rows of a random symplectic."""
    S = random_symplectic(N, seed)
    rng = np.random.default_rng(seed + 104729)
    G = np.eye(n) + 0.5 * rng.normal(size=(n, n))
    while abs(np.linalg.det(G)) < 0.2:
        G = np.eye(n) + 0.5 * rng.normal(size=(n, n))
    return QuadratureRowSet(G @ S.entries[:n])


def default_grid(n: int, points: int = DEFAULT_POINTS, extent: float = DEFAULT_EXTENT) -> GridSpec:
    return GridSpec.symmetric(points, extent, n)


def _as_wavefunction(state: State, grid: GridSpec | None) -> GriddedWaveFunction:
    if isinstance(state, GriddedWaveFunction):
        return state
    return gaussian_wavefunction(state, grid if grid is not None else default_grid(state.N))


def _grid_densities(wf: GriddedWaveFunction, mats: Iterable[SymplecticMatrix]):
    """Transform wf by each matrix; return normalized (density, grid) pairs and diagnostics."""
    dens, drift, edges = [], [abs(wf.norm() - 1.0)], []
    for M in mats:
        if M.n != wf.grid.n:
            raise DimensionError(f"{M.n}-mode matrix on a {wf.grid.n}-D wavefunction")
        out = lct_apply(wf, M)
        p = out.density()
        mass = p.sum() * out.grid.cell_volume
        drift.append(abs(mass - 1.0))
        edges.append(edge_mass(p, out.grid))
        dens.append((p / mass, out.grid))
    diag = {"norm_drift": max(drift), "edge_mass": max(edges), "grid_points": list(wf.grid.points)}
    return dens, diag


def _timed(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        report = fn(*args, **kwargs)
        report.wall_time = time.perf_counter() - t0
        return report

    return wrapper


def _measured(A: SymplecticMatrix, B: SymplecticMatrix, n: int | None) -> int:
    if A.n != B.n:
        raise DimensionError(f"mode counts differ: {A.n} vs {B.n}")
    return A.n if n is None else n


# relations


@_timed
def verify_theorem1(
    state: State,
    A: SymplecticMatrix,
    B: SymplecticMatrix,
    *,
    n: int | None = None,
    grid: GridSpec | None = None,
    force_grid: bool = False,
    relation: str = "theorem1",
) -> VerificationReport:
    """h(y) + h(z) >= ln((pi e)^n |det K|) for the first n outputs of A and B."""
    N = A.n
    n = _measured(A, B, n)
    K = restricted_commutator(A, B, n)
    bound = n * np.log(np.pi * np.e) + _log_det(K, A.entries[:n], B.entries[:n])

    if isinstance(state, GaussianState) and not force_grid:
        hA = gaussian_entropy(marginal_covariance(state, A, n))
        hB = gaussian_entropy(marginal_covariance(state, B, n))
        return VerificationReport(
            relation, n, N, hA + hB, bound, diagnostics={"h_a": hA, "h_b": hB, "abs_det_k": K.abs_det}
        )

    if n != N:
        raise DimensionError("the grid path measures every mode (n must equal N)")
    wf = _as_wavefunction(state, grid)
    ((pa, ga), (pb, gb)), diag = _grid_densities(wf, (A, B))
    hA, hB = shannon_entropy(pa, ga), shannon_entropy(pb, gb)
    diag.update(h_a=hA, h_b=hB, abs_det_k=K.abs_det)
    return VerificationReport(relation, n, N, hA + hB, bound, tolerance=GRID_TOL, path="grid", diagnostics=diag)


@_timed
def verify_lemma1(
    state: State, A: SymplecticMatrix, B: SymplecticMatrix, *, grid: GridSpec | None = None
) -> VerificationReport:
    """Grid-engine check of h(|F_A|^2) + h(|F_B|^2) >= ln((pi e)^n |det(B_b A_a^T - B_a A_b^T)|).

    Also records how far |det(B_b A_a^T - B_a A_b^T)| is from |det K|.
    """
    n = _measured(A, B, None)
    lemma_m = B.b @ A.a.T - B.a @ A.b.T
    K = restricted_commutator(A, B)
    bound = n * np.log(np.pi * np.e) + log_abs_det_or_neginf(
        lemma_m, float(np.linalg.norm(A.entries[:n], 2) * np.linalg.norm(B.entries[:n], 2))
    )
    wf = _as_wavefunction(state, grid)
    ((pa, ga), (pb, gb)), diag = _grid_densities(wf, (A, B))
    hA, hB = shannon_entropy(pa, ga), shannon_entropy(pb, gb)
    diag.update(
        h_a=hA,
        h_b=hB,
        abs_det_lemma=abs(np.linalg.det(lemma_m)),
        abs_det_k=K.abs_det,
        det_identity_error=abs(abs(np.linalg.det(lemma_m)) - K.abs_det),
    )
    if n == 1:
        # one-mode form |a b' - a' b|
        diag["one_mode_det"] = abs(A.a[0, 0] * B.b[0, 0] - B.a[0, 0] * A.b[0, 0])
    return VerificationReport("lemma1", n, n, hA + hB, bound, tolerance=GRID_TOL, path="grid", diagnostics=diag)


@_timed
def verify_theorem1_extended(state: GaussianState, rows_a: QuadratureRowSet, rows_b: QuadratureRowSet) -> VerificationReport:
    """n jointly measured quadratures on N modes, entropies of the measured marginals."""
    if rows_a.rows.shape != rows_b.rows.shape:
        raise DimensionError("row sets must have the same shape")
    if rows_a.N != state.N:
        raise DimensionError(f"rows act on {rows_a.N} modes, state has {state.N}")
    n, N = rows_a.n, rows_a.N
    A = symplectic_completion(rows_a)
    B = symplectic_completion(rows_b)
    K = row_commutator(rows_a, rows_b)
    bound = n * np.log(np.pi * np.e) + _log_det(K, rows_a.rows, rows_b.rows)
    hA = gaussian_entropy(marginal_covariance(state, A, n))
    hB = gaussian_entropy(marginal_covariance(state, B, n))
    diag = {
        "h_a": hA,
        "h_b": hB,
        "abs_det_k": K.abs_det,
        "completion_error": max(symplectic_error(A.entries), symplectic_error(B.entries)),
    }
    if n == 1:
        a, ap = rows_a.rows[0, :N], rows_a.rows[0, N:]
        b, bp = rows_b.rows[0, :N], rows_b.rows[0, N:]
        comm = float(np.dot(a, bp) - np.dot(ap, b))
        diag["scalar_commutator"] = comm
        diag["huang_bound"] = np.log(np.pi * np.e * abs(comm)) if comm else -np.inf
    return VerificationReport("theorem1_extended", n, N, hA + hB, bound, diagnostics=diag)


@_timed
def verify_theorem2(
    state: State,
    A: SymplecticMatrix,
    B: SymplecticMatrix,
    pair: RenyiOrderPair,
    *,
    n: int | None = None,
    grid: GridSpec | None = None,
    force_grid: bool = False,
) -> VerificationReport:
    """h_alpha(y) + h_beta(z) against the conjugate-order Renyi bound."""
    N = A.n
    n = _measured(A, B, n)
    K = restricted_commutator(A, B, n)
    bound = n * (renyi_log_term(pair.alpha) + renyi_log_term(pair.beta) + np.log(np.pi)) + _log_det(
        K, A.entries[:n], B.entries[:n]
    )
    if isinstance(state, GaussianState) and not force_grid:
        hA = gaussian_renyi_entropy(marginal_covariance(state, A, n), pair.alpha)
        hB = gaussian_renyi_entropy(marginal_covariance(state, B, n), pair.beta)
        diag = {"h_a": hA, "h_b": hB, "alpha": pair.alpha, "beta": pair.beta, "abs_det_k": K.abs_det}
        return VerificationReport("theorem2", n, N, hA + hB, bound, diagnostics=diag)

    if n != N:
        raise DimensionError("the grid path measures every mode (n must equal N)")
    wf = _as_wavefunction(state, grid)
    ((pa, ga), (pb, gb)), diag = _grid_densities(wf, (A, B))
    hA, hB = renyi_entropy(pa, ga, pair.alpha), renyi_entropy(pb, gb, pair.beta)
    diag.update(h_a=hA, h_b=hB, alpha=pair.alpha, beta=pair.beta, abs_det_k=K.abs_det)
    return VerificationReport("theorem2", n, N, hA + hB, bound, tolerance=GRID_TOL, path="grid", diagnostics=diag)


@_timed
def verify_theorem3(
    state: State,
    A: SymplecticMatrix,
    B: SymplecticMatrix,
    *,
    n: int | None = None,
    grid: GridSpec | None = None,
    force_grid: bool = False,
) -> VerificationReport:
    """sqrt(det gamma_A det gamma_B) >= |det K| / 2^n, plus the entropy-power chain behind it.

    Diagnostics record N_A N_B >= |det K|^(2/n) / 4 and N <= det(gamma)^(1/n)
    for each side; together they imply the covariance bound.
    """
    N = A.n
    n = _measured(A, B, n)
    K = restricted_commutator(A, B, n)
    if isinstance(state, GaussianState) and not force_grid:
        gA, gB = marginal_covariance(state, A, n), marginal_covariance(state, B, n)
        hA, hB = gaussian_entropy(gA), gaussian_entropy(gB)
        path, tol, diag = "analytic", ANALYTIC_TOL, {}
    else:
        if n != N:
            raise DimensionError("the grid path measures every mode (n must equal N)")
        wf = _as_wavefunction(state, grid)
        ((pa, ga), (pb, gb)), diag = _grid_densities(wf, (A, B))
        gA, gB = density_moments(pa, ga)[1], density_moments(pb, gb)[1]
        hA, hB = shannon_entropy(pa, ga), shannon_entropy(pb, gb)
        path, tol = "grid", GRID_TOL

    scale = float(np.linalg.norm(A.entries[:n], 2) * np.linalg.norm(B.entries[:n], 2))
    report = covariance_bound_check(gA, gB, K, tolerance=tol, scale=scale)
    NA, NB = entropy_power(hA, n), entropy_power(hB, n)
    ep_bound = K.abs_det ** (2.0 / n) / 4.0
    detA, detB = np.linalg.det(gA) ** (1.0 / n), np.linalg.det(gB) ** (1.0 / n)
    rel = 1e-9 if path == "analytic" else 1e-3
    diag.update(
        entropy_power_a=NA,
        entropy_power_b=NB,
        entropy_power_product=NA * NB,
        entropy_power_bound=ep_bound,
        entropy_power_holds=bool(NA * NB >= ep_bound * (1 - rel)),
        gaussian_max_holds=bool(NA <= detA * (1 + rel) and NB <= detB * (1 + rel)),
        abs_det_k=K.abs_det,
    )
    report.N = N
    report.path = path
    report.diagnostics = diag
    return report


# experiment specs


@dataclass(frozen=True)
class ExperimentSpec:
    """One (state, A, B, relation) tuple.

    Matrices are named ("identity", "fourier", "rotation", "random") or given as
    {"n", "entries"} dicts; rows are "random" or {"n", "N", "rows"} dicts.
    States are "vacuum", "squeezed", "correlated", "fock", "cat", a GaussianState
    dict, or "file" together with ``state_file``.
    """

    relation: str
    n: int = 1
    N: int | None = None
    state: Union[str, dict] = "vacuum"
    state_param: float = 0.0
    state_file: str | None = None
    A: Union[str, dict] = "identity"
    B: Union[str, dict] = "fourier"
    theta: float = 0.0
    phi: float = np.pi / 2
    rows_a: Union[str, dict, None] = None
    rows_b: Union[str, dict, None] = None
    alpha: float | None = None
    beta: float | None = None
    grid_points: int = DEFAULT_POINTS
    grid_extent: float = DEFAULT_EXTENT
    use_grid: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}; choose from {', '.join(RELATIONS)}")
        if self.relation == "theorem2" and self.alpha is None:
            raise ValueError("theorem2 needs Renyi order alpha")
        if self.relation in ("theorem1_extended", "huang") and (self.rows_a is None or self.rows_b is None):
            raise ValueError(f"{self.relation} needs rows_a and rows_b")
        if self.n < 1 or (self.N is not None and self.N < self.n):
            raise ValueError(f"need 1 <= n <= N, got n={self.n}, N={self.N}")
        if self.state == "file" and not self.state_file:
            raise ValueError("state 'file' needs state_file")

    @property
    def modes(self) -> int:
        return self.N if self.N is not None else self.n

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown experiment fields: {sorted(unknown)}")
        return cls(**data)


def build_matrix(desc, n: int, seed: int, angle: float = 0.0) -> SymplecticMatrix:
    if isinstance(desc, dict):
        M = SymplecticMatrix.from_dict(desc)
        if M.n != n:
            raise DimensionError(f"matrix has {M.n} modes, expected {n}")
        return M
    if desc == "identity":
        return identity(n)
    if desc == "fourier":
        return fourier_form(n)
    if desc == "rotation":
        return rotation(angle, n)
    if desc == "random":
        return random_symplectic(n, seed)
    raise ValueError(f"unknown matrix description {desc!r}")


def build_rows(desc, n: int, N: int, seed: int) -> QuadratureRowSet:
    if isinstance(desc, dict):
        rows = QuadratureRowSet.from_dict(desc)
        if (rows.n, rows.N) != (n, N):
            raise DimensionError(f"rows are {rows.n} x {rows.N} modes, expected {n} x {N}")
        return rows
    if desc == "random":
        return random_isotropic_rows(n, N, seed)
    raise ValueError(f"unknown row description {desc!r}")


def build_state(spec: ExperimentSpec, N: int) -> State:
    s = spec.state
    if isinstance(s, dict):
        state = GaussianState.from_dict(s)
        if state.N != N:
            raise DimensionError(f"state has {state.N} modes, expected {N}")
        return state
    grid = default_grid(N, spec.grid_points, spec.grid_extent)
    if s == "vacuum":
        return vacuum(N)
    if s == "squeezed":
        return squeezed(N, spec.state_param)
    if s == "correlated":
        return correlated_gaussian(N, spec.seed)
    if s == "fock":
        return fock_wavefunction(int(spec.state_param), grid)
    if s == "cat":
        return cat_wavefunction(spec.state_param, grid)
    if s == "file":
        wf = load_wavefunction(spec.state_file)
        if wf.grid.n != N:
            raise DimensionError(f"wavefunction file is {wf.grid.n}-D, expected {N}")
        return wf
    raise ValueError(f"unknown state {s!r}")


def run_experiment(spec: ExperimentSpec) -> VerificationReport:
    """Build the inputs described by ``spec`` and dispatch to the matching verifier."""
    rel, n, N = spec.relation, spec.n, spec.modes
    grid = default_grid(N, spec.grid_points, spec.grid_extent)
    kw = {"grid": grid, "force_grid": spec.use_grid}

    if rel in ("theorem1_extended", "huang"):
        if rel == "huang" and n != 1:
            raise ValueError("huang measures a single quadrature (n = 1)")
        state = build_state(spec, N)
        if not isinstance(state, GaussianState):
            raise ValueError(f"{rel} needs a Gaussian state")
        ra = build_rows(spec.rows_a, n, N, spec.seed)
        rb = build_rows(spec.rows_b, n, N, spec.seed + 1)
        report = verify_theorem1_extended(state, ra, rb)
    else:
        if rel == "birula":
            A, B = identity(N), fourier_form(N)
        elif rel == "guanlei":
            if N != 1:
                raise ValueError("guanlei is a one-mode relation")
            A, B = rotation(spec.theta), rotation(spec.phi)
        else:
            A = build_matrix(spec.A, N, spec.seed, spec.theta)
            B = build_matrix(spec.B, N, spec.seed + 1, spec.phi)
        state = build_state(spec, N)
        meas = None if n == N else n
        if rel in ("theorem1", "birula", "guanlei"):
            report = verify_theorem1(state, A, B, n=meas, relation=rel, **kw)
        elif rel == "lemma1":
            if meas is not None:
                raise ValueError("lemma1 measures every mode (n must equal N)")
            report = verify_lemma1(state, A, B, grid=grid)
        elif rel == "theorem2":
            pair = RenyiOrderPair(spec.alpha, spec.beta) if spec.beta is not None else RenyiOrderPair.conjugate(spec.alpha)
            report = verify_theorem2(state, A, B, pair, n=meas, **kw)
        else:
            report = verify_theorem3(state, A, B, n=meas, **kw)
    report.inputs_digest = digest(spec.to_dict())
    return report


SWEEP_AXES = ("gap", "theta", "phi", "squeeze", "alpha", "seed")


def _with_param(spec: ExperimentSpec, axis: str, value: float) -> ExperimentSpec:
    if axis == "gap":
        return replace(spec, theta=spec.phi + value)
    if axis == "squeeze":
        return replace(spec, state="squeezed", state_param=value)
    if axis == "seed":
        return replace(spec, seed=int(value))
    if axis in ("theta", "phi", "alpha"):
        return replace(spec, **{axis: value})
    raise ValueError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")


def sweep(template: ExperimentSpec, axis: str, values: Iterable[float], workers: int = 1) -> list[dict]:
    """Run ``template`` once per value; rows come back sorted by value.

    A failing row keeps its error message and the sweep moves on.
    """
    values = sorted(float(v) for v in values)
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {', '.join(SWEEP_AXES)}")

    def one(value):
        try:
            return {"param": value, "report": run_experiment(_with_param(template, axis, value)), "error": ""}
        except Exception as exc:  # recorded per row
            return {"param": value, "report": None, "error": f"{type(exc).__name__}: {exc}"}

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, values))
    else:
        rows = [one(v) for v in values]
    return rows


def sweep_to_csv(rows: list[dict], relation: str) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS)
    writer.writeheader()
    for row in rows:
        rep = row["report"]
        if rep is None:
            writer.writerow({"param": repr(row["param"]), "relation": relation, "status": "error", "error": row["error"]})
            continue
        d = rep.to_dict(timing=False)
        writer.writerow(
            {
                "param": repr(row["param"]),
                "relation": d["relation"],
                "n": d["n"],
                "N": d["N"],
                "lhs": repr(float(rep.lhs)),
                "bound": repr(float(rep.bound)),
                "slack": repr(float(rep.slack)),
                "status": d["status"],
                "path": d["path"],
                "inputs_digest": d["inputs_digest"],
                "error": "",
            }
        )
    return buf.getvalue()
