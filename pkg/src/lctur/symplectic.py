"""Symplectic matrices in the xxpp ordering, r = (x_1..x_n, p_1..p_n).

Convention: hbar = 1, [x_k, p_l] = i delta_kl, so [r_k, r_m] = i J_km with
J = [[0, 1], [-1, 0]] in n x n blocks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.stats import special_ortho_group

from .errors import DimensionError, NonInvertibleBBlock, NotIsotropic, RankDeficient

# |det b| below this fraction of ||S||^n is treated as singular
B_SINGULAR_RTOL = 1e-12


def symplectic_form(n: int) -> np.ndarray:
    """Standard 2n x 2n symplectic form J."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def _as_square_even(S) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {S.shape}")
    if S.shape[0] % 2:
        raise DimensionError(f"symplectic matrices need even dimension, got {S.shape[0]}")
    return S


def symplectic_error(S) -> float:
    """Max-norm of S J S^T - J."""
    S = _as_square_even(S)
    J = symplectic_form(S.shape[0] // 2)
    return float(np.max(np.abs(S @ J @ S.T - J)))


def is_symplectic(S, tol: float = 1e-10) -> bool:
    """True iff max|S J S^T - J| <= tol."""
    return symplectic_error(S) <= tol


@dataclass(frozen=True)
class SymplecticMatrix:
    """Immutable 2n x 2n real symplectic matrix with (a, b, c, d) blocks.

    Construction checks the symplectic condition with a tolerance relative to
    ||S||^2 (rounding in S J S^T grows with the entries); pass ``check=False``
    to skip it.
    """

    entries: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        S = _as_square_even(self.entries).copy()
        S.setflags(write=False)
        object.__setattr__(self, "entries", S)
        if self.check:
            err = symplectic_error(S)
            scale = max(1.0, float(np.max(np.abs(S))) ** 2)
            if err > 1e-9 * scale:
                raise ValueError(f"matrix is not symplectic (max|SJS^T - J| = {err:.3e})")

    @property
    def n(self) -> int:
        return self.entries.shape[0] // 2

    @property
    def a(self) -> np.ndarray:
        return self.entries[: self.n, : self.n]

    @property
    def b(self) -> np.ndarray:
        return self.entries[: self.n, self.n :]

    @property
    def c(self) -> np.ndarray:
        return self.entries[self.n :, : self.n]

    @property
    def d(self) -> np.ndarray:
        return self.entries[self.n :, self.n :]

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, SymplecticMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def to_dict(self) -> dict:
        return {"n": self.n, "entries": self.entries.ravel().tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "SymplecticMatrix":
        n = int(data["n"])
        entries = np.asarray(data["entries"], dtype=float)
        if entries.size != 4 * n * n:
            raise DimensionError(f"expected {4 * n * n} entries for n={n}, got {entries.size}")
        return cls(entries.reshape(2 * n, 2 * n))


@dataclass(frozen=True)
class CommutatorMatrix:
    """Commutator table K_ij = [y_i, z_j] = i * m_ij, stored by its real factor m."""

    m: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.m, dtype=float)).copy()
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"commutator matrix must be square, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @property
    def K(self) -> np.ndarray:
        return 1j * self.m

    @property
    def abs_det(self) -> float:
        return abs(float(np.linalg.det(self.m)))


@dataclass(frozen=True)
class QuadratureRowSet:
    """n rows of quadrature coefficients on N modes, row i = (a_i1..a_iN, a'_i1..a'_iN)."""

    rows: np.ndarray

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=float)).copy()
        if rows.shape[1] % 2:
            raise DimensionError(f"rows need 2N columns, got {rows.shape[1]}")
        if rows.shape[0] > rows.shape[1] // 2:
            raise DimensionError(f"at most N={rows.shape[1] // 2} commuting rows, got {rows.shape[0]}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def N(self) -> int:
        return self.rows.shape[1] // 2

    def validate(self, tol: float = 1e-10) -> None:
        """Raise NotIsotropic / RankDeficient if the rows are not jointly measurable."""
        scale = max(1.0, float(np.max(np.abs(self.rows))) ** 2)
        gram = self.rows @ symplectic_form(self.N) @ self.rows.T
        if np.max(np.abs(gram)) > tol * scale:
            raise NotIsotropic(f"rows do not commute (max|R J R^T| = {np.max(np.abs(gram)):.3e})")
        sv = np.linalg.svd(self.rows, compute_uv=False)
        if sv[-1] <= 1e-12 * sv[0]:
            raise RankDeficient(f"rows are linearly dependent (singular values {sv})")

    def to_dict(self) -> dict:
        return {"n": self.n, "N": self.N, "rows": self.rows.ravel().tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "QuadratureRowSet":
        n, N = int(data["n"]), int(data["N"])
        rows = np.asarray(data["rows"], dtype=float)
        if rows.size != 2 * n * N:
            raise DimensionError(f"expected {2 * n * N} row entries, got {rows.size}")
        return cls(rows.reshape(n, 2 * N))


def _check_same_n(A: SymplecticMatrix, B: SymplecticMatrix) -> None:
    if A.n != B.n:
        raise DimensionError(f"mode counts differ: {A.n} vs {B.n}")


def compose(A: SymplecticMatrix, B: SymplecticMatrix) -> SymplecticMatrix:
    """Matrix product A B, i.e. the LCT F_A F_B."""
    _check_same_n(A, B)
    return SymplecticMatrix(A.entries @ B.entries)


def inverse(A: SymplecticMatrix) -> SymplecticMatrix:
    """A^{-1} = J A^T J^T, blockwise [[d^T, -b^T], [-c^T, a^T]]."""
    return SymplecticMatrix(np.block([[A.d.T, -A.b.T], [-A.c.T, A.a.T]]))


def b_block_singular(S: SymplecticMatrix) -> bool:
    scale = max(float(np.linalg.norm(S.entries, 2)), 1.0)
    return abs(np.linalg.det(S.b)) < B_SINGULAR_RTOL * scale**S.n


def decompose(S: SymplecticMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (b^{-1} a, b, d b^{-1}) so that

        S = [[1, 0], [d b^-1, 1]] . diag(b, b^-T) . J . [[1, 0], [b^-1 a, 1]].
    """
    if b_block_singular(S):
        raise NonInvertibleBBlock(f"det(b) = {np.linalg.det(S.b):.3e}")
    chirp_in = np.linalg.solve(S.b, S.a)
    chirp_out = np.linalg.solve(S.b.T, S.d.T).T
    # both are symmetric in exact arithmetic
    chirp_in = 0.5 * (chirp_in + chirp_in.T)
    chirp_out = 0.5 * (chirp_out + chirp_out.T)
    return chirp_in, S.b.copy(), chirp_out


def reassemble(chirp_in, dilation, chirp_out) -> np.ndarray:
    """Inverse of :func:`decompose`, multiplying out the four factors."""
    n = dilation.shape[0]
    eye, zero = np.eye(n), np.zeros((n, n))
    left = np.block([[eye, zero], [chirp_out, eye]])
    middle = np.block([[dilation, zero], [zero, np.linalg.inv(dilation).T]])
    right = np.block([[eye, zero], [chirp_in, eye]])
    return left @ middle @ symplectic_form(n) @ right


def commutator_matrix(A: SymplecticMatrix, B: SymplecticMatrix) -> CommutatorMatrix:
    """K_ij = [y_i, z_j] for y = first half of A r, z = first half of B r.

    m = A_a B_b^T - A_b B_a^T, so that B_b A_a^T - B_a A_b^T = -i K^T.
    """
    _check_same_n(A, B)
    return CommutatorMatrix(A.a @ B.b.T - A.b @ B.a.T)


def row_commutator(rows_a, rows_b) -> CommutatorMatrix:
    """Commutator table between two quadrature row sets: m = R_A J R_B^T."""
    ra = rows_a.rows if isinstance(rows_a, QuadratureRowSet) else np.atleast_2d(rows_a)
    rb = rows_b.rows if isinstance(rows_b, QuadratureRowSet) else np.atleast_2d(rows_b)
    if ra.shape != rb.shape:
        raise DimensionError(f"row sets differ in shape: {ra.shape} vs {rb.shape}")
    return CommutatorMatrix(ra @ symplectic_form(ra.shape[1] // 2) @ rb.T)


def log_abs_det_or_neginf(m: np.ndarray, scale: float = 1.0) -> float:
    """ln|det m|, or -inf when det m vanishes relative to ``scale``**n."""
    n = m.shape[0]
    det = abs(float(np.linalg.det(m)))
    if det <= 1e-12 * max(scale, 1e-300) ** n:
        return -np.inf
    return float(np.log(det))


def _bound_scale(A: SymplecticMatrix, B: SymplecticMatrix) -> float:
    top_a = np.linalg.norm(A.entries[: A.n], 2)
    top_b = np.linalg.norm(B.entries[: B.n], 2)
    return float(top_a * top_b)


def log_abs_det_commutator(A: SymplecticMatrix, B: SymplecticMatrix) -> float:
    return log_abs_det_or_neginf(commutator_matrix(A, B).m, _bound_scale(A, B))


def shannon_bound(A: SymplecticMatrix, B: SymplecticMatrix) -> float:
    """ln((pi e)^n |det K|); -inf when det K = 0."""
    return A.n * np.log(np.pi * np.e) + log_abs_det_commutator(A, B)


def symplectic_completion(rows: QuadratureRowSet, tol: float = 1e-10) -> SymplecticMatrix:
    """Complete n commuting quadrature rows to a 2N x 2N symplectic matrix.

    The given rows become rows 0..n-1 verbatim. Their conjugate partners are
    fixed by a least-norm solve, and the symplectic complement of that span
    is filled in by symplectic Gram-Schmidt with pivoting.
    """
    rows.validate(tol)
    E = np.array(rows.rows)
    n, N = rows.n, rows.N
    J = symplectic_form(N)

    # conjugate partners: E J F^T = 1 and F J F^T = 0
    EJ = E @ J
    F = np.linalg.lstsq(EJ, np.eye(n), rcond=None)[0].T
    W = F @ J @ F.T
    F = F - 0.5 * W @ E

    positions, momenta = [], []
    if N > n:
        Q = null_space(np.vstack([E, F]) @ J.T).T
        pool = [q for q in Q]
        while pool:
            u = pool.pop(0)
            pairings = [abs(u @ J @ v) for v in pool]
            k = int(np.argmax(pairings))
            v = pool.pop(k)
            v = v / (u @ J @ v)
            pool = [w - (w @ J @ v) * u + (w @ J @ u) * v for w in pool]
            positions.append(u)
            momenta.append(v)

    S = np.vstack([E, *positions, F, *momenta])
    result = SymplecticMatrix(S, check=False)
    err = symplectic_error(S)
    if err > 1e-8 * max(1.0, float(np.max(np.abs(S))) ** 2):
        raise RankDeficient(f"completion is ill-conditioned (max|SJS^T - J| = {err:.3e})")
    return result


def rotation(theta: float, n: int = 1) -> SymplecticMatrix:
    """Phase-space rotation [[cos, sin], [-sin, cos]] on each of n modes.

    The first output quadrature is x cos(theta) + p sin(theta).
    """
    c, s = np.cos(theta), np.sin(theta)
    eye = np.eye(n)
    return SymplecticMatrix(np.block([[c * eye, s * eye], [-s * eye, c * eye]]))


def identity(n: int) -> SymplecticMatrix:
    return SymplecticMatrix(np.eye(2 * n))


def fourier_form(n: int) -> SymplecticMatrix:
    """Direct sum of pi/2 rotations, a=0, b=1, c=-1, d=0; maps x to p."""
    return SymplecticMatrix(symplectic_form(n))


def squeezer(s) -> SymplecticMatrix:
    """diag(e^s, e^-s) per mode (x stretched by e^s)."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    return SymplecticMatrix(np.diag(np.concatenate([np.exp(s), np.exp(-s)])))


def chirp(r) -> SymplecticMatrix:
    """Shear [[1, 0], [r, 1]] with r symmetric; the operator is exp(i x^T r x / 2)."""
    r = np.atleast_2d(np.asarray(r, dtype=float))
    n = r.shape[0]
    return SymplecticMatrix(np.block([[np.eye(n), np.zeros((n, n))], [r, np.eye(n)]]))


def passive(O) -> SymplecticMatrix:
    """diag(O, O) for a real orthogonal O (a passive mode rotation)."""
    O = np.atleast_2d(np.asarray(O, dtype=float))
    zero = np.zeros_like(O)
    return SymplecticMatrix(np.block([[O, zero], [zero, O]]))


def from_blocks(a, b, c, d) -> SymplecticMatrix:
    return SymplecticMatrix(np.block([[np.atleast_2d(a), np.atleast_2d(b)], [np.atleast_2d(c), np.atleast_2d(d)]]))


def direct_sum(mats: Sequence[SymplecticMatrix]) -> SymplecticMatrix:
    """Block-diagonal sum of single- or multi-mode matrices, keeping xxpp order."""
    n = sum(M.n for M in mats)
    S = np.zeros((2 * n, 2 * n))
    k = 0
    for M in mats:
        m = M.n
        x, p = slice(k, k + m), slice(n + k, n + k + m)
        S[x, x], S[x, p], S[p, x], S[p, p] = M.a, M.b, M.c, M.d
        k += m
    return SymplecticMatrix(S)


def _random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.array([[1.0]])
    return special_ortho_group.rvs(n, random_state=rng)


def random_symplectic(n: int, seed: int, squeeze: float = 0.5, shear: float = 0.5) -> SymplecticMatrix:
    """Deterministic random symplectic matrix for a given seed.

    Built as rotation . dilation . chirp . rotation, with each factor exactly
    symplectic. Rotations are mode-wise phase rotations combined with a
    passive orthogonal mixing; ``squeeze`` and ``shear`` bound the log
    squeezing and chirp entries.
    """
    rng = np.random.default_rng(seed)

    def phase_rotation():
        thetas = rng.uniform(0, 2 * np.pi, n)
        return direct_sum([rotation(t) for t in thetas]) @ passive(_random_orthogonal(n, rng))

    dil = squeezer(rng.uniform(-squeeze, squeeze, n))
    r = rng.uniform(-shear, shear, (n, n))
    shr = chirp(0.5 * (r + r.T))
    return phase_rotation() @ dil @ shr @ phase_rotation()
