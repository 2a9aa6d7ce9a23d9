"""Periodic Schaffer dilations of contractions.

The doubly infinite Schaffer matrix is truncated to the cyclic lattice Z/NZ.
Block row/column ``j`` of the lattice lives in slot ``j mod N`` of an ``nN x nN``
dense matrix, so block row -1 is slot ``N - 1``. Nonzero blocks::

    U[0, 0]   = T        U[0, 1]   = D_{T*}
    U[-1, 0]  = D_T      U[-1, 1]  = -T*
    U[j, j+1] = I        for j not in {0, -1}

The result is a block cyclic shift composed with a block-diagonal unitary,
hence exactly unitary. Powers U^k compress to T^k on slot 0 for k <= N - 1
and trace(U^k) = trace(T^k) for k <= N - 2; past that, closed paths wrap
around the ring.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from shiftlab.errors import DimensionMismatch, NotUnitary, PeriodTooSmall
from shiftlab.opcore import TOL_ROLE, Operator, adjoint, as_matrix, defect, singular_values

UNITARY_TOL = 1e-10
DEFAULT_PERIOD = 64


@dataclass(frozen=True)
class JuliaBlock:
    T: np.ndarray
    block: np.ndarray

    @property
    def unitarity_defect(self) -> float:
        return float(np.linalg.norm(adjoint(self.block) @ self.block - np.eye(self.block.shape[0])))


def julia_block(T, tol_role: float = TOL_ROLE) -> JuliaBlock:
    """The 2n x 2n unitary [[D_T, -T*], [T, D_{T*}]]."""
    A = as_matrix(T)
    D, Ds = defect(A, tol_role)
    block = np.block([[D, -adjoint(A)], [A, Ds]])
    jb = JuliaBlock(A, block)
    if jb.unitarity_defect > UNITARY_TOL:
        raise NotUnitary(f"Julia block unitarity defect {jb.unitarity_defect:.3e}")
    return jb


@dataclass(frozen=True)
class PeriodicDilation:
    base: np.ndarray
    period: int
    matrix: np.ndarray
    julia: JuliaBlock
    base_label: str = ""

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def slot(self, j: int) -> int:
        return j % self.period

    def block(self, j: int, k: int) -> np.ndarray:
        n = self.n
        a, b = self.slot(j) * n, self.slot(k) * n
        return self.matrix[a : a + n, b : b + n]

    def apply(self, X: np.ndarray) -> np.ndarray:
        """U @ X using the block structure, O(nN * cols) work plus one 2n x 2n product."""
        n, N = self.n, self.period
        X = np.asarray(X)
        out = np.empty_like(X, dtype=complex)
        # rows 1..N-2 shift up by one block
        out[n : (N - 1) * n] = X[2 * n : N * n]
        top = self.julia.block @ X[0 : 2 * n]
        out[(N - 1) * n : N * n] = top[:n]
        out[0:n] = top[n:]
        return out

    @property
    def unitarity_defect(self) -> float:
        U = self.matrix
        return float(np.linalg.norm(adjoint(U) @ U - np.eye(U.shape[0])))

    def to_operator(self) -> Operator:
        return Operator(self.matrix, label=f"dilation(period={self.period}) of {self.base_label}")

    def export_metadata(self) -> dict:
        return {"period": self.period, "base_label": self.base_label}


def build_periodic(T, N: int = DEFAULT_PERIOD, tol_role: float = TOL_ROLE, label: str = "") -> PeriodicDilation:
    if N < 3:
        raise PeriodTooSmall(f"period must be at least 3, got {N}")
    if isinstance(T, Operator) and not label:
        label = T.label
    A = as_matrix(T)
    jb = julia_block(A, tol_role)
    n = A.shape[0]
    U = np.zeros((n * N, n * N), dtype=complex)
    eye = np.eye(n)
    for j in range(1, N - 1):
        U[j * n : (j + 1) * n, (j + 1) * n : (j + 2) * n] = eye
    D, Ds = jb.block[:n, :n], jb.block[n:, n:]
    last = (N - 1) * n
    U[0:n, 0:n] = A
    U[0:n, n : 2 * n] = Ds
    U[last : last + n, 0:n] = D
    U[last : last + n, n : 2 * n] = -adjoint(A)
    U.setflags(write=False)
    return PeriodicDilation(base=A, period=N, matrix=U, julia=jb, base_label=label)


def compress_power(D: PeriodicDilation, k: int) -> np.ndarray:
    """(0,0) block of U^k, i.e. P_H U^k restricted to H."""
    if k < 0:
        raise ValueError("power must be nonnegative")
    n = D.n
    X = np.zeros((n * D.period, n), dtype=complex)
    X[:n] = np.eye(n)
    for _ in range(k):
        X = D.apply(X)
    return X[:n].copy()


@dataclass(frozen=True)
class CompressionRow:
    k: int
    deviation: float
    within_exact_range: bool


def compression_report(D: PeriodicDilation, kmax: int) -> list[CompressionRow]:
    """‖P_H U^k|_H - T^k‖_F for 0 <= k <= kmax; rows past N - 2 are wraparound diagnostics."""
    n = D.n
    X = np.zeros((n * D.period, n), dtype=complex)
    X[:n] = np.eye(n)
    Tk = np.eye(n, dtype=complex)
    rows = []
    for k in range(kmax + 1):
        dev = float(np.linalg.norm(X[:n] - Tk))
        rows.append(CompressionRow(k, dev, k <= D.period - 2))
        X = D.apply(X)
        Tk = Tk @ D.base
    return rows


def power_traces(D: PeriodicDilation, kmax: int) -> np.ndarray:
    """trace(U^k) for k = 0..kmax via structured repeated application."""
    X = np.eye(D.matrix.shape[0], dtype=complex)
    out = np.empty(kmax + 1, dtype=complex)
    for k in range(kmax + 1):
        out[k] = np.trace(X)
        if k < kmax:
            X = D.apply(X)
    return out


@dataclass(frozen=True)
class DilationPair:
    first: PeriodicDilation
    second: PeriodicDilation
    rank_bound: int
    measured_rank: int
    difference_s1: float
    off_support_norm: float


def dilation_pair(T0, T1, N: int = DEFAULT_PERIOD, tol_role: float = TOL_ROLE, rank_tol: float = 1e-10) -> DilationPair:
    A0, A1 = as_matrix(T0), as_matrix(T1)
    if A0.shape != A1.shape:
        raise DimensionMismatch(f"pair dimensions differ: {A0.shape} vs {A1.shape}")
    D0 = build_periodic(T0, N, tol_role)
    D1 = build_periodic(T1, N, tol_role)
    n = A0.shape[0]
    diff = D1.matrix - D0.matrix
    # the difference must vanish outside block rows -1 and 0
    off = np.concatenate([diff[n : (N - 1) * n].ravel(), [0.0]])
    s = singular_values(diff)
    rank = int(np.sum(s > rank_tol))
    return DilationPair(
        first=D0,
        second=D1,
        rank_bound=2 * n,
        measured_rank=rank,
        difference_s1=float(np.sum(s)),
        off_support_norm=float(np.linalg.norm(off)),
    )
