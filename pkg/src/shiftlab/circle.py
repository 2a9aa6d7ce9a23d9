"""Spectral shift functions on the unit circle.

Step functions are stored by their breakpoints in [0, 2pi) and the value on
each half-open arc to the right of a breakpoint; the last arc wraps through
theta = 0. For a unitary pair the function jumps by +1 at each eigenphase of
U0 and by -1 at each eigenphase of U1. With that sign, for U0 = e^{ia},
U1 = e^{ib} (0 < a < b < 2pi) the function is the indicator of (a, b) and

    trace(f(U1) - f(U0)) = \\oint f'(zeta) eta(zeta) d zeta

holds for every Laurent polynomial f.

Fourier coefficients follow c_k = (1/2pi) \\int f(e^{it}) e^{-ikt} dt.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from shiftlab import kernels
from shiftlab.errors import (
    DeterminantVanishes,
    DimensionMismatch,
    GridTooCoarse,
    NegativeValues,
    NotStrictContraction,
    NotUnitary,
    UnwrapAmbiguous,
)
from shiftlab.opcore import TOL_ROLE, LaurentPolynomial, adjoint, as_matrix, singular_values

TWO_PI = 2 * np.pi
NORMALIZATIONS = ("minimal-l1", "zero-mean", "raw")
MERGE_TOL = 1e-12
UNIT_MODULUS_TOL = 1e-8


@dataclass(frozen=True)
class PhaseList:
    phases: np.ndarray
    label: str = ""


def eigenphases(U, tol_role: float = TOL_ROLE, label: str = "") -> PhaseList:
    """Sorted arguments in [0, 2pi) of the eigenvalues of a unitary matrix."""
    A = as_matrix(U)
    udef = np.linalg.norm(adjoint(A) @ A - np.eye(A.shape[0]))
    if udef > tol_role:
        raise NotUnitary(f"‖U*U - I‖_F = {udef:.3e} exceeds {tol_role:g}")
    lam = np.linalg.eigvals(A)
    off = np.max(np.abs(np.abs(lam) - 1))
    if off > UNIT_MODULUS_TOL:
        raise NotUnitary(f"eigenvalue modulus off the circle by {off:.3e}")
    phases = np.mod(np.angle(lam), TWO_PI)
    # angle(-1 - 0j) style values can land on 2pi after mod
    phases[phases >= TWO_PI] -= TWO_PI
    return PhaseList(np.sort(phases), label)


@dataclass(frozen=True)
class StepFunctionCircle:
    """Piecewise-constant real function on the circle.

    ``values[i]`` holds on ``[breakpoints[i], breakpoints[i+1])`` and the last
    value on the arc that wraps through 0. Without breakpoints the function
    is the constant ``values[0]``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    normalization: str = "raw"

    def __post_init__(self):
        b = np.array(self.breakpoints, dtype=float).reshape(-1)
        v = np.array(self.values, dtype=float).reshape(-1)
        if b.size == 0:
            if v.size != 1:
                raise ValueError("a constant step function carries exactly one value")
        elif v.size != b.size:
            raise ValueError("need one value per breakpoint")
        if b.size and (np.any(np.diff(b) <= 0) or b[0] < 0 or b[-1] >= TWO_PI):
            raise ValueError("breakpoints must be strictly increasing in [0, 2pi)")
        b.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, c: float, normalization: str = "raw") -> "StepFunctionCircle":
        return cls(np.empty(0), np.array([c]), normalization)

    @classmethod
    def from_jumps(cls, breakpoints, jumps, start: float = 0.0, normalization: str = "raw") -> "StepFunctionCircle":
        """Build from jumps; ``start`` is the value on the arc wrapping through 0."""
        jumps = np.asarray(jumps, dtype=float)
        if jumps.size == 0:
            return cls.constant(start, normalization)
        return cls(breakpoints, start + np.cumsum(jumps), normalization)

    @classmethod
    def indicator(cls, a: float, b: float, height: float = 1.0) -> "StepFunctionCircle":
        """height on the arc [a, b) traversed counterclockwise, 0 elsewhere."""
        a, b = a % TWO_PI, b % TWO_PI
        if a < b:
            return cls(np.array([a, b]), np.array([height, 0.0]))
        return cls(np.array([b, a]), np.array([0.0, height]))

    @property
    def jumps(self) -> np.ndarray:
        if self.breakpoints.size == 0:
            return np.empty(0)
        return self.values - np.roll(self.values, 1)

    @property
    def arc_lengths(self) -> np.ndarray:
        if self.breakpoints.size == 0:
            return np.array([TWO_PI])
        b = self.breakpoints
        return np.diff(np.append(b, b[0] + TWO_PI))

    @property
    def wrap_value(self) -> float:
        """Value on the arc containing theta = 0."""
        return float(self.values[-1])

    def __call__(self, theta):
        theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        if self.breakpoints.size == 0:
            return np.full(theta.shape, self.values[0])
        idx = np.searchsorted(self.breakpoints, theta, side="right") - 1
        return self.values[idx]  # idx = -1 selects the wrapping arc

    def shifted(self, c: float, normalization: str | None = None) -> "StepFunctionCircle":
        return StepFunctionCircle(self.breakpoints, self.values + c, normalization or self.normalization)

    def mean(self) -> float:
        return float(np.dot(self.values, self.arc_lengths) / TWO_PI)

    def l1_norm(self) -> float:
        """\\int |f| dt over [0, 2pi)."""
        return float(np.dot(np.abs(self.values), self.arc_lengths))

    def normalized(self, mode: str) -> "StepFunctionCircle":
        if mode == "raw":
            return self.shifted(-self.wrap_value, "raw") if self.breakpoints.size else self.shifted(-self.values[0], "raw")
        if mode == "zero-mean":
            return self.shifted(-self.mean(), "zero-mean")
        if mode == "minimal-l1":
            return self.shifted(-weighted_median(self.values, self.arc_lengths), "minimal-l1")
        raise ValueError(f"unknown normalization {mode!r}; expected one of {NORMALIZATIONS}")

    def reflected(self) -> "StepFunctionCircle":
        """theta -> 2pi - theta (values at breakpoints follow the right-continuous convention)."""
        if self.breakpoints.size == 0:
            return self
        b = self.breakpoints
        newb = np.mod(TWO_PI - b, TWO_PI)
        # the arc [b_i, b_{i+1}) maps to (2pi - b_{i+1}, 2pi - b_i]
        newv = np.roll(self.values, 1)
        order = np.argsort(newb)
        return StepFunctionCircle(newb[order], newv[order], self.normalization)

    # -- export -------------------------------------------------------------

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["theta", "value"])
            if self.breakpoints.size == 0:
                w.writerow([format(0.0, ".17g"), format(self.values[0], ".17g")])
                return
            for t, v in zip(self.breakpoints, self.values):
                w.writerow([format(t, ".17g"), format(v, ".17g")])

    def sidecar(self) -> dict:
        return {
            "normalization": self.normalization,
            "breakpoints": self.breakpoints.size,
            "jumps": [float(x) for x in self.jumps],
        }

    @classmethod
    def from_csv(cls, path, normalization: str = "raw") -> "StepFunctionCircle":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [h.strip() for h in rows[0]] != ["theta", "value"]:
            raise ValueError(f"{path}: expected header 'theta,value'")
        data = np.array([[float(x) for x in r] for r in rows[1:] if r], dtype=float).reshape(-1, 2)
        if data.shape[0] == 1 and data[0, 0] == 0.0:
            # a single row at theta = 0 cannot be told apart from a constant
            return cls.constant(data[0, 1], normalization)
        return cls(data[:, 0], data[:, 1], normalization)


def weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    """Smallest value whose cumulative weight reaches half the total."""
    order = np.argsort(values, kind="stable")
    cw = np.cumsum(weights[order])
    idx = int(np.searchsorted(cw, 0.5 * cw[-1] * (1 - 1e-15)))
    return float(values[order][min(idx, len(order) - 1)])


@dataclass(frozen=True)
class SampledCircleFunction:
    """Complex samples on the grid theta_j = 2pi j / G."""

    samples: np.ndarray
    label: str = ""

    @property
    def grid_size(self) -> int:
        return self.samples.size

    @property
    def grid(self) -> np.ndarray:
        return TWO_PI * np.arange(self.grid_size) / self.grid_size

    @classmethod
    def from_callable(cls, f, grid_size: int, label: str = "") -> "SampledCircleFunction":
        theta = TWO_PI * np.arange(grid_size) / grid_size
        return cls(np.asarray(f(theta), dtype=complex), label)

    def __add__(self, other: "SampledCircleFunction") -> "SampledCircleFunction":
        return SampledCircleFunction(self.samples + other.samples, self.label)


# ---------------------------------------------------------------------------
# unitary pairs
# ---------------------------------------------------------------------------


def ssf_from_phases(phases0, phases1, normalization: str = "minimal-l1") -> StepFunctionCircle:
    theta = np.concatenate([np.asarray(phases0, float), np.asarray(phases1, float)])
    jumps = np.concatenate([np.ones(len(phases0)), -np.ones(len(phases1))])
    order = np.argsort(theta, kind="stable")
    b, j = kernels.merge_sorted_phases(theta[order], jumps[order], MERGE_TOL)
    raw = StepFunctionCircle.from_jumps(b, j, 0.0, "raw")
    return raw.normalized(normalization)


def unitary_ssf(U0, U1, normalization: str = "minimal-l1", tol_role: float = TOL_ROLE) -> StepFunctionCircle:
    A0, A1 = as_matrix(U0), as_matrix(U1)
    if A0.shape != A1.shape:
        raise DimensionMismatch(f"pair dimensions differ: {A0.shape} vs {A1.shape}")
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"unknown normalization {normalization!r}")
    p0 = eigenphases(A0, tol_role).phases
    p1 = eigenphases(A1, tol_role).phases
    return ssf_from_phases(p0, p1, normalization)


def integrate_step(eta: StepFunctionCircle, p: LaurentPolynomial) -> complex:
    """\\oint p'(zeta) eta(zeta) d zeta, exact arc by arc.

    Over an arc [a, b) the integral of p' is p(e^{ib}) - p(e^{ia}); summing with
    the arc values telescopes into -sum_j jump_j p(e^{i theta_j}).
    """
    if eta.breakpoints.size == 0:
        return 0j
    coeffs = np.asarray(p.coeffs, dtype=complex)
    return -kernels.laurent_jump_sum(eta.breakpoints, eta.jumps, coeffs, p.low)


# ---------------------------------------------------------------------------
# perturbation determinant
# ---------------------------------------------------------------------------

MAX_GRID = 2**16
UNWRAP_STEP = np.pi / 2


def perturbation_determinant(T0, T1, z) -> np.ndarray:
    """det(I + (T1 - T0)(T0 - z)^{-1}) at each point of ``z``."""
    A0, A1 = as_matrix(T0), as_matrix(T1)
    n = A0.shape[0]
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    eye = np.eye(n)
    shifted = A0[None, :, :] - z[:, None, None] * eye
    # (T1 - T0)(T0 - z)^{-1} = ((T0 - z)^{-T} (T1 - T0)^T)^T
    rhs = np.broadcast_to((A1 - A0).T, shifted.shape)
    X = np.linalg.solve(np.transpose(shifted, (0, 2, 1)), rhs)
    return np.linalg.det(eye + np.transpose(X, (0, 2, 1)))


def determinant_ssf(T0, T1, grid_size: int = 4096, margin: float = 0.05, tol_role: float = TOL_ROLE) -> SampledCircleFunction:
    """-(1/2pi i) log det(I + (T1 - T0)(T0 - zeta)^{-1}) sampled on |zeta| = 1.

    The logarithm follows the continuous branch along the grid starting from
    the principal value at theta = 0. The grid is doubled (up to 2^16) until
    every phase step is below pi/2.
    """
    A0, A1 = as_matrix(T0), as_matrix(T1)
    if A0.shape != A1.shape:
        raise DimensionMismatch(f"pair dimensions differ: {A0.shape} vs {A1.shape}")
    smax = singular_values(A0)[0]
    if smax > 1 - margin:
        raise NotStrictContraction(f"‖T0‖ = {smax:.6g} exceeds 1 - {margin:g}")
    g = int(grid_size)
    while True:
        theta = TWO_PI * np.arange(g) / g
        det = perturbation_determinant(A0, A1, np.exp(1j * theta))
        mod = np.abs(det)
        if np.min(mod) < 1e-12:
            j = int(np.argmin(mod))
            raise DeterminantVanishes(f"|det| = {mod[j]:.3e} at theta = {theta[j]:.17g}")
        arg, worst = kernels.unwrap_phase(det)
        if worst < UNWRAP_STEP:
            break
        if 2 * g > MAX_GRID:
            raise UnwrapAmbiguous(f"phase step {worst:.3f} >= pi/2 even on a {g}-point grid")
        g *= 2
    logdet = np.log(mod) + 1j * arg
    return SampledCircleFunction(-logdet / (2j * np.pi), label="determinant")


# ---------------------------------------------------------------------------
# Fourier / Hardy class / conjugate functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierCoeffs:
    """c_k for -M <= k <= M, stored at index k + M."""

    coeffs: np.ndarray
    M: int

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.M:
            raise IndexError(k)
        return complex(self.coeffs[k + self.M])

    def negative(self) -> np.ndarray:
        """c_{-M}, ..., c_{-1}."""
        return self.coeffs[: self.M]

    def __sub__(self, other: "FourierCoeffs") -> "FourierCoeffs":
        if self.M != other.M:
            raise ValueError("mode ranges differ")
        return FourierCoeffs(self.coeffs - other.coeffs, self.M)


def fourier(f, M: int) -> FourierCoeffs:
    """Fourier coefficients for |k| <= M.

    Step functions are integrated in closed form; sampled functions go through
    the discrete transform and need a grid of at least 4M points.
    """
    if isinstance(f, StepFunctionCircle):
        c = np.zeros(2 * M + 1, dtype=complex)
        c[M] = f.mean()
        if f.breakpoints.size:
            # c_k = (1/2pi i k) sum_j J_j e^{-ik theta_j}
            s = kernels.jump_fourier_sums(f.breakpoints, f.jumps, -M, M)
            k = np.arange(-M, M + 1)
            nz = k != 0
            c[nz] = s[nz] / (2j * np.pi * k[nz])
        return FourierCoeffs(c, M)
    if isinstance(f, SampledCircleFunction):
        G = f.grid_size
        if G < 4 * M:
            raise GridTooCoarse(f"grid of {G} points cannot resolve {M} modes (need >= {4 * M})")
        F = np.fft.fft(f.samples) / G
        k = np.arange(-M, M + 1)
        return FourierCoeffs(F[k % G], M)
    raise TypeError(f"cannot take Fourier coefficients of {type(f).__name__}")


def hardy_deficit(xi1, xi2, M: int = 256) -> float:
    """max over -M <= k <= -1 of |c_k(xi1 - xi2)|.

    Zero exactly when the difference lies in H^1 up to mode M.
    """
    d = fourier(xi1, M) - fourier(xi2, M)
    return float(np.max(np.abs(d.negative()))) if M > 0 else 0.0


def zygmund_value(xi: StepFunctionCircle) -> float:
    """\\int xi log(1 + xi) dm with m the normalized arc measure."""
    if np.any(xi.values < 0):
        raise NegativeValues(f"Zygmund integral needs xi >= 0; minimum is {xi.values.min():g}")
    return float(np.dot(xi.values * np.log1p(xi.values), xi.arc_lengths) / TWO_PI)


def conjugate_function(xi, M: int, grid_size: int | None = None) -> SampledCircleFunction:
    """Harmonic conjugate through the multiplier -i sgn(k), truncated at |k| <= M."""
    G = grid_size or 4 * M
    if G < 4 * M:
        raise GridTooCoarse(f"grid of {G} points is below 4M = {4 * M}")
    c = fourier(xi, M)
    k = np.arange(-M, M + 1)
    spec = np.zeros(G, dtype=complex)
    spec[k % G] = -1j * np.sign(k) * c.coeffs
    return SampledCircleFunction(np.fft.ifft(spec) * G, label="conjugate")


def zygmund_and_conjugate(xi: StepFunctionCircle, M: int = 256, grid_size: int | None = None):
    return zygmund_value(xi), conjugate_function(xi, M, grid_size)


def write_step_function(eta: StepFunctionCircle, csv_path, json_path=None) -> None:
    eta.to_csv(csv_path)
    if json_path is not None:
        Path(json_path).write_text(json.dumps(eta.sidecar()))
