"""Operator kernel: dense complex matrices and the linear algebra around them.

Matrices are plain ``numpy`` arrays inside the package; :class:`Operator`
wraps one together with a label for file input/output and for the
command line.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from shiftlab.errors import (
    DimensionMismatch,
    InvalidConfig,
    NegativePowersNeedUnitary,
    NotAContraction,
    NotDissipative,
    NotPositiveSemidefinite,
    PoleInClosedUpperHalfPlane,
    SchemaError,
    SingularResolvent,
)

TOL_ROLE = 1e-10
TOL_PSD = 1e-12
DEFECT_FLOOR = 8 * np.finfo(float).eps


@dataclass(frozen=True)
class Operator:
    """Square complex matrix with a free-text label. The entries are read-only."""

    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128, copy=True)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise DimensionMismatch(f"operator must be a non-empty square matrix, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_dict(self) -> dict:
        return {
            "n": self.dim,
            "re": self.entries.real.tolist(),
            "im": self.entries.imag.tolist(),
            "label": self.label,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Operator":
        return cls(_parse_entries(data), label=str(data.get("label", "")))


def _parse_entries(data: dict) -> np.ndarray:
    if not isinstance(data, dict):
        raise SchemaError("operator file must hold a JSON object")
    for key in ("n", "re", "im"):
        if key not in data:
            raise SchemaError(f"missing field {key!r}")
    n = data["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n <= 0:
        raise SchemaError(f"field 'n' must be a positive integer, got {n!r}")
    parts = []
    for key in ("re", "im"):
        rows = data[key]
        if not isinstance(rows, list) or len(rows) != n:
            raise SchemaError(f"field {key!r} must have {n} rows")
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                got = len(row) if isinstance(row, list) else type(row).__name__
                raise SchemaError(f"field {key!r} row {i} has length {got}, expected {n}")
            for j, x in enumerate(row):
                if isinstance(x, bool) or not isinstance(x, (int, float)):
                    raise SchemaError(f"field {key!r} row {i} column {j} is not a number")
        parts.append(np.array(rows, dtype=float))
    return parts[0] + 1j * parts[1]


def read_operator(path) -> Operator:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return Operator.from_dict(data)


def write_operator(op: Operator, path, **metadata) -> None:
    data = op.to_dict()
    data.update(metadata)
    Path(path).write_text(json.dumps(data))


def as_matrix(M) -> np.ndarray:
    if isinstance(M, Operator):
        return M.entries
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {arr.shape}")
    return arr


def adjoint(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return (M + adjoint(M)) / 2


def imaginary_part(M: np.ndarray) -> np.ndarray:
    """(M - M*) / 2i, the Hermitian operator with M = Re M + i Im M."""
    return (M - adjoint(M)) / 2j


# ---------------------------------------------------------------------------
# spectra and roles
# ---------------------------------------------------------------------------


def singular_values(M) -> np.ndarray:
    """Singular values in descending order, multiplicities kept."""
    return np.linalg.svd(as_matrix(M), compute_uv=False)


def eigvalsh(H: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(hermitian_part(H))


@dataclass(frozen=True)
class RoleReport:
    contraction: bool
    strict_contraction: bool
    unitary: bool
    dissipative: bool
    sigma_max: float
    unitarity_defect: float
    im_part_min: float
    tol_role: float


def classify(M, tol_role: float = TOL_ROLE) -> RoleReport:
    A = as_matrix(M)
    smax = float(singular_values(A)[0])
    udef = float(np.linalg.norm(adjoint(A) @ A - np.eye(A.shape[0])))
    imin = float(eigvalsh(imaginary_part(A))[0])
    return RoleReport(
        contraction=smax <= 1 + tol_role,
        strict_contraction=smax < 1 - tol_role,
        unitary=udef <= tol_role,
        dissipative=imin >= -tol_role,
        sigma_max=smax,
        unitarity_defect=udef,
        im_part_min=imin,
        tol_role=tol_role,
    )


def require_contraction(T: np.ndarray, tol_role: float = TOL_ROLE) -> float:
    smax = float(singular_values(T)[0])
    if smax > 1 + tol_role:
        raise NotAContraction(f"largest singular value {smax:.17g} exceeds 1 + {tol_role:g}")
    return smax


def psd_sqrt(A: np.ndarray, tol_psd: float = TOL_PSD) -> np.ndarray:
    """Unique positive semidefinite square root of a Hermitian matrix.

    Eigenvalues in [-tol_psd, 0) are treated as roundoff and clamped to 0;
    anything more negative raises ``NotPositiveSemidefinite``.
    """
    w, V = np.linalg.eigh(hermitian_part(A))
    if w[0] < -tol_psd:
        raise NotPositiveSemidefinite(f"smallest eigenvalue {w[0]:.3e} is below -{tol_psd:g}")
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ adjoint(V)


def defect(T, tol_role: float = TOL_ROLE) -> tuple[np.ndarray, np.ndarray]:
    """Defect operators (I - T*T)^{1/2} and (I - TT*)^{1/2} of a contraction.

    Both come from one SVD T = W S V*, so that D_T = V (I - S^2)^{1/2} V* and
    D_{T*} = W (I - S^2)^{1/2} W* satisfy T D_T = D_{T*} T to roundoff even when
    T is (nearly) unitary. Two separate eigendecompositions would only match
    to about sqrt(eps) there.
    """
    A = as_matrix(T)
    require_contraction(A, tol_role)
    W, s, Vh = np.linalg.svd(A)
    d2 = (1.0 - s) * (1.0 + s)
    # 1 - s^2 is only known to a few ulps; below that it is indistinguishable from 0
    d2[d2 < DEFECT_FLOOR] = 0.0
    d = np.sqrt(d2)
    V = adjoint(Vh)
    return (V * d) @ Vh, (W * d) @ adjoint(W)


def schatten_norm(M, p: float) -> float:
    """(sum s_k^p)^(1/p); ``p = inf`` gives the operator norm."""
    if not p > 0:
        raise ValueError(f"Schatten exponent must be positive, got {p}")
    s = singular_values(M)
    if np.isinf(p) or s[0] == 0:
        return float(s[0])
    # roundoff-level singular values would dominate small exponents
    s = s[s > s[0] * s.size * np.finfo(float).eps]
    return float(np.sum(s**p) ** (1.0 / p))


def an_functional(s: Sequence[float]) -> float:
    """sum s_k log(1 + 1/s_k) with the summand read as 0 when s_k = 0."""
    s = np.asarray(s, dtype=float)
    pos = s[s > 0]
    # log(1 + 1/s) = log1p(s) - log(s) avoids overflow for subnormal s
    return float(np.sum(pos * (np.log1p(pos) - np.log(pos))))


# ---------------------------------------------------------------------------
# functional calculus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaurentPolynomial:
    """sum_m coeffs[m] z**(low + m)."""

    coeffs: tuple
    low: int = 0

    def __post_init__(self):
        c = tuple(complex(x) for x in np.atleast_1d(np.asarray(self.coeffs, dtype=complex)))
        object.__setattr__(self, "coeffs", c or (0j,))
        object.__setattr__(self, "low", int(self.low))

    @classmethod
    def monomial(cls, k: int, coeff: complex = 1.0) -> "LaurentPolynomial":
        return cls((coeff,), low=k)

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    @property
    def is_analytic(self) -> bool:
        return all(c == 0 for m, c in enumerate(self.coeffs) if self.low + m < 0)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc * z**self.low if self.low else acc

    def derivative(self) -> "LaurentPolynomial":
        powers = self.low + np.arange(len(self.coeffs))
        return LaurentPolynomial(np.asarray(self.coeffs) * powers, low=self.low - 1)

    def __mul__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return LaurentPolynomial(np.convolve(self.coeffs, other.coeffs), low=self.low + other.low)

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        low = min(self.low, other.low)
        high = max(self.high, other.high)
        c = np.zeros(high - low + 1, dtype=complex)
        c[self.low - low : self.high - low + 1] += self.coeffs
        c[other.low - low : other.high - low + 1] += other.coeffs
        return LaurentPolynomial(c, low=low)


def poly_eval(T, p: LaurentPolynomial, tol_role: float = TOL_ROLE) -> np.ndarray:
    """p(T) by Horner's rule; negative powers need a unitary T (T^{-1} = T*)."""
    A = as_matrix(T)
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    acc = np.zeros((n, n), dtype=complex)
    for c in reversed(p.coeffs):
        acc = acc @ A + c * eye
    if p.low > 0:
        acc = acc @ np.linalg.matrix_power(A, p.low)
    elif p.low < 0:
        udef = np.linalg.norm(adjoint(A) @ A - eye)
        if udef > tol_role:
            raise NegativePowersNeedUnitary(f"‖T*T - I‖_F = {udef:.3e} exceeds {tol_role:g}")
        acc = acc @ np.linalg.matrix_power(adjoint(A), -p.low)
    return acc


@dataclass(frozen=True)
class RationalFunction:
    """constant + sum_k coeff_k (t - pole_k)^{-order_k}, orders 1 or 2."""

    terms: tuple
    constant: complex = 0j

    def __post_init__(self):
        terms = tuple((complex(z), int(m), complex(c)) for z, m, c in self.terms)
        for z, m, _ in terms:
            if m not in (1, 2):
                raise ValueError(f"pole order must be 1 or 2, got {m}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def resolvent_power(cls, pole: complex, order: int = 1) -> "RationalFunction":
        return cls(((pole, order, 1.0),))

    def __call__(self, t):
        t = np.asarray(t, dtype=complex)
        out = np.full(t.shape, self.constant, dtype=complex)
        for z, m, c in self.terms:
            out = out + c / (t - z) ** m
        return out

    @property
    def label(self) -> str:
        return " + ".join(f"{c:g}*(t-({z:g}))^-{m}" for z, m, c in self.terms) or "0"


def rational_eval(L, f: RationalFunction, tol_role: float = TOL_ROLE) -> np.ndarray:
    """f(L) for a dissipative L and f with poles in the open lower half-plane."""
    A = as_matrix(L)
    n = A.shape[0]
    imin = eigvalsh(imaginary_part(A))[0]
    if imin < -tol_role:
        raise NotDissipative(f"smallest eigenvalue of Im L is {imin:.3e}")
    eye = np.eye(n, dtype=complex)
    out = f.constant * eye
    for z, m, c in f.terms:
        if not z.imag < 0:
            raise PoleInClosedUpperHalfPlane(f"pole {z} is not in the open lower half-plane")
        try:
            R = np.linalg.solve(A - z * eye, eye)
        except np.linalg.LinAlgError as exc:
            raise SingularResolvent(z) from exc
        if not np.all(np.isfinite(R)):
            raise SingularResolvent(z)
        out = out + c * (R if m == 1 else R @ R)
    return out


# ---------------------------------------------------------------------------
# seeded ensembles
# ---------------------------------------------------------------------------

KINDS = ("strict-contraction", "contraction", "unitary", "dissipative", "positive-contraction")


def generator(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based Philox stream keyed by (master seed, stream id)."""
    key = ((int(seed) & (2**64 - 1)) << 64) | (int(stream) & (2**64 - 1))
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class EnsembleConfig:
    dim: int
    kind: str = "strict-contraction"
    margin: float = 0.1
    seed: int = 0
    perturbation_rank: int = 0
    perturbation_size: float = 0.0
    stream: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidConfig(f"unknown ensemble kind {self.kind!r}; expected one of {KINDS}")
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise InvalidConfig(f"dim must be a positive integer, got {self.dim!r}")
        if not 0 < self.margin < 1:
            raise InvalidConfig(f"margin must lie in (0, 1), got {self.margin}")
        if self.perturbation_rank < 0 or self.perturbation_rank > self.dim:
            raise InvalidConfig(f"perturbation_rank must lie in [0, dim], got {self.perturbation_rank}")
        if self.perturbation_size < 0:
            raise InvalidConfig("perturbation_size must be nonnegative")


def _ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(_ginibre(rng, n, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def clamp_singular_values(M: np.ndarray, smax: float) -> np.ndarray:
    U, s, Vh = np.linalg.svd(M)
    return (U * np.minimum(s, smax)) @ Vh


def nearest_unitary(M: np.ndarray) -> np.ndarray:
    U, _, Vh = np.linalg.svd(M)
    return U @ Vh


def clamp_spectrum(H: np.ndarray, lo: float, hi: float) -> np.ndarray:
    w, V = np.linalg.eigh(hermitian_part(H))
    return (V * np.clip(w, lo, hi)) @ adjoint(V)


def _low_rank(rng: np.random.Generator, n: int, r: int) -> np.ndarray:
    """Rank-r Gaussian matrix scaled to unit trace norm."""
    G = _ginibre(rng, n, r) @ adjoint(_ginibre(rng, n, r))
    return G / schatten_norm(G, 1)


def _sample(cfg: EnsembleConfig, rng: np.random.Generator) -> np.ndarray:
    n, delta = cfg.dim, cfg.margin
    if cfg.kind == "strict-contraction":
        return clamp_singular_values(_ginibre(rng, n, n) / np.sqrt(n), 1 - delta)
    if cfg.kind == "contraction":
        return clamp_singular_values(_ginibre(rng, n, n) / np.sqrt(n), 1.0)
    if cfg.kind == "unitary":
        return _haar_unitary(rng, n)
    if cfg.kind == "dissipative":
        A = hermitian_part(_ginibre(rng, n, n)) / np.sqrt(n)
        C = _ginibre(rng, n, n) / np.sqrt(n)
        return A + 1j * (delta * np.eye(n) + C @ adjoint(C) / 2)
    # positive-contraction
    V = _haar_unitary(rng, n)
    w = rng.uniform(delta, 1.0, size=n)
    return (V * w) @ adjoint(V)


def _project(cfg: EnsembleConfig, M: np.ndarray) -> np.ndarray:
    if cfg.kind == "strict-contraction":
        return clamp_singular_values(M, 1 - cfg.margin)
    if cfg.kind == "contraction":
        return clamp_singular_values(M, 1.0)
    if cfg.kind == "unitary":
        return nearest_unitary(M)
    if cfg.kind == "dissipative":
        return hermitian_part(M) + 1j * clamp_spectrum(imaginary_part(M), 0.0, np.inf)
    return clamp_spectrum(M, 0.0, 1.0)


def random_operator(cfg: EnsembleConfig):
    """Sample an operator, or a (base, perturbed) pair when ``perturbation_rank > 0``."""
    rng = generator(cfg.seed, cfg.stream)
    base = _sample(cfg, rng)
    label = f"{cfg.kind}/dim={cfg.dim}/seed={cfg.seed}/stream={cfg.stream}"
    if cfg.perturbation_rank == 0:
        return Operator(base, label=label)
    P = _low_rank(rng, cfg.dim, cfg.perturbation_rank)
    if cfg.kind == "positive-contraction":
        P = hermitian_part(P)
        P = P / schatten_norm(P, 1)
    perturbed = _project(cfg, base + cfg.perturbation_size * P)
    return Operator(base, label=label + "/base"), Operator(perturbed, label=label + "/perturbed")
