"""Real-valued spectral shift functions for pairs of contractions.

The pipeline checks the kernel and weighted-perturbation hypotheses, builds
periodic Schaffer dilations of both contractions, and takes the step-function
SSF of the unitary pair. In finite dimension every Schatten-class membership
is automatic, so the hypothesis report quantifies conditioning rather than
deciding an inclusion.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from shiftlab import circle
from shiftlab.circle import StepFunctionCircle, SampledCircleFunction
from shiftlab.dilation import dilation_pair
from shiftlab.errors import (
    BadAlpha,
    DimensionMismatch,
    HypothesisFailed,
    KernelNotTrivial,
    NotInUnitInterval,
    XNotPositiveContraction,
)
from shiftlab.opcore import (
    DEFECT_FLOOR,
    TOL_ROLE,
    LaurentPolynomial,
    adjoint,
    an_functional,
    as_matrix,
    eigvalsh,
    generator,
    hermitian_part,
    poly_eval,
    psd_sqrt,
    require_contraction,
    schatten_norm,
    singular_values,
)

FINITE_DIMENSION_NOTE = (
    "finite dimension: Schatten-class memberships are automatic; "
    "norms quantify conditioning of the constructive pipeline"
)


@dataclass(frozen=True)
class PipelineConfig:
    N: int = 64
    alpha: float = 1.0
    kernel_tol: float = 1e-8
    normalization: str = "minimal-l1"
    degrees: int = 16
    random_polys: int = 4
    seed: int = 0
    tol: float = 1e-8
    tol_role: float = TOL_ROLE

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass(frozen=True)
class HypothesisReport:
    sigma_min_defect: float
    sigma_min_defect_star: float
    alpha: float
    norm_a: float
    norm_b: float
    kernel_ok: bool
    kernel_ok_star: bool
    verdict: bool
    note: str = FINITE_DIMENSION_NOTE

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass(frozen=True)
class TraceFormulaReport:
    function_label: str
    lhs: complex
    rhs: complex
    abs_residual: float
    tolerance: float
    pass_: bool
    counted: bool = True

    def to_dict(self) -> dict:
        return {
            "function": self.function_label,
            "lhs_re": self.lhs.real,
            "lhs_im": self.lhs.imag,
            "rhs_re": self.rhs.real,
            "rhs_im": self.rhs.imag,
            "abs_residual": self.abs_residual,
            "tolerance": self.tolerance,
            "pass": self.pass_,
            "counted": self.counted,
        }


@dataclass(frozen=True)
class SSFResult:
    ssf: StepFunctionCircle
    period: int
    hypothesis: HypothesisReport
    residual_table: list
    an_functional: float
    hardy_deficit_vs_determinant: float | None = None

    @property
    def passed(self) -> bool:
        return all(r.pass_ for r in self.residual_table if r.counted)

    @property
    def max_residual(self) -> float:
        counted = [r.abs_residual for r in self.residual_table if r.counted]
        return max(counted, default=0.0)


def _check_alpha(alpha: float) -> None:
    if not 0.5 < alpha <= 1.0:
        raise BadAlpha(f"alpha must lie in (1/2, 1], got {alpha}")


def _inverse_power_of_defect(G: np.ndarray, alpha: float, kernel_tol: float):
    """Given G = D^2 (PSD), return (sigma_min(D), D^{-2 alpha} or None)."""
    w, V = np.linalg.eigh(hermitian_part(G))
    w = np.where(w < DEFECT_FLOOR, 0.0, w)
    d = np.sqrt(w)
    smin = float(d[0])
    if smin < kernel_tol:
        return smin, None
    return smin, (V * w ** (-alpha)) @ adjoint(V)


def check_hypotheses(T0, T1, alpha: float = 1.0, kernel_tol: float = 1e-8, tol_role: float = TOL_ROLE) -> HypothesisReport:
    """Kernel condition on D_{T0} and the weighted S_1 norms of the perturbation."""
    _check_alpha(alpha)
    A0, A1 = as_matrix(T0), as_matrix(T1)
    if A0.shape != A1.shape:
        raise DimensionMismatch(f"pair dimensions differ: {A0.shape} vs {A1.shape}")
    require_contraction(A0, tol_role)
    require_contraction(A1, tol_role)
    eye = np.eye(A0.shape[0])
    smin, W = _inverse_power_of_defect(eye - adjoint(A0) @ A0, alpha, kernel_tol)
    smin_s, Ws = _inverse_power_of_defect(eye - A0 @ adjoint(A0), alpha, kernel_tol)
    V = A1 - A0
    norm_a = schatten_norm(V @ W, 1) if W is not None else np.inf
    norm_b = schatten_norm(adjoint(V) @ Ws, 1) if Ws is not None else np.inf
    ok = W is not None
    return HypothesisReport(
        sigma_min_defect=smin,
        sigma_min_defect_star=smin_s,
        alpha=alpha,
        norm_a=float(norm_a),
        norm_b=float(norm_b),
        kernel_ok=ok,
        kernel_ok_star=Ws is not None,
        verdict=ok,
    )


def default_test_polynomials(degrees: int = 16, random_polys: int = 4, seed: int = 0):
    """Monomials z^1..z^degrees plus seeded random polynomials with coefficients in the unit disc."""
    polys = [(f"z^{k}", LaurentPolynomial.monomial(k)) for k in range(1, degrees + 1)]
    rng = generator(seed, stream=0x7E57)
    for i in range(random_polys):
        r = np.sqrt(rng.uniform(0, 1, degrees + 1))
        phi = rng.uniform(0, 2 * np.pi, degrees + 1)
        polys.append((f"random[{i}]", LaurentPolynomial(r * np.exp(1j * phi))))
    return polys


def verify_trace_formula(T0, T1, ssf: StepFunctionCircle, polys, tol: float = 1e-8, wrap_degree: int | None = None):
    """trace(p(T1) - p(T0)) against \\oint p' ssf d zeta for analytic polynomials.

    Rows whose degree reaches ``wrap_degree`` are reported but not counted.
    """
    A0, A1 = as_matrix(T0), as_matrix(T1)
    rows = []
    for label, p in polys:
        if not p.is_analytic:
            raise ValueError(f"{label}: only analytic polynomials apply to contractions")
        lhs = complex(np.trace(poly_eval(A1, p) - poly_eval(A0, p)))
        rhs = circle.integrate_step(ssf, p)
        res = abs(lhs - rhs)
        counted = wrap_degree is None or p.high < wrap_degree
        rows.append(TraceFormulaReport(label, lhs, rhs, res, tol, bool(res <= tol), counted))
    return rows


def real_ssf(T0, T1, cfg: PipelineConfig = PipelineConfig(), polys=None) -> SSFResult:
    """SSF of the dilation pair, verified against the contraction pair itself."""
    hyp = check_hypotheses(T0, T1, cfg.alpha, cfg.kernel_tol, cfg.tol_role)
    if not hyp.verdict:
        raise HypothesisFailed(f"kernel condition fails: sigma_min(D_T0) = {hyp.sigma_min_defect:.3e}")
    if polys is None:
        polys = default_test_polynomials(cfg.degrees, cfg.random_polys, cfg.seed)
    max_degree = max((p.high for _, p in polys), default=0)
    if cfg.N < 2 * max_degree + 2:
        raise ValueError(f"period {cfg.N} is below 2 * {max_degree} + 2")
    pair = dilation_pair(T0, T1, cfg.N, cfg.tol_role)
    eta = circle.unitary_ssf(pair.first.matrix, pair.second.matrix, cfg.normalization, tol_role=1e-9)
    wrap = -(-cfg.N // 2)  # ceil(N / 2)
    rows = verify_trace_formula(T0, T1, eta, polys, cfg.tol, wrap_degree=wrap)
    s = singular_values(as_matrix(T1) - as_matrix(T0))
    return SSFResult(eta, cfg.N, hyp, rows, an_functional(s))


def dual_route_deficit(T0, T1, cfg: PipelineConfig = PipelineConfig(), M: int = 256, grid_size: int = 4096):
    """Hardy deficit between the dilation SSF and the determinant SSF.

    The dilation's negative Fourier modes are exact up to order N - 2, so the
    period is raised to at least M + 2 for this comparison.
    """
    N = max(cfg.N, M + 2)
    result = real_ssf(T0, T1, replace(cfg, N=N))
    xi_det = circle.determinant_ssf(T0, T1, grid_size=max(grid_size, 4 * M))
    deficit = circle.hardy_deficit(result.ssf, xi_det, M)
    return replace(result, hardy_deficit_vs_determinant=deficit), xi_det


@dataclass(frozen=True)
class CorollaryResult:
    real: SSFResult
    determinant: SampledCircleFunction | None
    hardy_deficit: float | None
    corollary_norm_a: float
    corollary_norm_b: float
    im_part_report: dict


def corollary_xt(T, X, cfg: PipelineConfig = PipelineConfig(), M: int = 256, tol_role: float = TOL_ROLE) -> CorollaryResult:
    """Pair {T, XT} with 0 <= X <= I."""
    A, Xm = as_matrix(T), as_matrix(X)
    if A.shape != Xm.shape:
        raise DimensionMismatch(f"T and X dimensions differ: {A.shape} vs {Xm.shape}")
    herm = np.linalg.norm(Xm - adjoint(Xm))
    w = eigvalsh(Xm)
    if herm > tol_role or w[0] < -tol_role or w[-1] > 1 + tol_role:
        raise XNotPositiveContraction(f"X must be Hermitian with spectrum in [0, 1]; got [{w[0]:.3e}, {w[-1]:.3e}]")
    require_contraction(A, tol_role)
    eye = np.eye(A.shape[0])
    _, W = _inverse_power_of_defect(eye - adjoint(A) @ A, cfg.alpha, cfg.kernel_tol)
    _, Ws = _inverse_power_of_defect(eye - A @ adjoint(A), cfg.alpha, cfg.kernel_tol)
    IX = eye - Xm
    ca = schatten_norm(IX @ A @ W, 1) if W is not None else np.inf
    cb = schatten_norm(adjoint(A) @ IX @ Ws, 1) if Ws is not None else np.inf
    T1 = Xm @ A
    strict = singular_values(A)[0] <= 0.95
    if strict:
        real, xi_det = dual_route_deficit(A, T1, cfg, M)
        deficit = real.hardy_deficit_vs_determinant
        # purely imaginary and real SSFs built from the determinant route
        imag_ssf = SampledCircleFunction(2j * xi_det.samples.imag)
        real_from_det = SampledCircleFunction(2 * xi_det.samples.real + 0j)
        im_report = {
            "imaginary_ssf_l1": float(np.mean(np.abs(imag_ssf.samples)) * 2 * np.pi),
            "imaginary_vs_determinant_deficit": circle.hardy_deficit(imag_ssf, xi_det, M),
            "real_vs_imaginary_deficit": circle.hardy_deficit(real_from_det, imag_ssf, M),
            "determinant_real_part_max": float(np.max(np.abs(xi_det.samples.real))),
            "determinant_imag_part_max": float(np.max(np.abs(xi_det.samples.imag))),
        }
    else:
        real = real_ssf(A, T1, cfg)
        xi_det, deficit, im_report = None, None, {}
    return CorollaryResult(real, xi_det, deficit, float(ca), float(cb), im_report)


# ---------------------------------------------------------------------------
# scaling studies
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DefectStudyRow:
    dim: int
    norm_a: float
    norm_b: float
    defect_diff_p: float
    defect_diff_star_p: float


def defect_difference_study(pairs: Sequence, p: float = 1.0, alpha: float = 1.0, kernel_tol: float = 1e-8) -> list[DefectStudyRow]:
    """‖D_{T1} - D_{T0}‖_p and ‖D_{T1*} - D_{T0*}‖_p across a family of pairs."""
    from shiftlab.opcore import defect

    rows = []
    for T0, T1 in pairs:
        A0, A1 = as_matrix(T0), as_matrix(T1)
        hyp = check_hypotheses(A0, A1, alpha, kernel_tol)
        D0, D0s = defect(A0)
        D1, D1s = defect(A1)
        rows.append(
            DefectStudyRow(
                dim=A0.shape[0],
                norm_a=hyp.norm_a,
                norm_b=hyp.norm_b,
                defect_diff_p=schatten_norm(D1 - D0, p),
                defect_diff_star_p=schatten_norm(D1s - D0s, p),
            )
        )
    return rows


@dataclass(frozen=True)
class SqrtStudy:
    ynorm: float
    wnorm: float
    target: float


def sqrt_lipschitz_study(X, Y, alpha: float = 1.0, p: float = 1.0, kernel_tol: float = 1e-8, tol: float = 1e-10) -> SqrtStudy:
    """‖Y - X‖_p, ‖(Y - X) X^{-alpha}‖_p and ‖Y^{1/2} - X^{1/2}‖_p."""
    _check_alpha(alpha)
    Xm, Ym = as_matrix(X), as_matrix(Y)
    for name, M in (("X", Xm), ("Y", Ym)):
        w = eigvalsh(M)
        if np.linalg.norm(M - adjoint(M)) > tol or w[0] < -tol or w[-1] > 1 + tol:
            raise NotInUnitInterval(f"{name} must satisfy 0 <= {name} <= I; spectrum [{w[0]:.3e}, {w[-1]:.3e}]")
    w, V = np.linalg.eigh(hermitian_part(Xm))
    if w[0] < kernel_tol:
        raise KernelNotTrivial(f"smallest eigenvalue of X is {w[0]:.3e}")
    Xinv = (V * w ** (-alpha)) @ adjoint(V)
    diff = Ym - Xm
    return SqrtStudy(
        ynorm=schatten_norm(diff, p),
        wnorm=schatten_norm(diff @ Xinv, p),
        target=schatten_norm(psd_sqrt(Ym, 1e-10) - psd_sqrt(Xm, 1e-10), p),
    )
