"""Real-valued spectral shift functions for bounded dissipative pairs.

Both operators are carried to the disc by T = (L - i)(L + i)^{-1}, the
contraction pipeline produces a circle SSF, and the SSF is pulled back along
the boundary map t -> (t - i)/(t + i). As t runs over R from -inf to +inf the
image runs counterclockwise from zeta = 1 back to zeta = 1 (theta = pi +
2 arctan t), so the pullback keeps its sign. The arc through zeta = 1 becomes
the two tails.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from shiftlab import kernels
from shiftlab.circle import StepFunctionCircle
from shiftlab.contraction import HypothesisReport, PipelineConfig, SSFResult, TraceFormulaReport, real_ssf
from shiftlab.errors import (
    BreakpointAtOne,
    Condition31Failed,
    DimensionMismatch,
    ImproperRational,
    NotDissipative,
    SingularShift,
)
from shiftlab.opcore import (
    TOL_ROLE,
    Operator,
    RationalFunction,
    adjoint,
    as_matrix,
    eigvalsh,
    generator,
    hermitian_part,
    imaginary_part,
    rational_eval,
    schatten_norm,
    singular_values,
)

TWO_PI = 2 * np.pi
ORIENTATION = 1.0  # pinned by the 1x1 pair (i, 2i) with f = (t + i)^{-1}
DEFAULT_POLES = (-1j, 1 - 2j, -3 - 0.5j)
TRUNCATION_RADII = (10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class DissipativeOperator:
    op: np.ndarray
    re_part: np.ndarray
    im_part: np.ndarray
    sigma_min_im: float
    label: str = ""

    @classmethod
    def from_matrix(cls, L, tol_role: float = TOL_ROLE, label: str = "") -> "DissipativeOperator":
        if isinstance(L, Operator) and not label:
            label = L.label
        A = as_matrix(L)
        re, im = hermitian_part(A), imaginary_part(A)
        smin = float(eigvalsh(im)[0])
        if smin < -tol_role:
            raise NotDissipative(f"smallest eigenvalue of Im L is {smin:.3e}")
        return cls(A, re, im, smin, label)

    @property
    def dim(self) -> int:
        return self.op.shape[0]


def _as_dissipative(L) -> DissipativeOperator:
    return L if isinstance(L, DissipativeOperator) else DissipativeOperator.from_matrix(L)


def cayley(L, tol_role: float = TOL_ROLE) -> np.ndarray:
    """(L - i)(L + i)^{-1}; a contraction for dissipative L."""
    A = _as_dissipative(L).op
    eye = np.eye(A.shape[0])
    try:
        # T (L + i) = L - i  <=>  (L + i)^T T^T = (L - i)^T
        T = np.linalg.solve((A + 1j * eye).T, (A - 1j * eye).T).T
    except np.linalg.LinAlgError as exc:
        raise SingularShift("L + iI is singular") from exc
    smax = singular_values(T)[0]
    if smax > 1 + tol_role:
        raise SingularShift(f"Cayley transform has norm {smax:.17g} > 1; L is not dissipative")
    return T


def inverse_cayley(T) -> np.ndarray:
    """i(I + T)(I - T)^{-1}."""
    A = as_matrix(T)
    eye = np.eye(A.shape[0])
    return np.linalg.solve((eye - A).T, (1j * (eye + A)).T).T


def theta_to_t(theta):
    """Real inverse Cayley value -cot(theta / 2) of the circle point e^{i theta}."""
    return -1.0 / np.tan(np.asarray(theta, dtype=float) / 2)


def t_to_theta(t):
    return np.pi + 2 * np.arctan(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class StepFunctionLine:
    """Step function on R: ``values[0]`` left of ``breakpoints[0]``, ``values[i]``
    on [breakpoints[i-1], breakpoints[i]), ``values[-1]`` right of the last breakpoint."""

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        b = np.array(self.breakpoints, dtype=float).reshape(-1)
        v = np.array(self.values, dtype=float).reshape(-1)
        if v.size != b.size + 1:
            raise ValueError("need len(breakpoints) + 1 values")
        if np.any(np.diff(b) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        b.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "values", v)

    @property
    def tail_left(self) -> float:
        return float(self.values[0])

    @property
    def tail_right(self) -> float:
        return float(self.values[-1])

    @property
    def jumps(self) -> np.ndarray:
        return np.diff(self.values)

    def __call__(self, t):
        idx = np.searchsorted(self.breakpoints, np.asarray(t, dtype=float), side="right")
        return self.values[idx]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("t,value\n")
            for t, v in zip(self.breakpoints, self.values[1:]):
                fh.write(f"{t:.17g},{v:.17g}\n")

    def sidecar(self) -> dict:
        return {"tail_left": self.tail_left, "tail_right": self.tail_right, "breakpoints": int(self.breakpoints.size)}

    @classmethod
    def from_csv(cls, path, tail_left: float | None = None) -> "StepFunctionLine":
        """Inverse of :meth:`to_csv`. The left tail is not stored in the CSV; by
        default it is taken equal to the right tail, as for a pulled-back SSF."""
        with open(path) as fh:
            rows = [line.strip().split(",") for line in fh if line.strip()]
        if not rows or rows[0] != ["t", "value"]:
            raise ValueError(f"{path}: expected header 't,value'")
        data = np.array([[float(x) for x in r] for r in rows[1:]], dtype=float).reshape(-1, 2)
        if data.shape[0] == 0:
            return cls(np.empty(0), np.array([0.0 if tail_left is None else tail_left]))
        left = data[-1, 1] if tail_left is None else tail_left
        return cls(data[:, 0], np.concatenate(([left], data[:, 1])))


def pull_back_ssf(eta: StepFunctionCircle, at_one_tol: float = 1e-12, nudge: float = 1e-10) -> StepFunctionLine:
    """Carry a circle step function to R along t -> (t - i)/(t + i)."""
    if eta.breakpoints.size == 0:
        return StepFunctionLine(np.empty(0), np.array([ORIENTATION * eta.values[0]]))
    theta = np.array(eta.breakpoints, dtype=float)
    values = np.array(eta.values, dtype=float)
    near = (theta < at_one_tol) | (TWO_PI - theta < at_one_tol)
    if np.any(near):
        warnings.warn(f"{int(near.sum())} breakpoint(s) at zeta = 1 moved by {nudge:g}", BreakpointAtOne, stacklevel=2)
        theta[near & (theta < np.pi)] += nudge
        theta[near & (theta > np.pi)] -= nudge
        order = np.argsort(theta)
        theta, values = theta[order], values[order]
    t = theta_to_t(theta)
    # circle arc [theta_i, theta_{i+1}) -> [t_i, t_{i+1}); the wrapping arc -> both tails
    line_values = np.concatenate(([values[-1]], values))
    return StepFunctionLine(t, ORIENTATION * line_values)


@dataclass(frozen=True)
class Condition31Report:
    sigma_min_im0: float
    norm_31: float
    verdict: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def check_condition_31(L0, L1, kernel_tol: float = 1e-8) -> Condition31Report:
    """‖(L1 - L0)(Im L0)^{-1}‖_{S_1} with the kernel of Im L0 required trivial."""
    D0, D1 = _as_dissipative(L0), _as_dissipative(L1)
    if D0.dim != D1.dim:
        raise DimensionMismatch(f"pair dimensions differ: {D0.dim} vs {D1.dim}")
    w, V = np.linalg.eigh(D0.im_part)
    smin = float(w[0])
    if smin < kernel_tol:
        return Condition31Report(smin, float("inf"), False)
    inv = (V / w) @ adjoint(V)
    return Condition31Report(smin, schatten_norm((D1.op - D0.op) @ inv, 1), True)


@dataclass(frozen=True)
class WeightedNormReport:
    weighted_norm: float
    truncated_l1: dict
    tail_constant_estimate: float

    def to_dict(self) -> dict:
        return {
            "weighted_norm": self.weighted_norm,
            "truncated_l1": {format(r, "g"): v for r, v in self.truncated_l1.items()},
            "tail_constant_estimate": self.tail_constant_estimate,
        }


def weighted_norms(xi: StepFunctionLine, radii=TRUNCATION_RADII) -> WeightedNormReport:
    return WeightedNormReport(
        weighted_norm=kernels.arctan_weighted_l1(xi.breakpoints, xi.values),
        truncated_l1={float(R): kernels.truncated_l1(xi.breakpoints, xi.values, float(R)) for R in radii},
        tail_constant_estimate=0.5 * (abs(xi.tail_left) + abs(xi.tail_right)),
    )


def default_rational_set(poles=DEFAULT_POLES):
    fs = []
    for z in poles:
        for m in (1, 2):
            fs.append((f"(t-({z:g}))^-{m}", RationalFunction.resolvent_power(z, m)))
    return fs


def line_integral(xi: StepFunctionLine, f: RationalFunction) -> complex:
    """\\int f'(t) xi(t) dt = sum over intervals v (f(b) - f(a)) with f(+-inf) = 0."""
    if f.constant != 0:
        raise ImproperRational(f"{f.label} does not vanish at infinity")
    if xi.breakpoints.size == 0:
        return 0j
    poles = np.array([z for z, _, _ in f.terms], dtype=complex)
    orders = np.array([m for _, m, _ in f.terms], dtype=np.int_)
    coeffs = np.array([c for _, _, c in f.terms], dtype=complex)
    return -kernels.rational_jump_sum(xi.breakpoints, xi.jumps, poles, orders, coeffs)


def verify_trace_formula_line(L0, L1, xi: StepFunctionLine, fs, tol: float = 1e-6):
    A0, A1 = _as_dissipative(L0).op, _as_dissipative(L1).op
    rows = []
    for label, f in fs:
        rhs = line_integral(xi, f)
        lhs = complex(np.trace(rational_eval(A1, f) - rational_eval(A0, f)))
        res = abs(lhs - rhs)
        rows.append(TraceFormulaReport(label, lhs, rhs, res, tol, bool(res <= tol)))
    return rows


@dataclass(frozen=True)
class LineSSFResult:
    ssf: StepFunctionLine
    weighted: WeightedNormReport
    residual_table: list
    circle: SSFResult
    condition_31: Condition31Report

    @property
    def passed(self) -> bool:
        return all(r.pass_ for r in self.residual_table)

    @property
    def max_residual(self) -> float:
        return max((r.abs_residual for r in self.residual_table), default=0.0)

    @property
    def circle_hypothesis(self) -> HypothesisReport:
        return self.circle.hypothesis


def real_ssf_line(L0, L1, cfg: PipelineConfig = PipelineConfig(), fs=None, tol: float = 1e-6) -> LineSSFResult:
    D0, D1 = _as_dissipative(L0), _as_dissipative(L1)
    c31 = check_condition_31(D0, D1, cfg.kernel_tol)
    if not c31.verdict:
        raise Condition31Failed(f"Im L0 has eigenvalue {c31.sigma_min_im0:.3e} below kernel tolerance")
    T0, T1 = cayley(D0), cayley(D1)
    circ = real_ssf(T0, T1, cfg)
    xi = pull_back_ssf(circ.ssf)
    if fs is None:
        fs = default_rational_set()
    rows = verify_trace_formula_line(D0, D1, xi, fs, tol)
    return LineSSFResult(xi, weighted_norms(xi), rows, circ, c31)


@dataclass(frozen=True)
class ProbeReport:
    im_trace_v: float
    tail_constant_estimate: float
    truncated_l1: dict
    fit_intercept: float
    fit_slope: float
    verdict_text: str

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["truncated_l1"] = {format(r, "g"): v for r, v in self.truncated_l1.items()}
        return d


SLOPE_GROWTH = 0.01
SLOPE_FLAT = 1e-6


def nonintegrability_probe(L0, L1, result: LineSSFResult) -> ProbeReport:
    """Growth of R -> \\int_{-R}^{R} |xi| fitted against a + bR."""
    A0, A1 = _as_dissipative(L0).op, _as_dissipative(L1).op
    im_tr = float(np.trace(A1 - A0).imag)
    radii = np.array(sorted(result.weighted.truncated_l1))
    ys = np.array([result.weighted.truncated_l1[r] for r in radii])
    b, a = np.polyfit(radii, ys, 1)
    if b > SLOPE_GROWTH:
        verdict = f"nonintegrable: truncated L1 grows linearly (slope {b:.3g}); Im trace V = {im_tr:.3g}"
    elif b <= SLOPE_FLAT:
        verdict = f"integrable: truncated L1 is flat (slope {b:.3g}); Im trace V = {im_tr:.3g}"
    else:
        verdict = f"inconclusive: slope {b:.3g} between {SLOPE_FLAT:g} and {SLOPE_GROWTH:g}; Im trace V = {im_tr:.3g}"
    return ProbeReport(im_tr, result.weighted.tail_constant_estimate, dict(zip(radii.tolist(), ys.tolist())), float(a), float(b), verdict)


def adaptive_period(poles, tol: float = 1e-9, minimum: int = 64) -> int:
    """Smallest power-of-two period whose wraparound error bound for the given
    poles, |zeta_z|^{-N} N^2, falls below ``tol``.

    A pole z of a test function sits at zeta_z = (z - i)/(z + i) outside the
    disc; the dilation SSF misses Taylor modes of order >= N - 1, which decay
    like |zeta_z|^{-k}.
    """
    N = minimum
    rho = min((abs((z - 1j) / (z + 1j)) for z in poles if z != -1j), default=np.inf)
    if not np.isfinite(rho):
        return N
    while rho ** (-N) * N**2 > tol and N < 4096:
        N *= 2
    return N


PROBE_KINDS = ("dissipative", "hermitian")


def probe_pair(L0, kind: str, size: float = 0.1, seed: int = 0, stream: int = 0):
    """Perturbed partner for the tail probe.

    ``kind="dissipative"`` adds ``size * i * P`` with P a random rank-one
    orthogonal projector (so Im trace V = size); ``kind="hermitian"`` adds
    ``size * H`` with H a random Hermitian matrix of unit operator norm.
    """
    A = _as_dissipative(L0).op
    n = A.shape[0]
    rng = generator(seed, stream)
    if kind == "dissipative":
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v /= np.linalg.norm(v)
        return A + 1j * size * np.outer(v, v.conj())
    if kind == "hermitian":
        G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        H = hermitian_part(G)
        return A + size * H / np.abs(eigvalsh(H)).max()
    raise ValueError(f"unknown probe kind {kind!r}; expected one of {PROBE_KINDS}")
