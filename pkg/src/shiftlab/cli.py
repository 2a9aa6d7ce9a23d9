"""Command line front end.

A run is described by a JSON config::

    {
      "command": "ssf-contraction",
      "inputs": {"T0": "t0.json", "T1": "t1.json"},      # or "ensemble": {...}
      "pipeline": {"N": 64, "degrees": 16, "tol": 1e-8},
      "master_seed": 0,
      "trials": 1,
      "out": "results"
    }

Input paths are resolved relative to the config file. Every run writes a
``report.json`` whose ``hashed`` section is a deterministic function of the
config and seed; wall-clock timings live next to it, outside the hash.

Exit codes: 0 all checks pass, 1 some check failed, 2 bad config, 3 bad
input file, 4 pipeline error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from shiftlab import circle, report
from shiftlab.contraction import (
    PipelineConfig,
    TraceFormulaReport,
    default_test_polynomials,
    defect_difference_study,
    real_ssf,
    sqrt_lipschitz_study,
    verify_trace_formula,
)
from shiftlab.dissipative import (
    DEFAULT_POLES,
    DissipativeOperator,
    StepFunctionLine,
    adaptive_period,
    default_rational_set,
    nonintegrability_probe,
    probe_pair,
    real_ssf_line,
    verify_trace_formula_line,
)
from shiftlab.errors import ConfigError, InputError, InvalidConfig, SchemaError, ShiftlabError
from shiftlab.kernels import BACKEND
from shiftlab.opcore import (
    TOL_ROLE,
    EnsembleConfig,
    LaurentPolynomial,
    Operator,
    RoleReport,
    an_functional,
    classify,
    poly_eval,
    random_operator,
    singular_values,
)

COMMANDS = (
    "ssf-contraction",
    "ssf-unitary",
    "ssf-dissipative",
    "verify",
    "study-defects",
    "study-sqrt",
    "probe-tail",
)
REQUIRED_INPUTS = {
    "ssf-contraction": ("T0", "T1"),
    "ssf-unitary": ("U0", "U1"),
    "ssf-dissipative": ("L0", "L1"),
    "verify": ("T0", "T1", "ssf"),
}
ENSEMBLE_ONLY = ("study-defects", "study-sqrt", "probe-tail")
DEFAULT_TOL = {"ssf-unitary": 1e-10, "ssf-dissipative": 1e-6, "probe-tail": 1e-6}
EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INPUT, EXIT_PIPELINE = 0, 1, 2, 3, 4


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    inputs: dict | None = None
    ensemble: dict | None = None
    pipeline: dict = field(default_factory=dict)
    out: str = "shiftlab-out"
    master_seed: int = 0
    trials: int = 1
    base_dir: Path = Path(".")

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {', '.join(COMMANDS)}")
        if (self.inputs is None) == (self.ensemble is None):
            raise ConfigError("exactly one of 'inputs' and 'ensemble' must be given")
        if self.command in ENSEMBLE_ONLY and self.ensemble is None:
            raise ConfigError(f"{self.command} needs an 'ensemble' section")
        if self.command == "verify" and self.inputs is None:
            raise ConfigError("verify needs an 'inputs' section")
        if self.inputs is not None:
            missing = [k for k in REQUIRED_INPUTS[self.command] if k not in self.inputs]
            if missing:
                raise ConfigError(f"inputs for {self.command} lack {', '.join(missing)}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not isinstance(self.master_seed, int) or self.master_seed < 0:
            raise ConfigError(f"master_seed must be a nonnegative integer, got {self.master_seed!r}")
        for key, val in self.pipeline.items():
            if "tol" in key and not (isinstance(val, (int, float)) and val > 0):
                raise ConfigError(f"tolerance {key!r} must be positive, got {val!r}")

    @classmethod
    def from_dict(cls, data: dict, base_dir=".") -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {"command", "inputs", "ensemble", "pipeline", "out", "master_seed", "trials"}
        extra = set(data) - known
        if extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")
        if "command" not in data:
            raise ConfigError("config lacks 'command'")
        return cls(base_dir=Path(base_dir), **data)

    def echo(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "ensemble": self.ensemble,
            "pipeline": self.pipeline,
            "master_seed": self.master_seed,
            "trials": self.trials,
        }

    def pipeline_config(self) -> PipelineConfig:
        p = dict(self.pipeline)
        p.setdefault("random_polys", 0)
        p.setdefault("tol", DEFAULT_TOL.get(self.command, 1e-8))
        p["seed"] = self.master_seed
        if p.get("N") == "auto":
            p["N"] = adaptive_period(self.poles())
        try:
            return PipelineConfig.from_dict(p)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def poles(self) -> tuple:
        raw = self.pipeline.get("poles")
        if raw is None:
            return DEFAULT_POLES
        try:
            return tuple(complex(re, im) for re, im in raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError("pipeline.poles must be a list of [re, im] pairs") from exc

    def input_path(self, key: str) -> Path:
        return self.base_dir / self.inputs[key]


def load_config(path, overrides: dict | None = None) -> RunConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if isinstance(data, dict):
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return RunConfig.from_dict(data, base_dir=path.parent)


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

ROLES = ("contraction", "unitary", "dissipative", "any")


def ingest(path, role: str | None = None, tol_role: float = TOL_ROLE):
    """Read an operator file and check it against its role.

    The role comes from the ``role`` argument, else from a ``"role"`` field in
    the file, else defaults to ``"any"``. Dissipative inputs come back as
    :class:`DissipativeOperator` (with Re/Im parts), everything else as
    :class:`Operator`.

    Returns
    -------
    (operator, RoleReport)
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise InputError(f"{path}: file not found") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    try:
        op = Operator.from_dict(data)
    except SchemaError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    role = role or data.get("role", "any")
    if role not in ROLES:
        raise SchemaError(f"{path}: field 'role' must be one of {ROLES}, got {role!r}")
    rep = classify(op, tol_role)
    if role == "unitary" and not rep.unitary:
        raise InputError(f"{path}: flagged unitary but ||U*U - I||_F = {rep.unitarity_defect:.3e}")
    if role == "contraction" and not rep.contraction:
        raise InputError(f"{path}: flagged contraction but ||T|| = {rep.sigma_max:.17g}")
    if role == "dissipative":
        if not rep.dissipative:
            raise InputError(f"{path}: flagged dissipative but min eig Im L = {rep.im_part_min:.3e}")
        return DissipativeOperator.from_matrix(op, tol_role), rep
    return op, rep


def _role_dict(rep: RoleReport) -> dict:
    return dict(rep.__dict__)


# ---------------------------------------------------------------------------
# per-trial work
# ---------------------------------------------------------------------------


@dataclass
class TrialOutput:
    index: int
    record: dict
    passed: bool
    writers: dict = field(default_factory=dict)
    seconds: float = 0.0


def _residual_writer(rows):
    def write(path):
        report.write_csv(
            path,
            ["function", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_residual", "tolerance", "pass", "counted"],
            [[r.function_label, r.lhs.real, r.lhs.imag, r.rhs.real, r.rhs.imag, r.abs_residual, r.tolerance, r.pass_, r.counted] for r in rows],
        )

    return write


def _json_writer(obj):
    def write(path):
        Path(path).write_text(report.dumps(obj) + "\n")

    return write


def _circle_svg(eta: circle.StepFunctionCircle, title: str):
    b = eta.breakpoints
    vals = np.concatenate(([eta.wrap_value], eta.values)) if b.size else eta.values[:1]

    def write(path):
        Path(path).write_text(report.step_svg(b, vals, (0.0, 2 * np.pi), title))

    return write


def _line_svg(xi: StepFunctionLine, title: str, radius: float = 10.0):
    keep = np.abs(xi.breakpoints) < radius
    b = xi.breakpoints[keep]
    vals = np.concatenate(([xi(-radius)], xi(b))) if b.size else np.array([xi(-radius)])

    def write(path):
        Path(path).write_text(report.step_svg(b, vals, (-radius, radius), title))

    return write


def _ensemble_pair(cfg: RunConfig, kind: str, index: int):
    ens = dict(cfg.ensemble)
    ens.pop("dims", None)
    ens.pop("probe_kinds", None)
    ens.pop("probe_size", None)
    ens.setdefault("kind", kind)
    ens.setdefault("dim", 2)
    ens.setdefault("perturbation_rank", 1)
    ens.setdefault("perturbation_size", 0.1)
    try:
        ec = EnsembleConfig(seed=cfg.master_seed, stream=index, **ens)
    except TypeError as exc:
        raise ConfigError(f"bad ensemble section: {exc}") from exc
    except InvalidConfig as exc:
        raise ConfigError(str(exc)) from exc
    return random_operator(ec)


def _pair(cfg: RunConfig, names, role: str, kind: str, index: int):
    if cfg.inputs is not None:
        tol_role = cfg.pipeline.get("tol_role", TOL_ROLE)
        (a, ra), (b, rb) = (ingest(cfg.input_path(k), role, tol_role) for k in names)
        return a, b, {names[0]: _role_dict(ra), names[1]: _role_dict(rb)}
    A, B = _ensemble_pair(cfg, kind, index)
    if role == "dissipative":
        A, B = DissipativeOperator.from_matrix(A), DissipativeOperator.from_matrix(B)
    return A, B, {"labels": [A.label, B.label]}


def _trial_ssf_contraction(cfg: RunConfig, i: int) -> TrialOutput:
    T0, T1, meta = _pair(cfg, ("T0", "T1"), "contraction", "strict-contraction", i)
    pc = cfg.pipeline_config()
    res = real_ssf(T0, T1, pc)
    rec = {
        "inputs": meta,
        "period": res.period,
        "hypothesis": res.hypothesis.to_dict(),
        "an_functional": res.an_functional,
        "breakpoints": int(res.ssf.breakpoints.size),
        "ssf": res.ssf.sidecar(),
        "max_residual": res.max_residual,
        "passed": res.passed,
    }
    w = {
        f"trial_{i:03d}_ssf.csv": res.ssf.to_csv,
        f"trial_{i:03d}_ssf.json": _json_writer(res.ssf.sidecar()),
        f"trial_{i:03d}_residuals.csv": _residual_writer(res.residual_table),
    }
    if cfg.pipeline.get("svg"):
        w[f"trial_{i:03d}_ssf.svg"] = _circle_svg(res.ssf, f"trial {i} dilation SSF")
    return TrialOutput(i, rec, res.passed, w)


def _trial_ssf_unitary(cfg: RunConfig, i: int) -> TrialOutput:
    U0, U1, meta = _pair(cfg, ("U0", "U1"), "unitary", "unitary", i)
    pc = cfg.pipeline_config()
    A0, A1 = U0.entries, U1.entries
    eta = circle.unitary_ssf(A0, A1, pc.normalization)
    rows = []
    for k in [k for k in range(-pc.degrees, pc.degrees + 1) if k != 0]:
        p = LaurentPolynomial.monomial(k)
        lhs = complex(np.trace(poly_eval(A1, p) - poly_eval(A0, p)))
        rhs = circle.integrate_step(eta, p)
        res = abs(lhs - rhs)
        rows.append(TraceFormulaReport(f"z^{k}", lhs, rhs, res, pc.tol, bool(res <= pc.tol)))
    passed = all(r.pass_ for r in rows)
    s = singular_values(A1 - A0)
    rec = {
        "inputs": meta,
        "breakpoints": int(eta.breakpoints.size),
        "ssf": eta.sidecar(),
        "an_functional": an_functional(s),
        "max_residual": max(r.abs_residual for r in rows),
        "passed": passed,
    }
    w = {
        f"trial_{i:03d}_ssf.csv": eta.to_csv,
        f"trial_{i:03d}_ssf.json": _json_writer(eta.sidecar()),
        f"trial_{i:03d}_residuals.csv": _residual_writer(rows),
    }
    if cfg.pipeline.get("svg"):
        w[f"trial_{i:03d}_ssf.svg"] = _circle_svg(eta, f"trial {i} unitary SSF")
    return TrialOutput(i, rec, passed, w)


def _trial_ssf_dissipative(cfg: RunConfig, i: int) -> TrialOutput:
    if cfg.ensemble is not None:
        cfg = replace(cfg, ensemble={"margin": 0.2, **cfg.ensemble})
    L0, L1, meta = _pair(cfg, ("L0", "L1"), "dissipative", "dissipative", i)
    pc = cfg.pipeline_config()
    res = real_ssf_line(L0, L1, pc, default_rational_set(cfg.poles()), pc.tol)
    rec = {
        "inputs": meta,
        "period": pc.N,
        "condition_31": res.condition_31.to_dict(),
        "circle_hypothesis": res.circle_hypothesis.to_dict(),
        "weighted": res.weighted.to_dict(),
        "an_functional": res.circle.an_functional,
        "ssf": res.ssf.sidecar(),
        "max_residual": res.max_residual,
        "passed": res.passed,
    }
    w = {
        f"trial_{i:03d}_ssf.csv": res.ssf.to_csv,
        f"trial_{i:03d}_ssf.json": _json_writer(res.ssf.sidecar()),
        f"trial_{i:03d}_residuals.csv": _residual_writer(res.residual_table),
    }
    if cfg.pipeline.get("svg"):
        w[f"trial_{i:03d}_ssf.svg"] = _line_svg(res.ssf, f"trial {i} line SSF")
    return TrialOutput(i, rec, res.passed, w)


def _trial_verify(cfg: RunConfig, i: int) -> TrialOutput:
    pc = cfg.pipeline_config()
    path = cfg.input_path("ssf")
    try:
        header = path.read_text().split("\n", 1)[0].strip()
    except FileNotFoundError as exc:
        raise InputError(f"{path}: file not found") from exc
    try:
        if header == "t,value":
            (L0, r0), (L1, r1) = (ingest(cfg.input_path(k), "dissipative") for k in ("T0", "T1"))
            xi = StepFunctionLine.from_csv(path)
            rows = verify_trace_formula_line(L0, L1, xi, default_rational_set(cfg.poles()), pc.tol)
        else:
            (T0, r0), (T1, r1) = (ingest(cfg.input_path(k), "contraction") for k in ("T0", "T1"))
            eta = circle.StepFunctionCircle.from_csv(path)
            polys = default_test_polynomials(pc.degrees, pc.random_polys, pc.seed)
            rows = verify_trace_formula(T0, T1, eta, polys, pc.tol)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    passed = all(r.pass_ for r in rows)
    rec = {
        "inputs": {"T0": _role_dict(r0), "T1": _role_dict(r1)},
        "max_residual": max(r.abs_residual for r in rows),
        "failing_rows": [r.function_label for r in rows if not r.pass_],
        "passed": passed,
    }
    return TrialOutput(i, rec, passed, {f"trial_{i:03d}_residuals.csv": _residual_writer(rows)})


def _study_dims(cfg: RunConfig) -> list[int]:
    dims = cfg.ensemble.get("dims", [2**k for k in range(1, 8)])
    if not dims or not all(isinstance(d, int) and d >= 1 for d in dims):
        raise ConfigError("ensemble.dims must be a non-empty list of positive integers")
    return dims


def _ratio(values) -> float:
    v = np.asarray(values, dtype=float)
    return float(v.max() / v.min()) if v.min() > 0 else float("inf")


def _trial_study_defects(cfg: RunConfig, i: int) -> TrialOutput:
    pc = cfg.pipeline_config()
    p = cfg.pipeline.get("p", 1.0)
    max_ratio = cfg.pipeline.get("max_ratio", 3.0)
    pairs = []
    for d in _study_dims(cfg):
        sub = replace(cfg, ensemble={**cfg.ensemble, "dim": d})
        pairs.append(_ensemble_pair(sub, "strict-contraction", i * 1000 + d))
    rows = defect_difference_study(pairs, p=p, alpha=pc.alpha, kernel_tol=pc.kernel_tol)
    ratio = _ratio([r.defect_diff_p for r in rows])
    passed = ratio <= max_ratio
    table = [dict(r.__dict__) for r in rows]
    rec = {"rows": table, "ratio": ratio, "max_ratio": max_ratio, "passed": passed}

    def write(path):
        report.write_csv(path, ["dim", "norm_a", "norm_b", "defect_diff_p", "defect_diff_star_p"], [list(r.values()) for r in table])

    return TrialOutput(i, rec, passed, {f"trial_{i:03d}_defects.csv": write})


def _trial_study_sqrt(cfg: RunConfig, i: int) -> TrialOutput:
    pc = cfg.pipeline_config()
    p = cfg.pipeline.get("p", 1.0)
    max_ratio = cfg.pipeline.get("max_ratio", 3.0)
    table = []
    for d in _study_dims(cfg):
        sub = replace(cfg, ensemble={**cfg.ensemble, "dim": d})
        X, Y = _ensemble_pair(sub, "positive-contraction", i * 1000 + d)
        st = sqrt_lipschitz_study(X, Y, alpha=pc.alpha, p=p, kernel_tol=pc.kernel_tol)
        table.append({"dim": d, "ynorm": st.ynorm, "wnorm": st.wnorm, "target": st.target})
    ratio = _ratio([r["target"] for r in table])
    passed = ratio <= max_ratio
    rec = {"rows": table, "ratio": ratio, "max_ratio": max_ratio, "passed": passed}

    def write(path):
        report.write_csv(path, ["dim", "ynorm", "wnorm", "target"], [list(r.values()) for r in table])

    return TrialOutput(i, rec, passed, {f"trial_{i:03d}_sqrt.csv": write})


def _trial_probe_tail(cfg: RunConfig, i: int) -> TrialOutput:
    pc = cfg.pipeline_config()
    kinds = cfg.ensemble.get("probe_kinds", ["dissipative", "hermitian"])
    size = cfg.ensemble.get("probe_size", 0.1)
    ens = {k: v for k, v in cfg.ensemble.items() if k not in ("probe_kinds", "probe_size")}
    ens = {"margin": 0.2, "dim": 2, **ens, "kind": "dissipative", "perturbation_rank": 0, "perturbation_size": 0.0}
    try:
        L0 = random_operator(EnsembleConfig(seed=cfg.master_seed, stream=i, **ens))
    except (TypeError, InvalidConfig) as exc:
        raise ConfigError(f"bad ensemble section: {exc}") from exc
    rec, writers, passed = {"base": L0.label}, {}, True
    for j, kind in enumerate(kinds):
        L1 = probe_pair(L0, kind, size, cfg.master_seed, stream=(1 << 32) + 2 * i + j)
        res = real_ssf_line(L0, L1, pc, default_rational_set(cfg.poles()), pc.tol)
        probe = nonintegrability_probe(L0, L1, res)
        if kind == "dissipative":
            ok = probe.fit_slope > 0.01 and probe.tail_constant_estimate > 0
        else:
            ok = probe.fit_slope <= 1e-6
        passed &= ok
        rec[kind] = {**probe.to_dict(), "expected_pattern": ok, "max_residual": res.max_residual}
        writers[f"trial_{i:03d}_{kind}_ssf.csv"] = res.ssf.to_csv
        if cfg.pipeline.get("svg"):
            writers[f"trial_{i:03d}_{kind}_ssf.svg"] = _line_svg(res.ssf, f"trial {i} {kind} probe")
    rec["passed"] = passed
    return TrialOutput(i, rec, passed, writers)


TRIALS = {
    "ssf-contraction": _trial_ssf_contraction,
    "ssf-unitary": _trial_ssf_unitary,
    "ssf-dissipative": _trial_ssf_dissipative,
    "verify": _trial_verify,
    "study-defects": _trial_study_defects,
    "study-sqrt": _trial_study_sqrt,
    "probe-tail": _trial_probe_tail,
}


# ---------------------------------------------------------------------------
# batch execution
# ---------------------------------------------------------------------------


def thread_count(trials: int) -> int:
    cap = os.environ.get("SHIFTLAB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"SHIFTLAB_THREADS must be an integer, got {cap!r}") from None
    return max(1, min(n, trials))


@dataclass
class RunReport:
    hashed: dict
    sha256: str
    timings: dict
    passed: bool
    path: Path | None = None

    def to_json(self) -> str:
        return report.dumps({"hashed": self.hashed, "sha256": self.sha256, "timings": self.timings}) + "\n"


def run(cfg: RunConfig) -> RunReport:
    """Execute every trial and write the artifacts plus ``report.json``.

    Nothing is left in ``cfg.out`` when an exception escapes.
    """
    work = TRIALS[cfg.command]
    trials = 1 if cfg.inputs is not None else cfg.trials
    t_start = time.perf_counter()

    def timed(i):
        t0 = time.perf_counter()
        out = work(cfg, i)
        out.seconds = time.perf_counter() - t0
        return out

    workers = thread_count(trials)
    if workers == 1:
        outputs = [timed(i) for i in range(trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(timed, range(trials)))

    with report.StagedOutput(cfg.out) as stage:
        manifest = {}
        for out in outputs:
            for name, write in out.writers.items():
                path = stage.path(name)
                write(path)
                manifest[name] = report.sha256_file(path)
        n_pass = sum(o.passed for o in outputs)
        hashed = {
            "config": cfg.echo(),
            "trials": [{"index": o.index, **o.record} for o in outputs],
            "aggregate": {"trials": len(outputs), "passed": n_pass, "failed": len(outputs) - n_pass},
            "manifest": manifest,
        }
        digest = report.sha256_text(report.dumps(hashed))
        timings = {
            "total_seconds": time.perf_counter() - t_start,
            "trial_seconds": [o.seconds for o in outputs],
            "threads": workers,
            "backend": BACKEND,
        }
        rr = RunReport(hashed, digest, timings, n_pass == len(outputs))
        stage.path("report.json").write_text(rr.to_json())
    rr.path = Path(cfg.out) / "report.json"
    return rr


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shiftlab", description="Real spectral shift functions via periodic Schaffer dilations.")
    ap.add_argument("--config", required=True, help="JSON run configuration")
    ap.add_argument("--seed", type=int, default=None, help="master seed (overrides config)")
    ap.add_argument("--out", default=None, help="output directory (overrides config)")
    ap.add_argument("--trials", type=int, default=None, help="number of trials (overrides config)")
    ap.add_argument("--quiet", action="store_true", help="print nothing on success")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    say = (lambda *a: None) if args.quiet else print
    try:
        cfg = load_config(args.config, {"master_seed": args.seed, "out": args.out, "trials": args.trials})
        rr = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InputError, SchemaError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ShiftlabError, np.linalg.LinAlgError) as exc:
        print(f"pipeline error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    agg = rr.hashed["aggregate"]
    say(f"{cfg.command}: {agg['passed']}/{agg['trials']} trials pass; report {rr.path} sha256 {rr.sha256[:16]}")
    return EXIT_OK if rr.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
