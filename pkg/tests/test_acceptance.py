"""Acceptance suite: criteria 1-12, each at its stated tolerance.

Every criterion is a function of the master seed that returns a
``Criterion`` holding the verdict, a one-line summary and a JSON-able payload.
The payload is what criterion 12 hashes: rerunning criteria 1-11 with the same
seed must reproduce each payload byte for byte.

Run ``pytest tests/test_acceptance.py -v`` (the PASS/FAIL lines are printed
in the terminal summary) or ``python3 tests/test_acceptance.py``. The rerun
for criterion 12 fans out over processes, capped by ``SHIFTLAB_THREADS``.
"""

from __future__ import annotations

import multiprocessing
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pytest

from shiftlab import circle, report
from shiftlab.cli import thread_count
from shiftlab.contraction import (
    PipelineConfig,
    check_hypotheses,
    corollary_xt,
    defect_difference_study,
    dual_route_deficit,
    real_ssf,
    sqrt_lipschitz_study,
)
from shiftlab.dilation import build_periodic, compression_report, power_traces
from shiftlab.dissipative import nonintegrability_probe, probe_pair, real_ssf_line
from shiftlab.opcore import (
    EnsembleConfig,
    LaurentPolynomial,
    an_functional,
    generator,
    random_operator,
    singular_values,
)

MASTER_SEED = 20240601

UNITARITY_TOL = 1e-10  # criterion 1
COMPRESSION_TOL = 1e-10  # criterion 2
TRACE_TOL = 1e-10  # criterion 3
UNITARY_PAIR_TOL = 1e-10  # criterion 4
CONTRACTION_TOL = 1e-8  # criterion 5
JUMP_TOL = 1e-9  # criterion 5
HARDY_TOL = 1e-6  # criteria 6, 7
HARDY_M = 256
LINE_TOL = 1e-6  # criterion 8
WEIGHTED_DRIFT = 0.05  # criterion 8
GROWTH_SLOPE = 0.01  # criterion 9
FLAT_SLOPE = 1e-6  # criterion 9
STUDY_RATIO = 3.0  # criterion 10
AN_RESIDUAL_TOL = 1e-8  # criterion 11


@dataclass
class Criterion:
    number: int
    title: str
    passed: bool
    summary: str
    payload: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {verdict}  {self.title}: {self.summary}"


def _pair(kind, dim, seed, stream, margin=0.1, rank=1, size=0.2):
    A, B = random_operator(EnsembleConfig(dim, kind, margin, seed, rank, size, stream))
    return A.entries, B.entries


# ---------------------------------------------------------------------------
# criteria 1-3: the periodic dilation
# ---------------------------------------------------------------------------

PERIODS = (8, 16, 64)


def _dilation_ensemble(seed):
    for i in range(200):
        kind = "contraction" if i % 2 else "strict-contraction"
        T = random_operator(EnsembleConfig(1 + i % 6, kind, 0.1, seed, stream=i)).entries
        yield i, T


def criterion_1(seed):
    worst, rows = 0.0, []
    for i, T in _dilation_ensemble(seed):
        for N in PERIODS:
            d = build_periodic(T, N).unitarity_defect
            worst = max(worst, d)
            rows.append(d)
    ok = worst <= UNITARITY_TOL
    return Criterion(1, "dilation unitarity", ok, f"{len(rows)} dilations, max ||U*U - I||_F = {worst:.2e}", {"defects": rows})


def criterion_2(seed):
    worst, rows = 0.0, []
    for i, T in _dilation_ensemble(seed):
        for N in PERIODS:
            dev = max(r.deviation for r in compression_report(build_periodic(T, N), N - 2))
            worst = max(worst, dev)
            rows.append(dev)
    ok = worst <= COMPRESSION_TOL
    return Criterion(2, "compression property", ok, f"{len(rows)} dilations, max deviation over k <= N-2 = {worst:.2e}", {"deviations": rows})


def criterion_3(seed):
    worst, diag, rows = 0.0, [], []
    for i, T in _dilation_ensemble(seed):
        for N in PERIODS:
            tr = power_traces(build_periodic(T, N), N + 1)
            Tk = np.eye(T.shape[0], dtype=complex)
            errs = []
            for k in range(N + 2):
                errs.append(abs(tr[k] - np.trace(Tk)))
                Tk = Tk @ T
            exact = max(errs[1 : -(-N // 2)])
            worst = max(worst, exact)
            rows.append(exact)
            diag.append(max(errs[N:]))
    ok = worst <= TRACE_TOL
    summary = f"max error for k < N/2 = {worst:.2e}; wraparound diagnostic (k >= N) median {np.median(diag):.2e}"
    return Criterion(3, "cyclic trace identity", ok, summary, {"errors": rows, "wraparound": diag})


# ---------------------------------------------------------------------------
# criterion 4: unitary pairs
# ---------------------------------------------------------------------------


def criterion_4(seed):
    worst, rows = 0.0, []
    rng = generator(seed, stream=4)
    for i in range(100):
        dim = 1 + i % 8
        rank = int(rng.integers(1, dim + 1))
        U0, U1 = _pair("unitary", dim, seed, 4000 + i, rank=rank, size=0.5)
        eta = circle.unitary_ssf(U0, U1)
        P0, P1 = np.eye(dim, dtype=complex), np.eye(dim, dtype=complex)
        err = 0.0
        for k in range(1, 17):
            P0, P1 = P0 @ U0, P1 @ U1
            for kk, lhs in ((k, np.trace(P1 - P0)), (-k, np.trace(P1.conj().T - P0.conj().T))):
                err = max(err, abs(lhs - circle.integrate_step(eta, LaurentPolynomial.monomial(kk))))
        worst = max(worst, err)
        rows.append(err)
    ok = worst <= UNITARY_PAIR_TOL
    return Criterion(4, "unitary-pair trace formula", ok, f"100 pairs, |k| <= 16, max residual {worst:.2e}", {"residuals": rows})


# ---------------------------------------------------------------------------
# criterion 5: end-to-end contraction pipeline
# ---------------------------------------------------------------------------

C5_MARGINS = (0.006, 0.05, 0.1, 0.3)


def criterion_5(seed):
    cfg = PipelineConfig(N=64, random_polys=0, tol=CONTRACTION_TOL)
    rows, worst_res, worst_jump, skipped = [], 0.0, 0.0, 0
    stream = 5000
    while len(rows) < 100:
        i = len(rows)
        T0, T1 = _pair("strict-contraction", 1 + i % 6, seed, stream, margin=C5_MARGINS[i % 4], rank=1 + i % 2, size=0.2)
        stream += 1
        hyp = check_hypotheses(T0, T1)
        if not (hyp.verdict and hyp.sigma_min_defect >= 0.1):
            skipped += 1
            continue
        res = real_ssf(T0, T1, cfg)
        jumps = res.ssf.jumps
        jump_err = float(np.max(np.abs(jumps - np.round(jumps)))) if jumps.size else 0.0
        real = np.isrealobj(res.ssf.values)
        worst_res = max(worst_res, res.max_residual)
        worst_jump = max(worst_jump, jump_err)
        rows.append({"max_residual": res.max_residual, "jump_error": jump_err, "real": real, "an": res.an_functional})
    ok = worst_res <= CONTRACTION_TOL and worst_jump <= JUMP_TOL and all(r["real"] for r in rows)
    summary = f"100 pairs ({skipped} skipped by hypothesis filter), max residual {worst_res:.2e}, max jump error {worst_jump:.2e}"
    return Criterion(5, "contraction SSF end to end", ok, summary, {"pairs": rows})


# ---------------------------------------------------------------------------
# criteria 6-7: H^1 dual-route consistency
# ---------------------------------------------------------------------------


def _dual(T0, T1):
    res, _ = dual_route_deficit(T0, T1, PipelineConfig(random_polys=0, tol=CONTRACTION_TOL), M=HARDY_M)
    return res, res.hardy_deficit_vs_determinant


def criterion_6(seed):
    rows, worst = [], 0.0
    for i in range(50):
        T0, T1 = _pair("strict-contraction", 1 + i % 3, seed, 6000 + i, margin=0.1, rank=1, size=0.2)
        assert singular_values(T0)[0] <= 0.9 + 1e-15 and singular_values(T1)[0] <= 0.9 + 1e-15
        _, deficit = _dual(T0, T1)
        worst = max(worst, deficit)
        rows.append(deficit)
    ok = worst <= HARDY_TOL
    return Criterion(6, "H1 dual-route consistency", ok, f"50 pairs, M = {HARDY_M}, max deficit {worst:.2e}", {"deficits": rows})


def criterion_7(seed):
    rows, worst_def, worst_res = [], 0.0, 0.0
    for i in range(25):
        dim = 1 + i % 3
        T = random_operator(EnsembleConfig(dim, "strict-contraction", 0.1, seed, stream=7000 + i)).entries
        rng = generator(seed, stream=7100 + i)
        rank = 1 + i % dim
        G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
        P = G @ G.conj().T
        P *= rng.uniform(0.05, 0.5) / np.linalg.eigvalsh(P)[-1]
        X = np.eye(dim) - P
        out = corollary_xt(T, X, PipelineConfig(N=64, random_polys=0, tol=CONTRACTION_TOL), M=HARDY_M)
        jumps = out.real.ssf.jumps
        jump_err = float(np.max(np.abs(jumps - np.round(jumps)))) if jumps.size else 0.0
        worst_def = max(worst_def, out.hardy_deficit)
        worst_res = max(worst_res, out.real.max_residual)
        rows.append({"deficit": out.hardy_deficit, "max_residual": out.real.max_residual, "jump_error": jump_err})
    ok = worst_def <= HARDY_TOL and worst_res <= CONTRACTION_TOL and all(r["jump_error"] <= JUMP_TOL for r in rows)
    summary = f"25 pairs {{T, XT}}, max residual {worst_res:.2e}, max deficit {worst_def:.2e}"
    return Criterion(7, "corollary {T, XT}", ok, summary, {"instances": rows})


# ---------------------------------------------------------------------------
# criteria 8-9: dissipative pairs
# ---------------------------------------------------------------------------


def criterion_8(seed):
    rows, worst_res, worst_drift, n_pass = [], 0.0, 0.0, 0
    for i in range(50):
        L0, L1 = _pair("dissipative", 1 + i % 6, seed, 8000 + i, margin=0.2, rank=1, size=0.2)
        res = real_ssf_line(L0, L1, PipelineConfig(N=64), tol=LINE_TOL)
        res2 = real_ssf_line(L0, L1, PipelineConfig(N=128), tol=LINE_TOL)
        w1, w2 = res.weighted.weighted_norm, res2.weighted.weighted_norm
        drift = abs(w2 - w1) / max(w1, 1e-300)
        finite = bool(np.isfinite(w1) and np.isfinite(w2))
        worst_res = max(worst_res, res.max_residual)
        worst_drift = max(worst_drift, drift)
        n_pass += res.passed
        rows.append({"max_residual": res.max_residual, "weighted_64": w1, "weighted_128": w2, "finite": finite})
    ok = worst_res <= LINE_TOL and worst_drift <= WEIGHTED_DRIFT and all(r["finite"] for r in rows)
    summary = (
        f"50 pairs at N = 64, {n_pass}/50 within {LINE_TOL:g}, max residual {worst_res:.2e}; "
        f"weighted norm drift under doubling max {worst_drift:.2%}"
    )
    return Criterion(8, "dissipative trace formula", ok, summary, {"pairs": rows})


def criterion_9(seed):
    rows = {"dissipative": [], "hermitian": []}
    cfg = PipelineConfig(N=64)
    for i in range(20):
        L0 = random_operator(EnsembleConfig(1 + i % 4, "dissipative", 0.2, seed, stream=9000 + i)).entries
        for kind in rows:
            L1 = probe_pair(L0, kind, 0.1, seed, stream=9100 + 2 * i + (kind == "hermitian"))
            res = real_ssf_line(L0, L1, cfg, tol=LINE_TOL)
            p = nonintegrability_probe(L0, L1, res)
            rows[kind].append({"slope": p.fit_slope, "tail": p.tail_constant_estimate, "im_trace_v": p.im_trace_v})
    growth = sum(r["slope"] > GROWTH_SLOPE and r["tail"] > 0 for r in rows["dissipative"])
    flat = sum(r["slope"] <= FLAT_SLOPE for r in rows["hermitian"])
    ok = growth == 20 and flat == 20
    ds = [r["slope"] for r in rows["dissipative"]]
    hs = [r["slope"] for r in rows["hermitian"]]
    summary = (
        f"rank-one i*P: {growth}/20 with b > {GROWTH_SLOPE:g} and tail > 0 (b in [{min(ds):.1e}, {max(ds):.1e}]); "
        f"Hermitian: {flat}/20 with b <= {FLAT_SLOPE:g} (b in [{min(hs):.1e}, {max(hs):.1e}])"
    )
    return Criterion(9, "nonintegrability dichotomy", ok, summary, rows)


# ---------------------------------------------------------------------------
# criteria 10-11: studies
# ---------------------------------------------------------------------------

STUDY_DIMS = tuple(range(2, 129, 2))


def criterion_10(seed):
    pairs = [_pair("strict-contraction", d, seed, 10000 + d, margin=0.2, rank=1, size=0.05) for d in STUDY_DIMS]
    drows = defect_difference_study(pairs, p=1.0, alpha=1.0)
    dvals = [r.defect_diff_p for r in drows]
    srows = []
    for d in STUDY_DIMS:
        X, Y = _pair("positive-contraction", d, seed, 10500 + d, margin=0.2, rank=1, size=0.05)
        srows.append(sqrt_lipschitz_study(X, Y, alpha=1.0, p=1.0))
    svals = [r.target for r in srows]
    dr = max(dvals) / min(dvals)
    sr = max(svals) / min(svals)
    na = [r.norm_a for r in drows]
    ok = dr <= STUDY_RATIO and sr <= STUDY_RATIO
    summary = (
        f"dims 2..128 step 2: defect-difference ratio {dr:.2f}, sqrt-difference ratio {sr:.2f} (limit {STUDY_RATIO:g}); "
        f"norm_a in [{min(na):.3f}, {max(na):.3f}]"
    )
    table = {
        "defects": [dict(r.__dict__) for r in drows],
        "sqrt": [{"dim": d, **r.__dict__} for d, r in zip(STUDY_DIMS, srows)],
    }
    return Criterion(10, "scaling studies", ok, summary, table)


AN_DIMS = (1, 2, 4, 8, 16, 32)


def criterion_11(seed):
    # V = (0.4/d) W with W Haar unitary: every singular value is 0.4/d, so the
    # functional is 0.4 log(1 + 2.5 d) while ‖V‖_{S1} stays 0.4
    cfg = PipelineConfig(N=34, random_polys=0, tol=AN_RESIDUAL_TOL)
    rows = []
    for d in AN_DIMS:
        T0 = random_operator(EnsembleConfig(d, "strict-contraction", 0.5, seed, stream=11000 + d)).entries
        W = random_operator(EnsembleConfig(d, "unitary", 0.5, seed, stream=11100 + d)).entries
        T1 = T0 + (0.4 / d) * W
        res = real_ssf(T0, T1, cfg)
        an = an_functional(singular_values(T1 - T0))
        rows.append({"dim": d, "an_functional": an, "max_residual": res.max_residual})
    an = [r["an_functional"] for r in rows]
    worst = max(r["max_residual"] for r in rows)
    ok = worst <= AN_RESIDUAL_TOL
    summary = (
        f"functional {an[0]:.3f} -> {an[-1]:.3f} over dims {AN_DIMS[0]}..{AN_DIMS[-1]} "
        f"(increasing: {all(np.diff(an) > 0)}); max residual {worst:.2e}"
    )
    return Criterion(11, "AN-functional diagnostic", ok, summary, {"family": rows})


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def _run_one(number: int, seed: int) -> Criterion:
    t0 = time.perf_counter()
    c = CRITERIA[number - 1](seed)
    c.seconds = time.perf_counter() - t0
    return c


def run_all(seed=MASTER_SEED, workers: int = 1) -> list[Criterion]:
    """Criteria 1-11, in separate processes when ``workers > 1`` (Linux fork only)."""
    numbers = range(1, len(CRITERIA) + 1)
    if workers > 1 and "fork" in multiprocessing.get_all_start_methods():
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(workers, mp_context=ctx) as pool:
            return list(pool.map(_run_one, numbers, [seed] * len(numbers)))
    return [_run_one(n, seed) for n in numbers]


def digest(c: Criterion) -> str:
    return report.sha256_text(report.dumps({"criterion": c.number, "passed": c.passed, "payload": c.payload}))


def criterion_12(first: list[Criterion], seed=MASTER_SEED) -> Criterion:
    second = run_all(seed, workers=thread_count(len(CRITERIA)))
    same = [digest(a) == digest(b) for a, b in zip(first, second)]
    ok = all(same)
    differing = [a.number for a, s in zip(first, same) if not s]
    summary = f"rerun of criteria 1-11 with seed {seed}: {sum(same)}/11 hashed payloads identical" + (
        f" (differ: {differing})" if differing else ""
    )
    return Criterion(12, "determinism", ok, summary, {"digests": [digest(c) for c in first]})


# ---------------------------------------------------------------------------
# pytest entry points
# ---------------------------------------------------------------------------

LINES: list[str] = []
_RESULTS: dict[int, Criterion] = {}


def _record(c: Criterion) -> Criterion:
    _RESULTS[c.number] = c
    line = f"{c.line}  [{c.seconds:.1f}s]"
    if line not in LINES:
        LINES.append(line)
    print(line)
    return c


@pytest.fixture(scope="module")
def first_pass():
    return []


@pytest.mark.slow
@pytest.mark.parametrize("number", range(1, 12))
def test_criterion(number, first_pass):
    c = _run_one(number, MASTER_SEED)
    first_pass.append(c)
    _record(c)
    assert c.passed, c.line


@pytest.mark.slow
def test_criterion_12_determinism(first_pass):
    if len(first_pass) != 11:
        first_pass[:] = run_all(MASTER_SEED, workers=thread_count(len(CRITERIA)))
    t0 = time.perf_counter()
    c = criterion_12(sorted(first_pass, key=lambda x: x.number))
    c.seconds = time.perf_counter() - t0
    _record(c)
    assert c.passed, c.line


if __name__ == "__main__":
    results = run_all(MASTER_SEED, workers=thread_count(len(CRITERIA)))
    for c in results:
        print(f"{c.line}  [{c.seconds:.1f}s]", flush=True)
    c12 = criterion_12(results)
    print(c12.line, flush=True)
    sys.exit(0 if all(c.passed for c in results) and c12.passed else 1)
