import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import contraction_pair
from shiftlab.dilation import (
    build_periodic,
    compress_power,
    compression_report,
    dilation_pair,
    julia_block,
    power_traces,
)
from shiftlab.errors import NotAContraction, PeriodTooSmall
from shiftlab.opcore import schatten_norm

UNITARY_TOL = 1e-10
EXACT = 1e-12


def test_julia_zero():
    np.testing.assert_allclose(julia_block(np.zeros((2, 2))).block, np.eye(4), atol=EXACT)


def test_julia_unitary(rng):
    Q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    B = julia_block(Q).block
    np.testing.assert_allclose(B[:3, :3], 0, atol=1e-7)
    np.testing.assert_allclose(B[3:, 3:], 0, atol=1e-7)
    np.testing.assert_allclose(B[:3, 3:], -Q.conj().T, atol=EXACT)
    np.testing.assert_allclose(B[3:, :3], Q, atol=EXACT)


def test_julia_half_is_rotation():
    r = np.sqrt(3) / 2
    np.testing.assert_allclose(julia_block(np.array([[0.5]])).block, [[r, -0.5], [0.5, r]], atol=EXACT)


def test_zero_contraction_gives_shift():
    U = build_periodic(np.zeros((1, 1)), 3).matrix
    # slot 0 -> slot 2, slot 1 -> slot 0, slot 2 -> slot 1
    want = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=complex)
    np.testing.assert_array_equal(U, want)


def test_half_unitary():
    D = build_periodic(np.array([[0.5]]), 8)
    assert D.matrix.shape == (8, 8)
    assert D.unitarity_defect <= EXACT


def test_support_pattern():
    T, _ = contraction_pair(3, seed=11)
    N, n = 16, 3
    diff = build_periodic(T, N).matrix - build_periodic(np.zeros((3, 3)), N).matrix
    assert build_periodic(T, N).matrix.shape == (48, 48)
    rows = [j for j in range(N) if np.any(diff[j * n : (j + 1) * n] != 0)]
    assert set(rows) <= {0, N - 1}


def test_period_too_small():
    with pytest.raises(PeriodTooSmall):
        build_periodic(np.zeros((1, 1)), 2)


def test_rejects_non_contraction():
    with pytest.raises(NotAContraction):
        build_periodic(np.array([[1.2]]), 8)


def test_structured_apply_matches_dense(rng):
    T, _ = contraction_pair(2, seed=4)
    D = build_periodic(T, 9)
    X = rng.standard_normal((18, 5)) + 1j * rng.standard_normal((18, 5))
    np.testing.assert_allclose(D.apply(X), D.matrix @ X, atol=EXACT)


def test_compress_low_powers():
    T, _ = contraction_pair(3, seed=2)
    D = build_periodic(T, 12)
    np.testing.assert_allclose(compress_power(D, 0), np.eye(3), atol=EXACT)
    np.testing.assert_array_equal(compress_power(D, 1), T)


def test_compress_past_range_deviates():
    T = np.array([[0.5]])
    D = build_periodic(T, 8)
    rows = compression_report(D, 9)
    assert all(r.deviation <= UNITARY_TOL for r in rows if r.within_exact_range)
    # k = N - 1 already picks up the closed loop through the Julia block
    assert rows[9].deviation > 1e-3
    assert not rows[9].within_exact_range


def test_trace_identity():
    T, _ = contraction_pair(4, seed=8)
    N = 20
    D = build_periodic(T, N)
    tr = power_traces(D, N + 2)
    Tk = [np.trace(np.linalg.matrix_power(T, k)) for k in range(N + 3)]
    for k in range(1, -(-N // 2)):
        assert abs(tr[k] - Tk[k]) <= UNITARY_TOL, k
    # wraparound diagnostic: trace(U^N) picks up N-step closed paths
    assert abs(tr[N] - Tk[N]) > 1e-6


def test_pair_equal():
    T, _ = contraction_pair(2, seed=1)
    p = dilation_pair(T, T, 8)
    assert p.measured_rank == 0
    assert p.difference_s1 == 0.0


def test_pair_scalar_rank():
    p = dilation_pair(np.array([[0.3]]), np.array([[0.5]]), 8)
    assert p.measured_rank <= p.rank_bound == 2
    assert p.off_support_norm == 0.0


def test_pair_s1_dominates():
    T0, T1 = contraction_pair(3, seed=6)
    p = dilation_pair(T0, T1, 32)
    assert p.difference_s1 >= schatten_norm(T1 - T0, 1) - 1e-12
    assert p.measured_rank <= 6


@settings(max_examples=25, deadline=None)
@given(dim=st.integers(1, 5), N=st.integers(3, 24), seed=st.integers(0, 10**6))
def test_unitary_and_compression_property(dim, N, seed):
    T, _ = contraction_pair(dim, seed=seed)
    D = build_periodic(T, N)
    assert D.unitarity_defect <= UNITARY_TOL
    for row in compression_report(D, N - 2):
        assert row.deviation <= UNITARY_TOL
