import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_bank, signals
from matqmf.families import family_first, givens_example
from matqmf.laurent import LaurentMatrix, MatrixSequence, VectorSignal
from matqmf.qmf import (
    ROUNDED_TOL,
    FilterBank,
    analyze,
    bank_from_polyphase,
    check_full_rank,
    check_qmf,
    check_sum_rules,
    haar,
    paraunitary_residual,
    polyphase,
    synthesize,
    trivial,
)


def test_haar_is_exact_qmf():
    report = check_qmf(haar(2), 1e-10)
    assert report.orthonormality_residual == 0
    assert report.ok()


def test_scaled_bank_fails():
    h = haar(2)
    bad = FilterBank(MatrixSequence(2, 0, 1.01 * h.A.coeffs), h.B)
    report = check_qmf(bad, 1e-10)
    assert report.orthonormality_residual > 0.02
    assert not report.passes["orthonormality"]


def test_givens_example_is_qmf_at_rounded_precision():
    assert check_qmf(givens_example(), ROUNDED_TOL).passes["orthonormality"]


def test_full_rank_examples():
    assert check_full_rank(haar(2)) == (0.0, True)
    for a in np.linspace(-1, 1, 9):
        residual, ok = check_full_rank(family_first(a))
        assert ok and residual <= 1e-12
    residual, ok = check_full_rank(trivial(2))
    assert not ok


def test_full_rank_includes_wavelet_sum():
    h = haar(2)
    shifted_B = FilterBank(h.A, MatrixSequence(2, 0, [np.eye(2), np.eye(2)]))
    assert check_full_rank(shifted_B)[1] is False


def test_sum_rule_examples():
    assert check_sum_rules(haar(2), 2) == [1.0]
    assert check_sum_rules(haar(2), 1) == []
    zero = FilterBank(MatrixSequence.zero(2), MatrixSequence.zero(2))
    assert check_sum_rules(zero, 3) == [0.0, 0.0]
    assert max(check_sum_rules(givens_example(), 2)) <= ROUNDED_TOL
    with pytest.raises(ValueError):
        check_sum_rules(haar(2), 0)


def test_haar_polyphase_is_constant_hadamard_block():
    L = polyphase(haar(2))
    I = np.eye(2)
    assert L.max_abs_diff(LaurentMatrix.constant(np.block([[I, I], [I, -I]]))) == 0


def test_first_family_polyphase_at_zero():
    L = polyphase(family_first(0.0))
    e1, e2 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    assert L.lowest_power == 0
    assert np.array_equal(L.coeffs[0], np.block([[e1, e1], [e1, -e1]]))
    assert np.array_equal(L.coeffs[1], np.block([[e2, e2], [e2, -e2]]))


@pytest.mark.parametrize("K", [0, 1, 2, 3, 4])
def test_polyphase_round_trip(rng, K):
    bank = random_bank(rng, 2, K)
    assert bank_from_polyphase(polyphase(bank), 2).max_abs_diff(bank) == 0


def test_polyphase_inverse_rejects_odd_size():
    with pytest.raises(ValueError):
        bank_from_polyphase(LaurentMatrix.constant(np.eye(3)), 2)


def test_full_rank_equals_polyphase_at_one():
    I = np.eye(2)
    target = np.block([[I, I], [I, -I]])
    for a in (0.2, -0.7):
        L = polyphase(family_first(a))
        # even translation keeps L(1); full rank means L(1) = [[I, I], [I, -I]]
        assert np.allclose(L(1.0).real, target, atol=1e-12)


@pytest.mark.parametrize("seed", range(10))
def test_gram_and_paraunitary_forms_agree(seed):
    rng = np.random.default_rng(seed)
    bank = random_bank(rng, 2 + seed % 2, 1 + seed % 4, seed % 2)
    # perturb so both residuals are visibly nonzero
    noisy = FilterBank(bank.A, MatrixSequence(bank.dim, bank.B.offset, bank.B.coeffs * (1 + 1e-6 * seed)))
    gram = check_qmf(noisy).orthonormality_residual
    para = paraunitary_residual(noisy)
    assert para <= 4 * gram + 1e-15 and gram <= 4 * para + 1e-15


def test_haar_analysis_by_hand():
    e1 = [1.0, 0.0]
    s = VectorSignal(2, 1, [e1, e1])
    s0, s1 = analyze(haar(2), s)
    # taps pair samples (2n - 1, 2n): indices 1 and 2 meet at n = 1
    assert np.array_equal(s0[1], [2, 0]) and np.array_equal(s1[1], [0, 0])
    rec = synthesize(haar(2), s0, s1)
    assert rec.max_abs_diff(s) == 0


def test_zero_signal_gives_zero_outputs():
    bank = givens_example()
    z = VectorSignal(2, 0, np.zeros((6, 2)))
    s0, s1 = analyze(bank, z)
    assert not s0.samples.any() and not s1.samples.any()
    assert not synthesize(bank, s0, s1).samples.any()


def test_analysis_dimension_mismatch():
    with pytest.raises(ValueError):
        analyze(haar(3), VectorSignal(2, 0, [[1.0, 0.0]]))


@given(signals(), st.integers(0, 4), st.integers(0, 2**31))
def test_perfect_reconstruction(s, K, seed):
    bank = random_bank(np.random.default_rng(seed), 2, K)
    assert check_qmf(bank, 1e-10).passes["orthonormality"]
    rec = synthesize(bank, *analyze(bank, s))
    scale = max(1.0, float(np.abs(s.samples).max())) if len(s) else 1.0
    assert rec.max_abs_diff(s) <= 1e-10 * scale


def test_givens_example_reconstruction_at_rounded_precision():
    rng = np.random.default_rng(7)
    bank = givens_example()
    worst = 0.0
    for _ in range(100):
        s = VectorSignal(2, 0, rng.standard_normal((64, 2)))
        worst = max(worst, synthesize(bank, *analyze(bank, s)).max_abs_diff(s))
    assert worst <= 1e-5


@pytest.mark.parametrize("seed", range(5))
def test_full_rank_implies_vanishing_wavelet_sum(seed):
    from matqmf.families import family_fourth
    rng = np.random.default_rng(seed)
    bank = family_fourth(*rng.uniform(-1, 1, 2))
    assert check_full_rank(bank)[1]
    assert np.abs(bank.B.coeffs.sum(axis=0)).max() <= 1e-12


def test_bank_json_round_trip():
    bank = givens_example()
    assert FilterBank.from_dict(bank.to_dict()).max_abs_diff(bank) == 0
    with pytest.raises(ValueError):
        FilterBank.from_dict({**bank.to_dict(), "dim": 3})
