import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import laurent_matrices, sequences, signals
from matqmf.families import first_taps
from matqmf.laurent import (
    LaurentMatrix,
    MatrixSequence,
    VectorSignal,
    convolve_filter,
    delta,
    downsample,
    from_subsymbols,
    laurent_adjoint,
    laurent_mul,
    subsymbols,
    symbol,
    translate,
    upsample,
)
from matqmf.qmf import haar, polyphase


def test_delta_is_identity_at_index():
    s = delta(0, 2)
    assert s.offset == 0 and len(s) == 1
    assert np.array_equal(s.coeffs[0], np.eye(2))
    assert delta(3, 1).support == (3, 3)


def test_translate_moves_support():
    assert translate(delta(0, 2), 2).max_abs_diff(delta(2, 2)) == 0
    assert translate(delta(1, 2), -1).max_abs_diff(delta(0, 2)) == 0
    assert translate(haar(2).A, 2).support == (2, 3)


def test_zero_sequence_is_canonical():
    z = MatrixSequence(2, 7, np.zeros((3, 2, 2)))
    assert z.is_zero and z.offset == 0 and z.support is None


def test_trimming_drops_tiny_end_coefficients():
    coeffs = np.array([np.full((2, 2), 1e-15), np.eye(2), np.full((2, 2), 5e-15)])
    s = MatrixSequence(2, -1, coeffs)
    assert s.support == (0, 0)


def test_sampling_operators():
    assert upsample(delta(1, 2)).max_abs_diff(delta(2, 2)) == 0
    assert downsample(haar(2).A).max_abs_diff(delta(0, 2)) == 0


@given(sequences())
def test_downsample_undoes_upsample(s):
    assert downsample(upsample(s)).max_abs_diff(s) == 0


@given(sequences(), st.integers(-5, 5))
def test_translate_group_law(s, n):
    assert translate(translate(s, n), -n).max_abs_diff(s) == 0


def test_convolution_examples():
    s = VectorSignal(2, 3, np.arange(10.0).reshape(5, 2))
    assert convolve_filter(delta(0, 2), s).max_abs_diff(s) == 0
    assert convolve_filter(delta(1, 2), s).max_abs_diff(translate(s, 1)) == 0
    pulse = VectorSignal(2, 0, [[1.0, 0.0]])
    out = convolve_filter(haar(2).A, pulse)
    assert out.offset == 0
    assert np.array_equal(out.samples, [[1, 0], [1, 0]])


def test_convolution_uses_transposed_taps():
    A = MatrixSequence(2, 0, [[[0.0, 1.0], [0.0, 0.0]]])
    out = convolve_filter(A, VectorSignal(2, 0, [[1.0, 0.0]]))
    # A(0)^T e1 = e2
    assert np.array_equal(out.samples, [[0, 1]])


def test_convolution_dimension_mismatch():
    with pytest.raises(ValueError):
        convolve_filter(delta(0, 3), VectorSignal(2, 0, [[1.0, 0.0]]))


@given(sequences(dim=2, max_len=4), signals())
def test_convolution_matches_direct_sum(A, s):
    out = convolve_filter(A, s)
    for n in range(out.offset - 1, out.offset + len(out) + 1):
        direct = sum((A[n - k].T @ s[k] for k in range(s.offset, s.offset + len(s))), np.zeros(2))
        assert np.allclose(out[n], direct, atol=1e-12)


def test_symbol_of_delta():
    P = symbol(delta(-2, 3))
    assert P.lowest_power == -2 and np.array_equal(P.coeffs[0], np.eye(3))


def test_haar_subsymbols_are_identity():
    even, odd = subsymbols(haar(2).A)
    for part in (even, odd):
        assert part.lowest_power == 0 and np.array_equal(part.coeffs, [np.eye(2)])


@pytest.mark.parametrize("a", [0.0, 0.3, -0.8, np.sqrt(3) / 2])
def test_first_family_even_subsymbol(a):
    r = a * np.sqrt(1 - a * a)
    even, _ = subsymbols(first_taps(a).A)
    expected = LaurentMatrix(0, [[[1 - a * a, r], [0, 0]], [[a * a, -r], [0, 1]]])
    assert even.max_abs_diff(expected) < 1e-15


@given(sequences())
def test_subsymbol_round_trip(s):
    even, odd = subsymbols(s)
    assert from_subsymbols(even, odd).max_abs_diff(symbol(s)) < 1e-14


@given(laurent_matrices(), laurent_matrices(), laurent_matrices())
def test_multiplication_is_associative(P, Q, R):
    left = laurent_mul(laurent_mul(P, Q), R)
    right = laurent_mul(P, laurent_mul(Q, R))
    scale = max(1.0, left.max_abs())
    assert left.max_abs_diff(right) <= 1e-13 * scale


@given(laurent_matrices(), laurent_matrices(), laurent_matrices())
def test_multiplication_distributes(P, Q, R):
    lhs = laurent_mul(P, Q + R)
    rhs = laurent_mul(P, Q) + laurent_mul(P, R)
    assert lhs.max_abs_diff(rhs) <= 1e-13 * max(1.0, lhs.max_abs())


@given(laurent_matrices())
def test_identity_and_adjoint_involution(P):
    assert laurent_mul(P, LaurentMatrix.constant(np.eye(2))).max_abs_diff(P) == 0
    assert laurent_adjoint(laurent_adjoint(P)).max_abs_diff(P) == 0


@given(laurent_matrices())
def test_adjoint_matches_conjugate_transpose_on_circle(P):
    z = np.exp(0.7j)
    assert np.allclose(laurent_adjoint(P)(z), P(z).conj().T)


def test_haar_polyphase_is_paraunitary():
    H = polyphase(haar(2))
    product = laurent_mul(laurent_adjoint(H), H)
    assert product.max_abs_diff(LaurentMatrix.constant(2 * np.eye(4))) == 0


def test_multiplication_dimension_mismatch():
    with pytest.raises(ValueError):
        laurent_mul(LaurentMatrix.constant(np.eye(2)), LaurentMatrix.constant(np.eye(3)))


@given(sequences())
def test_json_round_trip(s):
    assert MatrixSequence.from_dict(s.to_dict()).max_abs_diff(s) == 0
