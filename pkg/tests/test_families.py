import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from matqmf.families import (
    TAGS,
    FamilyId,
    family,
    family_diagonal,
    family_first,
    family_fourth,
    family_second,
    first_taps,
    fixtures,
    fourth_taps,
    givens_example,
    mirror,
    second_taps,
)
from matqmf.qmf import EXACT_TOL, check_full_rank, check_qmf, haar

GRID = np.linspace(-1, 1, 21)
GRID2 = [(a, b) for a in np.linspace(-1, 1, 5) for b in np.linspace(-1, 1, 5)]
unit = st.floats(-1, 1, allow_nan=False)


def evaluate(seq, z):
    """Symbol of ``seq`` at the points ``z`` (shape (n, d, d))."""
    k = np.arange(seq.offset, seq.offset + len(seq))
    return np.einsum("nk,kab->nab", z[:, None] ** k[None, :], seq.coeffs)


# Pointwise closed forms, evaluated with complex arithmetic rather than Laurent products.
def first_symbol(a, z):
    r = a * np.sqrt(1 - a * a)
    M = np.array([[(1 - a * a) + a * a * z, r - r * z], [r * z - r * z * z, a * a * z + (1 - a * a) * z * z]])
    return (1 + z) * M


def fourth_symbol(a, b, z):
    ra, rb = a * np.sqrt(1 - a * a), b * np.sqrt(1 - b * b)
    mid = 1 - a * a - b * b
    M = np.array([[a * a + mid * z + b * b * z * z, ra + (rb - ra) * z - rb * z * z],
                  [rb + (ra - rb) * z - ra * z * z, b * b + mid * z + a * a * z * z]])
    return (1 + z) * M


def diagonal_symbol(a, z):
    r = a * np.sqrt(1 - a * a)
    top = (1 + z) * (a * a + r + (1 - 2 * a * a) * z + (a * a - r) * z * z) / z
    return np.array([[top, 0 * z], [0 * z, 1 + z]])


ROOTS = np.exp(2j * np.pi * np.arange(16) / 16)


def _assert_symbol(seq, values):
    assert np.abs(evaluate(seq, ROOTS) - np.moveaxis(values, -1, 0)).max() < 1e-12


@pytest.mark.parametrize("a", GRID)
def test_first_matches_taps(a):
    bank = family_first(a)
    assert bank.max_abs_diff(first_taps(a)) <= 1e-12
    assert check_qmf(bank, 1e-12).ok(sum_rules=False)


@pytest.mark.parametrize("a", GRID)
def test_second_matches_taps(a):
    bank = family_second(a)
    assert bank.max_abs_diff(second_taps(a)) <= 1e-12
    assert check_qmf(bank, 1e-12).ok(sum_rules=False)


@pytest.mark.parametrize("a, b", GRID2)
def test_fourth_matches_taps(a, b):
    bank = family_fourth(a, b)
    assert bank.max_abs_diff(fourth_taps(a, b)) <= 1e-12
    assert check_qmf(bank, 1e-12).ok(sum_rules=False)


@pytest.mark.parametrize("a", GRID)
def test_diagonal_is_qmf(a):
    assert check_qmf(family_diagonal(a), 1e-12).ok(sum_rules=False)


@given(unit)
def test_first_symbol_oracle(a):
    _assert_symbol(family_first(a).A, first_symbol(a, ROOTS))


@given(unit, unit)
def test_fourth_symbol_oracle(a, b):
    _assert_symbol(family_fourth(a, b).A, fourth_symbol(a, b, ROOTS))


@given(unit)
def test_diagonal_symbol_oracle(a):
    _assert_symbol(family_diagonal(a).A, diagonal_symbol(a, ROOTS))


@given(unit)
def test_second_has_zero_at_minus_one(a):
    # every family filter A carries the scalar factor (1 + z)
    A = family_second(a).A
    assert np.abs(evaluate(A, np.array([-1.0 + 0j]))).max() < 1e-12


@given(unit)
def test_mirror_relation(a):
    bank = family_first(a)
    assert bank.B.max_abs_diff(mirror(bank.A)) == 0
    assert mirror(mirror(bank.A)).max_abs_diff(bank.A) == 0


@given(unit, unit)
def test_fourth_swap_symmetry(a, b):
    # exchanging a and b swaps the two channels
    P = np.array([[0.0, 1.0], [1.0, 0.0]])
    A, swapped = family_fourth(a, b).A, family_fourth(b, a).A
    assert np.abs(P @ A.coeffs @ P - swapped.coeffs).max() < 1e-15


def test_first_family_endpoints():
    # a = 1 and a = 0 decouple into shifted scalar Haar pairs
    one = family_first(1.0)
    assert np.array_equal(one.A[0], np.diag([0.0, 0.0])) and np.array_equal(one.A[1], np.eye(2))
    zero = family_first(0.0)
    assert np.array_equal(zero.A[0], np.diag([1.0, 0.0])) and np.array_equal(zero.A[3], np.diag([0.0, 1.0]))


def test_first_family_at_cos_pi_over_6():
    a = np.cos(np.pi / 6)
    A = family_first(a).A
    assert A[0][0, 1] == pytest.approx(np.sqrt(3) / 4)
    assert A[2][0, 0] == pytest.approx(0.75)


def test_diagonal_family_at_zero_is_haar():
    bank, ref = family_diagonal(0.0), haar(2)
    assert bank.A.max_abs_diff(ref.A) == 0
    # the first wavelet channel has the opposite sign
    assert np.abs(bank.B.coeffs - ref.B.coeffs @ np.diag([-1.0, 1.0])).max() == 0


@given(unit)
def test_diagonal_second_channel_is_haar(a):
    bank = family_diagonal(a)
    assert np.array_equal(bank.A.coeffs[:, 1, 1][bank.A.offset * -1:][:2], [1.0, 1.0])
    assert np.abs(bank.A.coeffs[:, 0, 1]).max() == 0 and np.abs(bank.A.coeffs[:, 1, 0]).max() == 0


def test_fourth_family_half_has_double_root():
    A = family_fourth(0.5, 0.5).A
    # the inner factor vanishes at z = -1 as well, so A(z) has (1 + z)^2
    h = 1e-6
    near = evaluate(A, np.array([-1 + h + 0j]))
    assert np.abs(near).max() < 10 * h**2


def test_full_rank_of_families():
    for bank in (family_first(0.3), family_second(-0.2), family_diagonal(0.9), family_fourth(0.1, -0.8)):
        assert check_full_rank(bank, EXACT_TOL)


def test_parameter_validation():
    with pytest.raises(ValueError):
        family_first(1.5)
    with pytest.raises(ValueError):
        family_fourth(0.0, -1.01)
    with pytest.raises(ValueError):
        FamilyId("fifth", (0.1,))
    with pytest.raises(ValueError):
        FamilyId("fourth", (0.1,))


def test_family_dispatch():
    assert set(TAGS) == {"first", "second", "diagonal", "fourth"}
    assert family("fourth", 0.2, 0.3).max_abs_diff(family_fourth(0.2, 0.3)) == 0
    assert family("first", 0.2).max_abs_diff(family_first(0.2)) == 0


def test_fixtures():
    data = fixtures()
    assert data["givens_example"].max_abs_diff(givens_example()) == 0
    assert data["givens_example"].length == 6
    tag, taps = data["first"]
    assert family(tag, 0.4).max_abs_diff(taps(0.4)) < 1e-15
    tag, taps = data["fourth"]
    assert family(tag, 0.4, -0.3).max_abs_diff(taps(0.4, -0.3)) < 1e-15
