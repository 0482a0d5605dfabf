"""Closed-form two-channel filter families and reference coefficient data.

Each family constructor builds the symbol from its factored form with
Laurent arithmetic. The ``*_taps`` functions spell out the expanded
coefficients independently, so the two can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .laurent import LaurentMatrix, MatrixSequence, laurent_mul, sequence_from_symbol
from .qmf import FilterBank

MIRROR = np.diag([1.0, -1.0])

TAGS = ("first", "second", "diagonal", "fourth")


@dataclass(frozen=True)
class FamilyId:
    tag: str
    params: tuple

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown family {self.tag!r}")
        want = 2 if self.tag == "fourth" else 1
        if len(self.params) != want:
            raise ValueError(f"family {self.tag!r} takes {want} parameter(s)")
        for v in self.params:
            _check_param(v)

    def build(self):
        return FAMILIES[self.tag](*self.params)


def _check_param(a):
    if not -1.0 <= a <= 1.0:
        raise ValueError(f"family parameter must lie in [-1, 1], got {a}")


def _root(a):
    # sqrt(1 - a^2), clipped against round-off at |a| = 1
    return np.sqrt(max(0.0, 1.0 - a * a))


def _poly_matrix(entries, lowest=0):
    """2x2 Laurent matrix from per-entry coefficient lists starting at ``z**lowest``."""
    n = max(len(c) for row in entries for c in row)
    coeffs = np.zeros((n, 2, 2))
    for r, row in enumerate(entries):
        for c, poly in enumerate(row):
            coeffs[:len(poly), r, c] = poly
    return LaurentMatrix(lowest, coeffs)


def _scalar(poly, lowest=0):
    coeffs = np.asarray(poly, dtype=float)[:, None, None] * np.eye(2)
    return LaurentMatrix(lowest, coeffs)


ONE_PLUS_Z = _scalar([1.0, 1.0])
ONE_MINUS_Z = _scalar([1.0, -1.0])


def mirror(A):
    """``P A(-z) P`` with ``P = diag(1, -1)``."""
    signs = np.where(np.arange(A.offset, A.offset + len(A)) % 2 == 0, 1.0, -1.0)
    coeffs = signs[:, None, None] * (MIRROR @ A.coeffs @ MIRROR)
    return MatrixSequence(A.dim, A.offset, coeffs)


def _bank(A_symbol, B_symbol):
    return FilterBank(sequence_from_symbol(A_symbol), sequence_from_symbol(B_symbol))


def family_first(a):
    """One-parameter family (a = cos eta); B is the mirror of A."""
    _check_param(a)
    r = a * _root(a)
    inner = _poly_matrix([
        [[1 - a * a, a * a], [r, -r]],
        [[0.0, r, -r], [0.0, a * a, 1 - a * a]],
    ])
    A = sequence_from_symbol(laurent_mul(ONE_PLUS_Z, inner))
    return FilterBank(A, mirror(A))


def family_second(a):
    """One-parameter family (a = cos(sqrt(2) theta)), symbols scaled by 1/4."""
    _check_param(a)
    s = np.sqrt(max(0.0, 2 * (1 - a * a)))
    A_inner = _poly_matrix([
        [[0.0, 3 + 2 * a - a * a, (a - 1) ** 2],
         [0.0, (1 - a) * (1 + a - s), -(1 - a) * (1 + a - s)]],
        [[(1 - a) * (1 + a), -(1 - a) * s - (1 - a) * (1 + a), (1 - a) * s],
         [3 - a * a - 2 * a + (a + 1) * s, 3 * a * a + 2 * a - 1, (a + 1) * (2 - 2 * a - s)]],
    ])
    B_inner = _poly_matrix([
        [[0.0, a * a - 2 * a - 3, (a - 1) ** 2],
         [0.0, (1 - a) * (1 + a + s), (1 - a) * (1 + a + s)]],
        [[-(1 - a) * (1 + a), (1 - a) * s - (1 - a) * (1 + a), (1 - a) * s],
         [3 - a * a - 2 * a - (a + 1) * s, 1 - 3 * a * a - 2 * a, (a + 1) * (2 - 2 * a + s)]],
    ])
    A = laurent_mul(ONE_PLUS_Z, A_inner) * 0.25
    B = laurent_mul(ONE_MINUS_Z, B_inner) * 0.25
    return _bank(A, B)


def family_diagonal(a):
    """Decoupled family (a = sin zeta): a length-4 scalar filter beside scalar Haar."""
    _check_param(a)
    r = a * _root(a)
    A_inner = _poly_matrix([[[a * a + r, 1 - 2 * a * a, a * a - r], [0.0]],
                            [[0.0], [0.0, 1.0]]], lowest=-1)
    B_inner = _poly_matrix([[[a * a - r, 2 * a * a - 1, a * a + r], [0.0]],
                            [[0.0], [0.0, 1.0]]], lowest=-1)
    return _bank(laurent_mul(ONE_PLUS_Z, A_inner), laurent_mul(ONE_MINUS_Z, B_inner))


def family_fourth(a, b):
    """Two-parameter family (a = sin eta, b = sin omega); B is the mirror of A."""
    _check_param(a)
    _check_param(b)
    ra, rb = a * _root(a), b * _root(b)
    mid = 1 - a * a - b * b
    inner = _poly_matrix([
        [[a * a, mid, b * b], [ra, rb - ra, -rb]],
        [[rb, ra - rb, -ra], [b * b, mid, a * a]],
    ])
    A = sequence_from_symbol(laurent_mul(ONE_PLUS_Z, inner))
    return FilterBank(A, mirror(A))


FAMILIES = {
    "first": family_first,
    "second": family_second,
    "diagonal": family_diagonal,
    "fourth": family_fourth,
}


def family(tag, a, b=None):
    params = (a,) if b is None else (a, b)
    return FamilyId(tag, params).build()


# Coefficients of the 12-parameter Givens example, k = 0..5.
GIVENS_EXAMPLE_A = np.array([
    [[0.054311209333498010694, -0.16684440354507635408],
     [0.047827189604400026824, -0.17618585179038651232]],
    [[0.087708930185872110064, -0.30362455474026860115],
     [-0.088952962252079719437, 0.29041642693165752616]],
    [[0.65527236381392715834, 0.07789144188237754498],
     [-0.35145174509107688357, 1.0884769216695398767]],
    [[1.088476921748056695, 0.35145174524818843912],
     [-0.07789144192861210554, 0.65527236401729840172]],
    [[0.29041642689141252135, 0.088952962017450863579],
     [0.30362455490066007842, 0.087708930001853805185]],
    [[-0.17618585197276649584, -0.047827189524548346775],
     [0.16684440342858505769, 0.054311209170036901976]],
])

GIVENS_EXAMPLE_B = np.array([
    [[0.0543112093345566594, -0.166844403526512642],
     [0.0478271896021416066, -0.176185851776288344]],
    [[0.0877089301796203924, -0.303624554700031024],
     [-0.088952962258738763, 0.290416426927014915]],
    [[-0.276396211477648534, 1.1144837374540959],
     [-0.602889006833760122, -0.248606647031728134]],
    [[0.248606647088857046, -0.602889006560141438],
     [1.11448373738822482, 0.276396211518095014]],
    [[-0.290416426894247737, -0.0889529620232064194],
     [-0.303624554889251552, -0.087708930001465138]],
    [[0.176185851960222128, 0.0478271895207618912],
     [-0.166844403430672834, -0.0543112091753285287]],
])

# Angles of the two Givens rotations behind that example, rounded to 6 decimals.
PHI = np.array([-1.530817, -2.054355, -2.642328, 0.495166, 1.413293, 1.728299])
PSI = np.array([-2.345058, 2.382453, -1.422064, -1.696487, 1.165227, -1.439620])


def givens_example():
    """The 12-parameter example bank at full precision, indices 0..5."""
    return FilterBank(MatrixSequence(2, 0, GIVENS_EXAMPLE_A), MatrixSequence(2, 0, GIVENS_EXAMPLE_B))


def first_taps(a):
    r = a * _root(a)
    A = [[[1 - a * a, r], [0, 0]],
         [[1, 0], [r, a * a]],
         [[a * a, -r], [0, 1]],
         [[0, 0], [-r, 1 - a * a]]]
    B = [[[1 - a * a, -r], [0, 0]],
         [[-1, 0], [r, -a * a]],
         [[a * a, r], [0, 1]],
         [[0, 0], [-r, a * a - 1]]]
    return FilterBank(MatrixSequence(2, 0, A), MatrixSequence(2, 0, B))


def second_taps(a):
    """Expanded as 4A(k) and 4B(k), returned divided by 4."""
    s = np.sqrt(max(0.0, 2 * (1 - a * a)))
    A4 = [[[0, 0], [1 - a * a, -2 * a + (a + 1) * s + 3 - a * a]],
          [[3 + 2 * a - a * a, (a - 1) * (-1 - a + s)],
           [(a - 1) * s, 2 * a * a + 2 + (a + 1) * s]],
          [[4, 0], [-1 + a * a, a * a - (a + 1) * s + 1 + 2 * a]],
          [[(a - 1) ** 2, -(a - 1) * (-1 - a + s)],
           [-(a - 1) * s, -(a + 1) * (-2 + 2 * a + s)]]]
    B4 = [[[0, 0], [-1 + a * a, -2 * a - (a + 1) * s + 3 - a * a]],
          [[-3 - 2 * a + a * a, -(a - 1) * (1 + a + s)],
           [-(a - 1) * s, -2 * a * a - 2 + (a + 1) * s]],
          [[4, 0], [1 - a * a, a * a + (a + 1) * s + 1 + 2 * a]],
          [[-(a - 1) ** 2, (a - 1) * (1 + a + s)],
           [(a - 1) * s, -(a + 1) * (2 - 2 * a + s)]]]
    return FilterBank(MatrixSequence(2, 0, np.array(A4, float) / 4),
                      MatrixSequence(2, 0, np.array(B4, float) / 4))


def fourth_taps(a, b):
    ra, rb = a * _root(a), b * _root(b)
    A = [[[a * a, ra], [rb, b * b]],
         [[1 - b * b, rb], [ra, 1 - a * a]],
         [[1 - a * a, -ra], [-rb, 1 - b * b]],
         [[b * b, -rb], [-ra, a * a]]]
    B = [[[a * a, -ra], [-rb, b * b]],
         [[-1 + b * b, rb], [ra, -1 + a * a]],
         [[1 - a * a, ra], [rb, 1 - b * b]],
         [[-b * b, -rb], [-ra, -a * a]]]
    return FilterBank(MatrixSequence(2, 0, A), MatrixSequence(2, 0, B))


def fixtures():
    """Reference data: the Givens example bank and (family tag, tap evaluator) pairs."""
    return {
        "givens_example": givens_example(),
        "first": ("first", first_taps),
        "second": ("second", second_taps),
        "fourth": ("fourth", fourth_taps),
    }
