import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from matqmf.laurent import LaurentMatrix, MatrixSequence, VectorSignal
from matqmf.rotations import alternating, construct, random_rotation

# criterion number -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE = {}

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


@st.composite
def sequences(draw, dim=None, max_len=5):
    d = draw(st.integers(1, 3)) if dim is None else dim
    n = draw(st.integers(0, max_len))
    offset = draw(st.integers(-4, 4))
    coeffs = np.array(draw(st.lists(finite, min_size=n * d * d, max_size=n * d * d))).reshape(n, d, d)
    return MatrixSequence(d, offset, coeffs)


@st.composite
def laurent_matrices(draw, dim=2, max_len=4):
    n = draw(st.integers(1, max_len))
    lowest = draw(st.integers(-3, 3))
    coeffs = np.array(draw(st.lists(finite, min_size=n * dim * dim, max_size=n * dim * dim)))
    return LaurentMatrix(lowest, coeffs.reshape(n, dim, dim))


@st.composite
def signals(draw, dim=2, max_len=12):
    n = draw(st.integers(0, max_len))
    offset = draw(st.integers(-5, 5))
    samples = np.array(draw(st.lists(finite, min_size=n * dim, max_size=n * dim))).reshape(n, dim)
    return VectorSignal(dim, offset, samples)


def random_bank(rng, d, K, first_parity=0):
    return construct(alternating([random_rotation(rng, 2 * d) for _ in range(K)], first_parity), d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def daubechies4(levels):
    """Scalar D4 scaling function on [0, 3] at spacing 2**-levels, taps summing to 2."""
    r3 = np.sqrt(3)
    h = np.array([1 + r3, 3 + r3, 3 - r3, 1 - r3]) / 4
    n = 3 * 2**levels
    phi = np.zeros(n + 1)
    step = 2**levels
    phi[step], phi[2 * step] = (1 + r3) / 2, (1 - r3) / 2
    for level in range(1, levels + 1):
        stride = 2 ** (levels - level)
        for m in range(stride, n, 2 * stride):
            # phi(x) = sum_k h_k phi(2x - k) at the new odd points of this level
            total = 0.0
            for k in range(4):
                src = 2 * m - k * step
                if 0 <= src <= n:
                    total += h[k] * phi[src]
            phi[m] = total
    return phi


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
