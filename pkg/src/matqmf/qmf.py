"""Matrix QMF systems: verification, polyphase form, analysis and synthesis."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .laurent import (
    LaurentMatrix,
    MatrixSequence,
    VectorSignal,
    convolve_filter,
    downsample,
    laurent_adjoint,
    laurent_mul,
    subsymbols,
    upsample,
)

EXACT_TOL = 1e-10
# for banks built from parameter vectors rounded to 6 decimals
ROUNDED_TOL = 5e-6


@dataclass(frozen=True, eq=False)
class FilterBank:
    """Scaling filter ``A`` and wavelet filter ``B`` of a d-channel system."""

    A: MatrixSequence
    B: MatrixSequence

    def __post_init__(self):
        if self.A.dim != self.B.dim:
            raise ValueError("A and B must have the same dimension")

    @property
    def dim(self):
        return self.A.dim

    @property
    def support(self):
        spans = [s.support for s in (self.A, self.B) if not s.is_zero]
        if not spans:
            return None
        return min(a for a, _ in spans), max(b for _, b in spans)

    @property
    def length(self):
        span = self.support
        return 0 if span is None else span[1] - span[0] + 1

    def translate(self, n):
        return FilterBank(
            MatrixSequence(self.dim, self.A.offset + n, self.A.coeffs),
            MatrixSequence(self.dim, self.B.offset + n, self.B.coeffs),
        )

    def max_abs_diff(self, other):
        return max(self.A.max_abs_diff(other.A), self.B.max_abs_diff(other.B))

    def to_dict(self):
        return {"dim": self.dim, "A": self.A.to_dict(), "B": self.B.to_dict()}

    @classmethod
    def from_dict(cls, data):
        bank = cls(MatrixSequence.from_dict(data["A"]), MatrixSequence.from_dict(data["B"]))
        if "dim" in data and int(data["dim"]) != bank.dim:
            raise ValueError("declared dim does not match the filters")
        return bank


def haar(d):
    """``A(0) = A(1) = B(0) = -B(1) = I``."""
    eye = np.eye(d)
    return FilterBank(MatrixSequence(d, 0, [eye, eye]), MatrixSequence(d, 0, [eye, -eye]))


def trivial(d):
    """The algebraic seed ``A = delta_0``, ``B = delta_1``, scaled by sqrt(2) to the ``2I`` normalization."""
    eye = np.eye(d) * np.sqrt(2.0)
    return FilterBank(MatrixSequence(d, 0, [eye]), MatrixSequence(d, 1, [eye]))


@dataclass
class QmfReport:
    orthonormality_residual: float
    full_rank_residual: float
    sum_rule_residuals: list = field(default_factory=list)
    tol: float = EXACT_TOL

    @property
    def passes(self):
        return {
            "orthonormality": self.orthonormality_residual <= self.tol,
            "full_rank": self.full_rank_residual <= self.tol,
            "sum_rules": all(r <= self.tol for r in self.sum_rule_residuals),
        }

    def ok(self, full_rank=True, sum_rules=True):
        p = self.passes
        return p["orthonormality"] and (p["full_rank"] or not full_rank) and (p["sum_rules"] or not sum_rules)

    def to_dict(self):
        return {
            "orthonormality_residual": self.orthonormality_residual,
            "full_rank_residual": self.full_rank_residual,
            "sum_rule_residuals": list(self.sum_rule_residuals),
            "tol": self.tol,
            "passes": self.passes,
        }


def _common_window(bank):
    span = bank.support
    if span is None:
        return 0, np.zeros((0, bank.dim, bank.dim)), np.zeros((0, bank.dim, bank.dim))
    lo, hi = span
    return lo, bank.A.window(lo, hi), bank.B.window(lo, hi)


def gram_blocks(X, Y):
    """``{k: sum_j X[j]^T Y[j - 2k]}`` for every k where the shifted supports overlap.

    ``X`` and ``Y`` are dense stacks over the same index window.
    """
    n = X.shape[0]
    out = {}
    kmax = (n - 1) // 2
    for k in range(-kmax, kmax + 1):
        s = 2 * k
        if s >= 0:
            g = np.einsum("jab,jac->bc", X[s:], Y[:n - s])
        else:
            g = np.einsum("jab,jac->bc", X[:n + s], Y[-s:])
        out[k] = g
    return out


def orthonormality_residual(bank):
    """Worst deviation of the three Gram conditions over all even shifts."""
    _, A, B = _common_window(bank)
    if A.shape[0] == 0:
        return 2.0
    eye = np.eye(bank.dim)
    worst = 0.0
    for X, Y, scale in ((A, A, 2.0), (B, B, 2.0), (A, B, 0.0)):
        for k, g in gram_blocks(X, Y).items():
            target = scale * eye if k == 0 else 0.0
            worst = max(worst, float(np.abs(g - target).max()))
    return worst


def check_full_rank(bank, tol=EXACT_TOL):
    """Even and odd coefficient sums of A equal I; B sums to zero."""
    eye = np.eye(bank.dim)
    lo, A, B = _common_window(bank)
    if A.shape[0] == 0:
        return 1.0, False
    even = A[(lo % 2)::2].sum(axis=0)
    odd = A[((lo + 1) % 2)::2].sum(axis=0)
    residual = max(np.abs(even - eye).max(), np.abs(odd - eye).max(), np.abs(B.sum(axis=0)).max())
    return float(residual), bool(residual <= tol)


def sum_rule_moments(A, p):
    """``[sum_k (-1)^k k^n A(k) for n = 1..p-1]`` as matrices."""
    if A.is_zero or p <= 1:
        return [np.zeros((A.dim, A.dim)) for _ in range(max(p - 1, 0))]
    k = np.arange(A.offset, A.offset + len(A), dtype=float)
    sign = np.where(np.arange(A.offset, A.offset + len(A)) % 2 == 0, 1.0, -1.0)
    return [np.einsum("k,kab->ab", sign * k**n, A.coeffs) for n in range(1, p)]


def check_sum_rules(bank, p, tol=EXACT_TOL):
    """Max-abs residual per moment order n = 1..p-1 (order 0 is full rank)."""
    if p < 1:
        raise ValueError("p must be at least 1")
    return [float(np.abs(m).max()) for m in sum_rule_moments(bank.A, p)]


def check_qmf(bank, tol=EXACT_TOL, moments=1):
    return QmfReport(
        orthonormality_residual=orthonormality_residual(bank),
        full_rank_residual=check_full_rank(bank, tol)[0],
        sum_rule_residuals=check_sum_rules(bank, moments, tol),
        tol=tol,
    )


def polyphase(bank):
    """``L(z) = [[A_0, B_0], [A_1, B_1]]`` as a 2d x 2d Laurent matrix."""
    d = bank.dim
    parts = [subsymbols(bank.A), subsymbols(bank.B)]
    blocks = [parts[0][0], parts[1][0], parts[0][1], parts[1][1]]
    present = [b for b in blocks if not b.is_zero]
    if not present:
        return LaurentMatrix(0, np.zeros((0, 2 * d, 2 * d)))
    lo = min(b.lowest_power for b in present)
    hi = max(b.highest_power for b in present)
    out = np.zeros((hi - lo + 1, 2 * d, 2 * d))
    for (r, c), b in zip(((0, 0), (0, 1), (1, 0), (1, 1)), blocks):
        if not b.is_zero:
            out[:, r * d:(r + 1) * d, c * d:(c + 1) * d] = b.window(lo, hi)
    return LaurentMatrix(lo, out)


def bank_from_polyphase(L, d):
    """Inverse of :func:`polyphase`."""
    rows, cols = L.shape
    if rows != cols or rows % 2 or rows != 2 * d:
        raise ValueError(f"polyphase matrix must be {2 * d} x {2 * d}")
    n = L.coeffs.shape[0]
    A = np.zeros((2 * n, d, d))
    B = np.zeros((2 * n, d, d))
    A[0::2] = L.coeffs[:, :d, :d]
    A[1::2] = L.coeffs[:, d:, :d]
    B[0::2] = L.coeffs[:, :d, d:]
    B[1::2] = L.coeffs[:, d:, d:]
    start = 2 * L.lowest_power
    return FilterBank(MatrixSequence(d, start, A), MatrixSequence(d, start, B))


def paraunitary_residual(bank):
    """Max-abs coefficient deviation of ``L^H(z) L(z)`` from ``2I``."""
    L = polyphase(bank)
    if L.is_zero:
        return 2.0
    P = laurent_mul(laurent_adjoint(L), L)
    target = LaurentMatrix.constant(2 * np.eye(2 * bank.dim))
    return (P - target).max_abs()


def analyze(bank, s):
    """``(s0, s1) = (D(A * s), D(B * s))``.

    With the transposed-tap convolution, ``s0(n)`` combines samples
    ``2n - k`` for k in the support of A, so Haar pairs ``(2n - 1, 2n)``.
    """
    if s.dim != bank.dim:
        raise ValueError("signal and bank dimensions differ")
    return downsample(convolve_filter(bank.A, s)), downsample(convolve_filter(bank.B, s))


def _reflect(F):
    """``F~(k) = F(-k)^T``."""
    coeffs = np.transpose(F.coeffs[::-1], (0, 2, 1))
    offset = -(F.offset + len(F) - 1) if not F.is_zero else 0
    return MatrixSequence(F.dim, offset, coeffs)


def synthesize(bank, s0, s1):
    """Inverse of :func:`analyze` for a QMF bank (upsample, filter, halve)."""
    if not (s0.dim == s1.dim == bank.dim):
        raise ValueError("signal and bank dimensions differ")
    low = convolve_filter(_reflect(bank.A), upsample(s0))
    high = convolve_filter(_reflect(bank.B), upsample(s1))
    parts = [p for p in (low, high) if len(p)]
    if not parts:
        return VectorSignal(bank.dim, 0, np.zeros((0, bank.dim)))
    lo = min(p.offset for p in parts)
    hi = max(p.offset + len(p) - 1 for p in parts)
    total = sum(p.window(lo, hi) for p in parts)
    return VectorSignal(bank.dim, lo, 0.5 * total)
