"""Finitely supported matrix sequences, vector signals and Laurent matrices.

Sequences are stored densely over their support interval. A sequence with
``offset = n`` and ``coeffs[i]`` holds the value at index ``n + i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TRIM_TOL = 1e-14


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def _trim(offset, arr, tol=TRIM_TOL):
    """Drop leading/trailing slices whose max-abs entry is below ``tol``."""
    if arr.shape[0] == 0:
        return 0, arr
    mags = np.abs(arr.reshape(arr.shape[0], -1)).max(axis=1)
    nz = np.flatnonzero(mags >= tol)
    if nz.size == 0:
        return 0, arr[:0]
    return offset + int(nz[0]), arr[nz[0]:nz[-1] + 1]


def _window(offset, arr, lo, hi):
    """Values of a dense sequence on ``lo..hi`` (inclusive), zero-extended."""
    out = np.zeros((hi - lo + 1,) + arr.shape[1:])
    a, b = max(lo, offset), min(hi, offset + arr.shape[0] - 1)
    if a <= b:
        out[a - lo:b - lo + 1] = arr[a - offset:b - offset + 1]
    return out


def _downsample(offset, arr):
    first = offset + (offset % 2)
    return first // 2, arr[first - offset::2]


def _upsample(offset, arr):
    n = arr.shape[0]
    if n == 0:
        return 0, arr
    out = np.zeros((2 * n - 1,) + arr.shape[1:])
    out[::2] = arr
    return 2 * offset, out


@dataclass(frozen=True, eq=False)
class MatrixSequence:
    """A FIR filter: integer index -> d x d real matrix."""

    dim: int
    offset: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.size == 0:
            coeffs = np.zeros((0, self.dim, self.dim))
        if coeffs.ndim != 3 or coeffs.shape[1:] != (self.dim, self.dim):
            raise ValueError(f"coefficients must have shape (n, {self.dim}, {self.dim})")
        offset, coeffs = _trim(int(self.offset), coeffs)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    @classmethod
    def zero(cls, dim):
        return cls(dim, 0, np.zeros((0, dim, dim)))

    def __len__(self):
        return self.coeffs.shape[0]

    def __getitem__(self, k):
        i = k - self.offset
        if 0 <= i < len(self):
            return self.coeffs[i]
        return np.zeros((self.dim, self.dim))

    @property
    def is_zero(self):
        return len(self) == 0

    @property
    def support(self):
        """Inclusive index range ``(lo, hi)``; ``None`` for the zero sequence."""
        if self.is_zero:
            return None
        return self.offset, self.offset + len(self) - 1

    def window(self, lo, hi):
        return _window(self.offset, self.coeffs, lo, hi)

    def __neg__(self):
        return MatrixSequence(self.dim, self.offset, -self.coeffs)

    def __add__(self, other):
        return _combine(self, other, 1.0)

    def __sub__(self, other):
        return _combine(self, other, -1.0)

    def map(self, fn):
        """Apply ``fn`` to every stored matrix (``fn`` must preserve shape)."""
        return MatrixSequence(self.dim, self.offset, np.array([fn(c) for c in self.coeffs]).reshape(self.coeffs.shape))

    def max_abs_diff(self, other):
        if self.is_zero and other.is_zero:
            return 0.0
        spans = [s.support for s in (self, other) if not s.is_zero]
        lo, hi = min(s[0] for s in spans), max(s[1] for s in spans)
        return float(np.abs(self.window(lo, hi) - other.window(lo, hi)).max())

    def to_dict(self):
        return {"dim": self.dim, "offset": self.offset, "coeffs": self.coeffs.tolist()}

    @classmethod
    def from_dict(cls, data):
        dim = int(data["dim"])
        coeffs = np.asarray(data["coeffs"], dtype=float).reshape(-1, dim, dim)
        return cls(dim, int(data["offset"]), coeffs)


def _combine(s, t, sign):
    if s.dim != t.dim:
        raise ValueError("dimension mismatch")
    if s.is_zero:
        return MatrixSequence(t.dim, t.offset, sign * t.coeffs)
    if t.is_zero:
        return s
    lo = min(s.offset, t.offset)
    hi = max(s.support[1], t.support[1])
    return MatrixSequence(s.dim, lo, s.window(lo, hi) + sign * t.window(lo, hi))


@dataclass(frozen=True, eq=False)
class VectorSignal:
    """A finitely supported signal of d-vectors. Not trimmed on construction."""

    dim: int
    offset: int
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.size == 0:
            samples = np.zeros((0, self.dim))
        if samples.ndim != 2 or samples.shape[1] != self.dim:
            raise ValueError(f"samples must have shape (n, {self.dim})")
        object.__setattr__(self, "offset", int(self.offset))
        object.__setattr__(self, "samples", _frozen(samples))

    def __len__(self):
        return self.samples.shape[0]

    def __getitem__(self, k):
        i = k - self.offset
        if 0 <= i < len(self):
            return self.samples[i]
        return np.zeros(self.dim)

    def window(self, lo, hi):
        return _window(self.offset, self.samples, lo, hi)

    def trimmed(self, tol=TRIM_TOL):
        offset, samples = _trim(self.offset, self.samples, tol)
        return VectorSignal(self.dim, offset, samples)

    def max_abs_diff(self, other):
        spans = [(s.offset, s.offset + len(s) - 1) for s in (self, other) if len(s)]
        if not spans:
            return 0.0
        lo, hi = min(a for a, _ in spans), max(b for _, b in spans)
        return float(np.abs(self.window(lo, hi) - other.window(lo, hi)).max())

    def to_dict(self):
        return {"dim": self.dim, "offset": self.offset, "samples": self.samples.tolist()}

    @classmethod
    def from_dict(cls, data):
        dim = int(data["dim"])
        samples = np.asarray(data["samples"], dtype=float).reshape(-1, dim)
        return cls(dim, int(data["offset"]), samples)


def delta(n, d):
    """Identity matrix at index ``n``."""
    if d < 1:
        raise ValueError("d must be positive")
    return MatrixSequence(d, n, np.eye(d)[None])


def translate(s, n):
    """``(T_n s)(k) = s(k - n)``; works for sequences and signals."""
    if isinstance(s, VectorSignal):
        return VectorSignal(s.dim, s.offset + n, s.samples)
    return MatrixSequence(s.dim, s.offset + n, s.coeffs)


def downsample(s):
    """Keep even indices: ``(Ds)(k) = s(2k)``."""
    if isinstance(s, VectorSignal):
        return VectorSignal(s.dim, *_downsample(s.offset, s.samples))
    return MatrixSequence(s.dim, *_downsample(s.offset, s.coeffs))


def upsample(s):
    """Transpose of :func:`downsample`: ``s(k)`` moves to ``2k``, zeros between."""
    if isinstance(s, VectorSignal):
        return VectorSignal(s.dim, *_upsample(s.offset, s.samples))
    return MatrixSequence(s.dim, *_upsample(s.offset, s.coeffs))


def convolve_filter(A, s):
    """Filter a signal: ``(A * s)(n) = sum_k A(n - k)^T s(k)``.

    Filter taps enter transposed. The output support is the Minkowski sum of
    both supports.
    """
    if A.dim != s.dim:
        raise ValueError(f"filter dim {A.dim} does not match signal dim {s.dim}")
    if A.is_zero or len(s) == 0:
        return VectorSignal(s.dim, 0, np.zeros((0, s.dim)))
    n = len(A) + len(s) - 1
    out = np.zeros((n, s.dim))
    # row form: (A(i)^T x)^T = x^T A(i)
    for i, tap in enumerate(A.coeffs):
        out[i:i + len(s)] += s.samples @ tap
    return VectorSignal(s.dim, A.offset + s.offset, out)


@dataclass(frozen=True, eq=False)
class LaurentMatrix:
    """``sum_i coeffs[i] z**(lowest_power + i)`` with matrix coefficients."""

    lowest_power: int
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 3:
            raise ValueError("coefficients must be a stack of matrices")
        lowest, coeffs = _trim(int(self.lowest_power), coeffs)
        object.__setattr__(self, "lowest_power", lowest)
        object.__setattr__(self, "coeffs", _frozen(coeffs))

    @classmethod
    def constant(cls, matrix):
        return cls(0, np.asarray(matrix, dtype=float)[None])

    @property
    def shape(self):
        return self.coeffs.shape[1:]

    @property
    def dim(self):
        rows, cols = self.shape
        if rows != cols:
            raise ValueError("not a square Laurent matrix")
        return rows

    @property
    def is_zero(self):
        return self.coeffs.shape[0] == 0

    @property
    def highest_power(self):
        return self.lowest_power + self.coeffs.shape[0] - 1

    def coefficient(self, k):
        i = k - self.lowest_power
        if 0 <= i < self.coeffs.shape[0]:
            return self.coeffs[i]
        return np.zeros(self.shape)

    def window(self, lo, hi):
        return _window(self.lowest_power, self.coeffs, lo, hi)

    def __call__(self, z):
        powers = np.asarray(z, dtype=complex) ** np.arange(self.lowest_power, self.highest_power + 1)
        return np.tensordot(powers, self.coeffs, axes=1)

    def __matmul__(self, other):
        return laurent_mul(self, other)

    def __add__(self, other):
        return _laurent_combine(self, other, 1.0)

    def __sub__(self, other):
        return _laurent_combine(self, other, -1.0)

    def __mul__(self, scalar):
        return LaurentMatrix(self.lowest_power, scalar * self.coeffs)

    __rmul__ = __mul__

    def adjoint(self):
        return laurent_adjoint(self)

    def max_abs(self):
        return float(np.abs(self.coeffs).max()) if not self.is_zero else 0.0

    def max_abs_diff(self, other):
        return (self - other).max_abs()

    def substitute_square(self):
        """Return ``P(z**2)``."""
        if self.is_zero:
            return self
        _, spread = _upsample(self.lowest_power, self.coeffs)
        return LaurentMatrix(2 * self.lowest_power, spread)

    def shifted(self, n):
        """Multiply by ``z**n``."""
        return LaurentMatrix(self.lowest_power + n, self.coeffs)


def _laurent_combine(P, Q, sign):
    if P.shape != Q.shape and not (P.is_zero or Q.is_zero):
        raise ValueError("shape mismatch")
    if P.is_zero:
        return LaurentMatrix(Q.lowest_power, sign * Q.coeffs)
    if Q.is_zero:
        return P
    lo = min(P.lowest_power, Q.lowest_power)
    hi = max(P.highest_power, Q.highest_power)
    return LaurentMatrix(lo, P.window(lo, hi) + sign * Q.window(lo, hi))


def laurent_mul(P, Q):
    """Polynomial product with matrix coefficients."""
    if P.shape[1] != Q.shape[0]:
        raise ValueError(f"cannot multiply {P.shape} by {Q.shape}")
    if P.is_zero or Q.is_zero:
        return LaurentMatrix(0, np.zeros((0, P.shape[0], Q.shape[1])))
    n = P.coeffs.shape[0] + Q.coeffs.shape[0] - 1
    out = np.zeros((n, P.shape[0], Q.shape[1]))
    for i, p in enumerate(P.coeffs):
        out[i:i + Q.coeffs.shape[0]] += np.einsum("ij,kjl->kil", p, Q.coeffs)
    return LaurentMatrix(P.lowest_power + Q.lowest_power, out)


def laurent_adjoint(P):
    """``sum P(k) z^k  ->  sum P(k)^T z^-k`` (the conjugate transpose on |z| = 1)."""
    if P.is_zero:
        return LaurentMatrix(0, np.zeros((0,) + P.shape[::-1]))
    return LaurentMatrix(-P.highest_power, np.transpose(P.coeffs[::-1], (0, 2, 1)))


def symbol(s):
    """``sum_k s(k) z^k``."""
    return LaurentMatrix(s.offset, s.coeffs)


def subsymbols(s):
    """Even and odd subsymbols ``A_l(z) = sum_k s(2k + l) z^k``, l = 0, 1."""
    even = _downsample(s.offset, s.coeffs)
    odd = _downsample(s.offset - 1, s.coeffs)
    return LaurentMatrix(*even), LaurentMatrix(*odd)


def from_subsymbols(even, odd):
    """Inverse of :func:`subsymbols` as a symbol: ``A_0(z^2) + z A_1(z^2)``."""
    return even.substitute_square() + odd.substitute_square().shifted(1)


def sequence_from_symbol(P):
    rows, cols = P.shape
    if rows != cols:
        raise ValueError("symbol must be square")
    return MatrixSequence(rows, P.lowest_power, P.coeffs)
