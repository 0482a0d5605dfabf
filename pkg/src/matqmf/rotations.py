"""Orthogonal block operators that commute with shifts by two.

A :class:`RotationStep` multiplies every block of two consecutive
coefficients of a bank by a fixed orthogonal 2d x 2d matrix. Parity 0 groups
indices ``(2n, 2n+1)``, parity 1 groups ``(2n-1, 2n)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .laurent import MatrixSequence
from .qmf import FilterBank, haar, trivial

ORTHO_TOL = 1e-10


class NonOrthogonalStep(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class RotationStep:
    M: np.ndarray
    parity: int = 0

    def __post_init__(self):
        M = np.array(self.M, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
            raise ValueError("M must be a square matrix of even size")
        if self.parity not in (0, 1):
            raise ValueError("parity must be 0 or 1")
        M.setflags(write=False)
        object.__setattr__(self, "M", M)

    @property
    def dim(self):
        return self.M.shape[0] // 2

    def orthogonality_error(self):
        return float(np.abs(self.M.T @ self.M - np.eye(self.M.shape[0])).max())

    def inverse(self):
        return RotationStep(self.M.T, self.parity)

    def to_dict(self):
        return {"parity": self.parity, "M": self.M.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(np.asarray(data["M"], dtype=float), int(data["parity"]))


def givens(l, m, theta, n):
    """Plane rotation in coordinates ``l < m`` (1-based): ``g_lm = sin``, ``g_ml = -sin``."""
    if not 1 <= l < m <= n:
        raise IndexError(f"need 1 <= l < m <= n, got l={l}, m={m}, n={n}")
    g = np.eye(n)
    c, s = np.cos(theta), np.sin(theta)
    g[l - 1, l - 1] = g[m - 1, m - 1] = c
    g[l - 1, m - 1] = s
    g[m - 1, l - 1] = -s
    return g


def s_theta(theta):
    """Six-angle parameterization of SO(4) by a fixed product of Givens rotations."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (6,):
        raise ValueError("theta must have length 6")
    t1, t2, t3, t4, t5, t6 = theta
    return (givens(1, 2, t4, 4) @ givens(3, 4, t3, 4) @ givens(2, 3, t2, 4)
            @ givens(1, 4, t1, 4) @ givens(1, 3, t6, 4) @ givens(2, 4, t5, 4))


def generator_pairs(d):
    """Index pairs (i, j), 1-based, in generator order: (1,2), (1,3), ..., (2d-1, 2d)."""
    return [(i + 1, j + 1) for i, j in itertools.combinations(range(2 * d), 2)]


def lie_dimension(d):
    return d * (2 * d - 1)


def lie_generator(alpha, d):
    """``X_alpha = E^{ij} - E^{ji}`` for the alpha-th pair (1-based)."""
    pairs = generator_pairs(d)
    if not 1 <= alpha <= len(pairs):
        raise IndexError(f"alpha must be in 1..{len(pairs)}")
    i, j = pairs[alpha - 1]
    X = np.zeros((2 * d, 2 * d))
    X[i - 1, j - 1] = 1.0
    X[j - 1, i - 1] = -1.0
    return X


def lie_algebra_element(xi, d):
    """``sum_alpha xi_alpha X_alpha``."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (lie_dimension(d),):
        raise ValueError(f"xi must have length {lie_dimension(d)}")
    X = np.zeros((2 * d, 2 * d))
    for (i, j), v in zip(generator_pairs(d), xi):
        X[i - 1, j - 1] += v
        X[j - 1, i - 1] -= v
    return X


def expm_small(X):
    """Matrix exponential by scaling and squaring a truncated Taylor series.

    Scales until ``||X||_1 <= 0.5``; stops the series once a term drops
    below 1e-18 relative to the partial sum.
    """
    X = np.asarray(X, dtype=float)
    norm = np.abs(X).sum(axis=0).max() if X.size else 0.0
    squarings = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    Y = X / 2.0**squarings
    result = np.eye(X.shape[0])
    term = np.eye(X.shape[0])
    for k in range(1, 40):
        term = term @ Y / k
        result = result + term
        if np.abs(term).max() < 1e-18 * max(1.0, np.abs(result).max()):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def lie_exp(xi, d=None):
    """Rotation ``exp(sum_alpha xi_alpha X_alpha)`` in SO(2d)."""
    xi = np.asarray(xi, dtype=float)
    if d is None:
        d = int(round((1 + np.sqrt(1 + 8 * xi.size)) / 4))
    return expm_small(lie_algebra_element(xi, d))


def block_covering(bank, parity):
    """Dense 2d x 2d blocks of the covering with the given parity."""
    d = bank.dim
    lo, hi = bank.support
    start = lo - ((lo - parity) % 2)
    stop = hi + 1 + ((hi + 1 - parity) % 2)
    n = (stop - start) // 2
    A = bank.A.window(start, stop - 1)
    B = bank.B.window(start, stop - 1)
    blocks = np.empty((n, 2 * d, 2 * d))
    blocks[:, :d, :d] = A[0::2]
    blocks[:, :d, d:] = B[0::2]
    blocks[:, d:, :d] = A[1::2]
    blocks[:, d:, d:] = B[1::2]
    return start, blocks


def _unblock(start, blocks, d):
    n = blocks.shape[0]
    A = np.empty((2 * n, d, d))
    B = np.empty((2 * n, d, d))
    A[0::2], B[0::2] = blocks[:, :d, :d], blocks[:, :d, d:]
    A[1::2], B[1::2] = blocks[:, d:, :d], blocks[:, d:, d:]
    return FilterBank(MatrixSequence(d, start, A), MatrixSequence(d, start, B))


def apply_step(bank, step, tol=ORTHO_TOL):
    """Apply the block operator of ``step`` to ``bank``.

    In polyphase terms parity 0 is ``L -> M L`` and parity 1 is
    ``L -> [[0, zI], [I, 0]] M [[0, I], [z^-1 I, 0]] L``.
    """
    if step.dim != bank.dim:
        raise ValueError(f"step is for d={step.dim}, bank has d={bank.dim}")
    err = step.orthogonality_error()
    if err > tol:
        raise NonOrthogonalStep(f"rotation matrix is not orthogonal (error {err:.3g})")
    if bank.support is None:
        return bank
    start, blocks = block_covering(bank, step.parity)
    return _unblock(start, np.einsum("ij,njk->nik", step.M, blocks), bank.dim)


def alternating(matrices, first_parity=0):
    """Wrap matrices into steps with parities first, 1 - first, first, ..."""
    return [RotationStep(M, (first_parity + i) % 2) for i, M in enumerate(matrices)]


def construct(steps, d, seed="haar"):
    """Apply ``steps`` in list order to the Haar bank (or the trivial bank)."""
    if seed == "haar":
        bank = haar(d)
    elif seed == "trivial":
        bank = trivial(d)
    else:
        raise ValueError(f"unknown seed {seed!r}")
    for step in steps:
        bank = apply_step(bank, step)
    return bank


def random_rotation(rng, n):
    """Haar-distributed element of SO(n)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q
