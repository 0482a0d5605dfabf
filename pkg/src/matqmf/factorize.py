"""Factor a QMF bank into rotation steps applied to Haar.

Each peel finds the orthogonal matrix that rotates the two outermost
blocks into opposite halves of the coordinate space, so that one outer
index on each side vanishes and the support shrinks by two. The rotation
is polished by a few Newton passes because outer blocks can be close to
rank deficient, which would otherwise let round-off grow from peel to peel. A bank of
length two is a single rotation of the Haar block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .laurent import MatrixSequence
from .qmf import FilterBank, haar, orthonormality_residual, polyphase
from .rotations import RotationStep, apply_step, block_covering, construct, expm_small

RANK_RTOL = 1e-9
QMF_TOL = 1e-8


class ObstructionError(ValueError):
    """An outermost block does not have dimension d."""

    def __init__(self, side, parity, dimension, expected):
        self.side = side
        self.parity = parity
        self.dimension = dimension
        self.expected = expected
        super().__init__(f"{side} outermost block (parity {parity}) has dimension {dimension}, need {expected}")

    def to_dict(self):
        return {"side": self.side, "parity": self.parity, "dimension": self.dimension,
                "expected": self.expected}


class OrthogonalityError(ValueError):
    pass


@dataclass
class PeelCertificate:
    """Outcome of :func:`factorize`.

    On success ``bank == translate(construct(steps), shift)`` up to
    ``residual``; ``lengths`` lists the support length before each peel and
    after the last one. On failure ``obstruction`` is set and ``steps`` is empty.
    """

    steps: list = field(default_factory=list)
    residual: float = 0.0
    obstruction: ObstructionError | None = None
    shift: int = 0
    lengths: list = field(default_factory=list)

    @property
    def ok(self):
        return self.obstruction is None

    def to_dict(self):
        if self.obstruction is not None:
            return {"obstruction": self.obstruction.to_dict()}
        return {"residual": self.residual, "shift": self.shift,
                "steps": [s.to_dict() for s in self.steps]}


def _scale(bank):
    _, blocks = block_covering(bank, 0)
    return max(1.0, float(np.abs(blocks).max()))


def outer_blocks(bank, parity):
    """The 2d x 2d first and last blocks of the parity covering."""
    _, blocks = block_covering(bank, parity)
    return blocks[0], blocks[-1]


def block_dimension(bank, side, parity):
    """Rank of the outermost block on ``side`` ('left' or 'right') for ``parity``."""
    if bank.support is None:
        raise ValueError("empty bank has no blocks")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    left, right = outer_blocks(bank, parity)
    block = left if side == "left" else right
    s = np.linalg.svd(block, compute_uv=False)
    return int(np.sum(s > RANK_RTOL * _scale(bank)))


def split_bases(left, right, d):
    """Orthonormal bases ``(V, U)`` of the left and right block column spaces.

    Both come from one symmetric eigendecomposition of ``R R^T - L L^T``:
    the right block spans the positive eigenvectors, the left block the
    negative ones. The combined basis is orthogonal to machine precision
    even when a block is close to rank deficient. Each vector is signed so
    its largest entry is positive.
    """
    w, E = np.linalg.eigh(right @ right.T - left @ left.T)
    E = E * np.where(E[np.argmax(np.abs(E), axis=0), np.arange(E.shape[1])] < 0, -1.0, 1.0)
    return E[:, :d], E[:, ::-1][:, :d]


def polish(Q, left, right, d, iterations=3):
    """Refine ``Q`` so that ``Q L`` has a zero top half and ``Q R`` a zero bottom half.

    Each pass solves the linearized conditions for a skew correction
    ``[[0, -X], [X^T, 0]]`` by least squares and applies its exponential,
    which keeps ``Q`` orthogonal.
    """
    eye = np.eye(d)
    for _ in range(iterations):
        top_left, bottom_left = (Q @ left)[:d], (Q @ left)[d:]
        top_right, bottom_right = (Q @ right)[:d], (Q @ right)[d:]
        if max(np.abs(top_left).max(), np.abs(bottom_right).max()) < 1e-15:
            break
        # column-major vec: vec(X L) = (L^T kron I) vec X
        system = np.vstack([np.kron(bottom_left.T, eye), np.kron(eye, top_right.T)])
        rhs = np.concatenate([top_left.ravel(order="F"), -bottom_right.T.ravel(order="F")])
        X = np.linalg.lstsq(system, rhs, rcond=None)[0].reshape(d, d, order="F")
        Z = np.zeros((d, d))
        Q = expm_small(np.block([[Z, -X], [X.T, Z]])) @ Q
    return Q


def peel_once(bank, parity, tol=QMF_TOL):
    """Remove one rotation step: returns ``(reduced, step)`` with
    ``apply_step(reduced, step) == bank`` and support shorter by two."""
    d = bank.dim
    lo, hi = bank.support
    if hi - lo + 1 <= 2:
        raise ValueError("nothing to peel from a bank of length 2")
    if (lo - parity) % 2:
        raise ValueError(f"parity {parity} does not align with the support start {lo}")
    for side in ("left", "right"):
        dim = block_dimension(bank, side, parity)
        if dim != d:
            raise ObstructionError(side, parity, dim, d)
    if (hi - lo + 1) % 2:
        # the last block sticks out by one index; it cannot shrink by two
        raise ObstructionError("right", parity, block_dimension(bank, "right", parity), d)
    left, right = outer_blocks(bank, parity)
    V, U = split_bases(left, right, d)
    Q = polish(np.vstack([U.T, V.T]), left, right, d)
    rotated = apply_step(bank, RotationStep(Q, parity))
    spill = max(np.abs(rotated.A[lo]).max(), np.abs(rotated.B[lo]).max(),
                np.abs(rotated.A[hi]).max(), np.abs(rotated.B[hi]).max())
    if spill > tol * _scale(bank):
        raise OrthogonalityError(f"peel left {spill:.3g} in the outer coefficients")
    reduced = FilterBank(
        MatrixSequence(d, lo + 1, rotated.A.window(lo + 1, hi - 1)),
        MatrixSequence(d, lo + 1, rotated.B.window(lo + 1, hi - 1)),
    )
    return reduced, RotationStep(Q.T, parity)


def align_to_haar(bank):
    """Rotation ``M`` with ``apply_step(haar, M) == bank`` for a bank supported on {0, 1}."""
    H = polyphase(haar(bank.dim)).coeffs[0]
    _, blocks = block_covering(bank, 0)
    if blocks.shape[0] != 1 or bank.support[0] != 0:
        raise ValueError("expected a bank supported on {0, 1}")
    # nearest orthogonal matrix, so banks accurate only to ~1e-10 still align
    W, _, Vt = np.linalg.svd(blocks[0] @ H.T / 2)
    return RotationStep(W @ Vt, 0)


def factorize(bank, tol=QMF_TOL):
    """Peel ``bank`` down to length two and align the rest with Haar.

    Each peel uses the parity matching the current support start. Returns
    a :class:`PeelCertificate`; an obstruction is reported in the
    certificate rather than raised.
    """
    if bank.support is None:
        raise ValueError("cannot factorize the zero bank")
    res = orthonormality_residual(bank)
    if res > tol:
        raise OrthogonalityError(f"input is not a QMF bank (residual {res:.3g})")
    peeled = []
    lengths = [bank.length]
    current = bank
    try:
        while current.length > 2:
            parity = current.support[0] % 2
            current, step = peel_once(current, parity, tol)
            peeled.append(step)
            lengths.append(current.length)
        if current.length < 2:
            raise ObstructionError("left", current.support[0] % 2, block_dimension(current, "left", 0),
                                   bank.dim)
    except ObstructionError as err:
        return PeelCertificate(obstruction=err, lengths=lengths)
    shift = current.support[0]
    # translation by an odd amount swaps the two parities
    steps = [align_to_haar(current.translate(-shift))]
    steps += [RotationStep(s.M, (s.parity - shift) % 2) for s in reversed(peeled)]
    rebuilt = construct(steps, bank.dim).translate(shift)
    return PeelCertificate(steps, rebuilt.max_abs_diff(bank), None, shift, lengths)


def rebuild(certificate, d):
    """``translate(construct(steps), shift)`` for a successful certificate."""
    if not certificate.ok:
        raise ValueError("certificate records an obstruction")
    return construct(certificate.steps, d).translate(certificate.shift)


def obstruction_example():
    """QMF bank with one channel delayed by one sample: Haar in each channel,
    but the second channel's taps sit on {1, 2} instead of {0, 1}."""
    e1, e2 = np.diag([1.0, 0.0]), np.diag([0.0, 1.0])
    A = MatrixSequence(2, 0, [e1, e1 + e2, e2])
    B = MatrixSequence(2, 0, [e1, -e1 + e2, -e2])
    return FilterBank(A, B)
