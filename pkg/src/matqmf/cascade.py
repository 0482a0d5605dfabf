"""Matrix scaling functions and wavelets on dyadic grids, and the circle test
on the autocorrelation symbol that certifies convergence of the cascade."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .laurent import laurent_adjoint, laurent_mul, symbol
from .qmf import check_qmf

HERMITIAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SampledMatrixFunction:
    """Values ``F(origin + m / 2**level)`` for m = 0 .. len(values) - 1."""

    dim: int
    level: int
    origin: float
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 3 or v.shape[1:] != (self.dim, self.dim):
            raise ValueError("values must have shape (n, dim, dim)")
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def spacing(self):
        return 2.0 ** -self.level

    @property
    def x(self):
        return self.origin + np.arange(len(self.values)) * self.spacing

    def __len__(self):
        return len(self.values)

    def restrict(self, level):
        """Samples on the coarser grid of ``level`` (a sub-grid of this one)."""
        if not 0 <= level <= self.level:
            raise ValueError("can only restrict to a coarser level")
        step = 2 ** (self.level - level)
        return SampledMatrixFunction(self.dim, level, self.origin, self.values[::step])

    def max_abs_diff(self, other):
        if (self.level, self.origin, len(self)) != (other.level, other.origin, len(other)):
            raise ValueError("grids differ")
        return float(np.abs(self.values - other.values).max())

    def riemann_sum(self, weight=None):
        """``2**-level * sum_m w(x_m) F(x_m)``."""
        w = np.ones(len(self)) if weight is None else weight(self.x)
        return self.spacing * np.einsum("m,mab->ab", w, self.values)


def _grid_range(bank):
    lo, hi = bank.A.support
    return min(lo, 0), max(hi, 1)


def _transition(bank, r0, n):
    """Block matrix with ``A(2i - l)`` at block (l, i), acting on row vectors."""
    d = bank.dim
    T = np.zeros((n * d, n * d))
    for li in range(n):
        for ii in range(n):
            T[li * d:(li + 1) * d, ii * d:(ii + 1) * d] = bank.A[2 * (ii + r0) - (li + r0)]
    return T


def integer_samples(bank, eig_tol=1e-8, max_cond=1e12, tol=1e-14, max_iter=10000):
    """Limit of the box-seeded cascade on the integers.

    The box function is ``I`` at 0 and zero at the other integers; each
    cascade step maps the integer samples by ``F(i) <- sum_l F(l) A(2i - l)``.
    The limit is the component of the seed in the eigenvalue-1 eigenspace
    of that map, taken along the remaining eigenvectors. This matches plain
    iteration whenever that converges, and stays defined when other modes
    grow. A defective eigenbasis falls back to plain iteration.
    Returns ``(first integer, samples)``.
    """
    d = bank.dim
    r0, r1 = _grid_range(bank)
    n = r1 - r0 + 1
    T = _transition(bank, r0, n)
    seed = np.zeros((d, n * d))
    seed[:, -r0 * d:(-r0 + 1) * d] = np.eye(d)
    lam, W = np.linalg.eig(T)
    if np.linalg.cond(W) < max_cond:
        keep = np.abs(lam - 1) < eig_tol
        Winv = np.linalg.inv(W)
        rows = (seed @ W[:, keep]) @ Winv[keep]
        return r0, rows.real.reshape(d, n, d).transpose(1, 0, 2)
    rows = seed
    for _ in range(max_iter):
        new = rows @ T
        change = float(np.abs(new - rows).max())
        rows = new
        if change <= tol * max(1.0, float(np.abs(rows).max())):
            break
    else:
        warnings.warn(f"cascade on the integers did not converge (last change {change:.3g})",
                      RuntimeWarning, stacklevel=2)
    return r0, rows.reshape(d, n, d).transpose(1, 0, 2)


def refine(bank, origin, samples, levels):
    """Apply the two-scale relation ``levels`` times, doubling the grid density each time.

    ``samples`` are values at the integers ``origin, origin + 1, ...``.
    """
    V = np.asarray(samples, dtype=float)
    d = bank.dim
    A = bank.A
    taps = range(A.offset, A.offset + len(A))
    for k in range(1, levels + 1):
        half = 2 ** (k - 1)
        n = (len(V) - 1) * 2 + 1
        new = np.zeros((n, d, d))
        m = np.arange(n)
        for j in taps:
            src = m + (origin - j) * half
            ok = (src >= 0) & (src < len(V))
            new[ok] += V[src[ok]] @ A[j]
        V = new
    return V


def cascade_scaling(bank, levels, converge=True):
    """Sampled scaling function ``F = sum_j F(2 . - j) A(j)`` at spacing ``2**-levels``.

    With ``converge`` the integer samples are first replaced by their
    limit under the cascade (see :func:`integer_samples`); without it the
    result is exactly the ``levels``-th cascade iterate from the box function.
    """
    if levels < 0:
        raise ValueError("levels must be non-negative")
    if bank.A.is_zero:
        raise ValueError("scaling filter is zero")
    report = check_qmf(bank, 1e-8)
    if not report.ok(sum_rules=False):
        warnings.warn("bank does not pass the QMF and full-rank checks; cascade may diverge",
                      RuntimeWarning, stacklevel=2)
    if converge:
        origin, F = integer_samples(bank)
    else:
        origin, _ = _grid_range(bank)
        F = np.zeros((_grid_range(bank)[1] - origin + 1, bank.dim, bank.dim))
        F[-origin] = np.eye(bank.dim)
    values = refine(bank, origin, F, levels)
    return SampledMatrixFunction(bank.dim, levels, float(origin), values)


def _compose(F, taps):
    """``sum_k F(2x - k) C(k)`` on the grid of ``F`` (zero outside its samples)."""
    scale = 2 ** F.level
    n = len(F)
    m = np.arange(n)
    out = np.zeros_like(F.values)
    origin = int(round(F.origin))
    for k in range(taps.offset, taps.offset + len(taps)):
        src = 2 * m + (origin - k) * scale
        ok = (src >= 0) & (src < n)
        out[ok] += F.values[src[ok]] @ taps[k]
    return out


def cascade_wavelet(bank, levels, scaling=None, **kwargs):
    """Sampled wavelet ``G = sum_j F(2 . - j) B(j)`` on the grid of ``F``."""
    F = cascade_scaling(bank, levels, **kwargs) if scaling is None else scaling
    return SampledMatrixFunction(F.dim, F.level, F.origin, _compose(F, bank.B))


def two_scale_residual(bank, F):
    """Max-abs of ``F(x) - sum_j F(2x - j) A(j)`` over the grid."""
    return float(np.abs(F.values - _compose(F, bank.A)).max())


def shift_gramians(F, shifts):
    """Riemann sums of ``F(x)^T F(x - k)`` for each integer k."""
    scale = 2 ** F.level
    out = {}
    for k in shifts:
        s = k * scale
        if s >= len(F) or -s >= len(F):
            out[k] = np.zeros((F.dim, F.dim))
            continue
        X = F.values[s:] if s >= 0 else F.values[:len(F) + s]
        Y = F.values[:len(F) - s] if s >= 0 else F.values[-s:]
        out[k] = F.spacing * np.einsum("mab,mac->bc", X, Y)
    return out


def moment(F, order):
    """Riemann sum of ``x**order F(x)``."""
    return F.riemann_sum(lambda x: x**order)


def autocorrelation(bank):
    """``C(z) = 1/2 A^H(z) A(z)``."""
    A = symbol(bank.A)
    if A.is_zero:
        return A
    return laurent_mul(laurent_adjoint(A), A) * 0.5


def hermitian_defect(C):
    """``max |C(k)^T - C(-k)|``; zero iff ``C`` is Hermitian on the unit circle."""
    if C.is_zero:
        return 0.0
    lo, hi = C.lowest_power, C.highest_power
    n = max(abs(lo), abs(hi))
    W = C.window(-n, n)
    return float(np.abs(np.transpose(W, (0, 2, 1)) - W[::-1]).max())


@dataclass
class CircleReport:
    min_eigenvalue: float
    min_away_from_pi: float
    passes: bool
    samples: int

    def to_dict(self):
        return {
            "min_eigenvalue": self.min_eigenvalue,
            "min_away_from_pi": self.min_away_from_pi,
            "passes": self.passes,
            "samples": self.samples,
        }


def circle_eigenvalues(C, samples=1024):
    """Angles ``2 pi m / samples`` and the sorted eigenvalues of ``C`` there."""
    omega = 2 * np.pi * np.arange(samples) / samples
    powers = np.arange(C.lowest_power, C.lowest_power + C.coeffs.shape[0])
    phase = np.exp(1j * np.outer(omega, powers))
    values = np.einsum("wk,kab->wab", phase, C.coeffs)
    return omega, np.linalg.eigvalsh(values)


def check_positive_definite_on_circle(C, samples=1024, rel_floor=1e-12):
    """Sampled positive definiteness of ``C(e^{i w})``, allowing a zero at ``w = pi``.

    Returns a :class:`CircleReport`; ``passes`` requires every sample with
    ``w != pi`` to have smallest eigenvalue above ``rel_floor`` times the
    largest eigenvalue seen, and the sample at ``pi`` (if any) to be
    nonnegative within the same floor.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    if hermitian_defect(C) > HERMITIAN_TOL:
        raise ValueError("C is not Hermitian on the unit circle")
    if C.is_zero:
        return CircleReport(0.0, 0.0, False, samples)
    omega, eig = circle_eigenvalues(C, samples)
    lowest = eig[:, 0]
    floor = rel_floor * max(float(eig[:, -1].max()), 0.0)
    at_pi = np.isclose(omega, np.pi, rtol=0, atol=1e-12)
    away = lowest[~at_pi]
    min_away = float(away.min()) if away.size else float("inf")
    passes = bool(min_away > floor and np.all(lowest[at_pi] >= -floor))
    return CircleReport(float(lowest.min()), min_away, passes, samples)


def write_csv(handle, F, prefix="F"):
    """Rows ``x, F11, F12, ...`` (row-major entries), newline-terminated."""
    d = F.dim
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(["x"] + [f"{prefix}{i + 1}{j + 1}" for i in range(d) for j in range(d)])
    for x, v in zip(F.x, F.values):
        writer.writerow([repr(float(x))] + [repr(float(e)) for e in v.ravel()])
