"""Constraint solving over rotation parameters and linear analysis around Haar.

Two rotation steps from Haar give a four-tap bank with twelve free
angles (d = 2). :func:`solve_constraints` drives the full-rank and
sum-rule deviations to zero with a damped Gauss-Newton iteration; the
remaining functions study the linearization of the same map at the origin.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .qmf import EXACT_TOL, check_qmf, haar, polyphase
from .rotations import (
    RotationStep,
    construct,
    lie_dimension,
    lie_exp,
    lie_generator,
    s_theta,
)

PARAMETERIZATIONS = ("givens", "lie")

# Parity order per parameterization. The Givens angles follow the layout of
# the 12-parameter Givens example; the Lie coordinates follow the
# (inner, outer) layout used for the linear analysis.
DEFAULT_PARITIES = {"givens": (1, 0), "lie": (0, 1)}

RANK_RTOL = 1e-8
FD_STEP = 1e-6

# Kernel of the linearization at the origin, coordinates [xi; xi'].
GAMMA_1 = np.zeros(12)
GAMMA_1[[0, 11]] = [-1.0, 1.0]
GAMMA_2 = np.zeros(12)
GAMMA_2[[5, 6]] = [-1.0, 1.0]

# Reference bases of the four-dimensional full-rank directions, p = [eta, theta, omega, zeta].
G_XI_PRIME = np.array([
    [0, 0, 0, 0],
    [0, 0, 0, 1],
    [1, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [0, 1, 0, 0],
], dtype=float)
G_XI = np.array([
    [0, -1, 0, 0],
    [0, 0, 0, 1],
    [0, 0, 1, 0],
    [1, 0, 0, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 0],
], dtype=float)


# ---------------------------------------------------------------- subspaces

@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Column basis of a subspace of R^n."""

    vectors: np.ndarray
    orthonormalized: bool = False

    def __post_init__(self):
        V = np.array(self.vectors, dtype=float)
        if V.ndim == 1:
            V = V[:, None]
        V.setflags(write=False)
        object.__setattr__(self, "vectors", V)

    @property
    def dim(self):
        return self.vectors.shape[1]

    @property
    def ambient(self):
        return self.vectors.shape[0]

    def orthonormal(self):
        if self.orthonormalized:
            return self
        return SubspaceBasis(orthonormal_basis(self.vectors), True)

    def projector(self):
        Q = self.orthonormal().vectors
        return Q @ Q.T

    def projection_residual(self, v):
        """Distance from ``v`` (or each column of ``v``) to the subspace."""
        v = np.asarray(v, dtype=float)
        r = v - self.projector() @ v
        return float(np.linalg.norm(r, axis=0).max())

    def max_angle(self, other):
        return max_principal_angle(self.vectors, other.vectors)

    def to_dict(self):
        return {"orthonormalized": self.orthonormalized, "vectors": self.vectors.T.tolist()}


def orthonormal_basis(V, rtol=RANK_RTOL):
    """Orthonormal basis of the column span of ``V``."""
    U, s, _ = np.linalg.svd(np.asarray(V, dtype=float), full_matrices=False)
    if s.size == 0 or s[0] == 0:
        return np.zeros((V.shape[0], 0))
    return U[:, s > rtol * s[0]]


def numerical_rank(M, rtol=RANK_RTOL):
    s = np.linalg.svd(np.asarray(M, dtype=float), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def null_space(M, rtol=RANK_RTOL):
    """Orthonormal basis (columns) of the numerical null space of ``M``."""
    M = np.asarray(M, dtype=float)
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    rank = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    return Vt[rank:].T


def max_principal_angle(X, Y):
    """Largest principal angle between the column spans of ``X`` and ``Y``."""
    Qx, Qy = orthonormal_basis(X), orthonormal_basis(Y)
    if Qx.shape[1] != Qy.shape[1]:
        return np.pi / 2
    s = np.linalg.svd(Qx.T @ Qy, compute_uv=False)
    cos_min = min(1.0, float(s.min()))
    # arcsin of the residual is accurate for tiny angles where arccos is not
    resid = Qy - Qx @ (Qx.T @ Qy)
    sin_max = min(1.0, float(np.linalg.norm(resid, 2)))
    return float(np.arcsin(sin_max)) if cos_min > 0.7 else float(np.arccos(cos_min))


def intersect(*bases):
    """Intersection of subspaces as the common null space of ``I - P_k``."""
    n = bases[0].ambient
    stacked = np.vstack([np.eye(n) - b.projector() for b in bases])
    return SubspaceBasis(null_space(stacked, rtol=1e-10), True)


def complement(basis):
    """Orthogonal complement of a subspace."""
    Q = basis.orthonormal().vectors
    return SubspaceBasis(null_space(Q.T) if Q.shape[1] else np.eye(basis.ambient), True)


# ---------------------------------------------------------------- residuals

def _split(params):
    params = np.asarray(params, dtype=float)
    if params.shape != (12,):
        raise ValueError("expected 12 parameters (two 6-vectors)")
    return params[:6], params[6:]


def _rotation(angles, parameterization):
    if parameterization == "givens":
        return s_theta(angles)
    if parameterization == "lie":
        return lie_exp(angles, 2)
    raise ValueError(f"unknown parameterization {parameterization!r}")


def bank_from_params(params, parameterization="givens", parities=None):
    """Bank built from Haar by two rotation steps given by the 12 parameters."""
    if parameterization not in PARAMETERIZATIONS:
        raise ValueError(f"unknown parameterization {parameterization!r}")
    if parities is None:
        parities = DEFAULT_PARITIES[parameterization]
    first, second = _split(params)
    steps = [RotationStep(_rotation(first, parameterization), parities[0]),
             RotationStep(_rotation(second, parameterization), parities[1])]
    return construct(steps, 2)


def lie_bank(xi, xi_prime):
    """``M(xi)`` with parity 0 then ``M(xi')`` with parity 1, from Haar."""
    return bank_from_params(np.concatenate([xi, xi_prime]), "lie", (0, 1))


def constraint_vector(bank, p):
    """Stacked ``sum A(even) - I``, ``sum A(odd) - I`` and moments of order 1..p-1."""
    d = bank.dim
    A = bank.A
    eye = np.eye(d)
    idx = np.arange(A.offset, A.offset + len(A))
    even = A.coeffs[idx % 2 == 0].sum(axis=0) if len(A) else np.zeros((d, d))
    odd = A.coeffs[idx % 2 == 1].sum(axis=0) if len(A) else np.zeros((d, d))
    parts = [(even - eye).ravel(), (odd - eye).ravel()]
    sign = np.where(idx % 2 == 0, 1.0, -1.0)
    k = idx.astype(float)
    for n in range(1, p):
        parts.append(np.einsum("k,kab->ab", sign * k**n, A.coeffs).ravel())
    return np.concatenate(parts)


def residual(params, parameterization="givens", p=2, parities=None):
    """Full-rank and sum-rule deviations of the bank built from ``params``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    return constraint_vector(bank_from_params(params, parameterization, parities), p)


# ---------------------------------------------------------------- solver

def finite_difference_jacobian(fun, x, h=FD_STEP):
    """Central differences, one column per coordinate."""
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((fun(x + e) - fun(x - e)) / (2 * h))
    return np.column_stack(cols)


@dataclass
class LmResult:
    x: np.ndarray
    residual: np.ndarray
    iterations: int
    converged: bool

    @property
    def norm(self):
        return float(np.abs(self.residual).max()) if self.residual.size else 0.0


def levenberg_marquardt(fun, x0, tol=1e-12, max_iter=200, damping=1e-3, max_damping=1e12):
    """Minimize ``||fun(x)||^2`` until the max-abs residual is below ``tol``.

    Damping is divided by 10 after an accepted step and multiplied by 10
    after a rejected one. Stops when damping exceeds ``max_damping``.
    """
    x = np.asarray(x0, dtype=float).copy()
    r = fun(x)
    cost = float(r @ r)
    lam = damping
    it = 0
    while it < max_iter and np.abs(r).max() > tol:
        it += 1
        J = finite_difference_jacobian(fun, x)
        g = J.T @ r
        H = J.T @ J
        accepted = False
        while lam <= max_damping:
            step = np.linalg.solve(H + lam * np.eye(x.size), -g)
            x_new = x + step
            r_new = fun(x_new)
            cost_new = float(r_new @ r_new)
            if cost_new < cost:
                x, r, cost = x_new, r_new, cost_new
                lam = max(lam / 10, 1e-15)
                accepted = True
                break
            lam *= 10
        if not accepted:
            break
    return LmResult(x, r, it, bool(np.abs(r).max() <= tol))


@dataclass
class SolveResult:
    params: np.ndarray
    residual_norm: float
    success: bool
    restart: int
    iterations: int
    parameterization: str
    p: int

    def bank(self):
        return bank_from_params(self.params, self.parameterization)

    def to_dict(self):
        return {
            "params": self.params.tolist(),
            "residual_norm": self.residual_norm,
            "success": self.success,
            "restart": self.restart,
            "iterations": self.iterations,
            "parameterization": self.parameterization,
            "p": self.p,
        }


def restart_point(seed, index):
    """Initial parameters for restart ``index``: uniform in [-pi, pi]^12."""
    return np.random.default_rng([seed, index]).uniform(-np.pi, np.pi, 12)


def solve_constraints(initial=None, parameterization="givens", p=2, restarts=0, seed=0,
                      tol=1e-12, max_iter=200):
    """Least-squares solve of the full-rank and sum-rule constraints.

    Attempt 0 starts from ``initial`` when given; attempts 1..restarts start
    from seeded random points. The best attempt, ordered by (residual,
    attempt index), is returned with ``success`` set when it meets ``tol``.
    """
    if parameterization not in PARAMETERIZATIONS:
        raise ValueError(f"unknown parameterization {parameterization!r}")

    def fun(x):
        return residual(x, parameterization, p)

    starts = []
    if initial is not None:
        starts.append((0, np.asarray(initial, dtype=float)))
    starts += [(i, restart_point(seed, i)) for i in range(1, restarts + 1)]
    if not starts:
        raise ValueError("nothing to solve: give an initial point or restarts > 0")

    best = None
    for index, x0 in starts:
        out = levenberg_marquardt(fun, x0, tol=tol, max_iter=max_iter)
        key = (out.norm, index)
        if best is None or key < best[0]:
            best = (key, index, out)
    _, index, out = best
    return SolveResult(out.x, out.norm, out.converged, index, out.iterations, parameterization, p)


def solution_report(result, tol=None):
    """QMF, full-rank and sum-rule checks of a solver result at its tolerance."""
    tol = EXACT_TOL if tol is None else tol
    return check_qmf(result.bank(), tol, result.p)


# ---------------------------------------------------------------- linear analysis

def polyphase_window(bank, lo=-1, hi=1):
    """Stacked coefficients ``L_lo .. L_hi`` of the polyphase matrix."""
    return polyphase(bank).window(lo, hi).ravel()


def _embedding(v):
    xi, xi_prime = v[:6], v[6:]
    return polyphase_window(lie_bank(xi, xi_prime))


def jacobian_at_origin(h=FD_STEP):
    """48 x 12 linearization of ``[xi; xi'] -> (L_-1, L_0, L_1)`` at the Haar bank."""
    return finite_difference_jacobian(_embedding, np.zeros(12), h)


def kernel_basis():
    return SubspaceBasis(np.column_stack([GAMMA_1, GAMMA_2]))


SWAP = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])


def sufficient_condition_matrix():
    """16 x 12 matrix of ``(sum xi X) J + J (sum xi' X) = 0``."""
    n = lie_dimension(2)
    cols = [(lie_generator(a, 2) @ SWAP).ravel() for a in range(1, n + 1)]
    cols += [(SWAP @ lie_generator(a, 2)).ravel() for a in range(1, n + 1)]
    return np.column_stack(cols)


def sufficient_condition_space():
    return SubspaceBasis(null_space(sufficient_condition_matrix()), True)


def complement_intersection():
    """Sufficient-condition directions orthogonal to the kernel."""
    return intersect(sufficient_condition_space(), complement(kernel_basis()))


def full_rank_directions():
    """``(G_xi', G_xi)``: the reference 6 x 4 bases, columns indexed by p."""
    return G_XI_PRIME.copy(), G_XI.copy()


def direction_basis():
    """The columns ``[G_xi; G_xi']`` as vectors in [xi; xi'] coordinates."""
    return SubspaceBasis(np.vstack([G_XI, G_XI_PRIME]))


def full_rank_deviation(xi, xi_prime):
    """Max-abs deviation of ``L(1)`` from the Haar value ``[[I, I], [I, -I]]``."""
    L = polyphase(lie_bank(xi, xi_prime))
    target = polyphase(haar(2))
    return float(np.abs(L.coeffs.sum(axis=0) - target.coeffs.sum(axis=0)).max())


def full_rank_check_along_ray(p, t_grid):
    """Worst full-rank deviation of ``t -> (t G_xi p, t G_xi' p)`` over ``t_grid``."""
    p = np.asarray(p, dtype=float)
    xi, xi_prime = G_XI @ p, G_XI_PRIME @ p
    return max(full_rank_deviation(t * xi, t * xi_prime) for t in np.asarray(t_grid, dtype=float))

