"""Orthogonal matrix QMF filter banks built from rotations."""

from .laurent import LaurentMatrix, MatrixSequence, VectorSignal, delta, translate
from .qmf import FilterBank, check_full_rank, check_qmf, check_sum_rules, haar
from .rotations import RotationStep, apply_step, construct, givens, lie_exp, s_theta

__all__ = [
    "FilterBank",
    "LaurentMatrix",
    "MatrixSequence",
    "RotationStep",
    "VectorSignal",
    "apply_step",
    "check_full_rank",
    "check_qmf",
    "check_sum_rules",
    "construct",
    "delta",
    "givens",
    "haar",
    "lie_exp",
    "s_theta",
    "translate",
]
