"""Numerical laboratory for the Minkowski question-mark function and its measure."""
from .minkowski_core import (ALPHA, ContinuedFraction, DyadicValue, FareyAtom, box_inverse,
                             extended_F, farey_partition, question_mark, question_mark_cf)
from .stieltjes_quadrature import (coefficient_table, fourier_coefficient, integrate_dq,
                                   laplace_transform, mhat)
from .oscillatory import p_integral, tail_integral, lemma_scan
from .special_functions import Precision, bessel_j, bessel_k_imag, fresnel

__version__ = "0.1.0"

__all__ = [
    "ALPHA", "ContinuedFraction", "DyadicValue", "FareyAtom", "box_inverse", "extended_F",
    "farey_partition", "question_mark", "question_mark_cf", "coefficient_table",
    "fourier_coefficient", "integrate_dq", "laplace_transform", "mhat", "p_integral",
    "tail_integral", "lemma_scan", "Precision", "bessel_j", "bessel_k_imag", "fresnel",
]
