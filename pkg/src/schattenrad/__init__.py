"""Schatten p-norms, the generalized Schatten p-numerical radius, and numerical
verification of block-matrix identities and inequalities for it."""

__version__ = "0.1.0"

from .matrix import (BlockPartition, adjoint, block2, direct_sum, extract_blocks, im_part,
                     off_diag, random_matrix, re_part, rotate)
from .radius import (CertifiedValue, OptimizerConfig, UncertifiedError, certified_sup,
                     circle_sup, omega, rotating_sum_sup)
from .spectral import INF, PNorm, schatten, singular_values

__all__ = [
    "BlockPartition", "CertifiedValue", "INF", "OptimizerConfig", "PNorm", "UncertifiedError",
    "adjoint", "block2", "certified_sup", "circle_sup", "direct_sum", "extract_blocks",
    "im_part", "off_diag", "omega", "random_matrix", "re_part", "rotate", "rotating_sum_sup",
    "schatten", "singular_values",
]
