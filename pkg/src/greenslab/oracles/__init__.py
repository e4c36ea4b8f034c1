from .exact import (
    ExactKernel,
    exact_greens_beam,
    exact_greens_second_order,
    exact_kernel,
    exact_kernel_matrix,
    exact_unit_load,
)
from .spectral import EigenExpansion, eigen_expansion_kernel

__all__ = [
    "ExactKernel",
    "exact_greens_beam",
    "exact_greens_second_order",
    "exact_kernel",
    "exact_kernel_matrix",
    "exact_unit_load",
    "EigenExpansion",
    "eigen_expansion_kernel",
]
