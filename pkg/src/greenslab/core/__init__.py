from .grid import make_grid, quadrature_weights, sample_field, integrate
from .discretization import make_problem, discretize, apply_operator, admissibility_check, checked_factorization
from .linalg import factor_symmetric, solve, invert, min_eigenvalue
from .kernel import build_greens_kernel, apply_kernel, hs_norm
from .positivity import (
    classify,
    quadratic_form,
    total_mass,
    row_mass_field,
    solve_unit_load,
    min_kernel_entry,
    bump_witness,
    somewhere_positive_check,
)
from .models import (
    Family,
    Verdict,
    Grid,
    Weights,
    Field,
    ProblemSpec,
    DiscreteOperator,
    GreensKernel,
    PositivityReport,
    WitnessF,
)

__all__ = [
    "make_grid",
    "quadrature_weights",
    "sample_field",
    "integrate",
    "make_problem",
    "discretize",
    "apply_operator",
    "admissibility_check",
    "checked_factorization",
    "factor_symmetric",
    "solve",
    "invert",
    "min_eigenvalue",
    "build_greens_kernel",
    "apply_kernel",
    "hs_norm",
    "classify",
    "quadratic_form",
    "total_mass",
    "row_mass_field",
    "solve_unit_load",
    "min_kernel_entry",
    "bump_witness",
    "somewhere_positive_check",
    "Family",
    "Verdict",
    "Grid",
    "Weights",
    "Field",
    "ProblemSpec",
    "DiscreteOperator",
    "GreensKernel",
    "PositivityReport",
    "WitnessF",
]
