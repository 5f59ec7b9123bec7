"""Generalized proportional Hadamard fractional integrals and inequality checks."""

from .numcore import (
    DomainError,
    DomainSpec,
    Pointwise,
    PositiveFunction,
    PowerFunction,
    combine,
    constant,
    evaluate,
    function_from_json,
    make_function,
)
from .operators import (
    FracParams,
    PowerImageSpec,
    closed_form_power_image,
    hadamard_left,
    hadamard_right,
    rl_proportional_left,
    rl_proportional_right,
    semigroup_compose,
)
from .quadrature import OperatorValue, QuadratureRule, build_jacobi_rule, integrate_adaptive, integrate_weighted

__all__ = [
    "DomainError", "DomainSpec", "Pointwise", "PositiveFunction", "PowerFunction", "combine",
    "constant", "evaluate", "function_from_json", "make_function", "FracParams", "PowerImageSpec",
    "closed_form_power_image", "hadamard_left", "hadamard_right", "rl_proportional_left",
    "rl_proportional_right", "semigroup_compose", "OperatorValue", "QuadratureRule",
    "build_jacobi_rule", "integrate_adaptive", "integrate_weighted",
]
