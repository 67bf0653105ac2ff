"""Exact number kernel: rationals, integer polynomials, algebraic numbers,
and certified elementary-function enclosures."""

from .intervals import FloatInterval, RatInterval, dyadic_outward
from .algebraic import (
    AlgebraicNumber,
    as_rational,
    eval_int_poly,
    eval_poly2,
    float_enclosure,
    fraction_enclosure,
    isolate_real_roots,
    make_algebraic,
    refine,
    s_abs,
    s_add,
    s_cmp,
    s_div,
    s_eq,
    s_mul,
    s_neg,
    s_sign,
    s_sub,
    scalar_from_json,
    scalar_to_json,
    sign_at,
    to_float,
)
from .enclosures import exp_interval, log_interval, pow_interval, sqrt_interval

__all__ = [
    "AlgebraicNumber", "FloatInterval", "RatInterval", "as_rational",
    "dyadic_outward", "eval_int_poly", "eval_poly2", "exp_interval",
    "float_enclosure", "fraction_enclosure", "isolate_real_roots",
    "log_interval", "make_algebraic", "pow_interval", "refine", "s_abs",
    "s_add", "s_cmp", "s_div", "s_eq", "s_mul", "s_neg", "s_sign", "s_sub",
    "scalar_from_json", "scalar_to_json", "sign_at", "sqrt_interval",
    "to_float",
]
