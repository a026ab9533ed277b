"""Certified arithmetic: outward-rounded intervals, parametric expressions and
rigorous bounds over the scale-variable domain."""

from .domain import (
    Scaled,
    SignCertificate,
    TailInfo,
    box_enclosure,
    certify_nonpositive,
    certify_positive,
    inf_over_domain,
    over_power,
    scaled_eval,
    sup_finite,
    sup_over_domain,
    tail_info,
)
from .expr import (
    E,
    PI,
    Add,
    Apply,
    Const,
    Div,
    Extremum,
    Mul,
    ParamExpr,
    Pow,
    Sub,
    Sym,
    affine_in,
    as_expr,
    const_value,
    emax,
    emin,
    eval_at,
    eval_float,
    exp,
    float_value,
    floor,
    is_constant,
    log,
    parse_expr,
    sqrt,
    substitute,
)
from .interval import CertScalar, as_cert, get_precision, hull, set_precision, working_precision

__all__ = [name for name in dir() if not name.startswith("_")]
